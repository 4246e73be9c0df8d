#include <doctest.h>

#include <cmath>
#include <vector>

#include "dce/geometry.hpp"
#include "dce/numerics.hpp"

namespace {
const double kPi = 3.14159265358979323846;
}

TEST_CASE("weak-field parameters come out as M/R and M/R^2") {
    const dce::MetricParams p = dce::weak_field_expand(1e-3, 10.0);
    CHECK(p.chi == doctest::Approx(1e-4).epsilon(1e-15));
    CHECK(p.gamma == doctest::Approx(1e-5).epsilon(1e-15));
    CHECK_FALSE(p.flat());
    CHECK(dce::MetricParams{}.flat());
}

TEST_CASE("weak-field guard rejects a strong source unless overridden") {
    CHECK_THROWS_AS(dce::weak_field_expand(2.0, 10.0), std::invalid_argument);
    CHECK_THROWS_AS(dce::weak_field_expand(-1.0, 10.0), std::invalid_argument);
    const dce::MetricParams p = dce::weak_field_expand(2.0, 10.0, true);
    CHECK(p.chi == doctest::Approx(0.2));
}

TEST_CASE("metric determinant matches the diagonal product") {
    const dce::MetricParams p{3e-3, 2e-3};
    for (double z : {0.0, 0.3, 0.7, 1.0}) {
        const dce::MetricCoefficients m = dce::metric_coefficients(z, p);
        CHECK(m.g00 == doctest::Approx(-(1.0 - 2 * p.chi + 2 * p.gamma * z))
                           .epsilon(1e-15));
        CHECK(m.gii == doctest::Approx(1.0 + 2 * p.chi - 2 * p.gamma * z)
                           .epsilon(1e-15));
        const double det = (-m.g00) * m.gii * m.gii * m.gii;
        CHECK(m.sqrt_neg_g * m.sqrt_neg_g == doctest::Approx(det).epsilon(1e-14));
    }
}

TEST_CASE("measure and flux weights reduce to their closed forms") {
    const dce::MetricParams p{4e-3, 1e-3};
    for (double z : {0.0, 0.25, 0.9}) {
        const double L = 1.0 - 2 * p.chi + 2 * p.gamma * z;
        const double S = 1.0 + 2 * p.chi - 2 * p.gamma * z;
        CHECK(dce::density_weight(z, p) ==
              doctest::Approx(std::pow(S, 1.5) / std::sqrt(L)).epsilon(1e-14));
        CHECK(dce::flux_weight(z, p) ==
              doctest::Approx(std::sqrt(L * S)).epsilon(1e-14));
    }
    CHECK(dce::density_weight(0.4, dce::MetricParams{}) == 1.0);
    CHECK(dce::flux_weight(0.4, dce::MetricParams{}) == 1.0);
}

TEST_CASE("a degenerate metric is rejected, not evaluated") {
    CHECK_THROWS_AS(dce::density_weight(1.0, dce::MetricParams{0.0, 0.6}),
                    std::domain_error);
}

TEST_CASE("cavity size guard keeps the cavity small against the source distance") {
    CHECK_THROWS_AS(dce::make_cavity(1.0, 100.0), std::invalid_argument);
    CHECK_NOTHROW(dce::make_cavity(1.0, 5000.0));
    CHECK_NOTHROW(dce::make_cavity(1.0, 100.0, true));
    CHECK_NOTHROW(dce::make_cavity(1.0));  // no source distance, no guard
    CHECK_THROWS_AS(dce::make_cavity(-1.0), std::invalid_argument);
}

TEST_CASE("sinusoidal mirror motion matches its analytic law") {
    const dce::CavityConfig cfg = dce::make_cavity(2.0);
    const dce::MirrorMotion m = dce::MirrorMotion::sine(1e-2, 3.0);
    for (double t : {0.0, 0.4, 1.9}) {
        CHECK(m.position(t, cfg) ==
              doctest::Approx(2.0 * (1.0 + 1e-2 * std::sin(3.0 * t))).epsilon(1e-15));
        const double v_fd = dce::fd::derivative(
            [&](double s) { return m.position(s, cfg); }, t, 1e-3);
        CHECK(m.velocity(t, cfg) == doctest::Approx(v_fd).epsilon(1e-8));
    }
    CHECK(m.epsilon() == 1e-2);
    CHECK(m.varpi() == 3.0);
    CHECK(m.is_sine());
}

TEST_CASE("motion guards reject an amplitude that can close the cavity") {
    CHECK_THROWS_AS(dce::MirrorMotion::sine(1.0, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(dce::MirrorMotion::sine(0.1, 0.0), std::invalid_argument);
}

TEST_CASE("tabulated motion interpolates the sampled profile") {
    std::vector<double> t, f;
    for (int i = 0; i <= 200; ++i) {
        t.push_back(3.0 * i / 200.0);
        f.push_back(std::sin(2.0 * kPi * t.back() / 3.0));
    }
    const dce::MirrorMotion m = dce::MirrorMotion::tabulated(1e-3, t, f);
    CHECK_FALSE(m.is_sine());
    double worst_f = 0.0, worst_r = 0.0;
    for (int i = 0; i <= 77; ++i) {
        const double s = 0.1 + 2.8 * i / 77.0;
        worst_f = std::max(worst_f,
                           std::abs(m.profile(s) - std::sin(2.0 * kPi * s / 3.0)));
        worst_r = std::max(worst_r, std::abs(m.profile_rate(s) -
                                             (2.0 * kPi / 3.0) *
                                                 std::cos(2.0 * kPi * s / 3.0)));
    }
    CHECK(worst_f < 1e-6);
    CHECK(worst_r < 1e-3);
    CHECK_THROWS_AS(m.profile(3.5), std::out_of_range);
}

TEST_CASE("order-1 proper units follow the square-root factors") {
    const dce::MetricParams p{2e-3, 0.0};
    const dce::LengthTime pr = dce::to_proper_units(1.5, 4.0, p, 1);
    CHECK(pr.a == doctest::Approx(1.5 * std::sqrt(1.0 + 2 * p.chi)).epsilon(1e-15));
    CHECK(pr.t == doctest::Approx(4.0 * std::sqrt(1.0 - 2 * p.chi)).epsilon(1e-15));
    const dce::LengthTime back = dce::from_proper_units(pr.a, pr.t, p, 1);
    CHECK(back.a == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(back.t == doctest::Approx(4.0).epsilon(1e-15));
}

TEST_CASE("order-2 proper units invert their defining relations exactly") {
    const dce::MetricParams p{1e-3, 2e-3};
    const double a0 = 1.2, t = 5.0;
    const dce::LengthTime pr = dce::to_proper_units(a0, t, p, 2);
    // defining relations: a0 = a_p (1 + chi + gamma a_p / 2),
    //                     t  = (1 + chi - gamma a_p) t_p
    CHECK(a0 == doctest::Approx(pr.a * (1.0 + p.chi + 0.5 * p.gamma * pr.a))
                    .epsilon(1e-13));
    CHECK(t == doctest::Approx((1.0 + p.chi - p.gamma * pr.a) * pr.t).epsilon(1e-13));
    const dce::LengthTime back = dce::from_proper_units(pr.a, pr.t, p, 2);
    CHECK(back.a == doctest::Approx(a0).epsilon(1e-13));
    CHECK(back.t == doctest::Approx(t).epsilon(1e-13));
}

TEST_CASE("proper units collapse to coordinates in flat space-time") {
    for (int order : {1, 2}) {
        const dce::LengthTime pr = dce::to_proper_units(0.7, 2.2,
                                                        dce::MetricParams{}, order);
        CHECK(pr.a == doctest::Approx(0.7).epsilon(1e-15));
        CHECK(pr.t == doctest::Approx(2.2).epsilon(1e-15));
    }
    CHECK_THROWS_AS(dce::to_proper_units(1.0, 1.0, dce::MetricParams{}, 3),
                    std::invalid_argument);
}
