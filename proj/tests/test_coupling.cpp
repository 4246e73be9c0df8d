#include <doctest.h>

#include <cmath>
#include <complex>

#include "dce/coupling.hpp"
#include "dce/geometry.hpp"
#include "dce/modes.hpp"

namespace {

const double kPi = 3.14159265358979323846;

// Series form of the accumulated phase for a(t) = a0 (1 + eps sin(varpi t)):
// the eigenfrequency responds as domega/da = -omega kz^2 / (a (kt^2 + kz^2)),
// so to first order in eps
//   Theta = omega0 [ (t - t0) + eps q (cos(varpi t) - cos(varpi t0)) / varpi ],
// with q = nz^2 / |n|^2 for a cavity cubic at rest.
double theta_series(const dce::ModeIndex& k, double omega0, double eps, double varpi,
                    double t0, double t) {
    const double q = double(k.nz) * k.nz / k.magnitude_sq();
    return omega0 * ((t - t0) + eps * q * (std::cos(varpi * t) - std::cos(varpi * t0)) /
                                    varpi);
}

} // namespace

TEST_CASE("closed bracket reproduces the quadrature bracket for sine modes") {
    const dce::CavityConfig cfg = dce::make_cavity(1.0);
    const dce::MetricParams p{1e-4, 0.0};
    const double a = 1.03;
    for (const auto& [i, j] : {std::pair<int, int>{1, 1}, {1, 2}, {2, 1}, {3, 2},
                               {2, 2}}) {
        const dce::ModeIndex k{1, 1, i}, kp{1, 1, j};
        const double closed = dce::coupling_bracket_first_closed(k, kp, cfg, p, a);
        const double quad = dce::coupling_bracket(k, kp, 1, cfg, p, a);
        CHECK(quad == doctest::Approx(closed).epsilon(1e-8));
    }
}

TEST_CASE("modes of different transverse sectors do not couple") {
    const dce::CavityConfig cfg = dce::make_cavity(1.0);
    const dce::MetricParams p{1e-4, 0.0};
    CHECK(dce::coupling_bracket({1, 1, 1}, {2, 1, 1}, 1, cfg, p, 1.0) == 0.0);
    CHECK(dce::coupling_bracket_first_closed({1, 2, 1}, {1, 1, 2}, cfg, p, 1.0) ==
          0.0);
}

TEST_CASE("coupling matrix splits into symmetric and antisymmetric parts") {
    const dce::CavityConfig cfg = dce::make_cavity(1.0);
    const dce::ModeSet set = dce::ModeSet::sector(1, 1, 5);
    const dce::CouplingMatrix m =
        dce::coupling_matrix(set, 1, cfg, dce::MetricParams{}, 1.02, 0.4);
    for (std::size_t i = 0; i < set.size(); ++i) {
        CHECK(m.anti_at(i, i) == 0.0);
        for (std::size_t j = 0; j < set.size(); ++j) {
            CHECK(std::abs(m.sym_at(i, j) + m.anti_at(i, j) - m.full_at(i, j)) <
                  1e-12);
            CHECK(std::abs(m.sym_at(i, j) - m.sym_at(j, i)) < 1e-12);
            CHECK(std::abs(m.anti_at(i, j) + m.anti_at(j, i)) < 1e-12);
        }
    }
}

TEST_CASE("a static mirror produces no coupling") {
    const dce::CavityConfig cfg = dce::make_cavity(1.0);
    const dce::MirrorMotion still;
    CHECK(dce::coupling_G({1, 1, 1}, {1, 1, 2}, 1, cfg, dce::MetricParams{}, still,
                          0.7) == 0.0);
    const dce::CouplingMatrix m =
        dce::coupling_matrix(dce::ModeSet::sector(1, 1, 3), 1, cfg,
                             dce::MetricParams{}, 1.0, 0.0);
    for (double v : m.full) CHECK(v == 0.0);
}

TEST_CASE("full coupling is mirror velocity times the frozen bracket, to first order") {
    const dce::CavityConfig cfg = dce::make_cavity(1.0);
    const dce::MetricParams p{1e-4, 0.0};
    const double varpi = 2.0 * kPi;
    // the full coupling evaluates the bracket at the displaced mirror, so the
    // residual against the frozen bracket is one more power of the amplitude:
    // relative size O(eps), shrinking linearly as eps does
    auto rel_residual = [&](double eps, double t) {
        const dce::MirrorMotion motion = dce::MirrorMotion::sine(eps, varpi);
        const double g = dce::coupling_G({1, 1, 1}, {1, 1, 2}, 1, cfg, p, motion, t);
        const double bracket =
            dce::coupling_bracket_first_closed({1, 1, 1}, {1, 1, 2}, cfg, p, 1.0);
        const double first_order = eps * varpi * std::cos(varpi * t) * bracket;
        return std::abs(g - first_order) / std::abs(g);
    };
    for (double t : {0.11, 0.43, 0.77}) {
        const double coarse = rel_residual(1e-4, t);
        const double finer = rel_residual(1e-5, t);
        CHECK(coarse < 1e-3);
        CHECK(coarse / finer == doctest::Approx(10.0).epsilon(0.1));
        const dce::MirrorMotion motion = dce::MirrorMotion::sine(1e-4, varpi);
        const double g = dce::coupling_G({1, 1, 1}, {1, 1, 2}, 1, cfg, p, motion, t);
        CHECK(dce::coupling_G_first_closed({1, 1, 1}, {1, 1, 2}, cfg, p, motion, t) ==
              doctest::Approx(g).epsilon(1e-8));
    }
}

TEST_CASE("rest brackets scale the moving coupling matrix") {
    const dce::CavityConfig cfg = dce::make_cavity(1.0);
    const dce::MetricParams p{0.0, 0.0};
    const dce::ModeSet set = dce::ModeSet::sector(1, 1, 4);
    const dce::RestBrackets rest = dce::rest_brackets(set, 1, cfg, p);
    const double eps = 1e-6, varpi = 5.0, t = 0.21;
    const dce::MirrorMotion motion = dce::MirrorMotion::sine(eps, varpi);
    const dce::CouplingMatrix moving = dce::coupling_matrix(
        set, 1, cfg, p, motion.position(t, cfg), motion.velocity(t, cfg));
    const double rate = eps * varpi * std::cos(varpi * t);
    double scale = 0.0, diff = 0.0;
    for (std::size_t i = 0; i < set.size(); ++i)
        for (std::size_t j = 0; j < set.size(); ++j) {
            scale = std::max(scale, std::abs(moving.sym_at(i, j)));
            diff = std::max({diff,
                             std::abs(moving.sym_at(i, j) - rate * rest.sym_at(i, j)),
                             std::abs(moving.anti_at(i, j) -
                                      rate * rest.anti_at(i, j))});
        }
    CHECK(diff / scale < 1e-4);
    CHECK(rest.omega[0] ==
          doctest::Approx(dce::eigenfrequency_first({1, 1, 1}, cfg, p, 1.0))
              .epsilon(1e-15));
}

TEST_CASE("diagonal pair kernel starts at minus a sixth of the drive frequency") {
    // for the fundamental of the cubic cavity the self-bracket is
    // -nz^2 / (2 |n|^2) = -1/6, and the kernel phase vanishes at t = t0
    const dce::CavityConfig cfg = dce::make_cavity(1.0);
    const double varpi = 11.0;
    const dce::MirrorMotion motion = dce::MirrorMotion::sine(1e-3, varpi);
    const dce::KernelPair kp = dce::lambda_xi_closed_form(
        {1, 1, 1}, {1, 1, 1}, cfg, dce::MetricParams{}, motion, 0.0);
    CHECK(kp.lambda.real() == doctest::Approx(-varpi / 6.0).epsilon(1e-12));
    CHECK(std::abs(kp.lambda.imag()) < 1e-12);
    CHECK(std::abs(kp.xi) < 1e-15);
}

TEST_CASE("closed kernels match amplitude differencing of the quadrature path") {
    const dce::CavityConfig cfg = dce::make_cavity(1.0);
    const dce::MetricParams p{0.0, 0.0};
    const double w1 = dce::eigenfrequency_first({1, 1, 1}, cfg, p, 1.0);
    const dce::MirrorMotion motion = dce::MirrorMotion::sine(1e-3, 2.0 * w1);
    const double period = 2.0 * kPi / (2.0 * w1);
    for (const auto& [i, j] : {std::pair<int, int>{1, 1}, {1, 2}, {2, 3}}) {
        for (double frac : {0.13, 0.41, 0.87}) {
            const double t = frac * period;
            const dce::KernelPair closed = dce::lambda_xi_closed_form(
                {1, 1, i}, {1, 1, j}, cfg, p, motion, t);
            const dce::KernelPair numeric = dce::lambda_xi_numeric(
                {1, 1, i}, {1, 1, j}, 1, 1, cfg, p, motion, t);
            CHECK(std::abs(closed.lambda - numeric.lambda) <
                  1e-6 * std::abs(numeric.lambda) + 1e-10);
            CHECK(std::abs(closed.xi - numeric.xi) <
                  1e-6 * std::abs(numeric.xi) + 1e-10);
        }
    }
}

TEST_CASE("differenced kernels do not depend on the probe amplitude") {
    const dce::CavityConfig cfg = dce::make_cavity(1.0);
    const dce::MetricParams p{0.0, 0.0};
    const double w1 = dce::eigenfrequency_first({1, 1, 1}, cfg, p, 1.0);
    const dce::MirrorMotion motion = dce::MirrorMotion::sine(1e-3, 2.0 * w1);
    dce::CouplingOptions coarse, fine;
    fine.eps_step = 0.5 * coarse.eps_step;
    const double t = 0.29 * 2.0 * kPi / (2.0 * w1);
    const dce::KernelPair a = dce::lambda_xi_numeric({1, 1, 1}, {1, 1, 2}, 1, 1, cfg,
                                                     p, motion, t, 0.0, coarse);
    const dce::KernelPair b = dce::lambda_xi_numeric({1, 1, 1}, {1, 1, 2}, 1, 1, cfg,
                                                     p, motion, t, 0.0, fine);
    CHECK(std::abs(a.lambda - b.lambda) < 1e-8 * std::abs(b.lambda) + 1e-12);
    CHECK_THROWS_AS(dce::lambda_xi_numeric({1, 1, 1}, {1, 1, 2}, 1, 3, cfg, p, motion,
                                           t),
                    std::invalid_argument);
}

TEST_CASE("kernel phase rotates with the pair and difference frequencies") {
    // after removing the drive modulation, the pair kernel must rotate as
    // e^{i (w_k + w_kp)(t - t0)} and the scattering kernel as the difference
    const dce::CavityConfig cfg = dce::make_cavity(1.0);
    const dce::MetricParams p{0.0, 0.0};
    const double w1 = dce::eigenfrequency_first({1, 1, 1}, cfg, p, 1.0);
    const double w2 = dce::eigenfrequency_first({1, 1, 2}, cfg, p, 1.0);
    const double varpi = 2.0 * w1;
    const dce::MirrorMotion motion = dce::MirrorMotion::sine(1e-3, varpi);
    const double t = 0.171;
    const dce::KernelPair at_t = dce::lambda_xi_closed_form({1, 1, 1}, {1, 1, 2}, cfg,
                                                            p, motion, t);
    const dce::KernelPair at_0 = dce::lambda_xi_closed_form({1, 1, 1}, {1, 1, 2}, cfg,
                                                            p, motion, 0.0);
    const double mod = std::cos(varpi * t);
    const std::complex<double> lam_expect =
        at_0.lambda * mod * std::polar(1.0, (w1 + w2) * t);
    const std::complex<double> xi_expect =
        at_0.xi * mod * std::polar(1.0, (w1 - w2) * t);
    CHECK(std::abs(at_t.lambda - lam_expect) < 1e-8 * std::abs(lam_expect));
    CHECK(std::abs(at_t.xi - xi_expect) < 1e-8 * std::abs(xi_expect));
}

TEST_CASE("closed kernels exist only for the sinusoidal drive") {
    const dce::CavityConfig cfg = dce::make_cavity(1.0);
    const dce::MirrorMotion tab = dce::MirrorMotion::tabulated(
        1e-3, {0.0, 0.5, 1.0, 1.5, 2.0}, {0.0, 0.5, 0.0, -0.5, 0.0});
    CHECK_THROWS_AS(dce::lambda_xi_closed_form({1, 1, 1}, {1, 1, 2}, cfg,
                                               dce::MetricParams{}, tab, 0.5),
                    std::invalid_argument);
}

TEST_CASE("accumulated phase is linear for a static mirror") {
    const dce::CavityConfig cfg = dce::make_cavity(1.0);
    const dce::MetricParams p{1e-4, 0.0};
    const double w = dce::eigenfrequency_first({1, 1, 2}, cfg, p, 1.0);
    const double theta = dce::phase_theta({1, 1, 2}, 1, cfg, p, dce::MirrorMotion(),
                                          0.3, 2.8);
    CHECK(theta == doctest::Approx(w * 2.5).epsilon(1e-14));
}

TEST_CASE("accumulated phase follows the first-order series for a weak drive") {
    const dce::CavityConfig cfg = dce::make_cavity(1.0);
    const dce::MetricParams p{0.0, 0.0};
    const dce::ModeIndex k{1, 1, 2};
    const double w0 = dce::eigenfrequency_first(k, cfg, p, 1.0);
    const double eps = 1e-6, varpi = 4.3;
    const dce::MirrorMotion motion = dce::MirrorMotion::sine(eps, varpi);
    const double t0 = 0.0, t = 2.6;
    const double theta = dce::phase_theta(k, 1, cfg, p, motion, t0, t);
    const double series = theta_series(k, w0, eps, varpi, t0, t);
    CHECK(std::abs(theta - series) < 10.0 * eps * eps * w0 * t + 1e-12);
    // and it keeps increasing: the drive never stalls the clock
    const double theta_half = dce::phase_theta(k, 1, cfg, p, motion, t0, 0.5 * t);
    CHECK(theta > theta_half);
    CHECK(theta_half > 0.0);
}
