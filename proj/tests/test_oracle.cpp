#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "dce/bogoliubov.hpp"
#include "dce/geometry.hpp"
#include "dce/modes.hpp"
#include "dce/numerics.hpp"
#include "dce/oracle.hpp"

namespace {

const double kPi = 3.14159265358979323846;

double max_entry_gap(const dce::OracleRun& o, const dce::PerturbativeRun& pert,
                     std::size_t it, double eps) {
    double gap = 0.0;
    for (std::size_t e = 0; e < o.n * o.n; ++e)
        gap = std::max(gap, std::abs(o.beta[it][e] - eps * pert.beta1[it][e]));
    return gap;
}

} // namespace

TEST_CASE("a static mirror leaves the exact evolution at the identity") {
    const dce::CavityConfig cfg = dce::make_cavity(1.0);
    const dce::OracleRun run = dce::integrate_exact(
        dce::ModeSet::sector(1, 1, 3), dce::MirrorMotion(), cfg, dce::MetricParams{},
        1, {0.0, 2.5});
    for (std::size_t it = 0; it < 2; ++it) {
        CHECK(run.unitarity_defect(it) < 1e-12);
        for (std::size_t i = 0; i < run.n; ++i)
            for (std::size_t j = 0; j < run.n; ++j) {
                const std::complex<double> a = run.alpha[it][i * run.n + j];
                CHECK(std::abs(a - ((i == j) ? 1.0 : 0.0)) < 1e-12);
                CHECK(std::abs(run.beta[it][i * run.n + j]) < 1e-12);
            }
    }
}

TEST_CASE("driven evolution preserves the Bogoliubov identity within tolerance") {
    const dce::CavityConfig cfg = dce::make_cavity(1.0);
    const dce::MetricParams p{};
    const double w1 = dce::eigenfrequency_first({1, 1, 1}, cfg, p, 1.0);
    const dce::MirrorMotion motion = dce::MirrorMotion::sine(1e-3, 2.0 * w1);
    const double t = 2.0 * 0.02 / (1e-3 * kPi);  // drive parameter 0.02
    const dce::OracleRun run = dce::integrate_exact(
        dce::ModeSet::sector(1, 1, 4), motion, cfg, p, 1, {0.5 * t, t});
    CHECK(run.unitarity_defect(0) < 1e-8);
    CHECK(run.unitarity_defect(1) < 1e-8);
    CHECK(run.steps_taken > 0);
}

TEST_CASE("tighter step tolerances tighten the identity defect") {
    const dce::CavityConfig cfg = dce::make_cavity(1.0);
    const dce::MetricParams p{};
    const double w1 = dce::eigenfrequency_first({1, 1, 1}, cfg, p, 1.0);
    const dce::MirrorMotion motion = dce::MirrorMotion::sine(1e-3, 2.0 * w1);
    const double t = 2.0 * 0.01 / (1e-3 * kPi);
    const dce::ModeSet set = dce::ModeSet::sector(1, 1, 2);
    dce::OracleOptions loose, tight;
    loose.rtol = 1e-6;
    loose.atol = 1e-8;
    tight.rtol = 1e-11;
    tight.atol = 1e-13;
    const dce::OracleRun a = dce::integrate_exact(set, motion, cfg, p, 1, {t}, loose);
    const dce::OracleRun b = dce::integrate_exact(set, motion, cfg, p, 1, {t}, tight);
    CHECK(b.unitarity_defect(0) < a.unitarity_defect(0));
    CHECK(b.unitarity_defect(0) < 1e-9);
    CHECK(b.steps_taken > a.steps_taken);
}

TEST_CASE("perturbative reconstruction tracks the exact run to one percent") {
    const dce::CavityConfig cfg = dce::make_cavity(1.0);
    const dce::MetricParams p{};
    const double eps = 1e-3;
    const double w1 = dce::eigenfrequency_first({1, 1, 1}, cfg, p, 1.0);
    const dce::MirrorMotion motion = dce::MirrorMotion::sine(eps, 2.0 * w1);
    const double t = 2.0 * 0.05 / (eps * kPi);  // drive parameter 0.05
    const dce::ModeSet set = dce::ModeSet::sector(1, 1, 4);
    const dce::OracleRun exact = dce::integrate_exact(set, motion, cfg, p, 1, {t});
    const dce::PerturbativeRun pert =
        dce::solve_perturbative(set, motion, cfg, p, 1, {t});
    double scale = 0.0;
    for (std::size_t e = 0; e < set.size() * set.size(); ++e)
        scale = std::max(scale, eps * std::abs(pert.beta1[0][e]));
    CHECK(max_entry_gap(exact, pert, 0, eps) < 0.01 * scale);
    // the created numbers agree to the same quality
    CHECK(exact.mean_number(0, 0) ==
          doctest::Approx(pert.mean_number(0, 0)).epsilon(0.02));
}

TEST_CASE("reconstruction error shrinks quadratically with the amplitude") {
    // halving the drive amplitude must quarter the defect against the
    // first-order reconstruction, since the first dropped order is quadratic
    const dce::CavityConfig cfg = dce::make_cavity(1.0);
    const dce::MetricParams p{};
    const double w1 = dce::eigenfrequency_first({1, 1, 1}, cfg, p, 1.0);
    const double t = 2.0 * 0.01 / (1e-3 * kPi);
    const dce::ModeSet set = dce::ModeSet::sector(1, 1, 4);
    const dce::PerturbativeRun pert = dce::solve_perturbative(
        set, dce::MirrorMotion::sine(1e-3, 2.0 * w1), cfg, p, 1, {t});
    auto gap_at = [&](double eps) {
        const dce::OracleRun exact = dce::integrate_exact(
            set, dce::MirrorMotion::sine(eps, 2.0 * w1), cfg, p, 1, {t});
        return max_entry_gap(exact, pert, 0, eps);
    };
    const double ratio = gap_at(1e-3) / gap_at(5e-4);
    CHECK(ratio > 3.3);
    CHECK(ratio < 4.8);
}

TEST_CASE("resonant fundamental number approaches a third of the squared parameter") {
    // chain: the symmetric self-bracket of the fundamental is 1/6, the
    // resonant window saturates at one, so |beta| ~ eps omega_1 t / 6 and
    // N_1 = (eps omega_1 t / 6)^2 = tau_p^2 / 3 for the cubic cavity, with
    // tau_p = eps pi t / 2 in flat space-time (omega_1 = pi sqrt(3))
    const dce::CavityConfig cfg = dce::make_cavity(1.0);
    const dce::MetricParams p{};
    const double eps = 1e-3, tau_p = 0.05;
    const double w1 = dce::eigenfrequency_first({1, 1, 1}, cfg, p, 1.0);
    const dce::MirrorMotion motion = dce::MirrorMotion::sine(eps, 2.0 * w1);
    const double t = 2.0 * tau_p / (eps * kPi);
    const dce::OracleRun run = dce::integrate_exact(
        dce::ModeSet::sector(1, 1, 4), motion, cfg, p, 1, {t});
    CHECK(run.mean_number(0, 0) ==
          doctest::Approx(tau_p * tau_p / 3.0).epsilon(0.02));
}

TEST_CASE("gradient-carrying exact run stays near the gradient-free one") {
    const dce::CavityConfig cfg = dce::make_cavity(1.0);
    const double ga = 1e-4;
    const dce::MetricParams curved{0.0, ga};
    const dce::MetricParams flat{};
    const double w1 = dce::eigenfrequency_second({1, 1, 1}, cfg, curved, 1.0);
    const dce::MirrorMotion motion = dce::MirrorMotion::sine(1e-3, 2.0 * w1);
    const double t = 2.0 * 2.0 * kPi / (2.0 * w1);
    const dce::ModeSet set = dce::ModeSet::sector(1, 1, 2);
    const dce::OracleRun a = dce::integrate_exact(set, motion, cfg, curved, 2, {t});
    const dce::OracleRun b = dce::integrate_exact(set, motion, cfg, flat, 1, {t});
    double scale = 0.0, diff = 0.0;
    for (std::size_t e = 0; e < set.size() * set.size(); ++e) {
        scale = std::max(scale, std::abs(b.beta[0][e]));
        diff = std::max(diff, std::abs(a.beta[0][e] - b.beta[0][e]));
    }
    CHECK(diff < 20.0 * ga * scale + 1e-10);
    CHECK(a.unitarity_defect(0) < 1e-8);
}

TEST_CASE("exact integrator rejects bad requests and exhausted budgets") {
    const dce::CavityConfig cfg = dce::make_cavity(1.0);
    const dce::MetricParams p{};
    const double w1 = dce::eigenfrequency_first({1, 1, 1}, cfg, p, 1.0);
    const dce::MirrorMotion motion = dce::MirrorMotion::sine(1e-3, 2.0 * w1);
    const dce::ModeSet set = dce::ModeSet::sector(1, 1, 2);
    CHECK_THROWS_AS(dce::integrate_exact(set, motion, cfg, p, 3, {1.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(dce::integrate_exact(set, motion, cfg, p, 1, {}),
                    std::invalid_argument);
    CHECK_THROWS_AS(dce::integrate_exact(set, motion, cfg, p, 1, {2.0, 1.0}),
                    std::invalid_argument);
    dce::OracleOptions bad;
    bad.rtol = -1.0;
    CHECK_THROWS_AS(dce::integrate_exact(set, motion, cfg, p, 1, {1.0}, bad),
                    std::invalid_argument);
    dce::OracleOptions starved;
    starved.max_steps = 3;
    CHECK_THROWS_AS(dce::integrate_exact(set, motion, cfg, p, 1, {50.0}, starved),
                    dce::convergence_error);
}
