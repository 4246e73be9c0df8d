#include "dce/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dce/numerics.hpp"

namespace dce {

namespace {

using cplx = std::complex<double>;

const double kPi = 3.14159265358979323846;

bool reached(double t, double target) {
    return t >= target - 1e-12 * std::max(1.0, std::abs(target));
}

// Supplies the bracket matrix and the eigenfrequencies as functions of the
// mirror position. Metric order 1 has both in closed form; metric order 2
// tabulates them over the swept range once and interpolates, so the
// quadrature and root-finding cost is paid per sample position instead of
// per right-hand-side evaluation.
struct RhsTables {
    int order = 1;
    const ModeSet* set = nullptr;
    CavityConfig cfg;
    MetricParams p;
    std::size_t n = 0;
    bool constant = false;
    std::vector<double> br_const, w_const;
    std::vector<CubicSpline> br_spline;
    std::vector<CubicSpline> w_spline;

    void brackets(double a, std::vector<double>& br) const {
        if (order == 1) {
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    br[i * n + j] =
                        coupling_bracket_first_closed((*set)[i], (*set)[j], cfg, p, a);
            return;
        }
        if (constant) {
            for (std::size_t e = 0; e < n * n; ++e) br[e] = br_const[e];
            return;
        }
        for (std::size_t e = 0; e < n * n; ++e) br[e] = br_spline[e](a);
    }

    void frequencies(double a, std::vector<double>& w) const {
        if (order == 1) {
            for (std::size_t m = 0; m < n; ++m)
                w[m] = eigenfrequency_first((*set)[m], cfg, p, a);
            return;
        }
        if (constant) {
            for (std::size_t m = 0; m < n; ++m) w[m] = w_const[m];
            return;
        }
        for (std::size_t m = 0; m < n; ++m) w[m] = w_spline[m](a);
    }
};

RhsTables make_tables(const ModeSet& set, const MirrorMotion& motion,
                      const CavityConfig& cfg, const MetricParams& p,
                      int metric_order, double t0, double t_end,
                      const OracleOptions& opt) {
    RhsTables tb;
    tb.order = metric_order;
    tb.set = &set;
    tb.cfg = cfg;
    tb.p = p;
    tb.n = set.size();
    if (metric_order == 1) return tb;

    const double a0 = cfg.a0;
    double lo, hi;
    if (motion.is_sine()) {
        lo = a0 * (1.0 - motion.epsilon());
        hi = a0 * (1.0 + motion.epsilon());
    } else {
        lo = hi = motion.position(t0, cfg);
        const int scan = 4096;
        for (int s = 1; s <= scan; ++s) {
            const double a = motion.position(t0 + (t_end - t0) * s / scan, cfg);
            lo = std::min(lo, a);
            hi = std::max(hi, a);
        }
    }
    if (hi - lo < 1e-12 * a0) {
        tb.constant = true;
        const CouplingMatrix m =
            coupling_matrix(set, metric_order, cfg, p, a0, 1.0, opt.coupling);
        tb.br_const = m.full;
        tb.w_const.resize(tb.n);
        for (std::size_t k = 0; k < tb.n; ++k)
            tb.w_const[k] = eigenfrequency(set[k], metric_order, cfg, p, a0);
        return tb;
    }

    const double pad = 0.05 * (hi - lo);
    lo = std::max(lo - pad, 1e-6 * a0);
    hi += pad;
    const int samples = std::max(opt.bracket_samples, 4);
    const std::size_t n = tb.n;
    std::vector<double> pos(samples);
    std::vector<std::vector<double>> br_rows(n * n, std::vector<double>(samples));
    std::vector<std::vector<double>> w_rows(n, std::vector<double>(samples));
    for (int s = 0; s < samples; ++s) {
        const double a = lo + (hi - lo) * s / (samples - 1);
        pos[s] = a;
        const CouplingMatrix m =
            coupling_matrix(set, metric_order, cfg, p, a, 1.0, opt.coupling);
        for (std::size_t e = 0; e < n * n; ++e) br_rows[e][s] = m.full[e];
        for (std::size_t k = 0; k < n; ++k)
            w_rows[k][s] = eigenfrequency(set[k], metric_order, cfg, p, a);
    }
    tb.br_spline.reserve(n * n);
    for (std::size_t e = 0; e < n * n; ++e)
        tb.br_spline.emplace_back(pos, br_rows[e]);
    tb.w_spline.reserve(n);
    for (std::size_t k = 0; k < n; ++k) tb.w_spline.emplace_back(pos, w_rows[k]);
    return tb;
}

// Right-hand side of the amplitude equations. State layout: alpha block
// (n*n), beta block (n*n), then the accumulated phases (real parts of the
// trailing n entries).
struct Rhs {
    const RhsTables* tables;
    const MirrorMotion* motion;
    const CavityConfig* cfg;
    std::size_t n;
    mutable std::vector<double> br, w;
    mutable std::vector<cplx> ph, xi, lam;

    Rhs(const RhsTables& tb, const MirrorMotion& mo, const CavityConfig& c)
        : tables(&tb), motion(&mo), cfg(&c), n(tb.n), br(n * n), w(n), ph(n),
          xi(n * n), lam(n * n) {}

    void operator()(double t, const std::vector<cplx>& y,
                    std::vector<cplx>& dy) const {
        const std::size_t nn = n * n;
        const double a = motion->position(t, *cfg);
        tables->frequencies(a, w);
        for (std::size_t m = 0; m < n; ++m) dy[2 * nn + m] = cplx(w[m], 0.0);

        const double adot = motion->velocity(t, *cfg);
        if (adot == 0.0) {
            std::fill(dy.begin(), dy.begin() + 2 * nn, cplx(0.0, 0.0));
            return;
        }
        tables->brackets(a, br);
        for (std::size_t m = 0; m < n; ++m)
            ph[m] = std::polar(1.0, y[2 * nn + m].real());
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t m = 0; m < n; ++m) {
                const double gsym = 0.5 * adot * (br[k * n + m] + br[m * n + k]);
                const double ganti = 0.5 * adot * (br[k * n + m] - br[m * n + k]);
                xi[k * n + m] = ganti * ph[k] * std::conj(ph[m]);
                lam[k * n + m] = gsym * ph[k] * ph[m];
            }
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t j = 0; j < n; ++j) {
                cplx da(0.0, 0.0), db(0.0, 0.0);
                for (std::size_t m = 0; m < n; ++m) {
                    da += xi[k * n + m] * y[m * n + j] +
                          lam[k * n + m] * std::conj(y[nn + m * n + j]);
                    db += xi[k * n + m] * y[nn + m * n + j] +
                          lam[k * n + m] * std::conj(y[m * n + j]);
                }
                dy[k * n + j] = da;
                dy[nn + k * n + j] = db;
            }
    }
};

double row_defect(const std::vector<cplx>& y, std::size_t n) {
    const std::size_t nn = n * n;
    double worst = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        double sum = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            sum += std::norm(y[k * n + j]) - std::norm(y[nn + k * n + j]);
        worst = std::max(worst, std::abs(sum - 1.0));
    }
    return worst;
}

} // namespace

double OracleRun::mean_number(std::size_t it, std::size_t i) const {
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) sum += std::norm(beta[it][i * n + j]);
    return sum;
}

OracleRun integrate_exact(const ModeSet& set, const MirrorMotion& motion,
                          const CavityConfig& cfg, const MetricParams& p,
                          int metric_order, const std::vector<double>& t_out,
                          const OracleOptions& opt) {
    if (metric_order != 1 && metric_order != 2)
        throw std::invalid_argument("integrate_exact: metric order must be 1 or 2");
    if (set.size() == 0)
        throw std::invalid_argument("integrate_exact: empty mode set");
    if (t_out.empty())
        throw std::invalid_argument("integrate_exact: no output times requested");
    if (t_out.front() < opt.t0 - 1e-12 * std::max(1.0, std::abs(opt.t0)))
        throw std::invalid_argument("integrate_exact: output times precede the start");
    for (std::size_t i = 1; i < t_out.size(); ++i)
        if (t_out[i] <= t_out[i - 1])
            throw std::invalid_argument(
                "integrate_exact: output times must increase strictly");
    if (opt.rtol <= 0.0 || opt.atol <= 0.0)
        throw std::invalid_argument("integrate_exact: tolerances must be positive");
    if (opt.max_steps < 1)
        throw std::invalid_argument("integrate_exact: max_steps must be positive");

    const std::size_t n = set.size();
    const std::size_t nn = n * n;
    const std::size_t N = 2 * nn + n;

    const RhsTables tables = make_tables(set, motion, cfg, p, metric_order, opt.t0,
                                         t_out.back(), opt);
    Rhs rhs(tables, motion, cfg);

    OracleRun run;
    run.set = set;
    run.times = t_out;
    run.n = n;
    run.alpha.reserve(t_out.size());
    run.beta.reserve(t_out.size());
    run.defect.reserve(t_out.size());

    std::vector<cplx> y(N, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < n; ++i) y[i * n + i] = cplx(1.0, 0.0);

    std::vector<double> w0(n);
    tables.frequencies(motion.position(opt.t0, cfg), w0);
    const double omega_max = *std::max_element(w0.begin(), w0.end());

    // Dormand-Prince 5(4) pair; the error estimate is the difference of the
    // fifth and fourth order solutions under a mixed absolute/relative norm.
    std::vector<cplx> k1(N), k2(N), k3(N), k4(N), k5(N), k6(N), k7(N);
    std::vector<cplx> ytmp(N), y5(N), y4(N);

    double t = opt.t0;
    double h_prop = 0.05 * 2.0 * kPi / omega_max;
    long accepted = 0, rejected = 0;

    auto snapshot = [&]() {
        run.alpha.emplace_back(y.begin(), y.begin() + nn);
        run.beta.emplace_back(y.begin() + nn, y.begin() + 2 * nn);
        run.defect.push_back(row_defect(y, n));
    };

    for (double target : t_out) {
        while (!reached(t, target)) {
            if (accepted + rejected >= opt.max_steps)
                throw convergence_error("integrate_exact: step budget exhausted");
            const double h = std::min(h_prop, target - t);
            if (h < 1e-14 * std::max(1.0, std::abs(t)))
                throw convergence_error("integrate_exact: time step underflow");

            rhs(t, y, k1);
            for (std::size_t i = 0; i < N; ++i)
                ytmp[i] = y[i] + h * (0.2 * k1[i]);
            rhs(t + 0.2 * h, ytmp, k2);
            for (std::size_t i = 0; i < N; ++i)
                ytmp[i] = y[i] + h * (3.0 / 40.0 * k1[i] + 9.0 / 40.0 * k2[i]);
            rhs(t + 0.3 * h, ytmp, k3);
            for (std::size_t i = 0; i < N; ++i)
                ytmp[i] = y[i] + h * (44.0 / 45.0 * k1[i] - 56.0 / 15.0 * k2[i] +
                                      32.0 / 9.0 * k3[i]);
            rhs(t + 0.8 * h, ytmp, k4);
            for (std::size_t i = 0; i < N; ++i)
                ytmp[i] = y[i] + h * (19372.0 / 6561.0 * k1[i] -
                                      25360.0 / 2187.0 * k2[i] +
                                      64448.0 / 6561.0 * k3[i] -
                                      212.0 / 729.0 * k4[i]);
            rhs(t + 8.0 / 9.0 * h, ytmp, k5);
            for (std::size_t i = 0; i < N; ++i)
                ytmp[i] = y[i] + h * (9017.0 / 3168.0 * k1[i] - 355.0 / 33.0 * k2[i] +
                                      46732.0 / 5247.0 * k3[i] +
                                      49.0 / 176.0 * k4[i] -
                                      5103.0 / 18656.0 * k5[i]);
            rhs(t + h, ytmp, k6);
            for (std::size_t i = 0; i < N; ++i)
                y5[i] = y[i] + h * (35.0 / 384.0 * k1[i] + 500.0 / 1113.0 * k3[i] +
                                    125.0 / 192.0 * k4[i] - 2187.0 / 6784.0 * k5[i] +
                                    11.0 / 84.0 * k6[i]);
            rhs(t + h, y5, k7);
            for (std::size_t i = 0; i < N; ++i)
                y4[i] = y[i] + h * (5179.0 / 57600.0 * k1[i] +
                                    7571.0 / 16695.0 * k3[i] +
                                    393.0 / 640.0 * k4[i] -
                                    92097.0 / 339200.0 * k5[i] +
                                    187.0 / 2100.0 * k6[i] + 1.0 / 40.0 * k7[i]);

            double sum = 0.0;
            for (std::size_t i = 0; i < N; ++i) {
                const double scale =
                    opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
                const double e = std::abs(y5[i] - y4[i]) / scale;
                sum += e * e;
            }
            const double err = std::sqrt(sum / double(N));

            const double fac = std::clamp(
                0.9 * std::pow(std::max(err, 1e-16), -0.2), 0.2, 5.0);
            if (err <= 1.0) {
                t += h;
                y.swap(y5);
                ++accepted;
                h_prop = h * fac;
            } else {
                ++rejected;
                h_prop = h * std::min(fac, 1.0);
            }
        }
        snapshot();
    }

    run.steps_taken = accepted;
    run.steps_rejected = rejected;
    return run;
}

} // namespace dce
