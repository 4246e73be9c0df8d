#include "dce/coupling.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace dce {

namespace {

constexpr double kPi = std::numbers::pi;

void check_order(int order) {
    if (order != 1 && order != 2)
        throw std::invalid_argument("mode order must be 1 or 2");
}

double transverse_ksq(const ModeIndex& k, const CavityConfig& cfg) {
    const double kx = k.nx * kPi / cfg.a0;
    const double ky = k.ny * kPi / cfg.a0;
    return kx * kx + ky * ky;
}

// Per-mode data shared by all brackets at one mirror position. Order 2 keeps
// four displaced copies for Richardson differencing in a; order 1 has the
// analytic derivative.
struct PerMode {
    ModeIndex k;
    double omega = 0.0;
    double domega_da = 0.0;
    std::vector<ModeFunction> fns;  // [a] and, for order 2, [a+h, a-h, a+h/2, a-h/2]
};

PerMode prepare_mode(const ModeIndex& k, int order, const CavityConfig& cfg,
                     const MetricParams& p, double a, double h) {
    PerMode d;
    d.k = k;
    d.fns.reserve(order == 1 ? 1 : 5);
    d.fns.emplace_back(k, order, cfg, p, a);
    d.omega = d.fns[0].omega();
    if (order == 1) {
        const double kz = k.nz * kPi / a;
        const double ksq = transverse_ksq(k, cfg) + kz * kz;
        d.domega_da = -d.omega * kz * kz / (a * ksq);
    } else {
        d.fns.emplace_back(k, order, cfg, p, a + h);
        d.fns.emplace_back(k, order, cfg, p, a - h);
        d.fns.emplace_back(k, order, cfg, p, a + 0.5 * h);
        d.fns.emplace_back(k, order, cfg, p, a - 0.5 * h);
        const double coarse = (d.fns[1].omega() - d.fns[2].omega()) / (2.0 * h);
        const double fine = (d.fns[3].omega() - d.fns[4].omega()) / h;
        d.domega_da = (4.0 * fine - coarse) / 3.0;
    }
    return d;
}

double bracket_pair(const PerMode& row, const PerMode& col, int order, double a,
                    double h, const CouplingOptions& opt) {
    if (!same_sector(row.k, col.k)) return 0.0;
    double out = 0.0;
    if (row.k == col.k) out += col.domega_da / (2.0 * col.omega);

    const MetricParams m = row.fns[0].measure_metric();
    auto dxi = [&](double z) {
        if (order == 1) return col.fns[0].longitudinal_a_derivative(z);
        const double coarse = (col.fns[1].longitudinal(z) - col.fns[2].longitudinal(z)) /
                              (2.0 * h);
        const double fine = (col.fns[3].longitudinal(z) - col.fns[4].longitudinal(z)) / h;
        return (4.0 * fine - coarse) / 3.0;
    };
    quad::Options q;
    q.abs_tol = opt.quad_abs_tol;
    // the differenced integrand carries rounding noise of order eps/h per
    // point; an absolute tolerance below that is unreachable
    if (order == 2)
        q.abs_tol = std::max(
            q.abs_tol, 32.0 * std::numeric_limits<double>::epsilon() / opt.a_step_rel);
    q.min_panels = quad::oscillation_panels((row.k.nz + col.k.nz + 2) * kPi / a, 0.0, a);
    const double overlap =
        quad::integrate(
            [&](double z) {
                return -density_weight(z, m) * dxi(z) * row.fns[0].longitudinal(z);
            },
            0.0, a, q)
            .value;
    return out + std::sqrt(row.omega / col.omega) * overlap;
}

} // namespace

double coupling_bracket(const ModeIndex& k, const ModeIndex& kp, int order,
                        const CavityConfig& cfg, const MetricParams& p, double a,
                        const CouplingOptions& opt) {
    check_order(order);
    if (!same_sector(k, kp)) return 0.0;
    const double h = opt.a_step_rel * a;
    const PerMode row = prepare_mode(k, order, cfg, p, a, h);
    if (k == kp) return bracket_pair(row, row, order, a, h, opt);
    const PerMode col = prepare_mode(kp, order, cfg, p, a, h);
    return bracket_pair(row, col, order, a, h, opt);
}

double coupling_bracket_first_closed(const ModeIndex& k, const ModeIndex& kp,
                                     const CavityConfig& cfg, const MetricParams& p,
                                     double a) {
    if (!same_sector(k, kp)) return 0.0;
    if (k.nz == kp.nz) {
        const double kz = k.nz * kPi / a;
        const double ksq = transverse_ksq(k, cfg) + kz * kz;
        return -kz * kz / (2.0 * a * ksq);
    }
    const int m = k.nz, n = kp.nz;
    const double parity = ((m + n) % 2 == 0) ? 1.0 : -1.0;
    const double chat = std::pow(1.0 - 4.0 * p.chi * p.chi, 1.5);
    const double wk = eigenfrequency_first(k, cfg, p, a);
    const double wkp = eigenfrequency_first(kp, cfg, p, a);
    return -chat * parity * 2.0 * m * n / (double(m) * m - double(n) * n) / a *
           std::sqrt(wk / wkp);
}

double coupling_G(const ModeIndex& k, const ModeIndex& kp, int order,
                  const CavityConfig& cfg, const MetricParams& p,
                  const MirrorMotion& motion, double t, const CouplingOptions& opt) {
    const double a_dot = motion.velocity(t, cfg);
    if (a_dot == 0.0) return 0.0;
    return a_dot * coupling_bracket(k, kp, order, cfg, p, motion.position(t, cfg), opt);
}

double coupling_G_first_closed(const ModeIndex& k, const ModeIndex& kp,
                               const CavityConfig& cfg, const MetricParams& p,
                               const MirrorMotion& motion, double t) {
    const double a_dot = motion.velocity(t, cfg);
    if (a_dot == 0.0) return 0.0;
    return a_dot * coupling_bracket_first_closed(k, kp, cfg, p, motion.position(t, cfg));
}

CouplingMatrix coupling_matrix(const ModeSet& set, int order, const CavityConfig& cfg,
                               const MetricParams& p, double a, double a_dot,
                               const CouplingOptions& opt) {
    check_order(order);
    const std::size_t n = set.size();
    CouplingMatrix m;
    m.n = n;
    m.full.assign(n * n, 0.0);
    m.sym.assign(n * n, 0.0);
    m.anti.assign(n * n, 0.0);

    const double h = opt.a_step_rel * a;
    std::vector<PerMode> data;
    data.reserve(n);
    for (const ModeIndex& k : set) data.push_back(prepare_mode(k, order, cfg, p, a, h));

    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            m.full[i * n + j] = a_dot * bracket_pair(data[i], data[j], order, a, h, opt);

    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            m.sym[i * n + j] = 0.5 * (m.full[i * n + j] + m.full[j * n + i]);
            m.anti[i * n + j] = 0.5 * (m.full[i * n + j] - m.full[j * n + i]);
        }
    return m;
}

RestBrackets rest_brackets(const ModeSet& set, int order, const CavityConfig& cfg,
                           const MetricParams& p, const CouplingOptions& opt) {
    check_order(order);
    const std::size_t n = set.size();
    RestBrackets b;
    b.n = n;
    b.omega.resize(n);

    if (order == 1) {
        // Closed brackets, exact in chi; scaling by a0 absorbs a_dot / a0.
        std::vector<double> full(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            b.omega[i] = eigenfrequency_first(set[i], cfg, p, cfg.a0);
            for (std::size_t j = 0; j < n; ++j)
                full[i * n + j] =
                    cfg.a0 * coupling_bracket_first_closed(set[i], set[j], cfg, p, cfg.a0);
        }
        b.sym.resize(n * n);
        b.anti.resize(n * n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                b.sym[i * n + j] = 0.5 * (full[i * n + j] + full[j * n + i]);
                b.anti[i * n + j] = 0.5 * (full[i * n + j] - full[j * n + i]);
            }
        return b;
    }

    const CouplingMatrix m = coupling_matrix(set, order, cfg, p, cfg.a0, cfg.a0, opt);
    b.sym = m.sym;
    b.anti = m.anti;
    for (std::size_t i = 0; i < n; ++i)
        b.omega[i] = eigenfrequency_second(set[i], cfg, p, cfg.a0);
    return b;
}

double phase_theta(const ModeIndex& k, int order, const CavityConfig& cfg,
                   const MetricParams& p, const MirrorMotion& motion, double t0,
                   double t, const CouplingOptions& opt) {
    check_order(order);
    if (motion.epsilon() == 0.0)
        return eigenfrequency(k, order, cfg, p, cfg.a0) * (t - t0);
    auto om = [&](double tau) {
        return eigenfrequency(k, order, cfg, p, motion.position(tau, cfg));
    };
    quad::Options q;
    q.abs_tol = opt.quad_abs_tol * (1.0 + std::abs(t - t0));
    q.min_panels = quad::oscillation_panels(motion.varpi(), t0, t);
    return quad::integrate(om, t0, t, q).value;
}

KernelPair lambda_xi_closed_form(const ModeIndex& k, const ModeIndex& kp,
                                 const CavityConfig& cfg, const MetricParams& p,
                                 const MirrorMotion& motion, double t, double t0) {
    if (!motion.is_sine())
        throw std::invalid_argument("closed kernels exist for the sinusoidal drive only");
    KernelPair out;
    if (!same_sector(k, kp)) return out;

    const double varpi = motion.varpi();
    const double drive = varpi * std::cos(varpi * t);
    const double nk = k.magnitude(), nkp = kp.magnitude();
    const double wk = eigenfrequency_first(k, cfg, p, cfg.a0);
    const double wkp = eigenfrequency_first(kp, cfg, p, cfg.a0);
    const std::complex<double> i_unit(0.0, 1.0);

    if (k.nz == kp.nz) {
        const double diag = -0.5 * k.nz * k.nz / (nk * nk);
        out.lambda = drive * diag * std::exp(i_unit * (wk + wkp) * (t - t0));
        // the scattering kernel has no diagonal part
        return out;
    }
    const int m = k.nz, n = kp.nz;
    const double parity = ((m + n) % 2 == 0) ? 1.0 : -1.0;
    const double base =
        parity * double(m) * n / (double(n) * n - double(m) * m) / std::sqrt(nk * nkp);
    out.lambda = drive * base * (nk - nkp) * std::exp(i_unit * (wk + wkp) * (t - t0));
    out.xi = drive * base * (nk + nkp) * std::exp(i_unit * (wk - wkp) * (t - t0));
    return out;
}

KernelPair lambda_xi_numeric(const ModeIndex& k, const ModeIndex& kp, int order,
                             int lambda_order, const CavityConfig& cfg,
                             const MetricParams& p, const MirrorMotion& motion,
                             double t, double t0, const CouplingOptions& opt) {
    check_order(order);
    if (lambda_order != 1 && lambda_order != 2)
        throw std::invalid_argument("amplitude order must be 1 or 2");
    const std::complex<double> i_unit(0.0, 1.0);

    auto theta_at = [&](const ModeIndex& kk, double eps_hat) {
        auto om = [&](double tau) {
            const double a_tau = cfg.a0 * (1.0 + eps_hat * motion.profile(tau));
            return eigenfrequency(kk, order, cfg, p, a_tau);
        };
        quad::Options q;
        q.abs_tol = opt.quad_abs_tol * (1.0 + std::abs(t - t0));
        q.min_panels = quad::oscillation_panels(motion.varpi(), t0, t);
        return quad::integrate(om, t0, t, q).value;
    };

    auto kernels_at = [&](double eps_hat) -> KernelPair {
        const double a_t = cfg.a0 * (1.0 + eps_hat * motion.profile(t));
        const double a_dot = cfg.a0 * eps_hat * motion.profile_rate(t);
        const double b_rc = coupling_bracket(k, kp, order, cfg, p, a_t, opt);
        const double b_cr =
            (k == kp) ? b_rc : coupling_bracket(kp, k, order, cfg, p, a_t, opt);
        const double g_sym = 0.5 * a_dot * (b_rc + b_cr);
        const double g_anti = 0.5 * a_dot * (b_rc - b_cr);
        const double th_k = theta_at(k, eps_hat);
        const double th_kp = (k == kp) ? th_k : theta_at(kp, eps_hat);
        KernelPair f;
        f.lambda = g_sym * std::exp(i_unit * (th_k + th_kp));
        f.xi = g_anti * std::exp(i_unit * (th_k - th_kp));
        return f;
    };

    // Centered differences in the amplitude; the full kernels vanish at zero
    // amplitude, which the even-order formula uses.
    auto diff = [&](double step) -> KernelPair {
        const KernelPair plus = kernels_at(step), minus = kernels_at(-step);
        KernelPair d;
        if (lambda_order == 1) {
            d.lambda = (plus.lambda - minus.lambda) / (2.0 * step);
            d.xi = (plus.xi - minus.xi) / (2.0 * step);
        } else {
            d.lambda = (plus.lambda + minus.lambda) / (2.0 * step * step);
            d.xi = (plus.xi + minus.xi) / (2.0 * step * step);
        }
        return d;
    };

    const KernelPair coarse = diff(opt.eps_step);
    const KernelPair fine = diff(0.5 * opt.eps_step);
    KernelPair out;
    out.lambda = (4.0 * fine.lambda - coarse.lambda) / 3.0;
    out.xi = (4.0 * fine.xi - coarse.xi) / 3.0;

    const double scale = std::max({std::abs(out.lambda), std::abs(out.xi), 1e-30});
    const double err =
        std::max(std::abs(out.lambda - fine.lambda), std::abs(out.xi - fine.xi));
    if (err > opt.consistency_tol * scale + 1e-12)
        throw convergence_error("amplitude differencing failed to settle (disagreement " +
                                std::to_string(err) + ")");
    return out;
}

} // namespace dce
