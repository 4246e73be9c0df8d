#include "dce/modes.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <tuple>

namespace dce {

namespace {

constexpr double kPi = std::numbers::pi;

void check_index(const ModeIndex& k) {
    if (k.nx < 1 || k.ny < 1 || k.nz < 1)
        throw std::invalid_argument("mode indices must be positive integers");
}

double transverse_ksq(const ModeIndex& k, const CavityConfig& cfg) {
    const double kx = k.nx * kPi / cfg.a0;
    const double ky = k.ny * kPi / cfg.a0;
    return kx * kx + ky * ky;
}

// Accumulated phase integral(0..z) sqrt(Omega^2 - c z') dz' written in a
// cancellation-free form, valid down to c = 0:
//   (2z/3) (A + sqrt(A B) + B) / (sqrt(A) + sqrt(B)),  A = Omega^2, B = A - c z.
// Returns a large negative sentinel when the turning point enters [0, z],
// which steers the frequency root bracket away from that region.
double phase_integral(double Omega_sq, double c, double z) {
    const double A = Omega_sq;
    const double B = Omega_sq - c * z;
    if (A <= 0.0 || B <= 0.0) return -1e9;
    const double sA = std::sqrt(A), sB = std::sqrt(B);
    return (2.0 * z / 3.0) * (A + sA * sB + B) / (sA + sB);
}

double solve_quantization(const ModeIndex& k, const CavityConfig& cfg,
                          const MetricParams& p, double a, const ModeOptions& opt) {
    const double tksq = transverse_ksq(k, cfg);
    const double target = k.nz * kPi;
    auto excess = [&](double omega) {
        const double Osq = omega * omega * (1.0 + 4.0 * p.chi) - tksq;
        const double c = 4.0 * p.gamma * omega * omega;
        return phase_integral(Osq, c, a) - target;
    };
    // Below this frequency the turning point sits inside the cavity and the
    // phase integral is not defined; keep the bracket above it.
    const double denom = 1.0 + 4.0 * p.chi - 4.0 * p.gamma * a;
    const double lo_limit = denom > 0.0 ? std::sqrt(tksq / denom) : 0.0;
    roots::Options ropt;
    ropt.x_tol = opt.root_tol;
    const double seed = eigenfrequency_estimate(k, cfg, p, a);
    return roots::bracket_and_solve(excess, seed, 1.05, lo_limit, ropt);
}

} // namespace

double ModeIndex::magnitude() const { return std::sqrt(magnitude_sq()); }

bool ModeIndex::operator<(const ModeIndex& o) const {
    return std::tie(nx, ny, nz) < std::tie(o.nx, o.ny, o.nz);
}

ModeSet ModeSet::sector(int nx, int ny, int nz_max) {
    if (nx < 1 || ny < 1 || nz_max < 1)
        throw std::invalid_argument("mode set bounds must be positive");
    ModeSet s;
    s.modes_.reserve(static_cast<std::size_t>(nz_max));
    for (int nz = 1; nz <= nz_max; ++nz) s.modes_.push_back({nx, ny, nz});
    return s;
}

ModeSet ModeSet::box(int nx_max, int ny_max, int nz_max) {
    if (nx_max < 1 || ny_max < 1 || nz_max < 1)
        throw std::invalid_argument("mode set bounds must be positive");
    ModeSet s;
    s.modes_.reserve(static_cast<std::size_t>(nx_max) * ny_max * nz_max);
    for (int nx = 1; nx <= nx_max; ++nx)
        for (int ny = 1; ny <= ny_max; ++ny)
            for (int nz = 1; nz <= nz_max; ++nz) s.modes_.push_back({nx, ny, nz});
    return s;
}

int ModeSet::find(const ModeIndex& k) const {
    for (std::size_t i = 0; i < modes_.size(); ++i)
        if (modes_[i] == k) return static_cast<int>(i);
    return -1;
}

double eigenfrequency_first(const ModeIndex& k, const CavityConfig& cfg,
                            const MetricParams& p, double a) {
    check_index(k);
    if (!(a > 0.0)) throw std::invalid_argument("cavity length must be positive");
    const double kz = k.nz * kPi / a;
    return (1.0 - 2.0 * p.chi) * std::sqrt(transverse_ksq(k, cfg) + kz * kz);
}

double eigenfrequency_estimate(const ModeIndex& k, const CavityConfig& cfg,
                               const MetricParams& p, double a) {
    check_index(k);
    if (!(a > 0.0)) throw std::invalid_argument("cavity length must be positive");
    const double kz = k.nz * kPi / a;
    return (1.0 - 2.0 * p.chi + p.gamma * a) * std::sqrt(transverse_ksq(k, cfg) + kz * kz);
}

double eigenfrequency_second(const ModeIndex& k, const CavityConfig& cfg,
                             const MetricParams& p, double a, const ModeOptions& opt) {
    check_index(k);
    if (!(a > 0.0)) throw std::invalid_argument("cavity length must be positive");
    if (!(p.gamma > 0.0))
        throw std::invalid_argument(
            "gradient-carrying modes need gamma > 0; use order 1 for a uniform potential");
    return solve_quantization(k, cfg, p, a, opt);
}

double eigenfrequency(const ModeIndex& k, int order, const CavityConfig& cfg,
                      const MetricParams& p, double a, const ModeOptions& opt) {
    if (order == 1) return eigenfrequency_first(k, cfg, p, a);
    if (order == 2) return eigenfrequency_second(k, cfg, p, a, opt);
    throw std::invalid_argument("mode order must be 1 or 2");
}

ModeFunction::ModeFunction(const ModeIndex& k, int order, const CavityConfig& cfg,
                           const MetricParams& p, double a, const ModeOptions& opt)
    : k_(k), order_(order), cfg_(cfg), metric_(p), a_(a) {
    check_index(k);
    if (order != 1 && order != 2)
        throw std::invalid_argument("mode order must be 1 or 2");
    if (!(a > 0.0)) throw std::invalid_argument("cavity length must be positive");
    transverse_ksq_ = transverse_ksq(k, cfg);
    omega_seed_ = eigenfrequency_estimate(k, cfg, p, a);

    if (order_ == 1) {
        omega_ = eigenfrequency_first(k, cfg, p, a);
        norm_ = (1.0 - 2.0 * p.chi) * std::sqrt(2.0 / a);
        return;
    }

    if (!(p.gamma > 0.0))
        throw std::invalid_argument(
            "gradient-carrying modes need gamma > 0; use order 1 for a uniform potential");

    // Eigenfrequency from the phase quantization condition: the accumulated
    // phase across the cavity must equal nz pi.
    omega_ = solve_quantization(k, cfg, p, a_, opt);

    c_ = 4.0 * p.gamma * omega_ * omega_;
    Omega_sq_ = omega_ * omega_ * (1.0 + 4.0 * p.chi) - transverse_ksq_;
    const double v_mirror = (Omega_sq_ - c_ * a_) / std::pow(c_, 2.0 / 3.0);
    if (v_mirror < opt.v_min)
        throw std::domain_error("phase-integral mode outside its validity range: v(a) = " +
                                std::to_string(v_mirror) + " < " + std::to_string(opt.v_min));

    // Normalization against the curved measure: 1/N^2 = integral(0..a) of
    // v^{-1/2} sin^2(phase) W dz, resolved with panels matched to the phase.
    quad::Options qopt;
    qopt.abs_tol = opt.quad_abs_tol;
    qopt.min_panels = quad::oscillation_panels(2.0 * std::sqrt(Omega_sq_), 0.0, a_);
    const double c23 = std::pow(c_, 2.0 / 3.0);
    auto density = [&](double z) {
        const double v = (Omega_sq_ - c_ * z) / c23;
        const double s = std::sin(phase_integral(Omega_sq_, c_, z));
        return std::pow(v, -0.5) * s * s * density_weight(z, metric_);
    };
    const double inv_nsq = quad::integrate(density, 0.0, a_, qopt).value;
    norm_ = 1.0 / std::sqrt(inv_nsq);
}

MetricParams ModeFunction::measure_metric() const {
    if (order_ == 1) return MetricParams{metric_.chi, 0.0};
    return metric_;
}

double ModeFunction::transverse(double x, double y) const {
    return (2.0 / cfg_.a0) * std::sin(k_.nx * kPi * x / cfg_.a0) *
           std::sin(k_.ny * kPi * y / cfg_.a0);
}

double ModeFunction::longitudinal(double z) const {
    if (order_ == 1) return norm_ * std::sin(k_.nz * kPi * z / a_);
    const double v = airy_coordinate(z);
    return norm_ * std::pow(v, -0.25) * std::sin(phase(z));
}

double ModeFunction::longitudinal_a_derivative(double z) const {
    if (order_ != 1)
        throw std::logic_error("analytic mirror derivative exists only for order 1; "
                               "difference two constructed modes instead");
    const double kz = k_.nz * kPi / a_;
    return -longitudinal(z) / (2.0 * a_) - norm_ * std::cos(kz * z) * kz * z / a_;
}

double ModeFunction::airy_coordinate(double z) const {
    if (order_ != 2)
        throw std::logic_error("the transformed coordinate exists only for order 2 modes");
    return (Omega_sq_ - c_ * z) / std::pow(c_, 2.0 / 3.0);
}

double ModeFunction::phase(double z) const {
    if (order_ != 2)
        throw std::logic_error("the accumulated phase exists only for order 2 modes");
    return phase_integral(Omega_sq_, c_, z);
}

double inner_product(const ModeFunction& u, const ModeFunction& w, const quad::Options& opt) {
    if (u.order() != w.order() || u.cavity_length() != w.cavity_length() ||
        u.config().a0 != w.config().a0 || u.metric().chi != w.metric().chi ||
        u.metric().gamma != w.metric().gamma)
        throw std::invalid_argument(
            "inner product requires modes sharing cavity, metric, and order");

    const double a0 = u.config().a0;
    const double a = u.cavity_length();
    const MetricParams m = u.measure_metric();

    // The measure depends on z only, so the integral factorizes into three
    // one-dimensional quadratures.
    quad::Options qx = opt;
    qx.min_panels =
        quad::oscillation_panels((u.index().nx + w.index().nx) * kPi / a0, 0.0, a0);
    const double ix = quad::integrate(
                          [&](double x) {
                              return (2.0 / a0) * std::sin(u.index().nx * kPi * x / a0) *
                                     std::sin(w.index().nx * kPi * x / a0);
                          },
                          0.0, a0, qx)
                          .value;

    quad::Options qy = opt;
    qy.min_panels =
        quad::oscillation_panels((u.index().ny + w.index().ny) * kPi / a0, 0.0, a0);
    const double iy = quad::integrate(
                          [&](double y) {
                              return (2.0 / a0) * std::sin(u.index().ny * kPi * y / a0) *
                                     std::sin(w.index().ny * kPi * y / a0);
                          },
                          0.0, a0, qy)
                          .value;

    quad::Options qz = opt;
    qz.min_panels =
        quad::oscillation_panels((u.index().nz + w.index().nz + 2) * kPi / a, 0.0, a);
    const double iz = quad::integrate(
                          [&](double z) {
                              return density_weight(z, m) * u.longitudinal(z) *
                                     w.longitudinal(z);
                          },
                          0.0, a, qz)
                          .value;

    return ix * iy * iz;
}

double mode_ode_residual(const ModeFunction& u, int grid_points) {
    if (grid_points < 2) throw std::invalid_argument("residual grid needs at least 2 points");
    const double a = u.cavity_length();
    const double h = u.config().a0 / 2048.0;
    const MetricParams m = u.measure_metric();
    const double om_sq = u.omega() * u.omega();
    const double kx = u.index().nx * kPi / u.config().a0;
    const double ky = u.index().ny * kPi / u.config().a0;
    const double tksq = kx * kx + ky * ky;
    auto xi = [&](double z) { return u.longitudinal(z); };

    // Stay clear of the walls so the 5-point stencils never leave the cavity.
    const double lo = 4.0 * h, hi = a - 4.0 * h;
    double max_res = 0.0, max_dom = 0.0;
    for (int i = 0; i < grid_points; ++i) {
        const double z = lo + (hi - lo) * i / (grid_points - 1);
        const double f = xi(z);
        const double f1 = fd::first_derivative_5pt(xi, z, h);
        const double f2 = fd::second_derivative_5pt(xi, z, h);
        const double W = density_weight(z, m);
        const double F = flux_weight(z, m);
        const double Fp = m.gamma * (4.0 * m.chi - 4.0 * m.gamma * z) / F;
        const double dominant = W * om_sq * f;
        const double res = dominant - tksq * F * f + Fp * f1 + F * f2;
        max_res = std::max(max_res, std::abs(res));
        max_dom = std::max(max_dom, std::abs(dominant));
    }
    return max_res / max_dom;
}

double boundary_defect(const ModeFunction& u, int samples_per_edge) {
    if (samples_per_edge < 1) throw std::invalid_argument("need at least one sample per edge");
    const int n = samples_per_edge;
    const double a0 = u.config().a0;
    const double a = u.cavity_length();
    auto frac = [&](int i) { return (i + 1.0) / (n + 1.0); };

    double interior = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int l = 0; l < n; ++l)
                interior = std::max(
                    interior, std::abs(u(frac(i) * a0, frac(j) * a0, frac(l) * a)));

    double face = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double p = frac(i), q = frac(j);
            face = std::max(face, std::abs(u(0.0, p * a0, q * a)));
            face = std::max(face, std::abs(u(a0, p * a0, q * a)));
            face = std::max(face, std::abs(u(p * a0, 0.0, q * a)));
            face = std::max(face, std::abs(u(p * a0, a0, q * a)));
            face = std::max(face, std::abs(u(p * a0, q * a0, 0.0)));
            face = std::max(face, std::abs(u(p * a0, q * a0, a)));
        }
    }
    return face / interior;
}

} // namespace dce
