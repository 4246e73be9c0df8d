#pragma once
// Mode-mode coupling induced by the moving mirror: pointwise coefficients,
// the symmetric/antisymmetric split over a mode set, accumulated mode phases,
// and the first and second amplitude-order interaction kernels extracted by
// differencing in the drive amplitude.

#include <complex>
#include <cstddef>
#include <vector>

#include "dce/geometry.hpp"
#include "dce/modes.hpp"
#include "dce/numerics.hpp"

namespace dce {

struct CouplingOptions {
    double quad_abs_tol = 1e-12;  // overlap quadrature tolerance
    double a_step_rel = 1e-5;     // relative mirror step for d/da differencing
    double eps_step = 9.765625e-4;  // base amplitude step (2^-10) for kernels
    double consistency_tol = 1e-3;  // Richardson disagreement tripping an error
};

// Velocity-normalized coupling of mode k to the mirror-induced change of mode
// kp at mirror position a, so that G_{k kp}(t) = (da/dt) * bracket(k, kp; a):
//   bracket = delta_{k kp} (domega/da) / (2 omega)
//           + sqrt(omega_k / omega_kp) integral of (-W) (du_kp/da) u_k.
// Modes with different transverse indices do not couple.
double coupling_bracket(const ModeIndex& k, const ModeIndex& kp, int order,
                        const CavityConfig& cfg, const MetricParams& p, double a,
                        const CouplingOptions& opt = {});

// Closed form of the same bracket for order-1 modes, exact in chi.
double coupling_bracket_first_closed(const ModeIndex& k, const ModeIndex& kp,
                                     const CavityConfig& cfg, const MetricParams& p,
                                     double a);

// Full coupling coefficient at time t under the given motion.
double coupling_G(const ModeIndex& k, const ModeIndex& kp, int order,
                  const CavityConfig& cfg, const MetricParams& p,
                  const MirrorMotion& motion, double t,
                  const CouplingOptions& opt = {});
double coupling_G_first_closed(const ModeIndex& k, const ModeIndex& kp,
                               const CavityConfig& cfg, const MetricParams& p,
                               const MirrorMotion& motion, double t);

// All pairwise couplings over a mode set at mirror state (a, da/dt), split
// into the symmetric part (drives pair creation) and the antisymmetric part
// (drives scattering); full = sym + anti entrywise.
struct CouplingMatrix {
    std::size_t n = 0;
    std::vector<double> full, sym, anti;  // row-major n x n

    double full_at(std::size_t i, std::size_t j) const { return full[i * n + j]; }
    double sym_at(std::size_t i, std::size_t j) const { return sym[i * n + j]; }
    double anti_at(std::size_t i, std::size_t j) const { return anti[i * n + j]; }
};

CouplingMatrix coupling_matrix(const ModeSet& set, int order, const CavityConfig& cfg,
                               const MetricParams& p, double a, double a_dot,
                               const CouplingOptions& opt = {});

// Split brackets frozen at the rest position a0 and scaled so that for a
// drive a(t) = a0 (1 + eps f(t)), to first order in eps,
//   G_sym(t) = eps f'(t) sym[k,kp],   G_anti(t) = eps f'(t) anti[k,kp],
// with omega holding the rest-position eigenfrequencies.
struct RestBrackets {
    std::size_t n = 0;
    std::vector<double> sym, anti;  // row-major n x n
    std::vector<double> omega;

    double sym_at(std::size_t i, std::size_t j) const { return sym[i * n + j]; }
    double anti_at(std::size_t i, std::size_t j) const { return anti[i * n + j]; }
};

RestBrackets rest_brackets(const ModeSet& set, int order, const CavityConfig& cfg,
                           const MetricParams& p, const CouplingOptions& opt = {});

// Accumulated phase Theta_k(t) = integral(t0..t) of omega_k(a(tau)) dtau.
// Exact for a static mirror; adaptive quadrature otherwise.
double phase_theta(const ModeIndex& k, int order, const CavityConfig& cfg,
                   const MetricParams& p, const MirrorMotion& motion, double t0,
                   double t, const CouplingOptions& opt = {});

// Interaction kernels of the slow-amplitude equations: lambda drives pair
// creation (couples to conjugated amplitudes), xi drives scattering.
struct KernelPair {
    std::complex<double> lambda{0.0, 0.0};
    std::complex<double> xi{0.0, 0.0};
};

// First amplitude-order closed form for a sinusoidal drive and order-1
// modes, to first order in chi. Phases are referenced to t0. Throws for a
// tabulated drive.
KernelPair lambda_xi_closed_form(const ModeIndex& k, const ModeIndex& kp,
                                 const CavityConfig& cfg, const MetricParams& p,
                                 const MirrorMotion& motion, double t,
                                 double t0 = 0.0);

// Kernels at order lambda_order (1 or 2) in the drive amplitude, extracted
// from the full quadrature coupling by centered amplitude differences with
// one Richardson step. The motion supplies only the profile shape; its own
// amplitude is ignored. Throws convergence_error when the two difference
// steps disagree beyond consistency_tol.
KernelPair lambda_xi_numeric(const ModeIndex& k, const ModeIndex& kp, int order,
                             int lambda_order, const CavityConfig& cfg,
                             const MetricParams& p, const MirrorMotion& motion,
                             double t, double t0 = 0.0,
                             const CouplingOptions& opt = {});

} // namespace dce
