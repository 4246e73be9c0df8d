#pragma once
// Closed-form mean particle numbers and the bookkeeping around them: the
// spectral window of a sinusoidal drive, the squared pair couplings, the
// dimensionless drive parameter, and a scan of the resonant drive
// frequencies of a truncated mode set.

#include <complex>
#include <vector>

#include "dce/geometry.hpp"
#include "dce/modes.hpp"

namespace dce {

// (e^{ix} - 1)/(ix), written so it stays finite and fully accurate for all
// real x, including x = 0 where it equals one.
std::complex<double> phase_window(double x);

// Magnitude of the window a sinusoidal drive at frequency varpi leaves on a
// pair line at frequency omega_sum after time t:
//   |phase_window((omega_sum - varpi) t) + phase_window((omega_sum + varpi) t)|.
// Tends to one on resonance, drops off the resonance, and reaches two in the
// static limit varpi -> 0, t -> 0.
double f_factor(double omega_sum, double varpi, double t);

// Squared symmetric bracket of a coupled mode pair for a cavity cubic at
// rest, flat-space form. Transverse-mismatched pairs give zero.
double coupling_constant_first(const ModeIndex& k, const ModeIndex& kp);

// Weak-field squared self-coupling of mode k including the field-gradient
// shift of the mirror.
double coupling_constant_second(const ModeIndex& k, const MetricParams& p, double a0);

// Dimensionless drive parameter built from the amplitude, the proper
// duration, and the rest size of the cavity.
double tau_parameter(double epsilon, double t_p, double a0);

// Mean number created in mode k by a sinusoidal drive after coordinate time
// t, first order in the amplitude, summed over partner modes of the same
// transverse sector up to nz_max.
double n_first_order(const ModeIndex& k, int nz_max, const CavityConfig& cfg,
                     const MetricParams& p, const MirrorMotion& motion, double t);

// Mean number for a resonantly driven pair, varpi = omega_k + omega_kp, when
// the window has saturated at one.
double n_resonant(const ModeIndex& k, const ModeIndex& kp, const CavityConfig& cfg,
                  const MetricParams& p, double epsilon, double t);

// The same quantity expressed entirely through the proper cavity size and
// the proper duration of the drive.
double n_resonant_proper(const ModeIndex& k, const ModeIndex& kp, double epsilon,
                         double a_p, double t_p);

// Weak-field mean number of the resonantly driven mode k at drive parameter
// tau_p, and its fundamental-mode form. Warns when tau_p leaves the regime
// of quadratic growth.
double n_final(const ModeIndex& k, const MetricParams& p, double a_p, double tau_p);
double n_fundamental(const MetricParams& p, double a_p, double tau_p);

enum class ResonanceChannel { degenerate_pair, pair, scatter };

struct ResonanceLine {
    double varpi = 0.0;
    ModeIndex k, kp;
    ResonanceChannel channel = ResonanceChannel::pair;
    int group = 0;  // lines sharing one drive frequency share a group id
};

// Every pair-creation and scattering resonance among the coupled pairs of
// the set, sorted by drive frequency. Lines whose frequencies coincide
// within tol_rel share a group id, flagging drives that excite several
// processes at once.
std::vector<ResonanceLine> resonance_scan(const ModeSet& set, const CavityConfig& cfg,
                                          const MetricParams& p, int order,
                                          double tol_rel = 1e-9);

} // namespace dce
