#pragma once
// Perturbative solution of the mode-amplitude equations: the Bogoliubov
// coefficients are expanded in powers of the drive amplitude and the
// expansion matrices are accumulated on a time grid that resolves both the
// drive and the fastest pair frequency.

#include <complex>
#include <cstddef>
#include <vector>

#include "dce/coupling.hpp"
#include "dce/geometry.hpp"
#include "dce/modes.hpp"

namespace dce {

struct PerturbativeOptions {
    int lambda_max = 1;        // highest amplitude order kept (1 or 2)
    bool rwa = false;          // drop counter-rotating drive terms (order 1 only)
    int grid_per_period = 40;  // panels per shortest oscillation period
    double t0 = 0.0;           // start of the drive; amplitudes vanish here
    CouplingOptions coupling;
};

// Expansion matrices on the requested output times. Entry (i, j) of a matrix
// couples row mode set[i] to column mode set[j]; matrices are stored row
// major with stride n. The zeroth order is not stored: it is the identity
// for alpha and zero for beta at all times.
class PerturbativeRun {
public:
    ModeSet set;
    std::vector<double> omega;   // rest-position eigenfrequencies
    std::vector<double> times;   // output times, copied from the request
    std::size_t n = 0;
    int lambda_max = 1;
    double drive_epsilon = 0.0;  // amplitude of the motion used for the run

    // First and second order matrices, one flat n*n block per output time.
    // alpha2/beta2 stay empty when lambda_max == 1.
    std::vector<std::vector<std::complex<double>>> alpha1, beta1;
    std::vector<std::vector<std::complex<double>>> alpha2, beta2;

    // Reconstructed coefficients at output time index it for amplitude eps.
    std::complex<double> alpha(std::size_t it, std::size_t i, std::size_t j,
                               double eps) const;
    std::complex<double> beta(std::size_t it, std::size_t i, std::size_t j,
                              double eps) const;

    // Mean number of created quanta in mode set[i]: sum over the row of
    // |beta|^2. The two-argument form uses the amplitude of the driving
    // motion the run was built with.
    double mean_number(std::size_t it, std::size_t i, double eps) const;
    double mean_number(std::size_t it, std::size_t i) const;
};

// Fills the expansion matrices at every requested output time. Times must be
// strictly increasing and not precede opt.t0. The second amplitude order is
// available for metric order 1 only, and not together with the rotating-wave
// option. Requesting the rotating-wave option for a tabulated drive downgrades
// to the full integrand with a warning, since there is no single drive
// frequency to rotate against.
PerturbativeRun solve_perturbative(const ModeSet& set, const MirrorMotion& motion,
                                   const CavityConfig& cfg, const MetricParams& p,
                                   int metric_order,
                                   const std::vector<double>& t_out,
                                   const PerturbativeOptions& opt = {});

} // namespace dce
