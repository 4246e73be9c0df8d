#pragma once
// Exact evolution of the Bogoliubov coefficients over a truncated mode set,
// without any expansion in the drive amplitude. Serves as the independent
// check on the perturbative path: an embedded Runge-Kutta pair integrates
// the coupled amplitude equations with the full coupling rebuilt at every
// stage evaluation.

#include <complex>
#include <cstddef>
#include <vector>

#include "dce/coupling.hpp"
#include "dce/geometry.hpp"
#include "dce/modes.hpp"

namespace dce {

struct OracleOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    long max_steps = 2000000;
    double t0 = 0.0;
    int bracket_samples = 33;  // mirror positions tabulated for metric order 2
    CouplingOptions coupling;
};

// Trajectories at the requested output times. Matrices are row major with
// stride n; entry (i, j) couples row mode set[i] to column mode set[j].
class OracleRun {
public:
    ModeSet set;
    std::vector<double> times;
    std::size_t n = 0;

    std::vector<std::vector<std::complex<double>>> alpha, beta;

    // Deviation of the row identity sum_j(|alpha|^2 - |beta|^2) from one,
    // maximized over rows; recorded at every output time.
    std::vector<double> defect;

    long steps_taken = 0;
    long steps_rejected = 0;

    double mean_number(std::size_t it, std::size_t i) const;
    double unitarity_defect(std::size_t it) const { return defect[it]; }
};

// Integrates the amplitude equations from identity initial data at opt.t0
// through every output time. Times must increase strictly and not precede
// the start. Throws convergence_error when the step count is exhausted or
// the step size underflows.
OracleRun integrate_exact(const ModeSet& set, const MirrorMotion& motion,
                          const CavityConfig& cfg, const MetricParams& p,
                          int metric_order, const std::vector<double>& t_out,
                          const OracleOptions& opt = {});

} // namespace dce
