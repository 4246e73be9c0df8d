#pragma once
// Instantaneous cavity modes and eigenfrequencies. Two flavors are provided:
// order 1 treats the potential as constant over the cavity (sine modes,
// valid when the field gradient is dropped) and order 2 keeps the linear
// potential term (phase-integral modes of the Airy equation, gradient > 0).

#include <cstddef>
#include <vector>

#include "dce/geometry.hpp"
#include "dce/numerics.hpp"

namespace dce {

// Triple of positive integers labeling a cavity mode. The magnitude |n| is
// always derived, never stored.
struct ModeIndex {
    int nx = 1;
    int ny = 1;
    int nz = 1;

    double magnitude_sq() const {
        return double(nx) * nx + double(ny) * ny + double(nz) * nz;
    }
    double magnitude() const;

    bool operator==(const ModeIndex& o) const {
        return nx == o.nx && ny == o.ny && nz == o.nz;
    }
    bool operator!=(const ModeIndex& o) const { return !(*this == o); }
    // Lexicographic, for deterministic orderings.
    bool operator<(const ModeIndex& o) const;
};

inline bool same_sector(const ModeIndex& a, const ModeIndex& b) {
    return a.nx == b.nx && a.ny == b.ny;
}

// Deterministically ordered, sector-closed list of modes: for every included
// index, all lower n_z companions with the same transverse pair are included.
class ModeSet {
public:
    ModeSet() = default;

    // Single transverse sector (nx, ny) with n_z = 1..nz_max.
    static ModeSet sector(int nx, int ny, int nz_max);
    // Full box 1..nx_max x 1..ny_max x 1..nz_max.
    static ModeSet box(int nx_max, int ny_max, int nz_max);

    std::size_t size() const { return modes_.size(); }
    const ModeIndex& operator[](std::size_t i) const { return modes_[i]; }
    // Position of k in the set, or -1 when absent.
    int find(const ModeIndex& k) const;
    auto begin() const { return modes_.begin(); }
    auto end() const { return modes_.end(); }

private:
    std::vector<ModeIndex> modes_;
};

struct ModeOptions {
    double v_min = 5.0;          // asymptotic-validity floor for the Airy argument
    double quad_abs_tol = 1e-10; // normalization quadrature tolerance
    double root_tol = 1e-14;     // quantization root tolerance (relative)
};

// Closed-form eigenfrequency with the gradient dropped:
// (1 - 2 chi) sqrt(kx^2 + ky^2 + kz^2), kz = nz pi / a.
double eigenfrequency_first(const ModeIndex& k, const CavityConfig& cfg,
                            const MetricParams& p, double a);

// Closed-form estimate keeping the gradient to first order:
// (1 - 2 chi + gamma a) sqrt(kx^2 + ky^2 + kz^2). Reduces to the first-order
// value at gamma = 0; for order-2 modes it seeds the quantization root.
double eigenfrequency_estimate(const ModeIndex& k, const CavityConfig& cfg,
                               const MetricParams& p, double a);

// Eigenfrequency of the gradient-carrying problem from the phase quantization
// condition (root only, no mode construction).
double eigenfrequency_second(const ModeIndex& k, const CavityConfig& cfg,
                             const MetricParams& p, double a,
                             const ModeOptions& opt = {});

// Dispatch on the expansion order.
double eigenfrequency(const ModeIndex& k, int order, const CavityConfig& cfg,
                      const MetricParams& p, double a, const ModeOptions& opt = {});

// One instantaneous mode, frozen at mirror position a. Cheap to copy; all
// derived quantities (frequency, normalization) are resolved at construction.
class ModeFunction {
public:
    ModeFunction(const ModeIndex& k, int order, const CavityConfig& cfg,
                 const MetricParams& p, double a, const ModeOptions& opt = {});

    const ModeIndex& index() const { return k_; }
    int order() const { return order_; }
    double cavity_length() const { return a_; }
    const CavityConfig& config() const { return cfg_; }
    const MetricParams& metric() const { return metric_; }
    // Metric actually entering the measure: order 1 drops the gradient.
    MetricParams measure_metric() const;

    // Eigenfrequency: closed form (order 1) or quantization root (order 2).
    double omega() const { return omega_; }
    // The closed-form estimate used as root seed; equals omega() at order 1.
    double omega_estimate() const { return omega_seed_; }
    double normalization() const { return norm_; }

    // Factorized evaluation: u(x,y,z) = transverse(x,y) * longitudinal(z).
    double transverse(double x, double y) const;
    double longitudinal(double z) const;
    double operator()(double x, double y, double z) const {
        return transverse(x, y) * longitudinal(z);
    }

    // Analytic da-derivative of the longitudinal factor (order 1 only;
    // order-2 callers difference two constructed modes instead).
    double longitudinal_a_derivative(double z) const;

    // Airy-equation diagnostics (order 2 only): the transformed coordinate
    // v(z), affine decreasing, and the accumulated phase from z = 0.
    double airy_coordinate(double z) const;
    double phase(double z) const;

private:
    ModeIndex k_;
    int order_;
    CavityConfig cfg_;
    MetricParams metric_;
    double a_;
    double transverse_ksq_;  // (nx pi / a0)^2 + (ny pi / a0)^2
    double omega_ = 0.0;
    double omega_seed_ = 0.0;
    double norm_ = 0.0;
    // order-2 cache: curvature scale c = 4 gamma omega^2 and the shifted
    // frequency Omega^2 = omega^2 (1 + 4 chi) - transverse_ksq.
    double c_ = 0.0;
    double Omega_sq_ = 0.0;
};

// Curved-measure inner product over the instantaneous volume, evaluated as
// a product of adaptive one-dimensional quadratures (the measure depends on
// z only). Both modes must share cavity, metric, order, and mirror position.
double inner_product(const ModeFunction& u, const ModeFunction& w,
                     const quad::Options& opt = {1e-10, 1, 24});

// Max-norm residual of the mode equation on an interior grid, relative to
// the dominant term; spatial derivatives by 5-point central differences.
double mode_ode_residual(const ModeFunction& u, int grid_points = 33);

// Largest |u| sampled on the six cavity faces, relative to max |u| inside.
double boundary_defect(const ModeFunction& u, int samples_per_edge = 7);

} // namespace dce
