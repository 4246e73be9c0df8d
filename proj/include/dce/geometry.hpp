#pragma once
// Cavity geometry, mirror motion law, and the weak-field static metric.
// Everything here is immutable after construction; operations are pure.

#include <vector>

#include "dce/numerics.hpp"

namespace dce {

// Weak-field parameters of a static source at distance R below the cavity:
// chi = M/R sets the potential at the cavity origin, gamma = M/R^2 the local
// acceleration of gravity. Both zero means flat space-time.
struct MetricParams {
    double chi = 0.0;
    double gamma = 0.0;  // inverse length

    bool flat() const { return chi == 0.0 && gamma == 0.0; }
};

// Build MetricParams from a source mass and distance. Rejects M/R >= 0.1
// unless the caller explicitly overrides the weak-field guard.
MetricParams weak_field_expand(double M, double R, bool override_weak_field = false);

// Diagonal metric coefficients at height z above the cavity floor:
//   g00 = -(1 - 2 chi + 2 gamma z),  gxx = gyy = gzz = 1 + 2 chi - 2 gamma z.
struct MetricCoefficients {
    double g00;
    double gii;
    double sqrt_neg_g;
};

MetricCoefficients metric_coefficients(double z, const MetricParams& p);

// Measure of the field inner product: -sqrt(-g) g^{00}.
double density_weight(double z, const MetricParams& p);

// Spatial flux weight sqrt(-g) g^{zz} appearing in the mode equation.
double flux_weight(double z, const MetricParams& p);

// Cuboid cavity a0 x a0 x a(t); source_distance is R, used only for the
// a0 << R sanity guard.
struct CavityConfig {
    double a0 = 1.0;
    double source_distance = 0.0;  // 0 means "not specified", guard skipped
};

CavityConfig make_cavity(double a0, double source_distance = 0.0,
                         bool override_size_guard = false);

// Mirror motion a(t) = a0 (1 + epsilon f(t)). The profile f is either
// sin(varpi t) or a tabulated curve interpolated with a cubic spline.
class MirrorMotion {
public:
    // Static mirror: epsilon = 0.
    MirrorMotion() = default;

    static MirrorMotion sine(double epsilon, double varpi);
    static MirrorMotion tabulated(double epsilon, std::vector<double> t,
                                  std::vector<double> f);

    double epsilon() const { return epsilon_; }
    bool is_sine() const { return !tabulated_; }
    // Drive frequency; zero for tabulated laws.
    double varpi() const { return varpi_; }

    // Dimensionless profile f(t) and its time derivative.
    double profile(double t) const;
    double profile_rate(double t) const;

    // a(t) and da/dt for a given cavity.
    double position(double t, const CavityConfig& cfg) const;
    double velocity(double t, const CavityConfig& cfg) const;

private:
    double epsilon_ = 0.0;
    double varpi_ = 0.0;
    bool tabulated_ = false;
    CubicSpline samples_;
    double sample_step_ = 0.0;
};

// Proper (measurable) length and time corresponding to coordinate values,
// truncated at the requested order of the weak-field expansion.
//   order 1: a_p = a0 sqrt(1 + 2 chi), t_p = t sqrt(1 - 2 chi)
//   order 2: inverts a0 = a_p (1 + chi + gamma a_p / 2) and
//            t = (1 + chi - gamma a_p) t_p exactly.
struct LengthTime {
    double a;
    double t;
};

LengthTime to_proper_units(double a0, double t, const MetricParams& p, int order);

// Inverse map: proper (a_p, t_p) back to coordinate (a0, t).
LengthTime from_proper_units(double a_p, double t_p, const MetricParams& p, int order);

} // namespace dce
