#include "dce/geometry.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace dce {

MetricParams weak_field_expand(double M, double R, bool override_weak_field) {
    if (M < 0.0 || R <= 0.0)
        throw std::invalid_argument("weak_field_expand: need M >= 0 and R > 0");
    const double ratio = M / R;
    if (ratio >= 0.1 && !override_weak_field)
        throw std::invalid_argument("weak_field_expand: M/R >= 0.1 violates the "
                                    "weak-field regime (pass the override to force)");
    MetricParams p;
    p.chi = ratio;
    p.gamma = M / (R * R);
    return p;
}

MetricCoefficients metric_coefficients(double z, const MetricParams& p) {
    const double lapse_sq = 1.0 - 2.0 * p.chi + 2.0 * p.gamma * z;
    const double space_sq = 1.0 + 2.0 * p.chi - 2.0 * p.gamma * z;
    if (lapse_sq <= 0.0 || space_sq <= 0.0)
        throw std::domain_error("metric_coefficients: metric degenerates at this z");
    MetricCoefficients c;
    c.g00 = -lapse_sq;
    c.gii = space_sq;
    c.sqrt_neg_g = std::sqrt(lapse_sq * space_sq * space_sq * space_sq);
    return c;
}

double density_weight(double z, const MetricParams& p) {
    const auto c = metric_coefficients(z, p);
    return c.sqrt_neg_g / (-c.g00);
}

double flux_weight(double z, const MetricParams& p) {
    const auto c = metric_coefficients(z, p);
    return std::sqrt(-c.g00 * c.gii);
}

CavityConfig make_cavity(double a0, double source_distance, bool override_size_guard) {
    if (a0 <= 0.0)
        throw std::invalid_argument("make_cavity: a0 must be positive");
    if (source_distance > 0.0 && a0 / source_distance >= 1e-3 && !override_size_guard)
        throw std::invalid_argument("make_cavity: a0/R >= 1e-3; the cavity must be "
                                    "small against the source distance (override to force)");
    CavityConfig cfg;
    cfg.a0 = a0;
    cfg.source_distance = source_distance;
    return cfg;
}

namespace {

void check_amplitude(double epsilon, double sup_profile) {
    const double peak = std::abs(epsilon) * sup_profile;
    if (peak >= 1.0)
        throw std::invalid_argument("MirrorMotion: |epsilon|*sup|f| must stay below 1");
    if (peak > 0.1)
        std::fprintf(stderr, "warning: mirror amplitude %.3g exceeds 0.1; the "
                             "perturbative expansion assumes a small amplitude\n", peak);
}

} // namespace

MirrorMotion MirrorMotion::sine(double epsilon, double varpi) {
    if (varpi <= 0.0)
        throw std::invalid_argument("MirrorMotion::sine: varpi must be positive");
    check_amplitude(epsilon, 1.0);
    MirrorMotion m;
    m.epsilon_ = epsilon;
    m.varpi_ = varpi;
    return m;
}

MirrorMotion MirrorMotion::tabulated(double epsilon, std::vector<double> t,
                                     std::vector<double> f) {
    double sup = 0.0;
    for (double v : f) sup = std::max(sup, std::abs(v));
    check_amplitude(epsilon, sup);
    MirrorMotion m;
    m.epsilon_ = epsilon;
    m.tabulated_ = true;
    double step = t.size() > 1 ? t.back() - t.front() : 0.0;
    for (size_t i = 1; i < t.size(); ++i) step = std::min(step, t[i] - t[i - 1]);
    m.sample_step_ = step;
    m.samples_ = CubicSpline(std::move(t), std::move(f));
    return m;
}

double MirrorMotion::profile(double t) const {
    if (!tabulated_) return epsilon_ == 0.0 ? 0.0 : std::sin(varpi_ * t);
    if (t < samples_.t_min() || t > samples_.t_max())
        throw std::out_of_range("MirrorMotion: t outside the tabulated range");
    return samples_(t);
}

double MirrorMotion::profile_rate(double t) const {
    if (!tabulated_) return epsilon_ == 0.0 ? 0.0 : varpi_ * std::cos(varpi_ * t);
    if (t < samples_.t_min() || t > samples_.t_max())
        throw std::out_of_range("MirrorMotion: t outside the tabulated range");
    // Centered difference on the interpolant, falling back to one-sided
    // second-order stencils at the edges of the table.
    const double h = sample_step_ / 8.0;
    if (t - h < samples_.t_min())
        return (-3.0 * samples_(t) + 4.0 * samples_(t + h) - samples_(t + 2 * h)) / (2 * h);
    if (t + h > samples_.t_max())
        return (3.0 * samples_(t) - 4.0 * samples_(t - h) + samples_(t - 2 * h)) / (2 * h);
    return (samples_(t + h) - samples_(t - h)) / (2 * h);
}

double MirrorMotion::position(double t, const CavityConfig& cfg) const {
    return cfg.a0 * (1.0 + epsilon_ * profile(t));
}

double MirrorMotion::velocity(double t, const CavityConfig& cfg) const {
    if (epsilon_ == 0.0) return 0.0;
    return cfg.a0 * epsilon_ * profile_rate(t);
}

LengthTime to_proper_units(double a0, double t, const MetricParams& p, int order) {
    if (order == 1)
        return {a0 * std::sqrt(1.0 + 2.0 * p.chi), t * std::sqrt(1.0 - 2.0 * p.chi)};
    if (order == 2) {
        // a0 = a_p (1 + chi + gamma a_p / 2) solved for a_p; the root is
        // written in the subtraction-free form so gamma -> 0 needs no branch.
        const double b = 1.0 + p.chi;
        const double a_p = 2.0 * a0 / (b + std::sqrt(b * b + 2.0 * p.gamma * a0));
        const double t_p = t / (b - p.gamma * a_p);
        return {a_p, t_p};
    }
    throw std::invalid_argument("to_proper_units: order must be 1 or 2");
}

LengthTime from_proper_units(double a_p, double t_p, const MetricParams& p, int order) {
    if (order == 1)
        return {a_p / std::sqrt(1.0 + 2.0 * p.chi), t_p / std::sqrt(1.0 - 2.0 * p.chi)};
    if (order == 2) {
        const double a0 = a_p * (1.0 + p.chi + 0.5 * p.gamma * a_p);
        const double t = (1.0 + p.chi - p.gamma * a_p) * t_p;
        return {a0, t};
    }
    throw std::invalid_argument("from_proper_units: order must be 1 or 2");
}

} // namespace dce
