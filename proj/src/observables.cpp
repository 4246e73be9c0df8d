#include "dce/observables.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace dce {

namespace {

const double kPi = 3.14159265358979323846;

double magnitude(const ModeIndex& k) { return k.magnitude(); }

// Pair frequency of two modes of a cavity cubic at rest, first order metric.
double pair_frequency(const ModeIndex& k, const ModeIndex& kp,
                      const CavityConfig& cfg, const MetricParams& p) {
    return (1.0 - 2.0 * p.chi) * kPi / cfg.a0 * (magnitude(k) + magnitude(kp));
}

} // namespace

std::complex<double> phase_window(double x) {
    if (x == 0.0) return {1.0, 0.0};
    const double half = 0.5 * x;
    const double s = std::sin(half) / half;
    return {s * std::cos(half), s * std::sin(half)};
}

double f_factor(double omega_sum, double varpi, double t) {
    return std::abs(phase_window((omega_sum - varpi) * t) +
                    phase_window((omega_sum + varpi) * t));
}

double coupling_constant_first(const ModeIndex& k, const ModeIndex& kp) {
    if (!same_sector(k, kp)) return 0.0;
    const double nk = magnitude(k);
    const double nkp = magnitude(kp);
    if (k.nz == kp.nz) {
        const double r = double(k.nz) * k.nz / (nk * nk);
        return 0.25 * r * r;
    }
    const double m2 = double(k.nz) * k.nz;
    const double n2 = double(kp.nz) * kp.nz;
    const double diff = nk - nkp;
    return m2 * n2 / ((n2 - m2) * (n2 - m2)) * diff * diff / (nk * nkp);
}

double coupling_constant_second(const ModeIndex& k, const MetricParams& p, double a0) {
    const double r = double(k.nz) * k.nz / (k.magnitude_sq());
    const double base = r - p.gamma * a0;
    return 0.25 * base * base;
}

double tau_parameter(double epsilon, double t_p, double a0) {
    return epsilon * kPi * t_p / (2.0 * a0);
}

double n_first_order(const ModeIndex& k, int nz_max, const CavityConfig& cfg,
                     const MetricParams& p, const MirrorMotion& motion, double t) {
    if (!motion.is_sine())
        throw std::invalid_argument(
            "n_first_order: the closed form needs a sinusoidal drive");
    if (nz_max < 1)
        throw std::invalid_argument("n_first_order: nz_max must be at least 1");
    const double eps = motion.epsilon();
    const double vp = motion.varpi();
    double sum = 0.0;
    for (int nz = 1; nz <= nz_max; ++nz) {
        const ModeIndex kp{k.nx, k.ny, nz};
        const double c = coupling_constant_first(k, kp);
        if (c == 0.0) continue;
        const double f = f_factor(pair_frequency(k, kp, cfg, p), vp, t);
        sum += c * f * f;
    }
    return 0.25 * eps * eps * vp * vp * t * t * sum;
}

double n_resonant(const ModeIndex& k, const ModeIndex& kp, const CavityConfig& cfg,
                  const MetricParams& p, double epsilon, double t) {
    const double w = pair_frequency(k, kp, cfg, p);
    const double x = epsilon * w * t;
    return 0.25 * coupling_constant_first(k, kp) * x * x;
}

double n_resonant_proper(const ModeIndex& k, const ModeIndex& kp, double epsilon,
                         double a_p, double t_p) {
    const double x = epsilon * kPi * (magnitude(k) + magnitude(kp)) * t_p / (2.0 * a_p);
    return coupling_constant_first(k, kp) * x * x;
}

double n_final(const ModeIndex& k, const MetricParams& p, double a_p, double tau_p) {
    if (tau_p > 0.3)
        std::fprintf(stderr,
                     "n_final: tau_p = %g is beyond the quadratic-growth regime\n",
                     tau_p);
    const double r = double(k.nz) * k.nz / k.magnitude_sq();
    const double base = r * (1.0 - 4.0 * p.chi) - p.gamma * a_p * (1.0 + r);
    const double grow = k.magnitude() * tau_p;
    return base * base * grow * grow;
}

double n_fundamental(const MetricParams& p, double a_p, double tau_p) {
    const double base = 1.0 - 4.0 * p.chi - 2.0 * p.gamma * a_p;
    return base * base * tau_p * tau_p;
}

std::vector<ResonanceLine> resonance_scan(const ModeSet& set, const CavityConfig& cfg,
                                          const MetricParams& p, int order,
                                          double tol_rel) {
    const std::size_t n = set.size();
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i)
        w[i] = eigenfrequency(set[i], order, cfg, p, cfg.a0);

    std::vector<ResonanceLine> lines;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            if (!same_sector(set[i], set[j])) continue;
            ResonanceLine up;
            up.varpi = w[i] + w[j];
            up.k = set[i];
            up.kp = set[j];
            up.channel = (i == j) ? ResonanceChannel::degenerate_pair
                                  : ResonanceChannel::pair;
            lines.push_back(up);
            if (i != j) {
                ResonanceLine across;
                across.varpi = std::abs(w[j] - w[i]);
                across.k = set[i];
                across.kp = set[j];
                across.channel = ResonanceChannel::scatter;
                lines.push_back(across);
            }
        }

    std::sort(lines.begin(), lines.end(),
              [](const ResonanceLine& a, const ResonanceLine& b) {
                  if (a.varpi != b.varpi) return a.varpi < b.varpi;
                  if (a.k != b.k) return a.k < b.k;
                  return a.kp < b.kp;
              });
    int group = -1;
    double prev = -1.0;
    for (ResonanceLine& line : lines) {
        if (group < 0 || line.varpi - prev > tol_rel * std::max(line.varpi, prev))
            ++group;
        line.group = group;
        prev = line.varpi;
    }
    return lines;
}

} // namespace dce
