#pragma once
// Small numerical kernels shared across the library: adaptive Gauss-Legendre
// panel quadrature, bracketed root finding, cubic interpolation of sampled
// data, and centered finite differences with Richardson extrapolation.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <cstdio>
#include <string>
#include <vector>

namespace dce {

// Thrown when an iterative scheme fails to reach its tolerance. The CLI maps
// this to exit code 3.
class convergence_error : public std::runtime_error {
public:
    explicit convergence_error(const std::string& what) : std::runtime_error(what) {}
};

namespace quad {

// Nodes and weights of the 16 point Gauss-Legendre rule on [-1, 1].
// One panel of this rule integrates smooth integrands with ~2 oscillations
// to near machine precision; the adaptive driver splits panels further.
struct GaussLegendre16 {
    static const double node[16];
    static const double weight[16];
};

struct Options {
    double abs_tol = 1e-10;   // absolute tolerance on the panel-sum error estimate
    int min_panels = 1;       // initial uniform subdivision (raised for oscillatory f)
    int max_depth = 24;       // recursion depth limit per panel
};

struct Result {
    double value = 0.0;
    double error = 0.0;       // Richardson-style estimate: |fine - coarse| accumulated
    long evaluations = 0;
};

namespace detail {

template <typename F>
double panel16(const F& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < 16; ++i) s += GaussLegendre16::weight[i] * f(c + h * GaussLegendre16::node[i]);
    return s * h;
}

// Bisect until the coarse/fine difference (the error estimate) is below the
// per-panel budget. Each level halves the budget like the classic adaptive
// schemes so the global bound is respected. Because the budget shrinks
// geometrically it can starve below the rounding noise of the panel sums on
// deep recursions; a difference at that noise floor is accepted as converged
// rather than refined further.
template <typename F>
double adapt(const F& f, double a, double b, double coarse, double budget, int depth,
             Result& out) {
    const double m = 0.5 * (a + b);
    const double left = panel16(f, a, m), right = panel16(f, m, b);
    out.evaluations += 32;
    const double fine = left + right;
    const double err = std::abs(fine - coarse);
    const double noise =
        0x1p-46 * (std::abs(left) + std::abs(right) + std::abs(coarse));
    if (err <= budget || err <= noise || depth <= 0) {
        if (depth <= 0 && err > budget && err > noise) {
            char what[96];
            std::snprintf(what, sizeof what,
                          "quadrature: panel refinement exhausted (residual %.3e)", err);
            throw convergence_error(what);
        }
        out.error += err;
        return fine;
    }
    return adapt(f, a, m, left, 0.5 * budget, depth - 1, out) +
           adapt(f, m, b, right, 0.5 * budget, depth - 1, out);
}

} // namespace detail

// Integrate f over [a, b]. The integrand is assumed smooth inside each panel;
// discontinuities should be made panel boundaries by the caller.
template <typename F>
Result integrate(const F& f, double a, double b, const Options& opt = {}) {
    Result out;
    if (a == b) return out;
    const int n0 = std::max(1, opt.min_panels);
    const double h = (b - a) / n0;
    for (int i = 0; i < n0; ++i) {
        const double x0 = a + i * h, x1 = (i + 1 == n0) ? b : a + (i + 1) * h;
        const double coarse = detail::panel16(f, x0, x1);
        out.evaluations += 16;
        out.value += detail::adapt(f, x0, x1, coarse, opt.abs_tol / n0, opt.max_depth, out);
    }
    return out;
}

// Panel count that resolves an oscillatory integrand of angular frequency
// omega_max over [a, b]: at least four 16-point panels per oscillation.
inline int oscillation_panels(double omega_max, double a, double b) {
    const double cycles = std::abs(omega_max) * std::abs(b - a) / (2.0 * 3.14159265358979323846);
    return std::max(1, static_cast<int>(cycles * 4.0) + 1);
}

// Complex-valued integrand convenience: integrates real and imaginary parts
// over the same adaptive panels (single pass on the complex sum).
template <typename F>
std::complex<double> integrate_complex(const F& f, double a, double b, const Options& opt = {}) {
    auto re = integrate([&](double x) { return f(x).real(); }, a, b, opt);
    auto im = integrate([&](double x) { return f(x).imag(); }, a, b, opt);
    return {re.value, im.value};
}

} // namespace quad

namespace roots {

struct Options {
    double x_tol = 1e-14;     // relative interval tolerance
    int max_iter = 200;
};

// Brent's method on a bracketing interval [a, b] with f(a) f(b) <= 0.
double brent(const std::function<double(double)>& f, double a, double b,
             const Options& opt = {});

// Grow the bracket around a seed until the function changes sign, then solve.
// `lo_limit` guards against stepping into an invalid region (f may throw there).
double bracket_and_solve(const std::function<double(double)>& f, double seed,
                         double grow = 1.05, double lo_limit = 0.0,
                         const Options& opt = {});

} // namespace roots

// Natural cubic spline through strictly increasing sample abscissae.
// Used for tabulated mirror trajectories and stored Bogoliubov histories.
class CubicSpline {
public:
    CubicSpline() = default;
    CubicSpline(std::vector<double> x, std::vector<double> y);
    double operator()(double x) const;
    double t_min() const { return x_.front(); }
    double t_max() const { return x_.back(); }
    bool empty() const { return x_.empty(); }

private:
    std::vector<double> x_, y_, m_;  // m_: second derivatives at the knots
};

namespace fd {

// Centered first derivative with one Richardson step: evaluates f at
// +/- h and +/- h/2, leaving an O(h^4) truncation error.
template <typename F>
auto derivative(const F& f, double x, double h) {
    auto coarse = (f(x + h) - f(x - h)) / (2.0 * h);
    auto fine = (f(x + 0.5 * h) - f(x - 0.5 * h)) / h;
    return (4.0 * fine - coarse) / 3.0;
}

// Five point centered stencils used by the mode equation residual.
template <typename F>
double second_derivative_5pt(const F& f, double x, double h) {
    return (-f(x + 2 * h) + 16 * f(x + h) - 30 * f(x) + 16 * f(x - h) - f(x - 2 * h)) /
           (12.0 * h * h);
}

template <typename F>
double first_derivative_5pt(const F& f, double x, double h) {
    return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12.0 * h);
}

} // namespace fd

} // namespace dce
