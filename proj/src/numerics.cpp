#include "dce/numerics.hpp"

#include <algorithm>
#include <cmath>

namespace dce {

namespace quad {

// Abscissae and weights of the 16 point rule, symmetric about 0.
const double GaussLegendre16::node[16] = {
    -0.9894009349916499325962, -0.9445750230732325760780,
    -0.8656312023878317438805, -0.7554044083550030338951,
    -0.6178762444026437484467, -0.4580167776572273863424,
    -0.2816035507792589132304, -0.0950125098376374401853,
     0.0950125098376374401853,  0.2816035507792589132304,
     0.4580167776572273863424,  0.6178762444026437484467,
     0.7554044083550030338951,  0.8656312023878317438805,
     0.9445750230732325760780,  0.9894009349916499325962};

const double GaussLegendre16::weight[16] = {
    0.0271524594117540948518, 0.0622535239386478928628,
    0.0951585116824927848099, 0.1246289712555338720525,
    0.1495959888165767320815, 0.1691565193950025381893,
    0.1826034150449235888667, 0.1894506104550684962854,
    0.1894506104550684962854, 0.1826034150449235888667,
    0.1691565193950025381893, 0.1495959888165767320815,
    0.1246289712555338720525, 0.0951585116824927848099,
    0.0622535239386478928628, 0.0271524594117540948518};

} // namespace quad

namespace roots {

double brent(const std::function<double(double)>& f, double a, double b, const Options& opt) {
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (fa * fb > 0.0)
        throw convergence_error("brent: interval does not bracket a root");

    double c = a, fc = fa, d = b - a, e = b - a;
    for (int iter = 0; iter < opt.max_iter; ++iter) {
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol = 2.0 * opt.x_tol * std::max(1.0, std::abs(b));
        const double m = 0.5 * (c - b);
        if (std::abs(m) <= tol || fb == 0.0) return b;

        if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
            // Inverse quadratic interpolation, secant fallback.
            double p, q;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                const double r = fb / fc, t = fa / fc;
                p = s * (2.0 * m * t * (t - r) - (b - a) * (r - 1.0));
                q = (t - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q; else p = -p;
            if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += (std::abs(d) > tol) ? d : (m > 0.0 ? tol : -tol);
        fb = f(b);
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = e = b - a;
        }
    }
    throw convergence_error("brent: iteration limit reached");
}

double bracket_and_solve(const std::function<double(double)>& f, double seed, double grow,
                         double lo_limit, const Options& opt) {
    if (seed <= lo_limit)
        throw convergence_error("bracket_and_solve: seed below lower limit");
    double lo = seed, hi = seed;
    double flo = f(lo), fhi = flo;
    for (int i = 0; i < 200 && flo * fhi > 0.0; ++i) {
        lo = std::max(lo_limit + (seed - lo_limit) * 1e-12, lo / grow);
        hi *= grow;
        flo = f(lo);
        fhi = f(hi);
    }
    if (flo * fhi > 0.0)
        throw convergence_error("bracket_and_solve: no sign change around seed");
    return brent(f, lo, hi, opt);
}

} // namespace roots

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    const size_t n = x_.size();
    if (n < 2 || y_.size() != n)
        throw std::invalid_argument("CubicSpline: need >= 2 matching samples");
    for (size_t i = 1; i < n; ++i)
        if (!(x_[i] > x_[i - 1]))
            throw std::invalid_argument("CubicSpline: abscissae must increase");

    // Natural boundary conditions; Thomas solve of the tridiagonal system
    // for the knot second derivatives.
    m_.assign(n, 0.0);
    if (n == 2) return;
    std::vector<double> diag(n, 0.0), rhs(n, 0.0), upper(n, 0.0);
    diag[0] = diag[n - 1] = 1.0;
    for (size_t i = 1; i + 1 < n; ++i) {
        const double hl = x_[i] - x_[i - 1], hr = x_[i + 1] - x_[i];
        diag[i] = 2.0 * (hl + hr);
        upper[i] = hr;
        rhs[i] = 6.0 * ((y_[i + 1] - y_[i]) / hr - (y_[i] - y_[i - 1]) / hl);
    }
    // Forward sweep (the natural rows are trivial so they just pass through).
    for (size_t i = 2; i + 1 < n; ++i) {
        const double hl = x_[i] - x_[i - 1];
        const double w = hl / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    for (size_t i = n - 2; i >= 1; --i) {
        m_[i] = (rhs[i] - upper[i] * m_[i + 1]) / diag[i];
        if (i == 1) break;
    }
}

double CubicSpline::operator()(double x) const {
    if (x_.empty()) throw std::logic_error("CubicSpline: empty");
    // Clamp to the sampled range; callers keep evaluation inside it.
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    size_t i = (it == x_.begin()) ? 1 : static_cast<size_t>(it - x_.begin());
    if (i >= x_.size()) i = x_.size() - 1;
    const double h = x_[i] - x_[i - 1];
    const double A = (x_[i] - x) / h, B = 1.0 - A;
    return A * y_[i - 1] + B * y_[i] +
           ((A * A * A - A) * m_[i - 1] + (B * B * B - B) * m_[i]) * h * h / 6.0;
}

} // namespace dce
