#pragma once

// Small numerical toolbox: adaptive quadrature, bracketed root finding,
// 1D suprema, monotone cubic interpolation and log-domain helpers.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

namespace fhn {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// sign(0) = 0.
inline double signum(double x) { return (x > 0.0) - (x < 0.0); }

inline bool is_finite(double x) { return std::isfinite(x); }

// log(e^a + e^b), tolerant of -inf.
inline double log_add(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(std::min(a, b) - m));
}

// log(1 - e^x) for x <= 0.
inline double log1mexp(double x) {
    if (x >= 0.0) {
        if (x == 0.0) return kNegInf;
        throw std::domain_error("log1mexp: argument must be <= 0");
    }
    // split at -ln 2 for accuracy
    return x > -0.6931471805599453 ? std::log(-std::expm1(x))
                                   : std::log1p(-std::exp(x));
}

namespace detail {

inline double simpson(const std::function<double(double)>& f, double a, double fa,
                      double b, double fb, double m, double fm) {
    (void)m;
    (void)f;
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a,
                                   double fa, double b, double fb, double m, double fm,
                                   double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(f, a, fa, m, fm, lm, flm);
    const double right = simpson(f, m, fm, b, fb, rm, frm);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

} // namespace detail

// Adaptive Simpson quadrature. Tolerance is abs_tol + rel_tol * |estimate|.
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double abs_tol = 1e-12, double rel_tol = 1e-10,
                        int max_depth = 48) {
    if (!(b >= a)) throw std::invalid_argument("integrate: b < a");
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fm = f(m);
    const double whole = detail::simpson(f, a, fa, b, fb, m, fm);
    const double tol = std::max(abs_tol, rel_tol * std::abs(whole));
    return detail::adaptive_simpson_rec(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

// Bisection on a sign change of f over [lo, hi].
inline double bisect(const std::function<double(double)>& f, double lo, double hi,
                     double tol = 1e-12, int max_iter = 200) {
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (flo * fhi > 0.0) throw std::invalid_argument("bisect: no sign change in bracket");
    for (int i = 0; i < max_iter && (hi - lo) > tol; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fmid = f(mid);
        if (fmid == 0.0) return mid;
        if (flo * fmid < 0.0) {
            hi = mid;
        } else {
            lo = mid;
            flo = fmid;
        }
    }
    return 0.5 * (lo + hi);
}

// Supremum of f over [lo, hi]: scan df for sign changes, refine each by
// bisection, compare the resulting critical values and the endpoints.
inline double sup_on_interval(const std::function<double(double)>& f,
                              const std::function<double(double)>& df, double lo,
                              double hi, int n_scan = 4096, double tol = 1e-12) {
    double best = std::max(f(lo), f(hi));
    const double h = (hi - lo) / n_scan;
    double prev_x = lo, prev_d = df(lo);
    for (int k = 1; k <= n_scan; ++k) {
        const double x = (k == n_scan) ? hi : lo + k * h;
        const double d = df(x);
        if (prev_d == 0.0) best = std::max(best, f(prev_x));
        if (prev_d * d < 0.0) {
            const double root = bisect(df, prev_x, x, tol);
            best = std::max(best, f(root));
        }
        prev_x = x;
        prev_d = d;
    }
    return best;
}

// Fritsch-Carlson monotone cubic (PCHIP). Preserves monotonicity of data.
class PchipInterpolant {
public:
    PchipInterpolant() = default;

    PchipInterpolant(std::vector<double> xs, std::vector<double> ys)
        : x_(std::move(xs)), y_(std::move(ys)) {
        const std::size_t n = x_.size();
        if (n < 2 || y_.size() != n)
            throw std::invalid_argument("PchipInterpolant: need >= 2 matched nodes");
        for (std::size_t i = 1; i < n; ++i)
            if (!(x_[i] > x_[i - 1]))
                throw std::invalid_argument("PchipInterpolant: nodes must be increasing");
        d_.resize(n);
        std::vector<double> slope(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i)
            slope[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
        d_[0] = end_slope(slope[0], n > 2 ? slope[1] : slope[0], x_[1] - x_[0],
                          n > 2 ? x_[2] - x_[1] : x_[1] - x_[0]);
        d_[n - 1] = end_slope(slope[n - 2], n > 2 ? slope[n - 3] : slope[n - 2],
                              x_[n - 1] - x_[n - 2],
                              n > 2 ? x_[n - 2] - x_[n - 3] : x_[n - 1] - x_[n - 2]);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (slope[i - 1] * slope[i] <= 0.0) {
                d_[i] = 0.0;
            } else {
                const double h0 = x_[i] - x_[i - 1], h1 = x_[i + 1] - x_[i];
                const double w0 = 2.0 * h1 + h0, w1 = h1 + 2.0 * h0;
                d_[i] = (w0 + w1) / (w0 / slope[i - 1] + w1 / slope[i]);
            }
        }
    }

    double operator()(double x) const {
        if (x <= x_.front()) return y_.front() + d_.front() * (x - x_.front());
        if (x >= x_.back()) return y_.back() + d_.back() * (x - x_.back());
        std::size_t i = std::upper_bound(x_.begin(), x_.end(), x) - x_.begin() - 1;
        const double h = x_[i + 1] - x_[i];
        const double t = (x - x_[i]) / h;
        const double t2 = t * t, t3 = t2 * t;
        const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
        const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
        return h00 * y_[i] + h * h10 * d_[i] + h01 * y_[i + 1] + h * h11 * d_[i + 1];
    }

    bool valid() const { return x_.size() >= 2; }
    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }

private:
    static double end_slope(double s0, double s1, double h0, double h1) {
        double d = ((2.0 * h0 + h1) * s0 - h0 * s1) / (h0 + h1);
        if (d * s0 <= 0.0) return 0.0;
        if (s0 * s1 < 0.0 && std::abs(d) > 3.0 * std::abs(s0)) return 3.0 * s0;
        return d;
    }

    std::vector<double> x_, y_, d_;
};

// log ∫_0^s e^{q u²} du. Exact adaptive quadrature while e^{q s²} is
// representable, asymptotic series e^{qs²}/(2qs)·Σ (2k-1)!!/(2qs²)^k beyond
// (the lower-limit contribution is below double precision there).
inline double log_growth_integral(double q, double s, double switch_exponent = 600.0) {
    if (!(q > 0.0) || !(s >= 0.0))
        throw std::invalid_argument("log_growth_integral: need q > 0, s >= 0");
    if (s == 0.0) return kNegInf;
    if (q * s * s <= switch_exponent) {
        const double val =
            integrate([q](double u) { return std::exp(q * u * u); }, 0.0, s, 1e-300, 1e-11);
        return std::log(val);
    }
    const double w = 2.0 * q * s * s;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k <= 12; ++k) {
        term *= (2.0 * k - 1.0) / w;
        sum += term;
        if (term < 1e-16 * sum) break;
    }
    return q * s * s - std::log(2.0 * q * s) + std::log(sum);
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double slope_stderr = 0.0;
    std::size_t n = 0;
};

// Ordinary least squares y = a + b x.
inline LinearFit least_squares(const std::vector<double>& xs, const std::vector<double>& ys) {
    const std::size_t n = xs.size();
    if (n < 2 || ys.size() != n)
        throw std::invalid_argument("least_squares: need >= 2 matched points");
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += xs[i];
        sy += ys[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = xs[i] - mx, dy = ys[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) throw std::invalid_argument("least_squares: degenerate x data");
    LinearFit fit;
    fit.n = n;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = ys[i] - (fit.intercept + fit.slope * xs[i]);
        ss_res += e * e;
    }
    fit.r_squared = (syy == 0.0) ? 1.0 : std::max(0.0, 1.0 - ss_res / syy);
    fit.slope_stderr = (n > 2) ? std::sqrt(ss_res / double(n - 2) / sxx) : 0.0;
    return fit;
}

// Two-sided 97.5% Student-t quantile for the CI of regression slopes.
inline double t_quantile_975(std::size_t dof) {
    static constexpr double table[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365,
                                       2.306,  2.262, 2.228, 2.201, 2.179, 2.160, 2.145,
                                       2.131,  2.120, 2.110, 2.101, 2.093, 2.086, 2.080,
                                       2.074,  2.069, 2.064, 2.060, 2.056, 2.052, 2.048,
                                       2.045,  2.042};
    if (dof == 0) return kInf;
    if (dof <= 30) return table[dof - 1];
    return 1.96;
}

} // namespace fhn
