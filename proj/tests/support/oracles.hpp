#pragma once

// Statistical and numerical reference routines shared by the unit and
// acceptance tests. Nothing here calls into the library under test.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace oracle {

/// Two-sided one-sample Kolmogorov-Smirnov statistic.
inline double ks_statistic(std::vector<double> xs, const std::function<double(double)>& cdf) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = cdf(xs[i]);
        d = std::max({d, (i + 1) / n - f, f - i / n});
    }
    return d;
}

/// Asymptotic p-value with Stephens' small-sample correction.
inline double ks_pvalue(std::size_t n, double d) {
    const double sn = std::sqrt(static_cast<double>(n));
    const double lambda = (sn + 0.12 + 0.11 / sn) * d;
    if (lambda < 0.2) return 1.0;
    double sum = 0.0;
    for (int j = 1; j < 200; ++j) {
        const double term = std::exp(-2.0 * j * j * lambda * lambda);
        sum += (j % 2 == 1 ? 2.0 : -2.0) * term;
        if (term < 1e-18) break;
    }
    return std::clamp(sum, 0.0, 1.0);
}

/// Upper-tail p-value of a chi-square statistic.
inline double chi_square_pvalue(double stat, double dof) {
    boost::math::chi_squared dist(dof);
    return boost::math::cdf(boost::math::complement(dist, stat));
}

/// Integral over (lo, inf) by the exp-sinh rule.
inline double integrate_to_inf(const std::function<double(double)>& f, double lo = 0.0) {
    boost::math::quadrature::exp_sinh<double> q;
    return q.integrate([&](double x) { return f(x); }, lo, std::numeric_limits<double>::infinity());
}

/// Integral over a finite interval by the tanh-sinh rule.
inline double integrate_finite(const std::function<double(double)>& f, double lo, double hi) {
    boost::math::quadrature::tanh_sinh<double> q;
    return q.integrate([&](double x) { return f(x); }, lo, hi);
}

/// K1(x) from the integral representation int_0^inf e^{-x cosh t} cosh t dt,
/// returned scaled by e^x so large arguments stay representable.
inline double k1_scaled_by_integral(double x) {
    return integrate_to_inf([x](double t) {
        const double ch = std::cosh(t);
        const double expo = x * (ch - 1.0);
        if (!std::isfinite(ch) || expo > 745.0) return 0.0;
        return std::exp(-expo) * ch;
    });
}

/// e^x E1(x) = int_0^inf e^{-x s} / (1 + s) ds.
inline double e1_scaled_by_integral(double x) {
    return integrate_to_inf([x](double s) { return std::exp(-x * s) / (1.0 + s); });
}

inline double rel_diff(double a, double b) {
    return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

}  // namespace oracle
