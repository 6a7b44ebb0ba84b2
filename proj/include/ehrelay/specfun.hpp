#pragma once

#include <functional>
#include <stdexcept>

namespace ehrelay::specfun {

struct QuadratureResult {
    double value = 0.0;
    double abs_error_estimate = 0.0;
    int evaluations = 0;
};

/// Thrown when an integral does not reach the requested tolerance within the
/// evaluation budget. Carries the best estimate found so the caller can report it.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, QuadratureResult partial)
        : std::runtime_error(what), partial_(partial) {}
    const QuadratureResult& partial() const { return partial_; }

private:
    QuadratureResult partial_;
};

/// First-order modified Bessel function of the second kind, K1(x), x > 0.
/// Power series up to x = 2, Steed's continued fraction beyond. Returns 0
/// once the result underflows. Throws std::domain_error for x <= 0 or NaN.
double bessel_k1(double x);

/// e^x K1(x); finite for every x > 0.
double bessel_k1_scaled(double x);

/// Exponential integral E1(x) = int_x^inf e^-t / t dt, x > 0.
double exp_integral_e1(double x);

/// e^x E1(x), for expressions such as kappa e^kappa E1(kappa) at large kappa.
double exp_integral_e1_scaled(double x);

using Integrand = std::function<double(double)>;

/// Adaptive 15-point Gauss-Kronrod integration of f over (0, inf) after the
/// map x = t / (1 - t). Subdivides the interval with the largest error until
/// the total error estimate is within tol_rel * |value| (floor 1e-300).
/// tol_rel must lie in (1e-14, 1e-2).
QuadratureResult integrate_semi_infinite(const Integrand& f, double tol_rel,
                                         int max_evaluations = 200000);

/// Same scheme on a finite interval [lo, hi].
QuadratureResult integrate_interval(const Integrand& f, double lo, double hi, double tol_rel,
                                    int max_evaluations = 200000);

}  // namespace ehrelay::specfun
