#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "ehrelay/analytic.hpp"
#include "ehrelay/params.hpp"
#include "ehrelay/specfun.hpp"
#include "oracles.hpp"

using namespace ehrelay;
using namespace ehrelay::specfun;

namespace {

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> g;
    for (int i = 0; i < n; ++i) {
        g.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
    }
    return g;
}

}  // namespace

TEST_CASE("K1 against the standard library") {
    for (double x : log_grid(1e-6, 700.0, 40)) {
        CAPTURE(x);
        CHECK(oracle::rel_diff(bessel_k1(x), std::cyl_bessel_k(1.0, x)) < 1e-10);
    }
}

TEST_CASE("K1 against its integral representation") {
    for (double x : log_grid(1e-6, 700.0, 20)) {
        CAPTURE(x);
        CHECK(oracle::rel_diff(bessel_k1_scaled(x), oracle::k1_scaled_by_integral(x)) < 1e-9);
    }
}

TEST_CASE("K1 near the series/continued-fraction crossover") {
    for (double x : {1.9, 1.999999, 2.0, 2.000001, 2.1}) {
        CAPTURE(x);
        CHECK(oracle::rel_diff(bessel_k1(x), std::cyl_bessel_k(1.0, x)) < 1e-12);
    }
}

TEST_CASE("K1 limits") {
    CHECK(1e-9 * bessel_k1(1e-9) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(bessel_k1(800.0) == 0.0);
    // Large-argument form sqrt(pi / 2x) (1 + 3 / 8x) for the scaled function.
    const double x = 1e5;
    CHECK(bessel_k1_scaled(x) ==
          doctest::Approx(std::sqrt(std::numbers::pi / (2 * x)) * (1 + 3 / (8 * x))).epsilon(1e-9));
}

TEST_CASE("E1 against the standard library") {
    // libstdc++ loses accuracy in expint(-x) well before x = 100.
    for (double x : log_grid(1e-8, 50.0, 40)) {
        CAPTURE(x);
        CHECK(oracle::rel_diff(exp_integral_e1(x), -std::expint(-x)) < 1e-10);
    }
}

TEST_CASE("E1 against its integral representation") {
    for (double x : log_grid(1e-8, 700.0, 20)) {
        CAPTURE(x);
        CHECK(oracle::rel_diff(exp_integral_e1_scaled(x), oracle::e1_scaled_by_integral(x)) < 1e-9);
    }
    const double e1_one = oracle::integrate_to_inf([](double t) { return std::exp(-t) / t; }, 1.0);
    CHECK(oracle::rel_diff(exp_integral_e1(1.0), e1_one) < 1e-9);
}

TEST_CASE("E1 limits") {
    const double euler = 0.57721566490153286;
    for (double x : {1e-6, 1e-8, 1e-10}) {
        CHECK(std::abs(exp_integral_e1(x) + std::log(x) + euler) < 2.0 * x);
    }
    CHECK(1e6 * exp_integral_e1_scaled(1e6) == doctest::Approx(1.0 - 1e-6).epsilon(1e-11));
    CHECK(exp_integral_e1(800.0) == 0.0);
}

TEST_CASE("K1 and E1 are strictly decreasing") {
    double prev_k = std::numeric_limits<double>::infinity();
    double prev_e = std::numeric_limits<double>::infinity();
    for (double x : log_grid(1e-6, 600.0, 400)) {
        const double k = bessel_k1(x);
        const double e = exp_integral_e1(x);
        CHECK(k < prev_k);
        CHECK(e < prev_e);
        prev_k = k;
        prev_e = e;
    }
}

TEST_CASE("domain errors") {
    for (double bad : {0.0, -1.0, std::nan(""), std::numeric_limits<double>::infinity()}) {
        CHECK_THROWS_AS(bessel_k1(bad), std::domain_error);
        CHECK_THROWS_AS(bessel_k1_scaled(bad), std::domain_error);
        CHECK_THROWS_AS(exp_integral_e1(bad), std::domain_error);
        CHECK_THROWS_AS(exp_integral_e1_scaled(bad), std::domain_error);
    }
}

TEST_CASE("semi-infinite quadrature of a known integral") {
    const auto r = integrate_semi_infinite([](double x) { return std::exp(-x); }, 1e-10);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(r.abs_error_estimate >= 0.0);
    CHECK(r.abs_error_estimate <= 1e-10 * r.value);
    CHECK(r.evaluations > 0);
}

TEST_CASE("Bessel integral identity") {
    const std::pair<double, double> pairs[] = {{1.0, 1.0}, {4.0, 2.0}, {0.5, 3.0}};
    for (auto [beta, gamma] : pairs) {
        CAPTURE(beta);
        CAPTURE(gamma);
        const auto r = integrate_semi_infinite(
            [=](double x) { return std::exp(-beta / (4.0 * x) - gamma * x); }, 1e-11);
        const double closed = std::sqrt(beta / gamma) * bessel_k1(std::sqrt(beta * gamma));
        CHECK(oracle::rel_diff(r.value, closed) < 1e-8);
    }
}

TEST_CASE("the continuous-AF integral agrees across two quadrature schemes") {
    const TheoremInputs in = make_inputs(default_params());
    const double nu = af_continuous_nu(in);
    CHECK(nu > 0.0);
    CHECK(std::isfinite(nu));
    const auto& dc = in.dc;
    const auto& p = in.params;
    const double w = (dc.a * dc.d + dc.b * dc.c) / (dc.c * dc.c);
    const double two_eta_ps = 2.0 * p.conversion_efficiency * p.source_power;
    const double ref = oracle::integrate_to_inf([&](double x) {
        if (x <= 0.0) return 0.0;
        return std::exp(-(x + w / x)) /
               (dc.c * two_eta_ps * x + two_eta_ps * dc.d + dc.c * dc.d1m * p.relay_power);
    });
    CHECK(oracle::rel_diff(nu, ref) < 1e-8);
}

TEST_CASE("tightening the tolerance never makes the answer worse") {
    struct Case {
        std::function<double(double)> f;
        double exact;
    };
    const Case cases[] = {
        {[](double x) { return std::exp(-x * x); }, std::sqrt(std::numbers::pi) / 2.0},
        {[](double x) { return 1.0 / (1.0 + x * x); }, std::numbers::pi / 2.0},
        {[](double x) { return std::exp(-0.5 / x - 2.0 * x); }, bessel_k1(2.0)},
    };
    for (const auto& c : cases) {
        double prev = std::numeric_limits<double>::infinity();
        for (double tol : {1e-4, 5e-5, 2.5e-5, 1e-6, 5e-7, 1e-8, 5e-9}) {
            const double err = std::abs(integrate_semi_infinite(c.f, tol).value - c.exact);
            CHECK(err <= std::max(prev, 1e-15));
            prev = std::max(err, 1e-15);
        }
    }
}

TEST_CASE("non-convergence is reported, not hidden") {
    // Divergent integrand: the error estimate cannot settle.
    auto f = [](double x) { return 1.0 / (1.0 + x); };
    try {
        integrate_semi_infinite(f, 1e-10, 3000);
        FAIL("expected QuadratureError");
    } catch (const QuadratureError& e) {
        CHECK(e.partial().evaluations > 0);
        CHECK(e.partial().evaluations <= 3000);
    }
    CHECK_THROWS_AS(integrate_semi_infinite([](double) { return std::nan(""); }, 1e-8),
                    QuadratureError);
}

TEST_CASE("tolerance outside the supported range") {
    auto f = [](double x) { return std::exp(-x); };
    CHECK_THROWS_AS(integrate_semi_infinite(f, 1e-15), std::domain_error);
    CHECK_THROWS_AS(integrate_semi_infinite(f, 0.05), std::domain_error);
}

TEST_CASE("finite-interval quadrature") {
    const auto r = integrate_interval([](double x) { return std::sin(x); }, 0.0, std::numbers::pi,
                                      1e-12);
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(integrate_interval([](double x) { return x; }, 1.0, 1.0, 1e-8).value == 0.0);
    CHECK_THROWS_AS(integrate_interval([](double x) { return x; }, 2.0, 1.0, 1e-8),
                    std::domain_error);
}
