#include "ehrelay/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ehrelay/specfun.hpp"

namespace ehrelay {

namespace {

double clamp_tau(double tau) { return std::clamp(tau, 0.0, 0.5); }

// Ratio Pr d1^m / (2 eta Ps): how many unit-gain full EH blocks one IT block costs.
double kappa_of(const SystemParams& p, const DerivedConstants& dc) {
    return dc.d1m * p.relay_power / (2.0 * p.conversion_efficiency * p.source_power);
}

// exp(-(a + d)/c) u K1(u), formed in log space so neither factor over/underflows.
double af_common_factor(const DerivedConstants& dc) {
    const double u = dc.u;
    const double log_pref = -(dc.a + dc.d) / dc.c;
    return u * specfun::bessel_k1_scaled(u) * std::exp(log_pref - u);
}

// 1 - e^{-x}(1 + x) without cancellation for small x.
double one_minus_exp_times_1px(double x) {
    if (x > 1e-2) return 1.0 - std::exp(-x) * (1.0 + x);
    double term = x;  // builds x^k / k! with alternating sign
    double sum = 0.0;
    for (int k = 2; k < 30; ++k) {
        term *= -x / k;
        const double add = -term * (k - 1);
        sum += add;
        if (std::abs(add) < 1e-17 * std::abs(sum)) break;
    }
    return sum;
}

// int_0^L s^{n-1} (L - s) e^{-s} ds / (n-1)!.
double ramp_gamma(int n, double L) {
    if (L <= 0.0) return 0.0;
    if (L > 2.0 * n + 10.0) {
        // Complement form: (L - n) minus the upper-tail pieces.
        double term = 1.0;  // L^j / j!
        double partial_n = 0.0;
        for (int j = 0; j < n; ++j) {
            partial_n += term;
            term *= L / (j + 1);
        }
        const double partial_n1 = partial_n + term;
        return (L - n) - std::exp(-L) * (L * partial_n - n * partial_n1);
    }
    // L^{n+1} e^{-L} / (n+1)! * 1F1(2; n+2; L), a series of positive terms.
    double term = 1.0;
    double sum = 1.0;
    for (int k = 0; k < 10000; ++k) {
        term *= (2.0 + k) / (n + 2.0 + k) * L / (k + 1.0);
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    const double log_lead = (n + 1) * std::log(L) - L - std::lgamma(n + 2.0);
    return std::exp(log_lead) * sum;
}

}  // namespace

void TheoremInputs::validate() const {
    params.validate();
    if (truncation_n < 1) throw ParamError("invariant violated: truncation_n >= 1");
    if (!(quad_tol > 1e-14 && quad_tol < 1e-2)) {
        throw ParamError("invariant violated: 1e-14 < quad_tol < 1e-2");
    }
}

TheoremInputs make_inputs(const SystemParams& p, int truncation_n, double quad_tol) {
    TheoremInputs in;
    in.params = p;
    in.dc = derive_constants(p);
    in.truncation_n = truncation_n;
    in.quad_tol = quad_tol;
    in.validate();
    return in;
}

double af_continuous_nu(const TheoremInputs& in) {
    const auto& p = in.params;
    const auto& dc = in.dc;
    const double kappa = kappa_of(p, dc);
    const double w = 0.25 * dc.u * dc.u;
    const double shift = dc.d / dc.c;
    // Integrand multiplied through by c d1^m Pr, which turns the denominator
    // into 1 + (x + d/c) / kappa.
    auto f = [=](double x) {
        if (!(x > 0.0)) return 0.0;
        return std::exp(-x - w / x) / (1.0 + (x + shift) / kappa);
    };
    const auto r = specfun::integrate_semi_infinite(f, in.quad_tol);
    return r.value / (dc.c * dc.d1m * p.relay_power);
}

double throughput_af_continuous(const TheoremInputs& in) {
    in.validate();
    const auto& dc = in.dc;
    const double kappa = kappa_of(in.params, dc);
    const double w = 0.25 * dc.u * dc.u;
    const double shift = dc.d / dc.c;
    // u K1(u) minus the nu term, merged under one integral: the two parts
    // nearly cancel once kappa is large. e^{-u} is factored out of the
    // integrand so its peak value is one.
    auto f = [=](double x) {
        if (!(x > 0.0)) return 0.0;
        const double y = x + shift;
        return std::exp(dc.u - x - w / x) * (y / (y + kappa));
    };
    const double integral = specfun::integrate_semi_infinite(f, in.quad_tol).value;
    const double log_pref = -(dc.a + dc.d) / dc.c - dc.u;
    return clamp_tau(0.5 * std::exp(log_pref) * integral);
}

double throughput_af_discrete(const TheoremInputs& in) {
    in.validate();
    const double kappa = kappa_of(in.params, in.dc);
    return clamp_tau(af_common_factor(in.dc) / (2.0 * (1.0 + kappa)));
}

std::vector<double> df_continuous_terms(const TheoremInputs& in) {
    in.validate();
    const double abar = in.dc.a_bar;
    const double kappa = kappa_of(in.params, in.dc);
    const double e_abar = std::exp(-abar);
    const double p_out = -std::expm1(-abar);
    // int_{a_bar}^inf e^{-h} / (h + kappa) dh = e^{-a_bar} * scaled_e1
    const double scaled_e1 = specfun::exp_integral_e1_scaled(kappa + abar);
    const double m1 = one_minus_exp_times_1px(abar);

    std::vector<double> terms;
    terms.reserve(in.truncation_n + 1);
    terms.push_back(e_abar - kappa * e_abar * scaled_e1);

    double p_pow = 1.0;  // p_out^{n-1}
    for (int n = 1; n <= in.truncation_n; ++n) {
        double deficit;  // int over the outage box of e^{-S} (kappa - S)^+
        if (kappa >= n * abar) {
            deficit = kappa * p_pow * p_out - n * p_pow * m1;
        } else {
            deficit = 0.0;
            double binom = 1.0;
            for (int k = 0; k <= n && k * abar < kappa; ++k) {
                const double sign = (k % 2 == 0) ? 1.0 : -1.0;
                deficit += sign * binom * std::exp(-k * abar) * ramp_gamma(n, kappa - k * abar);
                binom = binom * (n - k) / (k + 1);
            }
        }
        p_pow *= p_out;  // now p_out^n
        const double term = e_abar * p_pow - e_abar * scaled_e1 * deficit;
        if (!std::isfinite(term)) {
            throw SeriesTermError("continuous-DF series term " + std::to_string(n) +
                                      " is not finite",
                                  n);
        }
        terms.push_back(term);
    }
    if (!std::isfinite(terms.front())) {
        throw SeriesTermError("continuous-DF series term 0 is not finite", 0);
    }
    return terms;
}

double throughput_df_continuous_lb(const TheoremInputs& in) {
    const auto terms = df_continuous_terms(in);
    double sum = 0.0;
    for (double t : terms) sum += t;
    return clamp_tau(0.5 * std::exp(-(in.dc.a_bar + in.dc.b_bar)) * sum);
}

double throughput_df_discrete_lb(const TheoremInputs& in) {
    in.validate();
    const double kappa = kappa_of(in.params, in.dc);
    const double abar = in.dc.a_bar;
    return clamp_tau(std::exp(-(abar + in.dc.b_bar)) / (2.0 * (kappa * std::exp(-abar) + 1.0)));
}

std::optional<double> analytic_throughput(ProtocolId id, const TheoremInputs& in) {
    switch (id) {
        case ProtocolId::AF_CONT: return throughput_af_continuous(in);
        case ProtocolId::AF_DISC: return throughput_af_discrete(in);
        case ProtocolId::DF_CONT: return throughput_df_continuous_lb(in);
        case ProtocolId::DF_DISC: return throughput_df_discrete_lb(in);
        case ProtocolId::BASELINE_FIXED: return std::nullopt;
    }
    return std::nullopt;
}

LemmaDistributions::LemmaDistributions(const TheoremInputs& in)
    : rho_(in.dc.rho),
      it_energy_(in.params.it_energy()),
      p_or_(-std::expm1(-in.dc.a_bar)),
      kappa_(kappa_of(in.params, in.dc)) {}

double LemmaDistributions::eo_pdf(double eps) const {
    if (!(eps >= 0.0)) throw std::domain_error("eo_pdf: energy must be non-negative");
    return std::exp(-eps / rho_) / rho_;
}

double LemmaDistributions::eo_cdf(double eps) const {
    if (!(eps >= 0.0)) throw std::domain_error("eo_cdf: energy must be non-negative");
    return -std::expm1(-eps / rho_);
}

double LemmaDistributions::xbar_rate(double eo) const {
    if (!(eo >= 0.0)) throw std::domain_error("xbar_rate: energy must be non-negative");
    if (eo >= it_energy_) {
        throw std::domain_error("xbar_rate: starting energy already covers an IT block");
    }
    return (it_energy_ - eo) / rho_;
}

double LemmaDistributions::xbar_pmf(int xbar, double eo) const {
    if (xbar < 0) throw std::domain_error("xbar_pmf: count must be non-negative");
    const double lambda = xbar_rate(eo);
    return std::exp(xbar * std::log(lambda) - lambda - std::lgamma(xbar + 1.0));
}

double LemmaDistributions::x_pmf(int x, double eo) const {
    if (x < 0) throw std::domain_error("x_pmf: count must be non-negative");
    if (!(eo >= 0.0)) throw std::domain_error("x_pmf: energy must be non-negative");
    if (eo >= it_energy_) return x == 0 ? 1.0 : 0.0;
    if (x == 0) return 0.0;
    return xbar_pmf(x - 1, eo);
}

double LemmaDistributions::x_mean() const { return kappa_; }

double LemmaDistributions::y_pmf(int y) const {
    if (y < 0) throw std::domain_error("y_pmf: count must be non-negative");
    return (1.0 - p_or_) * std::pow(p_or_, y);
}

}  // namespace ehrelay
