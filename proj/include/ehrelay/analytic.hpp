#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "ehrelay/params.hpp"
#include "ehrelay/protocols.hpp"

namespace ehrelay {

struct TheoremInputs {
    SystemParams params;
    DerivedConstants dc;
    int truncation_n = 10;
    double quad_tol = 1e-9;

    /// Throws ParamError when truncation_n < 1 or quad_tol is outside (1e-14, 1e-2).
    void validate() const;
};

/// Builds inputs with derive_constants(p) and the given numeric settings.
TheoremInputs make_inputs(const SystemParams& p, int truncation_n = 10, double quad_tol = 1e-9);

/// Raised when a series term of the continuous-DF bound is not finite.
class SeriesTermError : public std::runtime_error {
public:
    SeriesTermError(const std::string& what, int term_index)
        : std::runtime_error(what), term_index_(term_index) {}
    int term_index() const { return term_index_; }

private:
    int term_index_;
};

/// The semi-infinite integral subtracted in the continuous-AF throughput.
/// Computed by adaptive quadrature at in.quad_tol.
double af_continuous_nu(const TheoremInputs& in);

/// Exact average throughput of continuous-EH amplify-and-forward.
double throughput_af_continuous(const TheoremInputs& in);

/// Exact average throughput of discrete-EH amplify-and-forward.
double throughput_af_discrete(const TheoremInputs& in);

/// Series terms J_0..J_N of the continuous-DF lower bound. J_n is the
/// contribution of an IT block preceded by exactly n relay-outage blocks,
/// with the battery bounded below by what those n blocks harvested.
/// The bound is exp(-(a_bar + b_bar)) / 2 * sum_n J_n.
std::vector<double> df_continuous_terms(const TheoremInputs& in);

/// Lower bound on continuous-EH decode-and-forward throughput, summed over
/// n = 0..truncation_n.
double throughput_df_continuous_lb(const TheoremInputs& in);

/// Lower bound on discrete-EH decode-and-forward throughput.
double throughput_df_discrete_lb(const TheoremInputs& in);

/// Theorem value for a protocol; std::nullopt for the fixed-alpha baseline,
/// which has no closed form here.
std::optional<double> analytic_throughput(ProtocolId id, const TheoremInputs& in);

/// Distributions describing the discrete-EH battery process in steady state.
class LemmaDistributions {
public:
    explicit LemmaDistributions(const TheoremInputs& in);

    /// Density of the battery level at the start of an EH-IT pattern:
    /// exponential with mean rho. Throws std::domain_error for eps < 0.
    double eo_pdf(double eps) const;
    double eo_cdf(double eps) const;
    double eo_mean() const { return rho_; }

    /// Poisson rate of X - 1 given the starting energy; requires
    /// eo < Pr T / 2 (std::domain_error otherwise).
    double xbar_rate(double eo) const;

    /// P(X - 1 = xbar | E_o = eo), evaluated in log space.
    /// Throws std::domain_error when eo >= Pr T / 2 or xbar < 0.
    double xbar_pmf(int xbar, double eo) const;

    /// P(X = x | E_o = eo), including the degenerate case eo >= Pr T / 2
    /// where X = 0 with probability one.
    double x_pmf(int x, double eo) const;

    /// Steady-state mean of X, Pr d1^m / (2 eta Ps).
    double x_mean() const;

    /// Per-block relay outage probability 1 - exp(-a_bar).
    double relay_outage_probability() const { return p_or_; }

    /// Geometric PMF of Y, (1 - p_or) p_or^y. Throws std::domain_error for y < 0.
    double y_pmf(int y) const;
    double y_mean() const { return p_or_ / (1.0 - p_or_); }

private:
    double rho_;
    double it_energy_;
    double p_or_;
    double kappa_;
};

}  // namespace ehrelay
