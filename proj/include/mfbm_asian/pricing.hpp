#pragma once

// Closed-form Asian (power) option prices as Poisson-weighted series of
// Black-Scholes-like terms, together with the arithmetic price bounds
// and the approximation error bound.
//
// Call series (per jump count n, Poisson weight w_n):
//
//   C = sum_n w_n [ D e^{a(n)} Phi(d1) - K_eff e^{-rT} Phi(d2) ],
//   D  = exp(-(r-q)T - lambda (rho-1) T)          (actuarial discount)
//   d2 = (mu_hat - ln(U)/m) / sigma_hat,          U = K_eff e^{-qT-(1-rho)lambda T}
//
// with a(n) and the d1 shift depending on the fidelity mode (see
// Fidelity in model.hpp).  Arithmetic averaging replaces K by the
// adjusted strike K' inside both U and the discounted-strike leg.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mfbm_asian/model.hpp"
#include "mfbm_asian/special.hpp"

namespace mfbm {

namespace warning {
inline constexpr const char* hurst_below_three_quarters = "hurst-below-3/4";
inline constexpr const char* nonpositive_adjusted_strike = "nonpositive-adjusted-strike";
}  // namespace warning

struct PriceResult {
  double price = 0.0;
  std::size_t series_terms = 0;   // Poisson terms accumulated
  double truncation_bound = 0.0;  // bound on the discarded-mass contribution
  std::optional<double> lower_bound;  // arithmetic contracts only
  std::optional<double> upper_bound;  // arithmetic contracts only
  std::optional<double> error_bound;  // e^{-rT}(E[A^m] - E[G^m])
  std::vector<std::string> warnings;
};

// One Poisson term of the series, both option kinds at once.  Exposed
// for diagnostics and for the per-term identity checks in the tests.
struct SeriesTerm {
  int n = 0;
  double weight = 0.0;
  double forward_leg = 0.0;  // D e^{a(n)}
  double strike_leg = 0.0;   // K_eff e^{-rT}
  double phi_d1 = 0.0;
  double phi_d2 = 0.0;
  double phi_neg_d1 = 0.0;
  double phi_neg_d2 = 0.0;
  double call_value = 0.0;
  double put_value = 0.0;
  double k_eff = 0.0;
};

struct PriceSeries {
  std::vector<SeriesTerm> terms;
  double truncated_mass = 0.0;
  double payoff_scale = 0.0;  // max per-term leg, scales the truncation bound
  bool nonpositive_strike = false;
};

// Assembles the full series for a contract.  Handles the degenerate
// branches in one place: sigma_hat = 0 collapses Phi to the exercise
// indicator, and U <= 0 (possible when the adjusted strike K' <= 0)
// means certain exercise for calls and zero value for puts.
inline PriceSeries price_series(const ModelParams& model,
                                const OptionContract& contract,
                                const TruncationPolicy& policy = {}) {
  model.validate();
  contract.validate();
  policy.validate();

  const double t = contract.maturity;
  const double m = static_cast<double>(contract.power);
  const double rho = jump_moment_rho(model.mu_j, model.sigma_j);
  const double lambda_t = model.lambda * t;
  const double actuarial_discount =
      std::exp(-(model.r - model.q) * t - model.lambda * (rho - 1.0) * t);
  const double strike_discount = std::exp(-model.r * t);

  PoissonWeights weights = poisson_weights(lambda_t, policy);

  PriceSeries series;
  series.truncated_mass = weights.truncated_mass;
  series.terms.reserve(weights.w.size());

  double contrib_sum = 0.0;
  for (std::size_t i = 0; i < weights.w.size(); ++i) {
    const int n = static_cast<int>(i);
    const TermParams tp = derive_term_params(model, contract, n);

    const bool paper_arithmetic = contract.averaging == Averaging::arithmetic &&
                                  contract.fidelity == Fidelity::paper;
    const double a_exp = paper_arithmetic
                             ? tp.mu_hat + 0.5 * tp.sigma_hat_sq
                             : m * tp.mu_hat + 0.5 * m * m * tp.sigma_hat_sq;

    SeriesTerm term;
    term.n = n;
    term.weight = weights.w[i];
    term.k_eff = tp.k_prime;
    term.forward_leg = actuarial_discount * std::exp(a_exp);
    term.strike_leg = term.k_eff * strike_discount;

    if (tp.u <= 0.0) {
      // Certain exercise: the call always pays, the put never does.
      term.phi_d1 = term.phi_d2 = 1.0;
      term.phi_neg_d1 = term.phi_neg_d2 = 0.0;
      if (contract.averaging == Averaging::arithmetic && tp.k_prime <= 0.0) {
        series.nonpositive_strike = true;
      }
    } else {
      const double sigma_hat = std::sqrt(tp.sigma_hat_sq);
      if (sigma_hat == 0.0) {
        const bool exercised = m * tp.mu_hat > std::log(tp.u);
        term.phi_d1 = term.phi_d2 = exercised ? 1.0 : 0.0;
        term.phi_neg_d1 = term.phi_neg_d2 = exercised ? 0.0 : 1.0;
      } else {
        const double d2 = (tp.mu_hat - std::log(tp.u) / m) / sigma_hat;
        const double shift =
            contract.fidelity == Fidelity::consistent ? m * sigma_hat : sigma_hat;
        const double d1 = d2 + shift;
        term.phi_d1 = normal_cdf(d1);
        term.phi_d2 = normal_cdf(d2);
        term.phi_neg_d1 = normal_cdf(-d1);
        term.phi_neg_d2 = normal_cdf(-d2);
      }
    }

    term.call_value = term.forward_leg * term.phi_d1 - term.strike_leg * term.phi_d2;
    term.put_value = term.strike_leg * term.phi_neg_d2 - term.forward_leg * term.phi_neg_d1;
    series.payoff_scale = std::max(
        {series.payoff_scale, term.forward_leg, std::abs(term.strike_leg)});

    const double contrib =
        term.weight * (term.forward_leg + std::abs(term.strike_leg));
    series.terms.push_back(term);

    // Past the Poisson mode the terms only shrink; once one falls below
    // the relative floor the rest of the mass goes into the truncation
    // accounting instead of the sum.
    if (static_cast<double>(n) > lambda_t && contrib_sum > 0.0 &&
        contrib < policy.term_tol * contrib_sum) {
      for (std::size_t j = i + 1; j < weights.w.size(); ++j) {
        series.truncated_mass += weights.w[j];
      }
      break;
    }
    contrib_sum += contrib;
  }
  return series;
}

namespace detail {

inline double sum_series(const PriceSeries& series, OptionKind kind) {
  double total = 0.0;
  for (const SeriesTerm& term : series.terms) {
    total += term.weight *
             (kind == OptionKind::call ? term.call_value : term.put_value);
  }
  // Each term is a truncated expectation of a non-negative payoff; only
  // rounding can push the sum below zero.
  return std::max(total, 0.0);
}

inline PriceResult result_from_series(const ModelParams& model,
                                      const OptionContract& contract,
                                      const PriceSeries& series) {
  PriceResult res;
  res.price = sum_series(series, contract.kind);
  res.series_terms = series.terms.size();
  res.truncation_bound = series.truncated_mass * series.payoff_scale;
  if (model.hurst <= 0.75) {
    res.warnings.emplace_back(warning::hurst_below_three_quarters);
  }
  if (series.nonpositive_strike) {
    res.warnings.emplace_back(warning::nonpositive_adjusted_strike);
  }
  return res;
}

}  // namespace detail

// Geometric Asian power option value.  m = 1 reduces to the plain
// geometric Asian formula.
inline PriceResult price_geometric_power(const ModelParams& model,
                                         const OptionContract& contract,
                                         const TruncationPolicy& policy = {}) {
  if (contract.averaging != Averaging::geometric) {
    throw std::invalid_argument(
        "price_geometric_power: contract must use geometric averaging");
  }
  const PriceSeries series = price_series(model, contract, policy);
  return detail::result_from_series(model, contract, series);
}

// e^{-rT}(E[A^m] - E[G^m]) with the means Poisson-mixed over the jump
// count; the pricing error of the adjusted-strike approximation is
// bounded by this quantity.
inline double approximation_error_bound(const ModelParams& model,
                                        const OptionContract& contract,
                                        const TruncationPolicy& policy = {}) {
  if (contract.averaging != Averaging::arithmetic) {
    throw std::invalid_argument(
        "approximation_error_bound: contract must use arithmetic averaging");
  }
  model.validate();
  contract.validate();
  const double t = contract.maturity;
  const PoissonWeights weights = poisson_weights(model.lambda * t, policy);
  double gap = 0.0;
  for (std::size_t i = 0; i < weights.w.size(); ++i) {
    const TermParams tp = derive_term_params(model, contract, static_cast<int>(i));
    gap += weights.w[i] * (mean_arithmetic_power(model, contract, tp) -
                           mean_geometric_power(tp, contract.power));
  }
  return std::exp(-model.r * t) * gap;
}

// Adjusted-strike (Vorst) approximation of the arithmetic Asian power
// option, with the geometric-anchored bracket attached.  For calls the
// bracket is [C_G, C_G + e^{-rT}(E[A^m]-E[G^m])]; for puts the same
// algebra runs in the opposite direction, giving [P_G - gap, P_G].
// The bracket is a theorem when E[A^m] >= E[G^m], i.e. for m = 1 and
// in consistent fidelity; paper fidelity at m >= 2 drops a convexity
// term from E[A^m], which can invert the gap.
inline PriceResult price_arithmetic_power_approx(
    const ModelParams& model, const OptionContract& contract,
    const TruncationPolicy& policy = {}) {
  if (contract.averaging != Averaging::arithmetic) {
    throw std::invalid_argument(
        "price_arithmetic_power_approx: contract must use arithmetic averaging");
  }
  const PriceSeries series = price_series(model, contract, policy);
  PriceResult res = detail::result_from_series(model, contract, series);

  OptionContract geometric_leg = contract;
  geometric_leg.averaging = Averaging::geometric;
  const PriceResult anchor = price_geometric_power(model, geometric_leg, policy);
  const double gap = approximation_error_bound(model, contract, policy);

  res.error_bound = gap;
  if (contract.kind == OptionKind::call) {
    res.lower_bound = anchor.price;
    res.upper_bound = anchor.price + gap;
  } else {
    res.lower_bound = std::max(anchor.price - gap, 0.0);
    res.upper_bound = anchor.price;
  }
  return res;
}

// Price bounds for the arithmetic Asian power call:
// C_G <= C_A <= C_G + e^{-rT}(E[A^m] - E[G^m]).
inline std::pair<double, double> arithmetic_bounds(
    const ModelParams& model, const OptionContract& contract,
    const TruncationPolicy& policy = {}) {
  if (contract.averaging != Averaging::arithmetic ||
      contract.kind != OptionKind::call) {
    throw std::invalid_argument(
        "arithmetic_bounds: contract must be an arithmetic call");
  }
  OptionContract geometric_leg = contract;
  geometric_leg.averaging = Averaging::geometric;
  const double lower = price_geometric_power(model, geometric_leg, policy).price;
  const double upper = lower + approximation_error_bound(model, contract, policy);
  return {lower, upper};
}

// Routes a contract to the matching series.
inline PriceResult price(const ModelParams& model, const OptionContract& contract,
                         const TruncationPolicy& policy = {}) {
  return contract.averaging == Averaging::geometric
             ? price_geometric_power(model, contract, policy)
             : price_arithmetic_power_approx(model, contract, policy);
}

}  // namespace mfbm
