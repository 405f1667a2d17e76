#pragma once

// Scalar kernels shared by every pricing series: the standard normal
// CDF/PDF and log-space Poisson weights with tail-mass truncation.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace mfbm {

inline double normal_pdf(double x) {
  constexpr double inv_sqrt_2pi = 0.39894228040143267794;
  return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

// Phi(x) = erfc(-x/sqrt(2)) / 2.  Routing through erfc keeps the tails
// free of cancellation: erfc carries its own rational approximation for
// large arguments, so Phi(-40) is still accurate to a few ulp.
inline double normal_cdf(double x) {
  if (std::isnan(x)) {
    throw std::invalid_argument("normal_cdf: x must not be NaN");
  }
  constexpr double inv_sqrt2 = 0.70710678118654752440;
  return 0.5 * std::erfc(-x * inv_sqrt2);
}

// Where to cut the infinite jump-count sum.  Truncation is by residual
// tail mass, so the discarded contribution to a price is bounded by
// truncated_mass times the largest per-term payoff scale; pricing
// surfaces that bound in PriceResult.
struct TruncationPolicy {
  double mass_tol = 1e-12;  // residual Poisson tail mass bound
  double term_tol = 1e-13;  // relative per-term contribution floor
  std::size_t n_cap = 512;  // hard maximum jump count

  void validate() const {
    if (!(mass_tol > 0.0)) {
      throw std::invalid_argument("TruncationPolicy: mass_tol must be > 0");
    }
    if (!(term_tol > 0.0)) {
      throw std::invalid_argument("TruncationPolicy: term_tol must be > 0");
    }
    if (n_cap < 1) {
      throw std::invalid_argument("TruncationPolicy: n_cap must be >= 1");
    }
  }
};

struct PoissonWeights {
  std::vector<double> w;        // w[n] = P(N = n) for n = 0..N
  double truncated_mass = 0.0;  // 1 - sum(w)
};

// Poisson(lambda_t) probabilities, evaluated as exp(n log(lambda_t)
// - lambda_t - lgamma(n+1)) so no intermediate overflows for large
// means.  The list ends at the smallest N whose cumulative mass reaches
// 1 - mass_tol, hard-capped at n_cap.
inline PoissonWeights poisson_weights(double lambda_t,
                                      const TruncationPolicy& policy = {}) {
  policy.validate();
  if (!(lambda_t >= 0.0)) {
    throw std::invalid_argument("poisson_weights: lambda_t must be >= 0");
  }
  PoissonWeights out;
  if (lambda_t == 0.0) {
    out.w = {1.0};
    out.truncated_mass = 0.0;
    return out;
  }
  const double log_lt = std::log(lambda_t);
  const double target = 1.0 - policy.mass_tol;
  double cum = 0.0;
  for (std::size_t n = 0; n <= policy.n_cap; ++n) {
    const double dn = static_cast<double>(n);
    const double w = std::exp(dn * log_lt - lambda_t - std::lgamma(dn + 1.0));
    out.w.push_back(w);
    cum += w;
    if (cum >= target) break;
  }
  out.truncated_mass = std::max(0.0, 1.0 - cum);
  return out;
}

}  // namespace mfbm
