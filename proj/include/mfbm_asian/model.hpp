#pragma once

// Market model and contract descriptions, plus the per-jump-count
// quantities every pricing series is assembled from.
//
// The underlying follows a mixed fractional Brownian motion with
// compound Poisson log-normal jumps:
//
//   S_t = S0 exp[(r-q)t + sigma B_t + eps B^H_t
//                - sigma^2 t/2 - eps^2 t^{2H}/2 + sum_{i<=N_t} J_i],
//
// with J_i ~ N(mu_j, sigma_j^2) and N_t Poisson with rate lambda.
// Conditional on N_T = n the log time-average of the path is treated as
// Gaussian with the mean/variance computed by derive_term_params.

#include <cmath>
#include <stdexcept>

namespace mfbm {

enum class OptionKind { call, put };
enum class Averaging { geometric, arithmetic };

// `paper` evaluates every closed form exactly as printed.  `consistent`
// repairs two internal inconsistencies of the printed power formulas:
// the Gaussian shift in d1 becomes m*sigma_hat, and the mean of the
// m-th power of the arithmetic average keeps its m(m-1)sigma_n^2/2
// convexity term.  The two modes coincide for power m = 1.
enum class Fidelity { paper, consistent };

struct ModelParams {
  double s0 = 100.0;    // spot price, > 0
  double r = 0.0;       // risk-free rate, per year
  double q = 0.0;       // dividend yield, per year
  double sigma = 0.2;   // Brownian volatility, >= 0
  double epsilon = 0.0; // fractional volatility coefficient, >= 0
  double hurst = 0.5;   // Hurst exponent, in (0,1)
  double lambda = 0.0;  // jump intensity, per year, >= 0
  double mu_j = 0.0;    // jump log-size mean
  double sigma_j = 0.0; // jump log-size standard deviation, >= 0

  void validate() const {
    require_finite();
    if (!(s0 > 0.0)) throw std::invalid_argument("ModelParams: s0 must be > 0");
    if (!(sigma >= 0.0)) throw std::invalid_argument("ModelParams: sigma must be >= 0");
    if (!(epsilon >= 0.0)) throw std::invalid_argument("ModelParams: epsilon must be >= 0");
    if (!(hurst > 0.0 && hurst < 1.0)) {
      throw std::invalid_argument("ModelParams: hurst must lie in (0,1)");
    }
    if (!(lambda >= 0.0)) throw std::invalid_argument("ModelParams: lambda must be >= 0");
    if (!(sigma_j >= 0.0)) throw std::invalid_argument("ModelParams: sigma_j must be >= 0");
  }

 private:
  void require_finite() const {
    for (double v : {s0, r, q, sigma, epsilon, hurst, lambda, mu_j, sigma_j}) {
      if (!std::isfinite(v)) {
        throw std::invalid_argument("ModelParams: all fields must be finite");
      }
    }
  }
};

struct OptionContract {
  OptionKind kind = OptionKind::call;
  double strike = 100.0;  // K, >= 0
  double maturity = 1.0;  // T in years, > 0
  int power = 1;          // m, >= 1; payoff on the m-th power of the average
  Averaging averaging = Averaging::geometric;
  Fidelity fidelity = Fidelity::paper;

  void validate() const {
    if (!std::isfinite(strike) || !std::isfinite(maturity)) {
      throw std::invalid_argument("OptionContract: strike and maturity must be finite");
    }
    if (!(maturity > 0.0)) throw std::invalid_argument("OptionContract: maturity must be > 0");
    if (!(strike >= 0.0)) throw std::invalid_argument("OptionContract: strike must be >= 0");
    if (power < 1) throw std::invalid_argument("OptionContract: power must be >= 1");
  }
};

// rho = E[e^J] = exp(mu_j + sigma_j^2 / 2) for J ~ N(mu_j, sigma_j^2).
inline double jump_moment_rho(double mu_j, double sigma_j) {
  if (!std::isfinite(mu_j) || !std::isfinite(sigma_j)) {
    throw std::invalid_argument("jump_moment_rho: inputs must be finite");
  }
  if (!(sigma_j >= 0.0)) {
    throw std::invalid_argument("jump_moment_rho: sigma_j must be >= 0");
  }
  return std::exp(mu_j + 0.5 * sigma_j * sigma_j);
}

// Quantities of the series term conditional on N_T = n.
struct TermParams {
  int n = 0;                  // jump count
  double r_n = 0.0;           // effective drift, per year
  double sigma_n_sq = 0.0;    // effective variance rate, per year
  double mu_hat = 0.0;        // mean of the log time-average L(T)
  double sigma_hat_sq = 0.0;  // variance of L(T) = sigma_n_sq * T / 3
  double rho = 1.0;           // E[e^J]
  double u = 0.0;             // exercise threshold on the average
  double k_prime = 0.0;       // adjusted strike for arithmetic averaging;
                              // equals the contract strike otherwise
};

// (e^x - 1)/x with its removable singularity at x = 0 evaluated by
// series; the expm1 route keeps accuracy for small |x| above the branch.
inline double expm1_over_x(double x) {
  if (std::abs(x) < 1e-8) return 1.0 + 0.5 * x + x * x / 6.0;
  return std::expm1(x) / x;
}

// E[G^m] = exp(m mu_hat + m^2 sigma_hat_sq / 2).
inline double mean_geometric_power(const TermParams& term, int m) {
  if (m < 1) throw std::invalid_argument("mean_geometric_power: m must be >= 1");
  const double md = static_cast<double>(m);
  return std::exp(md * term.mu_hat + 0.5 * md * md * term.sigma_hat_sq);
}

// mu_bar = E[A^m(T)] conditional on n jumps.  In `paper` fidelity this
// is S0^m (e^{m r_n T} - 1)/(m r_n T) as printed; `consistent` fidelity
// keeps the m(m-1)sigma_n^2/2 term of E[S_t^m] in the exponent.  The
// zero-drift singularity is removable (-> S0^m).
inline double mean_arithmetic_power(const ModelParams& model,
                                    const OptionContract& contract,
                                    const TermParams& term) {
  const double md = static_cast<double>(contract.power);
  double rate = md * term.r_n;
  if (contract.fidelity == Fidelity::consistent) {
    rate += 0.5 * md * (md - 1.0) * term.sigma_n_sq;
  }
  const double x = rate * contract.maturity;
  return std::pow(model.s0, md) * expm1_over_x(x);
}

// Vorst-style adjusted strike K' = K - (E[A^m] - E[G^m]),
// i.e. K + E[G^m] - mu_bar.  May be <= 0; pricing handles that case.
inline double adjusted_strike(double strike, const ModelParams& model,
                              const OptionContract& contract,
                              const TermParams& term) {
  if (!(strike >= 0.0)) throw std::invalid_argument("adjusted_strike: strike must be >= 0");
  return strike + mean_geometric_power(term, contract.power) -
         mean_arithmetic_power(model, contract, term);
}

// Per-term parameter derivation:
//   r_n       = r - q + (n/T)(mu_j + sigma_j^2/2)
//   sigma_n^2 = sigma^2 + (eps^2 T^{2H} + n sigma_j^2)/T
//   mu_hat    = ln S0 + (r_n - sigma_n^2/2) T / 2
//   sigma_hat^2 = sigma_n^2 T / 3
//   U         = K_eff exp(-qT - (1-rho) lambda T)
// with K_eff the adjusted strike for arithmetic averaging and the
// contract strike otherwise.
inline TermParams derive_term_params(const ModelParams& model,
                                     const OptionContract& contract, int n) {
  if (n < 0) throw std::invalid_argument("derive_term_params: n must be >= 0");
  if (!(contract.maturity > 0.0)) {
    throw std::invalid_argument("derive_term_params: maturity must be > 0");
  }
  const double t = contract.maturity;
  const double dn = static_cast<double>(n);

  TermParams term;
  term.n = n;
  term.rho = jump_moment_rho(model.mu_j, model.sigma_j);
  term.r_n = model.r - model.q +
             (dn / t) * (model.mu_j + 0.5 * model.sigma_j * model.sigma_j);
  term.sigma_n_sq =
      model.sigma * model.sigma +
      (model.epsilon * model.epsilon * std::pow(t, 2.0 * model.hurst) +
       dn * model.sigma_j * model.sigma_j) /
          t;
  term.mu_hat = std::log(model.s0) + 0.5 * (term.r_n - 0.5 * term.sigma_n_sq) * t;
  term.sigma_hat_sq = term.sigma_n_sq * t / 3.0;

  term.k_prime = contract.averaging == Averaging::arithmetic
                     ? adjusted_strike(contract.strike, model, contract, term)
                     : contract.strike;
  term.u = term.k_prime *
           std::exp(-model.q * t - (1.0 - term.rho) * model.lambda * t);
  return term;
}

}  // namespace mfbm
