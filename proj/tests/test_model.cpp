#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <random>

#include "mfbm_asian/model.hpp"
#include "oracles.hpp"

using namespace mfbm;

namespace {

ModelParams base_model() {
  ModelParams m;
  m.s0 = 100.0;
  m.r = 0.05;
  m.q = 0.0;
  m.sigma = 0.2;
  m.epsilon = 0.0;
  m.hurst = 0.5;
  m.lambda = 0.0;
  return m;
}

OptionContract base_contract() {
  OptionContract c;
  c.strike = 100.0;
  c.maturity = 1.0;
  return c;
}

}  // namespace

TEST_CASE("jump_moment_rho") {
  CHECK(jump_moment_rho(0.0, 0.0) == 1.0);
  CHECK(jump_moment_rho(0.1, 0.0) == Catch::Approx(std::exp(0.1)).epsilon(1e-15));
  CHECK(jump_moment_rho(-0.1, 0.2) ==
        Catch::Approx(0.92311634638663578).epsilon(1e-15));
  CHECK(jump_moment_rho(-3.0, 1.5) > 0.0);
  CHECK_THROWS_AS(jump_moment_rho(std::numeric_limits<double>::infinity(), 0.1),
                  std::invalid_argument);
  CHECK_THROWS_AS(jump_moment_rho(0.0, -0.1), std::invalid_argument);
}

TEST_CASE("jump_moment_rho against the sample mean of e^J") {
  // Monte Carlo moment oracle: 1e6 draws of J ~ N(-0.1, 0.04).
  std::mt19937_64 rng(20240815);
  std::normal_distribution<double> normal(-0.1, 0.2);
  const std::size_t n = 1000000;
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = std::exp(normal(rng));
    sum += v;
    sum_sq += v * v;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sum_sq / n - mean * mean) / n);
  CHECK(std::abs(jump_moment_rho(-0.1, 0.2) - mean) <= 3.0 * se);
}

TEST_CASE("derive_term_params in the driftless Black-Scholes corner") {
  ModelParams m = base_model();
  const OptionContract c = base_contract();
  const TermParams tp = derive_term_params(m, c, 0);
  CHECK(tp.r_n == Catch::Approx(0.05).epsilon(1e-15));
  CHECK(tp.sigma_n_sq == Catch::Approx(0.04).epsilon(1e-15));
  CHECK(tp.mu_hat ==
        Catch::Approx(std::log(100.0) + 0.5 * (0.05 - 0.02)).epsilon(1e-15));
  CHECK(tp.sigma_hat_sq == Catch::Approx(0.04 / 3.0).epsilon(1e-15));
  CHECK(tp.rho == 1.0);
}

TEST_CASE("fractional volatility folds into sigma_n at H = 1/2") {
  ModelParams m = base_model();
  m.epsilon = 0.1;
  const TermParams tp = derive_term_params(m, base_contract(), 0);
  CHECK(tp.sigma_n_sq == Catch::Approx(0.05).epsilon(1e-15));
}

TEST_CASE("derive_term_params frozen jump-active case") {
  // Values frozen from an independent arbitrary-precision evaluation of
  // the same closed forms.
  ModelParams m;
  m.s0 = 100.0;
  m.r = 0.05;
  m.q = 0.01;
  m.sigma = 0.2;
  m.epsilon = 0.1;
  m.hurst = 0.8;
  m.lambda = 0.5;
  m.mu_j = -0.1;
  m.sigma_j = 0.2;
  OptionContract c = base_contract();
  c.maturity = 2.0;

  const TermParams tp = derive_term_params(m, c, 2);
  CHECK(tp.rho == Catch::Approx(0.92311634638663578).epsilon(1e-15));
  CHECK(tp.r_n == Catch::Approx(-0.04).epsilon(1e-14));
  CHECK(tp.sigma_n_sq == Catch::Approx(0.095157165665103981).epsilon(1e-14));
  CHECK(tp.mu_hat == Catch::Approx(4.5175916031555394).epsilon(1e-14));
  CHECK(tp.sigma_hat_sq == Catch::Approx(0.063438110443402654).epsilon(1e-14));
  CHECK(tp.u == Catch::Approx(90.766160313805172).epsilon(1e-14));
  CHECK(tp.sigma_hat_sq == Catch::Approx(tp.sigma_n_sq * 2.0 / 3.0).epsilon(1e-15));

  OptionContract bad = c;
  bad.maturity = 0.0;
  CHECK_THROWS_AS(derive_term_params(m, bad, 0), std::invalid_argument);
  CHECK_THROWS_AS(derive_term_params(m, c, -1), std::invalid_argument);
}

TEST_CASE("mean_geometric_power") {
  TermParams tp;
  tp.mu_hat = 0.0;
  tp.sigma_hat_sq = 0.0;
  CHECK(mean_geometric_power(tp, 1) == 1.0);

  tp.mu_hat = 0.3;
  tp.sigma_hat_sq = 0.02;
  CHECK(mean_geometric_power(tp, 1) ==
        Catch::Approx(std::exp(0.3 + 0.01)).epsilon(1e-15));
  CHECK_THROWS_AS(mean_geometric_power(tp, 0), std::invalid_argument);
}

TEST_CASE("mean_geometric_power against lognormal moment sampling") {
  TermParams tp;
  tp.mu_hat = 4.6;
  tp.sigma_hat_sq = 0.0133;
  const double expected = mean_geometric_power(tp, 2);
  CHECK(expected == Catch::Approx(std::exp(9.2 + 2.0 * 0.0133)).epsilon(1e-15));

  std::mt19937_64 rng(987654321);
  std::normal_distribution<double> normal(4.6, std::sqrt(0.0133));
  const std::size_t n = 1000000;
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = std::exp(2.0 * normal(rng));
    sum += v;
    sum_sq += v * v;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sum_sq / n - mean * mean) / n);
  CHECK(std::abs(expected - mean) <= 3.0 * se);
}

TEST_CASE("mean_arithmetic_power") {
  ModelParams m = base_model();
  OptionContract c = base_contract();

  SECTION("zero drift limit returns S0^m") {
    m.sigma = 0.0;
    m.r = 0.0;
    for (int power : {1, 2, 3}) {
      c.power = power;
      const TermParams tp = derive_term_params(m, c, 0);
      CHECK(mean_arithmetic_power(m, c, tp) ==
            Catch::Approx(std::pow(100.0, power)).epsilon(1e-14));
    }
  }

  SECTION("m = 1 value and quadrature cross-check") {
    const TermParams tp = derive_term_params(m, c, 0);
    const double mu_bar = mean_arithmetic_power(m, c, tp);
    CHECK(mu_bar == Catch::Approx(102.54219275204808).epsilon(1e-14));
    // (1/T) integral of E[S_t] = S0 e^{r_n t} over [0,T].
    const double quad =
        oracle::simpson([&](double t) { return 100.0 * std::exp(tp.r_n * t); },
                        0.0, 1.0, 2000);
    CHECK(mu_bar == Catch::Approx(quad).epsilon(1e-10));
  }

  SECTION("consistent mode exceeds paper mode for m >= 2") {
    c.power = 2;
    const TermParams tp = derive_term_params(m, c, 0);
    c.fidelity = Fidelity::paper;
    const double paper = mean_arithmetic_power(m, c, tp);
    c.fidelity = Fidelity::consistent;
    const double consistent = mean_arithmetic_power(m, c, tp);
    CHECK(consistent > paper);
  }

  SECTION("fidelity modes agree bit-for-bit at m = 1") {
    const TermParams tp = derive_term_params(m, c, 0);
    c.fidelity = Fidelity::paper;
    const double paper = mean_arithmetic_power(m, c, tp);
    c.fidelity = Fidelity::consistent;
    CHECK(paper == mean_arithmetic_power(m, c, tp));
  }
}

TEST_CASE("adjusted_strike") {
  ModelParams m = base_model();
  OptionContract c = base_contract();
  c.averaging = Averaging::arithmetic;

  SECTION("degenerate equality E[A] = E[G] keeps K") {
    // Flat path: sigma = 0 and r = q make both means S0.
    m.sigma = 0.0;
    m.r = m.q = 0.03;
    const TermParams tp = derive_term_params(m, c, 0);
    CHECK(adjusted_strike(100.0, m, c, tp) == Catch::Approx(100.0).epsilon(1e-14));
  }

  SECTION("deterministic path, frozen value") {
    m.sigma = 0.0;
    const TermParams tp = derive_term_params(m, c, 0);
    CHECK(adjusted_strike(100.0, m, c, tp) ==
          Catch::Approx(99.989319300394805).epsilon(1e-14));
  }

  SECTION("AM-GM gap pulls the strike below K") {
    const TermParams tp = derive_term_params(m, c, 0);
    const double k_prime = adjusted_strike(100.0, m, c, tp);
    CHECK(k_prime == Catch::Approx(99.648116580681237).epsilon(1e-13));
    CHECK(k_prime < 100.0);
    // The gap itself, by quadrature of E[S_t] against the lognormal mean.
    const double ea =
        oracle::simpson([&](double t) { return 100.0 * std::exp(tp.r_n * t); },
                        0.0, 1.0, 2000);
    const double eg = std::exp(tp.mu_hat + 0.5 * tp.sigma_hat_sq);
    CHECK(ea > eg);
    CHECK(k_prime == Catch::Approx(100.0 + eg - ea).epsilon(1e-9));
  }

  SECTION("K' <= K whenever E[A^m] >= E[G^m]") {
    for (double sigma : {0.1, 0.2, 0.4}) {
      for (double r : {0.0, 0.05, 0.1}) {
        m.sigma = sigma;
        m.r = r;
        const TermParams tp = derive_term_params(m, c, 0);
        const double ea = mean_arithmetic_power(m, c, tp);
        const double eg = mean_geometric_power(tp, c.power);
        if (ea >= eg) CHECK(adjusted_strike(100.0, m, c, tp) <= 100.0);
      }
    }
  }
}

TEST_CASE("sigma_hat_sq is strictly increasing in each volatility input") {
  ModelParams m = base_model();
  m.epsilon = 0.1;
  m.hurst = 0.7;
  m.lambda = 0.5;
  m.mu_j = -0.1;
  m.sigma_j = 0.2;
  const OptionContract c = base_contract();

  const double baseline = derive_term_params(m, c, 2).sigma_hat_sq;

  ModelParams up = m;
  up.sigma += 0.01;
  CHECK(derive_term_params(up, c, 2).sigma_hat_sq > baseline);
  up = m;
  up.epsilon += 0.01;
  CHECK(derive_term_params(up, c, 2).sigma_hat_sq > baseline);
  up = m;
  up.sigma_j += 0.01;
  CHECK(derive_term_params(up, c, 2).sigma_hat_sq > baseline);
  CHECK(derive_term_params(m, c, 3).sigma_hat_sq > baseline);
}

TEST_CASE("parameter validation") {
  ModelParams m = base_model();
  m.s0 = 0.0;
  CHECK_THROWS_WITH(m.validate(), Catch::Matchers::ContainsSubstring("s0"));
  m = base_model();
  m.hurst = 1.0;
  CHECK_THROWS_WITH(m.validate(), Catch::Matchers::ContainsSubstring("hurst"));
  m = base_model();
  m.lambda = -1.0;
  CHECK_THROWS_WITH(m.validate(), Catch::Matchers::ContainsSubstring("lambda"));

  OptionContract c = base_contract();
  c.maturity = -1.0;
  CHECK_THROWS_WITH(c.validate(), Catch::Matchers::ContainsSubstring("maturity"));
  c = base_contract();
  c.power = 0;
  CHECK_THROWS_WITH(c.validate(), Catch::Matchers::ContainsSubstring("power"));
  c = base_contract();
  c.strike = -5.0;
  CHECK_THROWS_WITH(c.validate(), Catch::Matchers::ContainsSubstring("strike"));
}
