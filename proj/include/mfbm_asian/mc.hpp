#pragma once

// Monte Carlo verification engines.
//
// Two deliberately different routes:
//  - conditional_lognormal_oracle samples the per-jump-count Gaussian
//    law of the log time-average directly.  Its expectation is exactly
//    the closed-form series, so it validates the formula algebra.
//  - sample_mixed_paths / mc_price simulate the asset path itself
//    (exact Brownian and fractional Gaussian sampling, true compound
//    Poisson jumps at their arrival times) and quantify how far the
//    closed forms sit from the path-level model.
//
// Paths are generated in fixed-size blocks with per-block substreams,
// so estimates are bit-identical for a given seed regardless of the
// worker count, and sums use compensated accumulation so merges are
// order-independent.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "mfbm_asian/fbm.hpp"
#include "mfbm_asian/model.hpp"
#include "mfbm_asian/pricing.hpp"
#include "mfbm_asian/rng.hpp"
#include "mfbm_asian/special.hpp"

namespace mfbm {

enum class FgnGenerator { cholesky, circulant };

struct McConfig {
  std::size_t n_paths = 100000;
  std::size_t n_steps = 256;  // time-grid intervals; grid has n_steps+1 points
  std::uint64_t seed = 42;
  bool use_control_variate = false;
  FgnGenerator generator = FgnGenerator::cholesky;

  void validate() const {
    if (n_paths < 1) throw std::invalid_argument("McConfig: n_paths must be >= 1");
    if (n_steps < 2) throw std::invalid_argument("McConfig: n_steps must be >= 2");
    if (generator == FgnGenerator::cholesky && n_steps > 4096) {
      throw std::invalid_argument(
          "McConfig: cholesky generator is limited to n_steps <= 4096");
    }
  }
};

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n_effective = 0;
  std::uint64_t seed = 0;
};

struct PathBatch {
  std::vector<double> grid;     // n_steps+1 times, grid[0] = 0
  Eigen::MatrixXd log_spot;     // (n_steps+1) x n_paths, column per path
  std::vector<int> jump_counts; // N_T per path
  bool fell_back_to_cholesky = false;
};

struct KahanSum {
  double total = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double y = x - carry;
    const double t = total + y;
    carry = (t - total) - y;
    total = t;
  }
};

namespace detail {

constexpr std::size_t kBlockPaths = 8192;

struct PathGenContext {
  ModelParams model;
  McConfig config;
  double maturity = 0.0;
  double dt = 0.0;
  std::vector<double> grid;
  std::vector<double> drift;  // deterministic part of ln(S_t/S0) per grid point
  std::vector<double> fbm_times;
  bool use_cholesky = false;
  bool use_circulant = false;
  bool fell_back = false;
  // Only one of these is engaged, and only when epsilon > 0.
  std::vector<FbmCholeskySampler> cholesky;
  std::vector<CirculantFgnSampler> circulant;
};

inline PathGenContext make_context(const ModelParams& model, double maturity,
                                   const McConfig& config) {
  model.validate();
  config.validate();
  if (!(maturity > 0.0)) {
    throw std::invalid_argument("sample_mixed_paths: maturity must be > 0");
  }

  PathGenContext ctx;
  ctx.model = model;
  ctx.config = config;
  ctx.maturity = maturity;
  const std::size_t m = config.n_steps;
  ctx.dt = maturity / static_cast<double>(m);
  ctx.grid.resize(m + 1);
  ctx.drift.resize(m + 1);
  for (std::size_t i = 0; i <= m; ++i) {
    const double t = maturity * static_cast<double>(i) / static_cast<double>(m);
    ctx.grid[i] = t;
    ctx.drift[i] = (model.r - model.q) * t - 0.5 * model.sigma * model.sigma * t -
                   0.5 * model.epsilon * model.epsilon *
                       std::pow(t, 2.0 * model.hurst);
  }
  if (model.epsilon > 0.0) {
    ctx.fbm_times.assign(ctx.grid.begin() + 1, ctx.grid.end());
    if (config.generator == FgnGenerator::circulant) {
      CirculantFgnSampler sampler(m, ctx.dt, model.hurst);
      if (sampler.valid()) {
        ctx.circulant.push_back(std::move(sampler));
        ctx.use_circulant = true;
      } else if (m <= 4096) {
        ctx.fell_back = true;
      } else {
        throw std::runtime_error(
            "sample_mixed_paths: circulant embedding spectrum is negative and "
            "the grid is too large for the Cholesky fallback");
      }
    }
    if (!ctx.use_circulant) {
      ctx.cholesky.emplace_back(ctx.fbm_times, model.hurst);
      ctx.use_cholesky = true;
    }
  }
  return ctx;
}

// Fills columns [0, n_block) of `log_spot` with ln S on the grid and
// `jump_counts` with N_T, using the substreams of `block_index`.
inline void generate_block(const PathGenContext& ctx, std::uint64_t block_index,
                           Eigen::Index n_block, Eigen::Ref<Eigen::MatrixXd> log_spot,
                           int* jump_counts) {
  const ModelParams& model = ctx.model;
  const std::size_t m = ctx.config.n_steps;
  const auto rows = static_cast<Eigen::Index>(m + 1);
  const double log_s0 = std::log(model.s0);
  const double sqrt_dt = std::sqrt(ctx.dt);

  for (Eigen::Index p = 0; p < n_block; ++p) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      log_spot(i, p) = log_s0 + ctx.drift[static_cast<std::size_t>(i)];
    }
  }

  if (model.sigma > 0.0) {
    auto rng = make_stream(ctx.config.seed, StreamPurpose::brownian, block_index);
    std::normal_distribution<double> normal;
    for (Eigen::Index p = 0; p < n_block; ++p) {
      double level = 0.0;
      for (std::size_t i = 1; i <= m; ++i) {
        level += sqrt_dt * normal(rng);
        log_spot(static_cast<Eigen::Index>(i), p) += model.sigma * level;
      }
    }
  }

  if (model.epsilon > 0.0) {
    auto rng = make_stream(ctx.config.seed, StreamPurpose::fractional, block_index);
    if (ctx.use_cholesky) {
      const Eigen::MatrixXd paths = ctx.cholesky.front().sample_block(rng, n_block);
      for (Eigen::Index p = 0; p < n_block; ++p) {
        for (std::size_t i = 1; i <= m; ++i) {
          log_spot(static_cast<Eigen::Index>(i), p) +=
              model.epsilon * paths(static_cast<Eigen::Index>(i - 1), p);
        }
      }
    } else {
      std::vector<double> inc_a, inc_b;
      for (Eigen::Index p = 0; p < n_block; p += 2) {
        ctx.circulant.front().sample_pair(rng, inc_a, inc_b);
        for (int half = 0; half < 2 && p + half < n_block; ++half) {
          const std::vector<double>& inc = half == 0 ? inc_a : inc_b;
          double level = 0.0;
          for (std::size_t i = 1; i <= m; ++i) {
            level += inc[i - 1];
            log_spot(static_cast<Eigen::Index>(i), p + half) += model.epsilon * level;
          }
        }
      }
    }
  }

  if (model.lambda > 0.0) {
    auto rng_count = make_stream(ctx.config.seed, StreamPurpose::jump_count, block_index);
    auto rng_time = make_stream(ctx.config.seed, StreamPurpose::jump_time, block_index);
    auto rng_size = make_stream(ctx.config.seed, StreamPurpose::jump_size, block_index);
    std::poisson_distribution<int> count(model.lambda * ctx.maturity);
    std::uniform_real_distribution<double> arrival(0.0, ctx.maturity);
    std::normal_distribution<double> normal;
    std::vector<double> cell(m + 1);
    for (Eigen::Index p = 0; p < n_block; ++p) {
      const int n_jumps = count(rng_count);
      jump_counts[p] = n_jumps;
      if (n_jumps == 0) continue;
      std::fill(cell.begin(), cell.end(), 0.0);
      for (int k = 0; k < n_jumps; ++k) {
        const double tau = arrival(rng_time);
        const double size = model.mu_j + model.sigma_j * normal(rng_size);
        auto idx = static_cast<std::size_t>(std::ceil(tau / ctx.dt));
        idx = std::clamp<std::size_t>(idx, 1, m);
        cell[idx] += size;
      }
      double cum = 0.0;
      for (std::size_t i = 1; i <= m; ++i) {
        cum += cell[i];
        if (cum != 0.0) log_spot(static_cast<Eigen::Index>(i), p) += cum;
      }
    }
  } else {
    std::fill(jump_counts, jump_counts + n_block, 0);
  }
}

// Trapezoidal time-averages of the path; uniform grid, both endpoints.
struct PathAverages {
  double geometric = 0.0;
  double arithmetic = 0.0;
};

inline PathAverages path_averages(const Eigen::MatrixXd& log_spot, Eigen::Index p) {
  const Eigen::Index rows = log_spot.rows();
  const auto inv_m = 1.0 / static_cast<double>(rows - 1);
  double log_sum = 0.5 * (log_spot(0, p) + log_spot(rows - 1, p));
  double spot_sum = 0.5 * (std::exp(log_spot(0, p)) + std::exp(log_spot(rows - 1, p)));
  for (Eigen::Index i = 1; i + 1 < rows; ++i) {
    log_sum += log_spot(i, p);
    spot_sum += std::exp(log_spot(i, p));
  }
  return {std::exp(log_sum * inv_m), spot_sum * inv_m};
}

}  // namespace detail

// Materializes a full batch of paths of ln S on a uniform grid.  Memory
// is O(n_paths * n_steps); the estimator below streams blocks instead.
inline PathBatch sample_mixed_paths(const ModelParams& model, double maturity,
                                    const McConfig& config) {
  const detail::PathGenContext ctx = detail::make_context(model, maturity, config);
  PathBatch batch;
  batch.grid = ctx.grid;
  batch.fell_back_to_cholesky = ctx.fell_back;
  batch.log_spot.resize(static_cast<Eigen::Index>(config.n_steps + 1),
                        static_cast<Eigen::Index>(config.n_paths));
  batch.jump_counts.resize(config.n_paths);

  std::size_t done = 0;
  std::uint64_t block = 0;
  while (done < config.n_paths) {
    const auto n_block = static_cast<Eigen::Index>(
        std::min(detail::kBlockPaths, config.n_paths - done));
    detail::generate_block(ctx, block, n_block,
                           batch.log_spot.middleCols(static_cast<Eigen::Index>(done), n_block),
                           batch.jump_counts.data() + done);
    done += static_cast<std::size_t>(n_block);
    ++block;
  }
  return batch;
}

// Path-level price of an Asian (power) contract under the actuarial
// discounting: the average leg carries exp(-(r-q)T - lambda(rho-1)T)
// and the strike leg exp(-rT).  With use_control_variate set and an
// arithmetic contract, the pathwise geometric payoff acts as control
// with its closed-form (consistent-mode) value as the anchor.
inline McEstimate mc_price(const ModelParams& model, const OptionContract& contract,
                           const McConfig& config, unsigned n_threads = 1) {
  contract.validate();
  const detail::PathGenContext ctx =
      detail::make_context(model, contract.maturity, config);

  const double t = contract.maturity;
  const double rho = jump_moment_rho(model.mu_j, model.sigma_j);
  const double avg_discount =
      std::exp(-(model.r - model.q) * t - model.lambda * (rho - 1.0) * t);
  const double strike_leg = contract.strike * std::exp(-model.r * t);
  const double m_power = static_cast<double>(contract.power);
  const bool is_call = contract.kind == OptionKind::call;

  const bool control = config.use_control_variate &&
                       contract.averaging == Averaging::arithmetic;
  double control_mean = 0.0;
  if (control) {
    OptionContract geometric_leg = contract;
    geometric_leg.averaging = Averaging::geometric;
    geometric_leg.fidelity = Fidelity::consistent;
    control_mean = price_geometric_power(model, geometric_leg).price;
  }

  const std::size_t n_blocks =
      (config.n_paths + detail::kBlockPaths - 1) / detail::kBlockPaths;
  struct BlockStats {
    double sum = 0.0;
    double sum_sq = 0.0;
  };
  std::vector<BlockStats> stats(n_blocks);

  auto payoff_of = [&](double average) {
    const double diff = avg_discount * std::pow(average, m_power) - strike_leg;
    return is_call ? std::max(diff, 0.0) : std::max(-diff, 0.0);
  };

  auto worker = [&](unsigned tid) {
    Eigen::MatrixXd log_spot(static_cast<Eigen::Index>(config.n_steps + 1),
                             static_cast<Eigen::Index>(detail::kBlockPaths));
    std::vector<int> jumps(detail::kBlockPaths);
    for (std::size_t b = tid; b < n_blocks; b += n_threads) {
      const std::size_t first = b * detail::kBlockPaths;
      const auto n_block = static_cast<Eigen::Index>(
          std::min(detail::kBlockPaths, config.n_paths - first));
      detail::generate_block(ctx, b, n_block, log_spot, jumps.data());
      KahanSum sum, sum_sq;
      for (Eigen::Index p = 0; p < n_block; ++p) {
        const detail::PathAverages avg = detail::path_averages(log_spot, p);
        double y = payoff_of(contract.averaging == Averaging::geometric
                                 ? avg.geometric
                                 : avg.arithmetic);
        if (control) {
          const double diff = avg_discount * std::pow(avg.geometric, m_power) - strike_leg;
          y -= is_call ? std::max(diff, 0.0) : std::max(-diff, 0.0);
        }
        sum.add(y);
        sum_sq.add(y * y);
      }
      stats[b] = {sum.total, sum_sq.total};
    }
  };

  if (n_threads <= 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned tid = 0; tid < n_threads; ++tid) pool.emplace_back(worker, tid);
    for (std::thread& th : pool) th.join();
  }

  // Merge in block order, independent of which worker ran which block.
  KahanSum sum, sum_sq;
  for (const BlockStats& s : stats) {
    sum.add(s.sum);
    sum_sq.add(s.sum_sq);
  }
  const auto n = static_cast<double>(config.n_paths);
  const double mean = sum.total / n;
  double variance = 0.0;
  if (config.n_paths > 1) {
    variance = std::max(0.0, (sum_sq.total - n * mean * mean) / (n - 1.0));
  }

  McEstimate est;
  est.mean = mean + (control ? control_mean : 0.0);
  est.std_error = std::sqrt(variance / n);
  est.n_effective = config.n_paths;
  est.seed = config.seed;
  return est;
}

// Samples the conditional Gaussian law of L(T) per jump count and
// Poisson-mixes the per-count payoff means.  Its expectation equals the
// consistent-mode closed form (truncation tail aside), which is what
// makes it an algebra oracle rather than a model oracle.
inline McEstimate conditional_lognormal_oracle(const ModelParams& model,
                                               const OptionContract& contract,
                                               std::size_t n_samples,
                                               std::uint64_t seed,
                                               const TruncationPolicy& policy = {}) {
  model.validate();
  contract.validate();
  if (n_samples < 1) {
    throw std::invalid_argument("conditional_lognormal_oracle: n_samples must be >= 1");
  }

  const double t = contract.maturity;
  const double rho = jump_moment_rho(model.mu_j, model.sigma_j);
  const double avg_discount =
      std::exp(-(model.r - model.q) * t - model.lambda * (rho - 1.0) * t);
  const double r_discount = std::exp(-model.r * t);
  const double m_power = static_cast<double>(contract.power);
  const bool is_call = contract.kind == OptionKind::call;
  const PoissonWeights weights = poisson_weights(model.lambda * t, policy);

  double mixed_mean = 0.0;
  double mixed_var = 0.0;
  for (std::size_t i = 0; i < weights.w.size(); ++i) {
    const int n = static_cast<int>(i);
    const TermParams tp = derive_term_params(model, contract, n);
    const double strike_leg = tp.k_prime * r_discount;
    const double sigma_hat = std::sqrt(tp.sigma_hat_sq);

    auto payoff = [&](double log_avg) {
      const double diff = avg_discount * std::exp(m_power * log_avg) - strike_leg;
      return is_call ? std::max(diff, 0.0) : std::max(-diff, 0.0);
    };

    if (sigma_hat == 0.0) {
      mixed_mean += weights.w[i] * payoff(tp.mu_hat);
      continue;
    }

    auto rng = make_stream(seed, StreamPurpose::conditional, static_cast<std::uint64_t>(n));
    std::normal_distribution<double> normal;
    KahanSum sum, sum_sq;
    for (std::size_t s = 0; s < n_samples; ++s) {
      const double y = payoff(tp.mu_hat + sigma_hat * normal(rng));
      sum.add(y);
      sum_sq.add(y * y);
    }
    const auto ns = static_cast<double>(n_samples);
    const double mean_n = sum.total / ns;
    double var_n = 0.0;
    if (n_samples > 1) {
      var_n = std::max(0.0, (sum_sq.total - ns * mean_n * mean_n) / (ns - 1.0));
    }
    mixed_mean += weights.w[i] * mean_n;
    mixed_var += weights.w[i] * weights.w[i] * var_n / ns;
  }

  McEstimate est;
  est.mean = mixed_mean;
  est.std_error = std::sqrt(mixed_var);
  est.n_effective = n_samples;
  est.seed = seed;
  return est;
}

}  // namespace mfbm
