#pragma once

// Exact fractional Brownian motion sampling on a time grid.
//
// Two generators with the same output law:
//  - FbmCholeskySampler factors the full level covariance matrix; exact
//    for any grid but O(M^2) work per path, so it is restricted to
//    moderate grids.
//  - CirculantFgnSampler embeds the stationary increment (fractional
//    Gaussian noise) covariance in a circulant matrix and samples via
//    FFT in O(M log M) per path pair; requires a uniform grid and a
//    non-negative embedding spectrum, which it checks up front.

#include <cmath>
#include <complex>
#include <cstddef>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

namespace mfbm {

// Standard fBm kernel: cov(B^H_t, B^H_s) = (t^{2H} + s^{2H} - |t-s|^{2H})/2.
// Consistent with the marginal law B^H_t ~ N(0, t^{2H}).
inline double fbm_covariance(double t, double s, double hurst) {
  if (!(t >= 0.0) || !(s >= 0.0)) {
    throw std::invalid_argument("fbm_covariance: times must be >= 0");
  }
  if (!(hurst > 0.0 && hurst < 1.0)) {
    throw std::invalid_argument("fbm_covariance: hurst must lie in (0,1)");
  }
  const double h2 = 2.0 * hurst;
  return 0.5 * (std::pow(t, h2) + std::pow(s, h2) - std::pow(std::abs(t - s), h2));
}

// Autocovariance of fractional Gaussian noise increments at spacing dt:
// gamma(k) = dt^{2H} (|k+1|^{2H} - 2|k|^{2H} + |k-1|^{2H}) / 2.
inline double fgn_autocovariance(std::size_t lag, double dt, double hurst) {
  const double h2 = 2.0 * hurst;
  const double k = static_cast<double>(lag);
  return 0.5 * std::pow(dt, h2) *
         (std::pow(k + 1.0, h2) - 2.0 * std::pow(k, h2) +
          std::pow(std::abs(k - 1.0), h2));
}

class FbmCholeskySampler {
 public:
  // `times` are the strictly positive grid points; t = 0 (where the
  // process is pinned at zero) is excluded.
  FbmCholeskySampler(const std::vector<double>& times, double hurst) {
    const auto m = static_cast<Eigen::Index>(times.size());
    if (m == 0) throw std::invalid_argument("FbmCholeskySampler: empty grid");
    Eigen::MatrixXd cov(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j <= i; ++j) {
        cov(i, j) = cov(j, i) = fbm_covariance(times[static_cast<std::size_t>(i)],
                                               times[static_cast<std::size_t>(j)], hurst);
      }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
      // High Hurst grids can lose positive definiteness to rounding; a
      // jitter at the noise floor of the diagonal restores it.
      const double jitter = 1e-12 * cov.diagonal().mean();
      cov.diagonal().array() += jitter;
      llt.compute(cov);
      if (llt.info() != Eigen::Success) {
        throw std::runtime_error(
            "FbmCholeskySampler: covariance matrix is not positive definite");
      }
    }
    chol_ = llt.matrixL();
  }

  Eigen::Index size() const { return chol_.rows(); }

  // Columns of the result are independent fBm paths on the grid.
  Eigen::MatrixXd sample_block(std::mt19937_64& rng, Eigen::Index n_paths) const {
    std::normal_distribution<double> normal;
    Eigen::MatrixXd z(chol_.rows(), n_paths);
    for (Eigen::Index p = 0; p < n_paths; ++p) {
      for (Eigen::Index i = 0; i < chol_.rows(); ++i) z(i, p) = normal(rng);
    }
    return chol_.triangularView<Eigen::Lower>() * z;
  }

 private:
  Eigen::MatrixXd chol_;
};

class CirculantFgnSampler {
 public:
  CirculantFgnSampler(std::size_t n_steps, double dt, double hurst)
      : m_(n_steps) {
    if (n_steps == 0) throw std::invalid_argument("CirculantFgnSampler: empty grid");
    std::size_t g = 1;
    while (g < 2 * n_steps) g <<= 1;
    g_ = g;

    // First row of the circulant embedding of the Toeplitz increment
    // covariance; its DFT gives the eigenvalues.
    std::vector<std::complex<double>> row(g);
    for (std::size_t j = 0; j <= g / 2; ++j) {
      row[j] = fgn_autocovariance(j, dt, hurst);
    }
    for (std::size_t j = g / 2 + 1; j < g; ++j) row[j] = row[g - j];

    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> spectrum(g);
    fft.fwd(spectrum, row);

    double max_eig = 0.0;
    double min_eig = 0.0;
    scaled_sqrt_eig_.resize(g);
    for (std::size_t k = 0; k < g; ++k) {
      const double eig = spectrum[k].real();
      max_eig = std::max(max_eig, eig);
      min_eig = std::min(min_eig, eig);
      scaled_sqrt_eig_[k] = std::sqrt(std::max(eig, 0.0) / static_cast<double>(g));
    }
    // Tiny negative eigenvalues are rounding noise and are clamped;
    // anything material means the embedding is invalid for this kernel.
    valid_ = min_eig >= -1e-10 * std::max(max_eig, 1.0);
  }

  bool valid() const { return valid_; }
  std::size_t embedding_size() const { return g_; }

  // Two independent fGn increment vectors per FFT: with circularly
  // symmetric complex coefficients the real and imaginary parts of the
  // transform are independent with the target covariance.
  void sample_pair(std::mt19937_64& rng, std::vector<double>& a,
                   std::vector<double>& b) const {
    if (!valid_) {
      throw std::runtime_error(
          "CirculantFgnSampler: embedding spectrum has negative eigenvalues");
    }
    std::normal_distribution<double> normal;
    std::vector<std::complex<double>> coeff(g_);
    for (std::size_t k = 0; k < g_; ++k) {
      coeff[k] = scaled_sqrt_eig_[k] * std::complex<double>(normal(rng), normal(rng));
    }
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> out(g_);
    fft.fwd(out, coeff);
    a.resize(m_);
    b.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      a[i] = out[i].real();
      b[i] = out[i].imag();
    }
  }

 private:
  std::size_t m_ = 0;
  std::size_t g_ = 0;
  std::vector<double> scaled_sqrt_eig_;
  bool valid_ = false;
};

}  // namespace mfbm
