#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <span>
#include <vector>

#include "pedagogue/errors.hpp"

namespace pedagogue {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// ---------------------------------------------------------------------------
// Log-space helpers. All probability arithmetic in this library is done in
// natural logs; sums of probabilities go through log-sum-exp.
// ---------------------------------------------------------------------------

inline double log_sum_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

double log_sum_exp(std::span<const double> values);

// Streaming log-sum-exp accumulator (single pass, rescales on a new max).
class LogSumExpAcc {
 public:
  void add(double logv) {
    if (logv == -std::numeric_limits<double>::infinity()) return;
    if (logv <= max_) {
      sum_ += std::exp(logv - max_);
    } else {
      sum_ = sum_ * std::exp(max_ - logv) + 1.0;
      max_ = logv;
    }
  }
  double value() const {
    if (sum_ == 0.0) return -std::numeric_limits<double>::infinity();
    return max_ + std::log(sum_);
  }

 private:
  double max_ = -std::numeric_limits<double>::infinity();
  double sum_ = 0.0;
};

// log of the multivariate gamma function Gamma_d(a).
double log_mvgamma(int d, double a);

// ---------------------------------------------------------------------------
// Cholesky with one jitter retry. Metropolis proposals can momentarily
// produce near-singular scatter matrices; a single diagonal bump of
// 1e-8 * trace/d is attempted before giving up.
// ---------------------------------------------------------------------------

struct CholFactor {
  Mat lower;      // L with cov = L L^T
  double logdet;  // log |cov|

  // Solves L y = x in place of a temporary and returns |y|^2, the Mahalanobis
  // quadratic form x^T cov^-1 x.
  double quad_form(const Vec& x) const {
    Vec y = lower.triangularView<Eigen::Lower>().solve(x);
    return y.squaredNorm();
  }
};

CholFactor cholesky(const Mat& cov);

// ---------------------------------------------------------------------------
// Partitions. Canonical form: block 0 appears first, block j+1 first appears
// after block j, indices contiguous from 0.
// ---------------------------------------------------------------------------

struct Partition {
  std::vector<int> assignment;

  int n() const { return static_cast<int>(assignment.size()); }
  int num_blocks() const;
  std::vector<int> block_sizes() const;
  bool is_canonical() const;

  // Relabels arbitrary integer labels into canonical form.
  static Partition from_labels(std::span<const int> labels);
  // The all-distinct partition [0, 1, ..., n-1].
  static Partition identity(int n);
  // The one-block partition [0, 0, ..., 0].
  static Partition single_block(int n);

  bool operator==(const Partition& other) const { return assignment == other.assignment; }
};

// ---------------------------------------------------------------------------
// Normal-Inverse-Wishart conjugate family.
// ---------------------------------------------------------------------------

struct NiwParams {
  Vec mu0;
  double kappa0 = 1.0;
  double nu0 = 1.0;
  Mat lambda0;

  int dim() const { return static_cast<int>(mu0.size()); }
  // Throws if kappa0 <= 0, nu0 <= d-1, or lambda0 is not SPD.
  void validate() const;
};

// Log density of a multivariate normal. Exact via Cholesky; stays finite for
// log densities down to -700 and beyond since no exp is ever taken.
double mvn_logpdf(const Vec& x, const Vec& mean, const Mat& cov);

// Same, with a precomputed factor of cov (hot paths).
double mvn_logpdf(const Vec& x, const Vec& mean, const CholFactor& chol);

// Joint log likelihood of X under fixed components with explicit assignment:
// sum_i log N(x_i | components[z_i]).
double gmm_loglik(const Mat& X, const Partition& partition,
                  const std::vector<std::pair<Vec, Mat>>& components);

// Conjugate posterior after observing the rows of X (m >= 0; m = 0 returns
// the prior unchanged).
NiwParams niw_posterior(const NiwParams& prior, const Mat& X);

// Posterior from sufficient statistics (count, sum of rows, sum of outer
// products). Used by the collapsed samplers so blocks never rescan points.
NiwParams niw_posterior_from_stats(const NiwParams& prior, int count, const Vec& sum,
                                   const Mat& outer);

// Log marginal likelihood of the rows of X under the NIW prior
// (ratio-of-normalizers closed form). log_marginal(empty) = 0.
double log_marginal(const Mat& X, const NiwParams& prior);
double log_marginal_from_stats(const NiwParams& prior, int count, const Vec& sum,
                               const Mat& outer);

// Posterior-predictive (multivariate Student-t) induced by NIW parameters.
// Pass the prior for the prior predictive or a posterior for the collapsed
// predictive of an occupied block.
struct StudentT {
  Vec mean;
  CholFactor scale_chol;
  double dof = 1.0;
  double log_norm = 0.0;

  double logpdf(const Vec& x) const {
    double q = scale_chol.quad_form(x - mean);
    return log_norm - 0.5 * (dof + mean.size()) * std::log1p(q / dof);
  }
};

StudentT niw_predictive(const NiwParams& params);

// Chinese Restaurant Process log probability of a canonical partition:
// log[ alpha^k * prod_j (n_j - 1)! / prod_{i=0}^{n-1} (alpha + i) ].
double crp_log_prob(const Partition& partition, double alpha);

}  // namespace pedagogue
