#include "pedagogue/bayes.hpp"

#include <algorithm>
#include <numbers>

namespace pedagogue {

namespace {
constexpr double kLogPi = 1.1447298858494001741;  // log(pi)
constexpr double kLog2Pi = 1.8378770664093454836; // log(2*pi)
}  // namespace

double log_sum_exp(std::span<const double> values) {
  LogSumExpAcc acc;
  for (double v : values) acc.add(v);
  return acc.value();
}

double log_mvgamma(int d, double a) {
  double r = 0.25 * d * (d - 1) * kLogPi;
  for (int j = 1; j <= d; ++j) r += std::lgamma(a + 0.5 * (1 - j));
  return r;
}

CholFactor cholesky(const Mat& cov) {
  Eigen::LLT<Mat> llt(cov);
  Mat m = cov;
  if (llt.info() != Eigen::Success) {
    // one retry with diagonal jitter scaled to the matrix
    double jitter = 1e-8 * cov.trace() / cov.rows();
    if (!(jitter > 0)) jitter = 1e-12;
    m.diagonal().array() += jitter;
    llt.compute(m);
    if (llt.info() != Eigen::Success)
      throw NonPositiveDefiniteCovariance("matrix is not positive definite (jitter retry failed)");
  }
  CholFactor f;
  f.lower = llt.matrixL();
  f.logdet = 2.0 * f.lower.diagonal().array().log().sum();
  return f;
}

int Partition::num_blocks() const {
  int k = 0;
  for (int z : assignment) k = std::max(k, z + 1);
  return k;
}

std::vector<int> Partition::block_sizes() const {
  std::vector<int> sizes(num_blocks(), 0);
  for (int z : assignment) ++sizes[z];
  return sizes;
}

bool Partition::is_canonical() const {
  int seen = 0;
  for (int z : assignment) {
    if (z < 0 || z > seen) return false;
    if (z == seen) ++seen;
  }
  return true;
}

Partition Partition::from_labels(std::span<const int> labels) {
  Partition p;
  p.assignment.reserve(labels.size());
  std::vector<std::pair<int, int>> remap;  // (original label, canonical id)
  for (int lab : labels) {
    auto it = std::find_if(remap.begin(), remap.end(),
                           [lab](const auto& kv) { return kv.first == lab; });
    if (it == remap.end()) {
      remap.emplace_back(lab, static_cast<int>(remap.size()));
      p.assignment.push_back(remap.back().second);
    } else {
      p.assignment.push_back(it->second);
    }
  }
  return p;
}

Partition Partition::identity(int n) {
  Partition p;
  p.assignment.resize(n);
  for (int i = 0; i < n; ++i) p.assignment[i] = i;
  return p;
}

Partition Partition::single_block(int n) {
  Partition p;
  p.assignment.assign(n, 0);
  return p;
}

void NiwParams::validate() const {
  const int d = dim();
  if (d < 1) throw DimensionMismatch("NIW prior has empty mean");
  if (lambda0.rows() != d || lambda0.cols() != d)
    throw DimensionMismatch("NIW scale matrix does not match mean dimension");
  if (!(kappa0 > 0)) throw NumericError("NIW kappa0 must be positive");
  if (!(nu0 > d - 1)) throw NumericError("NIW nu0 must exceed d-1");
  cholesky(lambda0);
}

double mvn_logpdf(const Vec& x, const Vec& mean, const Mat& cov) {
  if (x.size() != mean.size() || cov.rows() != x.size() || cov.cols() != x.size())
    throw DimensionMismatch("mvn_logpdf: inconsistent dimensions");
  return mvn_logpdf(x, mean, cholesky(cov));
}

double mvn_logpdf(const Vec& x, const Vec& mean, const CholFactor& chol) {
  const double d = static_cast<double>(x.size());
  return -0.5 * (d * kLog2Pi + chol.logdet + chol.quad_form(x - mean));
}

double gmm_loglik(const Mat& X, const Partition& partition,
                  const std::vector<std::pair<Vec, Mat>>& components) {
  const int n = static_cast<int>(X.rows());
  if (partition.n() != n) throw DimensionMismatch("gmm_loglik: partition size != row count");
  if (static_cast<int>(components.size()) < partition.num_blocks())
    throw DimensionMismatch("gmm_loglik: fewer components than blocks");
  std::vector<CholFactor> chols;
  chols.reserve(components.size());
  for (const auto& [mean, cov] : components) {
    if (mean.size() != X.cols() || cov.rows() != X.cols())
      throw DimensionMismatch("gmm_loglik: component dimension != data dimension");
    chols.push_back(cholesky(cov));
  }
  double ll = 0.0;
  for (int i = 0; i < n; ++i) {
    int j = partition.assignment[i];
    ll += mvn_logpdf(X.row(i).transpose(), components[j].first, chols[j]);
  }
  return ll;
}

NiwParams niw_posterior(const NiwParams& prior, const Mat& X) {
  const int m = static_cast<int>(X.rows());
  if (m == 0) return prior;
  if (X.cols() != prior.dim())
    throw DimensionMismatch("niw_posterior: data dimension != prior dimension");
  Vec xbar = X.colwise().mean();
  // centered two-pass scatter for stability
  Mat centered = X.rowwise() - xbar.transpose();
  Mat scatter = centered.transpose() * centered;

  NiwParams post;
  post.kappa0 = prior.kappa0 + m;
  post.nu0 = prior.nu0 + m;
  post.mu0 = (prior.kappa0 * prior.mu0 + m * xbar) / post.kappa0;
  Vec dm = xbar - prior.mu0;
  post.lambda0 =
      prior.lambda0 + scatter + (prior.kappa0 * m / post.kappa0) * (dm * dm.transpose());
  return post;
}

NiwParams niw_posterior_from_stats(const NiwParams& prior, int count, const Vec& sum,
                                   const Mat& outer) {
  if (count == 0) return prior;
  NiwParams post;
  post.kappa0 = prior.kappa0 + count;
  post.nu0 = prior.nu0 + count;
  Vec xbar = sum / count;
  post.mu0 = (prior.kappa0 * prior.mu0 + sum) / post.kappa0;
  Mat scatter = outer - (sum * sum.transpose()) / count;
  Vec dm = xbar - prior.mu0;
  post.lambda0 =
      prior.lambda0 + scatter + (prior.kappa0 * count / post.kappa0) * (dm * dm.transpose());
  return post;
}

namespace {

// log p(X) = -(m d / 2) log pi + log Gamma_d(nu_m/2) - log Gamma_d(nu_0/2)
//          + (nu_0/2) log|L_0| - (nu_m/2) log|L_m| + (d/2)(log k_0 - log k_m)
double log_marginal_impl(const NiwParams& prior, const NiwParams& post, int m) {
  if (m == 0) return 0.0;
  const int d = prior.dim();
  double logdet0 = cholesky(prior.lambda0).logdet;
  double logdetm = cholesky(post.lambda0).logdet;
  return -0.5 * m * d * kLogPi + log_mvgamma(d, 0.5 * post.nu0) -
         log_mvgamma(d, 0.5 * prior.nu0) + 0.5 * prior.nu0 * logdet0 -
         0.5 * post.nu0 * logdetm + 0.5 * d * (std::log(prior.kappa0) - std::log(post.kappa0));
}

}  // namespace

double log_marginal(const Mat& X, const NiwParams& prior) {
  const int m = static_cast<int>(X.rows());
  if (m == 0) return 0.0;
  return log_marginal_impl(prior, niw_posterior(prior, X), m);
}

double log_marginal_from_stats(const NiwParams& prior, int count, const Vec& sum,
                               const Mat& outer) {
  if (count == 0) return 0.0;
  return log_marginal_impl(prior, niw_posterior_from_stats(prior, count, sum, outer), count);
}

StudentT niw_predictive(const NiwParams& params) {
  const int d = params.dim();
  StudentT t;
  t.dof = params.nu0 - d + 1;
  if (!(t.dof > 0)) throw NumericError("niw_predictive: nonpositive degrees of freedom");
  t.mean = params.mu0;
  Mat scale = params.lambda0 * ((params.kappa0 + 1.0) / (params.kappa0 * t.dof));
  t.scale_chol = cholesky(scale);
  t.log_norm = std::lgamma(0.5 * (t.dof + d)) - std::lgamma(0.5 * t.dof) -
               0.5 * d * std::log(t.dof * std::numbers::pi) - 0.5 * t.scale_chol.logdet;
  return t;
}

double crp_log_prob(const Partition& partition, double alpha) {
  if (!(alpha > 0)) throw NumericError("crp_log_prob: alpha must be positive");
  const int n = partition.n();
  if (n == 0) return 0.0;
  auto sizes = partition.block_sizes();
  double lp = sizes.size() * std::log(alpha);
  for (int nj : sizes) lp += std::lgamma(static_cast<double>(nj));
  for (int i = 0; i < n; ++i) lp -= std::log(alpha + i);
  return lp;
}

}  // namespace pedagogue
