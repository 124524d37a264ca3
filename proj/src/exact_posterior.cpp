#include "pedagogue/exact_posterior.hpp"

#include <bit>
#include <iostream>

namespace pedagogue {

namespace {

constexpr double kLogPi = 1.1447298858494001741;

// Fills logm[mask] = log marginal of the points selected by mask, for every
// mask in [0, 2^n). lgamma_half_nu[m] must hold log Gamma_d((nu0+m)/2).
void fill_subset_marginals(const Mat& X, const NiwParams& prior, double prior_logdet,
                           std::span<const double> lgamma_half_nu, std::vector<double>& logm) {
  const int n = static_cast<int>(X.rows());
  const int d = prior.dim();
  logm.assign(std::size_t{1} << n, 0.0);
  Vec sum(d), xbar(d), dm(d);
  Mat outer(d, d), lambda_m(d, d);
  for (std::uint32_t mask = 1; mask < logm.size(); ++mask) {
    sum.setZero();
    outer.setZero();
    for (std::uint32_t bits = mask; bits != 0; bits &= bits - 1) {
      int i = std::countr_zero(bits);
      sum += X.row(i).transpose();
      outer.noalias() += X.row(i).transpose() * X.row(i);
    }
    const int m = std::popcount(mask);
    xbar = sum / m;
    dm = xbar - prior.mu0;
    const double kappa_m = prior.kappa0 + m;
    const double nu_m = prior.nu0 + m;
    lambda_m = prior.lambda0 + outer - (sum * sum.transpose()) / m +
               (prior.kappa0 * m / kappa_m) * (dm * dm.transpose());
    const double logdet_m = cholesky(lambda_m).logdet;
    logm[mask] = -0.5 * m * d * kLogPi + lgamma_half_nu[m] - lgamma_half_nu[0] +
                 0.5 * prior.nu0 * prior_logdet - 0.5 * nu_m * logdet_m +
                 0.5 * d * (std::log(prior.kappa0) - std::log(kappa_m));
  }
}

// g(S) pass over a filled subset table. Returns log g(full) minus the CRP
// denominator. log_factorial[m] must hold log m!.
double evidence_from_marginals(std::span<const double> logm, int n, double alpha,
                               std::span<const double> log_factorial, double crp_denominator,
                               std::uint64_t* terms) {
  const double log_alpha = std::log(alpha);
  std::vector<double> logg(logm.size());
  logg[0] = 0.0;
  std::uint64_t count = 0;
  for (std::uint32_t s = 1; s < logm.size(); ++s) {
    const std::uint32_t low = s & ~(s - 1);  // lowest set bit: every block of the
    const std::uint32_t rest = s ^ low;      // partition containing min(S) is visited once
    LogSumExpAcc acc;
    std::uint32_t sub = rest;
    for (;;) {
      const std::uint32_t block = low | sub;
      acc.add(log_alpha + log_factorial[std::popcount(block) - 1] + logm[block] +
              logg[s ^ block]);
      ++count;
      if (sub == 0) break;
      sub = (sub - 1) & rest;
    }
    logg[s] = acc.value();
  }
  if (terms) *terms = count;
  return logg.back() - crp_denominator;
}

}  // namespace

SubsetMarginalTable build_subset_table(const Mat& X, const NiwParams& prior) {
  const int n = static_cast<int>(X.rows());
  if (n > kSubsetHardCap)
    throw SubsetLimitExceeded("subset table limited to n <= 20, got n = " + std::to_string(n));
  if (X.cols() != prior.dim())
    throw DimensionMismatch("build_subset_table: data dim != prior dim");
  if (n > kSubsetPracticalCap)
    std::cerr << "[pedagogue] warning: exact evidence with n = " << n
              << " points (practical limit is 13); expect long runtimes\n";

  SubsetMarginalTable table;
  table.n = n;
  std::vector<double> lgam(n + 1);
  for (int m = 0; m <= n; ++m) lgam[m] = log_mvgamma(prior.dim(), 0.5 * (prior.nu0 + m));
  fill_subset_marginals(X, prior, cholesky(prior.lambda0).logdet, lgam, table.logm);
  return table;
}

double log_evidence_counted(const SubsetMarginalTable& table, double alpha,
                            std::uint64_t* terms) {
  if (!(alpha > 0)) throw NumericError("log_evidence: alpha must be positive");
  const int n = table.n;
  if (n == 0) return 0.0;
  std::vector<double> lfact(n + 1, 0.0);
  for (int m = 1; m <= n; ++m) lfact[m] = lfact[m - 1] + std::log(static_cast<double>(m));
  double denom = 0.0;
  for (int i = 0; i < n; ++i) denom += std::log(alpha + i);
  return evidence_from_marginals(table.logm, n, alpha, lfact, denom, terms);
}

double log_evidence(const SubsetMarginalTable& table, double alpha) {
  return log_evidence_counted(table, alpha, nullptr);
}

double log_evidence(const Mat& X, const NiwParams& prior, double alpha) {
  return log_evidence(build_subset_table(X, prior), alpha);
}

void enumerate_partitions(int n, const std::function<void(const Partition&)>& visit) {
  if (n > kSubsetPracticalCap)
    throw SubsetLimitExceeded("partition enumeration limited to n <= 13, got n = " +
                              std::to_string(n));
  if (n <= 0) return;
  // restricted growth strings: a[0] = 0, a[i] <= 1 + max(a[0..i-1])
  Partition p;
  p.assignment.assign(n, 0);
  std::vector<int> maxima(n, 0);
  for (;;) {
    visit(p);
    int i = n - 1;
    while (i > 0 && p.assignment[i] == maxima[i - 1] + 1) --i;
    if (i == 0) return;
    ++p.assignment[i];
    maxima[i] = std::max(maxima[i - 1], p.assignment[i]);
    for (int j = i + 1; j < n; ++j) {
      p.assignment[j] = 0;
      maxima[j] = maxima[i];
    }
  }
}

std::uint64_t bell_number(int n) {
  if (n < 0 || n > 25) throw SubsetLimitExceeded("bell_number supports 0 <= n <= 25");
  std::vector<std::uint64_t> row{1};
  for (int i = 1; i <= n; ++i) {
    std::vector<std::uint64_t> next;
    next.reserve(row.size() + 1);
    next.push_back(row.back());
    for (std::uint64_t v : row) next.push_back(next.back() + v);
    row = std::move(next);
  }
  return row.front();
}

TeachingTarget make_teaching_target(const CategoryModel& model) {
  TeachingTarget t;
  t.components.reserve(model.size());
  for (const auto& p : model.phonemes) t.components.emplace_back(p.mean, p.cov);
  t.target_partition = Partition::identity(model.size());
  return t;
}

double teaching_log_score(const Mat& X, const TeachingTarget& target, const NiwParams& prior,
                          double alpha) {
  TeachingScorer scorer(target, prior, alpha);
  return scorer.score(X);
}

TeachingScorer::TeachingScorer(TeachingTarget target, NiwParams prior, double alpha)
    : target_(std::move(target)), prior_(std::move(prior)), alpha_(alpha) {
  const int k = target_.k();
  const int d = prior_.dim();
  if (k < 1) throw DataError("teaching target has no components");
  if (k > kSubsetHardCap)
    throw SubsetLimitExceeded("teaching score limited to k <= 20 components");
  if (target_.dim() != d)
    throw DimensionMismatch("teaching target dimension != prior dimension");
  if (!(alpha_ > 0)) throw NumericError("teaching score: alpha must be positive");
  prior_.validate();
  component_chol_.reserve(k);
  for (const auto& [mean, cov] : target_.components) {
    if (static_cast<int>(mean.size()) != d)
      throw DimensionMismatch("teaching component dimension mismatch");
    component_chol_.push_back(cholesky(cov));
  }
  prior_chol_ = cholesky(prior_.lambda0);
  prior_logdet_ = prior_chol_.logdet;
  lgamma_half_nu_.resize(k + 1);
  for (int m = 0; m <= k; ++m) lgamma_half_nu_[m] = log_mvgamma(d, 0.5 * (prior_.nu0 + m));
  log_factorial_.assign(k + 1, 0.0);
  for (int m = 1; m <= k; ++m)
    log_factorial_[m] = log_factorial_[m - 1] + std::log(static_cast<double>(m));
  crp_log_denominator_ = 0.0;
  for (int i = 0; i < k; ++i) crp_log_denominator_ += std::log(alpha_ + i);
}

TeachingScorer::TeachingScorer(const CategoryModel& model)
    : TeachingScorer(make_teaching_target(model), model.prior, model.alpha) {}

double TeachingScorer::log_likelihood(const Mat& X) const {
  const int k = target_.k();
  if (X.rows() != k || X.cols() != target_.dim())
    throw DimensionMismatch("teaching score: X must be k x d");
  double ll = 0.0;
  for (int j = 0; j < k; ++j)
    ll += mvn_logpdf(X.row(j).transpose(), target_.components[j].first, component_chol_[j]);
  return ll;
}

double TeachingScorer::log_evidence_of(const Mat& X) const {
  thread_local std::vector<double> logm;
  fill_subset_marginals(X, prior_, prior_logdet_, lgamma_half_nu_, logm);
  return evidence_from_marginals(logm, static_cast<int>(X.rows()), alpha_, log_factorial_,
                                 crp_log_denominator_, nullptr);
}

double TeachingScorer::score(const Mat& X) const {
  return log_likelihood(X) - log_evidence_of(X);
}

}  // namespace pedagogue
