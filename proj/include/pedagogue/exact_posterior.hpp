#pragma once

#include <cstdint>
#include <functional>

#include "pedagogue/bayes.hpp"
#include "pedagogue/phoneme_data.hpp"

namespace pedagogue {

inline constexpr int kSubsetHardCap = 20;     // 2^n table entries
inline constexpr int kSubsetPracticalCap = 13;  // enumeration stays tractable

// Log marginal likelihood of every subset of the rows of X, indexed by
// bitmask. values[0] = 0 by convention.
struct SubsetMarginalTable {
  int n = 0;
  std::vector<double> logm;

  double operator[](std::uint32_t mask) const { return logm[mask]; }
};

// n <= 20 (throws SubsetLimitExceeded beyond; warns on stderr past 13).
SubsetMarginalTable build_subset_table(const Mat& X, const NiwParams& prior);

// log P(X | prior, alpha): the sum over all set partitions of
// P(Z|alpha) * prod_j m(block_j), computed by the subset recursion
//   g(empty) = 1
//   g(S) = sum_{B subset of S, min(S) in B} alpha (|B|-1)! m(B) g(S \ B)
// followed by division by prod_{i=0}^{n-1}(alpha + i). Every partition is
// visited exactly once through the block containing min(S).
double log_evidence(const Mat& X, const NiwParams& prior, double alpha);
double log_evidence(const SubsetMarginalTable& table, double alpha);

// Same, reporting how many (S, B) recursion terms were evaluated.
double log_evidence_counted(const SubsetMarginalTable& table, double alpha,
                            std::uint64_t* terms);

// Visits every set partition of {0..n-1} exactly once, in canonical form
// (restricted-growth-string order). n <= 13. The Partition reference is
// reused between calls; copy it if you keep it.
void enumerate_partitions(int n, const std::function<void(const Partition&)>& visit);

// Bell numbers B_0..B_25 (number of set partitions).
std::uint64_t bell_number(int n);

// The concept a teacher wants to convey: the k true components and the
// all-distinct assignment pairing teaching point i with component i.
struct TeachingTarget {
  std::vector<std::pair<Vec, Mat>> components;
  Partition target_partition;

  int k() const { return static_cast<int>(components.size()); }
  int dim() const { return components.empty() ? 0 : static_cast<int>(components[0].first.size()); }
};

TeachingTarget make_teaching_target(const CategoryModel& model);

// log of the teaching density of X up to X-independent constants:
//   log P(X | theta, Z_target) - log P(X | prior, alpha).
// The CRP and NIW prior-density factors of the full posterior numerator do
// not depend on X and are omitted; only score differences are meaningful.
double teaching_log_score(const Mat& X, const TeachingTarget& target, const NiwParams& prior,
                          double alpha);

// Caches component Cholesky factors and prior tables so the Metropolis
// sampler can evaluate thousands of scores per second. Thread-safe for
// concurrent score() calls.
class TeachingScorer {
 public:
  TeachingScorer(TeachingTarget target, NiwParams prior, double alpha);
  explicit TeachingScorer(const CategoryModel& model);

  double score(const Mat& X) const;
  double log_likelihood(const Mat& X) const;
  double log_evidence_of(const Mat& X) const;

  const TeachingTarget& target() const { return target_; }
  const NiwParams& prior() const { return prior_; }
  double alpha() const { return alpha_; }

 private:
  TeachingTarget target_;
  NiwParams prior_;
  double alpha_;
  std::vector<CholFactor> component_chol_;
  CholFactor prior_chol_;
  double prior_logdet_ = 0.0;
  std::vector<double> lgamma_half_nu_;  // log Gamma_d((nu0 + m)/2), m = 0..k
  std::vector<double> log_factorial_;   // log m!, m = 0..k
  double crp_log_denominator_ = 0.0;    // sum_i log(alpha + i)
};

}  // namespace pedagogue
