#pragma once

#include <cstdint>

#include "pedagogue/exact_posterior.hpp"
#include "pedagogue/phoneme_data.hpp"
#include "pedagogue/rng.hpp"

namespace pedagogue {

// Defaults follow a 10-chain / 500 burn-in / keep-every-20th / 1000-samples
// schedule (10,000 kept datasets of k points each).
struct ChainSchedule {
  int chains = 10;
  int burn_in = 500;
  int thin = 20;
  int samples_per_chain = 1000;
  double proposal_sd = 40.0;  // Hz; interpreted as variance when noise_is_variance
  bool autotune = true;
  std::uint64_t seed = 0;

  double target_accept = 0.23;
  int pilot_iters = 1500;
  bool noise_is_variance = false;   // sensitivity flag: proposal_sd is a variance in Hz^2
  bool single_point_update = false; // perturb one point per step instead of all k
  int threads = 0;                  // 0 = hardware concurrency

  void validate() const;
};

// One kept state of the sampler: row i is the teaching example for phoneme i.
struct TeachingSample {
  int chain_id = 0;
  long iteration = 0;
  Mat points;  // k x d, Hz
};

struct ChainDiagnostics {
  double acceptance_rate = 0.0;
  double final_proposal_sd = 0.0;
  std::vector<double> score_trace;  // per kept sample
  std::uint64_t accepted = 0;
  std::uint64_t iterations = 0;
  std::uint64_t seed = 0;
  double wall_ms = 0.0;
  int score_failures = 0;  // proposals rejected because the score was not computable
};

struct TeachingRun {
  std::vector<TeachingSample> samples;      // ordered by (chain_id, iteration)
  std::vector<ChainDiagnostics> diagnostics;  // one per chain
};

// Initial state: each of the k rows drawn from N(mu0, lambda0 / kappa0).
Mat init_state(const CategoryModel& model, Rng& rng);

// Symmetric random-walk proposal: i.i.d. N(0, sd^2) noise added to every
// coordinate of every point.
Mat propose(const Mat& X, double sd, Rng& rng);

struct MhStep {
  Mat state;
  double score = 0.0;
  bool accepted = false;
  double acceptance_prob = 0.0;  // min(1, exp(score' - score)), used by the tuner
};

// One Metropolis step. score_x must equal scorer.score(x). A score that fails
// numerically (non-positive-definite scatter) is treated as -inf and the
// proposal rejected; failures are counted, never thrown.
MhStep mh_step(const Mat& x, double score_x, const TeachingScorer& scorer, double sd, Rng& rng,
               int* failure_count = nullptr);
MhStep mh_step(const Mat& x, double score_x, const TeachingTarget& target,
               const NiwParams& prior, double alpha, double sd, Rng& rng);

// Robbins-Monro adjustment of log(sd) toward the target acceptance rate over
// a pilot run; returns the fixed sd to use for production sampling. Throws
// TuningFailed when no 100-step window ever reaches target +/- 0.15.
// sd_trace, when given, receives the sd after every pilot step.
double autotune_sd(const CategoryModel& model, double target_rate, int pilot_iters, Rng& rng,
                   double sd0 = 40.0, std::vector<double>* sd_trace = nullptr);

// Runs schedule.chains independent chains (concurrently when threads allow),
// keeping every thin-th state after burn-in until samples_per_chain are
// collected. Chain c draws its pilot stream from substream 2c and its
// production stream from substream 2c+1 of the master seed, so the result is
// reproducible for any thread count.
TeachingRun run_chains(const CategoryModel& model, const ChainSchedule& schedule);

}  // namespace pedagogue
