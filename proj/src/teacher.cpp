#include "pedagogue/teacher.hpp"

#include <chrono>
#include <cmath>
#include <iostream>

#include "pedagogue/parallel.hpp"

namespace pedagogue {

void ChainSchedule::validate() const {
  if (chains < 1 || burn_in < 0 || thin < 1 || samples_per_chain < 1)
    throw DataError("chain schedule: chains/thin/samples must be >= 1, burn_in >= 0");
  if (!(proposal_sd > 0)) throw DataError("chain schedule: proposal_sd must be positive");
  if (!(target_accept > 0) || !(target_accept < 1))
    throw DataError("chain schedule: target acceptance must be in (0,1)");
  if (pilot_iters < 1) throw DataError("chain schedule: pilot_iters must be >= 1");
}

Mat init_state(const CategoryModel& model, Rng& rng) {
  const int k = model.size();
  const int d = model.dim;
  Mat scale = model.prior.lambda0 / model.prior.kappa0;
  CholFactor chol = cholesky(scale);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Mat X(k, d);
  for (int j = 0; j < k; ++j) {
    Vec z(d);
    for (int c = 0; c < d; ++c) z[c] = gauss(rng);
    X.row(j) = (model.prior.mu0 + chol.lower * z).transpose();
  }
  return X;
}

Mat propose(const Mat& X, double sd, Rng& rng) {
  if (!(sd > 0)) throw DataError("propose: sd must be positive");
  std::normal_distribution<double> gauss(0.0, sd);
  Mat Y = X;
  for (long j = 0; j < Y.rows(); ++j)
    for (long c = 0; c < Y.cols(); ++c) Y(j, c) += gauss(rng);
  return Y;
}

namespace {

Mat propose_single_point(const Mat& X, double sd, Rng& rng) {
  std::uniform_int_distribution<int> pick(0, static_cast<int>(X.rows()) - 1);
  std::normal_distribution<double> gauss(0.0, sd);
  Mat Y = X;
  int j = pick(rng);
  for (long c = 0; c < Y.cols(); ++c) Y(j, c) += gauss(rng);
  return Y;
}

MhStep mh_decide(Mat&& proposal, const Mat& x, double score_x, const TeachingScorer& scorer,
                 Rng& rng, int* failure_count) {
  double score_prop;
  bool failed = false;
  try {
    score_prop = scorer.score(proposal);
    if (std::isnan(score_prop)) failed = true;
  } catch (const NonPositiveDefiniteCovariance&) {
    failed = true;
  }
  MhStep step;
  if (failed) {
    if (failure_count) {
      if (*failure_count == 0)
        std::cerr << "[pedagogue] warning: teaching score failed on a proposal; rejecting\n";
      ++*failure_count;
    }
    step.state = x;
    step.score = score_x;
    step.accepted = false;
    step.acceptance_prob = 0.0;
    return step;
  }
  const double log_ratio = score_prop - score_x;
  step.acceptance_prob = std::min(1.0, std::exp(std::min(0.0, log_ratio)));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (log_ratio >= 0.0 || unit(rng) < std::exp(log_ratio)) {
    step.state = std::move(proposal);
    step.score = score_prop;
    step.accepted = true;
  } else {
    step.state = x;
    step.score = score_x;
    step.accepted = false;
  }
  return step;
}

}  // namespace

MhStep mh_step(const Mat& x, double score_x, const TeachingScorer& scorer, double sd, Rng& rng,
               int* failure_count) {
  return mh_decide(propose(x, sd, rng), x, score_x, scorer, rng, failure_count);
}

MhStep mh_step(const Mat& x, double score_x, const TeachingTarget& target,
               const NiwParams& prior, double alpha, double sd, Rng& rng) {
  TeachingScorer scorer(target, prior, alpha);
  return mh_step(x, score_x, scorer, sd, rng);
}

double autotune_sd(const CategoryModel& model, double target_rate, int pilot_iters, Rng& rng,
                   double sd0, std::vector<double>* sd_trace) {
  if (!(target_rate > 0) || !(target_rate < 1))
    throw DataError("autotune_sd: target rate must be in (0,1)");
  TeachingScorer scorer(model);
  Mat X = init_state(model, rng);
  double score = scorer.score(X);
  double log_sd = std::log(sd0);
  const double log_sd_min = std::log(1e-3);
  const double log_sd_max = std::log(1e7);

  constexpr int kWindow = 100;
  bool reached_band = false;
  double window_acc = 0.0;
  int window_n = 0;
  int failures = 0;

  for (int t = 1; t <= pilot_iters; ++t) {
    MhStep step = mh_step(X, score, scorer, std::exp(log_sd), rng, &failures);
    X = std::move(step.state);
    score = step.score;
    // decaying step size: fast enough to walk log(sd) across many decades,
    // slow enough to settle near the target
    const double gain = 2.0 / std::pow(static_cast<double>(t), 0.6);
    log_sd += gain * (step.acceptance_prob - target_rate);
    log_sd = std::clamp(log_sd, log_sd_min, log_sd_max);
    if (sd_trace) sd_trace->push_back(std::exp(log_sd));

    window_acc += step.accepted ? 1.0 : 0.0;
    if (++window_n == kWindow) {
      double rate = window_acc / kWindow;
      if (std::abs(rate - target_rate) <= 0.15) reached_band = true;
      window_acc = 0.0;
      window_n = 0;
    }
  }
  if (window_n > 0 && std::abs(window_acc / window_n - target_rate) <= 0.15)
    reached_band = true;
  if (!reached_band)
    throw TuningFailed("proposal tuning never reached target acceptance " +
                       std::to_string(target_rate) + " +/- 0.15 within " +
                       std::to_string(pilot_iters) + " pilot iterations");
  return std::exp(log_sd);
}

TeachingRun run_chains(const CategoryModel& model, const ChainSchedule& schedule) {
  schedule.validate();
  TeachingScorer scorer(model);
  TeachingRun run;
  const int chains = schedule.chains;
  run.diagnostics.resize(chains);
  std::vector<std::vector<TeachingSample>> per_chain(chains);

  parallel_for(chains, schedule.threads, [&](int c) {
    auto t0 = std::chrono::steady_clock::now();
    ChainDiagnostics diag;
    diag.seed = substream_seed(schedule.seed, 2 * c + 1);

    double sd = schedule.noise_is_variance ? std::sqrt(schedule.proposal_sd)
                                           : schedule.proposal_sd;
    if (schedule.autotune) {
      Rng pilot_rng = make_stream(schedule.seed, 2 * c);
      sd = autotune_sd(model, schedule.target_accept, schedule.pilot_iters, pilot_rng, sd);
    }
    diag.final_proposal_sd = sd;

    Rng rng(diag.seed);
    Mat X = init_state(model, rng);
    double score = scorer.score(X);
    int failures = 0;
    const long total_iters =
        schedule.burn_in + static_cast<long>(schedule.thin) * schedule.samples_per_chain;
    std::vector<TeachingSample>& kept = per_chain[c];
    kept.reserve(schedule.samples_per_chain);
    for (long iter = 1; iter <= total_iters; ++iter) {
      MhStep step = schedule.single_point_update
                        ? mh_decide(propose_single_point(X, sd, rng), X, score, scorer, rng,
                                    &failures)
                        : mh_step(X, score, scorer, sd, rng, &failures);
      X = std::move(step.state);
      score = step.score;
      if (step.accepted) ++diag.accepted;
      ++diag.iterations;
      if (iter > schedule.burn_in && (iter - schedule.burn_in) % schedule.thin == 0) {
        kept.push_back(TeachingSample{c, iter, X});
        diag.score_trace.push_back(score);
      }
    }
    diag.acceptance_rate =
        diag.iterations ? static_cast<double>(diag.accepted) / diag.iterations : 0.0;
    diag.score_failures = failures;
    diag.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                       .count();
    run.diagnostics[c] = std::move(diag);
  });

  for (auto& chain : per_chain)
    for (auto& s : chain) run.samples.push_back(std::move(s));
  return run;
}

}  // namespace pedagogue
