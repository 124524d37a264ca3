#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pedagogue/bayes.hpp"

namespace pedagogue {

// One Gaussian phonetic category: formant-space mean (Hz) and covariance
// (Hz^2), plus the number of source tokens behind the estimate.
struct PhonemeSpec {
  std::string label;
  Vec mean;
  Mat cov;
  int n_source = 0;
};

enum class Provenance { ADS, TEACHING, CUSTOM };

enum class FormantSet { F123, F12 };

struct LabeledDataset {
  Mat points;               // n x d, Hz
  std::vector<int> labels;  // category index per row
  Provenance provenance = Provenance::CUSTOM;

  int n() const { return static_cast<int>(points.rows()); }
  int dim() const { return static_cast<int>(points.cols()); }
};

// The target concept: a labeled system of Gaussian categories together with
// the prior a learner of the system is assumed to hold. Immutable after
// construction; safe to share across threads.
struct CategoryModel {
  std::vector<PhonemeSpec> phonemes;
  int dim = 0;
  NiwParams prior;
  double alpha = 1.0;

  int size() const { return static_cast<int>(phonemes.size()); }
  // Index of a label, or -1 when absent.
  int index_of(const std::string& label) const;
  const PhonemeSpec& phoneme(const std::string& label) const;
};

// Builds a model and derives its prior from the categories:
//   mu0     = unweighted mean of the category means
//   lambda0 = average of the category covariance matrices
//   kappa0  = 1
//   nu0     = d (override with nu0_override > 0)
// Validates symmetry/positive-definiteness of every covariance and label
// uniqueness.
CategoryModel make_category_model(std::vector<PhonemeSpec> phonemes, double alpha = 1.0,
                                  double nu0_override = 0.0);

// The embedded 12-phoneme American English vowel model (female speakers,
// F1/F2/F3 means and covariances). Labels are ASCII IPA-ish: ae A O E e 3r I
// i o U 2 u. alpha = 1.
const CategoryModel& builtin_model();

// Model CSV: header `label,mf1..mfd,vf1..vfd,cf1f2..,n`, off-diagonal
// covariances in upper-triangular order, full-precision decimal text.
CategoryModel load_model(const std::string& path, double alpha = 1.0,
                         double nu0_override = 0.0);
void save_model(const CategoryModel& model, const std::string& path);

// Random adult-directed data: per_phoneme draws from every category's
// Gaussian, in category order. Deterministic given the seed.
LabeledDataset sample_ads(const CategoryModel& model, int per_phoneme, std::uint64_t seed);

// Drops every formant after the first two and re-derives the prior.
CategoryModel project_f12(const CategoryModel& model);

// Corner-vowel labels (/A/, /i/, /u/).
bool is_corner_pair(const std::string& a, const std::string& b);

}  // namespace pedagogue
