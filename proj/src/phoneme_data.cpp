#include "pedagogue/phoneme_data.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "pedagogue/rng.hpp"

namespace pedagogue {

int CategoryModel::index_of(const std::string& label) const {
  for (int i = 0; i < size(); ++i)
    if (phonemes[i].label == label) return i;
  return -1;
}

const PhonemeSpec& CategoryModel::phoneme(const std::string& label) const {
  int i = index_of(label);
  if (i < 0) throw DataError("unknown phoneme label: " + label);
  return phonemes[i];
}

CategoryModel make_category_model(std::vector<PhonemeSpec> phonemes, double alpha,
                                  double nu0_override) {
  if (phonemes.empty()) throw DataError("category model needs at least one phoneme");
  const int d = static_cast<int>(phonemes.front().mean.size());
  std::set<std::string> labels;
  for (const auto& p : phonemes) {
    if (static_cast<int>(p.mean.size()) != d || p.cov.rows() != d || p.cov.cols() != d)
      throw DimensionMismatch("phoneme " + p.label + " does not match dimension " +
                              std::to_string(d));
    if (!p.cov.isApprox(p.cov.transpose(), 1e-12))
      throw NonPositiveDefiniteCovariance("phoneme " + p.label + ": covariance not symmetric");
    try {
      cholesky(p.cov);
    } catch (const NonPositiveDefiniteCovariance&) {
      throw NonPositiveDefiniteCovariance("phoneme " + p.label +
                                          ": covariance not positive definite");
    }
    if (!labels.insert(p.label).second)
      throw DataError("duplicate phoneme label: " + p.label);
  }

  CategoryModel m;
  m.dim = d;
  m.alpha = alpha;
  m.prior.mu0 = Vec::Zero(d);
  m.prior.lambda0 = Mat::Zero(d, d);
  for (const auto& p : phonemes) {
    m.prior.mu0 += p.mean;
    m.prior.lambda0 += p.cov;
  }
  m.prior.mu0 /= static_cast<double>(phonemes.size());
  m.prior.lambda0 /= static_cast<double>(phonemes.size());
  m.prior.kappa0 = 1.0;
  m.prior.nu0 = nu0_override > 0.0 ? nu0_override : static_cast<double>(d);
  m.prior.validate();
  m.phonemes = std::move(phonemes);
  return m;
}

namespace {

struct Row {
  const char* label;
  int n;
  double mean[3];
  double var[3];
  double cov[3];  // f1f2, f1f3, f2f3
};

// Hillenbrand (1995) female-speaker vowels, F1/F2/F3 in Hz.
constexpr std::array<Row, 12> kBuiltinRows{{
    {"ae", 47, {678.06, 2332.47, 2972.68}, {4627.84, 25475.73, 40006.61}, {-4247.73, -1274.09, 21255.98}},
    {"A", 47, {916.36, 1525.83, 2822.57}, {8449.84, 15615.80, 27556.25}, {4354.50, 1197.37, 448.93}},
    {"O", 47, {801.02, 1188.28, 2819.21}, {5172.15, 16614.68, 44701.74}, {6057.43, 128.67, 99.29}},
    {"E", 48, {726.67, 2062.54, 2952.35}, {5454.06, 20402.51, 36093.30}, {-854.33, 3539.42, 11775.23}},
    {"e", 44, {536.86, 2517.09, 3049.86}, {3807.70, 24872.41, 32855.10}, {-1656.22, -1608.30, 19084.57}},
    {"3r", 40, {526.60, 1589.35, 1929.85}, {2193.73, 12356.90, 17234.28}, {-402.32, 989.35, 10092.08}},
    {"I", 48, {484.31, 2369.10, 3057.12}, {1181.03, 22330.69, 36138.92}, {-182.84, 1726.00, 19153.52}},
    {"i", 45, {435.47, 2755.96, 3372.76}, {1662.21, 20746.41, 56255.83}, {967.00, 1010.07, 18241.44}},
    {"o", 48, {555.46, 1035.52, 2828.29}, {6496.21, 15020.30, 35040.38}, {6953.69, -16.69, 771.31}},
    {"U", 48, {518.65, 1228.56, 2829.44}, {1695.72, 20907.53, 33424.00}, {2399.33, 232.84, 1976.00}},
    {"2", 48, {760.19, 1415.67, 2900.92}, {3312.88, 13318.10, 29810.38}, {2538.87, 3730.06, 6977.70}},
    {"u", 48, {459.67, 1105.52, 2735.40}, {1496.06, 42130.34, 19576.20}, {-417.93, -57.95, 2436.00}},
}};

CategoryModel build_builtin() {
  std::vector<PhonemeSpec> specs;
  specs.reserve(kBuiltinRows.size());
  for (const Row& r : kBuiltinRows) {
    PhonemeSpec p;
    p.label = r.label;
    p.n_source = r.n;
    p.mean = Vec(3);
    p.mean << r.mean[0], r.mean[1], r.mean[2];
    p.cov = Mat(3, 3);
    p.cov << r.var[0], r.cov[0], r.cov[1],
             r.cov[0], r.var[1], r.cov[2],
             r.cov[1], r.cov[2], r.var[2];
    specs.push_back(std::move(p));
  }
  return make_category_model(std::move(specs), 1.0, 3.0);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, const std::string& path) {
  double v = 0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  while (b < e && (*b == ' ' || *b == '\t')) ++b;
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || ptr != e)
    throw MalformedCsv(path + ": cannot parse number '" + s + "'");
  return v;
}

std::string format_full(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

const CategoryModel& builtin_model() {
  static const CategoryModel model = build_builtin();
  return model;
}

CategoryModel load_model(const std::string& path, double alpha, double nu0_override) {
  std::ifstream in(path);
  if (!in) throw MalformedCsv("cannot open model file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw MalformedCsv(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = split_csv_line(line);

  // header layout: label, mf1..mfd, vf1..vfd, cf1f2.., n
  if (header.size() < 4 || header.front() != "label" || header.back() != "n")
    throw MalformedCsv(path + ": header must be label,mf*,vf*,cf*f*,n");
  int d = 0;
  std::size_t idx = 1;
  while (idx < header.size() && header[idx] == "mf" + std::to_string(d + 1)) {
    ++d;
    ++idx;
  }
  if (d < 1) throw MalformedCsv(path + ": no mean columns (mf1..)");
  for (int j = 1; j <= d; ++j, ++idx) {
    if (idx >= header.size() || header[idx] != "vf" + std::to_string(j))
      throw DimensionMismatch(path + ": expected " + std::to_string(d) +
                              " variance columns to match mean columns");
  }
  std::vector<std::pair<int, int>> pairs;
  for (int a = 1; a <= d; ++a)
    for (int b = a + 1; b <= d; ++b) pairs.emplace_back(a, b);
  for (const auto& [a, b] : pairs) {
    std::string want = "cf" + std::to_string(a) + "f" + std::to_string(b);
    if (idx >= header.size() || header[idx] != want)
      throw DimensionMismatch(path + ": expected covariance column " + want);
    ++idx;
  }
  if (idx + 1 != header.size())
    throw MalformedCsv(path + ": unexpected trailing columns before n");

  std::vector<PhonemeSpec> specs;
  const std::size_t want_fields = header.size();
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto f = split_csv_line(line);
    if (f.size() != want_fields)
      throw MalformedCsv(path + ": row for '" + (f.empty() ? "?" : f[0]) + "' has " +
                         std::to_string(f.size()) + " fields, expected " +
                         std::to_string(want_fields));
    PhonemeSpec p;
    p.label = f[0];
    p.mean = Vec(d);
    p.cov = Mat(d, d);
    std::size_t k = 1;
    for (int j = 0; j < d; ++j) p.mean[j] = parse_double(f[k++], path);
    for (int j = 0; j < d; ++j) p.cov(j, j) = parse_double(f[k++], path);
    for (const auto& [a, b] : pairs) {
      double v = parse_double(f[k++], path);
      p.cov(a - 1, b - 1) = v;
      p.cov(b - 1, a - 1) = v;
    }
    p.n_source = static_cast<int>(parse_double(f[k++], path));
    specs.push_back(std::move(p));
  }
  if (specs.empty()) throw MalformedCsv(path + ": no phoneme rows");
  return make_category_model(std::move(specs), alpha, nu0_override);
}

void save_model(const CategoryModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write model file: " + path);
  const int d = model.dim;
  out << "label";
  for (int j = 1; j <= d; ++j) out << ",mf" << j;
  for (int j = 1; j <= d; ++j) out << ",vf" << j;
  for (int a = 1; a <= d; ++a)
    for (int b = a + 1; b <= d; ++b) out << ",cf" << a << "f" << b;
  out << ",n\n";
  for (const auto& p : model.phonemes) {
    out << p.label;
    for (int j = 0; j < d; ++j) out << ',' << format_full(p.mean[j]);
    for (int j = 0; j < d; ++j) out << ',' << format_full(p.cov(j, j));
    for (int a = 0; a < d; ++a)
      for (int b = a + 1; b < d; ++b) out << ',' << format_full(p.cov(a, b));
    out << ',' << p.n_source << '\n';
  }
}

LabeledDataset sample_ads(const CategoryModel& model, int per_phoneme, std::uint64_t seed) {
  if (per_phoneme < 1) throw DataError("sample_ads: per_phoneme must be >= 1");
  const int k = model.size();
  const int d = model.dim;
  LabeledDataset ds;
  ds.provenance = Provenance::ADS;
  ds.points = Mat(static_cast<long>(k) * per_phoneme, d);
  ds.labels.resize(static_cast<std::size_t>(k) * per_phoneme);
  Rng rng(make_stream(seed, 0));
  std::normal_distribution<double> gauss(0.0, 1.0);
  long row = 0;
  for (int j = 0; j < k; ++j) {
    CholFactor chol = cholesky(model.phonemes[j].cov);
    for (int i = 0; i < per_phoneme; ++i, ++row) {
      Vec z(d);
      for (int c = 0; c < d; ++c) z[c] = gauss(rng);
      ds.points.row(row) = (model.phonemes[j].mean + chol.lower * z).transpose();
      ds.labels[row] = j;
    }
  }
  return ds;
}

CategoryModel project_f12(const CategoryModel& model) {
  if (model.dim < 2) throw DimensionMismatch("project_f12: model has fewer than 2 formants");
  std::vector<PhonemeSpec> specs;
  specs.reserve(model.phonemes.size());
  for (const auto& p : model.phonemes) {
    PhonemeSpec q;
    q.label = p.label;
    q.n_source = p.n_source;
    q.mean = p.mean.head(2);
    q.cov = p.cov.topLeftCorner(2, 2);
    specs.push_back(std::move(q));
  }
  return make_category_model(std::move(specs), model.alpha, model.prior.nu0 == model.dim
                                                                ? 0.0
                                                                : model.prior.nu0);
}

bool is_corner_pair(const std::string& a, const std::string& b) {
  auto corner = [](const std::string& s) { return s == "A" || s == "i" || s == "u"; };
  return corner(a) && corner(b) && a != b;
}

}  // namespace pedagogue
