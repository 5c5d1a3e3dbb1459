#include "ehrgan/dataio.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "ehrgan/csv.hpp"
#include "ehrgan/rng.hpp"

namespace ehrgan {

std::vector<Eigen::Index> FoldPlan::test_indices(int fold) const {
  std::vector<Eigen::Index> out;
  for (std::size_t i = 0; i < assignments.size(); ++i)
    if (assignments[i] == fold) out.push_back(static_cast<Eigen::Index>(i));
  return out;
}

std::vector<Eigen::Index> FoldPlan::train_indices(int fold) const {
  std::vector<Eigen::Index> out;
  for (std::size_t i = 0; i < assignments.size(); ++i)
    if (assignments[i] != fold) out.push_back(static_cast<Eigen::Index>(i));
  return out;
}

MaskedMatrix parse_wdbc(std::istream& in, const LoadOptions& options) {
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (options.header && line_no == 1) continue;
    if (csv::trim(line).empty()) continue;
    const auto fields = csv::split(line);
    if (fields.size() != 2 + kAttributeCount)
      throw SchemaError("line " + std::to_string(line_no) + ": expected " + std::to_string(2 + kAttributeCount) +
                        " columns, found " + std::to_string(fields.size()));
    const auto diagnosis = csv::trim(fields[1]);
    if (diagnosis == "M")
      labels.push_back(1);
    else if (diagnosis == "B")
      labels.push_back(0);
    else
      throw ParseError("diagnosis must be M or B, found '" + std::string(diagnosis) + "'", line_no);
    std::vector<double> row(kAttributeCount);
    for (Eigen::Index j = 0; j < kAttributeCount; ++j) row[j] = csv::parse_double(fields[2 + j], line_no);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw SchemaError("no records found");

  MaskedMatrix m;
  const auto n = static_cast<Eigen::Index>(rows.size());
  m.values.resize(n, kAttributeCount);
  m.mask.resize(n, kAttributeCount);
  m.labels.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    m.labels[i] = labels[i];
    for (Eigen::Index j = 0; j < kAttributeCount; ++j) {
      m.values(i, j) = rows[i][j];
      m.mask(i, j) = !(options.zero_is_missing && rows[i][j] == 0.0);
    }
  }
  return m;
}

MaskedMatrix load_wdbc(const std::filesystem::path& path, const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset '" + path.string() + "'");
  return parse_wdbc(in, options);
}

SimulatedMissing simulate_missing(const MaskedMatrix& data, Eigen::Index attr_count, double fraction,
                                  std::uint64_t seed) {
  if (attr_count < 0 || attr_count > data.cols())
    throw DomainError("attr_count " + std::to_string(attr_count) + " outside [0, " + std::to_string(data.cols()) + "]");
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw DomainError("sample fraction must lie in [0, 1]");
  SimulatedMissing out{data, {}};
  Rng rng(seed);
  std::vector<Eigen::Index> chosen;
  for (int cls : {0, 1}) {
    std::vector<Eigen::Index> members;
    for (Eigen::Index i = 0; i < data.rows(); ++i)
      if (data.labels[i] == cls) members.push_back(i);
    rng.shuffle(members);
    const auto take = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(members.size())));
    chosen.insert(chosen.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(take));
  }
  std::sort(chosen.begin(), chosen.end());
  for (Eigen::Index i : chosen)
    for (Eigen::Index j = 0; j < attr_count; ++j)
      if (out.data.mask(i, j)) {
        out.data.mask(i, j) = false;
        out.truth.push_back({i, j, data.values(i, j)});
      }
  return out;
}

ScalingParams fit_minmax(const MaskedMatrix& data) {
  ScalingParams p{VectorXd(data.cols()), VectorXd(data.cols())};
  for (Eigen::Index j = 0; j < data.cols(); ++j) {
    bool seen = false;
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
      if (!data.mask(i, j)) continue;
      const double v = data.values(i, j);
      if (!seen) {
        p.min[j] = p.max[j] = v;
        seen = true;
      } else {
        p.min[j] = std::min(p.min[j], v);
        p.max[j] = std::max(p.max[j], v);
      }
    }
    if (!seen) throw DomainError("attribute " + std::to_string(j) + " has no observed values");
  }
  return p;
}

double scale_value(double x, const ScalingParams& params, Eigen::Index attr) {
  const double range = params.max[attr] - params.min[attr];
  if (range <= 0.0) return 0.0;
  return std::clamp((x - params.min[attr]) / range, 0.0, 1.0);
}

MaskedMatrix apply_minmax(const MaskedMatrix& data, const ScalingParams& params) {
  if (params.min.size() != data.cols()) throw ShapeError("scaling parameters do not match attribute count");
  MaskedMatrix out = data;
  for (Eigen::Index j = 0; j < data.cols(); ++j)
    for (Eigen::Index i = 0; i < data.rows(); ++i)
      if (data.mask(i, j)) out.values(i, j) = scale_value(data.values(i, j), params, j);
  return out;
}

MatrixXd invert_minmax(const MatrixXd& scaled, const ScalingParams& params) {
  MatrixXd out(scaled.rows(), scaled.cols());
  for (Eigen::Index j = 0; j < scaled.cols(); ++j)
    out.col(j) = scaled.col(j).array() * (params.max[j] - params.min[j]) + params.min[j];
  return out;
}

GroundTruth scale_truth(const GroundTruth& truth, const ScalingParams& params) {
  GroundTruth out = truth;
  for (auto& c : out) c.value = scale_value(c.value, params, c.attr);
  return out;
}

MaskedMatrix select_rows(const MaskedMatrix& data, std::span<const Eigen::Index> rows) {
  MaskedMatrix out;
  const auto n = static_cast<Eigen::Index>(rows.size());
  out.values.resize(n, data.cols());
  out.mask.resize(n, data.cols());
  out.labels.resize(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    out.values.row(r) = data.values.row(rows[r]);
    out.mask.row(r) = data.mask.row(rows[r]);
    out.labels[r] = data.labels[rows[r]];
  }
  return out;
}

MatrixXd select_rows(const MatrixXd& data, std::span<const Eigen::Index> rows) {
  MatrixXd out(static_cast<Eigen::Index>(rows.size()), data.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = data.row(rows[r]);
  return out;
}

LabelVector select_rows(const LabelVector& labels, std::span<const Eigen::Index> rows) {
  LabelVector out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) out[static_cast<Eigen::Index>(r)] = labels[rows[r]];
  return out;
}

SparsitySplit split_by_sparsity(const MaskedMatrix& data, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw DomainError("sparsity threshold must lie in [0, 1]");
  SparsitySplit s;
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    const double sparsity = static_cast<double>(data.missing_in_row(i)) / static_cast<double>(data.cols());
    (sparsity < threshold ? s.low_rows : s.high_rows).push_back(i);
  }
  s.low = select_rows(data, s.low_rows);
  s.high = select_rows(data, s.high_rows);
  return s;
}

FoldPlan stratified_kfold(const LabelVector& labels, int k, std::uint64_t seed) {
  if (k < 2) throw DomainError("fold count must be at least 2");
  FoldPlan plan{k, std::vector<int>(static_cast<std::size_t>(labels.size()), -1)};
  Rng rng(seed);
  // Each class continues the round-robin where the previous one stopped so fold
  // sizes stay within one of each other overall.
  int next = 0;
  for (int cls : {0, 1}) {
    std::vector<Eigen::Index> members;
    for (Eigen::Index i = 0; i < labels.size(); ++i)
      if (labels[i] == cls) members.push_back(i);
    if (static_cast<int>(members.size()) < k)
      throw DomainError("class " + std::to_string(cls) + " has " + std::to_string(members.size()) +
                        " members, fewer than " + std::to_string(k) + " folds");
    rng.shuffle(members);
    for (Eigen::Index i : members) {
      plan.assignments[static_cast<std::size_t>(i)] = next;
      next = (next + 1) % k;
    }
  }
  for (std::size_t i = 0; i < plan.assignments.size(); ++i)
    if (plan.assignments[i] < 0)
      throw DomainError("label at index " + std::to_string(i) + " is not 0 or 1");
  return plan;
}

void write_masked_csv(std::ostream& out, const MaskedMatrix& data) {
  out << "label";
  for (Eigen::Index j = 0; j < data.cols(); ++j) out << ",v" << j;
  for (Eigen::Index j = 0; j < data.cols(); ++j) out << ",m" << j;
  out << '\n';
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    out << data.labels[i];
    for (Eigen::Index j = 0; j < data.cols(); ++j) out << ',' << csv::format(data.values(i, j));
    for (Eigen::Index j = 0; j < data.cols(); ++j) out << ',' << (data.mask(i, j) ? 1 : 0);
    out << '\n';
  }
}

MaskedMatrix read_masked_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("masked dataset is empty");
  const auto header = csv::split(line);
  if (header.size() < 3 || (header.size() - 1) % 2 != 0 || csv::trim(header[0]) != "label")
    throw SchemaError("masked dataset header must be label, v0.., m0..");
  const auto width = static_cast<Eigen::Index>((header.size() - 1) / 2);
  std::vector<std::string> lines;
  while (std::getline(in, line))
    if (!csv::trim(line).empty()) lines.push_back(line);
  MaskedMatrix m;
  const auto n = static_cast<Eigen::Index>(lines.size());
  m.values.resize(n, width);
  m.mask.resize(n, width);
  m.labels.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::size_t line_no = static_cast<std::size_t>(i) + 2;
    const auto f = csv::split(lines[static_cast<std::size_t>(i)]);
    if (f.size() != header.size())
      throw SchemaError("line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) + " columns");
    m.labels[i] = static_cast<int>(csv::parse_long(f[0], line_no));
    if (m.labels[i] != 0 && m.labels[i] != 1) throw ParseError("label must be 0 or 1", line_no);
    for (Eigen::Index j = 0; j < width; ++j) {
      m.values(i, j) = csv::parse_double(f[1 + j], line_no);
      const long flag = csv::parse_long(f[1 + width + j], line_no);
      if (flag != 0 && flag != 1) throw ParseError("mask flag must be 0 or 1", line_no);
      m.mask(i, j) = flag == 1;
    }
  }
  return m;
}

void write_truth_csv(std::ostream& out, const GroundTruth& truth) {
  out << "row_index,attr_index,true_value\n";
  for (const auto& c : truth) out << c.row << ',' << c.attr << ',' << csv::format(c.value) << '\n';
}

GroundTruth read_truth_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("ground-truth sidecar is empty");
  GroundTruth truth;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (csv::trim(line).empty()) continue;
    const auto f = csv::split(line);
    if (f.size() != 3) throw SchemaError("line " + std::to_string(line_no) + ": expected 3 columns");
    truth.push_back({csv::parse_long(f[0], line_no), csv::parse_long(f[1], line_no), csv::parse_double(f[2], line_no)});
  }
  return truth;
}

}  // namespace ehrgan
