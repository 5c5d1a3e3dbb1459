#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "ehrgan/nn.hpp"

namespace ehrgan {

inline constexpr Eigen::Index kAttributeCount = 30;

using MaskXb = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;
using LabelVector = Eigen::VectorXi;

/// Records x attributes, with an observation mask (true = observed) and 0/1 labels
/// (0 benign, 1 malignant). Values under a false mask entry are placeholders.
struct MaskedMatrix {
  MatrixXd values;
  MaskXb mask;
  LabelVector labels;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
  Eigen::Index missing_count() const { return mask.size() - mask.count(); }
  Eigen::Index missing_in_row(Eigen::Index i) const { return cols() - mask.row(i).count(); }
  Eigen::Index count_label(int label) const { return (labels.array() == label).count(); }
};

/// One simulated-missing cell and the value that was hidden.
struct TruthCell {
  Eigen::Index row;
  Eigen::Index attr;
  double value;
};
using GroundTruth = std::vector<TruthCell>;

struct SimulatedMissing {
  MaskedMatrix data;
  GroundTruth truth;
};

struct ScalingParams {
  VectorXd min;
  VectorXd max;
};

/// Fold index in [0, k) for every record.
struct FoldPlan {
  int k = 0;
  std::vector<int> assignments;

  std::vector<Eigen::Index> test_indices(int fold) const;
  std::vector<Eigen::Index> train_indices(int fold) const;
};

struct LoadOptions {
  bool zero_is_missing = true;
  bool header = false;
};

MaskedMatrix parse_wdbc(std::istream& in, const LoadOptions& options = {});
MaskedMatrix load_wdbc(const std::filesystem::path& path, const LoadOptions& options = {});

/// Hides attributes [0, attr_count) in floor(fraction * class size) randomly chosen
/// records of each class. Cells that were already missing stay missing and are not
/// added to the ground truth.
SimulatedMissing simulate_missing(const MaskedMatrix& data, Eigen::Index attr_count = 15, double fraction = 0.5,
                                  std::uint64_t seed = 0);

ScalingParams fit_minmax(const MaskedMatrix& data);

/// Observed cells map to (x - min) / (max - min), clipped to [0, 1]; constant attributes map to 0.
/// Missing cells are left as they are.
MaskedMatrix apply_minmax(const MaskedMatrix& data, const ScalingParams& params);
double scale_value(double x, const ScalingParams& params, Eigen::Index attr);
MatrixXd invert_minmax(const MatrixXd& scaled, const ScalingParams& params);
GroundTruth scale_truth(const GroundTruth& truth, const ScalingParams& params);

struct SparsitySplit {
  MaskedMatrix low;   // sparsity < threshold
  MaskedMatrix high;  // sparsity >= threshold
  std::vector<Eigen::Index> low_rows;
  std::vector<Eigen::Index> high_rows;
};

SparsitySplit split_by_sparsity(const MaskedMatrix& data, double threshold = 0.1);

FoldPlan stratified_kfold(const LabelVector& labels, int k = 5, std::uint64_t seed = 0);

MaskedMatrix select_rows(const MaskedMatrix& data, std::span<const Eigen::Index> rows);
MatrixXd select_rows(const MatrixXd& data, std::span<const Eigen::Index> rows);
LabelVector select_rows(const LabelVector& labels, std::span<const Eigen::Index> rows);

// Canonical masked dataset: header, then label, v0..v29, m0..m29 per record.
void write_masked_csv(std::ostream& out, const MaskedMatrix& data);
MaskedMatrix read_masked_csv(std::istream& in);
// Ground truth sidecar: row_index, attr_index, true_value.
void write_truth_csv(std::ostream& out, const GroundTruth& truth);
GroundTruth read_truth_csv(std::istream& in);

}  // namespace ehrgan
