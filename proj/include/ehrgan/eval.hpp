#pragma once

// Threshold metrics, ROC/AUC, and the repeated stratified cross-validation harness.

#include <array>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "ehrgan/config.hpp"
#include "ehrgan/viz.hpp"

namespace ehrgan {

struct ConfusionCounts {
  long tp = 0, fp = 0, tn = 0, fn = 0;
  long total() const { return tp + fp + tn + fn; }
};

/// Score >= threshold predicts positive.
ConfusionCounts confusion(const VectorXd& scores, const LabelVector& labels, double threshold = 0.5);

struct Metrics {
  double accuracy = 0, sensitivity = 0, specificity = 0, precision = 0, f_score = 0;
  bool degenerate = false;  // some ratio was 0/0 and reported as 0
};

Metrics metrics(const ConfusionCounts& c);

struct RocCurve {
  std::vector<RocPoint> points;
  // Cumulative (false positive, true positive) counts per point and the class sizes.
  // Empty for curves assembled by hand.
  std::vector<std::pair<long, long>> counts;
  long positives = 0;
  long negatives = 0;
};

/// Thresholds at each distinct score, descending; tied scores move the curve in one step.
/// Starts at (0, 0) and ends at (1, 1). Needs both classes.
RocCurve roc_curve(const VectorXd& scores, const LabelVector& labels);

/// Trapezoidal area under the curve. With counts present the sum is carried in integers
/// and divided once, so the result is the exact rational area rounded to double.
double auc(const RocCurve& curve);

/// TPR at fpr = k / (grid - 1), k = 0..grid-1. Where the curve is vertical the highest
/// TPR at that FPR is taken; elsewhere linear interpolation.
std::vector<double> roc_on_grid(const RocCurve& curve, int grid);

// ---------------------------------------------------------------------------

inline constexpr std::array<const char*, 5> kMetricNames{"accuracy", "sensitivity", "specificity", "auc", "f_score"};

struct CellResult {
  int trial = 0;
  int fold = 0;
  Arm arm = Arm::mean;
  Classifier classifier = Classifier::acgan;
  std::array<double, 5> values{};  // in kMetricNames order
  bool degenerate = false;
  std::string error;  // empty on success
};

struct SummaryRow {
  Arm arm;
  Classifier classifier;
  int n_cells = 0;
  std::array<double, 5> mean{};
  std::array<double, 5> stddev{};  // sample standard deviation
};

struct AveragedRoc {
  Arm arm;
  Classifier classifier;
  std::vector<double> fpr;
  std::vector<double> tpr;  // mean over trials of the pooled-per-trial curve
  int n_trials = 0;
};

struct ExperimentReport {
  std::vector<CellResult> cells;  // ordered by trial, fold, arm, classifier
  std::vector<SummaryRow> rows;   // ordered by arm, classifier
  std::vector<AveragedRoc> roc;
  double mean_imputation_rmse = 0;  // on the simulated cells, whole-dataset imputers
  double ae_imputation_rmse = 0;
  int failed_cells = 0;

  const SummaryRow& row(Arm arm, Classifier c) const;
};

/// Scaler, mean imputer and autoencoder fitted on one partition. complete() scales
/// any unscaled matrix with the fitted scaler and fills it with the chosen imputer.
struct ArmPipeline {
  ScalingParams scaling;
  ImputerStats mean_stats;
  AutoencoderModel autoencoder;

  MatrixXd complete(Arm arm, const MaskedMatrix& unscaled) const;
};

ArmPipeline fit_arm_pipeline(const MaskedMatrix& unscaled, const ExperimentConfig& config, std::uint64_t seed);

/// Trains one classifier on complete scaled rows.
ScorerModel fit_classifier(Classifier c, const MatrixXd& X, const LabelVector& y, const ExperimentConfig& config,
                           std::uint64_t seed);

using ProgressFn = std::function<void(int done, int total)>;

/// Runs trials x folds x arms x classifiers on the masked (unscaled) dataset. Cells whose
/// training throws are recorded with their error and excluded from the summaries.
ExperimentReport run_cv_experiment(const SimulatedMissing& prepared, const ExperimentConfig& config,
                                   const ProgressFn& progress = nullptr);

// CSV outputs.
void write_metrics_csv(std::ostream& out, const ExperimentReport& report);
void write_percell_csv(std::ostream& out, const ExperimentReport& report);
void write_roc_csv(std::ostream& out, const ExperimentReport& report);

}  // namespace ehrgan
