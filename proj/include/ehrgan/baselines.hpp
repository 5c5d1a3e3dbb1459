#pragma once

// The comparison classifiers. Each has a concrete model type (for inspection in
// tests) and a fit_* entry point returning the uniform ScorerModel handle.

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "ehrgan/dataio.hpp"
#include "ehrgan/nn.hpp"

namespace ehrgan {

/// Trained classifier: maps complete feature rows to P(malignant) in [0, 1].
class ScorerModel {
 public:
  using BatchFn = std::function<VectorXd(const MatrixXd&)>;

  ScorerModel(std::string tag, BatchFn fn) : tag_(std::move(tag)), fn_(std::move(fn)) {}

  const std::string& tag() const { return tag_; }
  VectorXd score(const MatrixXd& rows) const { return fn_(rows); }
  double score(const VectorXd& row) const { return fn_(row.transpose())[0]; }

 private:
  std::string tag_;
  BatchFn fn_;
};

// ---------------------------------------------------------------------------
// Trees

struct TreeNode {
  int attr = -1;             // -1 for leaves
  double threshold = 0.0;    // go left when x[attr] <= threshold
  int left = -1;
  int right = -1;
  double value = 0.0;        // leaf: positive fraction (classification) or output (regression)
  double weight = 0.0;       // total sample weight that reached the node
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double predict(const double* row, Eigen::Index stride) const;
  VectorXd predict(const MatrixXd& rows) const;
  int depth() const;
  int leaf_count() const;
  std::vector<int> split_attributes() const;
};

struct TreeConfig {
  int max_depth = -1;  // -1: grow until pure or unsplittable
  int min_leaf = 1;
};

/// Weighted Gini CART. `weights` may be empty (all ones). `attributes` restricts the
/// candidate split attributes (empty: all). `per_split_attributes` > 0 draws that many
/// candidates at every node from `attributes` using `rng`.
DecisionTree grow_classification_tree(const MatrixXd& X, const LabelVector& y, const VectorXd& weights,
                                      const TreeConfig& config, const std::vector<int>& attributes = {},
                                      int per_split_attributes = 0, Rng* rng = nullptr);

/// Squared-error regression tree on `target`; leaf values are set by `leaf_value`
/// from the row indices that reach the leaf.
DecisionTree grow_regression_tree(const MatrixXd& X, const VectorXd& target, const TreeConfig& config,
                                  const std::function<double(const std::vector<Eigen::Index>&)>& leaf_value);

ScorerModel fit_decision_tree(const MatrixXd& X, const LabelVector& y, const TreeConfig& config = {});

// ---------------------------------------------------------------------------
// Gaussian naive Bayes

struct NaiveBayesModel {
  Eigen::Vector2d log_prior;
  Eigen::Matrix<double, 2, Eigen::Dynamic> mean;
  Eigen::Matrix<double, 2, Eigen::Dynamic> var;

  // Columns: P(y = 0 | x), P(y = 1 | x).
  Eigen::Matrix<double, Eigen::Dynamic, 2> posterior(const MatrixXd& rows) const;
};

NaiveBayesModel train_naive_bayes(const MatrixXd& X, const LabelVector& y, double var_smoothing = 1e-9);
ScorerModel fit_naive_bayes(const MatrixXd& X, const LabelVector& y, double var_smoothing = 1e-9);

// ---------------------------------------------------------------------------
// RBF support vector machine

enum class GammaMode {
  automatic,  // 1 / n_features
  scale,      // 1 / (n_features * mean per-feature variance)
  fixed       // SvmConfig::gamma
};

struct SvmConfig {
  double C = 1.0;
  GammaMode gamma_mode = GammaMode::automatic;
  double gamma = 0.0;
  double tol = 1e-3;
  long max_iterations = 1'000'000;
};

struct SvmModel {
  MatrixXd support_vectors;
  VectorXd coef;          // alpha_i * y_i for each support vector
  double bias = 0.0;
  double gamma = 0.0;
  double platt_a = -1.0;  // P(y = 1 | f) = 1 / (1 + exp(platt_a * f))
  bool converged = false;
  long iterations = 0;
  VectorXd alpha;                     // all dual variables, training order
  std::vector<double> dual_objective;  // per SMO iteration
  double max_kkt_violation = 0.0;

  VectorXd decision(const MatrixXd& rows) const;
  VectorXd probability(const MatrixXd& rows) const;
};

double resolve_gamma(const MatrixXd& X, const SvmConfig& config);
SvmModel train_svm(const MatrixXd& X, const LabelVector& y, const SvmConfig& config = {});
ScorerModel fit_svm_rbf(const MatrixXd& X, const LabelVector& y, const SvmConfig& config = {});

// ---------------------------------------------------------------------------
// Random forest

struct ForestConfig {
  int n_trees = 10;
  int attrs_per_tree = 5;
  bool bootstrap = true;
  bool per_split = false;  // draw attributes at every split instead of once per tree
  std::uint64_t seed = 0;
};

struct RandomForestModel {
  std::vector<DecisionTree> trees;
  std::vector<std::vector<int>> attributes;  // per tree, sorted

  VectorXd predict(const MatrixXd& rows) const;
};

RandomForestModel train_random_forest(const MatrixXd& X, const LabelVector& y, const ForestConfig& config = {});
ScorerModel fit_random_forest(const MatrixXd& X, const LabelVector& y, const ForestConfig& config = {});

// ---------------------------------------------------------------------------
// AdaBoost (discrete, two-class)

struct AdaBoostConfig {
  int n_estimators = 10;
  int base_depth = 1;
};

struct AdaBoostModel {
  std::vector<DecisionTree> learners;
  std::vector<double> alphas;
  std::vector<double> weighted_errors;
  std::vector<VectorXd> sample_weights;  // after each round, normalized

  VectorXd vote(const MatrixXd& rows) const;  // sum of alpha * (+1 / -1)
  VectorXd predict(const MatrixXd& rows) const;
};

AdaBoostModel train_adaboost(const MatrixXd& X, const LabelVector& y, const AdaBoostConfig& config = {});
ScorerModel fit_adaboost(const MatrixXd& X, const LabelVector& y, const AdaBoostConfig& config = {});

// ---------------------------------------------------------------------------
// Gradient boosting with logistic loss

struct GradientBoostingConfig {
  int n_estimators = 10;
  double learning_rate = 0.1;
  int max_depth = 3;
};

struct GradientBoostingModel {
  double initial = 0.0;  // log-odds of the base rate
  double learning_rate = 0.1;
  std::vector<DecisionTree> trees;
  std::vector<double> train_log_loss;  // before round 1, then after every round

  VectorXd raw(const MatrixXd& rows) const;
  VectorXd predict(const MatrixXd& rows) const;
};

GradientBoostingModel train_gradient_boosting(const MatrixXd& X, const LabelVector& y,
                                              const GradientBoostingConfig& config = {});
ScorerModel fit_gradient_boosting(const MatrixXd& X, const LabelVector& y, const GradientBoostingConfig& config = {});

// ---------------------------------------------------------------------------
// Multilayer perceptron with the discriminator's trunk

struct MlpConfig {
  int hidden = 50;
  int epochs = 200;
  int batch_size = 200;  // clipped to the sample count
  double adam_alpha = 1e-3;
  double l2 = 1e-4;
  double tol = 1e-4;  // stop after `patience` epochs without this much loss improvement
  int patience = 10;
  std::uint64_t seed = 0;
};

struct MlpModel {
  NetParams net;
  std::vector<double> train_loss;

  VectorXd predict(const MatrixXd& rows) const;
};

NetParams make_mlp_net(int hidden, Rng& rng);
MlpModel train_mlp(const MatrixXd& X, const LabelVector& y, const MlpConfig& config = {});
ScorerModel fit_mlp(const MatrixXd& X, const LabelVector& y, const MlpConfig& config = {});

}  // namespace ehrgan
