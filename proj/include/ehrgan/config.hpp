#pragma once

// Experiment configuration: a flat key=value text file with '#' comments.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "ehrgan/acgan.hpp"
#include "ehrgan/baselines.hpp"
#include "ehrgan/dataio.hpp"
#include "ehrgan/impute.hpp"
#include "ehrgan/viz.hpp"

namespace ehrgan {

enum class Arm { mean, ae };
enum class LeakageMode {
  paper,  // scaler and imputers fitted once on all records before cross-validation
  strict  // refitted from each training partition
};
enum class Classifier { acgan, mlp, decision_tree, naive_bayes, svm, random_forest, adaboost, gradient_boosting };

std::string to_string(Arm arm);
std::string to_string(LeakageMode mode);
std::string to_string(Classifier c);
std::string display_name(Classifier c);
Arm arm_from_string(const std::string& s);
Classifier classifier_from_string(const std::string& s);
const std::vector<Classifier>& all_classifiers();

struct ExperimentConfig {
  std::filesystem::path dataset = "data/wdbc.data";
  std::filesystem::path out = "out";
  std::uint64_t seed = 1;
  LoadOptions load;
  Eigen::Index missing_attr_count = 15;
  double missing_fraction = 0.5;
  double sparsity_threshold = 0.1;
  LeakageMode leakage = LeakageMode::paper;

  AeConfig ae;
  AcganConfig acgan;
  TreeConfig tree;
  double nb_var_smoothing = 1e-9;
  SvmConfig svm;
  ForestConfig forest;
  AdaBoostConfig adaboost;
  GradientBoostingConfig gboost;
  MlpConfig mlp;

  int folds = 5;
  int trials = 10;
  double threshold = 0.5;
  int roc_grid = 1001;
  std::vector<Classifier> classifiers = all_classifiers();
  std::vector<Arm> arms{Arm::mean, Arm::ae};
  int workers = 0;  // 0: hardware concurrency

  TsneConfig tsne;
  Arm tsne_arm = Arm::ae;
  int generated_per_real = 1;

  // Schedule for the whole-dataset AC-GAN whose generator feeds the t-SNE views.
  int generator_epochs = 600;
  int generator_d_steps_per_g_step = 2;
};

/// The AC-GAN settings with the whole-dataset generator schedule applied.
AcganConfig generator_training_config(const ExperimentConfig& config, std::uint64_t seed);

/// Parses key=value lines; unspecified keys keep their defaults. Unknown keys and
/// malformed values throw ConfigError naming the line.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Sets one key with the same validation as the file parser.
void set_config_value(ExperimentConfig& config, const std::string& key, const std::string& value);

/// Canonical serialization: every key, fixed order, shortest round-trip numbers.
std::string serialize_config(const ExperimentConfig& config);

/// Default configuration with every key commented and tagged [paper] or [decision].
std::string config_template();

/// 16 hex digits (FNV-1a over the canonical serialization, excluding `out` and
/// `workers`, which do not affect results).
std::string config_hash(const ExperimentConfig& config);

/// FNV-1a 64 of arbitrary bytes, as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace ehrgan
