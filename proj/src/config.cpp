#include "ehrgan/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <sstream>

#include "ehrgan/csv.hpp"

namespace ehrgan {

std::string to_string(Arm arm) { return arm == Arm::mean ? "mean" : "ae"; }
std::string to_string(LeakageMode mode) { return mode == LeakageMode::paper ? "paper" : "strict"; }

namespace {

struct ClassifierName {
  Classifier kind;
  const char* tag;
  const char* display;
};

constexpr ClassifierName kClassifierNames[] = {
    {Classifier::decision_tree, "decision_tree", "Decision Tree"},
    {Classifier::naive_bayes, "naive_bayes", "Naive Bayes"},
    {Classifier::svm, "svm", "SVM"},
    {Classifier::random_forest, "random_forest", "Random Forest"},
    {Classifier::adaboost, "adaboost", "AdaBoost"},
    {Classifier::gradient_boosting, "gradient_boosting", "Gradient Boosting"},
    {Classifier::mlp, "mlp", "MLP"},
    {Classifier::acgan, "acgan", "AC-GAN"},
};

const ClassifierName& lookup(Classifier c) {
  for (const auto& n : kClassifierNames)
    if (n.kind == c) return n;
  throw DomainError("unknown classifier");
}

}  // namespace

std::string to_string(Classifier c) { return lookup(c).tag; }
std::string display_name(Classifier c) { return lookup(c).display; }

const std::vector<Classifier>& all_classifiers() {
  static const std::vector<Classifier> all = [] {
    std::vector<Classifier> v;
    for (const auto& n : kClassifierNames) v.push_back(n.kind);
    return v;
  }();
  return all;
}

Arm arm_from_string(const std::string& s) {
  if (s == "mean") return Arm::mean;
  if (s == "ae") return Arm::ae;
  throw ConfigError("unknown arm '" + s + "' (expected mean or ae)");
}

Classifier classifier_from_string(const std::string& s) {
  for (const auto& n : kClassifierNames)
    if (s == n.tag) return n.kind;
  std::string known;
  for (const auto& n : kClassifierNames) known += std::string(known.empty() ? "" : ", ") + n.tag;
  throw ConfigError("unknown classifier '" + s + "' (known: " + known + ")");
}

namespace {

using Getter = std::function<std::string(const ExperimentConfig&)>;
using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

struct Entry {
  const char* key;
  const char* tag;  // "paper" or "decision"
  const char* doc;
  Getter get;
  Setter set;
};

std::string fmt(double v) { return csv::format(v); }
std::string fmt(bool v) { return v ? "true" : "false"; }

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError("expected a boolean, got '" + s + "'");
}

double parse_real(const std::string& s) {
  try {
    return csv::parse_double(s, 0);
  } catch (const ParseError&) {
    throw ConfigError("expected a number, got '" + s + "'");
  }
}

long parse_int(const std::string& s) {
  try {
    return csv::parse_long(s, 0);
  } catch (const ParseError&) {
    throw ConfigError("expected an integer, got '" + s + "'");
  }
}

int parse_positive(const std::string& s) {
  const long v = parse_int(s);
  if (v <= 0) throw ConfigError("expected a positive integer, got '" + s + "'");
  return static_cast<int>(v);
}

std::uint64_t parse_seed(const std::string& s) {
  const long v = parse_int(s);
  if (v < 0) throw ConfigError("seed must be non-negative");
  return static_cast<std::uint64_t>(v);
}

double parse_unit(const std::string& s) {
  const double v = parse_real(s);
  if (!(v >= 0 && v <= 1)) throw ConfigError("expected a value in [0, 1], got '" + s + "'");
  return v;
}

double parse_rate(const std::string& s) {
  const double v = parse_real(s);
  if (!(v > 0)) throw ConfigError("expected a positive number, got '" + s + "'");
  return v;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  for (auto f : csv::split(s, ','))
    if (auto t = csv::trim(f); !t.empty()) out.emplace_back(t);
  return out;
}

std::string join_classifiers(const std::vector<Classifier>& cs) {
  std::string out;
  for (auto c : cs) out += (out.empty() ? "" : ",") + to_string(c);
  return out;
}

std::string join_arms(const std::vector<Arm>& arms) {
  if (arms.size() == 2) return "both";
  return arms.empty() ? "" : to_string(arms.front());
}

const std::vector<Entry>& entries() {
  using C = ExperimentConfig;
  static const std::vector<Entry> table{
      // data
      {"dataset", "decision", "WDBC-format CSV: id, diagnosis (M/B), 30 numeric attributes",
       [](const C& c) { return c.dataset.string(); }, [](C& c, const std::string& v) { c.dataset = v; }},
      {"out", "decision", "output directory", [](const C& c) { return c.out.string(); },
       [](C& c, const std::string& v) { c.out = v; }},
      {"seed", "decision", "master seed; trial t uses seed + t",
       [](const C& c) { return std::to_string(c.seed); }, [](C& c, const std::string& v) { c.seed = parse_seed(v); }},
      {"zero_is_missing", "decision", "treat raw zeros as originally missing cells",
       [](const C& c) { return fmt(c.load.zero_is_missing); },
       [](C& c, const std::string& v) { c.load.zero_is_missing = parse_bool(v); }},
      {"header", "decision", "input file has a header row", [](const C& c) { return fmt(c.load.header); },
       [](C& c, const std::string& v) { c.load.header = parse_bool(v); }},
      {"missing_attr_count", "paper", "leading attributes removed from the selected records",
       [](const C& c) { return std::to_string(c.missing_attr_count); },
       [](C& c, const std::string& v) {
         const long n = parse_int(v);
         if (n < 0 || n > kAttributeCount) throw ConfigError("missing_attr_count must be in [0, 30]");
         c.missing_attr_count = n;
       }},
      {"missing_fraction", "paper", "share of each class whose leading attributes are removed (floored)",
       [](const C& c) { return fmt(c.missing_fraction); },
       [](C& c, const std::string& v) { c.missing_fraction = parse_unit(v); }},
      {"sparsity_threshold", "paper", "records with missing share >= this are excluded from autoencoder training",
       [](const C& c) { return fmt(c.sparsity_threshold); },
       [](C& c, const std::string& v) { c.sparsity_threshold = parse_unit(v); }},
      {"leakage_mode", "decision", "paper: fit scaler/imputers on all records; strict: refit per training fold",
       [](const C& c) { return to_string(c.leakage); },
       [](C& c, const std::string& v) {
         if (v == "paper") c.leakage = LeakageMode::paper;
         else if (v == "strict") c.leakage = LeakageMode::strict;
         else throw ConfigError("leakage_mode must be paper or strict");
       }},
      // autoencoder
      {"ae.validation_fraction", "decision", "stratified validation share of the low-sparsity records",
       [](const C& c) { return fmt(c.ae.validation_fraction); },
       [](C& c, const std::string& v) { c.ae.validation_fraction = parse_unit(v); }},
      {"ae.patience", "decision", "epochs without validation improvement before stopping",
       [](const C& c) { return std::to_string(c.ae.patience); },
       [](C& c, const std::string& v) {
         const long p = parse_int(v);
         if (p < 0) throw ConfigError("ae.patience must be non-negative");
         c.ae.patience = static_cast<int>(p);
       }},
      {"ae.max_epochs", "decision", "epoch cap", [](const C& c) { return std::to_string(c.ae.max_epochs); },
       [](C& c, const std::string& v) { c.ae.max_epochs = parse_positive(v); }},
      {"ae.batch_size", "decision", "SGD minibatch size", [](const C& c) { return std::to_string(c.ae.batch_size); },
       [](C& c, const std::string& v) { c.ae.batch_size = parse_positive(v); }},
      {"ae.learning_rate", "decision", "SGD step size", [](const C& c) { return fmt(c.ae.learning_rate); },
       [](C& c, const std::string& v) { c.ae.learning_rate = parse_rate(v); }},
      {"ae.loss", "decision", "full (all 30 outputs) or observed_only",
       [](const C& c) { return std::string(c.ae.loss == AeLoss::full ? "full" : "observed_only"); },
       [](C& c, const std::string& v) {
         if (v == "full") c.ae.loss = AeLoss::full;
         else if (v == "observed_only") c.ae.loss = AeLoss::observed_only;
         else throw ConfigError("ae.loss must be full or observed_only");
       }},
      {"ae.corruption", "decision", "training input corruption: none, empirical (sparse-record masks) or dropout",
       [](const C& c) {
         switch (c.ae.corruption) {
           case AeCorruption::none: return std::string("none");
           case AeCorruption::empirical: return std::string("empirical");
           case AeCorruption::dropout: return std::string("dropout");
         }
         return std::string();
       },
       [](C& c, const std::string& v) {
         if (v == "none") c.ae.corruption = AeCorruption::none;
         else if (v == "empirical") c.ae.corruption = AeCorruption::empirical;
         else if (v == "dropout") c.ae.corruption = AeCorruption::dropout;
         else throw ConfigError("ae.corruption must be none, empirical or dropout");
       }},
      {"ae.corruption_rate", "decision", "share of rows (empirical) or cells (dropout) corrupted",
       [](const C& c) { return fmt(c.ae.corruption_rate); },
       [](C& c, const std::string& v) { c.ae.corruption_rate = parse_unit(v); }},
      // acgan
      {"acgan.noise_dim", "decision", "generator noise width, uniform(-1, 1)",
       [](const C& c) { return std::to_string(c.acgan.noise_dim); },
       [](C& c, const std::string& v) { c.acgan.noise_dim = parse_positive(v); }},
      {"acgan.hidden", "paper", "hidden width of generator and discriminator",
       [](const C& c) { return std::to_string(c.acgan.hidden); },
       [](C& c, const std::string& v) { c.acgan.hidden = parse_positive(v); }},
      {"acgan.batch_size", "decision", "minibatch size", [](const C& c) { return std::to_string(c.acgan.batch_size); },
       [](C& c, const std::string& v) { c.acgan.batch_size = parse_positive(v); }},
      {"acgan.epochs", "decision", "training epochs", [](const C& c) { return std::to_string(c.acgan.epochs); },
       [](C& c, const std::string& v) { c.acgan.epochs = parse_positive(v); }},
      {"acgan.adam_alpha", "decision", "Adam learning rate", [](const C& c) { return fmt(c.acgan.adam_alpha); },
       [](C& c, const std::string& v) { c.acgan.adam_alpha = parse_rate(v); }},
      {"acgan.adam_beta1", "decision", "Adam first-moment decay", [](const C& c) { return fmt(c.acgan.adam_beta1); },
       [](C& c, const std::string& v) { c.acgan.adam_beta1 = parse_unit(v); }},
      {"acgan.d_steps_per_g_step", "decision", "discriminator updates per generator update",
       [](const C& c) { return std::to_string(c.acgan.d_steps_per_g_step); },
       [](C& c, const std::string& v) { c.acgan.d_steps_per_g_step = parse_positive(v); }},
      {"acgan.generator_ema", "decision", "decay of the generator weight average that is returned; 0 disables",
       [](const C& c) { return fmt(c.acgan.generator_ema); },
       [](C& c, const std::string& v) {
         const double d = parse_unit(v);
         if (d >= 1) throw ConfigError("acgan.generator_ema must be below 1");
         c.acgan.generator_ema = d;
       }},
      {"gen.epochs", "decision", "epochs for the whole-dataset AC-GAN behind generator.model and t-SNE",
       [](const C& c) { return std::to_string(c.generator_epochs); },
       [](C& c, const std::string& v) { c.generator_epochs = parse_positive(v); }},
      {"gen.d_steps_per_g_step", "decision", "discriminator updates per generator update for that AC-GAN",
       [](const C& c) { return std::to_string(c.generator_d_steps_per_g_step); },
       [](C& c, const std::string& v) { c.generator_d_steps_per_g_step = parse_positive(v); }},
      // baselines
      {"tree.max_depth", "decision", "-1 for unlimited", [](const C& c) { return std::to_string(c.tree.max_depth); },
       [](C& c, const std::string& v) { c.tree.max_depth = static_cast<int>(parse_int(v)); }},
      {"tree.min_leaf", "decision", "minimum samples per leaf", [](const C& c) { return std::to_string(c.tree.min_leaf); },
       [](C& c, const std::string& v) { c.tree.min_leaf = parse_positive(v); }},
      {"nb.var_smoothing", "decision", "variance floor as a share of the largest attribute variance",
       [](const C& c) { return fmt(c.nb_var_smoothing); },
       [](C& c, const std::string& v) {
         const double s = parse_real(v);
         if (!(s >= 0)) throw ConfigError("nb.var_smoothing must be non-negative");
         c.nb_var_smoothing = s;
       }},
      {"svm.C", "decision", "box constraint", [](const C& c) { return fmt(c.svm.C); },
       [](C& c, const std::string& v) { c.svm.C = parse_rate(v); }},
      {"svm.gamma", "decision", "auto (1/30), scale (1/(30 * mean variance)) or a positive number",
       [](const C& c) {
         switch (c.svm.gamma_mode) {
           case GammaMode::automatic: return std::string("auto");
           case GammaMode::scale: return std::string("scale");
           case GammaMode::fixed: return fmt(c.svm.gamma);
         }
         return std::string();
       },
       [](C& c, const std::string& v) {
         if (v == "auto") c.svm.gamma_mode = GammaMode::automatic;
         else if (v == "scale") c.svm.gamma_mode = GammaMode::scale;
         else {
           c.svm.gamma_mode = GammaMode::fixed;
           c.svm.gamma = parse_rate(v);
         }
       }},
      {"svm.tol", "decision", "KKT gap tolerance", [](const C& c) { return fmt(c.svm.tol); },
       [](C& c, const std::string& v) { c.svm.tol = parse_rate(v); }},
      {"svm.max_iterations", "decision", "SMO iteration cap", [](const C& c) { return std::to_string(c.svm.max_iterations); },
       [](C& c, const std::string& v) { c.svm.max_iterations = parse_positive(v); }},
      {"forest.n_trees", "paper", "trees in the forest", [](const C& c) { return std::to_string(c.forest.n_trees); },
       [](C& c, const std::string& v) { c.forest.n_trees = parse_positive(v); }},
      {"forest.attrs_per_tree", "paper", "random attributes per tree",
       [](const C& c) { return std::to_string(c.forest.attrs_per_tree); },
       [](C& c, const std::string& v) {
         const int n = parse_positive(v);
         if (n > kAttributeCount) throw ConfigError("forest.attrs_per_tree must be at most 30");
         c.forest.attrs_per_tree = n;
       }},
      {"forest.bootstrap", "paper", "draw training records with replacement",
       [](const C& c) { return fmt(c.forest.bootstrap); },
       [](C& c, const std::string& v) { c.forest.bootstrap = parse_bool(v); }},
      {"forest.per_split", "decision", "draw the attribute subset at every split instead of per tree",
       [](const C& c) { return fmt(c.forest.per_split); },
       [](C& c, const std::string& v) { c.forest.per_split = parse_bool(v); }},
      {"adaboost.n_estimators", "paper", "boosting rounds", [](const C& c) { return std::to_string(c.adaboost.n_estimators); },
       [](C& c, const std::string& v) { c.adaboost.n_estimators = parse_positive(v); }},
      {"adaboost.base_depth", "decision", "depth of each weak tree",
       [](const C& c) { return std::to_string(c.adaboost.base_depth); },
       [](C& c, const std::string& v) { c.adaboost.base_depth = parse_positive(v); }},
      {"gboost.n_estimators", "paper", "boosting rounds", [](const C& c) { return std::to_string(c.gboost.n_estimators); },
       [](C& c, const std::string& v) {
         const long n = parse_int(v);
         if (n < 0) throw ConfigError("gboost.n_estimators must be non-negative");
         c.gboost.n_estimators = static_cast<int>(n);
       }},
      {"gboost.learning_rate", "decision", "shrinkage", [](const C& c) { return fmt(c.gboost.learning_rate); },
       [](C& c, const std::string& v) { c.gboost.learning_rate = parse_rate(v); }},
      {"gboost.max_depth", "decision", "regression tree depth", [](const C& c) { return std::to_string(c.gboost.max_depth); },
       [](C& c, const std::string& v) { c.gboost.max_depth = parse_positive(v); }},
      {"mlp.hidden", "paper", "hidden width (same trunk as the discriminator)",
       [](const C& c) { return std::to_string(c.mlp.hidden); },
       [](C& c, const std::string& v) { c.mlp.hidden = parse_positive(v); }},
      {"mlp.epochs", "decision", "epoch cap", [](const C& c) { return std::to_string(c.mlp.epochs); },
       [](C& c, const std::string& v) { c.mlp.epochs = parse_positive(v); }},
      {"mlp.batch_size", "decision", "minibatch size", [](const C& c) { return std::to_string(c.mlp.batch_size); },
       [](C& c, const std::string& v) { c.mlp.batch_size = parse_positive(v); }},
      {"mlp.adam_alpha", "decision", "Adam learning rate", [](const C& c) { return fmt(c.mlp.adam_alpha); },
       [](C& c, const std::string& v) { c.mlp.adam_alpha = parse_rate(v); }},
      {"mlp.l2", "decision", "L2 penalty on weights", [](const C& c) { return fmt(c.mlp.l2); },
       [](C& c, const std::string& v) { c.mlp.l2 = parse_real(v); }},
      {"mlp.tol", "decision", "minimum loss improvement", [](const C& c) { return fmt(c.mlp.tol); },
       [](C& c, const std::string& v) { c.mlp.tol = parse_real(v); }},
      {"mlp.patience", "decision", "epochs without improvement before stopping",
       [](const C& c) { return std::to_string(c.mlp.patience); },
       [](C& c, const std::string& v) { c.mlp.patience = parse_positive(v); }},
      // evaluation
      {"eval.folds", "paper", "cross-validation folds", [](const C& c) { return std::to_string(c.folds); },
       [](C& c, const std::string& v) {
         const int k = parse_positive(v);
         if (k < 2) throw ConfigError("eval.folds must be at least 2");
         c.folds = k;
       }},
      {"eval.trials", "paper", "repetitions of the whole cross-validation", [](const C& c) { return std::to_string(c.trials); },
       [](C& c, const std::string& v) { c.trials = parse_positive(v); }},
      {"eval.threshold", "paper", "score >= threshold predicts malignant", [](const C& c) { return fmt(c.threshold); },
       [](C& c, const std::string& v) { c.threshold = parse_unit(v); }},
      {"eval.roc_grid", "decision", "FPR grid points for the averaged ROC curves",
       [](const C& c) { return std::to_string(c.roc_grid); },
       [](C& c, const std::string& v) {
         const int n = parse_positive(v);
         if (n < 2) throw ConfigError("eval.roc_grid must be at least 2");
         c.roc_grid = n;
       }},
      {"eval.classifiers", "paper", "comma-separated subset, or all", [](const C& c) { return join_classifiers(c.classifiers); },
       [](C& c, const std::string& v) {
         if (v == "all") {
           c.classifiers = all_classifiers();
           return;
         }
         std::vector<Classifier> out;
         for (const auto& name : split_list(v)) {
           const auto k = classifier_from_string(name);
           if (std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
         }
         if (out.empty()) throw ConfigError("eval.classifiers is empty");
         c.classifiers = std::move(out);
       }},
      {"eval.arms", "paper", "mean, ae or both", [](const C& c) { return join_arms(c.arms); },
       [](C& c, const std::string& v) {
         if (v == "both") c.arms = {Arm::mean, Arm::ae};
         else c.arms = {arm_from_string(v)};
       }},
      {"workers", "decision", "parallel (trial, fold) cells; 0 uses all cores",
       [](const C& c) { return std::to_string(c.workers); },
       [](C& c, const std::string& v) {
         const long w = parse_int(v);
         if (w < 0) throw ConfigError("workers must be non-negative");
         c.workers = static_cast<int>(w);
       }},
      // t-SNE
      {"tsne.perplexity", "decision", "effective neighbor count", [](const C& c) { return fmt(c.tsne.perplexity); },
       [](C& c, const std::string& v) { c.tsne.perplexity = parse_rate(v); }},
      {"tsne.iterations", "decision", "gradient steps", [](const C& c) { return std::to_string(c.tsne.iterations); },
       [](C& c, const std::string& v) { c.tsne.iterations = parse_positive(v); }},
      {"tsne.learning_rate", "decision", "step size", [](const C& c) { return fmt(c.tsne.learning_rate); },
       [](C& c, const std::string& v) { c.tsne.learning_rate = parse_rate(v); }},
      {"tsne.exaggeration", "decision", "early exaggeration factor", [](const C& c) { return fmt(c.tsne.exaggeration); },
       [](C& c, const std::string& v) { c.tsne.exaggeration = parse_rate(v); }},
      {"tsne.exaggeration_iterations", "decision", "iterations with exaggerated affinities",
       [](const C& c) { return std::to_string(c.tsne.exaggeration_iterations); },
       [](C& c, const std::string& v) { c.tsne.exaggeration_iterations = static_cast<int>(parse_int(v)); }},
      {"tsne.arm", "decision", "imputation arm the generation-mode models are trained on",
       [](const C& c) { return to_string(c.tsne_arm); },
       [](C& c, const std::string& v) { c.tsne_arm = arm_from_string(v); }},
      {"tsne.generated_per_real", "decision", "generated records per real record in generation mode",
       [](const C& c) { return std::to_string(c.generated_per_real); },
       [](C& c, const std::string& v) { c.generated_per_real = parse_positive(v); }},
  };
  return table;
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig c;
  std::map<std::string, std::size_t> seen;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    std::string_view s = line;
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = csv::trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) throw ConfigError("line " + std::to_string(n) + ": expected key = value");
    const std::string key(csv::trim(s.substr(0, eq)));
    const std::string value(csv::trim(s.substr(eq + 1)));
    const auto& table = entries();
    const auto it = std::find_if(table.begin(), table.end(), [&](const Entry& e) { return key == e.key; });
    if (it == table.end()) throw ConfigError("line " + std::to_string(n) + ": unknown key '" + key + "'");
    if (auto [pos, fresh] = seen.emplace(key, n); !fresh)
      throw ConfigError("line " + std::to_string(n) + ": '" + key + "' already set on line " +
                        std::to_string(pos->second));
    try {
      it->set(c, value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(n) + ": " + key + ": " + e.what());
    }
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  try {
    return parse_config(in);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void set_config_value(ExperimentConfig& config, const std::string& key, const std::string& value) {
  const auto& table = entries();
  const auto it = std::find_if(table.begin(), table.end(), [&](const Entry& e) { return key == e.key; });
  if (it == table.end()) throw ConfigError("unknown key '" + key + "'");
  try {
    it->set(config, value);
  } catch (const ConfigError& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

std::string serialize_config(const ExperimentConfig& config) {
  std::string out;
  for (const auto& e : entries()) out += std::string(e.key) + "=" + e.get(config) + "\n";
  return out;
}

std::string config_template() {
  const ExperimentConfig defaults;
  std::ostringstream out;
  out << "# Experiment configuration. key = value; '#' starts a comment.\n"
      << "# [paper]    value fixed by the reference experiment\n"
      << "# [decision] left open by the reference experiment; chosen here\n";
  std::string section;
  for (const auto& e : entries()) {
    const std::string key = e.key;
    const auto dot = key.find('.');
    const std::string sec = dot == std::string::npos ? "general" : key.substr(0, dot);
    if (sec != section) {
      out << "\n# --- " << sec << " ---\n";
      section = sec;
    }
    out << "# [" << e.tag << "] " << e.doc << '\n' << key << " = " << e.get(defaults) << '\n';
  }
  return out.str();
}

AcganConfig generator_training_config(const ExperimentConfig& config, std::uint64_t seed) {
  AcganConfig a = config.acgan;
  a.epochs = config.generator_epochs;
  a.d_steps_per_g_step = config.generator_d_steps_per_g_step;
  a.seed = seed;
  return a;
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string config_hash(const ExperimentConfig& config) {
  // Output location and worker count do not change results, so they stay out of the hash.
  std::string text;
  for (const auto& e : entries()) {
    const std::string_view key = e.key;
    if (key == "out" || key == "workers") continue;
    text += std::string(key) + "=" + e.get(config) + "\n";
  }
  return fnv1a_hex(text);
}

}  // namespace ehrgan
