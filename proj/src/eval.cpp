#include "ehrgan/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <ostream>
#include <thread>

#include "ehrgan/csv.hpp"

namespace ehrgan {

ConfusionCounts confusion(const VectorXd& scores, const LabelVector& labels, double threshold) {
  if (scores.size() != labels.size()) throw ShapeError("score and label counts differ");
  if (scores.size() == 0) throw DomainError("confusion counts need at least one sample");
  ConfusionCounts c;
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) throw DomainError("labels must be 0 or 1");
    const bool predicted = scores[i] >= threshold;
    if (labels[i] == 1) (predicted ? c.tp : c.fn)++;
    else (predicted ? c.fp : c.tn)++;
  }
  return c;
}

Metrics metrics(const ConfusionCounts& c) {
  Metrics m;
  auto ratio = [&m](double num, double den) {
    if (den == 0) {
      m.degenerate = true;
      return 0.0;
    }
    return num / den;
  };
  m.accuracy = ratio(static_cast<double>(c.tp + c.tn), static_cast<double>(c.total()));
  m.sensitivity = ratio(static_cast<double>(c.tp), static_cast<double>(c.tp + c.fn));
  m.specificity = ratio(static_cast<double>(c.tn), static_cast<double>(c.tn + c.fp));
  m.precision = ratio(static_cast<double>(c.tp), static_cast<double>(c.tp + c.fp));
  m.f_score = ratio(2.0 * m.precision * m.sensitivity, m.precision + m.sensitivity);
  return m;
}

RocCurve roc_curve(const VectorXd& scores, const LabelVector& labels) {
  if (scores.size() != labels.size()) throw ShapeError("score and label counts differ");
  const auto pos = (labels.array() == 1).count();
  const auto neg = (labels.array() == 0).count();
  if (pos + neg != labels.size()) throw DomainError("labels must be 0 or 1");
  if (pos == 0 || neg == 0) throw DomainError("ROC curve needs both classes");
  if (!scores.allFinite()) throw DomainError("scores must be finite");

  std::vector<Eigen::Index> order(static_cast<std::size_t>(scores.size()));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] > scores[b]; });

  RocCurve curve{{{0.0, 0.0}}, {{0, 0}}, static_cast<long>(pos), static_cast<long>(neg)};
  long tp = 0, fp = 0;
  for (std::size_t k = 0; k < order.size();) {
    const double s = scores[order[k]];
    for (; k < order.size() && scores[order[k]] == s; ++k) (labels[order[k]] == 1 ? tp : fp)++;
    curve.points.push_back(
        {static_cast<double>(fp) / static_cast<double>(neg), static_cast<double>(tp) / static_cast<double>(pos)});
    curve.counts.emplace_back(fp, tp);
  }
  return curve;
}

double auc(const RocCurve& curve) {
  if (!curve.counts.empty() && curve.counts.size() == curve.points.size() && curve.positives > 0 &&
      curve.negatives > 0) {
    long long twice_area = 0;  // in units of one (negative, positive) pair
    for (std::size_t k = 1; k < curve.counts.size(); ++k)
      twice_area += static_cast<long long>(curve.counts[k].first - curve.counts[k - 1].first) *
                    (curve.counts[k].second + curve.counts[k - 1].second);
    return static_cast<double>(twice_area) /
           (2.0 * static_cast<double>(curve.positives) * static_cast<double>(curve.negatives));
  }
  double area = 0.0;
  const auto& p = curve.points;
  for (std::size_t k = 1; k < p.size(); ++k) area += (p[k].fpr - p[k - 1].fpr) * (p[k].tpr + p[k - 1].tpr) / 2.0;
  return area;
}

std::vector<double> roc_on_grid(const RocCurve& roc, int grid) {
  if (grid < 2) throw DomainError("ROC grid needs at least 2 points");
  const auto& curve = roc.points;
  if (curve.empty()) throw DomainError("empty ROC curve");
  std::vector<double> out(static_cast<std::size_t>(grid));
  std::size_t k = 0;
  for (int g = 0; g < grid; ++g) {
    const double x = static_cast<double>(g) / static_cast<double>(grid - 1);
    while (k + 1 < curve.size() && curve[k + 1].fpr <= x) ++k;
    const auto& a = curve[k];
    if (a.fpr == x || k + 1 == curve.size()) {
      out[static_cast<std::size_t>(g)] = a.tpr;
    } else {
      const auto& b = curve[k + 1];
      out[static_cast<std::size_t>(g)] = a.tpr + (b.tpr - a.tpr) * (x - a.fpr) / (b.fpr - a.fpr);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

const SummaryRow& ExperimentReport::row(Arm arm, Classifier c) const {
  for (const auto& r : rows)
    if (r.arm == arm && r.classifier == c) return r;
  throw DomainError("report has no row for " + to_string(arm) + "/" + to_string(c));
}

MatrixXd ArmPipeline::complete(Arm arm, const MaskedMatrix& unscaled) const {
  const MaskedMatrix scaled = apply_minmax(unscaled, scaling);
  return arm == Arm::mean ? impute_mean(mean_stats, scaled) : impute_autoencoder(autoencoder, scaled);
}

ArmPipeline fit_arm_pipeline(const MaskedMatrix& unscaled, const ExperimentConfig& config, std::uint64_t seed) {
  ArmPipeline p;
  p.scaling = fit_minmax(unscaled);
  const MaskedMatrix scaled = apply_minmax(unscaled, p.scaling);
  p.mean_stats = fit_mean_imputer(scaled);
  const SparsitySplit split = split_by_sparsity(scaled, config.sparsity_threshold);
  AeConfig ae = config.ae;
  ae.seed = seed;
  p.autoencoder = train_autoencoder(split.low, ae, split.high.mask);
  return p;
}

ScorerModel fit_classifier(Classifier c, const MatrixXd& X, const LabelVector& y, const ExperimentConfig& config,
                           std::uint64_t seed) {
  switch (c) {
    case Classifier::acgan: {
      AcganConfig a = config.acgan;
      a.seed = seed;
      auto d = std::make_shared<const DiscriminatorModel>(train_acgan(X, y, a).discriminator);
      return {"acgan", [d](const MatrixXd& rows) { return predict_proba(*d, rows); }};
    }
    case Classifier::mlp: {
      MlpConfig m = config.mlp;
      m.seed = seed;
      return fit_mlp(X, y, m);
    }
    case Classifier::decision_tree: return fit_decision_tree(X, y, config.tree);
    case Classifier::naive_bayes: return fit_naive_bayes(X, y, config.nb_var_smoothing);
    case Classifier::svm: return fit_svm_rbf(X, y, config.svm);
    case Classifier::random_forest: {
      ForestConfig f = config.forest;
      f.seed = seed;
      return fit_random_forest(X, y, f);
    }
    case Classifier::adaboost: return fit_adaboost(X, y, config.adaboost);
    case Classifier::gradient_boosting: return fit_gradient_boosting(X, y, config.gboost);
  }
  throw DomainError("unknown classifier");
}

namespace {

constexpr std::uint64_t kAutoencoderStream = 0xAE;

std::string sanitize(std::string s) {
  for (char& ch : s)
    if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
  return s;
}

void summarize(ExperimentReport& report, const ExperimentConfig& config) {
  for (Arm arm : config.arms)
    for (Classifier c : config.classifiers) {
      SummaryRow row{arm, c};
      std::vector<const CellResult*> ok;
      for (const auto& cell : report.cells)
        if (cell.arm == arm && cell.classifier == c && cell.error.empty()) ok.push_back(&cell);
      row.n_cells = static_cast<int>(ok.size());
      for (std::size_t m = 0; m < kMetricNames.size(); ++m) {
        if (ok.empty()) {
          row.mean[m] = row.stddev[m] = std::numeric_limits<double>::quiet_NaN();
          continue;
        }
        double sum = 0.0;
        for (const auto* cell : ok) sum += cell->values[m];
        const double mean = sum / static_cast<double>(ok.size());
        double ss = 0.0;
        for (const auto* cell : ok) ss += (cell->values[m] - mean) * (cell->values[m] - mean);
        row.mean[m] = mean;
        row.stddev[m] = ok.size() > 1 ? std::sqrt(ss / static_cast<double>(ok.size() - 1)) : 0.0;
      }
      report.rows.push_back(row);
    }
}

}  // namespace

ExperimentReport run_cv_experiment(const SimulatedMissing& prepared, const ExperimentConfig& config,
                                   const ProgressFn& progress) {
  const MaskedMatrix& data = prepared.data;
  if (config.trials <= 0 || config.folds < 2) throw ConfigError("need at least one trial and two folds");
  if (config.arms.empty() || config.classifiers.empty()) throw ConfigError("no arms or classifiers selected");
  const Eigen::Index n = data.rows();
  const auto n_arms = config.arms.size();
  const auto n_cls = config.classifiers.size();

  ExperimentReport report;

  // Whole-dataset imputers: the inputs for paper mode, and the imputation-quality figures in both modes.
  const ArmPipeline global = fit_arm_pipeline(data, config, derive_seed(config.seed, kAutoencoderStream));
  const MatrixXd global_mean = global.complete(Arm::mean, data);
  const MatrixXd global_ae = global.complete(Arm::ae, data);
  if (!prepared.truth.empty()) {
    const GroundTruth truth = scale_truth(prepared.truth, global.scaling);
    report.mean_imputation_rmse = imputation_rmse(global_mean, truth);
    report.ae_imputation_rmse = imputation_rmse(global_ae, truth);
  }

  std::vector<FoldPlan> plans;
  for (int t = 0; t < config.trials; ++t)
    plans.push_back(stratified_kfold(data.labels, config.folds, config.seed + static_cast<std::uint64_t>(t)));

  const int n_units = config.trials * config.folds;
  report.cells.resize(static_cast<std::size_t>(n_units) * n_arms * n_cls);
  // Held-out scores pooled per (trial, arm, classifier); folds write disjoint rows.
  std::vector<VectorXd> pooled(static_cast<std::size_t>(config.trials) * n_arms * n_cls, VectorXd::Zero(n));
  auto pooled_at = [&](int t, std::size_t a, std::size_t c) -> VectorXd& {
    return pooled[(static_cast<std::size_t>(t) * n_arms + a) * n_cls + c];
  };

  auto run_unit = [&](int unit) {
    const int t = unit / config.folds;
    const int f = unit % config.folds;
    const std::uint64_t trial_seed = config.seed + static_cast<std::uint64_t>(t);
    const std::uint64_t unit_seed = derive_seed(trial_seed, static_cast<std::uint64_t>(f));
    const auto train_idx = plans[static_cast<std::size_t>(t)].train_indices(f);
    const auto test_idx = plans[static_cast<std::size_t>(t)].test_indices(f);
    const LabelVector y_train = select_rows(data.labels, train_idx);
    const LabelVector y_test = select_rows(data.labels, test_idx);

    std::string pipeline_error;
    ArmPipeline local;
    if (config.leakage == LeakageMode::strict) {
      try {
        local = fit_arm_pipeline(select_rows(data, train_idx), config, derive_seed(unit_seed, kAutoencoderStream));
      } catch (const std::exception& e) {
        pipeline_error = std::string("imputation: ") + e.what();
      }
    }

    for (std::size_t a = 0; a < n_arms; ++a) {
      const Arm arm = config.arms[a];
      MatrixXd X_train, X_test;
      if (pipeline_error.empty()) {
        if (config.leakage == LeakageMode::paper) {
          const MatrixXd& full = arm == Arm::mean ? global_mean : global_ae;
          X_train = select_rows(full, train_idx);
          X_test = select_rows(full, test_idx);
        } else {
          X_train = local.complete(arm, select_rows(data, train_idx));
          X_test = local.complete(arm, select_rows(data, test_idx));
        }
      }
      for (std::size_t c = 0; c < n_cls; ++c) {
        CellResult& cell = report.cells[(static_cast<std::size_t>(unit) * n_arms + a) * n_cls + c];
        cell.trial = t;
        cell.fold = f;
        cell.arm = arm;
        cell.classifier = config.classifiers[c];
        if (!pipeline_error.empty()) {
          cell.error = pipeline_error;
          continue;
        }
        try {
          const std::uint64_t seed = derive_seed(unit_seed, 16 * (a + 1) + static_cast<std::uint64_t>(cell.classifier));
          const ScorerModel model = fit_classifier(cell.classifier, X_train, y_train, config, seed);
          const VectorXd scores = model.score(X_test);
          if (!scores.allFinite()) throw NumericError("non-finite scores");
          const Metrics m = metrics(confusion(scores, y_test, config.threshold));
          cell.values = {m.accuracy, m.sensitivity, m.specificity, auc(roc_curve(scores, y_test)), m.f_score};
          cell.degenerate = m.degenerate;
          VectorXd& pool = pooled_at(t, a, c);
          for (std::size_t k = 0; k < test_idx.size(); ++k) pool[test_idx[k]] = scores[static_cast<Eigen::Index>(k)];
        } catch (const std::exception& e) {
          cell.error = e.what();
        }
      }
    }
  };

  int workers = config.workers > 0 ? config.workers : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, n_units);
  std::atomic<int> next{0};
  std::mutex progress_lock;
  int done = 0;
  auto worker = [&] {
    for (int unit = next++; unit < n_units; unit = next++) {
      run_unit(unit);
      if (progress) {
        std::lock_guard lock(progress_lock);
        progress(++done, n_units);
      }
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  for (const auto& cell : report.cells)
    if (!cell.error.empty()) ++report.failed_cells;
  summarize(report, config);

  for (std::size_t a = 0; a < n_arms; ++a)
    for (std::size_t c = 0; c < n_cls; ++c) {
      AveragedRoc avg{config.arms[a], config.classifiers[c], {}, {}, 0};
      std::vector<double> sum(static_cast<std::size_t>(config.roc_grid), 0.0);
      for (int t = 0; t < config.trials; ++t) {
        const bool complete = std::none_of(report.cells.begin(), report.cells.end(), [&](const CellResult& cell) {
          return cell.trial == t && cell.arm == avg.arm && cell.classifier == avg.classifier && !cell.error.empty();
        });
        if (!complete) continue;
        const auto g = roc_on_grid(roc_curve(pooled_at(t, a, c), data.labels), config.roc_grid);
        for (std::size_t k = 0; k < g.size(); ++k) sum[k] += g[k];
        ++avg.n_trials;
      }
      if (avg.n_trials == 0) continue;
      for (int k = 0; k < config.roc_grid; ++k) {
        avg.fpr.push_back(static_cast<double>(k) / static_cast<double>(config.roc_grid - 1));
        avg.tpr.push_back(sum[static_cast<std::size_t>(k)] / avg.n_trials);
      }
      report.roc.push_back(std::move(avg));
    }
  return report;
}

void write_metrics_csv(std::ostream& out, const ExperimentReport& report) {
  out << "arm,classifier,metric,mean,std,n_cells\n";
  for (const auto& r : report.rows)
    for (std::size_t m = 0; m < kMetricNames.size(); ++m)
      out << to_string(r.arm) << ',' << to_string(r.classifier) << ',' << kMetricNames[m] << ','
          << csv::format(r.mean[m]) << ',' << csv::format(r.stddev[m]) << ',' << r.n_cells << '\n';
}

void write_percell_csv(std::ostream& out, const ExperimentReport& report) {
  out << "trial,fold,arm,classifier,accuracy,sensitivity,specificity,auc,f_score,flags\n";
  for (const auto& c : report.cells) {
    out << c.trial << ',' << c.fold << ',' << to_string(c.arm) << ',' << to_string(c.classifier);
    for (double v : c.values) out << ',' << (c.error.empty() ? csv::format(v) : std::string());
    out << ',';
    if (!c.error.empty()) out << "error:" << sanitize(c.error);
    else if (c.degenerate) out << "zero_division";
    out << '\n';
  }
}

void write_roc_csv(std::ostream& out, const ExperimentReport& report) {
  out << "arm,classifier,fpr,tpr\n";
  for (const auto& r : report.roc)
    for (std::size_t k = 0; k < r.fpr.size(); ++k)
      out << to_string(r.arm) << ',' << to_string(r.classifier) << ',' << csv::format(r.fpr[k]) << ','
          << csv::format(r.tpr[k]) << '\n';
}

}  // namespace ehrgan
