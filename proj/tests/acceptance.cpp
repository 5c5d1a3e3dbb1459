// Prints one PASS/FAIL line per acceptance criterion and exits non-zero if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>

#include "ehrgan/acgan.hpp"
#include "ehrgan/baselines.hpp"
#include "ehrgan/eval.hpp"
#include "ehrgan/impute.hpp"
#include "support.hpp"

using namespace ehrgan;

namespace {

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
  std::printf("CRITERION %d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

bool within(double value, double target, double tol) { return std::abs(value - target) <= tol; }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

struct Grid {
  ExperimentReport report;
  std::string metrics_csv;
  std::string hash;
  double seconds;
};

Grid run_grid(const SimulatedMissing& prepared, int workers) {
  ExperimentConfig cfg;
  cfg.dataset = testing::data_file();
  cfg.workers = workers;
  const auto start = std::chrono::steady_clock::now();
  Grid g{run_cv_experiment(prepared, cfg), {}, config_hash(cfg), 0};
  g.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ostringstream out;
  write_metrics_csv(out, g.report);
  g.metrics_csv = out.str();
  return g;
}

// --- numerical correctness -------------------------------------------------

double worst_grad_check() {
  double worst = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(derive_seed(seed, 0x6c));
    const MatrixXd x = testing::random_matrix(8, kAttributeCount, rng, 0, 1);
    MatrixXd binary(8, 2);
    for (Eigen::Index i = 0; i < 8; ++i) binary.row(i) << double(rng.below(2)), double(rng.below(2));

    worst = std::max(worst, grad_check(make_autoencoder_net(rng), x, LossKind::mse,
                                       testing::random_matrix(8, kAttributeCount, rng, 0, 1)));

    // Both discriminator heads through their sigmoids; the class row gets non-zero weights.
    NetParams d = make_discriminator(50, rng).net;
    d.layers.back().weights.row(1) = testing::random_matrix(1, 50, rng, -0.3, 0.3);
    d.layers.back().activation = Activation::sigmoid;
    worst = std::max(worst, grad_check(d, x, LossKind::bce, binary));

    GeneratorModel g = make_generator(32, 50, rng);
    g.net.layers.front().weights.col(32) = testing::random_matrix(50, 1, rng, -0.3, 0.3);
    MatrixXd gin = testing::random_matrix(8, 33, rng);
    for (Eigen::Index i = 0; i < 8; ++i) gin(i, 32) = rng.below(2) ? 1.0 : -1.0;
    worst = std::max(worst, grad_check(g.net, gin, LossKind::mse, testing::random_matrix(8, 30, rng, 0, 1)));

    worst = std::max(worst, grad_check(make_mlp_net(50, rng), x, LossKind::bce, MatrixXd(binary.col(0))));
  }
  return worst;
}

int auc_mismatches() {
  Rng rng(0xa0c);
  int bad = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto n = static_cast<Eigen::Index>(2 + rng.below(19));
    const LabelVector y = testing::random_labels(n, rng);
    VectorXd s(n);
    const auto levels = 1 + rng.below(8);
    for (Eigen::Index i = 0; i < n; ++i) s[i] = static_cast<double>(rng.below(levels)) / 7.0;
    long long twice = 0, pos = 0, neg = 0;
    for (Eigen::Index i = 0; i < n; ++i) (y[i] == 1 ? pos : neg)++;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        if (y[i] == 1 && y[j] == 0) twice += s[i] > s[j] ? 2 : s[i] == s[j] ? 1 : 0;
    const double mw = static_cast<double>(twice) / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
    bad += auc(roc_curve(s, y)) != mw;
  }
  return bad;
}

int fold_violations() {
  Rng rng(0xf01d);
  int bad = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 5;
    const auto n = static_cast<Eigen::Index>(10 + rng.below(600));
    const LabelVector y = testing::random_labels(n, rng, k);
    const FoldPlan plan = stratified_kfold(y, k, rng.next());
    std::vector<int> seen(static_cast<std::size_t>(n), 0);
    Eigen::Index min_size = n, max_size = 0, min_pos = n, max_pos = 0;
    for (int f = 0; f < k; ++f) {
      const auto test = plan.test_indices(f);
      Eigen::Index p = 0;
      for (Eigen::Index i : test) {
        ++seen[static_cast<std::size_t>(i)];
        p += y[i];
      }
      const auto size = static_cast<Eigen::Index>(test.size());
      min_size = std::min(min_size, size);
      max_size = std::max(max_size, size);
      min_pos = std::min(min_pos, p);
      max_pos = std::max(max_pos, p);
      if (static_cast<Eigen::Index>(plan.train_indices(f).size()) + size != n) ++bad;
    }
    for (int c : seen) bad += c != 1;
    bad += max_size - min_size > 1;
    bad += max_pos - min_pos > 1;
  }
  return bad;
}

// --- oracle equivalences ---------------------------------------------------

bool adam_matches_scalar_oracle() {
  const AdamHyper h{0.01, 0.9, 0.999, 1e-8};
  NetParams net;
  net.layers.push_back({MatrixXd::Constant(1, 1, 0.5), VectorXd::Zero(1), Activation::identity});
  AdamState<double> st(net, h);
  double theta = 0.5, m = 0, v = 0;
  bool ok = true;
  int t = 0;
  for (double g : {0.3, -1.2}) {
    NetParams grad = net.zeros_like();
    grad.layers[0].weights(0, 0) = g;
    adam_step(net, grad, st);
    ++t;
    m = h.beta1 * m + (1 - h.beta1) * g;
    v = h.beta2 * v + (1 - h.beta2) * g * g;
    theta -= h.alpha * (m / (1 - std::pow(h.beta1, t))) / (std::sqrt(v / (1 - std::pow(h.beta2, t))) + h.epsilon);
    ok = ok && std::abs(net.layers[0].weights(0, 0) - theta) <= 1e-12;
  }
  return ok;
}

bool forest_reduces_to_tree(const MatrixXd& X, const LabelVector& y) {
  ForestConfig fc;
  fc.n_trees = 1;
  fc.attrs_per_tree = kAttributeCount;
  fc.bootstrap = false;
  fc.seed = 77;
  return fit_random_forest(X, y, fc).score(X) == fit_decision_tree(X, y).score(X);
}

bool boosting_zero_is_base_rate(const MatrixXd& X, const LabelVector& y) {
  GradientBoostingConfig gc;
  gc.n_estimators = 0;
  const VectorXd p = fit_gradient_boosting(X, y, gc).score(X);
  const double rate = y.cast<double>().mean();
  return (p.array() - rate).abs().maxCoeff() <= 1e-12;
}

Eigen::Index label_swap_disagreements(const MatrixXd& X, const LabelVector& y) {
  AcganConfig cfg;
  cfg.seed = 0x5a9;
  const VectorXd p = predict_proba(train_acgan(X, y, cfg).discriminator, X);
  const VectorXd q = predict_proba(train_acgan(X, (1 - y.array()).matrix(), cfg).discriminator, X);
  Eigen::Index bad = 0;
  for (Eigen::Index i = 0; i < X.rows(); ++i) bad += (p[i] >= 0.5) == (q[i] >= 0.5);
  return bad;
}

}  // namespace

int main() {
  ExperimentConfig defaults;
  const MaskedMatrix raw = load_wdbc(testing::data_file(), defaults.load);
  const SimulatedMissing prepared =
      simulate_missing(raw, defaults.missing_attr_count, defaults.missing_fraction, defaults.seed);

  std::printf("running the full %d x %d-fold grid...\n", defaults.trials, defaults.folds);
  std::fflush(stdout);
  const Grid first = run_grid(prepared, 0);
  const ExperimentReport& r = first.report;
  std::printf("grid finished in %.1f s, %d failed cells\n", first.seconds, r.failed_cells);

  {
    const auto& g = r.row(Arm::ae, Classifier::acgan);
    const bool pass = r.failed_cells == 0 && within(g.mean[0], 0.9777, 0.02) && within(g.mean[4], 0.9688, 0.025) &&
                      within(g.mean[3], 0.9889, 0.01) && first.seconds <= 1800;
    report(1, pass,
           "AC-GAN/AE accuracy " + fmt(g.mean[0]) + " (0.9777 +-0.02), F " + fmt(g.mean[4]) +
               " (0.9688 +-0.025), AUC " + fmt(g.mean[3]) + " (0.9889 +-0.01), " + fmt(first.seconds) + " s");
  }
  {
    const auto& g = r.row(Arm::mean, Classifier::acgan);
    const auto& svm = r.row(Arm::mean, Classifier::svm);
    const bool pass = within(g.mean[0], 0.9752, 0.02) && within(svm.mean[2], 0.9944, 0.01);
    report(2, pass,
           "AC-GAN/mean accuracy " + fmt(g.mean[0]) + " (0.9752 +-0.02), SVM/mean specificity " + fmt(svm.mean[2]) +
               " (0.9944 +-0.01)");
  }
  {
    bool pass = true;
    std::string detail;
    for (Arm arm : {Arm::mean, Arm::ae}) {
      const auto& g = r.row(arm, Classifier::acgan);
      double best_acc = 0, best_f = 0;
      std::string best_name;
      for (Classifier c : all_classifiers()) {
        if (c == Classifier::acgan) continue;
        const auto& b = r.row(arm, c);
        pass = pass && g.mean[0] > b.mean[0] && g.mean[4] > b.mean[4];
        if (b.mean[0] > best_acc) best_acc = b.mean[0], best_name = display_name(c);
        best_f = std::max(best_f, b.mean[4]);
      }
      detail += to_string(arm) + ": AC-GAN acc " + fmt(g.mean[0]) + " vs best baseline " + fmt(best_acc) + " (" +
                best_name + "), F " + fmt(g.mean[4]) + " vs " + fmt(best_f) + "; ";
    }
    report(3, pass, detail);
  }
  {
    int improved = 0;
    std::string worse;
    for (Classifier c : all_classifiers()) {
      if (r.row(Arm::ae, c).mean[0] >= r.row(Arm::mean, c).mean[0]) ++improved;
      else worse += " " + display_name(c);
    }
    report(4, improved >= 6, std::to_string(improved) + "/8 classifiers not worse on the AE arm (need 6)" +
                                 (worse.empty() ? "" : "; worse:" + worse));
  }
  {
    report(5, r.ae_imputation_rmse < r.mean_imputation_rmse,
           "AE RMSE " + fmt(r.ae_imputation_rmse) + " < mean RMSE " + fmt(r.mean_imputation_rmse) + " over " +
               std::to_string(prepared.truth.size()) + " simulated cells");
  }
  {
    const double gc = worst_grad_check();
    const int auc_bad = auc_mismatches();
    const int fold_bad = fold_violations();
    report(6, gc <= 1e-4 && auc_bad == 0 && fold_bad == 0,
           "worst grad_check " + std::to_string(gc) + " (<= 1e-4), AUC != Mann-Whitney in " + std::to_string(auc_bad) +
               "/1000, fold invariant violations " + std::to_string(fold_bad) + "/100 label vectors");
  }
  {
    const ScalingParams sp = fit_minmax(raw);
    const MaskedMatrix scaled = apply_minmax(raw, sp);
    const MatrixXd X = impute_mean(fit_mean_imputer(scaled), scaled);
    const bool adam = adam_matches_scalar_oracle();
    const bool forest = forest_reduces_to_tree(X, scaled.labels);
    const bool boost = boosting_zero_is_base_rate(X, scaled.labels);
    const Eigen::Index swap_bad = label_swap_disagreements(X, scaled.labels);
    report(7, adam && forest && boost && swap_bad == 0,
           std::string("Adam two-step oracle ") + (adam ? "ok" : "mismatch") + ", forest->tree " +
               (forest ? "ok" : "mismatch") + ", boosting(0) base rate " + (boost ? "ok" : "mismatch") +
               ", label swap non-complemented " + std::to_string(swap_bad) + "/" + std::to_string(X.rows()));
  }
  {
    std::printf("re-running the grid with 2 workers for the determinism check...\n");
    std::fflush(stdout);
    const Grid second = run_grid(prepared, 2);
    const bool pass = first.hash == second.hash && first.metrics_csv == second.metrics_csv;
    report(8, pass,
           "config " + first.hash + ", metrics.csv " + std::to_string(first.metrics_csv.size()) + " bytes, " +
               (first.metrics_csv == second.metrics_csv ? "byte-identical" : "DIFFERENT") + " on re-run");
  }

  std::printf("%s: %d criteria failed\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
  return failures == 0 ? 0 : 1;
}
