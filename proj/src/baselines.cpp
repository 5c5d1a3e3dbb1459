#include "ehrgan/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ehrgan {

namespace {

void check_xy(const MatrixXd& X, const LabelVector& y) {
  if (X.rows() == 0) throw DomainError("no training samples");
  if (X.rows() != y.size()) throw ShapeError("feature and label counts differ");
  for (Eigen::Index i = 0; i < y.size(); ++i)
    if (y[i] != 0 && y[i] != 1) throw DomainError("labels must be 0 or 1");
}

void check_both_classes(const LabelVector& y) {
  const auto pos = (y.array() == 1).count();
  if (pos == 0 || pos == y.size()) throw DomainError("both classes must be present");
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Additive node statistics shared by both tree kinds. Classification: (sum w, sum w*y, unused);
// regression: (count, sum r, sum r^2).
struct Stats {
  double w = 0, a = 0, b = 0;
  Stats& operator+=(const Stats& o) {
    w += o.w;
    a += o.a;
    b += o.b;
    return *this;
  }
  Stats operator-(const Stats& o) const { return {w - o.w, a - o.a, b - o.b}; }
};

enum class Criterion { gini, squared_error };

double impurity(const Stats& s, Criterion c) {
  if (s.w <= 0) return 0.0;
  if (c == Criterion::gini) return 2.0 * s.a * (s.w - s.a) / s.w;  // w * gini
  return std::max(0.0, s.b - s.a * s.a / s.w);                     // sum of squared deviations
}

struct TreeBuilder {
  const MatrixXd& X;
  std::vector<Stats> row_stats;
  Criterion criterion;
  TreeConfig config;
  std::vector<int> attributes;
  int per_split = 0;
  Rng* rng = nullptr;
  std::function<double(const std::vector<Eigen::Index>&)> leaf_value;
  std::vector<TreeNode> nodes;

  int build(std::vector<Eigen::Index>& rows, int depth) {
    Stats total;
    for (auto i : rows) total += row_stats[static_cast<std::size_t>(i)];
    const int id = static_cast<int>(nodes.size());
    nodes.push_back({});
    nodes[id].weight = total.w;
    nodes[id].value = criterion == Criterion::gini ? (total.w > 0 ? total.a / total.w : 0.0) : leaf_value(rows);

    const double parent = impurity(total, criterion);
    const bool pure = parent <= 1e-12 * std::max(1.0, total.w);
    if (pure || (config.max_depth >= 0 && depth >= config.max_depth) ||
        rows.size() < static_cast<std::size_t>(2 * config.min_leaf))
      return id;

    std::vector<int> candidates = attributes;
    if (per_split > 0 && per_split < static_cast<int>(candidates.size())) {
      for (int k = 0; k < per_split; ++k) {
        const auto j = k + static_cast<int>(rng->below(candidates.size() - static_cast<std::size_t>(k)));
        std::swap(candidates[static_cast<std::size_t>(k)], candidates[static_cast<std::size_t>(j)]);
      }
      candidates.resize(static_cast<std::size_t>(per_split));
      std::sort(candidates.begin(), candidates.end());
    }

    double best = std::numeric_limits<double>::infinity();
    int best_attr = -1;
    double best_threshold = 0.0;
    std::vector<Eigen::Index> sorted = rows;
    for (int attr : candidates) {
      std::stable_sort(sorted.begin(), sorted.end(),
                       [&](Eigen::Index p, Eigen::Index q) { return X(p, attr) < X(q, attr); });
      Stats left;
      for (std::size_t k = 0; k + 1 < sorted.size(); ++k) {
        left += row_stats[static_cast<std::size_t>(sorted[k])];
        const double lo = X(sorted[k], attr), hi = X(sorted[k + 1], attr);
        if (!(lo < hi)) continue;
        if (k + 1 < static_cast<std::size_t>(config.min_leaf) ||
            sorted.size() - k - 1 < static_cast<std::size_t>(config.min_leaf))
          continue;
        const double score = impurity(left, criterion) + impurity(total - left, criterion);
        if (score < best) {
          best = score;
          best_attr = attr;
          best_threshold = 0.5 * (lo + hi);
          if (!(best_threshold < hi)) best_threshold = lo;
        }
      }
    }
    if (best_attr < 0) return id;

    std::vector<Eigen::Index> left_rows, right_rows;
    for (auto i : rows) (X(i, best_attr) <= best_threshold ? left_rows : right_rows).push_back(i);
    rows.clear();
    rows.shrink_to_fit();
    const int l = build(left_rows, depth + 1);
    const int r = build(right_rows, depth + 1);
    nodes[id].attr = best_attr;
    nodes[id].threshold = best_threshold;
    nodes[id].left = l;
    nodes[id].right = r;
    return id;
  }
};

std::vector<int> all_attributes(Eigen::Index n) {
  std::vector<int> a(static_cast<std::size_t>(n));
  std::iota(a.begin(), a.end(), 0);
  return a;
}

}  // namespace

// ---------------------------------------------------------------------------

double DecisionTree::predict(const double* row, Eigen::Index stride) const {
  int k = 0;
  while (nodes[static_cast<std::size_t>(k)].attr >= 0) {
    const auto& n = nodes[static_cast<std::size_t>(k)];
    k = row[n.attr * stride] <= n.threshold ? n.left : n.right;
  }
  return nodes[static_cast<std::size_t>(k)].value;
}

VectorXd DecisionTree::predict(const MatrixXd& rows) const {
  VectorXd out(rows.rows());
  for (Eigen::Index i = 0; i < rows.rows(); ++i) out[i] = predict(rows.data() + i, rows.outerStride());
  return out;
}

int DecisionTree::depth() const {
  std::function<int(int)> rec = [&](int k) -> int {
    const auto& n = nodes[static_cast<std::size_t>(k)];
    return n.attr < 0 ? 0 : 1 + std::max(rec(n.left), rec(n.right));
  };
  return nodes.empty() ? 0 : rec(0);
}

int DecisionTree::leaf_count() const {
  return static_cast<int>(std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.attr < 0; }));
}

std::vector<int> DecisionTree::split_attributes() const {
  std::vector<int> out;
  for (const auto& n : nodes)
    if (n.attr >= 0) out.push_back(n.attr);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

DecisionTree grow_classification_tree(const MatrixXd& X, const LabelVector& y, const VectorXd& weights,
                                      const TreeConfig& config, const std::vector<int>& attributes,
                                      int per_split_attributes, Rng* rng) {
  check_xy(X, y);
  if (weights.size() != 0 && weights.size() != X.rows()) throw ShapeError("weight count differs from sample count");
  if (per_split_attributes > 0 && rng == nullptr) throw DomainError("per-split attribute sampling needs an rng");
  TreeBuilder b{X, {}, Criterion::gini, config, attributes.empty() ? all_attributes(X.cols()) : attributes,
                per_split_attributes, rng, {}, {}};
  b.row_stats.resize(static_cast<std::size_t>(X.rows()));
  std::vector<Eigen::Index> rows;
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const double w = weights.size() ? weights[i] : 1.0;
    b.row_stats[static_cast<std::size_t>(i)] = {w, w * y[i], 0.0};
    if (w > 0) rows.push_back(i);
  }
  b.build(rows, 0);
  return DecisionTree{std::move(b.nodes)};
}

DecisionTree grow_regression_tree(const MatrixXd& X, const VectorXd& target, const TreeConfig& config,
                                  const std::function<double(const std::vector<Eigen::Index>&)>& leaf_value) {
  if (X.rows() == 0 || X.rows() != target.size()) throw ShapeError("regression tree needs matching rows and targets");
  TreeBuilder b{X, {}, Criterion::squared_error, config, all_attributes(X.cols()), 0, nullptr, leaf_value, {}};
  b.row_stats.resize(static_cast<std::size_t>(X.rows()));
  std::vector<Eigen::Index> rows(static_cast<std::size_t>(X.rows()));
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    b.row_stats[static_cast<std::size_t>(i)] = {1.0, target[i], target[i] * target[i]};
    rows[static_cast<std::size_t>(i)] = i;
  }
  b.build(rows, 0);
  return DecisionTree{std::move(b.nodes)};
}

ScorerModel fit_decision_tree(const MatrixXd& X, const LabelVector& y, const TreeConfig& config) {
  auto tree = std::make_shared<const DecisionTree>(grow_classification_tree(X, y, VectorXd(), config));
  return {"decision_tree", [tree](const MatrixXd& rows) { return tree->predict(rows); }};
}

// ---------------------------------------------------------------------------

Eigen::Matrix<double, Eigen::Dynamic, 2> NaiveBayesModel::posterior(const MatrixXd& rows) const {
  if (rows.cols() != mean.cols()) throw ShapeError("naive Bayes: attribute count mismatch");
  Eigen::Matrix<double, Eigen::Dynamic, 2> out(rows.rows(), 2);
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    double joint[2];
    for (int c = 0; c < 2; ++c) {
      double s = log_prior[c];
      for (Eigen::Index j = 0; j < rows.cols(); ++j) {
        const double d = rows(i, j) - mean(c, j);
        s -= 0.5 * std::log(2.0 * M_PI * var(c, j)) + 0.5 * d * d / var(c, j);
      }
      joint[c] = s;
    }
    const double mx = std::max(joint[0], joint[1]);
    const double lse = mx + std::log(std::exp(joint[0] - mx) + std::exp(joint[1] - mx));
    out(i, 0) = std::exp(joint[0] - lse);
    out(i, 1) = std::exp(joint[1] - lse);
  }
  return out;
}

NaiveBayesModel train_naive_bayes(const MatrixXd& X, const LabelVector& y, double var_smoothing) {
  check_xy(X, y);
  check_both_classes(y);
  const Eigen::Index d = X.cols();
  NaiveBayesModel m;
  m.mean.resize(2, d);
  m.var.resize(2, d);
  const VectorXd overall_mean = X.colwise().mean();
  const double max_var =
      ((X.rowwise() - overall_mean.transpose()).array().square().colwise().sum() / static_cast<double>(X.rows()))
          .maxCoeff();
  const double epsilon = var_smoothing * max_var;
  for (int c = 0; c < 2; ++c) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < y.size(); ++i)
      if (y[i] == c) idx.push_back(i);
    const MatrixXd Xc = select_rows(X, idx);
    const VectorXd mu = Xc.colwise().mean();
    m.mean.row(c) = mu.transpose();
    m.var.row(c) = (Xc.rowwise() - mu.transpose()).array().square().colwise().sum() / static_cast<double>(Xc.rows());
    m.var.row(c).array() += epsilon;
    m.log_prior[c] = std::log(static_cast<double>(idx.size()) / static_cast<double>(y.size()));
  }
  if ((m.var.array() <= 0).any()) throw NumericError("naive Bayes: zero variance attribute; raise var_smoothing");
  return m;
}

ScorerModel fit_naive_bayes(const MatrixXd& X, const LabelVector& y, double var_smoothing) {
  auto m = std::make_shared<const NaiveBayesModel>(train_naive_bayes(X, y, var_smoothing));
  return {"naive_bayes", [m](const MatrixXd& rows) -> VectorXd { return m->posterior(rows).col(1); }};
}

// ---------------------------------------------------------------------------

namespace {

MatrixXd rbf_kernel(const MatrixXd& A, const MatrixXd& B, double gamma) {
  const VectorXd a2 = A.rowwise().squaredNorm();
  const VectorXd b2 = B.rowwise().squaredNorm();
  MatrixXd K = -2.0 * A * B.transpose();
  K.colwise() += a2;
  K.rowwise() += b2.transpose();
  return (-gamma * K.cwiseMax(0.0)).array().exp().matrix();
}

// Platt scaling with the intercept fixed at zero, so a decision value of 0 maps to 0.5.
double fit_platt_slope(const VectorXd& f, const LabelVector& y) {
  const double n_pos = static_cast<double>((y.array() == 1).count());
  const double n_neg = static_cast<double>(y.size()) - n_pos;
  const double hi = (n_pos + 1.0) / (n_pos + 2.0), lo = 1.0 / (n_neg + 2.0);
  auto objective = [&](double a) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < f.size(); ++i) {
      const double t = y[i] == 1 ? hi : lo;
      const double z = a * f[i];  // p = 1 / (1 + e^z)
      // -[t log p + (1 - t) log(1 - p)] in a numerically stable form.
      s += z >= 0 ? t * z + std::log1p(std::exp(-z)) : (t - 1.0) * z + std::log1p(std::exp(z));
    }
    return s;
  };
  double a = 0.0;
  double obj = objective(a);
  for (int it = 0; it < 100; ++it) {
    double g = 0.0, h = 1e-12;
    for (Eigen::Index i = 0; i < f.size(); ++i) {
      const double t = y[i] == 1 ? hi : lo;
      const double p = sigmoid(-a * f[i]);
      g += f[i] * (t - p);
      h += f[i] * f[i] * p * (1.0 - p);
    }
    if (std::abs(g) < 1e-10) break;
    double step = g / h, scale = 1.0;
    while (scale > 1e-10) {
      const double cand = a - scale * step;
      const double cobj = objective(cand);
      if (cobj < obj + 1e-4 * scale * g * (-step)) {
        a = cand;
        obj = cobj;
        break;
      }
      scale *= 0.5;
    }
    if (scale <= 1e-10) break;
  }
  return a;
}

}  // namespace

VectorXd SvmModel::decision(const MatrixXd& rows) const {
  if (support_vectors.rows() == 0) return VectorXd::Constant(rows.rows(), bias);
  return rbf_kernel(rows, support_vectors, gamma) * coef + VectorXd::Constant(rows.rows(), bias);
}

VectorXd SvmModel::probability(const MatrixXd& rows) const {
  return (platt_a * decision(rows)).unaryExpr([](double z) { return sigmoid(-z); });
}

double resolve_gamma(const MatrixXd& X, const SvmConfig& config) {
  switch (config.gamma_mode) {
    case GammaMode::automatic: return 1.0 / static_cast<double>(X.cols());
    case GammaMode::scale: {
      const VectorXd mu = X.colwise().mean();
      const double mean_var = ((X.rowwise() - mu.transpose()).array().square().colwise().sum() /
                               static_cast<double>(X.rows()))
                                  .mean();
      return mean_var > 0 ? 1.0 / (static_cast<double>(X.cols()) * mean_var) : 1.0;
    }
    case GammaMode::fixed:
      if (!(config.gamma > 0)) throw ConfigError("fixed SVM gamma must be positive");
      return config.gamma;
  }
  return 1.0;
}

SvmModel train_svm(const MatrixXd& X, const LabelVector& y, const SvmConfig& config) {
  check_xy(X, y);
  check_both_classes(y);
  const Eigen::Index n = X.rows();
  const double C = config.C;
  SvmModel m;
  m.gamma = resolve_gamma(X, config);
  const MatrixXd K = rbf_kernel(X, X, m.gamma);
  VectorXd s(n);  // labels as +1 / -1
  for (Eigen::Index i = 0; i < n; ++i) s[i] = y[i] == 1 ? 1.0 : -1.0;

  // Minimize f(a) = 1/2 a'Qa - e'a with Q_ij = s_i s_j K_ij, 0 <= a <= C, s'a = 0.
  VectorXd alpha = VectorXd::Zero(n);
  VectorXd grad = VectorXd::Constant(n, -1.0);
  auto up = [&](Eigen::Index t) { return (s[t] > 0 && alpha[t] < C) || (s[t] < 0 && alpha[t] > 0); };
  auto low = [&](Eigen::Index t) { return (s[t] > 0 && alpha[t] > 0) || (s[t] < 0 && alpha[t] < C); };
  constexpr double kTau = 1e-12;

  double gap = std::numeric_limits<double>::infinity();
  for (m.iterations = 0; m.iterations < config.max_iterations; ++m.iterations) {
    // Second-order working set selection.
    double gmax = -std::numeric_limits<double>::infinity();
    Eigen::Index i = -1;
    for (Eigen::Index t = 0; t < n; ++t)
      if (up(t) && -s[t] * grad[t] >= gmax) {
        gmax = -s[t] * grad[t];
        i = t;
      }
    double gmin = std::numeric_limits<double>::infinity();
    Eigen::Index j = -1;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < n; ++t) {
      if (!low(t)) continue;
      const double v = -s[t] * grad[t];
      gmin = std::min(gmin, v);
      if (i < 0) continue;
      const double b = gmax - v;
      if (b > 0) {
        double a = K(i, i) + K(t, t) - 2.0 * K(i, t);
        if (a <= 0) a = kTau;
        if (-(b * b) / a < best) {
          best = -(b * b) / a;
          j = t;
        }
      }
    }
    gap = gmax - gmin;
    if (i < 0 || j < 0 || gap < config.tol) {
      m.converged = true;
      break;
    }

    const double Qii = K(i, i), Qjj = K(j, j), Qij = s[i] * s[j] * K(i, j);
    const double old_i = alpha[i], old_j = alpha[j];
    if (s[i] != s[j]) {
      double quad = Qii + Qjj + 2.0 * Qij;
      if (quad <= 0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0) {
        if (alpha[j] < 0) { alpha[j] = 0; alpha[i] = diff; }
      } else {
        if (alpha[i] < 0) { alpha[i] = 0; alpha[j] = -diff; }
      }
      if (diff > 0) {
        if (alpha[i] > C) { alpha[i] = C; alpha[j] = C - diff; }
      } else {
        if (alpha[j] > C) { alpha[j] = C; alpha[i] = C + diff; }
      }
    } else {
      double quad = Qii + Qjj - 2.0 * Qij;
      if (quad <= 0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > C) {
        if (alpha[i] > C) { alpha[i] = C; alpha[j] = sum - C; }
      } else {
        if (alpha[j] < 0) { alpha[j] = 0; alpha[i] = sum; }
      }
      if (sum > C) {
        if (alpha[j] > C) { alpha[j] = C; alpha[i] = sum - C; }
      } else {
        if (alpha[i] < 0) { alpha[i] = 0; alpha[j] = sum; }
      }
    }
    const double di = alpha[i] - old_i, dj = alpha[j] - old_j;
    grad.array() += (s.array() * K.col(i).array()) * (s[i] * di) + (s.array() * K.col(j).array()) * (s[j] * dj);
    m.dual_objective.push_back(-0.5 * alpha.dot(grad - VectorXd::Ones(n)));
  }
  m.max_kkt_violation = gap;

  // Bias from the free vectors, or the midpoint of the feasible interval.
  double sum_free = 0.0, ub = std::numeric_limits<double>::infinity(), lb = -ub;
  int n_free = 0;
  for (Eigen::Index t = 0; t < n; ++t) {
    const double yg = s[t] * grad[t];
    if (alpha[t] > 0 && alpha[t] < C) {
      sum_free += yg;
      ++n_free;
    } else if ((alpha[t] >= C && s[t] < 0) || (alpha[t] <= 0 && s[t] > 0)) {
      ub = std::min(ub, yg);
    } else {
      lb = std::max(lb, yg);
    }
  }
  const double rho = n_free > 0 ? sum_free / n_free : 0.5 * (ub + lb);
  m.bias = -rho;
  m.alpha = alpha;

  std::vector<Eigen::Index> sv;
  for (Eigen::Index t = 0; t < n; ++t)
    if (alpha[t] > 0) sv.push_back(t);
  m.support_vectors = select_rows(X, sv);
  m.coef.resize(static_cast<Eigen::Index>(sv.size()));
  for (std::size_t k = 0; k < sv.size(); ++k) m.coef[static_cast<Eigen::Index>(k)] = alpha[sv[k]] * s[sv[k]];

  m.platt_a = fit_platt_slope(m.decision(X), y);
  return m;
}

ScorerModel fit_svm_rbf(const MatrixXd& X, const LabelVector& y, const SvmConfig& config) {
  auto m = std::make_shared<const SvmModel>(train_svm(X, y, config));
  return {"svm_rbf", [m](const MatrixXd& rows) { return m->probability(rows); }};
}

// ---------------------------------------------------------------------------

VectorXd RandomForestModel::predict(const MatrixXd& rows) const {
  VectorXd sum = VectorXd::Zero(rows.rows());
  for (const auto& t : trees) sum += t.predict(rows);
  return trees.empty() ? sum : VectorXd(sum / static_cast<double>(trees.size()));
}

RandomForestModel train_random_forest(const MatrixXd& X, const LabelVector& y, const ForestConfig& config) {
  check_xy(X, y);
  if (config.n_trees <= 0) throw ConfigError("random forest needs at least one tree");
  if (config.attrs_per_tree <= 0 || config.attrs_per_tree > X.cols())
    throw ConfigError("attrs_per_tree must lie in [1, " + std::to_string(X.cols()) + "]");
  RandomForestModel m;
  const Eigen::Index n = X.rows();
  for (int t = 0; t < config.n_trees; ++t) {
    Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(t)));
    VectorXd weights = VectorXd::Ones(n);
    if (config.bootstrap) {
      weights.setZero();
      for (Eigen::Index k = 0; k < n; ++k) weights[static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)))] += 1.0;
    }
    std::vector<int> attrs = all_attributes(X.cols());
    if (config.per_split) {
      m.trees.push_back(grow_classification_tree(X, y, weights, {}, attrs, config.attrs_per_tree, &rng));
    } else {
      for (int k = 0; k < config.attrs_per_tree; ++k) {
        const auto j = k + static_cast<int>(rng.below(attrs.size() - static_cast<std::size_t>(k)));
        std::swap(attrs[static_cast<std::size_t>(k)], attrs[static_cast<std::size_t>(j)]);
      }
      attrs.resize(static_cast<std::size_t>(config.attrs_per_tree));
      std::sort(attrs.begin(), attrs.end());
      m.trees.push_back(grow_classification_tree(X, y, weights, {}, attrs));
    }
    m.attributes.push_back(std::move(attrs));
  }
  return m;
}

ScorerModel fit_random_forest(const MatrixXd& X, const LabelVector& y, const ForestConfig& config) {
  auto m = std::make_shared<const RandomForestModel>(train_random_forest(X, y, config));
  return {"random_forest", [m](const MatrixXd& rows) { return m->predict(rows); }};
}

// ---------------------------------------------------------------------------

VectorXd AdaBoostModel::vote(const MatrixXd& rows) const {
  VectorXd f = VectorXd::Zero(rows.rows());
  for (std::size_t m = 0; m < learners.size(); ++m) {
    const VectorXd p = learners[m].predict(rows);
    f += alphas[m] * p.unaryExpr([](double v) { return v >= 0.5 ? 1.0 : -1.0; });
  }
  return f;
}

VectorXd AdaBoostModel::predict(const MatrixXd& rows) const {
  return vote(rows).unaryExpr([](double v) { return sigmoid(v); });
}

AdaBoostModel train_adaboost(const MatrixXd& X, const LabelVector& y, const AdaBoostConfig& config) {
  check_xy(X, y);
  AdaBoostModel model;
  const Eigen::Index n = X.rows();
  VectorXd w = VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  const TreeConfig base{config.base_depth, 1};
  for (int round = 0; round < config.n_estimators; ++round) {
    DecisionTree tree = grow_classification_tree(X, y, w, base);
    const VectorXd p = tree.predict(X);
    double err = 0.0;
    std::vector<bool> miss(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
      miss[static_cast<std::size_t>(i)] = (p[i] >= 0.5) != (y[i] == 1);
      if (miss[static_cast<std::size_t>(i)]) err += w[i];
    }
    err /= w.sum();
    if (err >= 0.5) break;
    if (err <= 0.0) {
      model.learners.push_back(std::move(tree));
      model.alphas.push_back(std::log(1e12));
      model.weighted_errors.push_back(0.0);
      model.sample_weights.push_back(w);
      break;
    }
    const double alpha = 0.5 * std::log((1.0 - err) / err);
    for (Eigen::Index i = 0; i < n; ++i) w[i] *= std::exp(miss[static_cast<std::size_t>(i)] ? alpha : -alpha);
    w /= w.sum();
    model.learners.push_back(std::move(tree));
    model.alphas.push_back(alpha);
    model.weighted_errors.push_back(err);
    model.sample_weights.push_back(w);
  }
  return model;
}

ScorerModel fit_adaboost(const MatrixXd& X, const LabelVector& y, const AdaBoostConfig& config) {
  auto m = std::make_shared<const AdaBoostModel>(train_adaboost(X, y, config));
  return {"adaboost", [m](const MatrixXd& rows) { return m->predict(rows); }};
}

// ---------------------------------------------------------------------------

VectorXd GradientBoostingModel::raw(const MatrixXd& rows) const {
  VectorXd f = VectorXd::Constant(rows.rows(), initial);
  for (const auto& t : trees) f += learning_rate * t.predict(rows);
  return f;
}

VectorXd GradientBoostingModel::predict(const MatrixXd& rows) const {
  return raw(rows).unaryExpr([](double v) { return sigmoid(v); });
}

namespace {

double log_loss(const VectorXd& f, const LabelVector& y) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    const double p = clamp_probability(sigmoid(f[i]));
    s -= y[i] == 1 ? std::log(p) : std::log(1.0 - p);
  }
  return s / static_cast<double>(f.size());
}

}  // namespace

GradientBoostingModel train_gradient_boosting(const MatrixXd& X, const LabelVector& y,
                                              const GradientBoostingConfig& config) {
  check_xy(X, y);
  check_both_classes(y);
  GradientBoostingModel m;
  m.learning_rate = config.learning_rate;
  const double base_rate = y.cast<double>().mean();
  m.initial = std::log(base_rate / (1.0 - base_rate));
  VectorXd f = VectorXd::Constant(X.rows(), m.initial);
  m.train_log_loss.push_back(log_loss(f, y));
  for (int round = 0; round < config.n_estimators; ++round) {
    const VectorXd p = f.unaryExpr([](double v) { return sigmoid(v); });
    const VectorXd residual = y.cast<double>() - p;
    auto newton_leaf = [&](const std::vector<Eigen::Index>& rows) {
      double num = 0.0, den = 0.0;
      for (auto i : rows) {
        num += residual[i];
        den += p[i] * (1.0 - p[i]);
      }
      return std::abs(den) < 1e-150 ? 0.0 : num / den;
    };
    DecisionTree tree = grow_regression_tree(X, residual, {config.max_depth, 1}, newton_leaf);
    f += config.learning_rate * tree.predict(X);
    m.trees.push_back(std::move(tree));
    m.train_log_loss.push_back(log_loss(f, y));
  }
  return m;
}

ScorerModel fit_gradient_boosting(const MatrixXd& X, const LabelVector& y, const GradientBoostingConfig& config) {
  auto m = std::make_shared<const GradientBoostingModel>(train_gradient_boosting(X, y, config));
  return {"gradient_boosting", [m](const MatrixXd& rows) { return m->predict(rows); }};
}

// ---------------------------------------------------------------------------

NetParams make_mlp_net(int hidden, Rng& rng) {
  return make_network(kAttributeCount, {{hidden, Activation::relu}, {1, Activation::sigmoid}}, rng);
}

VectorXd MlpModel::predict(const MatrixXd& rows) const { return ehrgan::predict(net, rows).col(0); }

MlpModel train_mlp(const MatrixXd& X, const LabelVector& y, const MlpConfig& config) {
  check_xy(X, y);
  if (X.cols() != kAttributeCount) throw ShapeError("MLP expects 30 attributes");
  if (config.epochs <= 0 || config.batch_size <= 0) throw ConfigError("MLP epochs and batch size must be positive");
  Rng rng(config.seed);
  MlpModel m;
  m.net = make_mlp_net(config.hidden, rng);
  AdamState<double> state(m.net, {config.adam_alpha, 0.9, 0.999, 1e-8});
  const Eigen::Index n = X.rows();
  const Eigen::Index batch = std::min<Eigen::Index>(config.batch_size, n);
  double best = std::numeric_limits<double>::infinity();
  int stale = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const auto order = rng.permutation(static_cast<std::size_t>(n));
    double total = 0.0;
    for (Eigen::Index start = 0; start < n; start += batch) {
      const Eigen::Index stop = std::min(n, start + batch);
      std::vector<Eigen::Index> idx(order.begin() + start, order.begin() + stop);
      const MatrixXd xb = select_rows(X, idx);
      const MatrixXd yb = select_rows(y, idx).cast<double>();
      auto fr = forward(m.net, xb);
      auto loss = evaluate_loss(LossKind::bce, fr.output, yb);
      auto grads = backward(m.net, fr.tape, loss.grad).params;
      // L2 penalty on weights: l2 / (2 * batch) * ||W||^2.
      const double scale = config.l2 / static_cast<double>(stop - start);
      double penalty = 0.0;
      for (std::size_t k = 0; k < m.net.layers.size(); ++k) {
        grads.layers[k].weights += scale * m.net.layers[k].weights;
        penalty += 0.5 * scale * m.net.layers[k].weights.squaredNorm();
      }
      adam_step(m.net, grads, state);
      total += (loss.value + penalty) * static_cast<double>(stop - start);
    }
    const double epoch_loss = total / static_cast<double>(n);
    if (!std::isfinite(epoch_loss)) throw NumericError("MLP loss is not finite at epoch " + std::to_string(epoch));
    m.train_loss.push_back(epoch_loss);
    if (epoch_loss > best - config.tol) {
      if (++stale > config.patience) break;
    } else {
      stale = 0;
    }
    best = std::min(best, epoch_loss);
  }
  return m;
}

ScorerModel fit_mlp(const MatrixXd& X, const LabelVector& y, const MlpConfig& config) {
  auto m = std::make_shared<const MlpModel>(train_mlp(X, y, config));
  return {"mlp", [m](const MatrixXd& rows) { return m->predict(rows); }};
}

}  // namespace ehrgan
