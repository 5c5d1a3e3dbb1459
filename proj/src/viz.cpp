#include "ehrgan/viz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "ehrgan/csv.hpp"

namespace ehrgan {

namespace {

MatrixXd squared_distances(const MatrixXd& x) {
  const VectorXd sq = x.rowwise().squaredNorm();
  MatrixXd d = -2.0 * x * x.transpose();
  d.colwise() += sq;
  d.rowwise() += sq.transpose();
  d = d.cwiseMax(0.0);
  d.diagonal().setZero();
  return d;
}

void check_points(const MatrixXd& points, double perplexity) {
  const auto n = points.rows();
  if (n < 4) throw DomainError("t-SNE needs at least 4 points, got " + std::to_string(n));
  if (!(perplexity > 0) || perplexity >= static_cast<double>(n - 1) / 3.0)
    throw ConfigError("perplexity " + csv::format(perplexity) + " must be in (0, " +
                      csv::format(static_cast<double>(n - 1) / 3.0) + ") for " + std::to_string(n) + " points");
  if (!points.allFinite()) throw NumericError("t-SNE input contains non-finite values");
}

}  // namespace

ConditionalAffinities conditional_affinities(const MatrixXd& points, double perplexity, double tol) {
  check_points(points, perplexity);
  const Eigen::Index n = points.rows();
  const MatrixXd d = squared_distances(points);
  const double target = std::log(perplexity);
  ConditionalAffinities out{MatrixXd::Zero(n, n), VectorXd(n)};
  VectorXd row(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    // Distances are shifted by the nearest neighbor's so exp() never underflows to all zeros.
    double dmin = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i) dmin = std::min(dmin, d(i, j));
    double beta = 1.0, lo = 0.0, hi = std::numeric_limits<double>::infinity();
    double entropy = 0.0;
    for (int it = 0; it < 200; ++it) {
      double sum = 0.0, weighted = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        const double shifted = d(i, j) - dmin;
        row[j] = j == i ? 0.0 : std::exp(-beta * shifted);
        sum += row[j];
        weighted += row[j] * shifted;
      }
      entropy = std::log(sum) + beta * weighted / sum;
      row /= sum;
      const double diff = entropy - target;
      if (std::abs(diff) < tol) break;
      if (diff > 0) {
        lo = beta;
        beta = std::isinf(hi) ? beta * 2.0 : 0.5 * (beta + hi);
      } else {
        hi = beta;
        beta = 0.5 * (beta + lo);
      }
    }
    out.p.row(i) = row.transpose();
    out.entropy[i] = entropy;
  }
  return out;
}

MatrixXd joint_affinities(const MatrixXd& points, double perplexity) {
  const MatrixXd p = conditional_affinities(points, perplexity).p;
  MatrixXd joint = (p + p.transpose()) / (2.0 * static_cast<double>(points.rows()));
  joint /= joint.sum();
  return joint;
}

double tsne_kl(const MatrixXd& P, const MatrixXd& embedding) {
  MatrixXd num = (1.0 + squared_distances(embedding).array()).inverse().matrix();
  num.diagonal().setZero();
  const double z = num.sum();
  double kl = 0.0;
  for (Eigen::Index i = 0; i < P.rows(); ++i)
    for (Eigen::Index j = 0; j < P.cols(); ++j)
      if (i != j && P(i, j) > 0) kl += P(i, j) * std::log(P(i, j) / std::max(num(i, j) / z, 1e-12));
  return kl;
}

TsneResult tsne_run(const MatrixXd& points, const TsneConfig& config) {
  if (config.iterations < 0 || !(config.learning_rate > 0)) throw ConfigError("t-SNE iterations and learning rate invalid");
  const Eigen::Index n = points.rows();
  const MatrixXd P_true = joint_affinities(points, config.perplexity);
  MatrixXd P = P_true * config.exaggeration;

  Rng rng(config.seed);
  MatrixXd y(n, 2);
  for (Eigen::Index i = 0; i < n; ++i)
    for (int c = 0; c < 2; ++c) y(i, c) = 1e-4 * rng.normal();
  MatrixXd step = MatrixXd::Zero(n, 2);
  MatrixXd gains = MatrixXd::Ones(n, 2);

  TsneResult r;
  r.kl.push_back(tsne_kl(P_true, y));
  for (int it = 0; it < config.iterations; ++it) {
    if (it == config.exaggeration_iterations) P = P_true;
    MatrixXd num = (1.0 + squared_distances(y).array()).inverse().matrix();
    num.diagonal().setZero();
    const double z = num.sum();
    const MatrixXd w = ((P - num / z).array() * num.array()).matrix();
    const MatrixXd grad = 4.0 * (w.rowwise().sum().asDiagonal() * y - w * y);

    const double momentum = it < config.momentum_switch ? config.initial_momentum : config.final_momentum;
    for (Eigen::Index i = 0; i < n; ++i)
      for (int c = 0; c < 2; ++c) {
        double& g = gains(i, c);
        g = (grad(i, c) > 0) != (step(i, c) > 0) ? g + 0.2 : g * 0.8;
        g = std::max(g, 0.01);
      }
    step = momentum * step - config.learning_rate * gains.cwiseProduct(grad);
    y += step;
    y.rowwise() -= y.colwise().mean();
    if ((it + 1) % 50 == 0 || it + 1 == config.iterations) r.kl.push_back(tsne_kl(P_true, y));
  }
  if (!y.allFinite()) throw NumericError("t-SNE embedding diverged");
  r.embedding = std::move(y);
  return r;
}

MatrixXd tsne_embed(const MatrixXd& points, const TsneConfig& config) { return tsne_run(points, config).embedding; }

void export_embedding(std::ostream& out, const MatrixXd& coords, const std::vector<std::string>& tags) {
  if (coords.cols() != 2) throw ShapeError("embedding must have 2 columns");
  if (static_cast<Eigen::Index>(tags.size()) != coords.rows()) throw ShapeError("tag count differs from point count");
  const auto& known = embedding_tags();
  for (std::size_t i = 0; i < tags.size(); ++i)
    if (std::find(known.begin(), known.end(), tags[i]) == known.end())
      throw DomainError("unknown embedding tag '" + tags[i] + "' at point " + std::to_string(i));
  out << "tag,x,y\n";
  for (Eigen::Index i = 0; i < coords.rows(); ++i)
    out << tags[static_cast<std::size_t>(i)] << ',' << csv::format(coords(i, 0)) << ',' << csv::format(coords(i, 1))
        << '\n';
}

// ---------------------------------------------------------------------------

namespace {

struct Panel {
  double left, top, size;        // pixel box
  double x0, x1, y0, y1;         // data window
  double px(double v) const { return left + (v - x0) / (x1 - x0) * size; }
  double py(double v) const { return top + size - (v - y0) / (y1 - y0) * size; }
};

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string f2(double v) { return csv::format(v, 2); }

void draw_panel(std::ostream& out, const Panel& p, const std::vector<RocSeries>& curves, const std::string& caption,
                const std::string& clip_id) {
  out << "<clipPath id=\"" << clip_id << "\"><rect x=\"" << f2(p.left) << "\" y=\"" << f2(p.top) << "\" width=\""
      << f2(p.size) << "\" height=\"" << f2(p.size) << "\"/></clipPath>\n";
  out << "<rect x=\"" << f2(p.left) << "\" y=\"" << f2(p.top) << "\" width=\"" << f2(p.size) << "\" height=\""
      << f2(p.size) << "\" fill=\"white\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double fx = p.x0 + (p.x1 - p.x0) * k / 4.0;
    const double fy = p.y0 + (p.y1 - p.y0) * k / 4.0;
    out << "<line x1=\"" << f2(p.px(fx)) << "\" y1=\"" << f2(p.top) << "\" x2=\"" << f2(p.px(fx)) << "\" y2=\""
        << f2(p.top + p.size) << "\" stroke=\"#dddddd\"/>\n";
    out << "<line x1=\"" << f2(p.left) << "\" y1=\"" << f2(p.py(fy)) << "\" x2=\"" << f2(p.left + p.size)
        << "\" y2=\"" << f2(p.py(fy)) << "\" stroke=\"#dddddd\"/>\n";
    out << "<text x=\"" << f2(p.px(fx)) << "\" y=\"" << f2(p.top + p.size + 16)
        << "\" font-size=\"11\" text-anchor=\"middle\">" << f2(fx) << "</text>\n";
    out << "<text x=\"" << f2(p.left - 6) << "\" y=\"" << f2(p.py(fy) + 4)
        << "\" font-size=\"11\" text-anchor=\"end\">" << f2(fy) << "</text>\n";
  }
  out << "<text x=\"" << f2(p.left + p.size / 2) << "\" y=\"" << f2(p.top + p.size + 34)
      << "\" font-size=\"12\" text-anchor=\"middle\">False positive rate</text>\n";
  out << "<text x=\"" << f2(p.left - 40) << "\" y=\"" << f2(p.top + p.size / 2) << "\" font-size=\"12\" "
      << "text-anchor=\"middle\" transform=\"rotate(-90 " << f2(p.left - 40) << ' ' << f2(p.top + p.size / 2)
      << ")\">True positive rate</text>\n";
  out << "<text x=\"" << f2(p.left + p.size / 2) << "\" y=\"" << f2(p.top - 8)
      << "\" font-size=\"13\" text-anchor=\"middle\">" << escape(caption) << "</text>\n";
  out << "<g clip-path=\"url(#" << clip_id << ")\" fill=\"none\" stroke-width=\"1.5\">\n";
  out << "<line x1=\"" << f2(p.px(0)) << "\" y1=\"" << f2(p.py(0)) << "\" x2=\"" << f2(p.px(1)) << "\" y2=\""
      << f2(p.py(1)) << "\" stroke=\"#999999\" stroke-dasharray=\"4 4\"/>\n";
  for (std::size_t c = 0; c < curves.size(); ++c) {
    if (curves[c].points.empty()) continue;
    out << "<polyline stroke=\"" << kPalette[c % std::size(kPalette)] << "\" points=\"";
    for (std::size_t k = 0; k < curves[c].points.size(); ++k) {
      if (k) out << ' ';
      out << f2(p.px(curves[c].points[k].fpr)) << ',' << f2(p.py(curves[c].points[k].tpr));
    }
    out << "\"/>\n";
  }
  out << "</g>\n";
}

}  // namespace

void export_roc_svg(std::ostream& out, const std::vector<RocSeries>& curves, const std::string& title,
                    double zoom_extent) {
  if (!(zoom_extent > 0 && zoom_extent <= 1)) throw DomainError("zoom extent must be in (0, 1]");
  const double size = 320, margin = 60, legend_height = 18.0 * static_cast<double>(curves.size());
  const double width = 2 * size + 3 * margin + 20;
  const double height = size + 2 * margin + 30 + legend_height;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f2(width) << "\" height=\"" << f2(height)
      << "\" viewBox=\"0 0 " << f2(width) << ' ' << f2(height) << "\" font-family=\"sans-serif\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << f2(width / 2) << "\" y=\"22\" font-size=\"15\" text-anchor=\"middle\">" << escape(title)
      << "</text>\n";
  draw_panel(out, {margin, margin, size, 0, 1, 0, 1}, curves, "Full range", "roc-full");
  draw_panel(out, {2 * margin + size + 20, margin, size, 0, zoom_extent, 1 - zoom_extent, 1}, curves,
             "Upper-left zoom", "roc-zoom");
  const double ly = margin + size + 50;
  for (std::size_t c = 0; c < curves.size(); ++c) {
    const double y = ly + 18.0 * static_cast<double>(c);
    out << "<line x1=\"" << f2(margin) << "\" y1=\"" << f2(y) << "\" x2=\"" << f2(margin + 24) << "\" y2=\"" << f2(y)
        << "\" stroke=\"" << kPalette[c % std::size(kPalette)] << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << f2(margin + 30) << "\" y=\"" << f2(y + 4) << "\" font-size=\"12\">"
        << escape(curves[c].label) << "</text>\n";
  }
  out << "</svg>\n";
}

void export_embedding_svg(std::ostream& out, const MatrixXd& coords, const std::vector<std::string>& tags,
                          const std::string& title) {
  if (coords.cols() != 2) throw ShapeError("embedding must have 2 columns");
  if (static_cast<Eigen::Index>(tags.size()) != coords.rows()) throw ShapeError("tag count differs from point count");
  const auto& known = embedding_tags();
  std::vector<std::size_t> colour(tags.size());
  std::vector<bool> used(known.size(), false);
  for (std::size_t i = 0; i < tags.size(); ++i) {
    const auto it = std::find(known.begin(), known.end(), tags[i]);
    if (it == known.end()) throw DomainError("unknown embedding tag '" + tags[i] + "' at point " + std::to_string(i));
    colour[i] = static_cast<std::size_t>(it - known.begin());
    used[colour[i]] = true;
  }

  const double size = 480, margin = 40;
  const double height = size + 2 * margin + 18.0 * static_cast<double>(known.size());
  const double width = size + 2 * margin;
  double lo_x = 0, hi_x = 1, lo_y = 0, hi_y = 1;
  if (coords.rows() > 0) {
    lo_x = coords.col(0).minCoeff(), hi_x = coords.col(0).maxCoeff();
    lo_y = coords.col(1).minCoeff(), hi_y = coords.col(1).maxCoeff();
  }
  const double span = std::max({hi_x - lo_x, hi_y - lo_y, 1e-12});
  const Panel p{margin, margin, size, (lo_x + hi_x - span) / 2, (lo_x + hi_x + span) / 2, (lo_y + hi_y - span) / 2,
                (lo_y + hi_y + span) / 2};

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f2(width) << "\" height=\"" << f2(height)
      << "\" viewBox=\"0 0 " << f2(width) << ' ' << f2(height) << "\" font-family=\"sans-serif\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << f2(width / 2) << "\" y=\"24\" font-size=\"15\" text-anchor=\"middle\">" << escape(title)
      << "</text>\n";
  out << "<rect x=\"" << f2(margin) << "\" y=\"" << f2(margin) << "\" width=\"" << f2(size) << "\" height=\"" << f2(size)
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (Eigen::Index i = 0; i < coords.rows(); ++i)
    out << "<circle cx=\"" << f2(p.px(coords(i, 0))) << "\" cy=\"" << f2(p.py(coords(i, 1))) << "\" r=\"2.5\" fill=\""
        << kPalette[colour[static_cast<std::size_t>(i)] % std::size(kPalette)] << "\" fill-opacity=\"0.7\"/>\n";
  double y = margin + size + 24;
  for (std::size_t k = 0; k < known.size(); ++k) {
    if (!used[k]) continue;
    out << "<circle cx=\"" << f2(margin + 6) << "\" cy=\"" << f2(y) << "\" r=\"4\" fill=\""
        << kPalette[k % std::size(kPalette)] << "\"/>\n";
    out << "<text x=\"" << f2(margin + 16) << "\" y=\"" << f2(y + 4) << "\" font-size=\"12\">" << escape(known[k])
        << "</text>\n";
    y += 18;
  }
  out << "</svg>\n";
}

}  // namespace ehrgan
