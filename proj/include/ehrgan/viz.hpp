#pragma once

// Exact t-SNE and plot-data export (embedding CSV, ROC SVG).

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ehrgan/nn.hpp"

namespace ehrgan {

struct TsneConfig {
  double perplexity = 30.0;
  int iterations = 1000;
  double learning_rate = 200.0;
  double exaggeration = 12.0;
  int exaggeration_iterations = 250;
  double initial_momentum = 0.5;
  double final_momentum = 0.8;
  int momentum_switch = 250;
  std::uint64_t seed = 0;
};

/// Row-conditional Gaussian affinities. Each row's bandwidth is found by bisection so
/// the row entropy (nats) is within `tol` of log(perplexity). The diagonal is zero.
struct ConditionalAffinities {
  MatrixXd p;        // rows sum to 1
  VectorXd entropy;  // achieved entropy per row
};

ConditionalAffinities conditional_affinities(const MatrixXd& points, double perplexity, double tol = 1e-4);

/// Symmetrized joint affinities (p_ij + p_ji) / 2n; sums to 1.
MatrixXd joint_affinities(const MatrixXd& points, double perplexity);

/// KL(P || Q) for an embedding under the Student-t kernel.
double tsne_kl(const MatrixXd& P, const MatrixXd& embedding);

struct TsneResult {
  MatrixXd embedding;           // n x 2, centered
  std::vector<double> kl;       // KL(P || Q) of the initial layout, then every 50 iterations and at the end
};

TsneResult tsne_run(const MatrixXd& points, const TsneConfig& config);
MatrixXd tsne_embed(const MatrixXd& points, const TsneConfig& config);

// Embedding tags accepted by export_embedding.
inline const std::vector<std::string>& embedding_tags() {
  static const std::vector<std::string> tags{
      "real-benign",         "real-malignant",         "mean-imputed-benign", "mean-imputed-malignant",
      "ae-imputed-benign",   "ae-imputed-malignant",   "generated-benign",    "generated-malignant"};
  return tags;
}

/// CSV: tag,x,y. Unknown tags throw DomainError before anything is written.
void export_embedding(std::ostream& out, const MatrixXd& coords, const std::vector<std::string>& tags);

struct RocPoint {
  double fpr;
  double tpr;
};

struct RocSeries {
  std::string label;
  std::vector<RocPoint> points;
};

/// Self-contained SVG: a full-range panel and a zoom on the upper-left corner
/// (FPR in [0, zoom_extent], TPR in [1 - zoom_extent, 1]).
void export_roc_svg(std::ostream& out, const std::vector<RocSeries>& curves, const std::string& title,
                    double zoom_extent = 0.2);

/// Self-contained SVG scatter plot of a 2-D embedding, one colour per tag.
void export_embedding_svg(std::ostream& out, const MatrixXd& coords, const std::vector<std::string>& tags,
                          const std::string& title);

}  // namespace ehrgan
