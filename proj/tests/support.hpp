#pragma once

// Shared fixtures and hand-rolled generators for the test binaries.

#include <filesystem>
#include <string>

#include "ehrgan/dataio.hpp"
#include "ehrgan/nn.hpp"

namespace testing {

using namespace ehrgan;

inline std::filesystem::path data_file() { return std::filesystem::path(EHRGAN_SOURCE_DIR) / "data" / "wdbc.data"; }

inline MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng, double lo = -1.0, double hi = 1.0) {
  MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.uniform(lo, hi);
  return m;
}

// 0/1 labels with at least `min_each` of each class.
inline LabelVector random_labels(Eigen::Index n, Rng& rng, Eigen::Index min_each = 1) {
  LabelVector y(n);
  do {
    for (Eigen::Index i = 0; i < n; ++i) y[i] = static_cast<int>(rng.below(2));
  } while ((y.array() == 1).count() < min_each || (y.array() == 0).count() < min_each);
  return y;
}

// Two Gaussian blobs in the first two attributes, the other 28 attributes zero,
// values squeezed into [0, 1]. Class 1 sits up and to the right.
struct Toy {
  MatrixXd X;
  LabelVector y;
};

inline Toy separable_toy(Eigen::Index n, std::uint64_t seed, double spread = 0.06) {
  Rng rng(seed);
  Toy t{MatrixXd::Zero(n, kAttributeCount), LabelVector(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const int c = static_cast<int>(i % 2);
    const double centre = c == 1 ? 0.7 : 0.3;
    t.y[i] = c;
    t.X(i, 0) = std::clamp(centre + spread * rng.normal(), 0.0, 1.0);
    t.X(i, 1) = std::clamp(centre + spread * rng.normal(), 0.0, 1.0);
  }
  return t;
}

inline double accuracy_at_half(const VectorXd& scores, const LabelVector& y) {
  Eigen::Index ok = 0;
  for (Eigen::Index i = 0; i < y.size(); ++i) ok += (scores[i] >= 0.5) == (y[i] == 1);
  return static_cast<double>(ok) / static_cast<double>(y.size());
}

}  // namespace testing
