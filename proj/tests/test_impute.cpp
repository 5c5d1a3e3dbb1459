#include <doctest.h>

#include <cmath>

#include "ehrgan/impute.hpp"
#include "support.hpp"

using namespace ehrgan;

namespace {

MaskedMatrix unit_masked(Rng& rng, Eigen::Index n, double drop) {
  MaskedMatrix m;
  m.values = testing::random_matrix(n, kAttributeCount, rng, 0, 1);
  m.mask = MaskXb::Constant(n, kAttributeCount, true);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < kAttributeCount; ++j)
      if (rng.uniform() < drop) m.mask(i, j) = false;
  m.labels = testing::random_labels(n, rng, 3);
  return m;
}

}  // namespace

TEST_CASE("zero and mean imputation touch only missing cells") {
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const MaskedMatrix m = unit_masked(rng, 15, 0.2);
    const MatrixXd z = impute_zero(m);
    MaskedMatrix full = m;
    full.mask.setConstant(true);
    const ImputerStats stats = fit_mean_imputer(unit_masked(rng, 10, 0.0));
    const MatrixXd mean = impute_mean(stats, m);
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        if (m.mask(i, j)) {
          CHECK(z(i, j) == m.values(i, j));
          CHECK(mean(i, j) == m.values(i, j));
        } else {
          CHECK(z(i, j) == 0.0);
          CHECK(mean(i, j) == stats.means[j]);
        }
      }
  }
}

TEST_CASE("mean imputer averages observed cells only") {
  MaskedMatrix m;
  m.values = MatrixXd::Zero(3, kAttributeCount);
  m.values.col(0) << 1.0, 100.0, 3.0;
  m.mask = MaskXb::Constant(3, kAttributeCount, true);
  m.mask(1, 0) = false;
  m.labels = LabelVector::Zero(3);
  CHECK(fit_mean_imputer(m).means[0] == 2.0);
  m.mask.col(2).setConstant(false);
  CHECK_THROWS_AS(fit_mean_imputer(m), DomainError);
  CHECK_THROWS_AS(impute_mean(ImputerStats{VectorXd::Zero(3)}, m), ShapeError);
}

TEST_CASE("imputation_rmse matches a hand computation") {
  MatrixXd completed = MatrixXd::Zero(2, 2);
  completed(0, 1) = 3.0;
  const GroundTruth truth{{0, 1, 0.0}, {1, 0, 4.0}};
  CHECK(imputation_rmse(completed, truth) == doctest::Approx(std::sqrt((9.0 + 16.0) / 2.0)));
  CHECK_THROWS_AS(imputation_rmse(completed, {}), DomainError);
  CHECK_THROWS_AS(imputation_rmse(completed, {{2, 0, 1.0}}), ShapeError);
}

TEST_CASE("autoencoder architecture") {
  Rng rng(32);
  const NetParams net = make_autoencoder_net(rng);
  REQUIRE(net.layers.size() == 4);
  const int widths[] = {20, 10, 20, 30};
  for (std::size_t k = 0; k < 4; ++k) CHECK(net.layers[k].fan_out() == widths[k]);
  CHECK(net.input_width() == 30);
  CHECK(net.layers.back().activation == Activation::sigmoid);
}

TEST_CASE("autoencoder training keeps the best validation epoch and fills only gaps") {
  Rng rng(33);
  MaskedMatrix low = unit_masked(rng, 80, 0.0);
  // Correlated attributes so there is something to learn.
  for (Eigen::Index j = 1; j < kAttributeCount; ++j) low.values.col(j) = 0.5 * (low.values.col(0) + low.values.col(j));
  AeConfig cfg;
  cfg.max_epochs = 60;
  cfg.patience = 10;
  cfg.corruption = AeCorruption::dropout;
  cfg.corruption_rate = 0.2;
  cfg.seed = 5;
  const AutoencoderModel model = train_autoencoder(low, cfg);
  REQUIRE_FALSE(model.training_log.empty());
  CHECK(model.best_epoch >= 0);
  CHECK(model.best_epoch < static_cast<int>(model.training_log.size()));
  double best = model.training_log[0].validation;
  for (const auto& e : model.training_log) best = std::min(best, e.validation);
  CHECK(model.training_log[static_cast<std::size_t>(model.best_epoch)].validation == best);
  CHECK(static_cast<int>(model.training_log.size()) <= std::min(cfg.max_epochs, model.best_epoch + 1 + cfg.patience));

  MaskedMatrix holey = low;
  holey.mask(3, 4) = false;
  holey.mask(7, 0) = false;
  const MatrixXd filled = impute_autoencoder(model, holey);
  for (Eigen::Index i = 0; i < holey.rows(); ++i)
    for (Eigen::Index j = 0; j < holey.cols(); ++j)
      if (holey.mask(i, j)) CHECK(filled(i, j) == holey.values(i, j));
  CHECK(filled(3, 4) >= 0.0);
  CHECK(filled(3, 4) <= 1.0);

  const AutoencoderModel again = train_autoencoder(low, cfg);
  CHECK(again.net.layers[0].weights == model.net.layers[0].weights);
}

TEST_CASE("autoencoder training validates its inputs") {
  Rng rng(34);
  const MaskedMatrix tiny = unit_masked(rng, 9, 0.0);
  CHECK_THROWS_AS(train_autoencoder(tiny, {}), DomainError);
  AeConfig cfg;
  cfg.batch_size = 0;
  CHECK_THROWS_AS(train_autoencoder(unit_masked(rng, 20, 0.0), cfg), ConfigError);
  CHECK_THROWS_AS(train_autoencoder(unit_masked(rng, 20, 0.0), AeConfig{}, MaskXb::Constant(4, 3, true)), ShapeError);
}

TEST_CASE("autoencoder beats column means on the real data's simulated gaps") {
  const MaskedMatrix d = load_wdbc(testing::data_file());
  const SimulatedMissing s = simulate_missing(d, 15, 0.5, 1);
  const ScalingParams sp = fit_minmax(s.data);
  const MaskedMatrix scaled = apply_minmax(s.data, sp);
  const GroundTruth truth = scale_truth(s.truth, sp);
  const SparsitySplit split = split_by_sparsity(scaled, 0.1);
  AeConfig cfg;
  cfg.seed = 2;
  const AutoencoderModel ae = train_autoencoder(split.low, cfg, split.high.mask);
  const double ae_rmse = imputation_rmse(impute_autoencoder(ae, scaled), truth);
  const double mean_rmse = imputation_rmse(impute_mean(fit_mean_imputer(scaled), scaled), truth);
  CHECK(ae_rmse < mean_rmse);
}
