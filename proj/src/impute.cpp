#include "ehrgan/impute.hpp"

#include <cmath>
#include <limits>

namespace ehrgan {

MatrixXd impute_zero(const MaskedMatrix& data) {
  return data.mask.select(data.values, MatrixXd::Zero(data.rows(), data.cols()));
}

ImputerStats fit_mean_imputer(const MaskedMatrix& train) {
  ImputerStats s{VectorXd(train.cols())};
  for (Eigen::Index j = 0; j < train.cols(); ++j) {
    double sum = 0.0;
    Eigen::Index n = 0;
    for (Eigen::Index i = 0; i < train.rows(); ++i)
      if (train.mask(i, j)) {
        sum += train.values(i, j);
        ++n;
      }
    if (n == 0) throw DomainError("attribute " + std::to_string(j) + " has no observed training values");
    s.means[j] = sum / static_cast<double>(n);
  }
  return s;
}

MatrixXd impute_mean(const ImputerStats& stats, const MaskedMatrix& data) {
  if (stats.means.size() != data.cols()) throw ShapeError("imputer statistics do not match attribute count");
  MatrixXd out = data.values;
  for (Eigen::Index j = 0; j < data.cols(); ++j)
    for (Eigen::Index i = 0; i < data.rows(); ++i)
      if (!data.mask(i, j)) out(i, j) = stats.means[j];
  return out;
}

NetParams make_autoencoder_net(Rng& rng) {
  return make_network(kAttributeCount, {{20, Activation::relu},
                                        {10, Activation::relu},
                                        {20, Activation::relu},
                                        {kAttributeCount, Activation::sigmoid}},
                      rng);
}

namespace {

struct Split {
  std::vector<Eigen::Index> train;
  std::vector<Eigen::Index> validation;
};

Split stratified_split(const LabelVector& labels, double validation_fraction, Rng& rng) {
  Split s;
  for (int cls : {0, 1}) {
    std::vector<Eigen::Index> members;
    for (Eigen::Index i = 0; i < labels.size(); ++i)
      if (labels[i] == cls) members.push_back(i);
    rng.shuffle(members);
    const auto n_val = static_cast<std::size_t>(std::lround(validation_fraction * static_cast<double>(members.size())));
    for (std::size_t r = 0; r < members.size(); ++r) (r < n_val ? s.validation : s.train).push_back(members[r]);
  }
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.validation.begin(), s.validation.end());
  return s;
}

// Returns a copy of `rows` with cells zeroed according to the corruption scheme.
MatrixXd corrupt(const MatrixXd& rows, const AeConfig& config, const MaskXb& pool, Rng& rng) {
  MatrixXd out = rows;
  switch (config.corruption) {
    case AeCorruption::none: break;
    case AeCorruption::empirical:
      if (pool.rows() == 0) break;
      for (Eigen::Index i = 0; i < out.rows(); ++i) {
        if (rng.uniform() >= config.corruption_rate) continue;
        const auto pick = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(pool.rows())));
        for (Eigen::Index j = 0; j < out.cols(); ++j)
          if (!pool(pick, j)) out(i, j) = 0.0;
      }
      break;
    case AeCorruption::dropout:
      for (Eigen::Index j = 0; j < out.cols(); ++j)
        for (Eigen::Index i = 0; i < out.rows(); ++i)
          if (rng.uniform() < config.corruption_rate) out(i, j) = 0.0;
      break;
  }
  return out;
}

// Reconstruction loss and gradient; `weight` is 1 where the cell counts toward the loss.
LossResult<double> reconstruction_loss(const MatrixXd& pred, const MatrixXd& target, const MatrixXd& weight) {
  const MatrixXd diff = (pred - target).cwiseProduct(weight);
  const auto b = static_cast<double>(pred.rows());
  return {diff.squaredNorm() / b, (2.0 / b) * diff};
}

}  // namespace

AutoencoderModel train_autoencoder(const MaskedMatrix& low, const AeConfig& config, const MaskXb& corruption_pool) {
  if (low.rows() < 10)
    throw DomainError("autoencoder needs at least 10 low-sparsity records, got " + std::to_string(low.rows()));
  if (config.batch_size <= 0 || config.max_epochs <= 0 || config.patience < 0)
    throw ConfigError("autoencoder batch size and epoch limits must be positive");
  if (corruption_pool.rows() > 0 && corruption_pool.cols() != low.cols())
    throw ShapeError("corruption pool width does not match the data");

  Rng rng(config.seed);
  AutoencoderModel model;
  model.net = make_autoencoder_net(rng);

  const Split split = stratified_split(low.labels, config.validation_fraction, rng);
  const MatrixXd filled = impute_zero(low);
  const MatrixXd weight_all = config.loss == AeLoss::observed_only ? MatrixXd(low.mask.cast<double>())
                                                                   : MatrixXd::Ones(low.rows(), low.cols());
  const MatrixXd train_x = select_rows(filled, split.train);
  const MatrixXd train_w = select_rows(weight_all, split.train);
  const MatrixXd val_target = select_rows(filled, split.validation);
  const MatrixXd val_w = select_rows(weight_all, split.validation);
  // Validation inputs are corrupted once so the early-stopping signal is stable.
  const MatrixXd val_input = corrupt(val_target, config, corruption_pool, rng);

  auto validation_loss = [&](const NetParams& net) {
    if (val_target.rows() == 0) return 0.0;
    return reconstruction_loss(predict(net, val_input), val_target, val_w).value;
  };

  double best = std::numeric_limits<double>::infinity();
  NetParams best_net = model.net;
  int since_best = 0;
  const auto n = static_cast<Eigen::Index>(split.train.size());
  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    const auto order = rng.permutation(static_cast<std::size_t>(n));
    double epoch_loss = 0.0;
    for (Eigen::Index start = 0; start < n; start += config.batch_size) {
      const Eigen::Index stop = std::min<Eigen::Index>(n, start + config.batch_size);
      std::vector<Eigen::Index> idx(order.begin() + start, order.begin() + stop);
      const MatrixXd target = select_rows(train_x, idx);
      const MatrixXd weight = select_rows(train_w, idx);
      const MatrixXd input = corrupt(target, config, corruption_pool, rng);
      auto fr = forward(model.net, input);
      const auto loss = reconstruction_loss(fr.output, target, weight);
      if (!std::isfinite(loss.value))
        throw NumericError("autoencoder loss is not finite at epoch " + std::to_string(epoch));
      epoch_loss += loss.value * static_cast<double>(stop - start);
      const auto grads = backward(model.net, fr.tape, loss.grad);
      sgd_step(model.net, grads.params, config.learning_rate);
    }
    const double val = validation_loss(model.net);
    model.training_log.push_back({epoch_loss / static_cast<double>(n), val});
    if (val < best) {
      best = val;
      best_net = model.net;
      model.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= config.patience) {
      break;
    }
  }
  model.net = std::move(best_net);
  return model;
}

MatrixXd impute_autoencoder(const AutoencoderModel& model, const MaskedMatrix& data) {
  const MatrixXd filled = impute_zero(data);
  if (data.missing_count() == 0) return filled;
  const MatrixXd reconstructed = predict(model.net, filled);
  return data.mask.select(filled, reconstructed);
}

double imputation_rmse(const MatrixXd& completed, const GroundTruth& truth) {
  if (truth.empty()) throw DomainError("ground truth is empty");
  double sum = 0.0;
  for (const auto& c : truth) {
    if (c.row < 0 || c.row >= completed.rows() || c.attr < 0 || c.attr >= completed.cols())
      throw ShapeError("ground-truth cell outside the completed matrix");
    const double d = completed(c.row, c.attr) - c.value;
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(truth.size()));
}

}  // namespace ehrgan
