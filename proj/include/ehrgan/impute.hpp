#pragma once

#include <cstdint>
#include <vector>

#include "ehrgan/dataio.hpp"
#include "ehrgan/nn.hpp"

namespace ehrgan {

/// Missing cells set to 0.0, observed cells copied.
MatrixXd impute_zero(const MaskedMatrix& data);

struct ImputerStats {
  VectorXd means;  // per attribute, over observed cells only
};

ImputerStats fit_mean_imputer(const MaskedMatrix& train);
MatrixXd impute_mean(const ImputerStats& stats, const MaskedMatrix& data);

enum class AeLoss {
  full,          // squared error over all 30 outputs
  observed_only  // squared error over cells observed in the target record
};

enum class AeCorruption {
  none,       // input equals target
  empirical,  // zero out cells using missingness masks sampled from the sparse records
  dropout     // zero out each cell independently
};

struct AeConfig {
  double validation_fraction = 0.2;
  int patience = 20;
  int max_epochs = 1000;
  int batch_size = 16;
  double learning_rate = 0.05;
  AeLoss loss = AeLoss::full;
  AeCorruption corruption = AeCorruption::empirical;
  double corruption_rate = 0.5;  // share of training rows corrupted (empirical) or cell drop rate (dropout)
  std::uint64_t seed = 0;
};

struct EpochLoss {
  double train;
  double validation;
};

/// 30-20-10-20-30 stacked autoencoder; relu hidden layers, sigmoid output.
struct AutoencoderModel {
  NetParams net;
  std::vector<EpochLoss> training_log;
  int best_epoch = -1;
};

NetParams make_autoencoder_net(Rng& rng);

/// Trains on zero-imputed low-sparsity records with minibatch SGD and early stopping on
/// a stratified validation split. Returns the parameters of the best validation epoch.
/// `corruption_pool` rows are observation masks used by AeCorruption::empirical; an
/// empty pool disables that corruption.
AutoencoderModel train_autoencoder(const MaskedMatrix& low, const AeConfig& config,
                                   const MaskXb& corruption_pool = MaskXb());

/// One encode/decode pass over the zero-imputed rows; outputs fill missing cells only.
MatrixXd impute_autoencoder(const AutoencoderModel& model, const MaskedMatrix& data);

/// Root-mean-square error over the ground-truth cells. Truth values must be in the
/// same units as `completed`.
double imputation_rmse(const MatrixXd& completed, const GroundTruth& truth);

}  // namespace ehrgan
