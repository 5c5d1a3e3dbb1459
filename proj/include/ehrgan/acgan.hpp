#pragma once

// Auxiliary-classifier GAN for 30-attribute tabular records. The discriminator's
// class head doubles as the disease classifier.

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "ehrgan/dataio.hpp"
#include "ehrgan/nn.hpp"

namespace ehrgan {

struct AcganConfig {
  int noise_dim = 32;
  int hidden = 50;
  int batch_size = 32;
  int epochs = 300;
  double adam_alpha = 1e-3;
  double adam_beta1 = 0.5;
  int d_steps_per_g_step = 1;
  double generator_ema = 0.999;  // > 0: return this exponential moving average of the G iterates
  std::uint64_t seed = 0;
};

/// Input is noise (noise_dim) followed by one signed class-condition column
/// (-1 benign, +1 malignant); hidden relu layer; 30 sigmoid outputs.
struct GeneratorModel {
  NetParams net;
  int noise_dim = 0;
};

/// Shared relu trunk and a 2-wide output layer of logits. Column 0 is the source
/// head, P(S = real | x); column 1 is the class head, P(C = malignant | x).
struct DiscriminatorModel {
  NetParams net;
};

GeneratorModel make_generator(int noise_dim, int hidden, Rng& rng);
DiscriminatorModel make_discriminator(int hidden, Rng& rng);

/// Noise rows drawn uniformly from [-1, 1).
MatrixXd sample_noise(Eigen::Index rows, int noise_dim, Rng& rng);

MatrixXd generate(const GeneratorModel& g, const MatrixXd& noise, const LabelVector& classes);

struct HeadOutputs {
  VectorXd p_real;
  VectorXd p_class;
};

HeadOutputs discriminate(const DiscriminatorModel& d, const MatrixXd& batch);

/// Class-head scores, P(malignant | x), in [0, 1].
VectorXd predict_proba(const DiscriminatorModel& d, const MatrixXd& batch);

struct AcganLosses {
  double source;  // L_s
  double cls;     // L_c
};

/// L_s = E[log P(S=real | X_real)] + E[log P(S=fake | X_fake)]
/// L_c = E[log P(C=c | X_real)] + E[log P(C=c | X_fake)]
/// Fake records count toward the class they were generated for. Log arguments are
/// clamped to [1e-7, 1 - 1e-7].
AcganLosses acgan_losses(const VectorXd& p_real_on_real, const VectorXd& p_real_on_fake,
                         const VectorXd& p_class_on_real, const VectorXd& p_class_on_fake,
                         const LabelVector& real_labels, const LabelVector& fake_conditions);

struct AcganEpochLog {
  AcganLosses discriminator;
  AcganLosses generator;
};

struct AcganResult {
  GeneratorModel generator;
  DiscriminatorModel discriminator;
  std::vector<AcganEpochLog> loss_log;
};

/// Alternating minibatch training. D ascends L_c + L_s; G ascends L_c - L_s through
/// a frozen D. Each fake batch is conditioned on the labels of the real batch it is
/// paired with. Deterministic per seed.
AcganResult train_acgan(const MatrixXd& data, const LabelVector& labels, const AcganConfig& config);

/// CSV with header class,f0..f29.
void write_generated_csv(std::ostream& out, const MatrixXd& samples, const LabelVector& classes);

}  // namespace ehrgan
