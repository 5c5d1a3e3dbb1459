#include "ehrgan/acgan.hpp"

#include <cmath>
#include <ostream>

#include "ehrgan/csv.hpp"

namespace ehrgan {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// d/dz of -[t log s(z) + (1 - t) log(1 - s(z))] for t in {0, 1}.
// Written so that flipping t and negating z negates the result exactly.
double logit_bce_grad(double z, int t) { return t == 1 ? -sigmoid(-z) : sigmoid(z); }

double log_prob(double p) { return std::log(clamp_probability(p)); }

void check_classes(const LabelVector& classes) {
  for (Eigen::Index i = 0; i < classes.size(); ++i)
    if (classes[i] != 0 && classes[i] != 1)
      throw DomainError("class condition " + std::to_string(classes[i]) + " at index " + std::to_string(i) +
                        " is not 0 or 1");
}

MatrixXd generator_input(const MatrixXd& noise, const LabelVector& classes) {
  MatrixXd in(noise.rows(), noise.cols() + 1);
  in.leftCols(noise.cols()) = noise;
  for (Eigen::Index i = 0; i < classes.size(); ++i) in(i, noise.cols()) = classes[i] == 1 ? 1.0 : -1.0;
  return in;
}

double mean_log(const VectorXd& p, bool complement) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) s += log_prob(complement ? 1.0 - p[i] : p[i]);
  return s / static_cast<double>(p.size());
}

double mean_log_class(const VectorXd& p_class, const LabelVector& c) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < p_class.size(); ++i) s += log_prob(c[i] == 1 ? p_class[i] : 1.0 - p_class[i]);
  return s / static_cast<double>(p_class.size());
}

// avg = decay * avg + (1 - decay) * current, parameter by parameter.
void blend_into(NetParams& avg, const NetParams& current, double decay) {
  for (std::size_t k = 0; k < avg.layers.size(); ++k) {
    avg.layers[k].weights = decay * avg.layers[k].weights + (1.0 - decay) * current.layers[k].weights;
    avg.layers[k].bias = decay * avg.layers[k].bias + (1.0 - decay) * current.layers[k].bias;
  }
}

VectorXd sigmoid_col(const MatrixXd& logits, Eigen::Index col) {
  return logits.col(col).unaryExpr([](double z) { return sigmoid(z); });
}

}  // namespace

GeneratorModel make_generator(int noise_dim, int hidden, Rng& rng) {
  if (noise_dim <= 0 || hidden <= 0) throw ConfigError("generator dimensions must be positive");
  GeneratorModel g{make_network(noise_dim + 1, {{hidden, Activation::relu}, {kAttributeCount, Activation::sigmoid}}, rng),
                   noise_dim};
  // The condition column starts at zero so the model is symmetric under a label swap.
  g.net.layers.front().weights.col(noise_dim).setZero();
  return g;
}

DiscriminatorModel make_discriminator(int hidden, Rng& rng) {
  if (hidden <= 0) throw ConfigError("discriminator width must be positive");
  DiscriminatorModel d{make_network(kAttributeCount, {{hidden, Activation::relu}, {2, Activation::identity}}, rng)};
  d.net.layers.back().weights.row(1).setZero();
  return d;
}

MatrixXd sample_noise(Eigen::Index rows, int noise_dim, Rng& rng) {
  MatrixXd z(rows, noise_dim);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < noise_dim; ++j) z(i, j) = rng.uniform(-1.0, 1.0);
  return z;
}

MatrixXd generate(const GeneratorModel& g, const MatrixXd& noise, const LabelVector& classes) {
  if (noise.cols() != g.noise_dim) throw ShapeError("noise width does not match the generator");
  if (noise.rows() != classes.size()) throw ShapeError("noise and class counts differ");
  check_classes(classes);
  return predict(g.net, generator_input(noise, classes));
}

HeadOutputs discriminate(const DiscriminatorModel& d, const MatrixXd& batch) {
  if (batch.cols() != kAttributeCount)
    throw ShapeError("discriminator expects " + std::to_string(kAttributeCount) + " columns, got " +
                     std::to_string(batch.cols()));
  const MatrixXd logits = predict(d.net, batch);
  return {sigmoid_col(logits, 0), sigmoid_col(logits, 1)};
}

VectorXd predict_proba(const DiscriminatorModel& d, const MatrixXd& batch) { return discriminate(d, batch).p_class; }

AcganLosses acgan_losses(const VectorXd& p_real_on_real, const VectorXd& p_real_on_fake,
                         const VectorXd& p_class_on_real, const VectorXd& p_class_on_fake,
                         const LabelVector& real_labels, const LabelVector& fake_conditions) {
  if (p_real_on_real.size() != p_class_on_real.size() || p_real_on_real.size() != real_labels.size())
    throw ShapeError("real-batch vectors differ in length");
  if (p_real_on_fake.size() != p_class_on_fake.size() || p_real_on_fake.size() != fake_conditions.size())
    throw ShapeError("fake-batch vectors differ in length");
  if (real_labels.size() == 0 || fake_conditions.size() == 0) throw ShapeError("empty batch");
  check_classes(real_labels);
  check_classes(fake_conditions);
  return {mean_log(p_real_on_real, false) + mean_log(p_real_on_fake, true),
          mean_log_class(p_class_on_real, real_labels) + mean_log_class(p_class_on_fake, fake_conditions)};
}

AcganResult train_acgan(const MatrixXd& data, const LabelVector& labels, const AcganConfig& config) {
  if (data.cols() != kAttributeCount) throw ShapeError("training data must have 30 columns");
  if (data.rows() != labels.size()) throw ShapeError("data and label counts differ");
  check_classes(labels);
  const Eigen::Index positives = (labels.array() == 1).count();
  if (positives == 0 || positives == labels.size()) throw DomainError("AC-GAN training needs both classes");
  if (config.batch_size <= 0 || config.epochs <= 0 || config.d_steps_per_g_step <= 0 || config.adam_alpha <= 0)
    throw ConfigError("AC-GAN batch size, epochs, step ratio and learning rate must be positive");

  Rng rng(config.seed);
  AcganResult r;
  r.generator = make_generator(config.noise_dim, config.hidden, rng);
  r.discriminator = make_discriminator(config.hidden, rng);
  NetParams& g = r.generator.net;
  NetParams& d = r.discriminator.net;
  const AdamHyper hyper{config.adam_alpha, config.adam_beta1, 0.999, 1e-8};
  AdamState<double> g_state(g, hyper);
  AdamState<double> d_state(d, hyper);

  NetParams g_average = g;

  const Eigen::Index n = data.rows();
  long step = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const auto order = rng.permutation(static_cast<std::size_t>(n));
    AcganEpochLog log{{0, 0}, {0, 0}};
    int d_batches = 0, g_batches = 0;
    for (Eigen::Index start = 0; start < n; start += config.batch_size) {
      const Eigen::Index stop = std::min<Eigen::Index>(n, start + config.batch_size);
      const Eigen::Index m = stop - start;
      const double inv_m = 1.0 / static_cast<double>(m);
      std::vector<Eigen::Index> idx(order.begin() + start, order.begin() + stop);
      const MatrixXd real = select_rows(data, idx);
      const LabelVector y = select_rows(labels, idx);

      const MatrixXd noise = sample_noise(m, config.noise_dim, rng);
      auto g_pass = forward(g, generator_input(noise, y));
      const MatrixXd& fake = g_pass.output;

      // Discriminator: descend -(L_c + L_s).
      auto d_real = forward(d, real);
      auto d_fake = forward(d, fake);
      MatrixXd grad_real(m, 2), grad_fake(m, 2);
      for (Eigen::Index i = 0; i < m; ++i) {
        grad_real(i, 0) = logit_bce_grad(d_real.output(i, 0), 1) * inv_m;
        grad_real(i, 1) = logit_bce_grad(d_real.output(i, 1), y[i]) * inv_m;
        grad_fake(i, 0) = logit_bce_grad(d_fake.output(i, 0), 0) * inv_m;
        grad_fake(i, 1) = logit_bce_grad(d_fake.output(i, 1), y[i]) * inv_m;
      }
      const AcganLosses d_losses =
          acgan_losses(sigmoid_col(d_real.output, 0), sigmoid_col(d_fake.output, 0), sigmoid_col(d_real.output, 1),
                       sigmoid_col(d_fake.output, 1), y, y);
      if (!std::isfinite(d_losses.source) || !std::isfinite(d_losses.cls))
        throw NumericError("discriminator loss is not finite at epoch " + std::to_string(epoch));
      auto d_grads = backward(d, d_real.tape, grad_real).params;
      accumulate(d_grads, backward(d, d_fake.tape, grad_fake).params);
      adam_step(d, d_grads, d_state);
      log.discriminator.source += d_losses.source;
      log.discriminator.cls += d_losses.cls;
      ++d_batches;

      if (++step % config.d_steps_per_g_step != 0) continue;

      // Generator: descend L_s - L_c through the updated, frozen discriminator.
      auto d_on_fake = forward(d, fake);
      MatrixXd grad_out(m, 2);
      for (Eigen::Index i = 0; i < m; ++i) {
        grad_out(i, 0) = -logit_bce_grad(d_on_fake.output(i, 0), 0) * inv_m;
        grad_out(i, 1) = logit_bce_grad(d_on_fake.output(i, 1), y[i]) * inv_m;
      }
      const MatrixXd d_input_grad = backward(d, d_on_fake.tape, grad_out).input;
      const auto g_grads = backward(g, g_pass.tape, d_input_grad).params;
      const MatrixXd on_real = predict(d, real);
      const AcganLosses g_losses =
          acgan_losses(sigmoid_col(on_real, 0), sigmoid_col(d_on_fake.output, 0), sigmoid_col(on_real, 1),
                       sigmoid_col(d_on_fake.output, 1), y, y);
      if (!std::isfinite(g_losses.source) || !std::isfinite(g_losses.cls))
        throw NumericError("generator loss is not finite at epoch " + std::to_string(epoch));
      adam_step(g, g_grads, g_state);
      if (config.generator_ema > 0) blend_into(g_average, g, config.generator_ema);
      log.generator.source += g_losses.source;
      log.generator.cls += g_losses.cls;
      ++g_batches;
    }
    log.discriminator.source /= d_batches;
    log.discriminator.cls /= d_batches;
    if (g_batches > 0) {
      log.generator.source /= g_batches;
      log.generator.cls /= g_batches;
    }
    r.loss_log.push_back(log);
  }
  if (config.generator_ema > 0) g = std::move(g_average);
  return r;
}

void write_generated_csv(std::ostream& out, const MatrixXd& samples, const LabelVector& classes) {
  if (samples.rows() != classes.size()) throw ShapeError("sample and class counts differ");
  out << "class";
  for (Eigen::Index j = 0; j < samples.cols(); ++j) out << ",f" << j;
  out << '\n';
  for (Eigen::Index i = 0; i < samples.rows(); ++i) {
    out << classes[i];
    for (Eigen::Index j = 0; j < samples.cols(); ++j) out << ',' << csv::format(samples(i, j));
    out << '\n';
  }
}

}  // namespace ehrgan
