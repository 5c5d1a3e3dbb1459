#pragma once

// Dense feed-forward networks with hand-written backpropagation, SGD and Adam,
// and a central-difference gradient checker. Every neural model in the project
// (autoencoder, generator, discriminator, MLP baseline) is a Network.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ehrgan/errors.hpp"
#include "ehrgan/rng.hpp"

namespace ehrgan {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXd = Matrix<double>;
using VectorXd = Vector<double>;

enum class Activation { identity, relu, sigmoid };

inline const char* to_string(Activation a) {
  switch (a) {
    case Activation::identity: return "identity";
    case Activation::relu: return "relu";
    case Activation::sigmoid: return "sigmoid";
  }
  return "?";
}

inline Activation activation_from_string(const std::string& s) {
  if (s == "identity") return Activation::identity;
  if (s == "relu") return Activation::relu;
  if (s == "sigmoid") return Activation::sigmoid;
  throw DomainError("unknown activation '" + s + "'");
}

template <typename Scalar>
struct DenseLayer {
  Matrix<Scalar> weights;  // fan_out x fan_in
  Vector<Scalar> bias;     // fan_out
  Activation activation = Activation::identity;

  Eigen::Index fan_in() const { return weights.cols(); }
  Eigen::Index fan_out() const { return weights.rows(); }
};

template <typename Scalar>
struct Network {
  std::vector<DenseLayer<Scalar>> layers;

  Eigen::Index input_width() const { return layers.empty() ? 0 : layers.front().fan_in(); }
  Eigen::Index output_width() const { return layers.empty() ? 0 : layers.back().fan_out(); }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += static_cast<std::size_t>(l.weights.size() + l.bias.size());
    return n;
  }

  // Throws ShapeError on incompatible consecutive layers, NumericError on non-finite values.
  void validate() const {
    for (std::size_t k = 0; k < layers.size(); ++k) {
      const auto& l = layers[k];
      if (l.bias.size() != l.fan_out())
        throw ShapeError("layer " + std::to_string(k) + ": bias length " + std::to_string(l.bias.size()) +
                         " != fan_out " + std::to_string(l.fan_out()));
      if (k > 0 && l.fan_in() != layers[k - 1].fan_out())
        throw ShapeError("layer " + std::to_string(k) + ": fan_in " + std::to_string(l.fan_in()) +
                         " != previous fan_out " + std::to_string(layers[k - 1].fan_out()));
      if (!l.weights.allFinite() || !l.bias.allFinite())
        throw NumericError("layer " + std::to_string(k) + ": non-finite parameter");
    }
  }

  // Same shapes, all parameters zero.
  Network zeros_like() const {
    Network z;
    z.layers.reserve(layers.size());
    for (const auto& l : layers)
      z.layers.push_back({Matrix<Scalar>::Zero(l.weights.rows(), l.weights.cols()),
                          Vector<Scalar>::Zero(l.bias.size()), l.activation});
    return z;
  }
};

/// Same network with every parameter converted to To.
template <typename To, typename From>
Network<To> cast_network(const Network<From>& net) {
  Network<To> out;
  out.layers.reserve(net.layers.size());
  for (const auto& l : net.layers)
    out.layers.push_back({l.weights.template cast<To>(), l.bias.template cast<To>(), l.activation});
  return out;
}

/// into += other, layer by layer. Shapes must match.
template <typename Scalar>
void accumulate(Network<Scalar>& into, const Network<Scalar>& other) {
  if (into.layers.size() != other.layers.size()) throw ShapeError("accumulate: layer counts differ");
  for (std::size_t k = 0; k < into.layers.size(); ++k) {
    into.layers[k].weights += other.layers[k].weights;
    into.layers[k].bias += other.layers[k].bias;
  }
}

using NetParams = Network<double>;

struct LayerSpec {
  Eigen::Index width;
  Activation activation;
};

/// Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases.
template <typename Scalar = double>
Network<Scalar> make_network(Eigen::Index input_width, std::span<const LayerSpec> specs, Rng& rng) {
  Network<Scalar> net;
  Eigen::Index fan_in = input_width;
  for (const auto& s : specs) {
    DenseLayer<Scalar> l;
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + s.width));
    l.weights.resize(s.width, fan_in);
    for (Eigen::Index c = 0; c < fan_in; ++c)
      for (Eigen::Index r = 0; r < s.width; ++r) l.weights(r, c) = static_cast<Scalar>(rng.uniform(-limit, limit));
    l.bias = Vector<Scalar>::Zero(s.width);
    l.activation = s.activation;
    net.layers.push_back(std::move(l));
    fan_in = s.width;
  }
  return net;
}

template <typename Scalar = double>
Network<Scalar> make_network(Eigen::Index input_width, std::initializer_list<LayerSpec> specs, Rng& rng) {
  return make_network<Scalar>(input_width, std::span<const LayerSpec>(specs.begin(), specs.size()), rng);
}

/// Intermediates recorded by forward() and consumed by backward().
template <typename Scalar>
struct BatchTape {
  Matrix<Scalar> input;
  std::vector<Matrix<Scalar>> pre;   // per layer, B x fan_out
  std::vector<Matrix<Scalar>> post;  // per layer, B x fan_out

  Eigen::Index batch_size() const { return input.rows(); }
  std::size_t layer_count() const { return pre.size(); }
};

template <typename Scalar>
struct Gradients {
  Network<Scalar> params;       // d loss / d theta, shaped like the network
  Matrix<Scalar> input;         // d loss / d batch
};

namespace detail {

template <typename Derived>
auto activate(const Eigen::MatrixBase<Derived>& z, Activation a) {
  using Scalar = typename Derived::Scalar;
  Matrix<Scalar> out;
  switch (a) {
    case Activation::identity: out = z; break;
    case Activation::relu: out = z.cwiseMax(Scalar(0)); break;
    case Activation::sigmoid:
      out = z.unaryExpr([](Scalar v) { return Scalar(1) / (Scalar(1) + std::exp(-v)); });
      break;
  }
  return out;
}

// Elementwise derivative of the activation, given pre- and post-activation values.
// relu uses subgradient 0 at exactly 0.
template <typename Scalar>
Matrix<Scalar> activation_derivative(const Matrix<Scalar>& pre, const Matrix<Scalar>& post, Activation a) {
  switch (a) {
    case Activation::identity: return Matrix<Scalar>::Ones(pre.rows(), pre.cols());
    case Activation::relu: return (pre.array() > Scalar(0)).template cast<Scalar>().matrix();
    case Activation::sigmoid: return (post.array() * (Scalar(1) - post.array())).matrix();
  }
  return {};
}

}  // namespace detail

template <typename Scalar>
struct ForwardResult {
  Matrix<Scalar> output;
  BatchTape<Scalar> tape;
};

template <typename Scalar>
void check_input(const Network<Scalar>& net, Eigen::Index rows, Eigen::Index cols) {
  if (net.layers.empty()) throw ShapeError("network has no layers");
  if (rows == 0) throw ShapeError("empty batch");
  if (cols != net.input_width())
    throw ShapeError("layer 0: batch has " + std::to_string(cols) + " columns, expected fan_in " +
                     std::to_string(net.input_width()));
}

template <typename Scalar>
ForwardResult<Scalar> forward(const Network<Scalar>& net, const Matrix<Scalar>& batch) {
  check_input(net, batch.rows(), batch.cols());
  ForwardResult<Scalar> r;
  r.tape.input = batch;
  r.tape.pre.reserve(net.layers.size());
  r.tape.post.reserve(net.layers.size());
  const Matrix<Scalar>* x = &r.tape.input;
  for (std::size_t k = 0; k < net.layers.size(); ++k) {
    const auto& l = net.layers[k];
    if (x->cols() != l.fan_in())
      throw ShapeError("layer " + std::to_string(k) + ": input width " + std::to_string(x->cols()) +
                       " != fan_in " + std::to_string(l.fan_in()));
    Matrix<Scalar> z = (*x) * l.weights.transpose();
    z.rowwise() += l.bias.transpose();
    r.tape.post.push_back(detail::activate(z, l.activation));
    r.tape.pre.push_back(std::move(z));
    x = &r.tape.post.back();
  }
  r.output = r.tape.post.back();
  return r;
}

/// Forward pass without recording intermediates.
template <typename Scalar>
Matrix<Scalar> predict(const Network<Scalar>& net, const Matrix<Scalar>& batch) {
  check_input(net, batch.rows(), batch.cols());
  Matrix<Scalar> x = batch;
  for (const auto& l : net.layers) {
    Matrix<Scalar> z = x * l.weights.transpose();
    z.rowwise() += l.bias.transpose();
    x = detail::activate(z, l.activation);
  }
  return x;
}

template <typename Scalar>
Gradients<Scalar> backward(const Network<Scalar>& net, const BatchTape<Scalar>& tape,
                           const Matrix<Scalar>& output_grad) {
  if (tape.layer_count() != net.layers.size() || tape.post.size() != net.layers.size())
    throw StateError("tape has " + std::to_string(tape.layer_count()) + " layers, network has " +
                     std::to_string(net.layers.size()));
  for (std::size_t k = 0; k < net.layers.size(); ++k)
    if (tape.pre[k].cols() != net.layers[k].fan_out() || tape.pre[k].rows() != tape.batch_size())
      throw StateError("tape layer " + std::to_string(k) + " does not match the network");
  if (output_grad.rows() != tape.batch_size() || output_grad.cols() != net.output_width())
    throw ShapeError("output gradient is " + std::to_string(output_grad.rows()) + "x" +
                     std::to_string(output_grad.cols()) + ", expected " + std::to_string(tape.batch_size()) +
                     "x" + std::to_string(net.output_width()));

  Gradients<Scalar> g;
  g.params = net.zeros_like();
  Matrix<Scalar> delta = output_grad;
  for (std::size_t k = net.layers.size(); k-- > 0;) {
    const auto& l = net.layers[k];
    delta.array() *= detail::activation_derivative(tape.pre[k], tape.post[k], l.activation).array();
    const Matrix<Scalar>& x = k == 0 ? tape.input : tape.post[k - 1];
    g.params.layers[k].weights.noalias() = delta.transpose() * x;
    g.params.layers[k].bias = delta.colwise().sum().transpose();
    delta = delta * l.weights;
  }
  g.input = std::move(delta);
  return g;
}

template <typename Scalar>
struct LossResult {
  Scalar value;
  Matrix<Scalar> grad;  // d value / d pred
};

/// Mean over rows of the squared row error, i.e. the reconstruction error averaged over the batch.
template <typename Scalar>
LossResult<Scalar> mse_loss(const Matrix<Scalar>& pred, const Matrix<Scalar>& target) {
  if (pred.rows() != target.rows() || pred.cols() != target.cols())
    throw ShapeError("mse_loss: prediction and target shapes differ");
  if (pred.rows() == 0) throw ShapeError("mse_loss: empty batch");
  const Matrix<Scalar> diff = pred - target;
  const auto b = static_cast<Scalar>(pred.rows());
  return {diff.squaredNorm() / b, (Scalar(2) / b) * diff};
}

inline constexpr double kProbabilityClamp = 1e-7;

template <typename Scalar>
Scalar clamp_probability(Scalar p) {
  return std::clamp(p, Scalar(kProbabilityClamp), Scalar(1.0 - kProbabilityClamp));
}

/// Binary cross-entropy, -mean[t log p + (1 - t) log(1 - p)], with p clamped to [1e-7, 1 - 1e-7].
template <typename Scalar>
LossResult<Scalar> bce_loss(const Vector<Scalar>& pred, const Vector<Scalar>& target) {
  if (pred.size() != target.size()) throw ShapeError("bce_loss: prediction and target lengths differ");
  if (pred.size() == 0) throw ShapeError("bce_loss: empty batch");
  const auto b = static_cast<Scalar>(pred.size());
  LossResult<Scalar> r{Scalar(0), Matrix<Scalar>(pred.size(), 1)};
  for (Eigen::Index i = 0; i < pred.size(); ++i) {
    if (!(pred[i] >= Scalar(0) && pred[i] <= Scalar(1)))
      throw DomainError("bce_loss: prediction " + std::to_string(static_cast<double>(pred[i])) +
                        " outside [0, 1] at index " + std::to_string(i));
    const Scalar p = clamp_probability(pred[i]);
    const Scalar t = target[i];
    r.value -= t * std::log(p) + (Scalar(1) - t) * std::log(Scalar(1) - p);
    r.grad(i, 0) = (p - t) / (p * (Scalar(1) - p)) / b;
  }
  r.value /= b;
  return r;
}

enum class LossKind {
  mse,  // mse_loss against the target matrix
  bce   // sum over output columns of the column-wise bce_loss
};

template <typename Scalar>
LossResult<Scalar> evaluate_loss(LossKind kind, const Matrix<Scalar>& pred, const Matrix<Scalar>& target) {
  if (kind == LossKind::mse) return mse_loss(pred, target);
  if (pred.rows() != target.rows() || pred.cols() != target.cols())
    throw ShapeError("bce: prediction and target shapes differ");
  LossResult<Scalar> total{Scalar(0), Matrix<Scalar>(pred.rows(), pred.cols())};
  for (Eigen::Index c = 0; c < pred.cols(); ++c) {
    auto col = bce_loss<Scalar>(pred.col(c), target.col(c));
    total.value += col.value;
    total.grad.col(c) = col.grad.col(0);
  }
  return total;
}

struct AdamHyper {
  double alpha = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

template <typename Scalar>
struct AdamState {
  Network<Scalar> first_moment;
  Network<Scalar> second_moment;
  long step_count = 0;
  AdamHyper hyper;

  AdamState() = default;
  AdamState(const Network<Scalar>& net, AdamHyper h)
      : first_moment(net.zeros_like()), second_moment(net.zeros_like()), hyper(h) {}
};

namespace detail {

template <typename Scalar>
void check_same_shape(const Network<Scalar>& a, const Network<Scalar>& b, const char* what) {
  bool ok = a.layers.size() == b.layers.size();
  for (std::size_t k = 0; ok && k < a.layers.size(); ++k)
    ok = a.layers[k].weights.rows() == b.layers[k].weights.rows() &&
         a.layers[k].weights.cols() == b.layers[k].weights.cols() && a.layers[k].bias.size() == b.layers[k].bias.size();
  if (!ok) throw ShapeError(std::string(what) + " shapes do not match the network");
}

template <typename Scalar>
void check_finite(const Network<Scalar>& g) {
  for (std::size_t k = 0; k < g.layers.size(); ++k) {
    if (!g.layers[k].weights.allFinite())
      throw NumericError("non-finite gradient in layer " + std::to_string(k) + " weights");
    if (!g.layers[k].bias.allFinite())
      throw NumericError("non-finite gradient in layer " + std::to_string(k) + " bias");
  }
}

template <typename Param, typename Scalar>
void adam_update(Param& param, const Param& grad, Param& m, Param& v, Scalar lr_t, Scalar b1, Scalar b2,
                 Scalar eps_t) {
  m = b1 * m + (Scalar(1) - b1) * grad;
  v = b2 * v + (Scalar(1) - b2) * grad.cwiseProduct(grad);
  param.array() -= lr_t * m.array() / (v.array().sqrt() + eps_t);
}

}  // namespace detail

/// One Adam update with bias correction.
///
/// Uses the fused form lr_t = alpha * sqrt(1 - beta2^t) / (1 - beta1^t) with
/// epsilon scaled by sqrt(1 - beta2^t), which is algebraically identical to
/// m_hat / (sqrt(v_hat) + epsilon).
template <typename Scalar>
void adam_step(Network<Scalar>& net, const Network<Scalar>& grads, AdamState<Scalar>& state) {
  detail::check_same_shape(net, grads, "gradient");
  detail::check_same_shape(net, state.first_moment, "Adam moment");
  detail::check_finite(grads);
  state.step_count += 1;
  const auto t = static_cast<Scalar>(state.step_count);
  const Scalar b1 = static_cast<Scalar>(state.hyper.beta1);
  const Scalar b2 = static_cast<Scalar>(state.hyper.beta2);
  const Scalar c1 = Scalar(1) - std::pow(b1, t);
  const Scalar c2 = std::sqrt(Scalar(1) - std::pow(b2, t));
  const Scalar lr_t = static_cast<Scalar>(state.hyper.alpha) * c2 / c1;
  const Scalar eps_t = static_cast<Scalar>(state.hyper.epsilon) * c2;
  for (std::size_t k = 0; k < net.layers.size(); ++k) {
    auto& l = net.layers[k];
    const auto& g = grads.layers[k];
    auto& m = state.first_moment.layers[k];
    auto& v = state.second_moment.layers[k];
    detail::adam_update(l.weights, g.weights, m.weights, v.weights, lr_t, b1, b2, eps_t);
    detail::adam_update(l.bias, g.bias, m.bias, v.bias, lr_t, b1, b2, eps_t);
  }
}

/// Plain gradient descent: theta -= lr * grad.
template <typename Scalar>
void sgd_step(Network<Scalar>& net, const Network<Scalar>& grads, Scalar lr) {
  detail::check_same_shape(net, grads, "gradient");
  detail::check_finite(grads);
  for (std::size_t k = 0; k < net.layers.size(); ++k) {
    net.layers[k].weights -= lr * grads.layers[k].weights;
    net.layers[k].bias -= lr * grads.layers[k].bias;
  }
}

/// Max relative error between backprop and central differences over every parameter.
/// Relative error is |a - n| / max(|a|, |n|, 1e-8). Backprop runs in Scalar; the
/// differences run in long double so their rounding noise stays far below the
/// tolerance even for tiny gradients. The network is not modified.
template <typename Scalar>
Scalar grad_check(const Network<Scalar>& net, const Matrix<Scalar>& batch, LossKind kind,
                  const Matrix<Scalar>& target, Scalar step = Scalar(1e-5)) {
  using Wide = long double;
  auto fr = forward(net, batch);
  const auto analytic = backward(net, fr.tape, evaluate_loss(kind, fr.output, target).grad);
  Network<Wide> probe = cast_network<Wide>(net);
  const Matrix<Wide> wide_batch = batch.template cast<Wide>();
  const Matrix<Wide> wide_target = target.template cast<Wide>();
  auto loss_at = [&](const Network<Wide>& p) {
    return evaluate_loss(kind, predict(p, wide_batch), wide_target).value;
  };
  const Wide h = static_cast<Wide>(step);
  Wide worst = 0;
  auto visit = [&](Wide& param, Scalar grad) {
    const Wide a = static_cast<Wide>(grad);
    const Wide saved = param;
    param = saved + h;
    const Wide up = loss_at(probe);
    param = saved - h;
    const Wide down = loss_at(probe);
    param = saved;
    const Wide n = (up - down) / (Wide(2) * h);
    const Wide denom = std::max({std::abs(a), std::abs(n), Wide(1e-8)});
    worst = std::max(worst, std::abs(a - n) / denom);
  };
  for (std::size_t k = 0; k < probe.layers.size(); ++k) {
    auto& l = probe.layers[k];
    const auto& g = analytic.params.layers[k];
    for (Eigen::Index i = 0; i < l.weights.size(); ++i) visit(l.weights.data()[i], g.weights.data()[i]);
    for (Eigen::Index i = 0; i < l.bias.size(); ++i) visit(l.bias.data()[i], g.bias.data()[i]);
  }
  return static_cast<Scalar>(worst);
}

}  // namespace ehrgan
