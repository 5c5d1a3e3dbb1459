#include "ehrgan/model_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "ehrgan/csv.hpp"

namespace ehrgan {

namespace {

constexpr const char* kMagic = "EHRGANMODEL";
constexpr int kVersion = 1;

ModelKind kind_from_string(std::string_view s, std::size_t line) {
  if (s == "autoencoder") return ModelKind::autoencoder;
  if (s == "generator") return ModelKind::generator;
  if (s == "discriminator") return ModelKind::discriminator;
  throw ParseError("unknown model kind '" + std::string(s) + "'", line);
}

template <typename Row>
void write_row(std::ostream& out, const Row& row) {
  for (Eigen::Index j = 0; j < row.size(); ++j) {
    if (j) out << ' ';
    out << csv::format(row[j]);
  }
  out << '\n';
}

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  std::vector<std::string_view> next() {
    if (!std::getline(in_, current_)) throw SchemaError("model file ends early after line " + std::to_string(line_));
    ++line_;
    std::vector<std::string_view> out;
    for (auto f : csv::split(csv::trim(current_), ' '))
      if (!f.empty()) out.push_back(f);
    return out;
  }

  // Reads "<key> <value>" and returns the value field.
  std::string_view keyed(std::string_view key) {
    auto f = next();
    if (f.size() != 2 || f[0] != key)
      throw ParseError("expected '" + std::string(key) + " <value>'", line_);
    value_ = std::string(f[1]);
    return value_;
  }

  std::size_t line() const { return line_; }

 private:
  std::istream& in_;
  std::string current_;
  std::string value_;
  std::size_t line_ = 0;
};

VectorXd parse_row(LineReader& r, Eigen::Index width) {
  auto f = r.next();
  if (static_cast<Eigen::Index>(f.size()) != width)
    throw ParseError("expected " + std::to_string(width) + " values, found " + std::to_string(f.size()), r.line());
  VectorXd v(width);
  for (Eigen::Index j = 0; j < width; ++j) v[j] = csv::parse_double(f[static_cast<std::size_t>(j)], r.line());
  return v;
}

StoredModel expect_kind(StoredModel m, ModelKind kind, const std::filesystem::path& path) {
  if (m.kind != kind)
    throw SchemaError(path.string() + ": holds a " + to_string(m.kind) + " model, expected " + to_string(kind));
  return m;
}

}  // namespace

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::autoencoder: return "autoencoder";
    case ModelKind::generator: return "generator";
    case ModelKind::discriminator: return "discriminator";
  }
  return "unknown";
}

void write_model(std::ostream& out, const StoredModel& model) {
  model.net.validate();
  out << kMagic << ' ' << kVersion << '\n';
  out << "kind " << to_string(model.kind) << '\n';
  out << "noise_dim " << model.noise_dim << '\n';
  out << "layers " << model.net.layers.size() << '\n';
  for (const auto& l : model.net.layers) {
    out << "layer " << l.fan_out() << ' ' << l.fan_in() << ' ' << to_string(l.activation) << '\n';
    for (Eigen::Index i = 0; i < l.weights.rows(); ++i) write_row(out, l.weights.row(i));
    write_row(out, l.bias);
  }
  out << "best_epoch " << model.best_epoch << '\n';
  out << "training_log " << model.training_log.size() << '\n';
  for (const auto& e : model.training_log) out << csv::format(e.train) << ' ' << csv::format(e.validation) << '\n';
  out << "end\n";
}

StoredModel read_model(std::istream& in) {
  LineReader r(in);
  auto head = r.next();
  if (head.size() != 2 || head[0] != kMagic) throw SchemaError("not a model file (missing " + std::string(kMagic) + " header)");
  if (csv::parse_long(head[1], 1) != kVersion)
    throw SchemaError("unsupported model format version " + std::string(head[1]));

  StoredModel m;
  m.kind = kind_from_string(r.keyed("kind"), r.line());
  m.noise_dim = static_cast<int>(csv::parse_long(r.keyed("noise_dim"), r.line()));
  const long n_layers = csv::parse_long(r.keyed("layers"), r.line());
  if (n_layers < 1) throw ParseError("layer count must be positive", r.line());
  for (long k = 0; k < n_layers; ++k) {
    auto f = r.next();
    if (f.size() != 4 || f[0] != "layer") throw ParseError("expected 'layer <fan_out> <fan_in> <activation>'", r.line());
    const long fan_out = csv::parse_long(f[1], r.line());
    const long fan_in = csv::parse_long(f[2], r.line());
    if (fan_out < 1 || fan_in < 1) throw ParseError("layer dimensions must be positive", r.line());
    DenseLayer<double> layer;
    layer.activation = activation_from_string(std::string(f[3]));
    layer.weights.resize(fan_out, fan_in);
    for (long i = 0; i < fan_out; ++i) layer.weights.row(i) = parse_row(r, fan_in).transpose();
    layer.bias = parse_row(r, fan_out);
    m.net.layers.push_back(std::move(layer));
  }
  m.best_epoch = static_cast<int>(csv::parse_long(r.keyed("best_epoch"), r.line()));
  const long n_log = csv::parse_long(r.keyed("training_log"), r.line());
  if (n_log < 0) throw ParseError("training log length must be non-negative", r.line());
  for (long e = 0; e < n_log; ++e) {
    const VectorXd v = parse_row(r, 2);
    m.training_log.push_back({v[0], v[1]});
  }
  auto tail = r.next();
  if (tail.size() != 1 || tail[0] != "end") throw ParseError("expected 'end'", r.line());
  m.net.validate();
  return m;
}

void save_model(const std::filesystem::path& path, const StoredModel& model) {
  std::ostringstream buf;
  write_model(buf, model);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << buf.str();
  if (!out) throw IoError("failed writing " + path.string());
}

StoredModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file " + path.string());
  try {
    return read_model(in);
  } catch (const Error& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

void save_autoencoder(const std::filesystem::path& path, const AutoencoderModel& model) {
  save_model(path, {ModelKind::autoencoder, model.net, 0, model.best_epoch, model.training_log});
}

AutoencoderModel load_autoencoder(const std::filesystem::path& path) {
  auto m = expect_kind(load_model(path), ModelKind::autoencoder, path);
  return {std::move(m.net), std::move(m.training_log), m.best_epoch};
}

void save_generator(const std::filesystem::path& path, const GeneratorModel& model) {
  save_model(path, {ModelKind::generator, model.net, model.noise_dim, -1, {}});
}

GeneratorModel load_generator(const std::filesystem::path& path) {
  auto m = expect_kind(load_model(path), ModelKind::generator, path);
  if (m.noise_dim <= 0 || m.net.input_width() != m.noise_dim + 1)
    throw SchemaError(path.string() + ": generator input width does not match noise_dim");
  return {std::move(m.net), m.noise_dim};
}

void save_discriminator(const std::filesystem::path& path, const DiscriminatorModel& model) {
  save_model(path, {ModelKind::discriminator, model.net, 0, -1, {}});
}

DiscriminatorModel load_discriminator(const std::filesystem::path& path) {
  auto m = expect_kind(load_model(path), ModelKind::discriminator, path);
  if (m.net.input_width() != kAttributeCount || m.net.output_width() != 2)
    throw SchemaError(path.string() + ": discriminator must map 30 inputs to 2 outputs");
  return {std::move(m.net)};
}

}  // namespace ehrgan
