#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ehrgan/acgan.hpp"
#include "ehrgan/config.hpp"
#include "ehrgan/impute.hpp"
#include "ehrgan/model_io.hpp"
#include "support.hpp"

using namespace ehrgan;
namespace fs = std::filesystem;

namespace {

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "ehrgan_config_io";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("empty config yields the defaults") {
  const ExperimentConfig c = parse("# nothing\n\n");
  CHECK(c.seed == 1);
  CHECK(c.folds == 5);
  CHECK(c.trials == 10);
  CHECK(c.missing_attr_count == 15);
  CHECK(c.classifiers.size() == 8);
  CHECK(c.arms.size() == 2);
  CHECK(c.acgan.hidden == 50);
}

TEST_CASE("parse_config reads values and rejects mistakes with line numbers") {
  const ExperimentConfig c = parse("seed = 42\neval.classifiers = svm, mlp # trailing\nsvm.gamma = 0.25\n");
  CHECK(c.seed == 42);
  CHECK(c.classifiers == std::vector<Classifier>{Classifier::svm, Classifier::mlp});
  CHECK(c.svm.gamma_mode == GammaMode::fixed);
  CHECK(c.svm.gamma == 0.25);

  auto message = [](const std::string& text) {
    try {
      parse(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message("\nbogus = 1\n").find("line 2") != std::string::npos);
  CHECK(message("seed = 1\nseed = 2\n").find("already set") != std::string::npos);
  CHECK(message("eval.folds = 1\n").find("eval.folds") != std::string::npos);
  CHECK(message("seed\n").find("key = value") != std::string::npos);
  CHECK_FALSE(message("eval.classifiers = knn\n").empty());
  CHECK_FALSE(message("missing_fraction = 2\n").empty());
  CHECK_THROWS_AS(load_config("/nonexistent/config.txt"), ConfigError);
}

TEST_CASE("template and serialization parse back to the same configuration") {
  const ExperimentConfig defaults;
  CHECK(serialize_config(parse(config_template())) == serialize_config(defaults));
  ExperimentConfig c;
  set_config_value(c, "seed", "9");
  set_config_value(c, "tsne.perplexity", "12.5");
  set_config_value(c, "eval.arms", "ae");
  const ExperimentConfig back = parse(serialize_config(c));
  CHECK(serialize_config(back) == serialize_config(c));
  CHECK(config_hash(back) == config_hash(c));
  CHECK_THROWS_AS(set_config_value(c, "nope", "1"), ConfigError);
}

TEST_CASE("config hash ignores output location and worker count only") {
  ExperimentConfig a, b;
  b.out = "elsewhere";
  b.workers = 3;
  CHECK(config_hash(a) == config_hash(b));
  b.seed = 2;
  CHECK(config_hash(a) != config_hash(b));
  CHECK(config_hash(a).size() == 16);
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("name helpers round-trip") {
  for (Classifier c : all_classifiers()) CHECK(classifier_from_string(to_string(c)) == c);
  CHECK(arm_from_string("ae") == Arm::ae);
  CHECK(display_name(Classifier::acgan) == "AC-GAN");
  CHECK_THROWS_AS(arm_from_string("median"), ConfigError);
}

TEST_CASE("models survive a save and load bit for bit") {
  Rng rng(91);
  AutoencoderModel ae{make_autoencoder_net(rng), {{0.5, 0.25}, {1.0 / 3.0, 0.1}}, 1};
  save_autoencoder(scratch("ae.model"), ae);
  const AutoencoderModel ae2 = load_autoencoder(scratch("ae.model"));
  for (std::size_t k = 0; k < ae.net.layers.size(); ++k) {
    CHECK(ae2.net.layers[k].weights == ae.net.layers[k].weights);
    CHECK(ae2.net.layers[k].bias == ae.net.layers[k].bias);
    CHECK(ae2.net.layers[k].activation == ae.net.layers[k].activation);
  }
  CHECK(ae2.best_epoch == 1);
  CHECK(ae2.training_log[1].train == ae.training_log[1].train);

  const GeneratorModel g = make_generator(8, 12, rng);
  save_generator(scratch("g.model"), g);
  const GeneratorModel g2 = load_generator(scratch("g.model"));
  CHECK(g2.noise_dim == 8);
  CHECK(g2.net.layers[1].weights == g.net.layers[1].weights);

  const DiscriminatorModel d = make_discriminator(12, rng);
  save_discriminator(scratch("d.model"), d);
  CHECK(load_discriminator(scratch("d.model")).net.layers[0].bias == d.net.layers[0].bias);
  CHECK_THROWS_AS(load_generator(scratch("d.model")), SchemaError);
}

TEST_CASE("model reader reports damaged files") {
  CHECK_THROWS_AS(load_model("/nonexistent/x.model"), IoError);
  {
    std::ofstream out(scratch("bad.model"));
    out << "EHRGANMODEL 1\nautoencoder\n0\nlayers 1\nlayer 2 2 relu\n1 2\n";
  }
  CHECK_THROWS_AS(load_model(scratch("bad.model")), SchemaError);
  std::istringstream wrong_magic("NOTAMODEL 1\n");
  CHECK_THROWS(read_model(wrong_magic));
}

TEST_CASE("generator schedule overrides only epochs, step ratio and seed") {
  ExperimentConfig c = parse("gen.epochs = 7\ngen.d_steps_per_g_step = 3\nacgan.hidden = 20\n");
  const AcganConfig a = generator_training_config(c, 99);
  CHECK(a.epochs == 7);
  CHECK(a.d_steps_per_g_step == 3);
  CHECK(a.seed == 99);
  CHECK(a.hidden == 20);
  CHECK(a.generator_ema == c.acgan.generator_ema);
  CHECK_THROWS_AS(parse("acgan.generator_ema = 1\n"), ConfigError);
}
