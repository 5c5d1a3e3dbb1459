#include <doctest.h>

#include <cmath>
#include <sstream>

#include "ehrgan/acgan.hpp"
#include "support.hpp"

using namespace ehrgan;

namespace {

AcganConfig quick(std::uint64_t seed, int epochs = 40) {
  AcganConfig c;
  c.epochs = epochs;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("generator and discriminator shapes") {
  Rng rng(41);
  const GeneratorModel g = make_generator(32, 50, rng);
  CHECK(g.net.input_width() == 33);
  CHECK(g.net.output_width() == 30);
  const DiscriminatorModel d = make_discriminator(50, rng);
  CHECK(d.net.input_width() == 30);
  CHECK(d.net.output_width() == 2);
  CHECK_THROWS_AS(make_generator(0, 50, rng), ConfigError);
  CHECK_THROWS_AS(make_discriminator(0, rng), ConfigError);
}

TEST_CASE("generated records lie in the unit cube") {
  Rng rng(42);
  const GeneratorModel g = make_generator(8, 16, rng);
  const MatrixXd z = sample_noise(50, 8, rng);
  CHECK(z.minCoeff() >= -1.0);
  CHECK(z.maxCoeff() < 1.0);
  const MatrixXd x = generate(g, z, testing::random_labels(50, rng));
  CHECK(x.rows() == 50);
  CHECK(x.minCoeff() >= 0.0);
  CHECK(x.maxCoeff() <= 1.0);
  LabelVector bad = LabelVector::Zero(50);
  bad[3] = 2;
  CHECK_THROWS_AS(generate(g, z, bad), DomainError);
  CHECK_THROWS_AS(generate(g, sample_noise(50, 7, rng), bad), ShapeError);
}

TEST_CASE("acgan_losses at chance and at the clamp") {
  const VectorXd half = VectorXd::Constant(4, 0.5);
  LabelVector c(4);
  c << 0, 1, 0, 1;
  const AcganLosses l = acgan_losses(half, half, half, half, c, c);
  CHECK(l.source == doctest::Approx(2 * std::log(0.5)));
  CHECK(l.cls == doctest::Approx(2 * std::log(0.5)));

  const VectorXd one = VectorXd::Ones(4), zero = VectorXd::Zero(4);
  const AcganLosses perfect = acgan_losses(one, zero, c.cast<double>(), c.cast<double>(), c, c);
  CHECK(perfect.source <= 0.0);
  CHECK(perfect.source > -1e-6);
  const AcganLosses worst = acgan_losses(zero, one, zero, zero, c, c);
  CHECK(worst.source == doctest::Approx(2 * std::log(1e-7)).epsilon(1e-6));
  CHECK(std::isfinite(worst.cls));
  CHECK_THROWS_AS(acgan_losses(half, half, half, VectorXd(VectorXd::Constant(3, 0.5)), c, c), ShapeError);
}

TEST_CASE("acgan_losses never exceed zero") {
  Rng rng(43);
  for (int trial = 0; trial < 100; ++trial) {
    const auto n = static_cast<Eigen::Index>(1 + rng.below(10));
    VectorXd p[4];
    for (auto& v : p) v = testing::random_matrix(n, 1, rng, 0, 1);
    const AcganLosses l = acgan_losses(p[0], p[1], p[2], p[3], testing::random_labels(n, rng, 0),
                                       testing::random_labels(n, rng, 0));
    CHECK(l.source <= 0.0);
    CHECK(l.cls <= 0.0);
  }
}

TEST_CASE("training is deterministic per seed") {
  const testing::Toy toy = testing::separable_toy(60, 44);
  const AcganResult a = train_acgan(toy.X, toy.y, quick(1, 10)), b = train_acgan(toy.X, toy.y, quick(1, 10));
  CHECK(a.discriminator.net.layers[0].weights == b.discriminator.net.layers[0].weights);
  CHECK(a.generator.net.layers[1].weights == b.generator.net.layers[1].weights);
  REQUIRE(a.loss_log.size() == 10);
  CHECK(a.loss_log.back().discriminator.cls == b.loss_log.back().discriminator.cls);
}

TEST_CASE("class head separates a separable toy problem") {
  const testing::Toy toy = testing::separable_toy(120, 45);
  const AcganResult r = train_acgan(toy.X, toy.y, quick(2, 150));
  CHECK(testing::accuracy_at_half(predict_proba(r.discriminator, toy.X), toy.y) >= 0.95);
  for (const auto& e : r.loss_log) {
    CHECK(std::isfinite(e.discriminator.source));
    CHECK(std::isfinite(e.generator.cls));
  }
}

TEST_CASE("swapping the labels complements the class decision on every training record") {
  const testing::Toy toy = testing::separable_toy(80, 46, 0.15);
  const LabelVector swapped = (1 - toy.y.array()).matrix();
  const auto cfg = quick(3, 30);
  const VectorXd p = predict_proba(train_acgan(toy.X, toy.y, cfg).discriminator, toy.X);
  const VectorXd q = predict_proba(train_acgan(toy.X, swapped, cfg).discriminator, toy.X);
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    CAPTURE(i);
    CHECK((p[i] >= 0.5) != (q[i] >= 0.5));
  }
}

TEST_CASE("training rejects unusable input") {
  const testing::Toy toy = testing::separable_toy(20, 47);
  CHECK_THROWS_AS(train_acgan(toy.X.leftCols(10), toy.y, quick(0)), ShapeError);
  CHECK_THROWS_AS(train_acgan(toy.X, LabelVector(LabelVector::Zero(20)), quick(0)), DomainError);
  AcganConfig bad = quick(0);
  bad.batch_size = 0;
  CHECK_THROWS_AS(train_acgan(toy.X, toy.y, bad), ConfigError);
}

TEST_CASE("generated CSV has a header and one row per sample") {
  MatrixXd s = MatrixXd::Constant(2, 30, 0.25);
  LabelVector c(2);
  c << 1, 0;
  std::ostringstream out;
  write_generated_csv(out, s, c);
  std::istringstream in(out.str());
  std::string header, first;
  std::getline(in, header);
  std::getline(in, first);
  CHECK(header.rfind("class,f0,", 0) == 0);
  CHECK(first.rfind("1,0.25", 0) == 0);
  CHECK_THROWS_AS(write_generated_csv(out, s, LabelVector(LabelVector::Zero(3))), ShapeError);
}

TEST_CASE("generator averaging changes the generator only") {
  const testing::Toy toy = testing::separable_toy(40, 48);
  AcganConfig plain = quick(5, 8), averaged = quick(5, 8);
  plain.generator_ema = 0.0;
  averaged.generator_ema = 0.9;
  const AcganResult a = train_acgan(toy.X, toy.y, plain), b = train_acgan(toy.X, toy.y, averaged);
  for (std::size_t k = 0; k < a.discriminator.net.layers.size(); ++k)
    CHECK(a.discriminator.net.layers[k].weights == b.discriminator.net.layers[k].weights);
  CHECK(a.generator.net.layers[0].weights != b.generator.net.layers[0].weights);
}
