#include <doctest.h>

#include <cmath>
#include <sstream>

#include "ehrgan/acgan.hpp"
#include "ehrgan/baselines.hpp"
#include "ehrgan/config.hpp"
#include "ehrgan/eval.hpp"
#include "ehrgan/impute.hpp"
#include "ehrgan/viz.hpp"
#include "support.hpp"

using namespace ehrgan;

namespace {

// Two tight clusters far apart in 5 dimensions; the first half is cluster 0.
MatrixXd two_clusters(Eigen::Index n, Rng& rng) {
  MatrixXd x = testing::random_matrix(n, 5, rng, -0.5, 0.5);
  x.bottomRows(n - n / 2).array() += 20.0;
  return x;
}

TsneConfig short_run(std::uint64_t seed) {
  TsneConfig c;
  c.perplexity = 5;
  c.iterations = 300;
  c.exaggeration_iterations = 100;
  c.momentum_switch = 100;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("conditional affinities hit the target perplexity") {
  Rng rng(81);
  for (int trial = 0; trial < 10; ++trial) {
    const MatrixXd x = testing::random_matrix(40, 6, rng);
    const double perplexity = 2.0 + 8.0 * rng.uniform();
    const ConditionalAffinities a = conditional_affinities(x, perplexity);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      CHECK(a.p(i, i) == 0.0);
      CHECK(a.p.row(i).sum() == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(std::abs(a.entropy[i] - std::log(perplexity)) <= 1e-4);
    }
  }
}

TEST_CASE("conditional affinities reject bad arguments") {
  Rng rng(82);
  CHECK_THROWS_AS(conditional_affinities(testing::random_matrix(3, 2, rng), 1.0), DomainError);
  CHECK_THROWS_AS(conditional_affinities(testing::random_matrix(10, 2, rng), 3.0), ConfigError);
  MatrixXd nan = testing::random_matrix(10, 2, rng);
  nan(2, 1) = std::nan("");
  CHECK_THROWS_AS(conditional_affinities(nan, 2.0), NumericError);
}

TEST_CASE("joint affinities are symmetric and sum to one") {
  Rng rng(83);
  const MatrixXd P = joint_affinities(testing::random_matrix(30, 4, rng), 5.0);
  CHECK((P - P.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(P.sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(P.minCoeff() >= 0.0);
}

TEST_CASE("KL divergence is non-negative") {
  Rng rng(84);
  const MatrixXd P = joint_affinities(testing::random_matrix(20, 4, rng), 4.0);
  for (int trial = 0; trial < 20; ++trial) CHECK(tsne_kl(P, testing::random_matrix(20, 2, rng, -5, 5)) >= 0.0);
}

TEST_CASE("t-SNE lowers KL, keeps clusters apart and is deterministic") {
  Rng rng(85);
  const MatrixXd x = two_clusters(40, rng);
  const TsneResult r = tsne_run(x, short_run(7));
  REQUIRE(r.kl.size() >= 2);
  CHECK(r.kl.back() < r.kl.front());
  CHECK(r.embedding.rows() == 40);
  CHECK(r.embedding.cols() == 2);
  CHECK(r.embedding.colwise().mean().norm() < 1e-9);

  // Every point's nearest embedded neighbour belongs to its own cluster.
  for (Eigen::Index i = 0; i < 40; ++i) {
    Eigen::Index best = -1;
    double dist = INFINITY;
    for (Eigen::Index j = 0; j < 40; ++j) {
      if (j == i) continue;
      const double d = (r.embedding.row(i) - r.embedding.row(j)).squaredNorm();
      if (d < dist) dist = d, best = j;
    }
    CHECK((best < 20) == (i < 20));
  }
  CHECK(tsne_embed(x, short_run(7)) == r.embedding);
}

TEST_CASE("embedding export validates tags") {
  MatrixXd c(2, 2);
  c << 1, 2, 3, 4;
  std::ostringstream out;
  export_embedding(out, c, {"real-benign", "generated-malignant"});
  CHECK(out.str() == "tag,x,y\nreal-benign,1,2\ngenerated-malignant,3,4\n");
  std::ostringstream none;
  CHECK_THROWS_AS(export_embedding(none, c, {"real-benign", "alien"}), DomainError);
  CHECK(none.str().empty());
  CHECK_THROWS_AS(export_embedding(none, c, {"real-benign"}), ShapeError);
}

TEST_CASE("embedding SVG draws one circle per point plus legend entries") {
  MatrixXd c(3, 2);
  c << 0, 0, 1, 1, 2, 5;
  std::ostringstream out;
  export_embedding_svg(out, c, {"real-benign", "real-benign", "generated-malignant"}, "t & s");
  const std::string svg = out.str();
  std::size_t circles = 0;
  for (auto p = svg.find("<circle"); p != std::string::npos; p = svg.find("<circle", p + 1)) ++circles;
  CHECK(circles == 3 + 2);
  CHECK(svg.find("t &amp; s") != std::string::npos);
  CHECK(svg.find("real-malignant") == std::string::npos);
  CHECK_THROWS_AS(export_embedding_svg(out, c, {"real-benign", "x", "real-benign"}, "t"), DomainError);
}

TEST_CASE("ROC SVG contains one path per curve in each panel") {
  std::vector<RocSeries> curves{{"A", {{0, 0}, {0.1, 0.9}, {1, 1}}}, {"B <x>", {{0, 0}, {1, 1}}}};
  std::ostringstream out;
  export_roc_svg(out, curves, "ROC & co");
  const std::string svg = out.str();
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  std::size_t paths = 0;
  for (auto p = svg.find("<polyline"); p != std::string::npos; p = svg.find("<polyline", p + 1)) ++paths;
  CHECK(paths == 4);
  CHECK(svg.find("B &lt;x&gt;") != std::string::npos);
  CHECK(svg.find("ROC &amp; co") != std::string::npos);
  CHECK_THROWS_AS(export_roc_svg(out, curves, "t", 0.0), DomainError);

  std::ostringstream empty;
  export_roc_svg(empty, {}, "nothing");
  CHECK(empty.str().find("</svg>") != std::string::npos);
  CHECK(empty.str().find("<polyline") == std::string::npos);
}

TEST_CASE("a simple probe struggles to tell generated records from real ones") {
  const MaskedMatrix d = load_wdbc(testing::data_file());
  const MaskedMatrix scaled = apply_minmax(d, fit_minmax(d));
  const MatrixXd real = impute_mean(fit_mean_imputer(scaled), scaled);
  const AcganConfig cfg = generator_training_config(ExperimentConfig{}, 11);
  const AcganResult gan = train_acgan(real, scaled.labels, cfg);
  Rng rng(12);
  const MatrixXd fake = generate(gan.generator, sample_noise(real.rows(), cfg.noise_dim, rng), scaled.labels);

  // Half of each source trains the probe, the other half scores it.
  const Eigen::Index n = real.rows(), h = n / 2;
  MatrixXd train(2 * h, kAttributeCount), test(2 * (n - h), kAttributeCount);
  LabelVector ytrain(2 * h), ytest(2 * (n - h));
  train << real.topRows(h), fake.topRows(h);
  test << real.bottomRows(n - h), fake.bottomRows(n - h);
  ytrain << LabelVector::Zero(h), LabelVector::Ones(h);
  ytest << LabelVector::Zero(n - h), LabelVector::Ones(n - h);
  MlpConfig probe_cfg;
  probe_cfg.seed = 13;
  const double probe_auc = auc(roc_curve(fit_mlp(train, ytrain, probe_cfg).score(test), ytest));
  MESSAGE("real-vs-generated probe AUC " << probe_auc);
  CHECK(probe_auc <= 0.75);
}
