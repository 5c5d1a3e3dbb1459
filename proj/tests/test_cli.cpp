#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "support.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "ehrgan_cli_test";

int run(const std::string& args) {
  const std::string cmd = std::string(EHRGAN_CLI) + " " + args + " >>" + (kWork / "log.txt").string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Small but complete configuration so the whole pipeline runs in seconds.
fs::path write_quick_config() {
  fs::create_directories(kWork);
  const fs::path cfg = kWork / "quick.txt";
  std::ofstream out(cfg);
  out << "dataset = " << testing::data_file().string() << "\n"
      << "ae.max_epochs = 5\n"
      << "acgan.epochs = 3\n"
      << "gen.epochs = 3\n"
      << "mlp.epochs = 5\n"
      << "eval.trials = 1\n"
      << "eval.folds = 2\n"
      << "eval.roc_grid = 21\n"
      << "tsne.iterations = 60\n"
      << "tsne.exaggeration_iterations = 20\n"
      << "workers = 1\n";
  return cfg;
}

}  // namespace

TEST_CASE("usage errors exit with 64") {
  fs::create_directories(kWork);
  CHECK(run("") == 64);
  CHECK(run("frobnicate") == 64);
  CHECK(run("run --trials") == 64);
  CHECK(run("run --arm sideways") == 64);
  CHECK(run("--help") == 0);
}

TEST_CASE("config template is valid input") {
  const fs::path t = kWork / "template.txt";
  REQUIRE(run("config template --out " + t.string()) == 0);
  CHECK(slurp(t).find("eval.folds = 5") != std::string::npos);
}

TEST_CASE("input and configuration errors exit with 2") {
  CHECK(run("prepare --config /nonexistent/cfg.txt --out " + (kWork / "x").string()) == 2);
  const fs::path bad = kWork / "bad.txt";
  std::ofstream(bad) << "eval.folds = zero\n";
  CHECK(run("prepare --config " + bad.string()) == 2);
  CHECK(run("run --out " + (kWork / "never_prepared").string()) == 2);
}

TEST_CASE("prepare, run and tsne produce their outputs") {
  const fs::path cfg = write_quick_config();
  const fs::path out = kWork / "out";
  fs::remove_all(out);
  const std::string common = " --config " + cfg.string() + " --out " + out.string();

  REQUIRE(run("prepare" + common) == 0);
  for (const char* f : {"masked.csv", "truth.csv", "config.txt", "prepare_manifest.json"}) CHECK(fs::exists(out / f));
  CHECK(slurp(out / "prepare_manifest.json").find("\"records\": 569") != std::string::npos);

  CHECK(run("tsne generation" + common) == 2);  // no trained models yet

  REQUIRE(run("run --classifiers naive_bayes,acgan --arm both --seed 3" + common) == 0);
  for (const char* f : {"metrics.csv", "percell.csv", "roc_points.csv", "roc_mean.svg", "roc_ae.svg",
                        "autoencoder.model", "generator.model", "discriminator.model", "run_manifest.json"})
    CHECK(fs::exists(out / f));
  const std::string metrics = slurp(out / "metrics.csv");
  CHECK(metrics.find("ae,acgan,accuracy,") != std::string::npos);
  CHECK(metrics.find("svm") == std::string::npos);

  REQUIRE(run("tsne imputation" + common) == 0);
  REQUIRE(run("tsne generation" + common) == 0);
  const std::string coords = slurp(out / "tsne_coords_generation.csv");
  CHECK(coords.rfind("tag,x,y\n", 0) == 0);
  CHECK(coords.find("generated-malignant") != std::string::npos);
  CHECK(fs::exists(out / "tsne_coords_imputation.csv"));
  CHECK(fs::exists(out / "tsne_generation.svg"));
  CHECK(run("tsne sideways" + common) == 64);
}
