// Command-line driver: prepare, run, tsne, config template.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ehrgan/config.hpp"
#include "ehrgan/csv.hpp"
#include "ehrgan/eval.hpp"
#include "ehrgan/model_io.hpp"

namespace fs = std::filesystem;
using namespace ehrgan;

namespace {

enum Exit : int { kOk = 0, kInputError = 2, kPartial = 3, kUsage = 64 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> classifiers;
  std::optional<int> trials;
  std::optional<int> folds;
  std::optional<std::string> arm;
  std::optional<int> workers;
};

ExperimentConfig resolve(const Overrides& o) {
  ExperimentConfig c = o.config.empty() ? ExperimentConfig{} : load_config(o.config);
  if (o.seed) set_config_value(c, "seed", std::to_string(*o.seed));
  if (o.out) set_config_value(c, "out", *o.out);
  if (o.classifiers) set_config_value(c, "eval.classifiers", *o.classifiers);
  if (o.trials) set_config_value(c, "eval.trials", std::to_string(*o.trials));
  if (o.folds) set_config_value(c, "eval.folds", std::to_string(*o.folds));
  if (o.arm) set_config_value(c, "eval.arms", *o.arm);
  if (o.workers) set_config_value(c, "workers", std::to_string(*o.workers));
  return c;
}

std::string read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

template <typename Fn>
void write_with(const fs::path& path, Fn&& fn) {
  std::ostringstream s;
  fn(s);
  write_text(path, s.str());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

SimulatedMissing load_prepared(const ExperimentConfig& c) {
  const fs::path masked = c.out / "masked.csv", truth = c.out / "truth.csv";
  if (!fs::exists(masked)) throw IoError(masked.string() + " not found; run 'prepare' first");
  std::ifstream m(masked), t(truth);
  SimulatedMissing s{read_masked_csv(m), {}};
  if (t) s.truth = read_truth_csv(t);
  return s;
}

nlohmann::ordered_json provenance(const ExperimentConfig& c) {
  return {{"config_hash", config_hash(c)}, {"seed", c.seed}};
}

// ---------------------------------------------------------------------------

int cmd_prepare(const ExperimentConfig& c) {
  const std::string bytes = read_bytes(c.dataset);
  std::istringstream in(bytes);
  const MaskedMatrix raw = parse_wdbc(in, c.load);
  const SimulatedMissing sim = simulate_missing(raw, c.missing_attr_count, c.missing_fraction, c.seed);
  ensure_dir(c.out);
  write_with(c.out / "masked.csv", [&](std::ostream& o) { write_masked_csv(o, sim.data); });
  write_with(c.out / "truth.csv", [&](std::ostream& o) { write_truth_csv(o, sim.truth); });
  write_text(c.out / "config.txt", serialize_config(c));

  nlohmann::ordered_json manifest = provenance(c);
  manifest["input_file"] = c.dataset.string();
  manifest["input_fnv1a"] = fnv1a_hex(bytes);
  manifest["records"] = raw.rows();
  manifest["benign"] = raw.count_label(0);
  manifest["malignant"] = raw.count_label(1);
  manifest["originally_missing_cells"] = raw.missing_count();
  manifest["simulated_missing_cells"] = sim.truth.size();
  manifest["total_missing_cells"] = sim.data.missing_count();
  write_text(c.out / "prepare_manifest.json", manifest.dump(2) + "\n");

  std::cout << "prepared " << raw.rows() << " records (" << raw.count_label(0) << " benign, " << raw.count_label(1)
            << " malignant); " << raw.missing_count() << " originally missing cells, " << sim.truth.size()
            << " simulated; outputs in " << c.out.string() << '\n';
  return kOk;
}

void print_table(const ExperimentReport& r, Arm arm) {
  std::printf("\n%s-imputed data\n", arm == Arm::mean ? "Mean" : "Autoencoder");
  std::printf("%-18s %9s %11s %11s %8s %8s %6s\n", "Method", "Accuracy", "Sensitivity", "Specificity", "AUC-ROC",
              "F-score", "cells");
  for (const auto& row : r.rows) {
    if (row.arm != arm) continue;
    std::printf("%-18s %9.4f %11.4f %11.4f %8.4f %8.4f %6d\n", display_name(row.classifier).c_str(), row.mean[0],
                row.mean[1], row.mean[2], row.mean[3], row.mean[4], row.n_cells);
  }
}

int cmd_run(const ExperimentConfig& c) {
  const SimulatedMissing prepared = load_prepared(c);
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentReport report = run_cv_experiment(prepared, c, [](int done, int total) {
    std::fprintf(stderr, "\r%d/%d cells", done, total);
    if (done == total) std::fputc('\n', stderr);
  });
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  write_with(c.out / "metrics.csv", [&](std::ostream& o) { write_metrics_csv(o, report); });
  write_with(c.out / "percell.csv", [&](std::ostream& o) { write_percell_csv(o, report); });
  write_with(c.out / "roc_points.csv", [&](std::ostream& o) { write_roc_csv(o, report); });
  for (Arm arm : c.arms) {
    std::vector<RocSeries> series;
    for (const auto& roc : report.roc) {
      if (roc.arm != arm) continue;
      RocSeries s{display_name(roc.classifier), {}};
      for (std::size_t k = 0; k < roc.fpr.size(); ++k) s.points.push_back({roc.fpr[k], roc.tpr[k]});
      series.push_back(std::move(s));
    }
    write_with(c.out / ("roc_" + to_string(arm) + ".svg"), [&](std::ostream& o) {
      export_roc_svg(o, series, std::string("ROC, ") + (arm == Arm::mean ? "mean" : "autoencoder") +
                                    "-imputed data (averaged over trials)");
    });
  }

  // Whole-dataset models for the t-SNE views.
  const std::uint64_t model_seed = derive_seed(c.seed, 0x75e);
  const ArmPipeline pipeline = fit_arm_pipeline(prepared.data, c, derive_seed(c.seed, 0xAE));
  save_autoencoder(c.out / "autoencoder.model", pipeline.autoencoder);
  const AcganResult gan = train_acgan(pipeline.complete(c.tsne_arm, prepared.data), prepared.data.labels,
                                      generator_training_config(c, model_seed));
  save_generator(c.out / "generator.model", gan.generator);
  save_discriminator(c.out / "discriminator.model", gan.discriminator);

  nlohmann::ordered_json manifest = provenance(c);
  manifest["cells"] = report.cells.size();
  manifest["failed_cells"] = report.failed_cells;
  manifest["roc_curves"] = "mean over trials of per-trial pooled curves, fixed FPR grid";
  manifest["imputation_rmse"] = {{"mean", report.mean_imputation_rmse}, {"autoencoder", report.ae_imputation_rmse}};
  write_text(c.out / "run_manifest.json", manifest.dump(2) + "\n");

  for (Arm arm : c.arms) print_table(report, arm);
  std::printf("\nimputation RMSE on simulated cells: mean %.4f, autoencoder %.4f\n", report.mean_imputation_rmse,
              report.ae_imputation_rmse);
  std::printf("%zu cells in %.1f s, config %s\n", report.cells.size(), secs, config_hash(c).c_str());
  if (report.failed_cells > 0) {
    std::fprintf(stderr, "%d cells failed; see percell.csv\n", report.failed_cells);
    return kPartial;
  }
  return kOk;
}

int cmd_tsne(const ExperimentConfig& c, const std::string& mode) {
  if (mode != "imputation" && mode != "generation")
    throw UsageError("unknown t-SNE mode '" + mode + "' (expected imputation or generation)");
  const SimulatedMissing prepared = load_prepared(c);
  const MaskedMatrix& data = prepared.data;
  const fs::path ae_path = c.out / "autoencoder.model";
  const fs::path g_path = c.out / "generator.model";
  if (!fs::exists(ae_path)) throw IoError(ae_path.string() + " not found; run 'run' first");
  if (mode == "generation" && !fs::exists(g_path)) throw IoError(g_path.string() + " not found; run 'run' first");

  ArmPipeline p;
  p.scaling = fit_minmax(data);
  const MaskedMatrix scaled = apply_minmax(data, p.scaling);
  p.mean_stats = fit_mean_imputer(scaled);
  p.autoencoder = load_autoencoder(ae_path);
  const MatrixXd mean_filled = impute_mean(p.mean_stats, scaled);

  std::vector<MatrixXd> blocks;
  std::vector<std::string> tags;
  auto add = [&](const MatrixXd& rows, const LabelVector& labels, const std::string& prefix) {
    blocks.push_back(rows);
    for (Eigen::Index i = 0; i < labels.size(); ++i) tags.push_back(prefix + (labels[i] == 1 ? "-malignant" : "-benign"));
  };

  if (mode == "imputation") {
    // Real records: simulated cells restored from the ground truth.
    MatrixXd real = mean_filled;
    for (const auto& cell : scale_truth(prepared.truth, p.scaling)) real(cell.row, cell.attr) = cell.value;
    std::vector<Eigen::Index> touched;
    for (const auto& cell : prepared.truth)
      if (touched.empty() || touched.back() != cell.row) touched.push_back(cell.row);
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    const LabelVector touched_labels = select_rows(data.labels, touched);
    add(real, data.labels, "real");
    add(select_rows(mean_filled, touched), touched_labels, "mean-imputed");
    add(select_rows(impute_autoencoder(p.autoencoder, scaled), touched), touched_labels, "ae-imputed");
  } else {
    const GeneratorModel g = load_generator(g_path);
    const MatrixXd real = p.complete(c.tsne_arm, data);
    add(real, data.labels, "real");
    Rng rng(derive_seed(c.seed, 0x6e));
    LabelVector cond(data.rows() * c.generated_per_real);
    for (int r = 0; r < c.generated_per_real; ++r) cond.segment(r * data.rows(), data.rows()) = data.labels;
    add(generate(g, sample_noise(cond.size(), g.noise_dim, rng), cond), cond, "generated");
  }

  Eigen::Index total = 0;
  for (const auto& b : blocks) total += b.rows();
  MatrixXd points(total, kAttributeCount);
  Eigen::Index at = 0;
  for (const auto& b : blocks) {
    points.middleRows(at, b.rows()) = b;
    at += b.rows();
  }
  TsneConfig tc = c.tsne;
  tc.seed = derive_seed(c.seed, 0x75);
  const TsneResult r = tsne_run(points, tc);
  const fs::path out = c.out / ("tsne_coords_" + mode + ".csv");
  write_with(out, [&](std::ostream& o) { export_embedding(o, r.embedding, tags); });
  write_with(c.out / ("tsne_" + mode + ".svg"),
             [&](std::ostream& o) { export_embedding_svg(o, r.embedding, tags, "t-SNE, " + mode); });
  std::cout << "embedded " << total << " points, final KL " << csv::format(r.kl.back(), 4) << "; wrote "
            << out.string() << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Autoencoder imputation and AC-GAN classification on WDBC-format data"};
  app.require_subcommand(1);
  Overrides o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "key=value configuration file");
    sub->add_option("--seed", o.seed, "master seed");
    sub->add_option("--out", o.out, "output directory");
  };

  auto* prepare = app.add_subcommand("prepare", "load the dataset, simulate missingness, write masked data");
  add_common(prepare);

  auto* run = app.add_subcommand("run", "cross-validated comparison of all classifiers on both arms");
  add_common(run);
  run->add_option("--classifiers", o.classifiers, "comma-separated subset of classifiers, or all");
  run->add_option("--trials", o.trials, "number of cross-validation repetitions");
  run->add_option("--folds", o.folds, "folds per repetition");
  run->add_option("--arm", o.arm, "mean, ae or both")->check(CLI::IsMember({"mean", "ae", "both"}));
  run->add_option("--workers", o.workers, "parallel (trial, fold) cells; 0 uses all cores");

  std::string mode;
  auto* tsne = app.add_subcommand("tsne", "exact t-SNE of real, imputed or generated records");
  add_common(tsne);
  tsne->add_option("mode", mode, "imputation or generation")->required();

  auto* config = app.add_subcommand("config", "configuration helpers");
  std::string template_out;
  auto* tmpl = config->add_subcommand("template", "print the commented default configuration");
  tmpl->add_option("--out", template_out, "write to this file instead of stdout");
  config->require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*tmpl) {
      if (template_out.empty()) std::cout << config_template();
      else write_text(template_out, config_template());
      return kOk;
    }
    const ExperimentConfig c = resolve(o);
    if (*prepare) return cmd_prepare(c);
    if (*run) return cmd_run(c);
    if (*tsne) return cmd_tsne(c, mode);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kUsage;
}
