//
// Project SynthWeaver
// SPDX-License-Identifier: Apache-2.0
//
// synthweaver: train a fast graph-network surrogate of a retrosynthesis
// planner and use it inside Boltzmann-softmax molecular search.
//
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "synthweaver/evalkit.hpp"
#include "synthweaver/io.hpp"
#include "synthweaver/metrics.hpp"
#include "synthweaver/parallel.hpp"
#include "synthweaver/scoring.hpp"
#include "synthweaver/search.hpp"
#include "synthweaver/smiles.hpp"
#include "synthweaver/svgplot.hpp"
#include "synthweaver/train.hpp"

namespace fs = std::filesystem;
using namespace synthweaver;

namespace {

// Removes partial outputs unless the run committed; exit code 0 only when
// every requested output was written.
class OutputGuard {
 public:
  explicit OutputGuard(fs::path dir) : dir_(std::move(dir)) {
    fs::create_directories(dir_);
  }
  fs::path file(const std::string& name) {
    fs::path p = dir_ / name;
    files_.push_back(p);
    return p;
  }
  const fs::path& dir() const { return dir_; }
  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& f : files_) out.push_back(f.filename().string());
    return out;
  }
  void commit() { committed_ = true; }
  ~OutputGuard() {
    if (committed_) return;
    for (const auto& f : files_) {
      std::error_code ec;
      fs::remove(f, ec);
    }
  }

 private:
  fs::path dir_;
  std::vector<fs::path> files_;
  bool committed_ = false;
};

struct CommonOpts {
  std::string data_dir = "data";
  std::string cache_path;
  int workers = 1;

  fs::path cache() const {
    if (!cache_path.empty()) return cache_path;
    if (const char* env = std::getenv("SYNTHWEAVER_CACHE")) return env;
    return "oracle_cache.csv";
  }
};

SearchSpace load_space(const std::string& id, const CommonOpts& opts, RunManifest& manifest) {
  if (id == "graphedit") return make_graph_edit_space();
  fs::path file;
  if (id == "frag105") {
    file = fs::path(opts.data_dir) / "fragments_105.smi";
  } else if (id == "frag464") {
    file = fs::path(opts.data_dir) / "fragments_464.smi";
  } else {
    throw MoleculeError("unknown space id: " + id + " (frag105|frag464|graphedit)");
  }
  manifest.add_input(file);
  return make_fragment_space(load_fragment_library(file));
}

SynthOracle load_oracle(const CommonOpts& opts, RunManifest& manifest, int node_budget) {
  fs::path file = fs::path(opts.data_dir) / "catalog.csv";
  manifest.add_input(file);
  return SynthOracle(RoutePlanner(Catalog::load(file), default_templates(), node_budget));
}

CombinedScorer make_scorer(const std::string& backend, const std::string& checkpoint,
                           std::uint64_t property_seed, const ScoreConfig& cfg,
                           RunManifest& manifest) {
  PropertyModel pm(property_seed);
  if (backend == "sa") return CombinedScorer(pm, SynthBackend::sa(), cfg);
  if (backend == "retrognn") {
    if (checkpoint.empty())
      throw MoleculeError("synth_backend=retrognn needs --checkpoint");
    manifest.add_input(checkpoint);
    auto model = std::make_shared<SurrogateModel>(
        load_checkpoint(checkpoint, Task::Regression));
    return CombinedScorer(pm, SynthBackend::retrognn(std::move(model)), cfg);
  }
  throw MoleculeError("unknown synth_backend: " + backend + " (retrognn|sa)");
}

void write_trajectories_csv(const fs::path& path, const SearchReport& report) {
  std::ofstream out(path);
  out << "trajectory_id,step,smiles,p,antibiotic,qed,synth_raw,combined\n";
  for (std::size_t ti = 0; ti < report.trajectories.size(); ++ti) {
    for (const TrajectoryRecord& r : report.trajectories[ti].records) {
      out << ti << "," << r.step << "," << r.smiles << "," << format_double(r.bundle.p) << ","
          << format_double(r.bundle.antibiotic) << "," << format_double(r.bundle.qed_raw)
          << "," << format_double(r.bundle.synth_raw) << ","
          << format_double(r.bundle.combined) << "\n";
    }
  }
}

void write_topk_csv(const fs::path& path, const SearchReport& report, bool with_oracle) {
  std::ofstream out(path);
  out << "rank,smiles,combined,antibiotic,qed_raw,synth_raw,sa_raw";
  if (with_oracle) out << ",oracle_score";
  out << "\n";
  for (std::size_t i = 0; i < report.top.size(); ++i) {
    const TopEntry& e = report.top[i];
    double sa = sa_heuristic(parse_smiles(e.smiles));
    out << (i + 1) << "," << e.smiles << "," << format_double(e.bundle.combined) << ","
        << format_double(e.bundle.antibiotic) << "," << format_double(e.bundle.qed_raw) << ","
        << format_double(e.bundle.synth_raw) << "," << format_double(sa);
    if (with_oracle) out << "," << format_double(e.oracle_score);
    out << "\n";
  }
}

void write_best_curve_csv(const fs::path& path, const SearchReport& report) {
  std::ofstream out(path);
  out << "visited_count,best_combined\n";
  for (auto [visited, best] : report.best_curve) {
    out << visited << "," << format_double(best) << "\n";
  }
}

void write_best_curve_svg(const fs::path& path, const SearchReport& report,
                          const std::string& name) {
  SvgPlot plot("best score so far", "molecules visited", "best combined score");
  plot.set_log_x(true);
  std::vector<std::pair<double, double>> pts;
  for (auto [visited, best] : report.best_curve) {
    pts.emplace_back(static_cast<double>(visited), best);
  }
  if (!pts.empty()) pts.emplace_back(static_cast<double>(report.total_visited), pts.back().second);
  plot.add_step(std::move(pts), name);
  plot.write(path);
}

int run_command(const std::function<void(RunManifest&)>& body, const std::string& name,
                std::uint64_t seed) {
  RunManifest manifest;
  manifest.subcommand = name;
  manifest.seed = seed;
  manifest.started_at = iso_timestamp_utc();
  try {
    body(manifest);
  } catch (const std::exception& e) {
    std::cerr << "synthweaver " << name << ": error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

std::string fmt_or_blank(double v, bool valid) {
  return valid ? format_double(v) : std::string("");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"surrogate-guided synthesizable molecule search"};
  app.set_config("--config", "", "key = value configuration file; flags win");
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);
  app.fallthrough();

  CommonOpts common;
  app.add_option("--data-dir", common.data_dir, "directory with shipped data files")
      ->capture_default_str();
  app.add_option("--cache", common.cache_path,
                 "oracle score cache (default: $SYNTHWEAVER_CACHE or oracle_cache.csv)");
  app.add_option("--workers", common.workers, "parallel workers; results do not depend on it")
      ->capture_default_str();

  // ---- gen-dataset ----------------------------------------------------
  auto* gen = app.add_subcommand("gen-dataset", "sample random molecules and oracle-label them");
  gen->fallthrough();
  struct {
    std::string space = "frag105";
    int n = 1000;
    int n_init = 20;
    std::uint64_t seed = 0;
    int node_budget = 10000;
    std::string out = "out/gen";
  } gen_opts;
  gen->add_option("--space", gen_opts.space, "frag105|frag464|graphedit")->capture_default_str();
  gen->add_option("--n", gen_opts.n, "number of molecules")->capture_default_str();
  gen->add_option("--n-init", gen_opts.n_init, "random actions per molecule")
      ->capture_default_str();
  gen->add_option("--seed", gen_opts.seed, "master seed")->capture_default_str();
  gen->add_option("--node-budget", gen_opts.node_budget, "planner node budget")
      ->capture_default_str();
  gen->add_option("--out", gen_opts.out, "output directory")->capture_default_str();

  // ---- label -----------------------------------------------------------
  auto* label = app.add_subcommand("label", "oracle-label molecules from a SMILES file");
  label->fallthrough();
  struct {
    std::string input;
    std::string out = "out/label";
    int node_budget = 10000;
    bool routes = false;
  } label_opts;
  label->add_option("--input", label_opts.input, "SMILES list file")->required();
  label->add_option("--out", label_opts.out, "output directory")->capture_default_str();
  label->add_option("--node-budget", label_opts.node_budget, "planner node budget")
      ->capture_default_str();
  label->add_flag("--routes", label_opts.routes, "also dump route trees");

  // ---- train -----------------------------------------------------------
  auto* train_cmd = app.add_subcommand("train", "train the surrogate with k-fold CV");
  train_cmd->fallthrough();
  struct {
    std::string dataset;
    std::string task = "regression";
    std::string out = "out/train";
    int hidden = 128;
    int depth = 6;
    double dropout = 0.05;
    int epochs = 50;
    int batch = 64;
    double lr = 1e-3;
    int k = 5;
    int patience = 10;
    std::uint64_t seed = 0;
  } train_opts;
  train_cmd->add_option("--dataset", train_opts.dataset, "labeled CSV (smiles,score)")
      ->required();
  train_cmd->add_option("--task", train_opts.task, "regression|classification")
      ->capture_default_str();
  train_cmd->add_option("--hidden", train_opts.hidden)->capture_default_str();
  train_cmd->add_option("--depth", train_opts.depth)->capture_default_str();
  train_cmd->add_option("--dropout", train_opts.dropout)->capture_default_str();
  train_cmd->add_option("--epochs", train_opts.epochs)->capture_default_str();
  train_cmd->add_option("--batch", train_opts.batch)->capture_default_str();
  train_cmd->add_option("--lr", train_opts.lr)->capture_default_str();
  train_cmd->add_option("--k", train_opts.k, "CV folds")->capture_default_str();
  train_cmd->add_option("--patience", train_opts.patience)->capture_default_str();
  train_cmd->add_option("--seed", train_opts.seed)->capture_default_str();
  train_cmd->add_option("--out", train_opts.out)->capture_default_str();

  // ---- search / screen ---------------------------------------------------
  auto* search_cmd = app.add_subcommand("search", "softmax or random-walk molecular search");
  search_cmd->fallthrough();
  struct {
    std::string space = "frag105";
    std::string backend = "retrognn";
    std::string checkpoint;
    std::string selection = "softmax";
    double tau = 0.15;
    int steps = 200;
    int n_init = 20;
    int trajectories = 100;
    int top_k = 100;
    int action_cap = 2000;
    std::uint64_t seed = 0;
    std::uint64_t property_seed = kDefaultPropertySeed;
    double qed_cap = 0.70, retro_cap = 4.5, sa_cap = 3.5;
    bool oracle_relabel = false;
    int node_budget = 10000;
    std::string out = "out/search";
  } search_opts;
  search_cmd->add_option("--space", search_opts.space, "frag105|frag464|graphedit")
      ->capture_default_str();
  search_cmd->add_option("--synth-backend", search_opts.backend, "retrognn|sa")
      ->capture_default_str();
  search_cmd->add_option("--checkpoint", search_opts.checkpoint, "regression checkpoint");
  search_cmd->add_option("--selection", search_opts.selection, "softmax|random")
      ->capture_default_str();
  search_cmd->add_option("--tau", search_opts.tau, "softmax temperature")
      ->capture_default_str();
  search_cmd->add_option("--steps", search_opts.steps)->capture_default_str();
  search_cmd->add_option("--n-init", search_opts.n_init)->capture_default_str();
  search_cmd->add_option("--trajectories", search_opts.trajectories)->capture_default_str();
  search_cmd->add_option("--top-k", search_opts.top_k)->capture_default_str();
  search_cmd->add_option("--action-cap", search_opts.action_cap)->capture_default_str();
  search_cmd->add_option("--seed", search_opts.seed)->capture_default_str();
  search_cmd->add_option("--property-seed", search_opts.property_seed)->capture_default_str();
  search_cmd->add_option("--qed-cap", search_opts.qed_cap)->capture_default_str();
  search_cmd->add_option("--retro-cap", search_opts.retro_cap)->capture_default_str();
  search_cmd->add_option("--sa-cap", search_opts.sa_cap)->capture_default_str();
  search_cmd->add_flag("--oracle-relabel", search_opts.oracle_relabel,
                       "re-label the top table with the slow oracle");
  search_cmd->add_option("--node-budget", search_opts.node_budget)->capture_default_str();
  search_cmd->add_option("--out", search_opts.out)->capture_default_str();

  auto* screen_cmd = app.add_subcommand("screen", "score an existing SMILES library");
  screen_cmd->fallthrough();
  struct {
    std::string input;
    std::string backend = "retrognn";
    std::string checkpoint;
    int top_k = 100;
    std::uint64_t property_seed = kDefaultPropertySeed;
    double qed_cap = 0.70, retro_cap = 4.5, sa_cap = 3.5;
    bool oracle_relabel = false;
    int node_budget = 10000;
    std::string out = "out/screen";
  } screen_opts;
  screen_cmd->add_option("--input", screen_opts.input, "SMILES list file")->required();
  screen_cmd->add_option("--synth-backend", screen_opts.backend, "retrognn|sa")
      ->capture_default_str();
  screen_cmd->add_option("--checkpoint", screen_opts.checkpoint, "regression checkpoint");
  screen_cmd->add_option("--top-k", screen_opts.top_k)->capture_default_str();
  screen_cmd->add_option("--property-seed", screen_opts.property_seed)->capture_default_str();
  screen_cmd->add_option("--qed-cap", screen_opts.qed_cap)->capture_default_str();
  screen_cmd->add_option("--retro-cap", screen_opts.retro_cap)->capture_default_str();
  screen_cmd->add_option("--sa-cap", screen_opts.sa_cap)->capture_default_str();
  screen_cmd->add_flag("--oracle-relabel", screen_opts.oracle_relabel);
  screen_cmd->add_option("--node-budget", screen_opts.node_budget)->capture_default_str();
  screen_cmd->add_option("--out", screen_opts.out)->capture_default_str();

  // ---- report ------------------------------------------------------------
  auto* report_cmd = app.add_subcommand("report", "merge runs into a comparison table");
  report_cmd->fallthrough();
  struct {
    std::vector<std::string> runs;
    std::string out = "out/report";
  } report_opts;
  report_cmd->add_option("--runs", report_opts.runs, "run directories (topk/best_curve csv)")
      ->required()
      ->expected(-1);
  report_cmd->add_option("--out", report_opts.out)->capture_default_str();

  // ---- benchmark -----------------------------------------------------------
  auto* bench_cmd = app.add_subcommand("benchmark", "surrogate vs planner timing");
  bench_cmd->fallthrough();
  struct {
    std::string space = "frag105";
    std::string checkpoint;
    int n = 100;
    int min_atoms = 15;
    int n_init = 20;
    std::uint64_t seed = 0;
    int node_budget = 10000;
    std::string out = "out/benchmark";
  } bench_opts;
  bench_cmd->add_option("--space", bench_opts.space)->capture_default_str();
  bench_cmd->add_option("--checkpoint", bench_opts.checkpoint, "regression checkpoint")
      ->required();
  bench_cmd->add_option("--n", bench_opts.n, "molecules to time")->capture_default_str();
  bench_cmd->add_option("--min-atoms", bench_opts.min_atoms)->capture_default_str();
  bench_cmd->add_option("--n-init", bench_opts.n_init)->capture_default_str();
  bench_cmd->add_option("--seed", bench_opts.seed)->capture_default_str();
  bench_cmd->add_option("--node-budget", bench_opts.node_budget)->capture_default_str();
  bench_cmd->add_option("--out", bench_opts.out)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  // ======================= command bodies =======================
  if (gen->parsed()) {
    return run_command(
        [&](RunManifest& manifest) {
          if (gen_opts.n < 1) throw MoleculeError("--n must be at least 1");
          OutputGuard out(gen_opts.out);
          manifest.config = {{"space", gen_opts.space},
                             {"n", std::to_string(gen_opts.n)},
                             {"n_init", std::to_string(gen_opts.n_init)},
                             {"node_budget", std::to_string(gen_opts.node_budget)},
                             {"workers", std::to_string(common.workers)},
                             {"cache", common.cache().string()}};
          SearchSpace space = load_space(gen_opts.space, common, manifest);
          SynthOracle oracle = load_oracle(common, manifest, gen_opts.node_budget);
          ScoreCache cache = ScoreCache::load(common.cache());

          std::vector<Molecule> mols(gen_opts.n);
          parallel_for(gen_opts.n, common.workers, [&](int i) {
            Rng rng(Rng::derive(gen_opts.seed, 0x5a3f0000ull + static_cast<std::uint64_t>(i)));
            mols[i] = random_molecule(space, rng, gen_opts.n_init);
          });
          auto rows = label_batch(oracle, mols, cache, common.workers);
          save_dataset_csv(out.file("dataset.csv"), rows);
          cache.save(common.cache());
          manifest.outputs = out.names();
          manifest.finished_at = iso_timestamp_utc();
          manifest.write_atomic(out.dir() / "run_manifest.json");
          out.commit();
          std::cout << "wrote " << rows.size() << " rows to "
                    << (out.dir() / "dataset.csv").string() << "\n";
        },
        "gen-dataset", gen_opts.seed);
  }

  if (label->parsed()) {
    return run_command(
        [&](RunManifest& manifest) {
          OutputGuard out(label_opts.out);
          manifest.config = {{"input", label_opts.input},
                             {"node_budget", std::to_string(label_opts.node_budget)},
                             {"workers", std::to_string(common.workers)},
                             {"cache", common.cache().string()}};
          manifest.add_input(label_opts.input);
          SynthOracle oracle = load_oracle(common, manifest, label_opts.node_budget);
          ScoreCache cache = ScoreCache::load(common.cache());

          std::vector<Molecule> mols;
          long parse_errors = 0;
          {
            std::ifstream in(label_opts.input);
            if (!in) throw MoleculeError("cannot open: " + label_opts.input);
            std::string line;
            while (std::getline(in, line)) {
              while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
                line.pop_back();
              std::size_t start = line.find_first_not_of(" \t");
              if (start == std::string::npos || line[start] == '#') continue;
              std::string token = line.substr(start);
              if (std::size_t ws = token.find_first_of(" \t"); ws != std::string::npos)
                token = token.substr(0, ws);
              try {
                mols.push_back(parse_smiles(token));
              } catch (const MoleculeError&) {
                ++parse_errors;
              }
            }
          }
          auto rows = label_batch(oracle, mols, cache, common.workers);
          save_dataset_csv(out.file("labels.csv"), rows);
          if (label_opts.routes) {
            std::ofstream routes(out.file("routes.txt"));
            for (const Molecule& m : mols) {
              RouteResult route = oracle.planner().plan(m);
              routes << "# " << write_smiles(m) << "\n" << format_route_tree(route) << "\n";
            }
          }
          cache.save(common.cache());
          manifest.config["parse_errors"] = std::to_string(parse_errors);
          manifest.outputs = out.names();
          manifest.finished_at = iso_timestamp_utc();
          manifest.write_atomic(out.dir() / "run_manifest.json");
          out.commit();
          std::cout << "labeled " << rows.size() << " molecules (" << parse_errors
                    << " parse errors)\n";
        },
        "label", 0);
  }

  if (train_cmd->parsed()) {
    return run_command(
        [&](RunManifest& manifest) {
          OutputGuard out(train_opts.out);
          manifest.add_input(train_opts.dataset);
          manifest.config = {{"dataset", train_opts.dataset},
                             {"task", train_opts.task},
                             {"hidden", std::to_string(train_opts.hidden)},
                             {"depth", std::to_string(train_opts.depth)},
                             {"dropout", format_double(train_opts.dropout)},
                             {"epochs", std::to_string(train_opts.epochs)},
                             {"batch", std::to_string(train_opts.batch)},
                             {"lr", format_double(train_opts.lr)},
                             {"k", std::to_string(train_opts.k)},
                             {"patience", std::to_string(train_opts.patience)},
                             {"workers", std::to_string(common.workers)}};

          TrainConfig cfg;
          cfg.hp = {train_opts.hidden, train_opts.depth, train_opts.dropout};
          if (train_opts.task == "regression") {
            cfg.task = Task::Regression;
          } else if (train_opts.task == "classification") {
            cfg.task = Task::Classification;
          } else {
            throw MoleculeError("unknown task: " + train_opts.task);
          }
          cfg.epochs = train_opts.epochs;
          cfg.batch_size = train_opts.batch;
          cfg.lr = train_opts.lr;
          cfg.seed = train_opts.seed;
          cfg.k_folds = train_opts.k;
          cfg.patience = train_opts.patience;
          cfg.workers = common.workers;

          Dataset data = load_dataset_csv(train_opts.dataset);
          TrainOutput result = train(cfg, data);
          if (result.report.aborted)
            std::cerr << "warning: training diverged; checkpoint holds last good weights\n";
          save_checkpoint(result.model, out.file("checkpoint.json"));

          {
            std::ofstream f(out.file("fidelity.csv"));
            f << "# per-fold and pooled surrogate fidelity; metric is R^2 for regression, "
                 "AUC for classification\n";
            f << "fold,metric,value,valid\n";
            const char* metric = cfg.task == Task::Regression ? "r2" : "auc";
            for (const FoldMetric& fm : result.report.fold_metrics) {
              f << fm.fold << "," << metric << "," << fmt_or_blank(fm.value, fm.valid) << ","
                << (fm.valid ? 1 : 0) << "\n";
            }
            f << "pooled_holdout," << metric << ","
              << fmt_or_blank(result.report.pooled_holdout, result.report.pooled_valid) << ","
              << (result.report.pooled_valid ? 1 : 0) << "\n";
            f << "in_sample," << metric << ","
              << fmt_or_blank(result.report.in_sample, result.report.in_sample_valid) << ","
              << (result.report.in_sample_valid ? 1 : 0) << "\n";
          }
          {
            std::ofstream f(out.file("scatter.csv"));
            f << "# pooled holdout predictions vs targets\n";
            f << "target,prediction\n";
            for (std::size_t i = 0; i < result.report.holdout_true.size(); ++i) {
              f << format_double(result.report.holdout_true[i]) << ","
                << format_double(result.report.holdout_pred[i]) << "\n";
            }
          }
          {
            SvgPlot plot(cfg.task == Task::Regression ? "surrogate vs oracle (holdout)"
                                                      : "probability vs label (holdout)",
                         "oracle", "surrogate");
            std::vector<std::pair<double, double>> pts;
            for (std::size_t i = 0; i < result.report.holdout_true.size(); ++i) {
              pts.emplace_back(result.report.holdout_true[i], result.report.holdout_pred[i]);
            }
            plot.add_scatter(std::move(pts), "holdout");
            plot.write(out.file("scatter.svg"));
          }
          if (cfg.task == Task::Classification) {
            std::vector<int> labels;
            for (double v : result.report.holdout_true) labels.push_back(v != 0.0 ? 1 : 0);
            RocCurve curve = roc_auc(result.report.holdout_pred, labels);
            std::ofstream f(out.file("roc.csv"));
            f << "# pooled holdout ROC; auc=" << format_double(curve.auc) << "\n";
            f << "fpr,tpr\n";
            for (auto [fpr, tpr] : curve.points) {
              f << format_double(fpr) << "," << format_double(tpr) << "\n";
            }
            SvgPlot plot("holdout ROC", "false positive rate", "true positive rate");
            plot.add_line(curve.points, "roc");
            plot.add_line({{0.0, 0.0}, {1.0, 1.0}}, "chance");
            plot.write(out.file("roc.svg"));
          }

          manifest.outputs = out.names();
          manifest.finished_at = iso_timestamp_utc();
          manifest.write_atomic(out.dir() / "run_manifest.json");
          out.commit();
          std::cout << "pooled holdout "
                    << (cfg.task == Task::Regression ? "R^2" : "AUC") << ": "
                    << fmt_or_blank(result.report.pooled_holdout, result.report.pooled_valid)
                    << "\n";
        },
        "train", train_opts.seed);
  }

  if (search_cmd->parsed()) {
    return run_command(
        [&](RunManifest& manifest) {
          OutputGuard out(search_opts.out);
          manifest.config = {{"space", search_opts.space},
                             {"synth_backend", search_opts.backend},
                             {"selection", search_opts.selection},
                             {"tau", format_double(search_opts.tau)},
                             {"steps", std::to_string(search_opts.steps)},
                             {"n_init", std::to_string(search_opts.n_init)},
                             {"n_trajectories", std::to_string(search_opts.trajectories)},
                             {"top_k", std::to_string(search_opts.top_k)},
                             {"action_cap", std::to_string(search_opts.action_cap)},
                             {"property_seed", std::to_string(search_opts.property_seed)},
                             {"qed_cap", format_double(search_opts.qed_cap)},
                             {"retro_cap", format_double(search_opts.retro_cap)},
                             {"sa_cap", format_double(search_opts.sa_cap)},
                             {"oracle_relabel", search_opts.oracle_relabel ? "1" : "0"},
                             {"workers", std::to_string(common.workers)}};
          SearchSpace space = load_space(search_opts.space, common, manifest);
          ScoreConfig score_cfg;
          score_cfg.qed_cap = search_opts.qed_cap;
          score_cfg.retro_cap = search_opts.retro_cap;
          score_cfg.sa_cap = search_opts.sa_cap;
          CombinedScorer scorer = make_scorer(search_opts.backend, search_opts.checkpoint,
                                              search_opts.property_seed, score_cfg, manifest);
          RunConfig cfg;
          cfg.tau = search_opts.tau;
          cfg.steps = search_opts.steps;
          cfg.n_init = search_opts.n_init;
          cfg.n_trajectories = search_opts.trajectories;
          cfg.seed = search_opts.seed;
          cfg.top_k = search_opts.top_k;
          cfg.action_cap = search_opts.action_cap;
          cfg.workers = common.workers;

          SearchReport report;
          if (search_opts.selection == "softmax") {
            report = run_search(space, scorer, cfg);
          } else if (search_opts.selection == "random") {
            report = random_walk_baseline(space, scorer, cfg);
          } else {
            throw MoleculeError("unknown selection: " + search_opts.selection);
          }
          if (search_opts.oracle_relabel) {
            SynthOracle oracle = load_oracle(common, manifest, search_opts.node_budget);
            ScoreCache cache = ScoreCache::load(common.cache());
            relabel_with_oracle(report, oracle, cache, common.workers);
            cache.save(common.cache());
          }

          write_trajectories_csv(out.file("trajectories.csv"), report);
          write_topk_csv(out.file("topk.csv"), report, search_opts.oracle_relabel);
          write_best_curve_csv(out.file("best_curve.csv"), report);
          write_best_curve_svg(out.file("best_curve.svg"), report,
                               search_opts.selection + "/" + search_opts.backend);
          manifest.outputs = out.names();
          manifest.finished_at = iso_timestamp_utc();
          manifest.write_atomic(out.dir() / "run_manifest.json");
          out.commit();
          double best = report.top.empty() ? 0.0 : report.top.front().bundle.combined;
          std::cout << "visited " << report.total_visited << " molecules; best combined "
                    << format_double(best) << "\n";
        },
        "search", search_opts.seed);
  }

  if (screen_cmd->parsed()) {
    return run_command(
        [&](RunManifest& manifest) {
          OutputGuard out(screen_opts.out);
          manifest.config = {{"input", screen_opts.input},
                             {"synth_backend", screen_opts.backend},
                             {"top_k", std::to_string(screen_opts.top_k)},
                             {"property_seed", std::to_string(screen_opts.property_seed)},
                             {"oracle_relabel", screen_opts.oracle_relabel ? "1" : "0"},
                             {"workers", std::to_string(common.workers)}};
          manifest.add_input(screen_opts.input);
          ScoreConfig score_cfg;
          score_cfg.qed_cap = screen_opts.qed_cap;
          score_cfg.retro_cap = screen_opts.retro_cap;
          score_cfg.sa_cap = screen_opts.sa_cap;
          CombinedScorer scorer = make_scorer(screen_opts.backend, screen_opts.checkpoint,
                                              screen_opts.property_seed, score_cfg, manifest);
          RunConfig cfg;
          cfg.top_k = screen_opts.top_k;
          SearchReport report = screen_library(screen_opts.input, scorer, cfg);
          if (screen_opts.oracle_relabel) {
            SynthOracle oracle = load_oracle(common, manifest, screen_opts.node_budget);
            ScoreCache cache = ScoreCache::load(common.cache());
            relabel_with_oracle(report, oracle, cache, common.workers);
            cache.save(common.cache());
          }
          write_topk_csv(out.file("topk.csv"), report, screen_opts.oracle_relabel);
          write_best_curve_csv(out.file("best_curve.csv"), report);
          write_best_curve_svg(out.file("best_curve.svg"), report, "screen");
          manifest.config["parse_errors"] = std::to_string(report.parse_errors);
          manifest.outputs = out.names();
          manifest.finished_at = iso_timestamp_utc();
          manifest.write_atomic(out.dir() / "run_manifest.json");
          out.commit();
          std::cout << "screened " << report.total_visited << " molecules ("
                    << report.parse_errors << " parse errors)\n";
        },
        "screen", 0);
  }

  if (report_cmd->parsed()) {
    return run_command(
        [&](RunManifest& manifest) {
          OutputGuard out(report_opts.out);
          manifest.config["runs"] = std::to_string(report_opts.runs.size());

          std::ofstream cmp(out.file("comparison.csv"));
          cmp << "# top-1 and top-100th rows per run; top-100th falls back to the last row "
                 "when fewer rows exist\n";
          cmp << "run,rank,smiles,combined,antibiotic,qed_raw,synth_raw,sa_raw,oracle_score\n";
          SvgPlot overlay("best score vs molecules visited", "molecules visited",
                          "best combined score");
          overlay.set_log_x(true);

          for (const std::string& run : report_opts.runs) {
            fs::path dir(run);
            std::string name = dir.filename().string();
            manifest.add_input(dir / "topk.csv");

            // pick rank-1 and rank-100 (or last) rows out of topk.csv
            std::ifstream topk(dir / "topk.csv");
            if (!topk) throw MoleculeError("missing topk.csv in " + run);
            std::string line, header;
            std::getline(topk, header);
            bool has_oracle = header.find("oracle_score") != std::string::npos;
            std::vector<std::string> rows;
            while (std::getline(topk, line)) {
              if (!line.empty()) rows.push_back(line);
            }
            if (rows.empty()) continue;
            auto emit = [&](std::size_t idx) {
              std::string row = rows[std::min(idx, rows.size() - 1)];
              if (!has_oracle) row += ",";
              cmp << name << "," << row << "\n";
            };
            emit(0);
            emit(99);

            std::ifstream curve(dir / "best_curve.csv");
            if (curve) {
              manifest.add_input(dir / "best_curve.csv");
              std::vector<std::pair<double, double>> pts;
              std::getline(curve, line);  // header
              while (std::getline(curve, line)) {
                std::size_t comma = line.find(',');
                if (comma == std::string::npos) continue;
                pts.emplace_back(std::stod(line.substr(0, comma)),
                                 std::stod(line.substr(comma + 1)));
              }
              overlay.add_step(std::move(pts), name);
            }
          }
          overlay.write(out.file("best_curves.svg"));
          manifest.outputs = out.names();
          manifest.finished_at = iso_timestamp_utc();
          manifest.write_atomic(out.dir() / "run_manifest.json");
          out.commit();
          std::cout << "compared " << report_opts.runs.size() << " runs\n";
        },
        "report", 0);
  }

  if (bench_cmd->parsed()) {
    return run_command(
        [&](RunManifest& manifest) {
          OutputGuard out(bench_opts.out);
          manifest.config = {{"space", bench_opts.space},
                             {"n", std::to_string(bench_opts.n)},
                             {"min_atoms", std::to_string(bench_opts.min_atoms)},
                             {"node_budget", std::to_string(bench_opts.node_budget)}};
          SearchSpace space = load_space(bench_opts.space, common, manifest);
          SynthOracle oracle = load_oracle(common, manifest, bench_opts.node_budget);
          manifest.add_input(bench_opts.checkpoint);
          SurrogateModel model = load_checkpoint(bench_opts.checkpoint, Task::Regression);

          std::vector<Molecule> mols;
          Rng rng(bench_opts.seed);
          int guard = 0;
          while (static_cast<int>(mols.size()) < bench_opts.n && guard < 100 * bench_opts.n) {
            ++guard;
            Molecule m = random_molecule(space, rng, bench_opts.n_init);
            if (m.atom_count() >= bench_opts.min_atoms) mols.push_back(std::move(m));
          }
          if (static_cast<int>(mols.size()) < bench_opts.n)
            throw MoleculeError("could not sample enough molecules of the requested size");

          TimingStats fast =
              benchmark([&](const Molecule& m) { predict(model, m); }, mols);
          TimingStats slow =
              benchmark([&](const Molecule& m) { oracle.score(m); }, mols);
          double ratio = speedup_ratio(fast, slow);

          std::ofstream f(out.file("timing.csv"));
          f << "# per-molecule wall-clock seconds; speedup = planner mean / surrogate mean\n";
          f << "subject,mean_s,median_s,p95_s,items,speedup\n";
          f << "surrogate," << format_double(fast.mean) << "," << format_double(fast.median)
            << "," << format_double(fast.p95) << "," << fast.items << ","
            << format_double(ratio) << "\n";
          f << "planner," << format_double(slow.mean) << "," << format_double(slow.median)
            << "," << format_double(slow.p95) << "," << slow.items << ",1\n";
          manifest.outputs = out.names();
          manifest.finished_at = iso_timestamp_utc();
          manifest.write_atomic(out.dir() / "run_manifest.json");
          out.commit();
          std::cout << "surrogate mean " << format_double(fast.mean * 1e3) << " ms, planner mean "
                    << format_double(slow.mean * 1e3) << " ms, speedup "
                    << format_double(ratio) << "x\n";
        },
        "benchmark", bench_opts.seed);
  }

  return 0;
}
