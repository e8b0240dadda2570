//
// Project SynthWeaver
// SPDX-License-Identifier: Apache-2.0
//
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "synthweaver_cli_test";

std::string cli() { return SYNTHWEAVER_CLI_PATH; }
std::string data() { return SYNTHWEAVER_DATA_DIR; }

int run(const std::string& args) {
  std::string cmd = cli() + " " + args + " >>" + (kWork / "log.txt").string() + " 2>&1";
  return std::system(cmd.c_str());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int line_count(const fs::path& p) {
  std::ifstream in(p);
  int n = 0;
  std::string line;
  while (std::getline(in, line)) ++n;
  return n;
}

}  // namespace

TEST_CASE("cli: full pipeline at miniature scale") {
  fs::remove_all(kWork);
  fs::create_directories(kWork);
  std::string common = "--data-dir " + data() + " --cache " + (kWork / "cache.csv").string() +
                       " --workers 2 ";

  // gen-dataset: counted rows, manifest, deterministic rerun
  REQUIRE(run(common + "gen-dataset --space frag105 --n 120 --n-init 3 --seed 5 --out " +
              (kWork / "gen").string()) == 0);
  CHECK(line_count(kWork / "gen" / "dataset.csv") == 121);  // header + rows
  CHECK(fs::exists(kWork / "gen" / "run_manifest.json"));

  std::string first = slurp(kWork / "gen" / "dataset.csv");
  REQUIRE(run(common + "gen-dataset --space frag105 --n 120 --n-init 3 --seed 5 --out " +
              (kWork / "gen2").string()) == 0);
  CHECK(slurp(kWork / "gen2" / "dataset.csv") == first);  // byte-identical

  // different worker count, same bytes
  REQUIRE(run("--data-dir " + data() + " --cache " + (kWork / "cache3.csv").string() +
              " --workers 1 gen-dataset --space frag105 --n 120 --n-init 3 --seed 5 --out " +
              (kWork / "gen3").string()) == 0);
  CHECK(slurp(kWork / "gen3" / "dataset.csv") == first);

  // train: tiny regression run
  REQUIRE(run(common + "train --dataset " + (kWork / "gen" / "dataset.csv").string() +
              " --task regression --hidden 16 --depth 2 --epochs 6 --batch 32 --k 2 "
              "--seed 3 --out " +
              (kWork / "train").string()) == 0);
  CHECK(fs::exists(kWork / "train" / "checkpoint.json"));
  CHECK(fs::exists(kWork / "train" / "fidelity.csv"));
  CHECK(fs::exists(kWork / "train" / "scatter.csv"));
  CHECK(fs::exists(kWork / "train" / "scatter.svg"));

  // classification emits an ROC
  REQUIRE(run(common + "train --dataset " + (kWork / "gen" / "dataset.csv").string() +
              " --task classification --hidden 16 --depth 2 --epochs 6 --batch 32 --k 2 "
              "--seed 3 --out " +
              (kWork / "traincls").string()) == 0);
  CHECK(fs::exists(kWork / "traincls" / "roc.csv"));
  CHECK(fs::exists(kWork / "traincls" / "roc.svg"));

  // search with the retrognn backend + oracle relabel
  std::string ckpt = (kWork / "train" / "checkpoint.json").string();
  REQUIRE(run(common + "search --space frag105 --synth-backend retrognn --checkpoint " + ckpt +
              " --steps 4 --n-init 2 --trajectories 2 --top-k 10 --seed 11 "
              "--oracle-relabel --out " +
              (kWork / "search").string()) == 0);
  CHECK(fs::exists(kWork / "search" / "trajectories.csv"));
  CHECK(fs::exists(kWork / "search" / "topk.csv"));
  CHECK(fs::exists(kWork / "search" / "best_curve.csv"));
  CHECK(fs::exists(kWork / "search" / "best_curve.svg"));
  {
    std::string topk = slurp(kWork / "search" / "topk.csv");
    CHECK(topk.find("oracle_score") != std::string::npos);
  }

  // identical rerun of search is byte-identical on all CSVs
  REQUIRE(run(common + "search --space frag105 --synth-backend retrognn --checkpoint " + ckpt +
              " --steps 4 --n-init 2 --trajectories 2 --top-k 10 --seed 11 "
              "--oracle-relabel --out " +
              (kWork / "search2").string()) == 0);
  for (const char* f : {"trajectories.csv", "topk.csv", "best_curve.csv"}) {
    CHECK(slurp(kWork / "search" / f) == slurp(kWork / "search2" / f));
  }

  // random-walk selection shares the machinery
  REQUIRE(run(common + "search --selection random --space frag105 --synth-backend sa "
              "--steps 4 --n-init 2 --trajectories 2 --top-k 10 --seed 11 --out " +
              (kWork / "rw").string()) == 0);
  CHECK(fs::exists(kWork / "rw" / "topk.csv"));

  // screen a small file (1 bad line)
  {
    std::ofstream f(kWork / "lib.smi");
    f << "CCO ethanol\nbad(smiles\nc1ccccc1 benzene\nCC(=O)NC acetamide\n";
  }
  REQUIRE(run(common + "screen --input " + (kWork / "lib.smi").string() +
              " --synth-backend sa --top-k 3 --out " + (kWork / "screen").string()) == 0);
  CHECK(line_count(kWork / "screen" / "topk.csv") == 4);  // header + 3 rows

  // report merges runs
  REQUIRE(run(common + "report --runs " + (kWork / "search").string() + " " +
              (kWork / "rw").string() + " " + (kWork / "screen").string() + " --out " +
              (kWork / "report").string()) == 0);
  CHECK(fs::exists(kWork / "report" / "comparison.csv"));
  CHECK(fs::exists(kWork / "report" / "best_curves.svg"));
  CHECK(line_count(kWork / "report" / "comparison.csv") > 2);

  // label with route dumps
  REQUIRE(run(common + "label --input " + (kWork / "lib.smi").string() + " --routes --out " +
              (kWork / "label").string()) == 0);
  CHECK(line_count(kWork / "label" / "labels.csv") == 4);
  CHECK(fs::exists(kWork / "label" / "routes.txt"));

  // benchmark at the minimum allowed size
  REQUIRE(run(common + "benchmark --space frag105 --checkpoint " + ckpt +
              " --n 30 --min-atoms 8 --seed 2 --out " + (kWork / "bench").string()) == 0);
  std::string timing = slurp(kWork / "bench" / "timing.csv");
  CHECK(timing.find("surrogate") != std::string::npos);
  CHECK(timing.find("planner") != std::string::npos);
}

TEST_CASE("cli: failures exit nonzero and leave no partial outputs") {
  fs::create_directories(kWork);
  std::string common = "--data-dir " + data() + " ";
  CHECK(run(common + "train --dataset " + (kWork / "missing.csv").string() + " --out " +
            (kWork / "fail1").string()) != 0);
  CHECK_FALSE(fs::exists(kWork / "fail1" / "checkpoint.json"));

  CHECK(run(common + "search --space nosuch --synth-backend sa --out " +
            (kWork / "fail2").string()) != 0);
  CHECK_FALSE(fs::exists(kWork / "fail2" / "topk.csv"));

  // retrognn without a checkpoint is a config error
  CHECK(run(common + "search --space frag105 --synth-backend retrognn --out " +
            (kWork / "fail3").string()) != 0);

  // config file provides defaults, flags win
  {
    std::ofstream cfg(kWork / "run.ini");
    cfg << "workers=2\n";
  }
  CHECK(run("--config " + (kWork / "run.ini").string() + " --data-dir " + data() +
            " label --input " + (kWork / "nofile.smi").string() + " --out " +
            (kWork / "fail4").string()) != 0);
  fs::remove_all(kWork);
}
