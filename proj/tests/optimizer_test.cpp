//
// Project SynthWeaver
// SPDX-License-Identifier: Apache-2.0
//
#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "support/testutil.hpp"
#include "synthweaver/search.hpp"
#include "synthweaver/smiles.hpp"

using namespace synthweaver;

namespace {

SearchSpace test_space() {
  std::istringstream lines("C*\n*N\n*O\n*c1ccccc1\nO=C(O)C*\n*CC*\n");
  return make_fragment_space(parse_fragment_library(lines, "test"));
}

CombinedScorer sa_scorer() { return CombinedScorer(PropertyModel(), SynthBackend::sa()); }

}  // namespace

TEST_CASE("softmax: symmetry, two-point value, limits") {
  std::vector<double> flat = {0.0, 0.0, 0.0};
  auto p = softmax_probs(flat, 0.7);
  for (double x : p) CHECK(x == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  std::vector<double> two = {1.0, 0.0};
  auto p2 = softmax_probs(two, 0.5);
  CHECK(p2[0] == doctest::Approx(0.8808).epsilon(1e-4));
  CHECK(p2[1] == doctest::Approx(0.1192).epsilon(1e-4));

  // sums to one within 1e-12, all strictly positive, monotone in q
  std::vector<double> q = {0.3, -1.2, 2.4, 2.4, -0.7};
  auto p3 = softmax_probs(q, 0.15);
  double sum = 0.0;
  for (double x : p3) {
    CHECK(x > 0.0);
    sum += x;
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t i = 0; i < q.size(); ++i) {
    for (std::size_t j = 0; j < q.size(); ++j) {
      if (q[i] < q[j]) CHECK(p3[i] <= p3[j] + 1e-15);
    }
  }

  // tau -> 0 concentrates on the argmax; large tau flattens
  std::vector<double> spread = {0.0, 0.5, 1.0};
  auto cold = softmax_probs(spread, 1e-6);
  CHECK(cold[2] == doctest::Approx(1.0).epsilon(1e-9));
  auto hot = softmax_probs(spread, 100.0);
  for (double x : hot) CHECK(std::abs(x - 1.0 / 3.0) < 1e-2);

  CHECK_THROWS_AS(softmax_probs(std::vector<double>{}, 0.15), MoleculeError);
  CHECK_THROWS_AS(softmax_probs(flat, 0.0), MoleculeError);
}

TEST_CASE("softmax sampling limits: empirical argmax and uniformity") {
  std::vector<double> q = {0.1, 0.9, 0.4};
  Rng rng(11);
  auto draw = [&](double tau) {
    auto probs = softmax_probs(q, tau);
    std::vector<int> counts(q.size(), 0);
    for (int t = 0; t < 10000; ++t) {
      double r = rng.next_double();
      double cum = 0.0;
      for (std::size_t i = 0; i < probs.size(); ++i) {
        cum += probs[i];
        if (r < cum) {
          ++counts[i];
          break;
        }
      }
    }
    return counts;
  };
  auto cold = draw(1e-6);
  CHECK(cold[1] == 10000);  // argmax frequency -> 1
  auto hot = draw(100.0);
  double tv = 0.0;
  for (int c : hot) tv += std::abs(c / 10000.0 - 1.0 / 3.0);
  CHECK(tv / 2.0 < 0.02);  // total variation to uniform
}

TEST_CASE("run_trajectory: zero steps, determinism, validity") {
  SearchSpace space = test_space();
  CombinedScorer scorer = sa_scorer();
  RunConfig cfg;
  cfg.steps = 0;
  cfg.n_init = 2;
  Rng r1(5);
  Trajectory t0 = run_trajectory(space, scorer, cfg, r1);
  CHECK(t0.records.size() == 1);

  cfg.steps = 6;
  Rng r2(9), r3(9);
  Trajectory a = run_trajectory(space, scorer, cfg, r2);
  Trajectory b = run_trajectory(space, scorer, cfg, r3);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].smiles == b.records[i].smiles);
    CHECK(a.records[i].action == b.records[i].action);
  }
  CHECK(a.records.size() <= 7);

  // consecutive records are related by a legal action of the space; the
  // recorded action string is relative to the in-run atom numbering, so the
  // check is existential over the canonical re-parse
  for (std::size_t i = 1; i < a.records.size(); ++i) {
    Molecule prev = parse_smiles(a.records[i - 1].smiles);
    bool found = false;
    for (auto& [action, result] : enumerate_with_results(space, prev)) {
      if (write_smiles(result) == a.records[i].smiles) {
        found = true;
        break;
      }
    }
    CHECK(found);
    CHECK(a.records[i].action_count > 0);
    CHECK_FALSE(a.records[i].action.empty());
  }
}

TEST_CASE("run_search: worker counts do not change the report") {
  SearchSpace space = test_space();
  CombinedScorer scorer = sa_scorer();
  RunConfig cfg;
  cfg.steps = 5;
  cfg.n_init = 2;
  cfg.n_trajectories = 6;
  cfg.seed = 313;
  cfg.top_k = 10;

  cfg.workers = 1;
  SearchReport serial = run_search(space, scorer, cfg);
  cfg.workers = 4;
  SearchReport parallel = run_search(space, scorer, cfg);

  REQUIRE(serial.top.size() == parallel.top.size());
  for (std::size_t i = 0; i < serial.top.size(); ++i) {
    CHECK(serial.top[i].smiles == parallel.top[i].smiles);
    CHECK(serial.top[i].bundle.combined == parallel.top[i].bundle.combined);
  }
  REQUIRE(serial.best_curve.size() == parallel.best_curve.size());
  for (std::size_t i = 0; i < serial.best_curve.size(); ++i) {
    CHECK(serial.best_curve[i] == parallel.best_curve[i]);
  }
  CHECK(serial.total_visited == parallel.total_visited);

  // top table sorted ascending, deduplicated
  for (std::size_t i = 1; i < serial.top.size(); ++i) {
    CHECK(serial.top[i - 1].bundle.combined <= serial.top[i].bundle.combined);
    CHECK(serial.top[i - 1].smiles != serial.top[i].smiles);
  }
}

TEST_CASE("run_search: tiny run shapes") {
  SearchSpace space = test_space();
  CombinedScorer scorer = sa_scorer();
  RunConfig cfg;
  cfg.steps = 1;
  cfg.n_init = 1;
  cfg.n_trajectories = 1;
  cfg.top_k = 100;
  SearchReport r = run_search(space, scorer, cfg);
  REQUIRE(r.trajectories.size() == 1);
  CHECK(r.trajectories[0].records.size() <= 2);
  CHECK(r.best_curve.size() >= 1);
  CHECK(r.best_curve.front().first >= 1);
}

TEST_CASE("random_walk_baseline: visits only the chain") {
  SearchSpace space = test_space();
  CombinedScorer scorer = sa_scorer();
  RunConfig cfg;
  cfg.steps = 8;
  cfg.n_init = 1;
  cfg.n_trajectories = 3;
  cfg.seed = 77;
  SearchReport rw = random_walk_baseline(space, scorer, cfg);
  // scored molecules = chain states only: (steps+1) per trajectory at most
  CHECK(rw.total_visited <= 3 * 9);
  CHECK(rw.total_visited >= 3);
  SearchReport rw2 = random_walk_baseline(space, scorer, cfg);
  REQUIRE(rw.top.size() == rw2.top.size());
  for (std::size_t i = 0; i < rw.top.size(); ++i) {
    CHECK(rw.top[i].smiles == rw2.top[i].smiles);
  }
  for (std::size_t i = 1; i < rw.top.size(); ++i) {
    CHECK(rw.top[i - 1].bundle.combined <= rw.top[i].bundle.combined);
  }
}

TEST_CASE("screen_library: parse errors counted, streaming top-k") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "synthweaver_screen_test";
  fs::create_directories(dir);
  fs::path file = dir / "list.smi";
  {
    std::ofstream out(file);
    out << "# header comment\n";
    out << "CCO ethanol\n";
    out << "not(a(smiles\n";
    out << "c1ccccc1\tbenzene\n";
    out << "\n";
    out << "CC(=O)Oc1ccccc1C(=O)O aspirin\n";
  }
  CombinedScorer scorer = sa_scorer();
  RunConfig cfg;
  cfg.top_k = 2;
  SearchReport r = screen_library(file, scorer, cfg);
  CHECK(r.parse_errors == 1);
  CHECK(r.total_visited == 3);
  CHECK(r.top.size() == 2);  // memory bounded by k
  CHECK(r.top[0].bundle.combined <= r.top[1].bundle.combined);

  // empty file: empty report, no errors
  fs::path empty = dir / "empty.smi";
  std::ofstream(empty) << "";
  SearchReport e = screen_library(empty, scorer, cfg);
  CHECK(e.total_visited == 0);
  CHECK(e.parse_errors == 0);
  CHECK(e.top.empty());
  fs::remove_all(dir);
}

TEST_CASE("top-k: dedup and tie ranking by synth_raw") {
  TopK top(3);
  ScoreBundle a;
  a.combined = 0.0;
  a.synth_raw = 11.0;
  ScoreBundle b;
  b.combined = 0.0;
  b.synth_raw = 7.0;
  ScoreBundle c;
  c.combined = -1.0;
  c.synth_raw = 3.0;
  top.offer(std::string("AAA"), a);
  top.offer(std::string("AAA"), a);  // duplicate collapses
  top.offer(std::string("BBB"), b);
  top.offer(std::string("CCC"), c);
  auto rows = top.sorted();
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].smiles == "CCC");
  CHECK(rows[1].smiles == "BBB");  // tie at 0 ranks lower synth_raw first
  CHECK(rows[2].smiles == "AAA");
}
