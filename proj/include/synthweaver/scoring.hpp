//
// Project SynthWeaver
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <memory>
#include <span>
#include <vector>

#include "synthweaver/descriptors.hpp"
#include "synthweaver/mpnn.hpp"
#include "synthweaver/molecule.hpp"

namespace synthweaver {

struct ScoreConfig {
  double qed_cap = 0.70;
  double retro_cap = 4.5;
  double sa_cap = 3.5;
  double score_max = 11.0;
  double p_epsilon = 1e-12;
};

// FDA-average reference values (documentation constants; the operative
// numbers in scoring are the caps above).
inline constexpr double kReferenceQed = 0.52;
inline constexpr double kReferencePlannerScore = 5.0;
inline constexpr double kReferenceSaScore = 3.5;

inline constexpr std::uint64_t kDefaultPropertySeed = 20201117;

// Stand-in activity predictor: a frozen seeded logistic model over circular
// fingerprints. Deterministic; output strictly inside (0,1).
class PropertyModel {
 public:
  explicit PropertyModel(std::uint64_t seed = kDefaultPropertySeed, int radius = 2,
                         int nbits = 2048);
  double probability(const Molecule& mol) const;
  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  int radius_;
  int nbits_;
  std::vector<double> weights_;
  double bias_;
};

// log(1 - p), with p clipped to 1 - p_epsilon; always <= 0.
double antibiotic_score(double p, const ScoreConfig& cfg);
// min(max(0, q / qed_cap), 1)
double qed_score(double q, const ScoreConfig& cfg);
// min(max(0, (11 - s) / (11 - cap)), 1); cap is retro_cap or sa_cap
double synth_score(double s, double cap, const ScoreConfig& cfg);

// Drug-likeness proxy: geometric mean of four trapezoid desirability curves
// over molecular weight, ring count, rotatable bonds and heteroatom fraction.
double druglikeness(const Molecule& mol);

// Synthetic-accessibility heuristic in [1,10]: weighted size, ring
// complexity, heteroatom-excess and macrocycle penalties.
double sa_heuristic(const Molecule& mol);

struct ScoreBundle {
  double p = 0.0;
  double antibiotic = 0.0;     // <= 0
  double qed_raw = 0.0;        // [0,1]
  double qed_clamped = 0.0;    // [0,1]
  double synth_raw = 0.0;      // [1,11]
  double synth_clamped = 0.0;  // [0,1]
  double combined = 0.0;       // antibiotic * qed_clamped * synth_clamped, <= 0
};

enum class SynthBackendKind { RetroGnn, SaHeuristic };

const char* synth_backend_name(SynthBackendKind k);

struct SynthBackend {
  SynthBackendKind kind = SynthBackendKind::SaHeuristic;
  std::shared_ptr<const SurrogateModel> model;  // RetroGnn only

  static SynthBackend sa();
  static SynthBackend retrognn(std::shared_ptr<const SurrogateModel> model);
};

// Combined multi-objective scorer; lower combined is better. Pure and
// thread-safe; batch scoring feeds the surrogate one packed batch.
class CombinedScorer {
 public:
  CombinedScorer(PropertyModel property, SynthBackend backend, ScoreConfig cfg = {});

  ScoreBundle score(const Molecule& mol) const;
  std::vector<ScoreBundle> score_batch(std::span<const Molecule> mols) const;

  const ScoreConfig& config() const { return cfg_; }
  const PropertyModel& property_model() const { return property_; }
  const SynthBackend& backend() const { return backend_; }

 private:
  ScoreBundle assemble(const Molecule& mol, double synth_raw) const;
  PropertyModel property_;
  SynthBackend backend_;
  ScoreConfig cfg_;
};

}  // namespace synthweaver
