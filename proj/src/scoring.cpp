//
// Project SynthWeaver
// SPDX-License-Identifier: Apache-2.0
//
#include "synthweaver/scoring.hpp"

#include <algorithm>
#include <cmath>

#include "synthweaver/rng.hpp"

namespace synthweaver {

PropertyModel::PropertyModel(std::uint64_t seed, int radius, int nbits)
    : seed_(seed), radius_(radius), nbits_(nbits) {
  Rng rng(Rng::derive(seed, 0x9b0b));
  weights_.resize(nbits);
  for (double& w : weights_) w = rng.next_double(-0.35, 0.35);
  bias_ = -0.3;
}

double PropertyModel::probability(const Molecule& mol) const {
  BitVector fp = fingerprint(mol, radius_, nbits_);
  double z = bias_;
  for (int i : fp.on_bits()) z += weights_[i];
  return 1.0 / (1.0 + std::exp(-z));
}

double antibiotic_score(double p, const ScoreConfig& cfg) {
  // the epsilon floor keeps p -> 1 finite at exactly log(p_epsilon)
  return std::log(std::max(1.0 - p, cfg.p_epsilon));
}

double qed_score(double q, const ScoreConfig& cfg) {
  return std::min(std::max(0.0, q / cfg.qed_cap), 1.0);
}

double synth_score(double s, double cap, const ScoreConfig& cfg) {
  return std::min(std::max(0.0, (cfg.score_max - s) / (cfg.score_max - cap)), 1.0);
}

namespace {

double trapezoid(double x, double a, double b, double c, double d) {
  if (x <= a || x >= d) return 0.0;
  if (x < b) return (x - a) / (b - a);
  if (x <= c) return 1.0;
  return (d - x) / (d - c);
}

}  // namespace

double druglikeness(const Molecule& mol) {
  DescriptorSet d = descriptors(mol);
  // plateau/support pairs: MW 300 +-50/+-200, rings 2 +-1/+-3,
  // rotatable <=8 tapering to 15, heteroatom fraction 0.25 +-0.10/+-0.20
  double f_mw = trapezoid(d.molecular_weight, 100.0, 250.0, 350.0, 500.0);
  double f_ring = trapezoid(static_cast<double>(d.ring_count), -1.0, 1.0, 3.0, 5.0);
  double f_rot = trapezoid(static_cast<double>(d.rotatable_bonds), -1.0, 0.0, 8.0, 15.0);
  double f_het = trapezoid(d.heteroatom_fraction, 0.05, 0.15, 0.35, 0.45);
  return std::pow(f_mw * f_ring * f_rot * f_het, 0.25);
}

double sa_heuristic(const Molecule& mol) {
  DescriptorSet d = descriptors(mol);
  RingInfo rings = analyze_rings(mol);
  double size_p = std::clamp((d.heavy_atoms - 30.0) / 20.0, 0.0, 1.0);
  double fused_p = std::min(1.0, rings.fusion_excess / 4.0);
  double het_p = std::max(0.0, d.heteroatom_fraction - 0.4) / 0.6;
  double macro = d.largest_ring_size >= 9 ? 1.0 : 0.0;
  double raw = 1.0 + 3.0 * size_p + 0.8 * d.ring_count + 0.8 * fused_p + 0.6 * het_p +
               0.5 * macro;
  return std::clamp(raw, 1.0, 10.0);
}

const char* synth_backend_name(SynthBackendKind k) {
  return k == SynthBackendKind::RetroGnn ? "retrognn" : "sa";
}

SynthBackend SynthBackend::sa() { return SynthBackend{SynthBackendKind::SaHeuristic, nullptr}; }

SynthBackend SynthBackend::retrognn(std::shared_ptr<const SurrogateModel> model) {
  if (!model) throw MoleculeError("retrognn backend needs a model");
  if (model->task != Task::Regression)
    throw MoleculeError("retrognn backend needs a regression checkpoint");
  return SynthBackend{SynthBackendKind::RetroGnn, std::move(model)};
}

CombinedScorer::CombinedScorer(PropertyModel property, SynthBackend backend, ScoreConfig cfg)
    : property_(std::move(property)), backend_(std::move(backend)), cfg_(cfg) {}

ScoreBundle CombinedScorer::assemble(const Molecule& mol, double synth_raw) const {
  ScoreBundle b;
  b.p = property_.probability(mol);
  b.antibiotic = antibiotic_score(b.p, cfg_);
  b.qed_raw = druglikeness(mol);
  b.qed_clamped = qed_score(b.qed_raw, cfg_);
  b.synth_raw = synth_raw;
  double cap = backend_.kind == SynthBackendKind::RetroGnn ? cfg_.retro_cap : cfg_.sa_cap;
  b.synth_clamped = synth_score(synth_raw, cap, cfg_);
  b.combined = b.antibiotic * b.qed_clamped * b.synth_clamped;
  return b;
}

ScoreBundle CombinedScorer::score(const Molecule& mol) const {
  std::vector<Molecule> one = {mol};
  return score_batch(one)[0];
}

std::vector<ScoreBundle> CombinedScorer::score_batch(std::span<const Molecule> mols) const {
  std::vector<ScoreBundle> out;
  out.reserve(mols.size());
  if (backend_.kind == SynthBackendKind::RetroGnn) {
    Eigen::VectorXd pred = predict_batch(*backend_.model, mols);
    for (std::size_t i = 0; i < mols.size(); ++i) {
      out.push_back(assemble(mols[i], pred(static_cast<Eigen::Index>(i))));
    }
  } else {
    for (const Molecule& m : mols) out.push_back(assemble(m, sa_heuristic(m)));
  }
  return out;
}

}  // namespace synthweaver
