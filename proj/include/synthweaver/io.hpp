//
// Project SynthWeaver
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "synthweaver/oracle.hpp"
#include "synthweaver/train.hpp"

namespace synthweaver {

inline constexpr const char* kToolVersion = "synthweaver 0.1.0";

// Shortest decimal form that round-trips to the same double.
std::string format_double(double v);

// Labeled dataset file: CSV header "smiles,score".
void save_dataset_csv(const std::filesystem::path& path, const std::vector<LabeledRow>& rows);
Dataset load_dataset_csv(const std::filesystem::path& path, int max_atoms = kDefaultMaxAtoms);

// FNV-1a over the raw file bytes; throws when the file cannot be read.
std::uint64_t file_digest(const std::filesystem::path& path);
std::string iso_timestamp_utc();

// Reproducibility record written next to every subcommand's outputs.
struct RunManifest {
  std::string tool_version = kToolVersion;
  std::string subcommand;
  std::map<std::string, std::string> config;  // fully resolved settings
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> input_digests;  // (path, hex digest)
  std::string started_at;
  std::string finished_at;
  std::vector<std::string> outputs;

  void add_input(const std::filesystem::path& path);
  // write to a temp file, then rename: the manifest appears atomically
  void write_atomic(const std::filesystem::path& path) const;
};

}  // namespace synthweaver
