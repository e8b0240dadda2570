//
// Project SynthWeaver
// SPDX-License-Identifier: Apache-2.0
//
#include "synthweaver/io.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>

#include "json.hpp"
#include "synthweaver/smiles.hpp"

namespace synthweaver {

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void save_dataset_csv(const std::filesystem::path& path, const std::vector<LabeledRow>& rows) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw MoleculeError("cannot write dataset: " + path.string());
  out << "smiles,score\n";
  for (const LabeledRow& r : rows) out << r.smiles << "," << format_double(r.score) << "\n";
}

Dataset load_dataset_csv(const std::filesystem::path& path, int max_atoms) {
  std::ifstream in(path);
  if (!in) throw MoleculeError("cannot read dataset: " + path.string());
  Dataset data;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (line_no == 1 && line == "smiles,score") continue;
    std::size_t comma = line.rfind(',');
    if (comma == std::string::npos)
      throw MoleculeError(path.string() + ":" + std::to_string(line_no) +
                          ": expected smiles,score");
    try {
      data.mols.push_back(parse_smiles(line.substr(0, comma), max_atoms));
      data.scores.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception& e) {
      throw MoleculeError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return data;
}

std::uint64_t file_digest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MoleculeError("cannot read input for digest: " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ull;
  char buf[1 << 14];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ull;
    }
    if (!in) break;
  }
  return h;
}

std::string iso_timestamp_utc() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

void RunManifest::add_input(const std::filesystem::path& path) {
  char hex[24];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(file_digest(path)));
  input_digests.emplace_back(path.string(), hex);
}

void RunManifest::write_atomic(const std::filesystem::path& path) const {
  nlohmann::json j;
  j["tool_version"] = tool_version;
  j["subcommand"] = subcommand;
  j["config"] = config;
  j["seed"] = seed;
  nlohmann::json inputs = nlohmann::json::array();
  for (const auto& [p, d] : input_digests) {
    inputs.push_back({{"path", p}, {"digest_fnv1a64", d}});
  }
  j["inputs"] = std::move(inputs);
  j["started_at"] = started_at;
  j["finished_at"] = finished_at;
  j["outputs"] = outputs;

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw MoleculeError("cannot write manifest: " + tmp.string());
    out << j.dump(1) << "\n";
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace synthweaver
