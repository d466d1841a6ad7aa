#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "ibd/chain.hpp"
#include "ibd/experiments.hpp"
#include "ibd/graph.hpp"
#include "ibd/linalg.hpp"

namespace ibd {

/// Flat key-value configuration, schema 1. See docs/config.md.
///
///   schema=1
///   # comment
///   key = value
///   [section]
///   key = value        # stored as "section.key"
///
/// Lookups with a section try "section.key" first and fall back to "key".
class Config {
 public:
  static Config parse(const std::string& text, std::filesystem::path base_dir = ".");
  static Config load(const std::filesystem::path& path);

  bool has(const std::string& section, const std::string& key) const;
  std::optional<std::string> find(const std::string& section, const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key) const;
  double get_double(const std::string& section, const std::string& key) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& section, const std::string& key) const;
  std::int64_t get_int(const std::string& section, const std::string& key,
                       std::int64_t fallback) const;
  std::uint64_t get_uint(const std::string& section, const std::string& key,
                         std::uint64_t fallback) const;
  /// Whitespace- or comma-separated numbers.
  Vector get_vector(const std::string& section, const std::string& key) const;
  /// Rows separated by ';'.
  Matrix get_matrix(const std::string& section, const std::string& key) const;

  /// Sets a top-level key and drops every "section.key", so the value wins
  /// over section-level settings.
  void set(const std::string& key, const std::string& value);
  std::filesystem::path resolve(const std::string& relative) const;

 private:
  std::map<std::string, std::string> values_;
  std::filesystem::path base_dir_;
};

/// "graph = <file>" (relative to the config file), or "vertices = N" with
/// optional "edges = 0-1 1-2 …".
Graph config_graph(const Config& c, const std::string& section);
/// Graph plus "birth", "death" matrices and truncation "l", "r".
ChainSpec config_chain(const Config& c, const std::string& section);
/// Experiment keys; the schedule is "eps_first_exponent"/"eps_last_exponent"
/// or explicit "epsilons" and "boxes", with initial point "u".
ExperimentConfig config_experiment(const Config& c, const std::string& section, Regime regime);
GeneratorCheckConfig config_generator_check(const Config& c, const std::string& section);

}  // namespace ibd
