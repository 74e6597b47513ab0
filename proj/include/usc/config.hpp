#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "usc/family.hpp"
#include "usc/geometry.hpp"
#include "usc/network.hpp"

namespace usc {

/// Version string embedded in every artifact.
std::string version();

struct ExperimentConfig {
  std::string command;
  std::string spec_path;
  std::string family;
  std::string params;
  int level = 3;
  /// Level list in "a..b" or "a,b,c" form; empty means {level}.
  std::string levels;
  std::string scheme = "overlap";
  double point_contact = 0.0;
  std::uint64_t seed = 42;
  std::size_t walks = 10000;
  std::size_t samples = 50;
  double alpha = 1.0;
  std::string measure = "uniform";
  std::string x;
  std::string y;
  std::string sigma = "auto";
  int depth = 6;
  int m = 3;
  double threshold = -1.0;
  bool extrapolate = false;
  bool heat = false;
  std::string function_csv;
  std::string out;

  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);

  ConductanceScheme conductance() const;
  std::vector<int> level_list() const;
};

/// "a..b", "a,b,c" or a single integer.
std::vector<int> parse_levels(const std::string& text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

/// The spec from spec_path, or the limit of the configured family.
USCSpec load_spec(const ExperimentConfig& cfg);
FamilySpec load_family(const ExperimentConfig& cfg);

/// JSON spec echo: k, N, offsets as "p/q" strings.
nlohmann::json spec_to_json(const USCSpec& spec);

}  // namespace usc
