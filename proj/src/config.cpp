#include "usc/config.hpp"

#include <fstream>
#include <sstream>

#include "usc/errors.hpp"

namespace usc {

std::string version() { return "0.1.0"; }

nlohmann::json ExperimentConfig::to_json() const {
  return {{"command", command}, {"spec", spec_path},       {"family", family},     {"params", params},
          {"level", level},     {"levels", levels},        {"scheme", scheme},     {"point_contact", point_contact},
          {"seed", seed},       {"walks", walks},          {"samples", samples},   {"alpha", alpha},
          {"measure", measure}, {"x", x},                  {"y", y},               {"sigma", sigma},
          {"depth", depth},     {"m", m},                  {"threshold", threshold}, {"extrapolate", extrapolate},
          {"heat", heat},       {"function", function_csv}};
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InputError("config must be a JSON object");
  ExperimentConfig c;
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) {
      try {
        j.at(key).get_to(field);
      } catch (const nlohmann::json::exception&) {
        throw InputError(std::string("config field '") + key + "' has the wrong type");
      }
    }
  };
  get("command", c.command);
  get("spec", c.spec_path);
  get("family", c.family);
  get("params", c.params);
  get("level", c.level);
  get("levels", c.levels);
  get("scheme", c.scheme);
  get("point_contact", c.point_contact);
  get("seed", c.seed);
  get("walks", c.walks);
  get("samples", c.samples);
  get("alpha", c.alpha);
  get("measure", c.measure);
  get("x", c.x);
  get("y", c.y);
  get("sigma", c.sigma);
  get("depth", c.depth);
  get("m", c.m);
  get("threshold", c.threshold);
  get("extrapolate", c.extrapolate);
  get("heat", c.heat);
  get("function", c.function_csv);
  get("out", c.out);
  return c;
}

ConductanceScheme ExperimentConfig::conductance() const {
  ConductanceScheme s = parse_scheme(scheme);
  s.point_contact_conductance = point_contact;
  return s;
}

std::vector<int> ExperimentConfig::level_list() const {
  if (levels.empty()) return {level};
  return parse_levels(levels);
}

std::vector<int> parse_levels(const std::string& text) {
  auto to_int = [&](const std::string& s) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(s, &used);
    } catch (const std::exception&) {
      throw InputError("bad level list '" + text + "'");
    }
    if (used != s.size() || v < 0) throw InputError("bad level list '" + text + "'");
    return v;
  };
  std::vector<int> out;
  if (const auto dots = text.find(".."); dots != std::string::npos) {
    const int a = to_int(text.substr(0, dots)), b = to_int(text.substr(dots + 2));
    if (b < a) throw InputError("empty level range '" + text + "'");
    for (int n = a; n <= b; ++n) out.push_back(n);
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_int(item));
  if (out.empty()) throw InputError("empty level list");
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
}

USCSpec load_spec(const ExperimentConfig& cfg) {
  if (!cfg.spec_path.empty()) return parse_spec(read_file(cfg.spec_path));
  if (!cfg.family.empty()) return load_family(cfg).limit;
  throw InputError("--spec or --family is required");
}

FamilySpec load_family(const ExperimentConfig& cfg) {
  if (cfg.family.empty()) throw InputError("--family is required");
  if (cfg.params.empty()) throw InputError("--params is required");
  return make_family(cfg.family, cfg.params);
}

nlohmann::json spec_to_json(const USCSpec& spec) {
  nlohmann::json offsets = nlohmann::json::array();
  for (const auto& p : spec.offsets) offsets.push_back({p.x.to_string(), p.y.to_string()});
  return {{"k", spec.k}, {"n_maps", spec.n_maps()}, {"offsets", offsets}};
}

}  // namespace usc
