#include "usc/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <limits>
#include <map>
#include <random>
#include <sstream>

#include "usc/config.hpp"
#include "usc/convergence.hpp"
#include "usc/diffusion.hpp"
#include "usc/errors.hpp"
#include "usc/geodesic.hpp"
#include "usc/parallel.hpp"
#include "usc/trace.hpp"

namespace usc {

namespace {

using nlohmann::json;

/// Table emitted for --out *.csv.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string csv() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << '\n';
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
      os << '\n';
    }
    return os.str();
  }
};

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

struct Outcome {
  json result;
  Table table;
  std::string svg;
  int exit_code = 0;
};

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

/// "w:1.2.3" resolves to a cell word; anything else is "x,y" with rational coordinates.
struct PointArg {
  bool is_word = false;
  Word word;
  Point point{Rational(0), Rational(0)};
};

PointArg parse_point(const std::string& text) {
  if (text.empty()) throw InputError("point argument missing");
  PointArg p;
  if (text.rfind("w:", 0) == 0) {
    p.is_word = true;
    p.word = parse_word(text.substr(2));
    return p;
  }
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw InputError("point '" + text + "' must be 'x,y' or 'w:WORD'");
  p.point = {Rational::parse(text.substr(0, comma)), Rational::parse(text.substr(comma + 1))};
  return p;
}

std::size_t resolve_cell(const CellGrid& g, const PointArg& p) {
  if (p.is_word) {
    if (static_cast<int>(p.word.size()) != g.n) throw InputError("word length must equal the level");
    for (int letter : p.word) {
      if (letter < 1 || letter > g.n_maps) throw InputError("word letter out of range");
    }
    return g.index(p.word);
  }
  const std::size_t c = g.locate(to_double(p.point));
  if (c == g.size()) throw InputError("point is not in the level-" + std::to_string(g.n) + " carpet");
  return c;
}

json optional_number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json validation_json(const ValidationReport& r) {
  return {{"map_count_in_range", r.map_count_in_range},
          {"non_overlapping", r.non_overlapping},
          {"connected", r.connected},
          {"symmetric", r.symmetric},
          {"boundary_included", r.boundary_included},
          {"boundary_numbering_canonical", r.boundary_numbering_canonical},
          {"valid", r.valid() && r.map_count_in_range},
          {"messages", r.messages}};
}

json renorm_json(const RenormEstimate& e) {
  json ratios = json::array();
  for (double r : e.ratios) ratios.push_back(optional_number(r));
  const double lo = 2.0 / e.k, hi = static_cast<double>(e.n_maps) / (e.k * e.k);
  bool inside = true;
  for (std::size_t i = 1; i < e.ratios.size(); ++i) inside = inside && e.ratios[i] >= lo && e.ratios[i] <= hi;
  json j = {{"levels", e.levels},
            {"resistances", e.resistances},
            {"ratios", ratios},
            {"r_hat", e.r_hat},
            {"theta", e.theta},
            {"d_h", e.d_h},
            {"d_w", e.d_w},
            {"sigma", 0.5 - std::log(e.r_hat) / (2.0 * std::log(static_cast<double>(e.k)))},
            {"bounds", {lo, hi}},
            {"within_bounds", inside}};
  if (e.r_extrapolated) j["r_extrapolated"] = *e.r_extrapolated;
  return j;
}

Outcome cmd_validate(const ExperimentConfig& cfg) {
  const USCSpec spec = load_spec(cfg);
  const ValidationReport r = validate_usc(spec);
  Outcome o;
  o.result = {{"spec", spec_to_json(spec)}, {"report", validation_json(r)}};
  o.exit_code = r.valid() && r.map_count_in_range ? 0 : 1;
  return o;
}

Outcome cmd_render(const ExperimentConfig& cfg) {
  const USCSpec spec = load_spec(cfg);
  Outcome o;
  o.svg = render_svg(spec, cfg.level);
  o.result = {{"level", cfg.level}, {"cells", std::pow(spec.n_maps(), cfg.level)}};
  return o;
}

Outcome cmd_network(const ExperimentConfig& cfg) {
  const USCSpec spec = load_spec(cfg);
  const CellNetwork net = build_cell_network(spec, cfg.level, cfg.conductance());
  std::size_t point_contacts = 0;
  for (const auto& e : grid_contacts(net.grid)) point_contacts += e.overlap == 0;
  Outcome o;
  o.result = {{"level", cfg.level},
              {"scheme", scheme_name(net.scheme)},
              {"point_contact_conductance", net.scheme.point_contact_conductance},
              {"vertices", net.graph.size()},
              {"edges", net.graph.edges().size()},
              {"point_contacts", point_contacts},
              {"connected", net.graph.connected()},
              {"side_resistance", side_resistance(net)}};
  return o;
}

Outcome cmd_renorm(const ExperimentConfig& cfg) {
  const USCSpec spec = load_spec(cfg);
  const auto levels = cfg.level_list();
  const int top = *std::max_element(levels.begin(), levels.end());
  const RenormEstimate e = estimate_renorm(spec, top, cfg.conductance(), cfg.extrapolate);
  Outcome o;
  o.result = renorm_json(e);
  o.table.header = {"level", "resistance", "ratio"};
  for (std::size_t i = 0; i < e.levels.size(); ++i) {
    o.table.rows.push_back({std::to_string(e.levels[i]), num(e.resistances[i]), num(e.ratios[i])});
  }
  return o;
}

Outcome cmd_metric(const ExperimentConfig& cfg) {
  const USCSpec spec = load_spec(cfg);
  CellNetwork net = build_cell_network(spec, cfg.level, cfg.conductance());
  net.normalization = side_resistance(net);
  Outcome o;
  o.result = {{"level", cfg.level}, {"normalization", net.normalization}};
  if (!cfg.x.empty() || !cfg.y.empty()) {
    const std::size_t a = resolve_cell(net.grid, parse_point(cfg.x));
    const std::size_t b = resolve_cell(net.grid, parse_point(cfg.y));
    const ResistanceMetric metric(net);
    o.result["x_cell"] = word_to_string(net.grid.word(a));
    o.result["y_cell"] = word_to_string(net.grid.word(b));
    o.result["resistance"] = metric(a, b);
  } else {
    const BoundaryBoundReport r = check_boundary_bound(net, cfg.samples, cfg.seed);
    o.result["boundary_bound"] = {{"max_ratio", r.max_ratio},
                                  {"bound", r.bound},
                                  {"r_q1q2", r.r_q1q2},
                                  {"pairs", r.pairs},
                                  {"passed", r.passed}};
    o.exit_code = r.passed ? 0 : 1;
  }
  return o;
}

Outcome cmd_geodesic(const ExperimentConfig& cfg) {
  const USCSpec spec = load_spec(cfg);
  const PointArg x = parse_point(cfg.x.empty() ? "0,0" : cfg.x);
  const PointArg y = parse_point(cfg.y.empty() ? "1,0" : cfg.y);
  if (x.is_word || y.is_word) throw InputError("geodesic points must be given as 'x,y'");
  const GeodesicEstimate g = geodesic_estimate(spec, cfg.level, x.point, y.point);
  const ComparabilityConstant c = comparability_constant(spec);
  Outcome o;
  o.result = {{"level", g.level},
              {"x", {x.point.x.to_string(), x.point.y.to_string()}},
              {"y", {y.point.x.to_string(), y.point.y.to_string()}},
              {"lower", g.lower},
              {"upper", g.upper},
              {"comparability", {{"c_prime", c.c_prime}, {"c0", c.c0}, {"c", c.c}}}};
  return o;
}

Outcome cmd_equicont(const ExperimentConfig& cfg, bool level_given) {
  const FamilySpec fam = load_family(cfg);
  const int m = level_given ? cfg.level : 2;
  const EquicontinuityReport r = equicontinuity_diagnostic(fam, m, cfg.threshold);
  Outcome o;
  json seqs = json::array();
  o.table.header = {"i", "j", "contact_x", "contact_y", "trend", "first", "last"};
  for (const auto& s : r.sequences) {
    seqs.push_back({{"i", s.i},
                    {"j", s.j},
                    {"contact", {s.contact.x, s.contact.y}},
                    {"x", {s.x.x, s.x.y}},
                    {"y", {s.y.x, s.y.y}},
                    {"values", s.values},
                    {"trend", s.trend}});
    o.table.rows.push_back({std::to_string(s.i), std::to_string(s.j), num(s.contact.x), num(s.contact.y), s.trend,
                            num(s.values.front()), num(s.values.back())});
  }
  o.result = {{"level", r.level},
              {"threshold", r.threshold},
              {"spacing", r.spacing},
              {"members", r.members},
              {"hausdorff_hi", r.hausdorff_hi},
              {"sequences", seqs},
              {"all_to_zero", r.all_to_zero},
              {"any_bounded_below", r.any_bounded_below},
              {"equicontinuous", r.all_to_zero && !r.any_bounded_below}};
  return o;
}

/// Nearest-sample lookup for functions given as CSV rows x,y,value.
std::function<double(const PointD&)> csv_function(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  std::vector<std::pair<PointD, double>> samples;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double x = 0, y = 0, v = 0;
    if (!(ls >> x >> y >> v)) continue;
    samples.push_back({{x, y}, v});
  }
  if (samples.empty()) throw InputError("no samples in '" + path + "'");
  return [samples](const PointD& p) {
    double best = std::numeric_limits<double>::infinity(), value = 0.0;
    for (const auto& s : samples) {
      const double d = distance(p, s.first);
      if (d < best) {
        best = d;
        value = s.second;
      }
    }
    return value;
  };
}

Outcome cmd_besov(const ExperimentConfig& cfg) {
  const USCSpec spec = load_spec(cfg);
  const RenormEstimate e = estimate_renorm(spec, std::max(2, cfg.level), cfg.conductance());
  const double sigma_r = 0.5 - std::log(e.r_hat) / (2.0 * std::log(static_cast<double>(spec.k)));
  Outcome o;
  o.result = {{"r_hat", e.r_hat}, {"sigma_r", sigma_r}, {"d_w", e.d_w}, {"depth", cfg.depth}};
  if (!cfg.function_csv.empty()) {
    o.result["boundary_seminorm"] =
        besov_boundary_seminorm(csv_function(cfg.function_csv), spec, 0, e.r_hat, cfg.depth);
  }
  std::vector<double> sigmas;
  if (cfg.sigma == "auto") {
    for (int i = -4; i <= 4; ++i) sigmas.push_back(e.d_w / 2.0 + 0.125 * i);
  } else {
    std::stringstream ss(cfg.sigma);
    std::string item;
    while (std::getline(ss, item, ',')) sigmas.push_back(std::stod(item));
  }
  std::vector<int> levels;
  for (int n = 2; n <= cfg.level; ++n) levels.push_back(n);
  if (levels.size() >= 2) {
    const SigmaScan scan = critical_sigma_scan(spec, levels, sigmas, 1.5, cfg.conductance());
    json rows = json::array();
    o.table.header = {"sigma"};
    for (int n : levels) o.table.header.push_back("level_" + std::to_string(n));
    o.table.header.push_back("growth");
    o.table.header.push_back("verdict");
    for (const auto& r : scan.rows) {
      rows.push_back({{"sigma", r.sigma}, {"values", r.values}, {"growth", r.growth}, {"verdict", r.verdict}});
      std::vector<std::string> line{num(r.sigma)};
      for (double v : r.values) line.push_back(num(v));
      line.push_back(num(r.growth));
      line.push_back(r.verdict);
      o.table.rows.push_back(line);
    }
    o.result["scan"] = {{"levels", scan.levels},
                        {"rows", rows},
                        {"half_walk_dimension", scan.half_walk_dimension},
                        {"bracket", {optional_number(scan.bracket_lo), optional_number(scan.bracket_hi)}}};
  } else {
    o.result["scan"] = nullptr;
    o.result["note"] = "sigma scan needs level >= 3";
  }
  return o;
}

Outcome cmd_family_sweep(const ExperimentConfig& cfg) {
  const FamilySpec fam = load_family(cfg);
  const MeasureReport meas = measure_convergence(fam, cfg.m, builtin_test_functions());
  const ResistanceConvergenceReport res = resistance_convergence(fam, cfg.level);
  Outcome o;
  json members = json::array();
  for (const auto& m : fam.members) {
    members.push_back({{"index", m.index}, {"parameter", m.parameter.to_string()}, {"valid", m.valid}, {"note", m.note}});
  }
  json rows = json::array();
  o.table.header = {"index", "parameter", "hausdorff_lo", "hausdorff_hi", "r_hat", "deviation"};
  for (const auto& f : meas.functions) o.table.header.push_back("measure_" + f);
  for (std::size_t i = 0; i < res.rows.size(); ++i) {
    const auto& r = res.rows[i];
    rows.push_back({{"index", r.index},
                    {"parameter", r.parameter.to_string()},
                    {"hausdorff", {r.hausdorff_lo, r.hausdorff_hi}},
                    {"r_hat", r.r_hat},
                    {"resistance_deviation", r.deviation},
                    {"measure_discrepancy", meas.rows[i].discrepancy}});
    std::vector<std::string> line{std::to_string(r.index), r.parameter.to_string(), num(r.hausdorff_lo),
                                  num(r.hausdorff_hi), num(r.r_hat), num(r.deviation)};
    for (double d : meas.rows[i].discrepancy) line.push_back(num(d));
    o.table.rows.push_back(line);
  }
  std::vector<std::string> points;
  for (const auto& w : res.points) points.push_back(word_to_string(w));
  o.result = {{"generator", fam.generator},
              {"params", fam.params},
              {"limit_parameter", fam.limit_parameter.to_string()},
              {"members", members},
              {"level", res.level},
              {"m", meas.m},
              {"limit_r_hat", res.limit_r_hat},
              {"grid_points", points},
              {"pairs", res.pairs},
              {"rows", rows},
              {"measure_functions", meas.functions},
              {"measure_oscillation", meas.oscillation},
              {"measure_monotone", meas.monotone},
              {"resistance_ratio", optional_number(res.ratio)},
              {"resistance_trend", res.trend},
              {"note", res.note}};
  return o;
}

Outcome cmd_walk(const ExperimentConfig& cfg) {
  const USCSpec spec = load_spec(cfg);
  const auto levels = cfg.level_list();
  const CrossingReport r = simulate_crossings(spec, levels, cfg.walks, cfg.seed, cfg.conductance());
  Outcome o;
  json rows = json::array();
  o.table.header = {"level", "walks", "mean_steps", "std_error", "time_step", "scaled_time"};
  for (const auto& l : r.levels) {
    rows.push_back({{"level", l.level},
                    {"mean_steps", l.stats.mean},
                    {"std_error", l.stats.std_error},
                    {"max_steps", l.stats.max_steps},
                    {"time_step", l.time_step},
                    {"scaled_time", l.scaled_time}});
    o.table.rows.push_back({std::to_string(l.level), std::to_string(l.stats.walks), num(l.stats.mean),
                            num(l.stats.std_error), num(l.time_step), num(l.scaled_time)});
  }
  o.result = {{"seed", r.seed},
              {"walks", r.walks},
              {"levels", rows},
              {"d_w_steps", r.d_w_steps},
              {"exponents",
               {{"d_h", r.d_h},
                {"theta_hat", r.theta_hat},
                {"d_w_theta", r.d_w_theta},
                {"d_w_crossing", r.d_w_hat},
                {"d_w_crossing_std_error", r.d_w_std_error},
                {"relative_gap", r.relative_gap}}}};
  if (cfg.heat) {
    const int top = *std::max_element(levels.begin(), levels.end());
    const CellNetwork net = build_cell_network(spec, top, cfg.conductance());
    const HeatKernelReport h = heat_kernel_diag(net, MeasureKind::weighted, geometric_times(1000));
    json hrows = json::array();
    for (const auto& row : h.rows) hrows.push_back({row.t, row.value});
    o.result["heat_kernel"] = {{"level", top},
                               {"rows", hrows},
                               {"slope", optional_number(h.slope)},
                               {"target_slope", -r.d_h / r.d_w_theta},
                               {"fit_points", h.fit_points},
                               {"note", h.note}};
    o.result["exponents"]["d_w_return"] = optional_number(h.d_w_return);
  }
  return o;
}

Outcome cmd_resolvent(const ExperimentConfig& cfg) {
  Outcome o;
  if (!cfg.family.empty()) {
    const FamilySpec fam = load_family(cfg);
    const ResolventConvergenceReport r = resolvent_convergence(fam, cfg.level, cfg.alpha);
    json rows = json::array();
    o.table.header = {"index", "parameter", "deviation"};
    for (const auto& row : r.rows) {
      rows.push_back({{"index", row.index}, {"parameter", row.parameter.to_string()}, {"deviation", row.deviation}});
      o.table.rows.push_back({std::to_string(row.index), row.parameter.to_string(), num(row.deviation)});
    }
    o.result = {{"level", r.level},
                {"alpha", r.alpha},
                {"rows", rows},
                {"ratio", optional_number(r.ratio)},
                {"trend", r.trend}};
    return o;
  }
  const USCSpec spec = load_spec(cfg);
  CellNetwork net = build_cell_network(spec, cfg.level, cfg.conductance());
  net.normalization = side_resistance(net);
  const std::size_t x = resolve_cell(net.grid, parse_point(cfg.x.empty() ? "0,0" : cfg.x));
  const MeasureKind measure = parse_measure(cfg.measure);
  const Resolvent res(net.graph, vertex_measure(net.graph, measure), cfg.alpha, net.normalization);
  const auto u = res.kernel(x);
  std::vector<double> terms(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) terms[i] = u[i] * res.mass()[i];
  const double identity = std::abs(cfg.alpha * pairwise_sum(terms) - 1.0);
  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<std::size_t> pick(0, u.size() - 1);
  double asym = 0.0;
  for (std::size_t s = 0; s < std::min<std::size_t>(cfg.samples, 10); ++s) {
    const std::size_t a = pick(rng), b = pick(rng);
    asym = std::max(asym, std::abs(res.kernel(a)[b] - res.kernel(b)[a]));
  }
  o.table.header = {"cell", "u"};
  for (std::size_t i = 0; i < u.size(); ++i) o.table.rows.push_back({word_to_string(net.grid.word(i)), num(u[i])});
  o.result = {{"level", cfg.level},
              {"alpha", cfg.alpha},
              {"measure", measure_name(measure)},
              {"x_cell", word_to_string(net.grid.word(x))},
              {"u_xx", u[x]},
              {"identity_error", identity},
              {"max_asymmetry", asym}};
  return o;
}

Outcome cmd_report(const ExperimentConfig& cfg) {
  const USCSpec spec = load_spec(cfg);
  const ValidationReport v = validate_usc(spec);
  Outcome o;
  o.result = {{"spec", spec_to_json(spec)}, {"validation", validation_json(v)}};
  if (!v.valid()) {
    o.exit_code = 1;
    return o;
  }
  const RenormEstimate e = estimate_renorm(spec, std::max(2, cfg.level), cfg.conductance());
  o.result["renorm"] = renorm_json(e);
  const GeodesicEstimate g =
      geodesic_estimate(spec, 1, Point{Rational(0), Rational(0)}, Point{Rational(1), Rational(0)});
  o.result["geodesic_q1_q2"] = {{"lower", g.lower}, {"upper", g.upper}};
  const ComparabilityConstant c = comparability_constant(spec);
  o.result["comparability"] = {{"c_prime", c.c_prime}, {"c0", c.c0}, {"c", c.c}};
  return o;
}

void print_summary(std::ostream& out, const json& j, const std::string& prefix = "") {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it->is_object()) {
      print_summary(out, *it, prefix + it.key() + ".");
    } else if (!it->is_array() || it->size() <= 8) {
      out << prefix << it.key() << ": " << it->dump() << '\n';
    }
  }
}

void add_common(CLI::App* app, ExperimentConfig& c) {
  app->add_option("--spec", c.spec_path, "carpet spec file");
  app->add_option("--family", c.family, "family generator (kz)");
  app->add_option("--params", c.params, "family parameters, EXPR:n=a..b");
  app->add_option("--level", c.level, "refinement level");
  app->add_option("--levels", c.levels, "levels a..b or a,b,c (renorm: top level)");
  app->add_option("--scheme", c.scheme, "conductance scheme: overlap or uniform");
  app->add_option("--point-contact", c.point_contact, "conductance of point contacts");
  app->add_option("--seed", c.seed, "random seed");
  app->add_option("--walks", c.walks, "walks per level");
  app->add_option("--samples", c.samples, "random samples");
  app->add_option("--alpha", c.alpha, "resolvent parameter");
  app->add_option("--measure", c.measure, "uniform or weighted");
  app->add_option("--x", c.x, "point x,y or w:WORD");
  app->add_option("--y", c.y, "point x,y or w:WORD");
  app->add_option("--sigma", c.sigma, "auto or comma-separated list");
  app->add_option("--depth", c.depth, "dyadic truncation depth M");
  app->add_option("--m", c.m, "measure-convergence level");
  app->add_option("--threshold", c.threshold, "equicontinuity threshold (default 1/k^2)");
  app->add_option("--function", c.function_csv, "CSV of x,y,value samples");
  app->add_flag("--extrapolate", c.extrapolate, "report extrapolated ratio");
  app->add_flag("--heat", c.heat, "add the heat-kernel fit");
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  ExperimentConfig cfg;
  for (std::size_t i = 0; i + 1 < args.size(); ++i) {
    if (args[i] == "--config") {
      try {
        cfg = ExperimentConfig::from_json(json::parse(read_file(args[i + 1])));
      } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
      }
    }
  }
  CLI::App app{"carpet: unconstrained Sierpinski carpet experiments"};
  app.require_subcommand(1);
  bool as_json = false;
  int workers = 0;
  std::string config_path;
  app.add_option("--config", config_path, "JSON config; flags override it");
  app.add_flag("--json", as_json, "print JSON to stdout");
  app.add_option("--workers", workers, "worker threads (0 = hardware)");
  app.add_option("--out", cfg.out, "output file (.json, .csv, .svg)");
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"validate", "check the four carpet conditions"},
      {"render", "SVG of the level-n squares"},
      {"network", "cell network summary"},
      {"renorm", "renormalization factor estimates"},
      {"metric", "normalized resistance metric"},
      {"geodesic", "skeleton geodesic bounds"},
      {"equicont", "geodesic equicontinuity diagnostic for a family"},
      {"besov", "Besov semi-norms and the critical exponent scan"},
      {"family-sweep", "Hausdorff, measure and resistance convergence"},
      {"walk", "random-walk crossing times and walk dimension"},
      {"resolvent", "resolvent kernels and their convergence"},
      {"report", "validation, renormalization and geodesic summary"}};
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    add_common(sub, cfg);
    sub->add_option("--out", cfg.out, "output file (.json, .csv, .svg)");
    sub->add_flag("--json", as_json, "print JSON to stdout");
    sub->add_option("--workers", workers, "worker threads (0 = hardware)");
    sub->add_option("--config", config_path, "JSON config; flags override it");
    subs[name] = sub;
  }
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  }
  std::string command;
  for (const auto& [name, sub] : subs) {
    if (sub->parsed()) command = name;
  }
  cfg.command = command;
  if (workers > 0) set_worker_count(workers);

  Outcome o;
  try {
    if (command == "validate") o = cmd_validate(cfg);
    else if (command == "render") o = cmd_render(cfg);
    else if (command == "network") o = cmd_network(cfg);
    else if (command == "renorm") o = cmd_renorm(cfg);
    else if (command == "metric") o = cmd_metric(cfg);
    else if (command == "geodesic") o = cmd_geodesic(cfg);
    else if (command == "equicont") o = cmd_equicont(cfg, subs[command]->count("--level") > 0);
    else if (command == "besov") o = cmd_besov(cfg);
    else if (command == "family-sweep") o = cmd_family_sweep(cfg);
    else if (command == "walk") o = cmd_walk(cfg);
    else if (command == "resolvent") o = cmd_resolvent(cfg);
    else o = cmd_report(cfg);

    const json doc = {{"command", command}, {"version", version()}, {"config", cfg.to_json()}, {"result", o.result}};
    if (!cfg.out.empty()) {
      if (ends_with(cfg.out, ".csv")) {
        if (o.table.header.empty()) throw InputError("command '" + command + "' has no CSV form");
        write_file(cfg.out, o.table.csv());
      } else if (ends_with(cfg.out, ".svg")) {
        if (o.svg.empty()) throw InputError("command '" + command + "' has no SVG form");
        write_file(cfg.out, o.svg);
      } else {
        write_file(cfg.out, doc.dump(2) + "\n");
      }
    } else if (!o.svg.empty() && !as_json) {
      out << o.svg;
      return o.exit_code;
    }
    if (as_json) {
      out << doc.dump(2) << '\n';
    } else {
      out << command << " (carpet " << version() << ")\n";
      print_summary(out, o.result);
    }
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return o.exit_code;
}

int run_command(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_command(args, std::cout, std::cerr);
}

}  // namespace usc
