#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"

#include "lpval/harness.hpp"

namespace lpval {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Config model
// ---------------------------------------------------------------------------

struct NamedQuadruple {
  std::string name;
  GeneratorQuadruple quadruple;
};

struct PartitionSpec {
  std::string name;
  std::vector<double> measures;
  bool infinite_total = false;
};

struct BoxGridSpec {
  std::string name;
  int dimension = 1;
  std::vector<std::array<double, 2>> bounds;
  std::vector<std::size_t> resolution;
  std::size_t support_margin = 1;
};

struct SphereSpec {
  std::string name;
  int dimension = 3;
  std::size_t order = 8;
};

using DomainSpec = std::variant<PartitionSpec, BoxGridSpec, SphereSpec>;

inline const std::string& domain_name(const DomainSpec& spec) {
  return std::visit([](const auto& s) -> const std::string& { return s.name; }, spec);
}

struct OutputSpec {
  std::string directory = ".";
  std::string json_file = "report.json";
  std::string csv_file = "report.csv";
};

/// A fully validated run configuration: generator quadruples, domains, and
/// the scenario list with every default materialized.
struct RunConfig {
  std::vector<NamedQuadruple> quadruples;
  std::vector<DomainSpec> domains;
  std::vector<Scenario> scenarios;
  OutputSpec output;
};

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace cfg_detail {

[[noreturn]] inline void fail(const std::string& path, const std::string& message) {
  throw ParseError(path + ": " + message);
}

inline void require_keys(const json& obj, const std::string& path,
                         const std::set<std::string>& allowed,
                         const std::set<std::string>& required) {
  if (!obj.is_object()) fail(path, "expected an object");
  for (const auto& item : obj.items()) {
    if (!allowed.contains(item.key())) fail(path, "unknown key '" + item.key() + "'");
  }
  for (const auto& key : required) {
    if (!obj.contains(key)) fail(path, "missing required key '" + key + "'");
  }
}

inline double get_number(const json& obj, const std::string& path,
                         const std::string& key) {
  if (!obj.at(key).is_number()) fail(path + "." + key, "expected a number");
  return obj.at(key).get<double>();
}

inline double get_number_or(const json& obj, const std::string& path,
                            const std::string& key, double fallback) {
  return obj.contains(key) ? get_number(obj, path, key) : fallback;
}

inline std::string get_string(const json& obj, const std::string& path,
                              const std::string& key) {
  if (!obj.at(key).is_string()) fail(path + "." + key, "expected a string");
  return obj.at(key).get<std::string>();
}

inline bool get_bool_or(const json& obj, const std::string& path,
                        const std::string& key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_boolean()) fail(path + "." + key, "expected a boolean");
  return obj.at(key).get<bool>();
}

inline Generator parse_generator(const json& obj, const std::string& path) {
  require_keys(obj, path,
               {"family", "params", "p", "gamma", "delta", "claims_zero_at_zero"},
               {"family", "params", "p", "gamma", "delta"});
  const std::string family = get_string(obj, path, "family");
  const Envelope env{get_number(obj, path, "p"), get_number(obj, path, "gamma"),
                     get_number(obj, path, "delta")};
  std::optional<bool> claims;
  if (obj.contains("claims_zero_at_zero")) {
    claims = get_bool_or(obj, path, "claims_zero_at_zero", false);
  }
  const json& params = obj.at("params");
  const std::string ppath = path + ".params";
  try {
    if (family == "power") {
      require_keys(params, ppath, {"s", "q", "e"}, {"s", "q", "e"});
      const double e = get_number(params, ppath, "e");
      if (e != 0.0 && e != 1.0) fail(ppath + ".e", "must be 0 or 1");
      return Generator::power(get_number(params, ppath, "s"),
                              get_number(params, ppath, "q"),
                              static_cast<int>(e), env, claims);
    }
    if (family == "polynomial") {
      require_keys(params, ppath, {"coefficients"}, {"coefficients"});
      if (!params.at("coefficients").is_array()) {
        fail(ppath + ".coefficients", "expected an array of numbers");
      }
      std::vector<double> coeffs;
      for (const auto& c : params.at("coefficients")) {
        if (!c.is_number()) fail(ppath + ".coefficients", "expected numbers");
        coeffs.push_back(c.get<double>());
      }
      return Generator::polynomial(std::move(coeffs), env, claims);
    }
    if (family == "sine") {
      require_keys(params, ppath, {"s", "w"}, {"s", "w"});
      return Generator::sine(get_number(params, ppath, "s"),
                             get_number(params, ppath, "w"), env, claims);
    }
    if (family == "affine_const") {
      require_keys(params, ppath, {"c"}, {"c"});
      return Generator::affine_const(get_number(params, ppath, "c"), env);
    }
    if (family == "piecewise_linear") {
      require_keys(params, ppath, {"points"}, {"points"});
      if (!params.at("points").is_array()) {
        fail(ppath + ".points", "expected an array of [x, y] pairs");
      }
      std::vector<std::array<double, 2>> points;
      for (const auto& pt : params.at("points")) {
        if (!pt.is_array() || pt.size() != 2 || !pt[0].is_number() ||
            !pt[1].is_number()) {
          fail(ppath + ".points", "expected [x, y] pairs");
        }
        points.push_back({pt[0].get<double>(), pt[1].get<double>()});
      }
      return Generator::piecewise_linear(std::move(points), env, claims);
    }
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  fail(path + ".family", "unknown family '" + family + "'");
}

inline std::set<std::string> scenario_allowed_keys(ScenarioKind kind) {
  std::set<std::string> keys{"id", "kind", "seed", "tolerance"};
  switch (kind) {
    case ScenarioKind::valuation_law:
    case ScenarioKind::oracle_equivalence:
    case ScenarioKind::lemma_3_2:
    case ScenarioKind::lemma_3_3:
    case ScenarioKind::lemma_3_4:
    case ScenarioKind::eq_3_8:
      keys.insert({"quadruple", "domain", "trials", "value_range"});
      break;
    case ScenarioKind::characteristic_formula:
      keys.insert({"quadruple", "trials", "value_range"});
      break;
    case ScenarioKind::translation_invariance:
    case ScenarioKind::rotation_invariance:
      keys.insert({"quadruple", "domain", "trials", "value_range", "resample"});
      break;
    case ScenarioKind::continuity:
      keys.insert({"quadruple", "domain", "steps", "rule", "value_range"});
      break;
    case ScenarioKind::refinement_invariance:
      keys.insert({"quadruple", "domain", "base_kind", "trials", "value_range",
                   "steps", "rule"});
      break;
    case ScenarioKind::necessity_growth:
      keys.insert({"p", "steps", "arm"});
      break;
    case ScenarioKind::necessity_delta_infinite:
      break;
  }
  return keys;
}

inline bool kind_needs_quadruple(ScenarioKind kind) {
  return kind != ScenarioKind::necessity_growth &&
         kind != ScenarioKind::necessity_delta_infinite;
}

inline bool kind_needs_domain(ScenarioKind kind) {
  return kind_needs_quadruple(kind) && kind != ScenarioKind::characteristic_formula;
}

inline Scenario parse_scenario(const json& obj, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  for (const char* key : {"id", "kind"}) {
    if (!obj.contains(key)) fail(path, std::string("missing required key '") + key + "'");
  }
  Scenario sc;
  sc.id = get_string(obj, path, "id");
  const std::string kind_name = get_string(obj, path, "kind");
  const auto kind = kind_from_string(kind_name);
  if (!kind) fail(path + ".kind", "unknown scenario kind '" + kind_name + "'");
  sc.kind = *kind;

  require_keys(obj, path, scenario_allowed_keys(sc.kind),
               [&] {
                 std::set<std::string> req{"id", "kind"};
                 if (kind_needs_quadruple(sc.kind)) req.insert("quadruple");
                 if (kind_needs_domain(sc.kind)) req.insert("domain");
                 if (sc.kind == ScenarioKind::refinement_invariance) {
                   req.insert("base_kind");
                 }
                 return req;
               }());

  sc.seed = static_cast<std::uint64_t>(get_number_or(obj, path, "seed", 0.0));
  sc.trials = static_cast<std::uint64_t>(get_number_or(obj, path, "trials", 200.0));
  sc.value_range = get_number_or(obj, path, "value_range", 5.0);
  sc.resample = get_bool_or(obj, path, "resample", false);
  sc.tolerance = get_number_or(obj, path, "tolerance",
                               default_tolerance(sc.kind, sc.resample));
  const int default_steps = sc.kind == ScenarioKind::necessity_growth ? 20 : 30;
  sc.steps = static_cast<int>(
      get_number_or(obj, path, "steps", static_cast<double>(default_steps)));
  if (obj.contains("rule")) sc.rule = get_string(obj, path, "rule");
  sc.growth_p = get_number_or(obj, path, "p", 2.0);
  if (obj.contains("arm")) {
    const std::string arm = get_string(obj, path, "arm");
    if (arm != "violating" && arm != "control") {
      fail(path + ".arm", "must be 'violating' or 'control'");
    }
    sc.control_arm = (arm == "control");
  }
  if (obj.contains("base_kind")) {
    const std::string base = get_string(obj, path, "base_kind");
    const auto base_kind = kind_from_string(base);
    if (!base_kind) fail(path + ".base_kind", "unknown scenario kind '" + base + "'");
    sc.base_kind = *base_kind;
  }
  if (obj.contains("quadruple")) sc.quadruple_name = get_string(obj, path, "quadruple");
  if (obj.contains("domain")) sc.domain_name = get_string(obj, path, "domain");
  return sc;
}

inline DomainSpec parse_domain(const json& obj, const std::string& path) {
  require_keys(obj, path,
               {"name", "type", "measures", "infinite_total", "dimension", "bounds",
                "resolution", "support_margin", "order"},
               {"name", "type"});
  const std::string name = get_string(obj, path, "name");
  const std::string type = get_string(obj, path, "type");
  if (type == "partition") {
    require_keys(obj, path, {"name", "type", "measures", "infinite_total"},
                 {"name", "type", "measures"});
    PartitionSpec spec;
    spec.name = name;
    if (!obj.at("measures").is_array()) fail(path + ".measures", "expected an array");
    for (const auto& m : obj.at("measures")) {
      if (!m.is_number()) fail(path + ".measures", "expected numbers");
      spec.measures.push_back(m.get<double>());
    }
    spec.infinite_total = get_bool_or(obj, path, "infinite_total", false);
    try {
      (void)make_partition(spec.measures, spec.infinite_total);
    } catch (const Error& e) {
      throw ConfigError(path + ": " + e.what());
    }
    return spec;
  }
  if (type == "box_grid") {
    require_keys(obj, path,
                 {"name", "type", "dimension", "bounds", "resolution",
                  "support_margin"},
                 {"name", "type", "dimension", "bounds", "resolution"});
    BoxGridSpec spec;
    spec.name = name;
    spec.dimension = static_cast<int>(get_number(obj, path, "dimension"));
    if (!obj.at("bounds").is_array()) fail(path + ".bounds", "expected an array");
    for (const auto& b : obj.at("bounds")) {
      if (!b.is_array() || b.size() != 2 || !b[0].is_number() || !b[1].is_number()) {
        fail(path + ".bounds", "expected [lo, hi] pairs");
      }
      spec.bounds.push_back({b[0].get<double>(), b[1].get<double>()});
    }
    if (!obj.at("resolution").is_array()) {
      fail(path + ".resolution", "expected an array");
    }
    for (const auto& r : obj.at("resolution")) {
      if (!r.is_number()) fail(path + ".resolution", "expected numbers");
      spec.resolution.push_back(static_cast<std::size_t>(r.get<double>()));
    }
    spec.support_margin = static_cast<std::size_t>(
        get_number_or(obj, path, "support_margin", 1.0));
    try {
      (void)make_box_grid(spec.dimension, spec.bounds, spec.resolution,
                          spec.support_margin);
    } catch (const Error& e) {
      throw ConfigError(path + ": " + e.what());
    }
    return spec;
  }
  if (type == "sphere") {
    require_keys(obj, path, {"name", "type", "dimension", "order"},
                 {"name", "type", "dimension", "order"});
    SphereSpec spec;
    spec.name = name;
    spec.dimension = static_cast<int>(get_number(obj, path, "dimension"));
    spec.order = static_cast<std::size_t>(get_number(obj, path, "order"));
    try {
      (void)make_sphere_grid(spec.dimension, spec.order);
    } catch (const Error& e) {
      throw ConfigError(path + ": " + e.what());
    }
    return spec;
  }
  fail(path + ".type", "unknown domain type '" + type + "'");
}

inline bool domain_is_infinite_measure(const DomainSpec& spec) {
  if (const auto* p = std::get_if<PartitionSpec>(&spec)) return p->infinite_total;
  return std::holds_alternative<BoxGridSpec>(spec);  // box grids live on all of R^n
}

/// Cross-cutting consistency rules between scenarios, quadruples and domains.
inline void validate_config(const RunConfig& config) {
  std::map<std::string, const GeneratorQuadruple*> quadruples;
  for (const auto& q : config.quadruples) {
    if (!quadruples.emplace(q.name, &q.quadruple).second) {
      throw ConfigError("duplicate quadruple name '" + q.name + "'");
    }
  }
  std::map<std::string, const DomainSpec*> domains;
  for (const auto& d : config.domains) {
    if (!domains.emplace(domain_name(d), &d).second) {
      throw ConfigError("duplicate domain name '" + domain_name(d) + "'");
    }
  }
  std::set<std::string> ids;
  for (const auto& sc : config.scenarios) {
    if (!ids.insert(sc.id).second) {
      throw ConfigError("duplicate scenario id '" + sc.id + "'");
    }
    const GeneratorQuadruple* quad = nullptr;
    if (kind_needs_quadruple(sc.kind)) {
      auto it = quadruples.find(sc.quadruple_name);
      if (it == quadruples.end()) {
        throw ConfigError("scenario '" + sc.id + "' references unknown quadruple '" +
                          sc.quadruple_name + "'");
      }
      quad = it->second;
    }
    if (!kind_needs_domain(sc.kind)) continue;
    auto it = domains.find(sc.domain_name);
    if (it == domains.end()) {
      throw ConfigError("scenario '" + sc.id + "' references unknown domain '" +
                        sc.domain_name + "'");
    }
    const DomainSpec& dom = *it->second;

    const bool wants_box = sc.kind == ScenarioKind::translation_invariance;
    const bool wants_sphere = sc.kind == ScenarioKind::rotation_invariance;
    if (wants_box && !std::holds_alternative<BoxGridSpec>(dom)) {
      throw ConfigError("scenario '" + sc.id + "' needs a box_grid domain");
    }
    if (wants_sphere && !std::holds_alternative<SphereSpec>(dom)) {
      throw ConfigError("scenario '" + sc.id + "' needs a sphere domain");
    }
    if (!wants_box && !wants_sphere && !std::holds_alternative<PartitionSpec>(dom)) {
      throw ConfigError("scenario '" + sc.id + "' needs a partition domain");
    }

    const std::array<const Generator*, 4> parts{&quad->h1(), &quad->h2(), &quad->h3(),
                                                &quad->h4()};
    if (std::holds_alternative<SphereSpec>(dom)) {
      for (const Generator* h : parts) {
        if (!check_zero(*h)) {
          throw ConfigError("scenario '" + sc.id +
                            "': spherical domains require h(0) = 0 for every "
                            "generator of quadruple '" +
                            sc.quadruple_name + "'");
        }
      }
    }
    if (domain_is_infinite_measure(dom)) {
      for (const Generator* h : parts) {
        if (h->envelope().delta > 0.0) {
          throw ConfigError("scenario '" + sc.id + "': quadruple '" +
                            sc.quadruple_name +
                            "' declares delta > 0 on an infinite-measure domain "
                            "(delta_k = 0 if mu(X) = infinity)");
        }
      }
    }
  }
}

}  // namespace cfg_detail

/// Parse and fully validate a configuration document. Unknown keys are
/// errors; defaults (trials 200, tolerance 1e-12 exact / 1e-3 resampled,
/// value_range 5) are materialized into the result.
inline RunConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  cfg_detail::require_keys(doc, "$", {"quadruples", "domains", "scenarios", "output"},
                           {"scenarios"});
  RunConfig config;
  if (doc.contains("quadruples")) {
    if (!doc.at("quadruples").is_array()) {
      cfg_detail::fail("$.quadruples", "expected an array");
    }
    std::size_t index = 0;
    for (const auto& entry : doc.at("quadruples")) {
      const std::string path = "$.quadruples[" + std::to_string(index++) + "]";
      cfg_detail::require_keys(entry, path, {"name", "h1", "h2", "h3", "h4"},
                               {"name", "h1", "h2", "h3", "h4"});
      Generator h1 = cfg_detail::parse_generator(entry.at("h1"), path + ".h1");
      Generator h2 = cfg_detail::parse_generator(entry.at("h2"), path + ".h2");
      Generator h3 = cfg_detail::parse_generator(entry.at("h3"), path + ".h3");
      Generator h4 = cfg_detail::parse_generator(entry.at("h4"), path + ".h4");
      try {
        config.quadruples.push_back(
            {cfg_detail::get_string(entry, path, "name"),
             GeneratorQuadruple(std::move(h1), std::move(h2), std::move(h3),
                                std::move(h4))});
      } catch (const Error& e) {
        throw ConfigError(path + ": " + e.what());
      }
    }
  }
  if (doc.contains("domains")) {
    if (!doc.at("domains").is_array()) cfg_detail::fail("$.domains", "expected an array");
    std::size_t index = 0;
    for (const auto& entry : doc.at("domains")) {
      const std::string path = "$.domains[" + std::to_string(index++) + "]";
      config.domains.push_back(cfg_detail::parse_domain(entry, path));
    }
  }
  if (!doc.at("scenarios").is_array()) {
    cfg_detail::fail("$.scenarios", "expected an array");
  }
  {
    std::size_t index = 0;
    for (const auto& entry : doc.at("scenarios")) {
      const std::string path = "$.scenarios[" + std::to_string(index++) + "]";
      config.scenarios.push_back(cfg_detail::parse_scenario(entry, path));
    }
  }
  if (doc.contains("output")) {
    const json& out = doc.at("output");
    cfg_detail::require_keys(out, "$.output", {"directory", "json", "csv"}, {});
    if (out.contains("directory")) {
      config.output.directory = cfg_detail::get_string(out, "$.output", "directory");
    }
    if (out.contains("json")) {
      config.output.json_file = cfg_detail::get_string(out, "$.output", "json");
    }
    if (out.contains("csv")) {
      config.output.csv_file = cfg_detail::get_string(out, "$.output", "csv");
    }
  }
  cfg_detail::validate_config(config);
  return config;
}

// ---------------------------------------------------------------------------
// Serialization (defaults materialized; parse(serialize(c)) == c)
// ---------------------------------------------------------------------------

namespace cfg_detail {

inline json generator_to_json(const Generator& h) {
  json params;
  std::string family;
  std::visit(
      [&](const auto& fam) {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, PowerFamily>) {
          family = "power";
          params = {{"s", fam.s}, {"q", fam.q}, {"e", fam.e}};
        } else if constexpr (std::is_same_v<T, PolynomialFamily>) {
          family = "polynomial";
          params = {{"coefficients", fam.coefficients}};
        } else if constexpr (std::is_same_v<T, SineFamily>) {
          family = "sine";
          params = {{"s", fam.s}, {"w", fam.w}};
        } else if constexpr (std::is_same_v<T, AffineConstFamily>) {
          family = "affine_const";
          params = {{"c", fam.c}};
        } else {
          family = "piecewise_linear";
          json pts = json::array();
          for (const auto& pt : fam.points) pts.push_back({pt[0], pt[1]});
          params = {{"points", pts}};
        }
      },
      h.family());
  json out{{"family", family},
           {"params", params},
           {"p", h.envelope().p},
           {"gamma", h.envelope().gamma},
           {"delta", h.envelope().delta}};
  out["claims_zero_at_zero"] = h.claims_zero_at_zero();
  return out;
}

inline json scenario_to_json(const Scenario& sc) {
  json out{{"id", sc.id},
           {"kind", to_string(sc.kind)},
           {"seed", sc.seed},
           {"tolerance", sc.tolerance}};
  const auto allowed = scenario_allowed_keys(sc.kind);
  if (allowed.contains("quadruple")) out["quadruple"] = sc.quadruple_name;
  if (allowed.contains("domain") && kind_needs_domain(sc.kind)) {
    out["domain"] = sc.domain_name;
  }
  if (allowed.contains("trials")) out["trials"] = sc.trials;
  if (allowed.contains("value_range")) out["value_range"] = sc.value_range;
  if (allowed.contains("resample")) out["resample"] = sc.resample;
  if (allowed.contains("steps")) out["steps"] = sc.steps;
  if (allowed.contains("rule") && sc.kind == ScenarioKind::continuity) {
    out["rule"] = sc.rule;
  }
  if (sc.kind == ScenarioKind::refinement_invariance && sc.base_kind) {
    out["base_kind"] = to_string(*sc.base_kind);
    out["rule"] = sc.rule;
  }
  if (sc.kind == ScenarioKind::necessity_growth) {
    out["p"] = sc.growth_p;
    out["arm"] = sc.control_arm ? "control" : "violating";
  }
  return out;
}

inline json domain_to_json(const DomainSpec& spec) {
  return std::visit(
      [](const auto& s) -> json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PartitionSpec>) {
          return {{"name", s.name},
                  {"type", "partition"},
                  {"measures", s.measures},
                  {"infinite_total", s.infinite_total}};
        } else if constexpr (std::is_same_v<T, BoxGridSpec>) {
          json bounds = json::array();
          for (const auto& b : s.bounds) bounds.push_back({b[0], b[1]});
          return {{"name", s.name},
                  {"type", "box_grid"},
                  {"dimension", s.dimension},
                  {"bounds", bounds},
                  {"resolution", s.resolution},
                  {"support_margin", s.support_margin}};
        } else {
          return {{"name", s.name},
                  {"type", "sphere"},
                  {"dimension", s.dimension},
                  {"order", s.order}};
        }
      },
      spec);
}

}  // namespace cfg_detail

inline json config_to_json(const RunConfig& config) {
  json quadruples = json::array();
  for (const auto& q : config.quadruples) {
    quadruples.push_back({{"name", q.name},
                          {"h1", cfg_detail::generator_to_json(q.quadruple.h1())},
                          {"h2", cfg_detail::generator_to_json(q.quadruple.h2())},
                          {"h3", cfg_detail::generator_to_json(q.quadruple.h3())},
                          {"h4", cfg_detail::generator_to_json(q.quadruple.h4())}});
  }
  json domains = json::array();
  for (const auto& d : config.domains) domains.push_back(cfg_detail::domain_to_json(d));
  json scenarios = json::array();
  for (const auto& sc : config.scenarios) {
    scenarios.push_back(cfg_detail::scenario_to_json(sc));
  }
  return {{"quadruples", quadruples},
          {"domains", domains},
          {"scenarios", scenarios},
          {"output",
           {{"directory", config.output.directory},
            {"json", config.output.json_file},
            {"csv", config.output.csv_file}}}};
}

inline std::string serialize(const RunConfig& config) {
  return config_to_json(config).dump(2) + "\n";
}

inline bool operator==(const RunConfig& a, const RunConfig& b) {
  return config_to_json(a) == config_to_json(b);
}

// ---------------------------------------------------------------------------
// Suite orchestration
// ---------------------------------------------------------------------------

struct ScenarioOutcome {
  PropertyReport report;
  double wall_time_seconds = 0.0;
};

/// Per-scenario reports, assembled in scenario-id order.
struct RunSummary {
  std::vector<ScenarioOutcome> outcomes;
  bool overall_pass = false;
};

struct RunOptions {
  unsigned jobs = 1;
  std::optional<std::uint64_t> seed_override;  // reseeds scenario i from N and i
};

inline RunSummary run_suite(const RunConfig& config, const RunOptions& options = {}) {
  std::map<std::string, ValuationFunctional> functionals;
  for (const auto& q : config.quadruples) {
    functionals.emplace(q.name, ValuationFunctional(q.quadruple));
  }
  std::map<std::string, Domain> domains;
  for (const auto& d : config.domains) {
    domains.emplace(
        domain_name(d),
        std::visit(
            [](const auto& spec) -> Domain {
              using T = std::decay_t<decltype(spec)>;
              if constexpr (std::is_same_v<T, PartitionSpec>) {
                return make_partition(spec.measures, spec.infinite_total);
              } else if constexpr (std::is_same_v<T, BoxGridSpec>) {
                return make_box_grid(spec.dimension, spec.bounds, spec.resolution,
                                     spec.support_margin);
              } else {
                return make_sphere_grid(spec.dimension, spec.order);
              }
            },
            d));
  }

  std::vector<ScenarioOutcome> outcomes(config.scenarios.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= config.scenarios.size()) return;
      Scenario sc = config.scenarios[i];
      if (options.seed_override) {
        sc.seed = splitmix64(*options.seed_override + static_cast<std::uint64_t>(i));
      }
      const auto start = std::chrono::steady_clock::now();
      PropertyReport report;
      try {
        std::optional<ValuationFunctional> phi;
        if (auto it = functionals.find(sc.quadruple_name); it != functionals.end()) {
          phi = it->second;
        }
        Domain domain{std::monostate{}};
        if (auto it = domains.find(sc.domain_name); it != domains.end()) {
          domain = it->second;
        }
        report = run_scenario(sc, phi, domain);
      } catch (const std::exception& e) {
        report.scenario_id = sc.id;
        report.kind = sc.kind;
        report.seed = sc.seed;
        report.tolerance = sc.tolerance;
        report.pass = false;
        report.note = std::string("scenario error: ") + e.what();
      }
      const auto stop = std::chrono::steady_clock::now();
      outcomes[i].report = std::move(report);
      outcomes[i].wall_time_seconds =
          std::chrono::duration<double>(stop - start).count();
    }
  };

  const unsigned jobs = std::max(1u, options.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  RunSummary summary;
  summary.outcomes = std::move(outcomes);
  std::sort(summary.outcomes.begin(), summary.outcomes.end(),
            [](const ScenarioOutcome& a, const ScenarioOutcome& b) {
              return a.report.scenario_id < b.report.scenario_id;
            });
  summary.overall_pass = true;
  for (const auto& o : summary.outcomes) {
    summary.overall_pass = summary.overall_pass && o.report.pass;
  }
  return summary;
}

// ---------------------------------------------------------------------------
// Report emission
// ---------------------------------------------------------------------------

/// Shortest round-trip decimal representation (deterministic golden files).
inline std::string format_double(double x) {
  std::array<char, 64> buf{};
  const auto result = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), result.ptr);
}

inline json report_to_json(const ScenarioOutcome& outcome) {
  const PropertyReport& r = outcome.report;
  return {{"scenario_id", r.scenario_id},
          {"kind", to_string(r.kind)},
          {"seed", r.seed},
          {"trials", r.trials},
          {"tolerance", r.tolerance},
          {"max_deviation", r.max_deviation},
          {"pass", r.pass},
          {"witness", r.witness},
          {"curve", r.curve},
          {"note", r.note},
          {"wall_time_seconds", outcome.wall_time_seconds}};
}

inline std::string summary_to_json_text(const RunSummary& summary) {
  json scenarios = json::array();
  for (const auto& o : summary.outcomes) scenarios.push_back(report_to_json(o));
  const json doc{{"overall_pass", summary.overall_pass}, {"scenarios", scenarios}};
  return doc.dump(2) + "\n";
}

/// CSV rows in scenario-id order; the column set and order are fixed.
inline std::string summary_to_csv_text(const RunSummary& summary) {
  std::string out = "scenario_id,kind,trials,max_deviation,tolerance,pass\n";
  for (const auto& o : summary.outcomes) {
    const PropertyReport& r = o.report;
    out += r.scenario_id;
    out += ',';
    out += to_string(r.kind);
    out += ',';
    out += std::to_string(r.trials);
    out += ',';
    out += format_double(r.max_deviation);
    out += ',';
    out += format_double(r.tolerance);
    out += ',';
    out += r.pass ? "true" : "false";
    out += '\n';
  }
  return out;
}

/// Writes the JSON and CSV reports under `directory`, creating it if needed.
inline void write_reports(const RunSummary& summary, const std::string& directory,
                          const std::string& json_file, const std::string& csv_file) {
  namespace fs = std::filesystem;
  const fs::path dir(directory.empty() ? "." : directory);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "'");
  for (const auto& [name, text] :
       {std::pair{json_file, summary_to_json_text(summary)},
        std::pair{csv_file, summary_to_csv_text(summary)}}) {
    const fs::path path = dir / name;
    std::ofstream os(path);
    if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
    os << text;
    if (!os.good()) throw IoError("failed writing '" + path.string() + "'");
  }
}

inline void write_reports(const RunSummary& summary, const OutputSpec& output) {
  write_reports(summary, output.directory, output.json_file, output.csv_file);
}

/// One line per scenario kind, for `list-scenarios`.
inline std::vector<std::pair<std::string, std::string>> scenario_kind_catalog() {
  return {
      {"valuation_law", "Phi(f v g) + Phi(f ^ g) = Phi(f) + Phi(g) on random pairs"},
      {"oracle_equivalence",
       "direct evaluation matches the four-set E/F/G/H reconstruction bitwise"},
      {"characteristic_formula",
       "closed form on c*chi_E agrees with direct evaluation"},
      {"lemma_3_2", "Phi(f) = Phi(Re f) + Phi(i Im f) on complex inputs"},
      {"lemma_3_3", "Phi'(f) = Phi(i f) on real inputs, and Phi' obeys the law"},
      {"lemma_3_4",
       "Phi = Phi_1 + i Phi_2 on real inputs; both parts obey the law"},
      {"eq_3_8", "i (f v g) = (i f) v (i g) and dually for ^, on real inputs"},
      {"translation_invariance",
       "Phi(f(. - t)) = Phi(f) on box grids (exact or resampled shifts)"},
      {"rotation_invariance",
       "Phi(f o theta^-1) = Phi(f) on spheres (exact or resampled rotations)"},
      {"continuity", "Phi(f_k) -> Phi(f) along an L^p-convergent sequence"},
      {"refinement_invariance",
       "a passing simple-function scenario still passes after random cell splits"},
      {"necessity_growth",
       "|Phi| blows up along norm-vanishing witnesses when the growth bound fails"},
      {"necessity_delta_infinite",
       "h(0) != 0 diverges on infinite-measure domains; h(0) = 0 stays finite"},
  };
}

}  // namespace lpval
