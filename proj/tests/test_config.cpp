#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "lpval/config.hpp"

using namespace lpval;

namespace {

std::string zero_gen(const std::string& extra = "") {
  return R"({"family":"power","params":{"s":1.0,"q":2.0,"e":0},"p":2.0,"gamma":1.0,"delta":0.0)" +
         extra + "}";
}

std::string quadruple_json(const std::string& name) {
  std::ostringstream os;
  os << "{\"name\":\"" << name << "\",\"h1\":" << zero_gen()
     << ",\"h2\":" << zero_gen() << ",\"h3\":" << zero_gen()
     << ",\"h4\":" << zero_gen() << "}";
  return os.str();
}

std::string minimal_config() {
  std::ostringstream os;
  os << "{\"quadruples\":[" << quadruple_json("q0") << "],"
     << R"("domains":[{"name":"cells","type":"partition","measures":[0.5,0.25,0.25]}],)"
     << R"("scenarios":[{"id":"law","kind":"valuation_law","quadruple":"q0","domain":"cells","seed":7,"trials":50}]})";
  return os.str();
}

}  // namespace

TEST_CASE("minimal config parses with defaults filled") {
  auto config = parse_config(minimal_config());
  REQUIRE(config.quadruples.size() == 1);
  REQUIRE(config.domains.size() == 1);
  REQUIRE(config.scenarios.size() == 1);
  const Scenario& sc = config.scenarios[0];
  REQUIRE(sc.kind == ScenarioKind::valuation_law);
  REQUIRE(sc.trials == 50);
  REQUIRE(sc.tolerance == 1e-12);
  REQUIRE(sc.value_range == 5.0);
  REQUIRE(config.output.directory == ".");
}

TEST_CASE("unknown keys are parse errors with a field path") {
  auto text = minimal_config();
  text.insert(1, "\"foo\":1,");
  try {
    parse_config(text);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    REQUIRE(std::string(e.what()).find("foo") != std::string::npos);
  }

  // unknown scenario key
  std::string bad = minimal_config();
  bad.replace(bad.find("\"seed\":7"), 8, "\"sead\":7");
  REQUIRE_THROWS_AS(parse_config(bad), ParseError);
}

TEST_CASE("malformed JSON is a parse error") {
  REQUIRE_THROWS_AS(parse_config("{"), ParseError);
  REQUIRE_THROWS_AS(parse_config("[]"), ParseError);
}

TEST_CASE("config round-trips through serialize") {
  auto config = parse_config(minimal_config());
  auto again = parse_config(serialize(config));
  REQUIRE(config == again);
  REQUIRE(serialize(config) == serialize(again));
}

TEST_CASE("sphere domains reject generators with h(0) != 0") {
  std::ostringstream os;
  os << "{\"quadruples\":[{\"name\":\"qc\",\"h1\":"
     << R"({"family":"affine_const","params":{"c":1.0},"p":2.0,"gamma":0.0,"delta":1.0})"
     << ",\"h2\":" << zero_gen() << ",\"h3\":" << zero_gen()
     << ",\"h4\":" << zero_gen() << "}],"
     << R"("domains":[{"name":"sph","type":"sphere","dimension":3,"order":8}],)"
     << R"("scenarios":[{"id":"rot","kind":"rotation_invariance","quadruple":"qc","domain":"sph"}]})";
  try {
    parse_config(os.str());
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    REQUIRE(std::string(e.what()).find("h(0) = 0") != std::string::npos);
  }
}

TEST_CASE("infinite-measure domains reject delta > 0") {
  std::ostringstream os;
  os << "{\"quadruples\":[{\"name\":\"qd\",\"h1\":" << zero_gen(",\"claims_zero_at_zero\":true")
     << ",\"h2\":"
     << R"({"family":"sine","params":{"s":1.0,"w":1.0},"p":2.0,"gamma":1.0,"delta":0.5})"
     << ",\"h3\":" << zero_gen() << ",\"h4\":" << zero_gen() << "}],"
     << R"("domains":[{"name":"inf","type":"partition","measures":[1.0],"infinite_total":true}],)"
     << R"("scenarios":[{"id":"law","kind":"valuation_law","quadruple":"qd","domain":"inf"}]})";
  try {
    parse_config(os.str());
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    REQUIRE(std::string(e.what()).find("delta_k = 0 if mu(X) = infinity") !=
            std::string::npos);
  }
}

TEST_CASE("domain and reference validation") {
  // unknown quadruple reference
  std::string text = minimal_config();
  const std::string ref = "\"quadruple\":\"q0\"";
  text.replace(text.find(ref), ref.size(), "\"quadruple\":\"qX\"");
  REQUIRE_THROWS_AS(parse_config(text), ConfigError);

  // scenario kind and domain type must match
  std::ostringstream os;
  os << "{\"quadruples\":[" << quadruple_json("q0") << "],"
     << R"("domains":[{"name":"sph","type":"sphere","dimension":3,"order":4}],)"
     << R"("scenarios":[{"id":"law","kind":"valuation_law","quadruple":"q0","domain":"sph"}]})";
  REQUIRE_THROWS_AS(parse_config(os.str()), ConfigError);

  // duplicate scenario ids
  std::ostringstream dup;
  dup << "{\"quadruples\":[" << quadruple_json("q0") << "],"
      << R"("domains":[{"name":"cells","type":"partition","measures":[1.0]}],)"
      << R"("scenarios":[)"
      << R"({"id":"a","kind":"valuation_law","quadruple":"q0","domain":"cells"},)"
      << R"({"id":"a","kind":"valuation_law","quadruple":"q0","domain":"cells"}]})";
  REQUIRE_THROWS_AS(parse_config(dup.str()), ConfigError);

  // bad measures surface as config errors with the field path
  std::string zero_measure = minimal_config();
  zero_measure.replace(zero_measure.find("[0.5,0.25,0.25]"), 15, "[0.5,0.0,0.25]");
  REQUIRE_THROWS_AS(parse_config(zero_measure), ConfigError);
}

TEST_CASE("run_suite executes scenarios and aggregates the verdict") {
  auto config = parse_config(minimal_config());
  auto summary = run_suite(config);
  REQUIRE(summary.outcomes.size() == 1);
  REQUIRE(summary.outcomes[0].report.pass);
  REQUIRE(summary.overall_pass);
}

TEST_CASE("suite results are ordered by id and identical across job counts") {
  std::ostringstream os;
  os << "{\"quadruples\":[" << quadruple_json("q0") << "],"
     << R"("domains":[{"name":"cells","type":"partition","measures":[0.4,0.6,1.0]}],)"
     << R"("scenarios":[)"
     << R"({"id":"z-law","kind":"valuation_law","quadruple":"q0","domain":"cells","seed":3,"trials":40},)"
     << R"({"id":"a-oracle","kind":"oracle_equivalence","quadruple":"q0","domain":"cells","seed":4,"trials":40},)"
     << R"({"id":"m-char","kind":"characteristic_formula","quadruple":"q0","seed":5,"trials":40},)"
     << R"({"id":"k-growth","kind":"necessity_growth","p":2.0,"steps":20},)"
     << R"({"id":"j-delta","kind":"necessity_delta_infinite"}]})";
  auto config = parse_config(os.str());

  auto serial = run_suite(config, RunOptions{1, std::nullopt});
  auto parallel = run_suite(config, RunOptions{4, std::nullopt});
  REQUIRE(serial.outcomes.size() == 5);
  REQUIRE(serial.overall_pass);
  REQUIRE(parallel.overall_pass);
  // ordered by scenario id
  for (std::size_t i = 1; i < serial.outcomes.size(); ++i) {
    REQUIRE(serial.outcomes[i - 1].report.scenario_id <
            serial.outcomes[i].report.scenario_id);
  }
  for (std::size_t i = 0; i < serial.outcomes.size(); ++i) {
    REQUIRE(reports_bit_identical(serial.outcomes[i].report,
                                  parallel.outcomes[i].report));
  }

  // CSV text is deterministic, so it can be pinned as a golden file
  const std::string csv = summary_to_csv_text(serial);
  const std::string expected_header = "scenario_id,kind,trials,max_deviation,tolerance,pass";
  REQUIRE(csv.substr(0, expected_header.size()) == expected_header);
  REQUIRE(csv == summary_to_csv_text(parallel));
}

TEST_CASE("golden CSV for a fixed all-trivial suite") {
  // zero generators: every scenario deviation is exactly zero
  std::ostringstream os;
  os << "{\"quadruples\":[{\"name\":\"qz\","
     << "\"h1\":" << R"({"family":"power","params":{"s":0.0,"q":1.0,"e":0},"p":2.0,"gamma":0.0,"delta":0.0})"
     << ",\"h2\":" << R"({"family":"power","params":{"s":0.0,"q":1.0,"e":0},"p":2.0,"gamma":0.0,"delta":0.0})"
     << ",\"h3\":" << R"({"family":"power","params":{"s":0.0,"q":1.0,"e":0},"p":2.0,"gamma":0.0,"delta":0.0})"
     << ",\"h4\":" << R"({"family":"power","params":{"s":0.0,"q":1.0,"e":0},"p":2.0,"gamma":0.0,"delta":0.0})"
     << "}],"
     << R"("domains":[{"name":"cells","type":"partition","measures":[0.5,0.5]}],)"
     << R"("scenarios":[)"
     << R"({"id":"law","kind":"valuation_law","quadruple":"qz","domain":"cells","seed":1,"trials":25},)"
     << R"({"id":"oracle","kind":"oracle_equivalence","quadruple":"qz","domain":"cells","seed":2,"trials":25}]})";
  auto summary = run_suite(parse_config(os.str()));
  const std::string expected =
      "scenario_id,kind,trials,max_deviation,tolerance,pass\n"
      "law,valuation_law,25,0,1e-12,true\n"
      "oracle,oracle_equivalence,25,0,1e-12,true\n";
  REQUIRE(summary_to_csv_text(summary) == expected);
}

TEST_CASE("JSON report carries the full per-scenario payload") {
  auto config = parse_config(minimal_config());
  auto summary = run_suite(config);
  auto doc = json::parse(summary_to_json_text(summary));
  REQUIRE(doc.at("overall_pass").get<bool>());
  REQUIRE(doc.at("scenarios").size() == 1);
  const auto& sc = doc.at("scenarios")[0];
  for (const char* key : {"scenario_id", "kind", "seed", "trials", "tolerance",
                          "max_deviation", "pass", "witness", "curve", "note",
                          "wall_time_seconds"}) {
    REQUIRE(sc.contains(key));
  }
  REQUIRE(sc.at("kind") == "valuation_law");
}

TEST_CASE("write_reports creates files and fails cleanly on bad paths") {
  namespace fs = std::filesystem;
  auto config = parse_config(minimal_config());
  auto summary = run_suite(config);

  const fs::path dir = fs::temp_directory_path() / "lpval_config_test";
  fs::remove_all(dir);
  write_reports(summary, dir.string(), "r.json", "r.csv");
  REQUIRE(fs::exists(dir / "r.json"));
  REQUIRE(fs::exists(dir / "r.csv"));
  std::ifstream csv(dir / "r.csv");
  std::string header;
  std::getline(csv, header);
  REQUIRE(header == "scenario_id,kind,trials,max_deviation,tolerance,pass");
  fs::remove_all(dir);

  // a regular file in the directory position must fail
  const fs::path blocker = fs::temp_directory_path() / "lpval_blocker";
  std::ofstream(blocker) << "x";
  REQUIRE_THROWS_AS(
      write_reports(summary, (blocker / "sub").string(), "r.json", "r.csv"),
      IoError);
  fs::remove(blocker);
}

TEST_CASE("failing scenarios are reported, not thrown") {
  // control arm configured as must-diverge: scenario fails, suite survives
  std::ostringstream os;
  os << R"({"scenarios":[{"id":"ctrl","kind":"necessity_growth","arm":"control"}]})";
  auto summary = run_suite(parse_config(os.str()));
  REQUIRE_FALSE(summary.overall_pass);
  REQUIRE_FALSE(summary.outcomes[0].report.pass);
  REQUIRE(summary.outcomes[0].report.note ==
          "no divergence within the witness window");
}

TEST_CASE("seed override reseeds scenarios deterministically") {
  auto config = parse_config(minimal_config());
  auto a = run_suite(config, RunOptions{1, 99});
  auto b = run_suite(config, RunOptions{1, 99});
  auto c = run_suite(config, RunOptions{1, 100});
  REQUIRE(reports_bit_identical(a.outcomes[0].report, b.outcomes[0].report));
  REQUIRE(a.outcomes[0].report.seed != c.outcomes[0].report.seed);
}

TEST_CASE("scenario kind catalog covers every kind") {
  auto catalog = scenario_kind_catalog();
  REQUIRE(catalog.size() == 13);
  for (const auto& [name, description] : catalog) {
    REQUIRE(kind_from_string(name).has_value());
    REQUIRE_FALSE(description.empty());
  }
}
