#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "lma/io.hpp"
#include "lma/systems.hpp"

using namespace lma;

namespace {

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  REQUIRE(f.good());
  f << text;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f.good());
  std::ostringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

int run_cli(const std::string& args, const std::string& redirect = "") {
  std::string cmd = std::string(LMA_CLI_PATH) + " " + args;
  if (!redirect.empty()) cmd += " > " + redirect + " 2>/dev/null";
  else cmd += " > /dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

}  // namespace

TEST_CASE("value formatting: 17 significant digits, inf and nan tokens") {
  CHECK(format_value(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_value(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(format_value(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(format_value(1.0) == "1");
  // round trip bit-exactly through the decimal form
  for (double v : {11.0 / 12.0, 16.0 / 11.0, -2.0 / 3.0, 1e-300, 3.14e17})
    CHECK(std::stod(format_value(v)) == v);
}

TEST_CASE("long-format CSV round trip preserves every value") {
  IndicatorTable table;
  IndicatorRecord rec;
  rec.kind = "mislpf";
  rec.i = 0;
  rec.k = 1;
  rec.gamma = 0.25;
  rec.value = 16.0 / 11.0;
  table.add(rec);
  rec.kind = "lmif";
  rec.i = 1;
  rec.j = 0;
  rec.k = -1;
  rec.value = std::numeric_limits<double>::infinity();
  rec.flag = "divergent";
  table.add(rec);

  std::ostringstream os;
  write_table_csv(os, table);
  std::istringstream is(os.str());
  IndicatorTable back = read_table_csv(is);
  REQUIRE(back.rows.size() == 2);
  CHECK(back.rows[0].value == 16.0 / 11.0);
  CHECK(back.rows[0].kind == "mislpf");
  CHECK(back.rows[0].i == 0);
  CHECK(back.rows[0].j == -1);
  CHECK(back.rows[0].k == 1);
  CHECK(back.rows[1].value == std::numeric_limits<double>::infinity());
  CHECK(back.rows[1].flag == "divergent");

  std::istringstream bad("not,a,header\n");
  CHECK_THROWS_AS(read_table_csv(bad), ParseError);
}

TEST_CASE("initial-condition policy parsing") {
  CHECK(parse_ic("spherical").spherical_kind());
  InitialConditionPolicy u = parse_ic("unit:3");
  CHECK(u.kind == InitialConditionPolicy::Kind::UnitVector);
  CHECK(u.index == 2);  // 1-based on the wire
  InitialConditionPolicy e = parse_ic("explicit:1,-2,0.5");
  REQUIRE(e.x0.size() == 3);
  CHECK(e.x0(1) == -2.0);

  CHECK_THROWS_AS(parse_ic("unit:0"), ParseError);
  CHECK_THROWS_AS(parse_ic("unit:x"), ParseError);
  CHECK_THROWS_AS(parse_ic("explicit:"), ParseError);
  CHECK_THROWS_AS(parse_ic("explicit:1,q"), ParseError);
  CHECK_THROWS_AS(parse_ic("gaussian"), ParseError);
}

TEST_CASE("sweep config parsing") {
  SweepConfig cfg = parse_sweep_config(R"({
    "family": "merge",
    "params": {"a": 1.0, "b": 2.0},
    "gamma": {"start": 1.0, "stop": 3.0, "steps": 5},
    "indicators": ["mode_energy"],
    "ic_policy": "unit:1"
  })");
  REQUIRE(cfg.gamma_grid.size() == 5);
  CHECK(cfg.gamma_grid.front() == 1.0);
  CHECK(cfg.gamma_grid.back() == 3.0);
  CHECK(cfg.indicators == std::vector<std::string>{"mode_energy"});
  CHECK(cfg.ic.index == 0);
  CHECK(cfg.family(2.5).n() == 2);

  CHECK_THROWS_AS(parse_sweep_config("{"), ParseError);
  CHECK_THROWS_AS(parse_sweep_config(R"({"family": "merge"})"), ParseError);
  CHECK_THROWS_AS(parse_sweep_config(R"({
    "family": "unknown", "gamma": {"start":0,"stop":1,"steps":2}})"),
                  ParseError);
  CHECK_THROWS_AS(parse_sweep_config(R"({
    "family": "merge", "params": {"a":1,"b":2},
    "gamma": {"start":1,"stop":0,"steps":2}})"),
                  ParseError);
}

TEST_CASE("events serialization") {
  std::vector<Event> events = {
      {Event::Kind::Merge, 1.9, 2.1, {0, 1}},
      {Event::Kind::Resonance, 6.5, 6.6, {0, 2}, 0.064}};
  std::ostringstream os;
  write_events_json(os, events);
  std::string text = os.str();
  CHECK(text.find("\"MERGE\"") != std::string::npos);
  CHECK(text.find("\"RESONANCE\"") != std::string::npos);
  CHECK(text.find("detail") != std::string::npos);
}

TEST_CASE("analyze: worked system, values and determinism") {
  write_file("cli_worked.csv", "0,1\n-2,-3\n");
  REQUIRE(run_cli("analyze cli_worked.csv --ic unit:1 --out cli_out1.csv") ==
          0);
  REQUIRE(run_cli("analyze cli_worked.csv --ic unit:1 --out cli_out2.csv") ==
          0);
  CHECK(read_file("cli_out1.csv") == read_file("cli_out2.csv"));

  std::ifstream f("cli_out1.csv");
  IndicatorTable table = read_table_csv(f);
  bool found_e11 = false;
  double mislpf_sum = 0.0;
  for (const auto& r : table.rows) {
    if (r.kind == "mislpf" && r.k == 0) {
      mislpf_sum += r.value;
      if (r.i == 0 && std::abs(r.value - 16.0 / 11.0) < 1e-12)
        found_e11 = true;
    }
  }
  CHECK(found_e11);
  CHECK(std::abs(mislpf_sum - 1.0) < 1e-9);
}

TEST_CASE("analyze: spherical magnitude PF of a diagonal system") {
  write_file("cli_diag.csv", "-1,0\n0,-2\n");
  REQUIRE(run_cli("analyze cli_diag.csv --ic spherical --indicators simpf "
                  "--out cli_diag_out.csv") == 0);
  std::ifstream f("cli_diag_out.csv");
  IndicatorTable table = read_table_csv(f);
  bool pi11 = false;
  for (const auto& r : table.rows)
    if (r.kind == "simpf" && r.i == 0 && r.k == 0 && r.value == 1.0)
      pi11 = true;
  CHECK(pi11);
}

TEST_CASE("analyze: JSON output format") {
  REQUIRE(run_cli("analyze cli_worked.csv --format json --indicators "
                  "state_energy --out cli_out.json") == 0);
  std::string text = read_file("cli_out.json");
  CHECK(text.find("\"state_energy\"") != std::string::npos);
}

TEST_CASE("coded exits") {
  // 2: parse failures
  write_file("cli_bad.csv", "1,2\n3,oops\n");
  CHECK(run_cli("analyze cli_bad.csv") == 2);
  CHECK(run_cli("analyze cli_missing_file.csv") == 2);
  write_file("cli_bad_cfg.json", "{nope");
  CHECK(run_cli("sweep cli_bad_cfg.json") == 2);
  CHECK(run_cli("analyze cli_worked.csv --ic unit:0") == 2);
  CHECK(run_cli("analyze cli_worked.csv --indicators nosuch") == 2);

  // 3: non-simple spectrum
  write_file("cli_jordan.csv", "-1,1\n0,-1\n");
  CHECK(run_cli("analyze cli_jordan.csv") == 3);

  // 4: unstable system with energy indicators requested
  write_file("cli_unstable.csv", "0.5,0\n0,-1\n");
  CHECK(run_cli("analyze cli_unstable.csv") == 4);
  CHECK(run_cli("oracle cli_unstable.csv") == 4);

  // 5: an initial condition that excites no part of the requested mode
  CHECK(run_cli("analyze cli_diag.csv --ic unit:1 --indicators simlpf") ==
        5);
}

TEST_CASE("oracle: worked system within tolerance") {
  REQUIRE(run_cli("oracle cli_worked.csv --ic explicit:1,1",
                  "cli_oracle.csv") == 0);
  std::string text = read_file("cli_oracle.csv");
  CHECK(text.find("max_rel_deviation") != std::string::npos);
}

TEST_CASE("sweep: merge family produces table, events, tracks") {
  write_file("cli_merge.json", R"({
    "family": "merge",
    "params": {"a": 1.0, "b": 2.0},
    "gamma": {"start": 1.2, "stop": 3.0, "steps": 25},
    "indicators": ["mode_energy"],
    "ic_policy": "spherical"
  })");
  REQUIRE(run_cli("sweep cli_merge.json --out cli_sweep") == 0);
  std::ifstream f("cli_sweep.csv");
  IndicatorTable table = read_table_csv(f);
  CHECK(!table.rows.empty());
  std::string events = read_file("cli_sweep.events.json");
  CHECK(events.find("\"MERGE\"") != std::string::npos);
  std::string tracks = read_file("cli_sweep.tracks.csv");
  CHECK(tracks.find("re_0") != std::string::npos);

  // byte-for-byte determinism
  REQUIRE(run_cli("sweep cli_merge.json --out cli_sweep_b") == 0);
  CHECK(read_file("cli_sweep.csv") == read_file("cli_sweep_b.csv"));
  CHECK(read_file("cli_sweep.events.json") ==
        read_file("cli_sweep_b.events.json"));
}
