#include "lma/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "lma/systems.hpp"

namespace lma {

std::string format_value(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::string index_field(int i) {
  return i < 0 ? std::string() : std::to_string(i);
}

}  // namespace

void write_table_csv(std::ostream& os, const IndicatorTable& table) {
  os << "gamma,indicator,i,j,k,value,flags\n";
  for (const auto& r : table.rows) {
    os << format_value(r.gamma) << ',' << r.kind << ',' << index_field(r.i)
       << ',' << index_field(r.j) << ',' << index_field(r.k) << ','
       << format_value(r.value) << ',' << r.flag << '\n';
  }
}

void write_table_json(std::ostream& os, const IndicatorTable& table) {
  // Hand-rolled so non-finite values keep the same "inf"/"nan" tokens as
  // the CSV schema (strict JSON has no literal for them).
  os << "[\n";
  for (std::size_t m = 0; m < table.rows.size(); ++m) {
    const auto& r = table.rows[m];
    os << "  {\"gamma\": \"" << format_value(r.gamma) << "\", \"indicator\": "
       << nlohmann::json(r.kind).dump() << ", \"i\": " << r.i
       << ", \"j\": " << r.j << ", \"k\": " << r.k << ", \"value\": \""
       << format_value(r.value) << "\", \"flags\": "
       << nlohmann::json(r.flag).dump() << "}"
       << (m + 1 < table.rows.size() ? ",\n" : "\n");
  }
  os << "]\n";
}

void write_events_json(std::ostream& os, const std::vector<Event>& events) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& ev : events) {
    nlohmann::ordered_json e;
    e["kind"] = event_kind_name(ev.kind);
    e["gamma_lo"] = ev.gamma_lo;
    e["gamma_hi"] = ev.gamma_hi;
    e["tracks"] = ev.tracks;
    if (ev.kind == Event::Kind::Resonance) e["detail"] = ev.detail;
    arr.push_back(std::move(e));
  }
  os << arr.dump(2) << '\n';
}

void write_tracks_csv(std::ostream& os, const ModeTrack& track) {
  const int n = track.lambdas.empty()
                    ? 0
                    : static_cast<int>(track.lambdas.front().size());
  os << "gamma";
  for (int t = 0; t < n; ++t)
    os << ",re_" << t << ",im_" << t;
  os << '\n';
  for (std::size_t m = 0; m < track.gammas.size(); ++m) {
    os << format_value(track.gammas[m]);
    for (int t = 0; t < n; ++t)
      os << ',' << format_value(track.lambdas[m](t).real()) << ','
         << format_value(track.lambdas[m](t).imag());
    os << '\n';
  }
}

InitialConditionPolicy parse_ic(const std::string& text) {
  if (text == "spherical") return InitialConditionPolicy::spherical();
  if (text.rfind("unit:", 0) == 0) {
    int k = 0;
    try {
      std::size_t pos = 0;
      k = std::stoi(text.substr(5), &pos);
      if (pos != text.size() - 5) throw std::invalid_argument(text);
    } catch (const std::exception&) {
      throw ParseError("bad unit-vector index in '" + text + "'");
    }
    if (k < 1) throw ParseError("unit-vector index is 1-based");
    return InitialConditionPolicy::unit_vector(k - 1);
  }
  if (text.rfind("explicit:", 0) == 0) {
    std::vector<double> vals;
    std::istringstream is(text.substr(9));
    std::string cell;
    while (std::getline(is, cell, ',')) {
      try {
        std::size_t pos = 0;
        vals.push_back(std::stod(cell, &pos));
        if (pos != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw ParseError("bad number '" + cell + "' in explicit initial "
                         "condition");
      }
    }
    if (vals.empty()) throw ParseError("empty explicit initial condition");
    VectorXd x0 = Eigen::Map<VectorXd>(vals.data(),
                                       static_cast<Eigen::Index>(vals.size()));
    if (x0.norm() == 0.0)
      throw ParseError("explicit initial condition must be nonzero");
    return InitialConditionPolicy::explicit_x0(x0);
  }
  throw ParseError("unknown initial-condition policy '" + text + "'");
}

SweepConfig parse_sweep_config(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw ParseError("malformed sweep config");

  SweepConfig cfg;
  if (!j.contains("family") || !j["family"].is_string())
    throw ParseError("sweep config requires a family name");
  std::string family = j["family"].get<std::string>();

  std::map<std::string, double> params;
  if (j.contains("params")) {
    if (!j["params"].is_object())
      throw ParseError("params must be a name->number map");
    for (auto& [key, val] : j["params"].items()) {
      if (!val.is_number()) throw ParseError("param " + key + " not numeric");
      params[key] = val.get<double>();
    }
  }
  auto param = [&](const std::string& name) {
    auto it = params.find(name);
    if (it == params.end())
      throw ParseError("family " + family + " requires param " + name);
    return it->second;
  };

  if (family == "merge") {
    cfg.family = merge_family(param("a"), param("b"));
  } else if (family == "two_oscillator") {
    cfg.family = two_oscillator_family(
        param("alpha1"), param("alpha2"), param("omega1"),
        [](double gamma) { return gamma; }, param("coupling"));
  } else if (family == "shift") {
    if (!j.contains("matrix") || !j["matrix"].is_string())
      throw ParseError("family shift requires a matrix file path");
    StateMatrix a0 = load_matrix_file(j["matrix"].get<std::string>());
    cfg.family = instability_family(a0);
  } else {
    throw ParseError("unknown family '" + family + "'");
  }

  if (!j.contains("gamma") || !j["gamma"].is_object())
    throw ParseError("sweep config requires gamma {start, stop, steps}");
  const auto& g = j["gamma"];
  for (const char* key : {"start", "stop", "steps"})
    if (!g.contains(key)) throw ParseError(std::string("gamma missing ") + key);
  double start = g["start"].get<double>();
  double stop = g["stop"].get<double>();
  int steps = g["steps"].get<int>();
  if (steps < 2 || stop <= start)
    throw ParseError("gamma grid needs stop > start and steps >= 2");
  cfg.gamma_grid.resize(steps);
  for (int m = 0; m < steps; ++m)
    cfg.gamma_grid[m] = start + (stop - start) * m / (steps - 1);

  if (j.contains("indicators")) {
    if (!j["indicators"].is_array())
      throw ParseError("indicators must be a list of kind names");
    for (const auto& item : j["indicators"])
      cfg.indicators.push_back(item.get<std::string>());
  }
  if (j.contains("ic_policy"))
    cfg.ic = parse_ic(j["ic_policy"].get<std::string>());
  return cfg;
}

SweepConfig load_sweep_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open sweep config: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_sweep_config(buf.str());
}

IndicatorTable read_table_csv(std::istream& is) {
  IndicatorTable table;
  std::string line;
  if (!std::getline(is, line) ||
      line != "gamma,indicator,i,j,k,value,flags")
    throw ParseError("missing long-format CSV header");
  int lineno = 1;
  auto parse_num = [&](const std::string& cell) {
    if (cell == "inf") return std::numeric_limits<double>::infinity();
    if (cell == "-inf") return -std::numeric_limits<double>::infinity();
    if (cell == "nan") return std::numeric_limits<double>::quiet_NaN();
    try {
      std::size_t pos = 0;
      double v = std::stod(cell, &pos);
      if (pos != cell.size()) throw std::invalid_argument(cell);
      return v;
    } catch (const std::exception&) {
      throw ParseError("bad number '" + cell + "' at row " +
                       std::to_string(lineno));
    }
  };
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    while (cells.size() < 7) cells.emplace_back();
    if (cells.size() != 7)
      throw ParseError("row " + std::to_string(lineno) +
                       " does not have 7 fields");
    IndicatorRecord rec;
    rec.gamma = parse_num(cells[0]);
    rec.kind = cells[1];
    rec.i = cells[2].empty() ? -1 : static_cast<int>(parse_num(cells[2]));
    rec.j = cells[3].empty() ? -1 : static_cast<int>(parse_num(cells[3]));
    rec.k = cells[4].empty() ? -1 : static_cast<int>(parse_num(cells[4]));
    rec.value = parse_num(cells[5]);
    rec.flag = cells[6];
    table.add(std::move(rec));
  }
  return table;
}

}  // namespace lma
