#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "lma/io.hpp"
#include "lma/oracle.hpp"
#include "lma/sweep.hpp"
#include "lma/systems.hpp"

namespace {


constexpr int kExitOk = 0;
constexpr int kExitFail = 1;
constexpr int kExitParse = 2;
constexpr int kExitNonSimple = 3;
constexpr int kExitUnstable = 4;
constexpr int kExitZeroEnergy = 5;

const std::vector<std::string> kAllIndicators = {
    "conventional_pf", "simpf",         "state_energy",
    "mode_energy",     "modal_contribution", "mislpf",
    "simlpf",          "lmie",          "lmif",
    "pair_mislpf",     "pair_simlpf",   "lmie_state_part",
};

bool wants(const std::vector<std::string>& kinds, const std::string& kind) {
  return std::find(kinds.begin(), kinds.end(), kind) != kinds.end();
}

void add_row(lma::IndicatorTable& table, const std::string& kind,
             double value, int i = -1, int j = -1, int k = -1, int l = -1,
             const std::string& flag = "") {
  lma::IndicatorRecord rec;
  rec.kind = kind;
  rec.i = i;
  rec.j = j;
  rec.k = k;
  rec.l = l;
  rec.value = value;
  rec.flag = flag;
  table.add(rec);
}

// Single-operating-point indicator tabulation (mode indices, no tracks).
lma::IndicatorTable tabulate(const lma::StateMatrix& a,
                             const lma::EigenStructure& eig,
                             const lma::InitialConditionPolicy& ic,
                             const std::vector<std::string>& kinds) {
  using lma::Complex;
  const int n = eig.n();
  lma::IndicatorTable table;

  static const std::vector<std::string> kEnergyKinds = {
      "state_energy", "mode_energy", "modal_contribution", "mislpf",
      "simlpf",       "lmie",        "pair_mislpf",        "pair_simlpf",
      "lmie_state_part"};
  bool needs_energy = false;
  for (const auto& kind : kEnergyKinds)
    if (wants(kinds, kind)) needs_energy = true;
  if (needs_energy && !eig.is_stable()) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if ((std::conj(eig.lambdas(i)) + eig.lambdas(j)).real() >= 0.0)
          throw lma::UnstableSystem(
              "energy indicators undefined: divergent mode pair (" +
              std::to_string(i) + "," + std::to_string(j) + ") has Re(l_i* + "
              "l_j) >= 0");
  }

  if (wants(kinds, "conventional_pf")) {
    lma::PFMatrix pf = lma::conventional_pf(eig);
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        add_row(table, "conventional_pf", pf.values(k, i).real(), i, -1, k);
  }
  if (wants(kinds, "simpf")) {
    lma::PFMatrix pf = lma::simpf(eig);
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        add_row(table, "simpf", pf.values(k, i).real(), i, -1, k);
  }
  if (wants(kinds, "state_energy"))
    for (int k = 0; k < n; ++k)
      add_row(table, "state_energy", lma::state_energy(a, eig, ic, k), -1, -1,
              k);
  if (wants(kinds, "mode_energy"))
    for (int i = 0; i < n; ++i)
      add_row(table, "mode_energy", lma::mode_energy(a, eig, ic, i), i);
  if (wants(kinds, "modal_contribution"))
    for (int i = 0; i < n; ++i)
      add_row(table, "modal_contribution",
              lma::modal_contribution(eig, ic, i), i);
  if (wants(kinds, "mislpf"))
    for (int k = 0; k < n; ++k) {
      lma::VectorXd e = lma::mislpf(a, eig, ic, k);
      for (int i = 0; i < n; ++i) add_row(table, "mislpf", e(i), i, -1, k);
    }
  if (wants(kinds, "simlpf"))
    for (int i = 0; i < n; ++i) {
      lma::VectorXd eps = lma::simlpf(eig, ic, i);
      for (int k = 0; k < n; ++k) add_row(table, "simlpf", eps(k), i, -1, k);
    }
  if (wants(kinds, "lmie"))
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j)
        add_row(table, "lmie", lma::lmie(eig, ic, i, j), i, j);
  if (wants(kinds, "lmif"))
    for (int i = 0; i < n; ++i) {
      lma::LmifRow row = lma::lmif(eig, i);
      for (int j = 0; j < n; ++j) {
        std::string flag;
        if (row.undefined) flag = "undefined";
        else if (!std::isfinite(row.values(j))) flag = "divergent";
        add_row(table, "lmif", row.values(j), i, j, -1, -1, flag);
      }
    }
  if (wants(kinds, "pair_mislpf"))
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
          add_row(table, "pair_mislpf",
                  lma::pair_mislpf(a, eig, ic, k, i, j), i, j, k);
  if (wants(kinds, "pair_simlpf"))
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          add_row(table, "pair_simlpf", lma::pair_simlpf(eig, ic, i, k, l),
                  i, -1, k, l);
  if (wants(kinds, "lmie_state_part"))
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
          add_row(table, "lmie_state_part",
                  lma::state_participation_lmie(eig, ic, k, i, j), i, j, k);
  return table;
}

void write_output(const lma::IndicatorTable& table, const std::string& out,
                  const std::string& format) {
  std::ostringstream buf;
  if (format == "json")
    lma::write_table_json(buf, table);
  else
    lma::write_table_csv(buf, table);
  if (out.empty()) {
    std::cout << buf.str();
  } else {
    std::ofstream f(out, std::ios::binary);
    if (!f) throw lma::ParseError("cannot open output file: " + out);
    f << buf.str();
  }
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  std::string item;
  while (std::getline(is, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

int cmd_analyze(const std::string& matrix_path, const std::string& ic_text,
                const std::string& indicators_text, double tol,
                const std::string& out, const std::string& format) {
  lma::StateMatrix a = lma::load_matrix_file(matrix_path);
  lma::EigenStructure eig = lma::eigendecompose(a, tol);
  lma::InitialConditionPolicy ic = lma::parse_ic(ic_text);
  std::vector<std::string> kinds = indicators_text == "all"
                                       ? kAllIndicators
                                       : split_list(indicators_text);
  for (const auto& kind : kinds)
    if (!wants(kAllIndicators, kind))
      throw lma::ParseError("unknown indicator kind '" + kind + "'");
  write_output(tabulate(a, eig, ic, kinds), out, format);
  return kExitOk;
}

int cmd_sweep(const std::string& config_path, const std::string& out,
              const std::string& format, double tol) {
  lma::SweepConfig cfg = lma::load_sweep_config(config_path);
  cfg.eig_tol = tol;
  lma::SweepResult res = lma::run_sweep(cfg);

  std::ostringstream table_buf, events_buf, tracks_buf;
  if (format == "json")
    lma::write_table_json(table_buf, res.table);
  else
    lma::write_table_csv(table_buf, res.table);
  lma::write_events_json(events_buf, res.events);
  lma::write_tracks_csv(tracks_buf, res.track);

  if (out.empty()) {
    std::cout << table_buf.str() << events_buf.str();
  } else {
    std::string ext = format == "json" ? ".json" : ".csv";
    for (auto& [path, text] :
         std::vector<std::pair<std::string, std::string>>{
             {out + ext, table_buf.str()},
             {out + ".events.json", events_buf.str()},
             {out + ".tracks.csv", tracks_buf.str()}}) {
      std::ofstream f(path, std::ios::binary);
      if (!f) throw lma::ParseError("cannot open output file: " + path);
      f << text;
    }
  }
  for (const auto& ev : res.events)
    std::cerr << lma::event_kind_name(ev.kind) << " in ["
              << lma::format_value(ev.gamma_lo) << ", "
              << lma::format_value(ev.gamma_hi) << "]\n";
  return kExitOk;
}

int cmd_oracle(const std::string& matrix_path, const std::string& ic_text,
               double tol) {
  lma::StateMatrix a = lma::load_matrix_file(matrix_path);
  lma::EigenStructure eig = lma::eigendecompose(a, tol);
  if (!eig.is_stable())
    throw lma::UnstableSystem("quadrature oracle requires a stable matrix");

  lma::VectorXd x0;
  if (ic_text == "spherical") {
    x0 = lma::VectorXd::Ones(eig.n());
  } else {
    lma::InitialConditionPolicy ic = lma::parse_ic(ic_text);
    x0 = ic.vec(eig.n());
  }
  std::vector<int> all(eig.n());
  for (int m = 0; m < eig.n(); ++m) all[m] = m;
  lma::OracleReport rep = lma::oracle_report(a, eig, x0, all, all);
  std::cout << "quantity,closed_form,quadrature,rel_deviation\n";
  for (const auto& e : rep.entries)
    std::cout << e.what << ',' << lma::format_value(e.closed_form) << ','
              << lma::format_value(e.quadrature) << ','
              << lma::format_value(e.rel_deviation) << '\n';
  std::cout << "max_rel_deviation," << lma::format_value(rep.max_rel_deviation)
            << ",,\n";
  return rep.max_rel_deviation > 1e-5 ? kExitFail : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lyapunov modal analysis of linear time-invariant systems"};
  app.require_subcommand(1);

  std::string matrix_path, config_path, out, format = "csv";
  std::string ic_text = "spherical", indicators_text = "all";
  double tol = 1e-8;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", out, "output path (default: stdout)");
    sub->add_option("--format", format, "csv|json")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--tol", tol, "eigenvalue-separation tolerance");
    sub->add_option("--ic", ic_text,
                    "unit:<k>|spherical|explicit:<comma-list>");
  };

  CLI::App* analyze = app.add_subcommand("analyze", "analyze one matrix");
  analyze->add_option("matrix", matrix_path, "matrix file (CSV or JSON)")
      ->required();
  analyze->add_option("--indicators", indicators_text,
                      "comma list of indicator kinds, or 'all'");
  add_common(analyze);

  CLI::App* sweep = app.add_subcommand("sweep", "run a parameter sweep");
  sweep->add_option("config", config_path, "sweep config JSON")->required();
  add_common(sweep);

  CLI::App* oracle =
      app.add_subcommand("oracle", "closed form vs quadrature cross-check");
  oracle->add_option("matrix", matrix_path, "matrix file (CSV or JSON)")
      ->required();
  add_common(oracle);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? kExitParse : kExitOk;
  }

  try {
    if (app.got_subcommand(analyze))
      return cmd_analyze(matrix_path, ic_text, indicators_text, tol, out,
                         format);
    if (app.got_subcommand(sweep))
      return cmd_sweep(config_path, out, format, tol);
    return cmd_oracle(matrix_path, ic_text, tol);
  } catch (const lma::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitParse;
  } catch (const lma::NonSimpleSpectrum& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNonSimple;
  } catch (const lma::UnstableSystem& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUnstable;
  } catch (const lma::DivergentPair& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUnstable;
  } catch (const lma::ZeroEnergy& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitZeroEnergy;
  } catch (const lma::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFail;
  }
}
