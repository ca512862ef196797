#pragma once

#include <iosfwd>
#include <string>

#include "lma/sweep.hpp"
#include "lma/table.hpp"

namespace lma {

// 17-significant-digit decimal; infinities as "inf"/"-inf", NaN as "nan".
std::string format_value(double v);

// Long-format table, header "gamma,indicator,i,j,k,value,flags"; unused
// indices serialize as empty fields. Byte-deterministic for fixed input.
void write_table_csv(std::ostream& os, const IndicatorTable& table);
void write_table_json(std::ostream& os, const IndicatorTable& table);

// Events as a JSON array of {kind, gamma_lo, gamma_hi, tracks[, detail]}.
void write_events_json(std::ostream& os, const std::vector<Event>& events);

// Eigenvalue tracks: gamma column plus Re/Im pair per track (NaN at gaps).
void write_tracks_csv(std::ostream& os, const ModeTrack& track);

// "unit:<k>" (1-based) | "spherical" | "explicit:<comma-list>".
InitialConditionPolicy parse_ic(const std::string& text);

// Sweep config JSON: {"family": name, "params": {...}, "gamma": {"start",
// "stop", "steps"}, "indicators": [...], "ic_policy": str, "matrix": path}.
// Families: "merge" (a, b), "two_oscillator" (alpha1, alpha2, omega1,
// coupling; omega2 tracks gamma), "shift" (matrix path required;
// A(gamma) = A0 + gamma I).
SweepConfig parse_sweep_config(const std::string& text);
SweepConfig load_sweep_config(const std::string& path);

// Re-parse of a long-format CSV produced by write_table_csv.
IndicatorTable read_table_csv(std::istream& is);

}  // namespace lma
