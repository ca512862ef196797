#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "lma/types.hpp"

namespace lma {

// One long-format record: (indicator kind, mode indices i/j, state indices
// k/l, sweep parameter, value, flag). Unused indices are -1; gamma is NaN
// outside sweeps. Flags: "", "divergent", "ill_conditioned", "non_simple",
// "undefined".
struct IndicatorRecord {
  std::string kind;
  int i = -1;
  int j = -1;
  int k = -1;
  int l = -1;
  double gamma = std::numeric_limits<double>::quiet_NaN();
  double value = 0.0;
  std::string flag;
};

struct IndicatorTable {
  std::vector<IndicatorRecord> rows;

  void add(IndicatorRecord rec) { rows.push_back(std::move(rec)); }
};

}  // namespace lma
