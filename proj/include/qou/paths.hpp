#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qou/time_grid.hpp"

namespace qou {

// Sample path on a uniform grid; by convention the value at time 0 is 0
// for noise paths (grids may start at negative times).
struct Path {
  TimeGrid grid;
  std::vector<double> values;

  double at_time(double t) const { return values.at(grid.index_of(t)); }
};

// Independent seeded sample paths sharing one grid.
struct PathEnsemble {
  TimeGrid grid;
  std::vector<std::vector<double>> paths;
  std::uint64_t master_seed = 0;
  std::string provenance;

  std::size_t size() const { return paths.size(); }
};

}  // namespace qou
