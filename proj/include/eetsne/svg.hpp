#pragma once

#include <string>
#include <vector>

#include "eetsne/types.hpp"

namespace eetsne {

// Deterministic SVG scatter of a 2-D point set.  Labels (any integers) pick
// marker colors from a fixed 12-color palette; an empty label vector paints
// everything in the first color.  Throws UnsupportedDimension unless
// y.dim == 2.
void plot_svg(const std::string& path, const Points& y, const std::vector<int>& labels,
              const std::string& title);

// The rendered bytes, for callers that want to write or compare themselves.
std::string render_svg(const Points& y, const std::vector<int>& labels, const std::string& title);

}  // namespace eetsne
