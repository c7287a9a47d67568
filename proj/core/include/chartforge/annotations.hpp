#pragma once

#include "chartforge/geometry.hpp"
#include "chartforge/table.hpp"

#include <string>

namespace chartforge::chart {

/// Builds the SVG overlay that accompanies a plain chart: axis lines
/// (`class="axis"`), one `class="x-tick"` label per datum (`class="slice-label"`
/// for pies), `class="y-tick"` value labels and, when the table has a title, a
/// single `id="title"` text element. Every element is individually addressable.
std::string export_annotations(const ChartGeometry& geometry, const DataTable& table, const ChartSpec& spec);

} // namespace chartforge::chart
