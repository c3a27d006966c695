#pragma once

// Plain-text timeline of a schedule file, one row per port.

#include <string>
#include <vector>

#include "tsn/netmodel.hpp"

namespace tsn {

struct GanttBar {
  Time open = 0;
  Time close = 0;
  std::string label;  // frames carried, "stream#repetition" joined by commas
};

struct GanttRow {
  std::string link;
  Time cycle = 0;
  std::vector<GanttBar> bars;  // non-empty windows sorted by open
};

/// Rows of a schedule JSON document; needs no problem file.
std::vector<GanttRow> gantt_rows(const std::string& schedule_json);

/// Header line plus one line per row that has at least one window.
std::string render_gantt(const std::vector<GanttRow>& rows, int width = 48);

}  // namespace tsn
