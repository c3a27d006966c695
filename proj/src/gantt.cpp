#include "tsn/gantt.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

#include "json.hpp"

#include "tsn/errors.hpp"

namespace tsn {

std::vector<GanttRow> gantt_rows(const std::string& schedule_json) {
  std::vector<GanttRow> rows;
  try {
    const auto doc = nlohmann::json::parse(schedule_json);
    for (const auto& port : doc.at("ports")) {
      GanttRow row;
      const auto& link = port.at("link");
      row.link = link.is_array() ? link.at(0).get<std::string>() + "->" + link.at(1).get<std::string>()
                                 : link.get<std::string>();
      row.cycle = port.at("hyperperiod").get<Time>();
      for (const auto& w : port.at("windows")) {
        GanttBar bar{w.at("open").get<Time>(), w.at("close").get<Time>(), {}};
        if (bar.close <= bar.open) continue;
        if (w.contains("frames")) {
          for (const auto& f : w.at("frames")) {
            if (!bar.label.empty()) bar.label += ",";
            bar.label += f.at("stream").get<std::string>() + "#" + std::to_string(f.at("repetition").get<int>());
          }
        }
        row.bars.push_back(std::move(bar));
      }
      std::sort(row.bars.begin(), row.bars.end(), [](const auto& a, const auto& b) { return a.open < b.open; });
      rows.push_back(std::move(row));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("schedule: ") + e.what());
  }
  return rows;
}

std::string render_gantt(const std::vector<GanttRow>& rows, int width) {
  std::size_t name_width = 4;
  for (const auto& r : rows) name_width = std::max(name_width, r.link.size());

  std::ostringstream out;
  out << std::left << std::setw(static_cast<int>(name_width)) << "link" << "  " << std::right << std::setw(10)
      << "cycle_ns" << "  " << std::left << std::setw(width + 2) << "timeline" << "  windows\n";
  for (const auto& r : rows) {
    if (r.bars.empty()) continue;
    std::string bar(static_cast<std::size_t>(width), '.');
    for (int i = 0; i < width; ++i) {
      const Time lo = r.cycle * i / width;
      const Time hi = r.cycle * (i + 1) / width;
      for (const auto& b : r.bars) {
        if (b.open < std::max(hi, lo + 1) && b.close > lo) bar[static_cast<std::size_t>(i)] = '#';
      }
    }
    out << std::left << std::setw(static_cast<int>(name_width)) << r.link << "  " << std::right << std::setw(10)
        << r.cycle << "  |" << bar << "|  ";
    for (std::size_t k = 0; k < r.bars.size(); ++k) {
      const auto& b = r.bars[k];
      out << (k ? " " : "") << "[" << b.open << "," << b.close << "]";
      if (!b.label.empty()) out << " " << b.label;
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace tsn
