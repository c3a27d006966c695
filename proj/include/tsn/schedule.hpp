#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "tsn/netmodel.hpp"

namespace tsn {

struct WindowTimes {
  Time open = 0;
  Time close = 0;

  Time size() const { return close - open; }
  friend bool operator==(const WindowTimes&, const WindowTimes&) = default;
};

/// Concrete Gate Control List of one egress port; windows[k - 1] is window k.
struct PortSchedule {
  LinkId link = 0;
  Time hyperperiod = 0;
  std::vector<WindowTimes> windows;
};

/// A solved schedule: concrete windows for every port plus the frame-to-window map.
struct Schedule {
  std::vector<PortSchedule> ports;  // indexed by LinkId
  std::vector<int> assignment;      // per frame instance: window index, 1-based; 0 = unassigned
  std::optional<std::int64_t> objective_value;
};

/// Frame instances assigned to window k of a link, in frame order.
std::vector<std::size_t> frames_in_window(const Schedule& schedule, const Instance& instance,
                                          LinkId link, int window);

}  // namespace tsn
