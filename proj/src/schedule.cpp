#include "tsn/schedule.hpp"

namespace tsn {

std::vector<std::size_t> frames_in_window(const Schedule& schedule, const Instance& instance, LinkId link,
                                          int window) {
  std::vector<std::size_t> out;
  for (std::size_t f : instance.port(link).frames) {
    if (schedule.assignment.at(f) == window) out.push_back(f);
  }
  return out;
}

}  // namespace tsn
