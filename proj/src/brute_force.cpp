#include <algorithm>
#include <functional>

#include "checker.hpp"
#include "tsn/errors.hpp"
#include "tsn/validator.hpp"

// Exhaustive search over grid-aligned schedules.
//
// Every constraint is a conjunction of comparisons between window bounds plus
// multiples of durations, periods, delta and the stream bounds. When the grid
// divides all of them, flooring every window of a feasible schedule to the grid
// keeps it feasible (sizes are grid multiples, so closes move with opens), so
// searching the grid alone decides feasibility. Window labels only matter for
// ordering and "same window" tests, so windows holding frames are numbered
// 1..b in time order and the remaining ones are parked as empty windows.

namespace tsn {
namespace {

struct Candidate {
  std::vector<WindowTimes> windows;
  std::vector<int> assignment;  // parallel to PortLayout::frames
};

void require(bool ok, const std::string& message) {
  if (!ok) throw ModelError("brute force: " + message);
}

void check_limits(const Instance& inst, const EncoderConfig& config, Time grid, std::vector<LinkId>& active) {
  require(grid > 0, "grid step must be positive");
  require(config.delta % grid == 0, "grid does not divide delta");
  for (const auto& f : inst.frames()) {
    require(f.duration % grid == 0, "grid does not divide a frame duration");
  }
  for (const auto& s : inst.streams()) {
    require(s.period % grid == 0 && s.e2e % grid == 0 && s.jitter % grid == 0,
            "grid does not divide the parameters of " + s.id);
    for (LinkId l : s.route) {
      if (std::find(active.begin(), active.end(), l) == active.end()) active.push_back(l);
    }
  }
  require(static_cast<int>(active.size()) <= kBruteForceMaxLinks, "too many links carry traffic");
  for (LinkId l : active) {
    const auto& port = inst.port(l);
    require(static_cast<int>(port.frames.size()) <= kBruteForceMaxFramesPerLink,
            "too many frames on " + inst.graph().link_name(l));
    require(port.hyperperiod / grid <= kBruteForceMaxSlots, "hyperperiod too long for the grid");
  }
}

// Every labelled split of n frames into b non-empty groups.
void ordered_partitions(std::size_t n, int max_groups, std::vector<std::vector<int>>& out) {
  std::vector<int> labels(n, 0);
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == n) {
      const int b = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end());
      std::vector<bool> used(b + 1, false);
      for (int x : labels) used[x] = true;
      if (std::all_of(used.begin() + 1, used.end(), [](bool u) { return u; })) out.push_back(labels);
      return;
    }
    for (int g = 1; g <= max_groups; ++g) {
      labels[i] = g;
      rec(i + 1);
    }
  };
  rec(0);
}

std::vector<Candidate> link_candidates(const Instance& inst, const EncoderConfig& config, LinkId l, Time grid) {
  const auto& port = inst.port(l);
  const auto n = port.frames.size();
  std::vector<std::vector<int>> partitions;
  ordered_partitions(n, std::min<int>(port.wmax, static_cast<int>(n)), partitions);

  std::vector<Candidate> out;
  for (const auto& labels : partitions) {
    const int b = *std::max_element(labels.begin(), labels.end());
    std::vector<Time> load(b, 0);
    for (std::size_t i = 0; i < n; ++i) load[labels[i] - 1] += inst.frames()[port.frames[i]].duration;

    std::vector<Time> opens(b, 0);
    std::function<void(int, Time)> place = [&](int k, Time earliest) {
      if (k == b) {
        Candidate c;
        c.assignment = labels;
        c.windows.resize(port.wmax);
        for (int w = 0; w < port.wmax; ++w) {
          if (w < b) {
            c.windows[w] = {opens[w], opens[w] + load[w]};
          } else {
            const Time parked = config.ordering == Ordering::Sequential ? c.windows[b - 1].close : 0;
            c.windows[w] = {parked, parked};
          }
        }
        out.push_back(std::move(c));
        return;
      }
      for (Time t = earliest; t + load[k] < port.hyperperiod; t += grid) {
        opens[k] = t;
        place(k + 1, t + load[k]);
      }
    };
    place(0, 0);
  }
  return out;
}

Schedule empty_schedule(const Instance& inst) {
  Schedule s;
  for (const auto& port : inst.ports()) {
    s.ports.push_back(PortSchedule{port.link, port.hyperperiod, std::vector<WindowTimes>(port.wmax)});
  }
  s.assignment.assign(inst.frames().size(), 0);
  return s;
}

BruteForceResult search(const Instance& inst, const EncoderConfig& config, Time grid,
                        std::optional<ObjectiveKind> objective) {
  std::vector<LinkId> active;
  check_limits(inst, config, grid, active);

  std::vector<std::vector<Candidate>> candidates;
  for (LinkId l : active) candidates.push_back(link_candidates(inst, config, l, grid));

  Schedule current = empty_schedule(inst);
  std::vector<bool> placed(inst.ports().size(), true);
  for (LinkId l : active) placed[l] = false;

  const detail::ScheduleChecker checker(inst, config, ValidatorOptions{});
  BruteForceResult result;

  std::function<bool(std::size_t)> dfs = [&](std::size_t depth) -> bool {
    ++result.explored;
    if (!checker.check(current, placed, nullptr, true)) return false;
    if (depth == active.size()) {
      if (!objective) {
        result.feasible = true;
        result.witness = current;
        return true;
      }
      const std::int64_t value = objective_value(current, inst, *objective);
      if (!result.best_objective || value < *result.best_objective) {
        result.feasible = true;
        result.best_objective = value;
        result.witness = current;
        result.witness->objective_value = value;
      }
      return false;
    }
    const LinkId l = active[depth];
    const auto& frames = inst.port(l).frames;
    placed[l] = true;
    for (const auto& c : candidates[depth]) {
      current.ports[l].windows = c.windows;
      for (std::size_t i = 0; i < frames.size(); ++i) current.assignment[frames[i]] = c.assignment[i];
      if (dfs(depth + 1)) return true;
    }
    placed[l] = false;
    for (std::size_t f : frames) current.assignment[f] = 0;
    return false;
  };
  dfs(0);
  return result;
}

}  // namespace

BruteForceResult brute_force_feasible(const Instance& instance, const EncoderConfig& config, Time grid_step) {
  return search(instance, config, grid_step, std::nullopt);
}

BruteForceResult brute_force_minimum(const Instance& instance, const EncoderConfig& config, Time grid_step,
                                     ObjectiveKind kind) {
  return search(instance, config, grid_step, kind);
}

}  // namespace tsn
