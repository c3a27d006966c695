#pragma once

// Ground-truth checks of a concrete schedule with plain integer arithmetic,
// and an exhaustive scheduling oracle for tiny instances. Nothing here goes
// through the constraint IR.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tsn/config.hpp"
#include "tsn/netmodel.hpp"
#include "tsn/schedule.hpp"

namespace tsn {

struct Violation {
  std::string family;
  std::optional<LinkId> link;
  std::optional<int> window;
  std::optional<std::size_t> stream;
  std::string message;
};

struct ValidatorOptions {
  // Evaluate isolation with the flag-times-value products taken literally
  // instead of only over the windows the frames actually use.
  bool verbatim_isolation = false;
};

/// Every violated constraint; empty means the schedule is valid.
/// Throws ModelError when the schedule does not fit the instance's shape.
std::vector<Violation> check_schedule(const Schedule& schedule, const Instance& instance,
                                      const EncoderConfig& config, const ValidatorOptions& options = {});

/// Objective value of a schedule computed from window times directly.
std::int64_t objective_value(const Schedule& schedule, const Instance& instance, ObjectiveKind kind);

struct BruteForceResult {
  bool feasible = false;
  std::optional<Schedule> witness;
  std::optional<std::int64_t> best_objective;  // brute_force_minimum only
  std::size_t explored = 0;
};

/// Limits of the exhaustive oracle.
inline constexpr int kBruteForceMaxLinks = 3;
inline constexpr int kBruteForceMaxFramesPerLink = 3;
inline constexpr std::int64_t kBruteForceMaxSlots = 64;

/// Enumerates every window placement on the grid and every frame assignment.
/// The grid step must divide every duration, period, bound and delta.
/// Throws ModelError when the instance exceeds the oracle's limits.
BruteForceResult brute_force_feasible(const Instance& instance, const EncoderConfig& config, Time grid_step);

/// Exhaustive minimum of an objective over all feasible grid schedules.
BruteForceResult brute_force_minimum(const Instance& instance, const EncoderConfig& config, Time grid_step,
                                     ObjectiveKind kind);

}  // namespace tsn
