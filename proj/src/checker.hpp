#pragma once

#include <vector>

#include "tsn/validator.hpp"

namespace tsn::detail {

/// Constraint evaluation restricted to a set of placed links. A constraint is
/// evaluated only when every link it mentions is placed.
class ScheduleChecker {
 public:
  ScheduleChecker(const Instance& instance, const EncoderConfig& config, const ValidatorOptions& options)
      : instance_(instance), config_(config), options_(options) {}

  /// Appends violations to `out`; with first_only it stops at the first one.
  /// Returns true when nothing was violated.
  bool check(const Schedule& schedule, const std::vector<bool>& placed, std::vector<Violation>* out,
             bool first_only) const;

 private:
  const Instance& instance_;
  const EncoderConfig& config_;
  const ValidatorOptions& options_;
};

}  // namespace tsn::detail
