#pragma once

// Encode, solve, decode and validate in one call.

#include <optional>
#include <string>
#include <vector>

#include "tsn/config.hpp"
#include "tsn/netmodel.hpp"
#include "tsn/schedule.hpp"
#include "tsn/smtlib.hpp"
#include "tsn/validator.hpp"

namespace tsn {

struct Synthesis {
  SolverResult solver;
  std::optional<Schedule> schedule;  // set when the solver answered sat
  std::vector<Violation> violations;
  std::vector<std::string> warnings;
};

/// Minimizes by bisection when the configuration has an objective, unless the
/// options ask for native minimization. Encoding errors propagate.
Synthesis synthesize(const Instance& instance, const EncoderConfig& config, const SolverOptions& options);

}  // namespace tsn
