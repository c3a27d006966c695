#pragma once

#include <optional>
#include <string_view>

#include "tsn/netmodel.hpp"

namespace tsn {

enum class Ordering { Sequential, Pairwise };
enum class Arithmetic { Linearized, Nonlinear };
enum class ObjectiveKind { None, MinE2eSum, MinJitterSum };

/// Scheduling options shared by the encoder, the validator and the CLI.
struct EncoderConfig {
  Time delta = 0;  // network precision: worst-case clock difference between two nodes
  Ordering ordering = Ordering::Sequential;
  Arithmetic arithmetic = Arithmetic::Linearized;
  bool multi_period = false;
  ObjectiveKind objective = ObjectiveKind::None;
  // Empty windows sort after non-empty ones (sequential ordering only).
  bool symmetry_breaking = false;
  // Same-ingress stream pairs get the isolation disjunction too; without it a
  // FIFO queue can hand a window to a frame assigned elsewhere.
  bool fifo_consistency = true;
};

std::string_view to_string(Ordering o);
std::string_view to_string(Arithmetic a);
std::string_view to_string(ObjectiveKind k);

std::optional<Ordering> parse_ordering(std::string_view s);
std::optional<Arithmetic> parse_arithmetic(std::string_view s);
std::optional<ObjectiveKind> parse_objective(std::string_view s);

}  // namespace tsn
