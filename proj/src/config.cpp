#include "tsn/config.hpp"

namespace tsn {

std::string_view to_string(Ordering o) { return o == Ordering::Sequential ? "seq" : "pairwise"; }
std::string_view to_string(Arithmetic a) { return a == Arithmetic::Linearized ? "lin" : "nia"; }

std::string_view to_string(ObjectiveKind k) {
  switch (k) {
    case ObjectiveKind::None: return "none";
    case ObjectiveKind::MinE2eSum: return "e2e";
    case ObjectiveKind::MinJitterSum: return "jitter";
  }
  return "none";
}

std::optional<Ordering> parse_ordering(std::string_view s) {
  if (s == "seq" || s == "sequential") return Ordering::Sequential;
  if (s == "pairwise" || s == "pairwise-disjunction" || s == "pairwise_disjunction") return Ordering::Pairwise;
  return std::nullopt;
}

std::optional<Arithmetic> parse_arithmetic(std::string_view s) {
  if (s == "lin" || s == "linearized" || s == "linear") return Arithmetic::Linearized;
  if (s == "nia" || s == "nonlinear") return Arithmetic::Nonlinear;
  return std::nullopt;
}

std::optional<ObjectiveKind> parse_objective(std::string_view s) {
  if (s == "none") return ObjectiveKind::None;
  if (s == "e2e" || s == "min-e2e-sum" || s == "min_e2e_sum") return ObjectiveKind::MinE2eSum;
  if (s == "jitter" || s == "min-jitter-sum" || s == "min_jitter_sum") return ObjectiveKind::MinJitterSum;
  return std::nullopt;
}

}  // namespace tsn
