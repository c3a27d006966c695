#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tsn/expr.hpp"
#include "tsn/netmodel.hpp"

namespace tsn {

/// Constraint family of an assertion, used for counting and reporting.
enum class Category {
  Bounds,
  OpenBeforeClose,
  EpsilonDomain,
  Ordering,
  Assignment,
  WindowSize,
  Precedence,
  Isolation,
  FifoConsistency,
  EndToEnd,
  Jitter,
  PeriodSlot,
  SymmetryBreaking,
  Pin,
  ObjectiveBound,
};

std::string_view to_string(Category c);

enum class VarRole { Open, Close, Epsilon };

struct VarDecl {
  std::string name;
  Sort sort = Sort::Int;
};

/// What a solver variable stands for.
struct VarInfo {
  LinkId link = 0;
  int window = 0;  // 1-based
  VarRole role = VarRole::Open;
  std::optional<std::size_t> frame;  // epsilon only
};

struct Assertion {
  Category category = Category::Bounds;
  Term formula;
};

struct Objective {
  Term expression;
  // Analytic floor of the expression over all schedules.
  std::int64_t lower_bound = 0;
  // Any schedule's value is at most this.
  std::int64_t upper_bound = 0;
};

/// Window and assignment variables of one egress port, by window index - 1.
struct PortVariables {
  LinkId link = 0;
  Time hyperperiod = 0;
  std::vector<std::string> open;
  std::vector<std::string> close;
  // eps[local frame][window - 1]
  std::vector<std::vector<std::string>> eps;
};

struct ConstraintIR {
  std::vector<VarDecl> variables;
  std::vector<Assertion> assertions;
  std::optional<Objective> objective;
  std::map<std::string, VarInfo> metadata;
  std::vector<PortVariables> ports;  // indexed by LinkId

  void declare(std::string name, Sort sort, VarInfo info);
  void add(Category category, Term formula);
  bool is_declared(const std::string& name) const { return metadata.contains(name); }
};

/// Per-category assertion totals; categories without assertions map to 0.
std::map<Category, std::size_t> assertion_count(const ConstraintIR& ir);

/// True when no assertion or objective multiplies two variables.
bool is_linear(const ConstraintIR& ir);

}  // namespace tsn
