#include "tsn/ir.hpp"

#include "tsn/errors.hpp"

namespace tsn {

std::string_view to_string(Category c) {
  switch (c) {
    case Category::Bounds: return "bounds";
    case Category::OpenBeforeClose: return "open_before_close";
    case Category::EpsilonDomain: return "epsilon_domain";
    case Category::Ordering: return "ordering";
    case Category::Assignment: return "assignment";
    case Category::WindowSize: return "window_size";
    case Category::Precedence: return "precedence";
    case Category::Isolation: return "isolation";
    case Category::FifoConsistency: return "fifo_consistency";
    case Category::EndToEnd: return "e2e";
    case Category::Jitter: return "jitter";
    case Category::PeriodSlot: return "period_slot";
    case Category::SymmetryBreaking: return "symmetry_breaking";
    case Category::Pin: return "pin";
    case Category::ObjectiveBound: return "objective_bound";
  }
  return "unknown";
}

void ConstraintIR::declare(std::string name, Sort sort, VarInfo info) {
  if (metadata.contains(name)) throw EncodingError("variable '" + name + "' declared twice");
  variables.push_back(VarDecl{name, sort});
  metadata.emplace(std::move(name), info);
}

void ConstraintIR::add(Category category, Term formula) {
  if (formula.sort() != Sort::Bool) throw EncodingError("assertion is not boolean");
  assertions.push_back(Assertion{category, std::move(formula)});
}

std::map<Category, std::size_t> assertion_count(const ConstraintIR& ir) {
  std::map<Category, std::size_t> counts;
  for (int c = 0; c <= static_cast<int>(Category::ObjectiveBound); ++c) counts[static_cast<Category>(c)] = 0;
  for (const auto& a : ir.assertions) ++counts[a.category];
  return counts;
}

bool is_linear(const ConstraintIR& ir) {
  for (const auto& a : ir.assertions) {
    if (!is_linear(a.formula)) return false;
  }
  return !ir.objective || is_linear(ir.objective->expression);
}

}  // namespace tsn
