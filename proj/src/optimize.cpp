#include <fstream>
#include <stdexcept>

#include "tsn/errors.hpp"
#include "tsn/smtlib.hpp"

namespace tsn {
namespace {

SolverResult probe(const ConstraintIR& ir, const SolverOptions& options, EmitOptions emit, bool persist) {
  emit.random_seed = options.random_seed;
  const std::string document = emit_smtlib(ir, minimal_logic(ir), emit);
  if (persist && options.emit_path) {
    std::ofstream out(*options.emit_path);
    if (!out) throw std::runtime_error("cannot write " + *options.emit_path);
    out << document;
  }
  SolverResult r = run_solver(document, options.command, options.timeout_s);
  r.stats.assertions = ir.assertions.size() + emit.extra.size();
  r.stats.probes = 1;
  if (r.status == SolverStatus::Sat && ir.objective) {
    r.objective_value = evaluate(ir.objective->expression, *r.model);
  }
  return r;
}

}  // namespace

SolverResult solve(const ConstraintIR& ir, const SolverOptions& options) {
  EmitOptions emit;
  emit.minimize = options.native_minimize && ir.objective.has_value();
  SolverResult r = probe(ir, options, emit, true);
  r.optimal = !ir.objective || emit.minimize;
  return r;
}

SolverResult optimize_by_bisection(const ConstraintIR& ir, const SolverOptions& options) {
  if (!ir.objective) throw std::invalid_argument("bisection needs an objective");
  const Term& objective = ir.objective->expression;

  SolverResult best = probe(ir, options, {}, true);
  if (best.status != SolverStatus::Sat) return best;

  double wall_ms = best.stats.wall_ms;
  int probes = 1;
  std::vector<std::int64_t> bounds;
  std::int64_t lo = ir.objective->lower_bound;
  std::int64_t hi = *best.objective_value;
  bool optimal = true;

  // Invariant: a model with value hi is known; nothing below lo exists.
  while (lo < hi) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    bounds.push_back(mid);
    EmitOptions emit;
    emit.extra.push_back(le(objective, int_const(mid)));
    SolverResult r = probe(ir, options, emit, false);
    wall_ms += r.stats.wall_ms;
    ++probes;
    if (r.status == SolverStatus::Sat) {
      hi = *r.objective_value;
      best = std::move(r);
    } else if (r.status == SolverStatus::Unsat) {
      lo = mid + 1;
    } else {
      optimal = false;
      break;
    }
  }

  best.stats.wall_ms = wall_ms;
  best.stats.probes = probes;
  best.stats.assertions = ir.assertions.size();
  best.probed_bounds = std::move(bounds);
  best.optimal = optimal;
  best.objective_value = hi;
  return best;
}

}  // namespace tsn
