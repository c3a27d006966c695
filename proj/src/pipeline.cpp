#include "tsn/pipeline.hpp"

#include "tsn/encoder.hpp"

namespace tsn {

Synthesis synthesize(const Instance& instance, const EncoderConfig& config, const SolverOptions& options) {
  Synthesis out;
  out.warnings = preflight_warnings(instance, config);
  const ConstraintIR ir = encode(instance, config);
  const bool bisect = ir.objective.has_value() && !options.native_minimize;
  out.solver = bisect ? optimize_by_bisection(ir, options) : solve(ir, options);
  if (out.solver.status != SolverStatus::Sat) return out;
  Schedule schedule = decode_model(out.solver, ir, instance);
  out.violations = check_schedule(schedule, instance, config);
  out.schedule = std::move(schedule);
  return out;
}

}  // namespace tsn
