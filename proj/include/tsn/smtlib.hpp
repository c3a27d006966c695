#pragma once

// SMT-LIB2 emission, external solver driver and model decoding.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tsn/expr.hpp"
#include "tsn/ir.hpp"
#include "tsn/netmodel.hpp"
#include "tsn/schedule.hpp"

namespace tsn {

enum class Logic { QF_LIA, QF_NIA };

std::string_view to_string(Logic logic);

/// QF_LIA for linear IRs, QF_NIA otherwise.
Logic minimal_logic(const ConstraintIR& ir);

struct EmitOptions {
  // Emit (minimize <objective>) before check-sat; needs an optimizing solver.
  bool minimize = false;
  // Extra assertions appended after the IR, e.g. objective bounds during bisection.
  std::vector<Term> extra;
  std::optional<std::uint64_t> random_seed;
};

/// Deterministic SMT-LIB2 document; throws EncodingError for nonlinear terms under QF_LIA.
std::string emit_smtlib(const ConstraintIR& ir, Logic logic, const EmitOptions& options = {});

enum class SolverStatus { Sat, Unsat, Unknown, Timeout, SolverError };

std::string_view to_string(SolverStatus s);

struct SolverStats {
  double wall_ms = 0;
  std::size_t assertions = 0;
  int probes = 0;
};

struct SolverResult {
  SolverStatus status = SolverStatus::SolverError;
  std::optional<Model> model;  // present iff status == Sat
  std::optional<std::int64_t> objective_value;
  SolverStats stats;
  // False when an optimization run stopped before proving optimality.
  bool optimal = true;
  // Objective bounds asserted by successive bisection probes.
  std::vector<std::int64_t> probed_bounds;
  std::string raw_output;
  std::string message;
};

/// Splits a command line on whitespace.
std::vector<std::string> split_command(std::string_view command);

/// $TSN_SOLVER if set, otherwise "z3 -in -smt2".
std::vector<std::string> default_solver_command();

/// Parses "sat"/"unsat"/"unknown" followed by an optional get-model answer.
SolverResult parse_solver_output(std::string_view output);

/// Runs the solver with the document on stdin; kills it once timeout_s elapses.
SolverResult run_solver(const std::string& document, std::span<const std::string> command, double timeout_s);

/// Concrete windows and the frame-to-window map of a sat result.
/// Throws DecodeError for missing variables or a frame without exactly one window.
Schedule decode_model(const SolverResult& result, const ConstraintIR& ir, const Instance& instance);

struct SolverOptions {
  std::vector<std::string> command = default_solver_command();
  double timeout_s = 60;
  std::optional<std::string> emit_path;  // persist the (first) document for audit
  bool native_minimize = false;          // use (minimize) instead of bisection
  std::optional<std::uint64_t> random_seed;
};

/// One solver call; minimizes natively when requested and the IR has an objective.
SolverResult solve(const ConstraintIR& ir, const SolverOptions& options);

/// Minimizes ir.objective by binary search on an asserted upper bound.
SolverResult optimize_by_bisection(const ConstraintIR& ir, const SolverOptions& options);

}  // namespace tsn
