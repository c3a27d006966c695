// tsnsched: synthesize, check, simulate and draw 802.1Qbv window schedules.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "tsn/errors.hpp"
#include "tsn/gantt.hpp"
#include "tsn/pipeline.hpp"
#include "tsn/problem_io.hpp"
#include "tsn/simulator.hpp"

namespace {

enum Exit : int {
  kValidated = 0,
  kFailed = 1,  // validator or simulator found a problem
  kUnsat = 2,
  kUndecided = 3,
  kInputError = 4,
  kSolverError = 5,
};

struct ConfigFlags {
  std::string ordering;
  std::string arith;
  std::string objective;
  bool multi_period = false;
  std::optional<tsn::Time> delta;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--ordering", ordering, "Window ordering encoding")->check(CLI::IsMember({"seq", "pairwise"}));
    cmd->add_option("--arith", arith, "Arithmetic of the encoding")->check(CLI::IsMember({"lin", "nia"}));
    cmd->add_option("--objective", objective, "Optimization goal")->check(CLI::IsMember({"none", "e2e", "jitter"}));
    cmd->add_flag("--multi-period", multi_period, "Schedule every repetition inside its own period");
    cmd->add_option("--delta", delta, "Override the network precision (ns)");
  }

  void apply(tsn::EncoderConfig& c) const {
    if (!ordering.empty()) c.ordering = *tsn::parse_ordering(ordering);
    if (!arith.empty()) c.arithmetic = *tsn::parse_arithmetic(arith);
    if (!objective.empty()) c.objective = *tsn::parse_objective(objective);
    if (multi_period) c.multi_period = true;
    if (delta) c.delta = *delta;
  }
};

int exit_for(tsn::SolverStatus s) {
  switch (s) {
    case tsn::SolverStatus::Sat: return kValidated;
    case tsn::SolverStatus::Unsat: return kUnsat;
    case tsn::SolverStatus::Unknown:
    case tsn::SolverStatus::Timeout: return kUndecided;
    case tsn::SolverStatus::SolverError: return kSolverError;
  }
  return kSolverError;
}

int cmd_schedule(const std::string& problem_path, const std::string& out_dir, const ConfigFlags& flags,
                 const std::string& solver, double timeout, std::optional<std::uint64_t> seed,
                 const std::string& emit_smt, bool native_minimize) {
  tsn::Problem problem = tsn::read_problem(problem_path);
  flags.apply(problem.config);

  tsn::SolverOptions options;
  if (!solver.empty()) options.command = tsn::split_command(solver);
  options.timeout_s = timeout;
  options.random_seed = seed;
  options.native_minimize = native_minimize;
  if (!emit_smt.empty()) options.emit_path = emit_smt;

  const tsn::Synthesis result = tsn::synthesize(problem.instance, problem.config, options);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";

  std::filesystem::create_directories(out_dir);
  const auto path = [&](const char* name) { return (std::filesystem::path(out_dir) / name).string(); };
  tsn::write_text_file(path("status.json"), tsn::status_to_json(result.solver, result.warnings));
  std::cout << "status: " << tsn::to_string(result.solver.status) << " (" << result.solver.stats.wall_ms
            << " ms)\n";
  if (!result.solver.message.empty()) std::cerr << result.solver.message << "\n";
  if (!result.schedule) return exit_for(result.solver.status);

  const auto& schedule = *result.schedule;
  tsn::write_text_file(path("schedule.json"), tsn::schedule_to_json(schedule, problem.instance, "sat"));
  tsn::write_text_file(path("gcl.json"), tsn::gcl_to_json(schedule, problem.instance));
  tsn::write_text_file(path("validation.json"), tsn::violations_to_json(result.violations, problem.instance));
  if (schedule.objective_value) {
    std::cout << "objective: " << *schedule.objective_value << (result.solver.optimal ? "" : " (not proven optimal)")
              << "\n";
  }
  if (!result.violations.empty()) {
    std::cerr << "decoded schedule fails validation (" << result.violations.size() << " violations)\n";
    return kFailed;
  }
  std::cout << "written to " << out_dir << "\n";
  return kValidated;
}

int cmd_validate(const std::string& schedule_path, const std::string& problem_path, const ConfigFlags& flags,
                 const std::string& report_path) {
  tsn::Problem problem = tsn::read_problem(problem_path);
  flags.apply(problem.config);
  const tsn::Schedule schedule = tsn::read_schedule(schedule_path, problem.instance);
  const auto violations = tsn::check_schedule(schedule, problem.instance, problem.config);
  const std::string report = tsn::violations_to_json(violations, problem.instance);
  if (report_path.empty()) {
    std::cout << report << "\n";
  } else {
    tsn::write_text_file(report_path, report);
  }
  return violations.empty() ? kValidated : kFailed;
}

int cmd_simulate(const std::string& schedule_path, const std::string& problem_path, const ConfigFlags& flags,
                 int hyperperiods, std::optional<std::uint64_t> seed, bool probe_losses, const std::string& trace_path,
                 const std::string& summary_path) {
  tsn::Problem problem = tsn::read_problem(problem_path);
  flags.apply(problem.config);
  const tsn::Schedule schedule = tsn::read_schedule(schedule_path, problem.instance);

  tsn::SimConfig sim;
  sim.hyperperiods = hyperperiods;
  if (seed) {
    sim.seed = *seed;
    sim.clock_offset = tsn::random_clock_offsets(problem.instance.graph(), problem.config.delta, *seed);
  }
  const tsn::SimTrace trace = tsn::simulate(problem.instance, schedule, sim);
  if (!trace_path.empty()) {
    std::ofstream out(trace_path);
    if (!out) throw std::runtime_error("cannot write " + trace_path);
    tsn::write_trace_jsonl(trace, problem.instance, out);
  }
  const std::string summary = tsn::summary_json(trace, problem.instance);
  if (summary_path.empty()) {
    std::cout << summary << "\n";
  } else {
    tsn::write_text_file(summary_path, summary);
  }

  bool clean = true;
  for (const auto& issue : tsn::check_conformance(trace, problem.instance, schedule, problem.config, sim)) {
    std::cerr << "conformance: " << issue << "\n";
    clean = false;
  }
  if (probe_losses) {
    const auto report = tsn::isolation_probe(problem.instance, schedule, sim);
    std::cout << tsn::isolation_report_to_json(report, problem.instance) << "\n";
    clean = clean && report.deterministic;
  }
  return clean ? kValidated : kFailed;
}

int cmd_gantt(const std::string& schedule_path) {
  std::cout << tsn::render_gantt(tsn::gantt_rows(tsn::read_text_file(schedule_path)));
  return kValidated;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Window-based 802.1Qbv schedule synthesis"};
  app.require_subcommand(1);

  std::string problem_path;
  std::string schedule_path;
  ConfigFlags flags;

  auto* schedule = app.add_subcommand("schedule", "Synthesize a schedule for a problem file");
  std::string out_dir = "out";
  std::string solver;
  double timeout = 60;
  std::optional<std::uint64_t> seed;
  std::string emit_smt;
  bool native_minimize = false;
  schedule->add_option("problem", problem_path, "Problem JSON")->required();
  schedule->add_option("-o,--out", out_dir, "Output directory")->capture_default_str();
  schedule->add_option("--solver", solver, "Solver command line (default: $TSN_SOLVER or 'z3 -in -smt2')");
  schedule->add_option("--timeout", timeout, "Seconds per solver call")->check(CLI::PositiveNumber);
  schedule->add_option("--seed", seed, "Solver random seed");
  schedule->add_option("--emit-smt", emit_smt, "Also write the SMT-LIB2 document here");
  schedule->add_flag("--native-minimize", native_minimize, "Let the solver minimize instead of bisecting");
  flags.add_to(schedule);

  auto* validate = app.add_subcommand("validate", "Check a schedule file against a problem");
  std::string report_path;
  validate->add_option("schedule", schedule_path, "Schedule JSON")->required();
  validate->add_option("problem", problem_path, "Problem JSON")->required();
  validate->add_option("-o,--out", report_path, "Write the violation report here instead of stdout");
  flags.add_to(validate);

  auto* simulate = app.add_subcommand("simulate", "Run the gate control lists of a schedule");
  int hyperperiods = 2;
  bool loss = false;
  std::string trace_path;
  std::string summary_path;
  simulate->add_option("schedule", schedule_path, "Schedule JSON")->required();
  simulate->add_option("problem", problem_path, "Problem JSON")->required();
  simulate->add_option("--hyperperiods", hyperperiods, "Simulated span")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", seed, "Draw clock offsets within the network precision from this seed");
  simulate->add_flag("--loss", loss, "Probe every single-frame loss for window shifts");
  simulate->add_option("--trace", trace_path, "Write the event trace as JSON lines");
  simulate->add_option("--summary", summary_path, "Write the summary here instead of stdout");
  flags.add_to(simulate);

  auto* gantt = app.add_subcommand("gantt", "Draw a schedule file as text");
  gantt->add_option("schedule", schedule_path, "Schedule JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kInputError;
  }

  try {
    if (*schedule) {
      return cmd_schedule(problem_path, out_dir, flags, solver, timeout, seed, emit_smt, native_minimize);
    }
    if (*validate) return cmd_validate(schedule_path, problem_path, flags, report_path);
    if (*simulate) {
      return cmd_simulate(schedule_path, problem_path, flags, hyperperiods, seed, loss, trace_path, summary_path);
    }
    if (*gantt) return cmd_gantt(schedule_path);
  } catch (const tsn::ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const tsn::ModelError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const tsn::UnsupportedFeature& e) {
    std::cerr << "unsupported: " << e.what() << "\n";
    return kInputError;
  } catch (const tsn::EncodingError& e) {
    std::cerr << "encoding error: " << e.what() << "\n";
    return kInputError;
  } catch (const tsn::DecodeError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kSolverError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailed;
  }
  return kFailed;
}
