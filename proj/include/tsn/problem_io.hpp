#pragma once

// JSON files exchanged by the command-line tool: problems, schedules, Gate
// Control Lists and reports.

#include <string>
#include <vector>

#include "tsn/config.hpp"
#include "tsn/netmodel.hpp"
#include "tsn/schedule.hpp"
#include "tsn/simulator.hpp"
#include "tsn/smtlib.hpp"
#include "tsn/validator.hpp"

namespace tsn {

struct Problem {
  Instance instance;
  EncoderConfig config;
};

/// Throws ParseError for malformed JSON or missing fields and ModelError for
/// inconsistent topologies or streams.
Problem parse_problem(const std::string& text);
Problem read_problem(const std::string& path);

/// Writes a problem back out; parse_problem(problem_to_json(p)) rebuilds p.
std::string problem_to_json(const TopologyDescription& topology, const std::vector<StreamSpec>& streams,
                            const EncoderConfig& config);

/// Decoded schedule: windows per port with the frames each one carries.
std::string schedule_to_json(const Schedule& schedule, const Instance& instance, std::string_view status);
/// Inverse of schedule_to_json; throws ParseError for unknown links or streams.
Schedule parse_schedule(const std::string& text, const Instance& instance);
Schedule read_schedule(const std::string& path, const Instance& instance);

/// Gate Control List of every port: open/closed entries covering one cycle.
std::string gcl_to_json(const Schedule& schedule, const Instance& instance);

std::string violations_to_json(const std::vector<Violation>& violations, const Instance& instance);

std::string status_to_json(const SolverResult& result, const std::vector<std::string>& warnings);

std::string isolation_report_to_json(const IsolationReport& report, const Instance& instance);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace tsn
