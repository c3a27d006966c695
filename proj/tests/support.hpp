#pragma once

// Instance builders and random generators shared by the unit tests and the
// acceptance suite.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "tsn/config.hpp"
#include "tsn/netmodel.hpp"
#include "tsn/schedule.hpp"
#include "tsn/smtlib.hpp"

namespace tsn::testing {

inline constexpr std::int64_t kGigabit = 1'000'000'000;
// 8 bits per ns with no overhead makes a frame last exactly size_bytes ns.
inline constexpr std::int64_t kByteNanoSpeed = 8'000'000'000;

struct Problem {
  TopologyDescription topology;
  std::vector<StreamSpec> streams;
  EncoderConfig config;

  Instance instance() const;
};

/// Directed path a -> b -> ... through a tree given as an edge list.
std::vector<VertexId> tree_path(const TopologyDescription& topo, const VertexId& from, const VertexId& to);

/// Switches sw1..swN in a chain, `hosts_per_switch` hosts hanging off each.
TopologyDescription line_topology(int switches, int hosts_per_switch, std::int64_t speed = kGigabit);
/// One switch with `hosts` hosts.
TopologyDescription star_topology(int hosts, std::int64_t speed = kGigabit);
/// Two switches v4 and v5; hosts v1..v3 on v4, hosts v6..v8 on v5.
TopologyDescription fig1_topology(std::int64_t speed = kGigabit);
/// End hosts of a generated topology (every vertex of degree one).
std::vector<VertexId> hosts_of(const TopologyDescription& topo);

/// Sets wmax (and optionally overhead) on every edge.
void set_edges(TopologyDescription& topo, std::optional<int> wmax, std::optional<int> overhead);

/// Desk-scale instance: 1 Gbit/s, 2-10 streams, periods in {250, 500, 1000} us.
/// Streams sharing a link get equal periods unless `mixed` is set, in which
/// case the config asks for multi-period mode.
Problem random_problem(std::mt19937_64& rng, int topology_kind, bool mixed,
                       const std::vector<Time>& periods = {250'000, 500'000, 1'000'000});

/// Tiny instance within the exhaustive oracle's limits: frames last their size
/// in ns, hyperperiods at most 16 ns, at most three busy links.
Problem tiny_problem(std::mt19937_64& rng);

/// Copy of a topology whose frames last exactly `size_bytes` ns on every link.
TopologyDescription byte_ns(TopologyDescription topo);

/// All windows [0,0] and no frame assigned.
Schedule blank_schedule(const Instance& inst);
/// Sets window k (1-based) of link from->to.
void place(Schedule& s, const Instance& inst, const std::string& from, const std::string& to, int k, Time open,
           Time close);
void assign(Schedule& s, const Instance& inst, std::size_t stream, const std::string& from, const std::string& to,
            int k, int repetition = 0);

/// Solver found by CMake; every test uses this one.
SolverOptions solver_options(double timeout_s = 60);

/// Path of the tsnsched binary under test.
std::string cli_path();

}  // namespace tsn::testing
