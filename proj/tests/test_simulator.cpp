#include <algorithm>
#include <random>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "support.hpp"
#include "tsn/errors.hpp"
#include "tsn/simulator.hpp"
#include "tsn/validator.hpp"

using namespace tsn;
using namespace tsn::testing;

namespace {

Problem single_hop() {
  Problem p;
  p.topology = byte_ns({{"a", "b"}, {{"a", "b", 0, {}, {}}}});
  p.streams = {{"s", {"a", "b"}, 4, 16, 16, 0}};
  return p;
}

Problem two_hop() {
  Problem p;
  p.topology = byte_ns({{"a", "b", "c"}, {{"a", "b", 0, {}, {}}, {"b", "c", 0, {}, {}}}});
  p.streams = {{"s", {"a", "b", "c"}, 2, 16, 8, 0}};
  p.config.delta = 1;
  return p;
}

Schedule two_hop_schedule(const Instance& inst) {
  Schedule s = blank_schedule(inst);
  place(s, inst, "a", "b", 1, 0, 2);
  place(s, inst, "b", "c", 1, 3, 5);
  assign(s, inst, 0, "a", "b", 1);
  assign(s, inst, 0, "b", "c", 1);
  return s;
}

// sa: a->x->c, sb: b->x->c; they meet on x->c.
Problem merge() {
  Problem p;
  p.topology = byte_ns({{"x", "a", "b", "c"}, {{"a", "x", 0, {}, {}}, {"b", "x", 0, {}, {}}, {"x", "c", 0, {}, {}}}});
  p.streams = {{"sa", {"a", "x", "c"}, 2, 16, 16, 16}, {"sb", {"b", "x", "c"}, 2, 16, 16, 16}};
  return p;
}

Schedule merge_ingress(const Instance& inst) {
  Schedule s = blank_schedule(inst);
  place(s, inst, "a", "x", 1, 0, 2);
  place(s, inst, "b", "x", 1, 0, 2);
  assign(s, inst, 0, "a", "x", 1);
  assign(s, inst, 1, "b", "x", 1);
  assign(s, inst, 0, "x", "c", 1);
  return s;
}

std::vector<std::string> families_of(const std::vector<Violation>& v) {
  std::vector<std::string> out;
  for (const auto& x : v) out.push_back(x.family);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Every pair of transmissions on one link is disjoint in time.
bool links_carry_one_frame_at_a_time(const SimTrace& trace) {
  std::map<LinkId, std::vector<std::pair<Time, Time>>> busy;
  for (const auto& r : trace.hops) {
    if (r.start) busy[r.link].push_back({*r.start, *r.end});
  }
  for (auto& [link, spans] : busy) {
    std::sort(spans.begin(), spans.end());
    for (std::size_t i = 1; i < spans.size(); ++i) {
      if (spans[i].first < spans[i - 1].second) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("an exact-fit window delivers after one frame time with no jitter") {
  const Problem p = single_hop();
  const Instance inst = p.instance();
  Schedule s = blank_schedule(inst);
  place(s, inst, "a", "b", 1, 2, 6);
  assign(s, inst, 0, "a", "b", 1);
  SimConfig cfg;
  cfg.hyperperiods = 3;
  const SimTrace t = simulate(inst, s, cfg);
  REQUIRE(t.repetitions_of(0) == 3);
  for (std::int64_t g = 0; g < 3; ++g) {
    const HopRecord& r = t.record(0, g, 0);
    CHECK(*r.start == 2 + 16 * g);
    CHECK(*r.end == 6 + 16 * g);
    CHECK(r.slot == GateSlot{1, g});
    CHECK(t.streams[0].e2e[g] == 4);
  }
  CHECK(*t.streams[0].max_e2e == 4);
  CHECK(*t.streams[0].jitter == 0);
  CHECK(t.streams[0].delivered == 3);
  CHECK(check_conformance(t, inst, s, p.config, cfg).empty());

  std::vector<EventKind> first;
  for (const auto& e : t.events) {
    if (e.time <= 6) first.push_back(e.kind);
  }
  // Gates open before releases that fall on the same instant.
  CHECK(first == std::vector<EventKind>{EventKind::GateOpen, EventKind::Release, EventKind::Enqueue,
                                        EventKind::TxStart, EventKind::TxEnd, EventKind::Deliver});
}

TEST_CASE("propagation delay is added per hop") {
  const Problem p = two_hop();
  const Instance inst = p.instance();
  Schedule s = two_hop_schedule(inst);
  SimConfig cfg;
  cfg.propagation_delay = 1;
  const SimTrace t = simulate(inst, s, cfg);
  CHECK(*t.record(0, 0, 1).enqueue == 3);
  CHECK(*t.record(0, 0, 1).start == 3);
  CHECK(t.streams[0].e2e[0] == 6);
}

TEST_CASE("frames sharing a window leave in arrival order") {
  const Problem p = merge();
  const Instance inst = p.instance();
  Schedule s = merge_ingress(inst);
  place(s, inst, "b", "x", 1, 1, 3);
  place(s, inst, "x", "c", 1, 3, 7);
  place(s, inst, "x", "c", 2, 7, 7);
  assign(s, inst, 1, "x", "c", 1);
  REQUIRE(check_schedule(s, inst, p.config).empty());
  const SimTrace t = simulate(inst, s, SimConfig{});
  CHECK(*t.record(0, 0, 1).start == 3);
  CHECK(*t.record(1, 0, 1).start == 5);
  CHECK(t.record(1, 0, 1).slot == GateSlot{1, 0});
  CHECK(links_carry_one_frame_at_a_time(t));
  CHECK(check_conformance(t, inst, s, p.config, SimConfig{}).empty());
}

TEST_CASE("a frame that does not fit the rest of the window waits for the next cycle") {
  const Problem p = two_hop();
  const Instance inst = p.instance();
  const Schedule s = two_hop_schedule(inst);
  SimConfig cfg;
  cfg.hyperperiods = 2;
  // b runs two ahead of a: its gate [3,5] opens at global 1 and has 1 ns left when the frame arrives at 2.
  cfg.clock_offset = {{"a", 0}, {"b", 2}, {"c", 0}};
  const SimTrace t = simulate(inst, s, cfg);
  CHECK(*t.record(0, 0, 1).start == 17);
  CHECK(t.record(0, 0, 1).slot == GateSlot{1, 1});
  CHECK_FALSE(check_conformance(t, inst, s, p.config, cfg).empty());
}

TEST_CASE("offsets within delta keep a valid schedule conformant") {
  const Problem p = two_hop();
  const Instance inst = p.instance();
  const Schedule s = two_hop_schedule(inst);
  REQUIRE(check_schedule(s, inst, p.config).empty());
  for (int mask = 0; mask < 8; ++mask) {
    SimConfig cfg;
    cfg.hyperperiods = 2;
    cfg.clock_offset = {{"a", mask & 1}, {"b", (mask >> 1) & 1}, {"c", (mask >> 2) & 1}};
    const SimTrace t = simulate(inst, s, cfg);
    CAPTURE(mask);
    CHECK(check_conformance(t, inst, s, p.config, cfg).empty());
    CHECK(*t.streams[0].max_e2e <= 8);
    CHECK(t.streams[0].delivered == 2);
  }
}

TEST_CASE("random clock offsets stay within the spread") {
  const auto g = build_graph(line_topology(3, 2));
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto offsets = random_clock_offsets(g, 1000, seed);
    CHECK(offsets.size() == g.vertices().size());
    Time lo = 0;
    Time hi = 0;
    for (const auto& [v, o] : offsets) {
      CHECK(o >= -500);
      CHECK(o <= 500);
      lo = std::min(lo, o);
      hi = std::max(hi, o);
    }
    CHECK(hi - lo <= 1000);
    CHECK(random_clock_offsets(g, 1000, seed) == offsets);
  }
  for (const auto& [v, o] : random_clock_offsets(g, 0, 1)) CHECK(o == 0);
  CHECK_THROWS_AS(random_clock_offsets(g, -1, 1), ModelError);
}

TEST_CASE("malformed gate lists are rejected") {
  const Problem p = two_hop();
  Problem wide = p;
  wide.topology.edges[0].wmax = 2;
  const Instance inst = wide.instance();
  Schedule s = blank_schedule(inst);
  place(s, inst, "a", "b", 1, 0, 4);
  place(s, inst, "a", "b", 2, 2, 6);
  place(s, inst, "b", "c", 1, 7, 9);
  assign(s, inst, 0, "a", "b", 1);
  assign(s, inst, 0, "b", "c", 1);
  CHECK_THROWS_AS(simulate(inst, s, SimConfig{}), ModelError);

  place(s, inst, "a", "b", 2, 14, 18);
  CHECK_THROWS_AS(simulate(inst, s, SimConfig{}), ModelError);

  place(s, inst, "a", "b", 2, 4, 4);
  CHECK_NOTHROW(simulate(inst, s, SimConfig{}));
  s.assignment[0] = 0;
  CHECK_THROWS_AS(simulate(inst, s, SimConfig{}), ModelError);

  SimConfig zero;
  zero.hyperperiods = 0;
  CHECK_THROWS_AS(simulate(inst, two_hop_schedule(p.instance()), zero), ModelError);
}

TEST_CASE("isolation probe: frames in separate windows shift when a neighbour is lost") {
  const Problem p = merge();
  const Instance inst = p.instance();
  Schedule s = merge_ingress(inst);
  place(s, inst, "x", "c", 1, 2, 4);
  place(s, inst, "x", "c", 2, 4, 6);
  assign(s, inst, 1, "x", "c", 2);
  REQUIRE(families_of(check_schedule(s, inst, p.config)) == std::vector<std::string>{"isolation"});

  const IsolationReport report = isolation_probe(inst, s, SimConfig{});
  CHECK(report.scenarios == 2);
  CHECK_FALSE(report.deterministic);
  REQUIRE(report.shifts.size() == 1);
  const WindowShift& shift = report.shifts[0];
  CHECK(shift.scenario == LossEvent{0, 0, 0});
  CHECK(shift.stream == 1);
  CHECK(shift.hop == 1);
  CHECK(shift.baseline == GateSlot{2, 0});
  CHECK(shift.observed == GateSlot{1, 0});
}

TEST_CASE("isolation probe: shared windows and disjoint paths are deterministic") {
  const Problem p = merge();
  const Instance inst = p.instance();
  Schedule s = merge_ingress(inst);
  place(s, inst, "x", "c", 1, 2, 6);
  place(s, inst, "x", "c", 2, 6, 6);
  assign(s, inst, 1, "x", "c", 1);
  REQUIRE(check_schedule(s, inst, p.config).empty());
  SimConfig cfg;
  cfg.hyperperiods = 2;
  int runs = 0;
  const IsolationReport report = isolation_probe(inst, s, cfg, [&](const auto& loss, const SimTrace& t, const SimConfig& c) {
    ++runs;
    CHECK(c.losses.size() == (loss ? 1u : 0u));
    CHECK(check_conformance(t, inst, s, p.config, c).empty());
  });
  CHECK(report.deterministic);
  CHECK(report.scenarios == 4);
  CHECK(runs == 5);

  Problem apart;
  // Both streams cross b but share no link.
  apart.topology = byte_ns({{"a", "b", "c", "d", "e"},
                            {{"a", "b", 0, {}, {}}, {"b", "c", 0, {}, {}}, {"d", "b", 0, {}, {}}, {"b", "e", 0, {}, {}}}});
  apart.streams = {{"s1", {"a", "b", "c"}, 2, 8, 8, 8}, {"s2", {"d", "b", "e"}, 2, 8, 8, 8}};
  const Instance ai = apart.instance();
  Schedule as = blank_schedule(ai);
  place(as, ai, "a", "b", 1, 0, 2);
  place(as, ai, "b", "c", 1, 2, 4);
  place(as, ai, "d", "b", 1, 0, 2);
  place(as, ai, "b", "e", 1, 2, 4);
  assign(as, ai, 0, "a", "b", 1);
  assign(as, ai, 0, "b", "c", 1);
  assign(as, ai, 1, "d", "b", 1);
  assign(as, ai, 1, "b", "e", 1);
  REQUIRE(check_schedule(as, ai, apart.config).empty());
  const IsolationReport r2 = isolation_probe(ai, as, SimConfig{});
  CHECK(r2.deterministic);
  CHECK(r2.scenarios == 2);
}

TEST_CASE("simulation is deterministic") {
  const Problem p = merge();
  const Instance inst = p.instance();
  Schedule s = merge_ingress(inst);
  place(s, inst, "x", "c", 1, 2, 6);
  place(s, inst, "x", "c", 2, 6, 6);
  assign(s, inst, 1, "x", "c", 1);
  SimConfig cfg;
  cfg.hyperperiods = 3;
  cfg.clock_offset = random_clock_offsets(inst.graph(), 2, 9);
  cfg.losses = {LossEvent{1, 1, 0}};
  const SimTrace a = simulate(inst, s, cfg);
  const SimTrace b = simulate(inst, s, cfg);
  std::ostringstream ja;
  std::ostringstream jb;
  write_trace_jsonl(a, inst, ja);
  write_trace_jsonl(b, inst, jb);
  CHECK(ja.str() == jb.str());
  CHECK(summary_json(a, inst) == summary_json(b, inst));
  CHECK(a.record(1, 1, 0).lost);
  CHECK_FALSE(a.record(1, 1, 1).start.has_value());
  CHECK(a.streams[1].delivered == 2);
  CHECK_FALSE(a.streams[1].e2e[1].has_value());
}

TEST_CASE("trace and summary output") {
  const Problem p = single_hop();
  const Instance inst = p.instance();
  Schedule s = blank_schedule(inst);
  place(s, inst, "a", "b", 1, 2, 6);
  assign(s, inst, 0, "a", "b", 1);
  const SimTrace t = simulate(inst, s, SimConfig{});
  std::ostringstream out;
  write_trace_jsonl(t, inst, out);
  std::istringstream lines(out.str());
  std::string line;
  std::size_t n = 0;
  while (std::getline(lines, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j.contains("t"));
    CHECK(j.contains("event"));
    ++n;
  }
  CHECK(n == t.events.size());
  const auto summary = nlohmann::json::parse(summary_json(t, inst));
  CHECK(summary["streams"][0]["id"] == "s");
  CHECK(summary["streams"][0]["max_e2e_ns"] == 4);
  CHECK(summary["streams"][0]["jitter_ns"] == 0);
  CHECK(summary["lost_frames"] == 0);
}

TEST_CASE("valid tiny schedules run conformant under any admissible clock offsets") {
  // Property: every schedule the checker accepts keeps its promises in the
  // simulator, one frame at a time per link, for offsets spread by at most delta.
  std::mt19937_64 rng(5);
  int checked = 0;
  for (int round = 0; round < 80; ++round) {
    const Problem p = tiny_problem(rng);
    const Instance inst = p.instance();
    const auto bf = brute_force_feasible(inst, p.config, 1);
    if (!bf.feasible) continue;
    ++checked;
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      SimConfig cfg;
      cfg.hyperperiods = 2;
      cfg.clock_offset = random_clock_offsets(inst.graph(), p.config.delta, seed);
      const IsolationReport report =
          isolation_probe(inst, *bf.witness, cfg, [&](const auto&, const SimTrace& t, const SimConfig& c) {
            CHECK(check_conformance(t, inst, *bf.witness, p.config, c).empty());
            CHECK(links_carry_one_frame_at_a_time(t));
          });
      CHECK(report.deterministic);
    }
  }
  CHECK(checked > 20);
}
