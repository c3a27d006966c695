#pragma once

// Discrete-event execution of per-port Gate Control Lists.
//
// Every egress port has one FIFO queue behind one gate. The gate follows the
// port's windows, repeated every port hyperperiod in the local clock of the
// sending node. A frame at the head of the queue starts only when the gate is
// open and the rest of the open interval fits the whole frame. Talkers release
// each repetition at the local open time of the window it is assigned on the
// first hop. Times in events are global; clocks of individual nodes differ
// from it by a fixed offset per run.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "tsn/config.hpp"
#include "tsn/netmodel.hpp"
#include "tsn/schedule.hpp"

namespace tsn {

struct LossEvent {
  std::size_t stream = 0;
  std::int64_t repetition = 0;
  std::size_t hop = 0;  // the frame is sent on this hop and never received

  friend auto operator<=>(const LossEvent&, const LossEvent&) = default;
};

struct SimConfig {
  int hyperperiods = 1;                   // simulated span, in global hyperperiods
  std::map<VertexId, Time> clock_offset;  // local = global + offset; missing nodes read 0
  std::set<LossEvent> losses;
  std::uint64_t seed = 0;
  Time propagation_delay = 0;
};

/// Offsets drawn uniformly from [-delta/2, delta - delta/2], so no two nodes
/// disagree by more than delta.
std::map<VertexId, Time> random_clock_offsets(const NetworkGraph& graph, Time delta, std::uint64_t seed);

/// Window k of a port in its c-th cycle.
struct GateSlot {
  int window = 0;
  std::int64_t cycle = 0;

  friend bool operator==(const GateSlot&, const GateSlot&) = default;
};

struct HopRecord {
  std::size_t stream = 0;
  std::int64_t repetition = 0;
  std::size_t hop = 0;
  LinkId link = 0;
  std::optional<Time> enqueue;
  std::optional<Time> start;
  std::optional<Time> end;
  std::optional<GateSlot> slot;
  bool lost = false;
};

enum class EventKind { Release, Enqueue, GateOpen, TxStart, TxEnd, Drop, Deliver };

std::string_view to_string(EventKind kind);

struct SimEvent {
  Time time = 0;
  EventKind kind = EventKind::Release;
  LinkId link = 0;
  std::optional<std::size_t> stream;
  std::int64_t repetition = 0;
  std::size_t hop = 0;
  int window = 0;
};

struct StreamObservation {
  std::vector<std::optional<Time>> e2e;  // per repetition, listener clock minus talker clock
  std::optional<Time> max_e2e;
  std::optional<Time> jitter;  // spread of arrival offsets within the period
  std::size_t delivered = 0;
};

struct SimTrace {
  std::vector<HopRecord> hops;  // ordered by stream, repetition, hop
  std::vector<SimEvent> events;
  std::vector<StreamObservation> streams;
  std::map<VertexId, Time> clock_offset;
  std::int64_t repetitions_of(std::size_t stream) const { return reps_.at(stream); }
  const HopRecord& record(std::size_t stream, std::int64_t repetition, std::size_t hop) const;

 private:
  friend SimTrace simulate(const Instance&, const Schedule&, const SimConfig&);
  std::vector<std::int64_t> reps_;
  std::vector<std::size_t> base_;
  std::vector<std::size_t> hops_per_stream_;
};

/// Runs the gates; throws ModelError for windows that overlap, leave the
/// hyperperiod or have unassigned frames.
SimTrace simulate(const Instance& instance, const Schedule& schedule, const SimConfig& config);

struct WindowShift {
  LossEvent scenario;
  std::size_t stream = 0;
  std::int64_t repetition = 0;
  std::size_t hop = 0;
  std::optional<GateSlot> baseline;
  std::optional<GateSlot> observed;
};

struct IsolationReport {
  bool deterministic = true;
  std::size_t scenarios = 0;
  std::vector<WindowShift> shifts;
};

/// Sees every run of a probe: the dropped frame (none for the lossless run),
/// the trace and the configuration it ran with.
using RunObserver = std::function<void(const std::optional<LossEvent>&, const SimTrace&, const SimConfig&)>;

/// One lossless run plus one run per single dropped frame; every frame that
/// still gets sent must use the same window and cycle as in the lossless run.
IsolationReport isolation_probe(const Instance& instance, const Schedule& schedule, const SimConfig& base,
                                const RunObserver& observe = {});

/// Every (stream, repetition, hop) whose loss is worth probing.
std::vector<LossEvent> single_loss_scenarios(const Instance& instance, const SimConfig& config);

/// Observed departures from the schedule's promises: frames outside their
/// assigned window in the sender's clock, e2e above the bound, jitter above
/// the bound (single-period only), frames stuck in a queue.
std::vector<std::string> check_conformance(const SimTrace& trace, const Instance& instance,
                                           const Schedule& schedule, const EncoderConfig& config,
                                           const SimConfig& sim);

/// One JSON object per event and line.
void write_trace_jsonl(const SimTrace& trace, const Instance& instance, std::ostream& out);

/// Per-stream statistics as a JSON document.
std::string summary_json(const SimTrace& trace, const Instance& instance);

}  // namespace tsn
