#include "tsn/simulator.hpp"

#include <algorithm>
#include <deque>
#include <queue>
#include <random>
#include <tuple>

#include "json.hpp"

#include "tsn/errors.hpp"

namespace tsn {
namespace {

enum class Pending { Release, Arrive, GateOpen, TxEnd };

struct QueuedEvent {
  Time time;
  std::uint64_t seq;
  Pending kind;
  std::size_t index;  // hop record, or link for GateOpen
  int window = 0;

  bool operator>(const QueuedEvent& o) const { return std::tie(time, seq) > std::tie(o.time, o.seq); }
};

struct RealWindow {
  Time open;
  Time close;
  GateSlot slot;
};

struct PortState {
  std::deque<std::size_t> fifo;
  bool busy = false;
  std::vector<RealWindow> windows;  // sorted by open
};

Time offset_of(const std::map<VertexId, Time>& offsets, const VertexId& v) {
  auto it = offsets.find(v);
  return it == offsets.end() ? 0 : it->second;
}

void reject_malformed(const Instance& inst, const Schedule& schedule) {
  if (schedule.ports.size() != inst.ports().size() || schedule.assignment.size() != inst.frames().size()) {
    throw ModelError("schedule does not match the instance");
  }
  for (const auto& port : inst.ports()) {
    const std::string name = inst.graph().link_name(port.link);
    std::vector<WindowTimes> live;
    for (const auto& w : schedule.ports[port.link].windows) {
      if (w.open < 0 || w.close > port.hyperperiod || w.open > w.close) {
        throw ModelError("window [" + std::to_string(w.open) + "," + std::to_string(w.close) + "] on " + name +
                         " is not inside the cycle");
      }
      if (w.size() > 0) live.push_back(w);
    }
    std::sort(live.begin(), live.end(), [](const auto& a, const auto& b) { return a.open < b.open; });
    for (std::size_t i = 1; i < live.size(); ++i) {
      if (live[i].open < live[i - 1].close) throw ModelError("overlapping windows on " + name);
    }
    for (std::size_t f : port.frames) {
      const int k = schedule.assignment[f];
      if (k < 1 || k > static_cast<int>(schedule.ports[port.link].windows.size())) {
        throw ModelError("frame without a window on " + name);
      }
    }
  }
}

// Assigned window of repetition g on a link, in the sender's clock.
WindowTimes assigned_window(const Instance& inst, const Schedule& schedule, std::size_t s, LinkId l,
                            std::int64_t g) {
  const Time period = inst.streams()[s].period;
  const std::int64_t n = inst.port(l).hyperperiod / period;
  const auto a = static_cast<int>(g % n);
  const int k = schedule.assignment[inst.frame_index(s, l, a)];
  const auto& w = schedule.ports[l].windows[k - 1];
  const Time shift = (g - a) * period;
  return {w.open + shift, w.close + shift};
}

class Engine {
 public:
  Engine(const Instance& inst, const Schedule& schedule, const SimConfig& config, SimTrace& trace)
      : inst_(inst), schedule_(schedule), config_(config), trace_(trace), ports_(inst.ports().size()) {}

  void run(const std::vector<std::int64_t>& reps, const std::vector<std::size_t>& base) {
    expand_gates();
    for (std::size_t s = 0; s < inst_.streams().size(); ++s) {
      const Stream& st = inst_.streams()[s];
      const Time talker = offset_of(config_.clock_offset, inst_.graph().link(st.route.front()).src);
      for (std::int64_t g = 0; g < reps[s]; ++g) {
        const std::size_t idx = base[s] + static_cast<std::size_t>(g) * st.route.size();
        const Time local = assigned_window(inst_, schedule_, s, st.route.front(), g).open;
        push(local - talker, Pending::Release, idx);
      }
    }

    while (!queue_.empty()) {
      const Time now = queue_.top().time;
      std::set<LinkId> touched;
      while (!queue_.empty() && queue_.top().time == now) {
        const QueuedEvent ev = queue_.top();
        queue_.pop();
        handle(ev, touched);
      }
      for (LinkId l : touched) serve(l, now);
    }
  }

 private:
  void push(Time t, Pending kind, std::size_t index, int window = 0) {
    queue_.push(QueuedEvent{t, seq_++, kind, index, window});
  }

  void log(Time t, EventKind kind, const HopRecord& r, int window = 0) {
    trace_.events.push_back(SimEvent{t, kind, r.link, r.stream, r.repetition, r.hop, window});
  }

  void expand_gates() {
    const Time span = inst_.global_hyperperiod() * config_.hyperperiods;
    for (const auto& port : inst_.ports()) {
      const Time offset = offset_of(config_.clock_offset, inst_.graph().link(port.link).src);
      const auto& windows = schedule_.ports[port.link].windows;
      // One extra cycle for frames released late in the last one.
      const std::int64_t cycles = span / port.hyperperiod + 1;
      auto& out = ports_[port.link].windows;
      for (std::int64_t c = 0; c < cycles; ++c) {
        for (std::size_t k = 0; k < windows.size(); ++k) {
          if (windows[k].size() == 0) continue;
          const Time open = windows[k].open + c * port.hyperperiod - offset;
          out.push_back(RealWindow{open, windows[k].close + c * port.hyperperiod - offset,
                                   GateSlot{static_cast<int>(k) + 1, c}});
          push(open, Pending::GateOpen, port.link, static_cast<int>(k) + 1);
        }
      }
      std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.open < b.open; });
    }
  }

  void enqueue(std::size_t idx, Time now, std::set<LinkId>& touched) {
    HopRecord& r = trace_.hops[idx];
    r.enqueue = now;
    ports_[r.link].fifo.push_back(idx);
    log(now, EventKind::Enqueue, r);
    touched.insert(r.link);
  }

  void handle(const QueuedEvent& ev, std::set<LinkId>& touched) {
    switch (ev.kind) {
      case Pending::Release:
        log(ev.time, EventKind::Release, trace_.hops[ev.index]);
        enqueue(ev.index, ev.time, touched);
        break;
      case Pending::Arrive:
        enqueue(ev.index, ev.time, touched);
        break;
      case Pending::GateOpen:
        trace_.events.push_back(SimEvent{ev.time, EventKind::GateOpen, ev.index, std::nullopt, 0, 0, ev.window});
        touched.insert(ev.index);
        break;
      case Pending::TxEnd: {
        HopRecord& r = trace_.hops[ev.index];
        ports_[r.link].busy = false;
        touched.insert(r.link);
        log(ev.time, EventKind::TxEnd, r, r.slot->window);
        const Stream& st = inst_.streams()[r.stream];
        if (config_.losses.contains(LossEvent{r.stream, r.repetition, r.hop})) {
          r.lost = true;
          log(ev.time, EventKind::Drop, r);
        } else if (r.hop + 1 == st.route.size()) {
          log(ev.time + config_.propagation_delay, EventKind::Deliver, r);
        } else {
          push(ev.time + config_.propagation_delay, Pending::Arrive, ev.index + 1);
        }
        break;
      }
    }
  }

  void serve(LinkId l, Time now) {
    PortState& port = ports_[l];
    if (port.busy || port.fifo.empty()) return;
    const std::size_t idx = port.fifo.front();
    HopRecord& r = trace_.hops[idx];
    const Time duration = inst_.frames()[inst_.frame_index(r.stream, l, 0)].duration;
    auto it = std::upper_bound(port.windows.begin(), port.windows.end(), now,
                               [](Time t, const RealWindow& w) { return t < w.open; });
    if (it == port.windows.begin()) return;
    --it;
    if (now + duration > it->close) return;  // gate closed, or the frame would not fit
    port.fifo.pop_front();
    port.busy = true;
    r.start = now;
    r.end = now + duration;
    r.slot = it->slot;
    log(now, EventKind::TxStart, r, it->slot.window);
    push(now + duration, Pending::TxEnd, idx);
  }

  const Instance& inst_;
  const Schedule& schedule_;
  const SimConfig& config_;
  SimTrace& trace_;
  std::vector<PortState> ports_;
  std::priority_queue<QueuedEvent, std::vector<QueuedEvent>, std::greater<>> queue_;
  std::uint64_t seq_ = 0;
};

}  // namespace

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Release: return "release";
    case EventKind::Enqueue: return "enqueue";
    case EventKind::GateOpen: return "gate_open";
    case EventKind::TxStart: return "tx_start";
    case EventKind::TxEnd: return "tx_end";
    case EventKind::Drop: return "drop";
    case EventKind::Deliver: return "deliver";
  }
  return "?";
}

std::map<VertexId, Time> random_clock_offsets(const NetworkGraph& graph, Time delta, std::uint64_t seed) {
  if (delta < 0) throw ModelError("negative clock spread");
  std::mt19937_64 rng(seed);
  const Time lo = -(delta / 2);
  std::uniform_int_distribution<Time> dist(lo, lo + delta);
  std::map<VertexId, Time> out;
  for (const auto& v : graph.vertices()) out[v] = dist(rng);
  return out;
}

const HopRecord& SimTrace::record(std::size_t stream, std::int64_t repetition, std::size_t hop) const {
  return hops.at(base_.at(stream) + static_cast<std::size_t>(repetition) * hops_per_stream_.at(stream) + hop);
}

SimTrace simulate(const Instance& instance, const Schedule& schedule, const SimConfig& config) {
  if (config.hyperperiods < 1) throw ModelError("simulation needs at least one hyperperiod");
  if (config.propagation_delay < 0) throw ModelError("negative propagation delay");
  reject_malformed(instance, schedule);

  SimTrace trace;
  trace.clock_offset = config.clock_offset;
  const Time span = instance.global_hyperperiod() * config.hyperperiods;
  for (std::size_t s = 0; s < instance.streams().size(); ++s) {
    const Stream& st = instance.streams()[s];
    trace.reps_.push_back(span / st.period);
    trace.base_.push_back(trace.hops.size());
    trace.hops_per_stream_.push_back(st.route.size());
    for (std::int64_t g = 0; g < span / st.period; ++g) {
      for (std::size_t h = 0; h < st.route.size(); ++h) {
        HopRecord r;
        r.stream = s;
        r.repetition = g;
        r.hop = h;
        r.link = st.route[h];
        trace.hops.push_back(r);
      }
    }
  }

  Engine(instance, schedule, config, trace).run(trace.reps_, trace.base_);

  for (std::size_t s = 0; s < instance.streams().size(); ++s) {
    const Stream& st = instance.streams()[s];
    const auto& graph = instance.graph();
    const Time talker = offset_of(config.clock_offset, graph.link(st.route.front()).src);
    const Time listener = offset_of(config.clock_offset, graph.link(st.route.back()).dst);
    StreamObservation obs;
    std::optional<Time> lo;
    std::optional<Time> hi;
    for (std::int64_t g = 0; g < trace.reps_[s]; ++g) {
      const HopRecord& last = trace.record(s, g, st.route.size() - 1);
      if (!last.end || last.lost) {
        obs.e2e.push_back(std::nullopt);
        continue;
      }
      const HopRecord& first = trace.record(s, g, 0);
      const Time arrival = *last.end + config.propagation_delay + listener;
      const Time e2e = arrival - (*first.enqueue + talker);
      obs.e2e.push_back(e2e);
      obs.max_e2e = std::max(obs.max_e2e.value_or(e2e), e2e);
      const Time phase = arrival - g * st.period;
      lo = std::min(lo.value_or(phase), phase);
      hi = std::max(hi.value_or(phase), phase);
      ++obs.delivered;
    }
    if (lo) obs.jitter = *hi - *lo;
    trace.streams.push_back(std::move(obs));
  }
  return trace;
}

std::vector<LossEvent> single_loss_scenarios(const Instance& instance, const SimConfig& config) {
  // A loss on the last hop changes no queue, so only earlier hops are probed.
  std::vector<LossEvent> out;
  const Time span = instance.global_hyperperiod() * config.hyperperiods;
  for (std::size_t s = 0; s < instance.streams().size(); ++s) {
    const Stream& st = instance.streams()[s];
    for (std::int64_t g = 0; g < span / st.period; ++g) {
      for (std::size_t h = 0; h + 1 < st.route.size(); ++h) out.push_back(LossEvent{s, g, h});
    }
  }
  return out;
}

IsolationReport isolation_probe(const Instance& instance, const Schedule& schedule, const SimConfig& base,
                                const RunObserver& observe) {
  SimConfig clean = base;
  clean.losses.clear();
  const SimTrace baseline = simulate(instance, schedule, clean);
  if (observe) observe(std::nullopt, baseline, clean);

  IsolationReport report;
  for (const LossEvent& loss : single_loss_scenarios(instance, clean)) {
    SimConfig cfg = clean;
    cfg.losses.insert(loss);
    const SimTrace run = simulate(instance, schedule, cfg);
    if (observe) observe(loss, run, cfg);
    ++report.scenarios;
    for (std::size_t i = 0; i < run.hops.size(); ++i) {
      const HopRecord& r = run.hops[i];
      const bool downstream_of_loss = r.stream == loss.stream && r.repetition == loss.repetition && r.hop > loss.hop;
      if (downstream_of_loss) continue;
      const HopRecord& b = baseline.hops[i];
      if (r.slot != b.slot) {
        report.deterministic = false;
        report.shifts.push_back(WindowShift{loss, r.stream, r.repetition, r.hop, b.slot, r.slot});
      }
    }
  }
  return report;
}

std::vector<std::string> check_conformance(const SimTrace& trace, const Instance& instance,
                                           const Schedule& schedule, const EncoderConfig& config,
                                           const SimConfig& sim) {
  std::vector<std::string> out;
  const auto& graph = instance.graph();
  for (const HopRecord& r : trace.hops) {
    const std::string what = instance.streams()[r.stream].id + " repetition " + std::to_string(r.repetition) +
                             " on " + graph.link_name(r.link);
    if (!r.start) {
      bool dropped_before = false;
      for (std::size_t h = 0; h < r.hop; ++h) {
        dropped_before = dropped_before || sim.losses.contains(LossEvent{r.stream, r.repetition, h});
      }
      if (!dropped_before) out.push_back(what + ": never transmitted");
      continue;
    }
    const Time offset = offset_of(sim.clock_offset, graph.link(r.link).src);
    const WindowTimes w = assigned_window(instance, schedule, r.stream, r.link, r.repetition);
    const Time start = *r.start + offset;
    const Time end = *r.end + offset;
    if (start < w.open || end > w.close) {
      out.push_back(what + ": sent in [" + std::to_string(start) + "," + std::to_string(end) +
                    "] outside assigned window [" + std::to_string(w.open) + "," + std::to_string(w.close) + "]");
    }
  }
  for (std::size_t s = 0; s < instance.streams().size(); ++s) {
    const Stream& st = instance.streams()[s];
    const StreamObservation& obs = trace.streams[s];
    if (obs.max_e2e && *obs.max_e2e > st.e2e) {
      out.push_back(st.id + ": observed e2e " + std::to_string(*obs.max_e2e) + " > " + std::to_string(st.e2e));
    }
    if (!config.multi_period && obs.jitter && *obs.jitter > st.jitter) {
      out.push_back(st.id + ": observed jitter " + std::to_string(*obs.jitter) + " > " + std::to_string(st.jitter));
    }
  }
  return out;
}

void write_trace_jsonl(const SimTrace& trace, const Instance& instance, std::ostream& out) {
  for (const SimEvent& e : trace.events) {
    nlohmann::ordered_json j;
    j["t"] = e.time;
    j["event"] = to_string(e.kind);
    j["link"] = instance.graph().link_name(e.link);
    if (e.stream) {
      j["stream"] = instance.streams()[*e.stream].id;
      j["repetition"] = e.repetition;
      j["hop"] = e.hop;
    }
    if (e.window > 0) j["window"] = e.window;
    out << j.dump() << '\n';
  }
}

std::string summary_json(const SimTrace& trace, const Instance& instance) {
  nlohmann::ordered_json doc;
  doc["streams"] = nlohmann::ordered_json::array();
  for (std::size_t s = 0; s < instance.streams().size(); ++s) {
    const StreamObservation& obs = trace.streams[s];
    nlohmann::ordered_json j;
    j["id"] = instance.streams()[s].id;
    j["repetitions"] = trace.repetitions_of(s);
    j["delivered"] = obs.delivered;
    j["max_e2e_ns"] = obs.max_e2e ? nlohmann::ordered_json(*obs.max_e2e) : nlohmann::ordered_json(nullptr);
    j["jitter_ns"] = obs.jitter ? nlohmann::ordered_json(*obs.jitter) : nlohmann::ordered_json(nullptr);
    doc["streams"].push_back(j);
  }
  std::size_t lost = 0;
  for (const auto& r : trace.hops) lost += r.lost ? 1 : 0;
  doc["lost_frames"] = lost;
  return doc.dump(2);
}

}  // namespace tsn
