#include "tsn/netmodel.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <unordered_set>

#include "tsn/errors.hpp"

namespace tsn {

bool NetworkGraph::has_vertex(const VertexId& v) const {
  return std::find(vertices_.begin(), vertices_.end(), v) != vertices_.end();
}

std::optional<LinkId> NetworkGraph::find_link(const VertexId& src, const VertexId& dst) const {
  for (LinkId i = 0; i < links_.size(); ++i) {
    if (links_[i].src == src && links_[i].dst == dst) return i;
  }
  return std::nullopt;
}

std::string NetworkGraph::link_name(LinkId id) const {
  const Link& l = link(id);
  return l.src + "->" + l.dst;
}

NetworkGraph build_graph(const TopologyDescription& topology) {
  if (topology.vertices.empty()) throw ModelError("topology has no vertices");
  NetworkGraph g;
  std::unordered_set<VertexId> seen;
  for (const auto& v : topology.vertices) {
    if (v.empty()) throw ModelError("empty vertex id");
    if (!seen.insert(v).second) throw ModelError("duplicate vertex '" + v + "'");
    g.vertices_.push_back(v);
  }

  std::set<std::pair<VertexId, VertexId>> edges;
  for (const auto& e : topology.edges) {
    for (const auto* v : {&e.a, &e.b}) {
      if (!seen.contains(*v)) throw ModelError("edge references unknown vertex '" + *v + "'");
    }
    if (e.a == e.b) throw ModelError("self-loop on vertex '" + e.a + "'");
    auto key = std::minmax(e.a, e.b);
    if (!edges.emplace(key.first, key.second).second) {
      throw ModelError("duplicate edge " + e.a + "-" + e.b);
    }
    if (e.speed_bps <= 0) throw ModelError("non-positive speed on edge " + e.a + "-" + e.b);
    if (e.wmax && *e.wmax < 1) throw ModelError("wmax must be at least 1 on edge " + e.a + "-" + e.b);
    int overhead = e.overhead_bytes.value_or(kDefaultOverheadBytes);
    if (overhead < 0) throw ModelError("negative overhead on edge " + e.a + "-" + e.b);

    g.links_.push_back(Link{e.a, e.b, e.speed_bps, e.wmax, overhead});
    g.links_.push_back(Link{e.b, e.a, e.speed_bps, e.wmax, overhead});
  }
  return g;
}

Stream make_stream(const StreamSpec& spec, const NetworkGraph& graph) {
  if (spec.id.empty()) throw ModelError("stream without id");
  const std::string where = "stream '" + spec.id + "': ";
  if (spec.path.size() < 2) throw ModelError(where + "route needs at least one link");
  if (spec.period <= 0) throw ModelError(where + "period must be positive");
  if (spec.size_bytes <= 0) throw ModelError(where + "size must be positive");
  if (spec.e2e <= 0) throw ModelError(where + "e2e bound must be positive");
  if (spec.jitter < 0) throw ModelError(where + "jitter bound must be non-negative");

  std::unordered_set<VertexId> visited;
  Stream s{spec.id, {}, spec.size_bytes, spec.period, spec.e2e, spec.jitter};
  for (std::size_t i = 0; i < spec.path.size(); ++i) {
    if (!graph.has_vertex(spec.path[i])) throw ModelError(where + "unknown vertex '" + spec.path[i] + "'");
    if (!visited.insert(spec.path[i]).second) {
      throw ModelError(where + "route revisits vertex '" + spec.path[i] + "'");
    }
    if (i + 1 < spec.path.size()) {
      auto link = graph.find_link(spec.path[i], spec.path[i + 1]);
      if (!link) throw ModelError(where + "no link " + spec.path[i] + "->" + spec.path[i + 1]);
      s.route.push_back(*link);
    }
  }
  return s;
}

Time frame_duration(std::int64_t size_bytes, const Link& link, std::int64_t units_per_second) {
  if (size_bytes <= 0) throw ModelError("frame size must be positive");
  if (link.speed_bps <= 0) throw ModelError("link speed must be positive");
  __extension__ using Wide = __int128;
  const Wide num = static_cast<Wide>(size_bytes + link.overhead_bytes) * 8 * units_per_second;
  const Wide q = (num + link.speed_bps - 1) / link.speed_bps;
  return static_cast<Time>(q);
}

Time hyperperiod(std::span<const Time> periods) {
  if (periods.empty()) throw ModelError("hyperperiod of an empty period set");
  Time hp = 1;
  for (Time p : periods) {
    if (p <= 0) throw ModelError("non-positive period");
    hp = std::lcm(hp, p);
  }
  return hp;
}

Time hyperperiod(std::span<const FrameInstance> frames) {
  std::vector<Time> periods;
  periods.reserve(frames.size());
  for (const auto& f : frames) periods.push_back(f.period);
  return hyperperiod(periods);
}

namespace {

std::vector<Time> link_hyperperiods(std::span<const Stream> streams, const NetworkGraph& graph) {
  std::vector<Time> hp(graph.links().size(), 0);
  for (const auto& s : streams) {
    for (LinkId l : s.route) {
      if (l >= graph.links().size()) throw ModelError("stream '" + s.id + "' uses a link outside the graph");
      hp[l] = hp[l] == 0 ? s.period : std::lcm(hp[l], s.period);
    }
  }
  return hp;
}

}  // namespace

std::vector<FrameInstance> unroll_streams(std::span<const Stream> streams, const NetworkGraph& graph) {
  const auto hp = link_hyperperiods(streams, graph);
  std::vector<FrameInstance> frames;
  for (LinkId l = 0; l < graph.links().size(); ++l) {
    for (std::size_t s = 0; s < streams.size(); ++s) {
      const Stream& st = streams[s];
      if (std::find(st.route.begin(), st.route.end(), l) == st.route.end()) continue;
      const Time duration = frame_duration(st.size_bytes, graph.link(l));
      const auto reps = static_cast<int>(hp[l] / st.period);
      for (int j = 0; j < reps; ++j) frames.push_back(FrameInstance{s, l, j, duration, st.period});
    }
  }
  return frames;
}

Instance::Instance(NetworkGraph graph, std::vector<Stream> streams)
    : graph_(std::move(graph)), streams_(std::move(streams)) {
  std::unordered_set<StreamId> ids;
  for (const auto& s : streams_) {
    if (!ids.insert(s.id).second) throw ModelError("duplicate stream id '" + s.id + "'");
  }
  frames_ = unroll_streams(streams_, graph_);
  const auto hp = link_hyperperiods(streams_, graph_);

  Time all_streams_hp = 1;
  for (const auto& s : streams_) all_streams_hp = std::lcm(all_streams_hp, s.period);

  ports_.resize(graph_.links().size());
  local_index_.resize(frames_.size());
  for (LinkId l = 0; l < ports_.size(); ++l) {
    ports_[l].link = l;
    ports_[l].hyperperiod = hp[l] != 0 ? hp[l] : all_streams_hp;
  }
  for (std::size_t f = 0; f < frames_.size(); ++f) {
    auto& port = ports_[frames_[f].link];
    local_index_[f] = port.frames.size();
    port.frames.push_back(f);
  }
  global_hp_ = 1;
  for (auto& port : ports_) {
    const auto& wmax = graph_.link(port.link).wmax;
    port.wmax = wmax ? *wmax : std::max<int>(1, static_cast<int>(port.frames.size()));
    global_hp_ = std::lcm(global_hp_, port.hyperperiod);
  }

  first_frame_.assign(streams_.size(), {});
  for (std::size_t s = 0; s < streams_.size(); ++s) {
    first_frame_[s].assign(streams_[s].route.size(), frames_.size());
  }
  for (std::size_t f = 0; f < frames_.size(); ++f) {
    const auto& fr = frames_[f];
    if (fr.repetition != 0) continue;
    const auto& route = streams_[fr.stream].route;
    auto hop = static_cast<std::size_t>(std::find(route.begin(), route.end(), fr.link) - route.begin());
    first_frame_[fr.stream][hop] = f;
  }
}

int Instance::instances(std::size_t stream, LinkId link) const {
  return static_cast<int>(ports_.at(link).hyperperiod / streams_.at(stream).period);
}

std::size_t Instance::frame_index(std::size_t stream, LinkId link, int repetition) const {
  const auto& route = streams_.at(stream).route;
  auto it = std::find(route.begin(), route.end(), link);
  if (it == route.end()) throw ModelError("stream '" + streams_[stream].id + "' does not use link " + graph_.link_name(link));
  if (repetition < 0 || repetition >= instances(stream, link)) throw ModelError("repetition out of range");
  return first_frame_[stream][static_cast<std::size_t>(it - route.begin())] + static_cast<std::size_t>(repetition);
}

bool Instance::single_period() const {
  return std::all_of(frames_.begin(), frames_.end(),
                     [this](const FrameInstance& f) { return instances(f.stream, f.link) == 1; });
}

std::optional<std::size_t> Instance::find_stream(const StreamId& id) const {
  for (std::size_t i = 0; i < streams_.size(); ++i) {
    if (streams_[i].id == id) return i;
  }
  return std::nullopt;
}

}  // namespace tsn
