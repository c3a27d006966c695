#include "support.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <queue>
#include <set>

namespace tsn::testing {

Instance Problem::instance() const {
  NetworkGraph graph = build_graph(topology);
  std::vector<Stream> out;
  for (const auto& s : streams) out.push_back(make_stream(s, graph));
  return Instance(std::move(graph), std::move(out));
}

std::vector<VertexId> tree_path(const TopologyDescription& topo, const VertexId& from, const VertexId& to) {
  std::map<VertexId, std::vector<VertexId>> adj;
  for (const auto& e : topo.edges) {
    adj[e.a].push_back(e.b);
    adj[e.b].push_back(e.a);
  }
  std::map<VertexId, VertexId> parent{{from, from}};
  std::queue<VertexId> q;
  q.push(from);
  while (!q.empty()) {
    const VertexId v = q.front();
    q.pop();
    for (const auto& w : adj[v]) {
      if (parent.emplace(w, v).second) q.push(w);
    }
  }
  std::vector<VertexId> path;
  if (!parent.contains(to)) return path;
  for (VertexId v = to; v != from; v = parent[v]) path.push_back(v);
  path.push_back(from);
  std::reverse(path.begin(), path.end());
  return path;
}

TopologyDescription line_topology(int switches, int hosts_per_switch, std::int64_t speed) {
  TopologyDescription t;
  for (int i = 1; i <= switches; ++i) {
    const std::string sw = "sw" + std::to_string(i);
    t.vertices.push_back(sw);
    if (i > 1) t.edges.push_back({"sw" + std::to_string(i - 1), sw, speed, {}, {}});
    for (int h = 1; h <= hosts_per_switch; ++h) {
      const std::string host = "h" + std::to_string(i) + "_" + std::to_string(h);
      t.vertices.push_back(host);
      t.edges.push_back({host, sw, speed, {}, {}});
    }
  }
  return t;
}

TopologyDescription star_topology(int hosts, std::int64_t speed) {
  TopologyDescription t;
  t.vertices.push_back("sw");
  for (int h = 1; h <= hosts; ++h) {
    const std::string host = "h" + std::to_string(h);
    t.vertices.push_back(host);
    t.edges.push_back({host, "sw", speed, {}, {}});
  }
  return t;
}

TopologyDescription fig1_topology(std::int64_t speed) {
  TopologyDescription t;
  t.vertices = {"v1", "v2", "v3", "v4", "v5", "v6", "v7", "v8"};
  for (const char* h : {"v1", "v2", "v3"}) t.edges.push_back({h, "v4", speed, {}, {}});
  t.edges.push_back({"v4", "v5", speed, {}, {}});
  for (const char* h : {"v6", "v7", "v8"}) t.edges.push_back({"v5", h, speed, {}, {}});
  return t;
}

std::vector<VertexId> hosts_of(const TopologyDescription& topo) {
  std::map<VertexId, int> degree;
  for (const auto& e : topo.edges) {
    ++degree[e.a];
    ++degree[e.b];
  }
  std::vector<VertexId> out;
  for (const auto& v : topo.vertices) {
    if (degree[v] == 1) out.push_back(v);
  }
  return out;
}

void set_edges(TopologyDescription& topo, std::optional<int> wmax, std::optional<int> overhead) {
  for (auto& e : topo.edges) {
    e.wmax = wmax;
    e.overhead_bytes = overhead;
  }
}

namespace {

template <typename T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& xs) {
  return xs[std::uniform_int_distribution<std::size_t>(0, xs.size() - 1)(rng)];
}

std::int64_t uniform(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

std::pair<VertexId, VertexId> endpoints(std::mt19937_64& rng, const std::vector<VertexId>& hosts) {
  const VertexId a = pick(rng, hosts);
  VertexId b = a;
  while (b == a) b = pick(rng, hosts);
  return {a, b};
}

}  // namespace

Problem random_problem(std::mt19937_64& rng, int topology_kind, bool mixed, const std::vector<Time>& periods) {
  Problem p;
  switch (topology_kind % 3) {
    case 0: p.topology = line_topology(3, 2); break;
    case 1: p.topology = star_topology(6); break;
    default: p.topology = fig1_topology(); break;
  }
  const auto hosts = hosts_of(p.topology);
  const int n = static_cast<int>(uniform(rng, 2, mixed ? 6 : 10));
  p.config.delta = uniform(rng, 0, 1) * 1000;
  p.config.multi_period = mixed;
  if (mixed) set_edges(p.topology, 6, std::nullopt);

  const Time shared_period = pick(rng, periods);
  for (int i = 0; i < n; ++i) {
    StreamSpec s;
    s.id = "s" + std::to_string(i + 1);
    const auto [from, to] = endpoints(rng, hosts);
    s.path = tree_path(p.topology, from, to);
    s.size_bytes = uniform(rng, 64, 1500);
    s.period = mixed ? pick(rng, periods) : shared_period;
    s.e2e = uniform(rng, 0, 1) ? s.period : s.period / 2;
    s.jitter = uniform(rng, 0, 3) == 0 ? 2000 : s.period;
    p.streams.push_back(s);
  }
  if (mixed) {
    // Make sure at least two periods actually meet.
    p.streams[1].path = p.streams[0].path;
    const auto other = std::find_if(periods.begin(), periods.end(), [&](Time t) { return t != p.streams[0].period; });
    if (other != periods.end()) p.streams[1].period = *other;
    p.streams[1].e2e = p.streams[1].period;
    p.streams[1].jitter = p.streams[1].period;
  }
  return p;
}

Problem tiny_problem(std::mt19937_64& rng) {
  for (;;) {
    Problem p;
    if (uniform(rng, 0, 1) == 0) {
      p.topology.vertices = {"a", "b", "c", "d"};
      p.topology.edges = {{"a", "b", kByteNanoSpeed, {}, 0}, {"b", "c", kByteNanoSpeed, {}, 0},
                          {"c", "d", kByteNanoSpeed, {}, 0}};
    } else {
      p.topology.vertices = {"x", "a", "b", "c"};
      p.topology.edges = {{"a", "x", kByteNanoSpeed, {}, 0}, {"b", "x", kByteNanoSpeed, {}, 0},
                          {"c", "x", kByteNanoSpeed, {}, 0}};
    }
    if (uniform(rng, 0, 2) == 0) {
      const int w = static_cast<int>(uniform(rng, 1, 2));
      for (auto& e : p.topology.edges) e.wmax = w;
    }
    p.config.delta = uniform(rng, 0, 2);

    const int n = static_cast<int>(uniform(rng, 1, 3));
    const std::vector<Time> periods{8, 12, 16};
    const Time base_period = pick(rng, periods);
    const bool mixed = uniform(rng, 0, 3) == 0;
    for (int i = 0; i < n; ++i) {
      StreamSpec s;
      s.id = "t" + std::to_string(i + 1);
      const auto [from, to] = endpoints(rng, p.topology.vertices);
      s.path = tree_path(p.topology, from, to);
      s.size_bytes = uniform(rng, 1, 4);
      s.period = mixed ? pick(rng, std::vector<Time>{8, 16}) : base_period;
      s.e2e = uniform(rng, 2, s.period);
      s.jitter = uniform(rng, 0, s.period / 2);
      p.streams.push_back(s);
    }

    // Keep to the exhaustive oracle's limits and keep its search short.
    const Instance inst = p.instance();
    p.config.multi_period = !inst.single_period();
    int busy = 0;
    bool small = true;
    for (const auto& port : inst.ports()) {
      if (port.frames.empty()) continue;
      ++busy;
      small = small && port.frames.size() <= 3 && port.hyperperiod <= 16;
    }
    if (busy <= 3 && small) return p;
  }
}

TopologyDescription byte_ns(TopologyDescription topo) {
  set_edges(topo, std::nullopt, 0);
  for (auto& e : topo.edges) e.speed_bps = kByteNanoSpeed;
  return topo;
}

Schedule blank_schedule(const Instance& inst) {
  Schedule s;
  for (const auto& port : inst.ports()) {
    s.ports.push_back({port.link, port.hyperperiod, std::vector<WindowTimes>(port.wmax)});
  }
  s.assignment.assign(inst.frames().size(), 0);
  return s;
}

void place(Schedule& s, const Instance& inst, const std::string& from, const std::string& to, int k, Time open,
           Time close) {
  s.ports[*inst.graph().find_link(from, to)].windows[k - 1] = {open, close};
}

void assign(Schedule& s, const Instance& inst, std::size_t stream, const std::string& from, const std::string& to,
            int k, int repetition) {
  s.assignment[inst.frame_index(stream, *inst.graph().find_link(from, to), repetition)] = k;
}

SolverOptions solver_options(double timeout_s) {
  SolverOptions o;
  o.command = split_command(TSN_TEST_SOLVER);
  o.timeout_s = timeout_s;
  return o;
}

std::string cli_path() { return TSN_TEST_CLI; }

}  // namespace tsn::testing
