#pragma once

// Network, stream and frame data model of a window-scheduled 802.1Qbv network.
//
// All times are integer nanoseconds. Links are directed and addressed by their
// index in NetworkGraph::links(); streams by their index in Instance::streams().

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tsn {

using Time = std::int64_t;
using VertexId = std::string;
using StreamId = std::string;
using LinkId = std::size_t;

inline constexpr std::int64_t kNanosPerSecond = 1'000'000'000;
inline constexpr int kDefaultOverheadBytes = 20;  // preamble + SFD (8) and interframe gap (12)

struct Link {
  VertexId src;
  VertexId dst;
  std::int64_t speed_bps = 0;
  // Window budget W_max. Unset means "one window per frame instance", resolved
  // by Instance once the streams are known.
  std::optional<int> wmax;
  int overhead_bytes = kDefaultOverheadBytes;
};

struct EdgeSpec {
  VertexId a;
  VertexId b;
  std::int64_t speed_bps = 0;
  std::optional<int> wmax;
  std::optional<int> overhead_bytes;
};

struct TopologyDescription {
  std::vector<VertexId> vertices;
  std::vector<EdgeSpec> edges;
};

class NetworkGraph {
 public:
  NetworkGraph() = default;

  const std::vector<VertexId>& vertices() const { return vertices_; }
  const std::vector<Link>& links() const { return links_; }
  const Link& link(LinkId id) const { return links_.at(id); }

  bool has_vertex(const VertexId& v) const;
  std::optional<LinkId> find_link(const VertexId& src, const VertexId& dst) const;

  /// "src->dst", for reports.
  std::string link_name(LinkId id) const;

 private:
  friend NetworkGraph build_graph(const TopologyDescription& topology);

  std::vector<VertexId> vertices_;
  std::vector<Link> links_;
};

/// Every undirected edge yields the directed links [a,b] and [b,a], in that order.
NetworkGraph build_graph(const TopologyDescription& topology);

struct StreamSpec {
  StreamId id;
  std::vector<VertexId> path;  // talker first, listener last
  std::int64_t size_bytes = 0;
  Time period = 0;
  Time e2e = 0;
  Time jitter = 0;
};

struct Stream {
  StreamId id;
  std::vector<LinkId> route;
  std::int64_t size_bytes = 0;
  Time period = 0;
  Time e2e = 0;
  Time jitter = 0;
};

/// Resolves a vertex path into links and checks the stream invariants.
Stream make_stream(const StreamSpec& spec, const NetworkGraph& graph);

/// Wire occupancy of one frame: ceil((size + overhead) * 8 * units_per_second / speed).
Time frame_duration(std::int64_t size_bytes, const Link& link,
                    std::int64_t units_per_second = kNanosPerSecond);

/// Least common multiple of the periods.
Time hyperperiod(std::span<const Time> periods);

struct FrameInstance {
  std::size_t stream = 0;  // index into the stream list
  LinkId link = 0;
  int repetition = 0;  // j in [0, hp_link / period)
  Time duration = 0;
  Time period = 0;
};

Time hyperperiod(std::span<const FrameInstance> frames);

/// One frame instance per (stream, route link, repetition), sorted by link,
/// then stream, then repetition. The repetition count on a link is
/// hp_link / period where hp_link is the lcm of the periods routed through it.
std::vector<FrameInstance> unroll_streams(std::span<const Stream> streams,
                                          const NetworkGraph& graph);

/// Egress port of one directed link with everything the scheduler needs.
struct PortLayout {
  LinkId link = 0;
  Time hyperperiod = 0;
  int wmax = 0;
  std::vector<std::size_t> frames;  // indices into Instance::frames()
};

/// Graph plus streams plus the derived frame and port tables.
class Instance {
 public:
  Instance(NetworkGraph graph, std::vector<Stream> streams);

  const NetworkGraph& graph() const { return graph_; }
  const std::vector<Stream>& streams() const { return streams_; }
  const std::vector<FrameInstance>& frames() const { return frames_; }
  const std::vector<PortLayout>& ports() const { return ports_; }
  const PortLayout& port(LinkId link) const { return ports_.at(link); }

  /// hp_link / period for a stream routed through the link.
  int instances(std::size_t stream, LinkId link) const;
  /// Frame instance index of (stream, link, repetition).
  std::size_t frame_index(std::size_t stream, LinkId link, int repetition) const;
  /// Position of a frame instance inside its port's frame list.
  std::size_t local_index(std::size_t frame) const { return local_index_.at(frame); }

  /// True when every stream has exactly one instance per route link.
  bool single_period() const;
  /// lcm of every port hyperperiod.
  Time global_hyperperiod() const { return global_hp_; }
  std::optional<std::size_t> find_stream(const StreamId& id) const;

 private:
  NetworkGraph graph_;
  std::vector<Stream> streams_;
  std::vector<FrameInstance> frames_;
  std::vector<PortLayout> ports_;
  std::vector<std::size_t> local_index_;
  // first frame index for (stream, hop)
  std::vector<std::vector<std::size_t>> first_frame_;
  Time global_hp_ = 1;
};

}  // namespace tsn
