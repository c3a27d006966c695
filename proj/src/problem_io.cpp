#include "tsn/problem_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "tsn/errors.hpp"

namespace tsn {
namespace {

using Json = nlohmann::ordered_json;

Json parse_json(const std::string& text, const char* what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
}

template <typename T>
T field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(where + ": missing \"" + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw ParseError(where + ": \"" + key + "\" has the wrong type");
  }
}

template <typename T>
std::optional<T> optional_field(const Json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return field<T>(j, key, where);
}

// Integers written as 1e9 by hand arrive as floating point.
std::int64_t integer(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(where + ": missing \"" + key + "\"");
  const Json& v = j.at(key);
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (d == static_cast<double>(static_cast<std::int64_t>(d))) return static_cast<std::int64_t>(d);
  }
  throw ParseError(where + ": \"" + key + "\" must be an integer");
}

std::optional<std::int64_t> optional_integer(const Json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return integer(j, key, where);
}

EncoderConfig parse_config(const Json& j) {
  EncoderConfig c;
  if (j.is_null()) return c;
  if (!j.is_object()) throw ParseError("config must be an object");
  const std::string where = "config";
  if (auto v = optional_integer(j, "delta_ns", where)) c.delta = *v;
  if (auto v = optional_field<std::string>(j, "ordering", where)) {
    auto o = parse_ordering(*v);
    if (!o) throw ParseError("config: unknown ordering \"" + *v + "\"");
    c.ordering = *o;
  }
  if (auto v = optional_field<std::string>(j, "arithmetic", where)) {
    auto a = parse_arithmetic(*v);
    if (!a) throw ParseError("config: unknown arithmetic \"" + *v + "\"");
    c.arithmetic = *a;
  }
  if (auto v = optional_field<std::string>(j, "objective", where)) {
    auto o = parse_objective(*v);
    if (!o) throw ParseError("config: unknown objective \"" + *v + "\"");
    c.objective = *o;
  }
  if (auto v = optional_field<bool>(j, "multi_period", where)) c.multi_period = *v;
  if (auto v = optional_field<bool>(j, "symmetry_breaking", where)) c.symmetry_breaking = *v;
  if (auto v = optional_field<bool>(j, "fifo_consistency", where)) c.fifo_consistency = *v;
  return c;
}

Json link_json(const Instance& inst, LinkId l) {
  const Link& link = inst.graph().link(l);
  return Json::array({link.src, link.dst});
}

LinkId parse_link(const Json& j, const Instance& inst, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_string() || !j[1].is_string()) {
    throw ParseError(where + ": link must be [src, dst]");
  }
  auto l = inst.graph().find_link(j[0].get<std::string>(), j[1].get<std::string>());
  if (!l) throw ParseError(where + ": unknown link " + j.dump());
  return *l;
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
}

Problem parse_problem(const std::string& text) {
  const Json doc = parse_json(text, "problem");
  if (!doc.is_object()) throw ParseError("problem must be a JSON object");

  TopologyDescription topo;
  topo.vertices = field<std::vector<std::string>>(doc, "vertices", "problem");
  const Json edges = doc.contains("edges") ? doc.at("edges") : Json::array();
  if (!edges.is_array()) throw ParseError("problem: \"edges\" must be an array");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string where = "edge " + std::to_string(i);
    const auto ends = field<std::vector<std::string>>(edges[i], "endpoints", where);
    if (ends.size() != 2) throw ParseError(where + ": endpoints must name two vertices");
    EdgeSpec e;
    e.a = ends[0];
    e.b = ends[1];
    e.speed_bps = integer(edges[i], "speed_bps", where);
    if (auto w = optional_integer(edges[i], "wmax", where)) e.wmax = static_cast<int>(*w);
    if (auto o = optional_integer(edges[i], "overhead_bytes", where)) e.overhead_bytes = static_cast<int>(*o);
    topo.edges.push_back(e);
  }
  NetworkGraph graph = build_graph(topo);

  const Json streams = doc.contains("streams") ? doc.at("streams") : Json::array();
  if (!streams.is_array()) throw ParseError("problem: \"streams\" must be an array");
  std::vector<Stream> out;
  for (std::size_t i = 0; i < streams.size(); ++i) {
    const std::string where = "stream " + std::to_string(i);
    StreamSpec s;
    s.id = field<std::string>(streams[i], "id", where);
    s.path = field<std::vector<std::string>>(streams[i], "route", where);
    s.size_bytes = integer(streams[i], "size_bytes", where);
    s.period = integer(streams[i], "period_ns", where);
    s.e2e = integer(streams[i], "e2e_ns", where);
    s.jitter = optional_integer(streams[i], "jitter_ns", where).value_or(s.period);
    out.push_back(make_stream(s, graph));
  }
  EncoderConfig config = parse_config(doc.contains("config") ? doc.at("config") : Json());
  return Problem{Instance(std::move(graph), std::move(out)), config};
}

Problem read_problem(const std::string& path) { return parse_problem(read_text_file(path)); }

std::string problem_to_json(const TopologyDescription& topology, const std::vector<StreamSpec>& streams,
                            const EncoderConfig& config) {
  Json doc;
  doc["vertices"] = topology.vertices;
  doc["edges"] = Json::array();
  for (const auto& e : topology.edges) {
    Json j;
    j["endpoints"] = Json::array({e.a, e.b});
    j["speed_bps"] = e.speed_bps;
    if (e.wmax) j["wmax"] = *e.wmax;
    if (e.overhead_bytes) j["overhead_bytes"] = *e.overhead_bytes;
    doc["edges"].push_back(j);
  }
  doc["streams"] = Json::array();
  for (const auto& s : streams) {
    doc["streams"].push_back(Json{{"id", s.id},           {"route", s.path},  {"size_bytes", s.size_bytes},
                                  {"period_ns", s.period}, {"e2e_ns", s.e2e}, {"jitter_ns", s.jitter}});
  }
  doc["config"] = Json{{"delta_ns", config.delta},
                       {"ordering", to_string(config.ordering)},
                       {"arithmetic", to_string(config.arithmetic)},
                       {"objective", to_string(config.objective)},
                       {"multi_period", config.multi_period},
                       {"symmetry_breaking", config.symmetry_breaking},
                       {"fifo_consistency", config.fifo_consistency}};
  return doc.dump(2);
}

std::string schedule_to_json(const Schedule& schedule, const Instance& instance, std::string_view status) {
  Json doc;
  doc["status"] = status;
  doc["objective_value"] = schedule.objective_value ? Json(*schedule.objective_value) : Json(nullptr);
  doc["ports"] = Json::array();
  for (const auto& port : schedule.ports) {
    Json p;
    p["link"] = link_json(instance, port.link);
    p["hyperperiod"] = port.hyperperiod;
    p["windows"] = Json::array();
    for (std::size_t k = 0; k < port.windows.size(); ++k) {
      Json w;
      w["index"] = k + 1;
      w["open"] = port.windows[k].open;
      w["close"] = port.windows[k].close;
      w["frames"] = Json::array();
      for (std::size_t f : frames_in_window(schedule, instance, port.link, static_cast<int>(k) + 1)) {
        const auto& fr = instance.frames()[f];
        w["frames"].push_back(Json{{"stream", instance.streams()[fr.stream].id}, {"repetition", fr.repetition}});
      }
      p["windows"].push_back(w);
    }
    doc["ports"].push_back(p);
  }
  return doc.dump(2);
}

Schedule parse_schedule(const std::string& text, const Instance& instance) {
  const Json doc = parse_json(text, "schedule");
  Schedule s;
  for (const auto& port : instance.ports()) {
    s.ports.push_back(PortSchedule{port.link, port.hyperperiod, std::vector<WindowTimes>(port.wmax)});
  }
  s.assignment.assign(instance.frames().size(), 0);
  s.objective_value = doc.is_object() ? optional_integer(doc, "objective_value", "schedule") : std::nullopt;

  const auto ports = field<Json>(doc, "ports", "schedule");
  if (!ports.is_array()) throw ParseError("schedule: \"ports\" must be an array");
  for (std::size_t i = 0; i < ports.size(); ++i) {
    const std::string where = "port " + std::to_string(i);
    const LinkId l = parse_link(field<Json>(ports[i], "link", where), instance, where);
    const auto windows = field<Json>(ports[i], "windows", where);
    if (!windows.is_array()) throw ParseError(where + ": \"windows\" must be an array");
    for (std::size_t k = 0; k < windows.size(); ++k) {
      const std::string wwhere = where + " window " + std::to_string(k);
      const auto index = optional_integer(windows[k], "index", wwhere).value_or(static_cast<std::int64_t>(k) + 1);
      if (index < 1 || index > instance.port(l).wmax) {
        throw ParseError(wwhere + ": index " + std::to_string(index) + " outside [1, " +
                         std::to_string(instance.port(l).wmax) + "]");
      }
      s.ports[l].windows[index - 1] = {integer(windows[k], "open", wwhere), integer(windows[k], "close", wwhere)};
      const Json frames = windows[k].contains("frames") ? windows[k].at("frames") : Json::array();
      for (const auto& f : frames) {
        const auto id = field<std::string>(f, "stream", wwhere);
        const auto stream = instance.find_stream(id);
        if (!stream) throw ParseError(wwhere + ": unknown stream \"" + id + "\"");
        const auto rep = integer(f, "repetition", wwhere);
        const auto& route = instance.streams()[*stream].route;
        if (std::find(route.begin(), route.end(), l) == route.end()) {
          throw ParseError(wwhere + ": stream \"" + id + "\" does not use this link");
        }
        if (rep < 0 || rep >= instance.instances(*stream, l)) {
          throw ParseError(wwhere + ": stream \"" + id + "\" has no repetition " + std::to_string(rep));
        }
        s.assignment[instance.frame_index(*stream, l, static_cast<int>(rep))] = static_cast<int>(index);
      }
    }
  }
  return s;
}

Schedule read_schedule(const std::string& path, const Instance& instance) {
  return parse_schedule(read_text_file(path), instance);
}

std::string gcl_to_json(const Schedule& schedule, const Instance& instance) {
  Json doc;
  doc["ports"] = Json::array();
  for (const auto& port : schedule.ports) {
    std::vector<WindowTimes> live;
    for (const auto& w : port.windows) {
      if (w.size() > 0) live.push_back(w);
    }
    std::sort(live.begin(), live.end(), [](const auto& a, const auto& b) { return a.open < b.open; });
    Json entries = Json::array();
    auto entry = [&](Time from, Time to, const char* state) {
      if (to > from) entries.push_back(Json{{"offset_ns", from}, {"gate_state", state}, {"duration_ns", to - from}});
    };
    Time cursor = 0;
    for (const auto& w : live) {
      entry(cursor, w.open, "closed");
      entry(std::max(cursor, w.open), w.close, "open");
      cursor = std::max(cursor, w.close);
    }
    entry(cursor, port.hyperperiod, "closed");
    Json p;
    p["link"] = link_json(instance, port.link);
    p["cycle_ns"] = port.hyperperiod;
    p["entries"] = entries;
    doc["ports"].push_back(p);
  }
  return doc.dump(2);
}

std::string violations_to_json(const std::vector<Violation>& violations, const Instance& instance) {
  Json doc;
  doc["valid"] = violations.empty();
  doc["violations"] = Json::array();
  for (const auto& v : violations) {
    Json j;
    j["family"] = v.family;
    if (v.link) j["link"] = link_json(instance, *v.link);
    if (v.window) j["window"] = *v.window;
    if (v.stream) j["stream"] = instance.streams()[*v.stream].id;
    j["message"] = v.message;
    doc["violations"].push_back(j);
  }
  return doc.dump(2);
}

std::string status_to_json(const SolverResult& result, const std::vector<std::string>& warnings) {
  Json doc;
  doc["status"] = to_string(result.status);
  if (!result.message.empty()) doc["message"] = result.message;
  doc["assertions"] = result.stats.assertions;
  doc["probes"] = result.stats.probes;
  if (result.objective_value) {
    doc["objective_value"] = *result.objective_value;
    doc["optimal"] = result.optimal;
  }
  if (!result.probed_bounds.empty()) doc["probed_bounds"] = result.probed_bounds;
  doc["warnings"] = warnings;
  return doc.dump(2);
}

std::string isolation_report_to_json(const IsolationReport& report, const Instance& instance) {
  Json doc;
  doc["deterministic"] = report.deterministic;
  doc["scenarios"] = report.scenarios;
  doc["shifts"] = Json::array();
  auto slot = [](const std::optional<GateSlot>& s) {
    return s ? Json{{"window", s->window}, {"cycle", s->cycle}} : Json(nullptr);
  };
  for (const auto& sh : report.shifts) {
    const auto& streams = instance.streams();
    doc["shifts"].push_back(Json{
        {"dropped", Json{{"stream", streams[sh.scenario.stream].id},
                         {"repetition", sh.scenario.repetition},
                         {"hop", sh.scenario.hop}}},
        {"stream", streams[sh.stream].id},
        {"repetition", sh.repetition},
        {"hop", sh.hop},
        {"baseline", slot(sh.baseline)},
        {"observed", slot(sh.observed)},
    });
  }
  return doc.dump(2);
}

}  // namespace tsn
