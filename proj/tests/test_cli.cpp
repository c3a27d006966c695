#include <array>
#include <cstdio>
#include <filesystem>
#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"
#include "support.hpp"
#include "tsn/problem_io.hpp"

using namespace tsn;
using namespace tsn::testing;
namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

// Runs the tool with stderr discarded.
Run tool(const std::string& args) {
  const std::string cmd = cli_path() + " " + args + " 2>/dev/null";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  Run r;
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), pipe)) r.out += buf.data();
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

struct Workdir {
  fs::path dir;
  explicit Workdir(const std::string& name) : dir(fs::temp_directory_path() / ("tsnsched_cli_" + name)) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Workdir() { fs::remove_all(dir); }
  std::string operator/(const std::string& f) const { return (dir / f).string(); }
};

std::string write_problem(const Workdir& w, const std::string& name, const testing::Problem& p) {
  const std::string path = w / name;
  write_text_file(path, problem_to_json(p.topology, p.streams, p.config));
  return path;
}

testing::Problem two_hop() {
  testing::Problem p;
  p.topology = {{"a", "b", "c"}, {{"a", "b", kGigabit, {}, {}}, {"b", "c", kGigabit, {}, {}}}};
  p.streams = {{"s", {"a", "b", "c"}, 100, 500'000, 100'000, 5'000}};
  p.config.delta = 1000;
  return p;
}

Json read_json(const std::string& path) { return Json::parse(read_text_file(path)); }

}  // namespace

TEST_CASE("schedule: a two-hop stream gets a validated schedule and an open gate on each hop") {
  Workdir w("sched");
  const std::string problem = write_problem(w, "p.json", two_hop());
  const Run r = tool("schedule " + problem + " -o " + (w / "out") + " --seed 1 --emit-smt " + (w / "p.smt2"));
  REQUIRE(r.code == 0);
  CHECK(r.out.find("status: sat") != std::string::npos);
  CHECK(read_json(w / "out/status.json")["status"] == "sat");
  CHECK(read_json(w / "out/validation.json")["valid"].get<bool>());
  CHECK(read_text_file(w / "p.smt2").rfind("(set-option :produce-models true)", 0) == 0);

  const Json gcl = read_json(w / "out/gcl.json");
  int open_ports = 0;
  for (const auto& port : gcl["ports"]) {
    const auto link = port["link"].get<std::vector<std::string>>();
    int opens = 0;
    for (const auto& e : port["entries"]) opens += e["gate_state"] == "open" ? 1 : 0;
    if (link == std::vector<std::string>{"a", "b"} || link == std::vector<std::string>{"b", "c"}) {
      CHECK(opens >= 1);
      ++open_ports;
    } else {
      CHECK(opens == 0);
    }
  }
  CHECK(open_ports == 2);

  // Same input and seed: byte-identical artifacts.
  REQUIRE(tool("schedule " + problem + " -o " + (w / "again") + " --seed 1").code == 0);
  for (const char* f : {"status.json", "schedule.json", "gcl.json", "validation.json"}) {
    CHECK(read_text_file(w / (std::string("out/") + f)) == read_text_file(w / (std::string("again/") + f)));
  }

  // The written schedule passes the standalone validator.
  const Run v = tool("validate " + (w / "out/schedule.json") + " " + problem);
  CHECK(v.code == 0);
  CHECK(Json::parse(v.out)["valid"].get<bool>());

  const Run g = tool("gantt " + (w / "out/schedule.json"));
  CHECK(g.code == 0);
  CHECK(g.out.find("a->b") != std::string::npos);
  CHECK(g.out.find("s#0") != std::string::npos);
}

TEST_CASE("schedule: objectives report their value") {
  Workdir w("objective");
  const std::string problem = write_problem(w, "p.json", two_hop());
  const Run r = tool("schedule " + problem + " -o " + (w / "out") + " --objective e2e");
  REQUIRE(r.code == 0);
  const Json status = read_json(w / "out/status.json");
  CHECK(status["optimal"].get<bool>());
  // Two 960 ns hops plus delta.
  CHECK(status["objective_value"] == 2 * 960 + 1000);
  CHECK(read_json(w / "out/schedule.json")["objective_value"] == 2 * 960 + 1000);
}

TEST_CASE("schedule: unsat, solver errors and input errors have their own exit codes") {
  Workdir w("codes");
  testing::Problem crowded;
  crowded.topology = byte_ns(star_topology(3));
  crowded.streams = {{"a", {"h1", "sw", "h3"}, 6, 10, 10, 10}, {"b", {"h2", "sw", "h3"}, 5, 10, 10, 10}};
  const std::string unsat = write_problem(w, "unsat.json", crowded);
  CHECK(tool("schedule " + unsat + " -o " + (w / "u")).code == 2);
  CHECK(read_json(w / "u/status.json")["status"] == "unsat");
  CHECK_FALSE(fs::exists(w / "u/schedule.json"));

  const std::string problem = write_problem(w, "p.json", two_hop());
  CHECK(tool("schedule " + problem + " -o " + (w / "e") + " --solver /nonexistent/z3").code == 5);
  CHECK(read_json(w / "e/status.json")["status"] == "solver-error");

  CHECK(tool("schedule " + (w / "missing.json") + " -o " + (w / "m")).code == 4);
  CHECK(tool("schedule " + problem + " --ordering diagonal").code == 4);
  write_text_file(w / "broken.json", "{\"vertices\": [\"a\"");
  CHECK(tool("schedule " + (w / "broken.json") + " -o " + (w / "b")).code == 4);

  testing::Problem mixed = two_hop();
  mixed.streams.push_back({"t", {"a", "b"}, 100, 250'000, 100'000, 5'000});
  const std::string mp = write_problem(w, "mixed.json", mixed);
  CHECK(tool("schedule " + mp + " -o " + (w / "x")).code == 4);
  CHECK(tool("schedule " + mp + " -o " + (w / "x") + " --multi-period").code == 0);
}

TEST_CASE("validate: bad schedules fail with a JSON report, unknown streams are input errors") {
  Workdir w("validate");
  testing::Problem p = two_hop();
  p.topology.edges[0].wmax = 2;
  const std::string problem = write_problem(w, "p.json", p);
  const Instance inst = p.instance();
  Schedule s = blank_schedule(inst);
  place(s, inst, "a", "b", 1, 0, 960);
  place(s, inst, "a", "b", 2, 500, 1460);
  place(s, inst, "b", "c", 1, 3000, 3960);
  assign(s, inst, 0, "a", "b", 1);
  assign(s, inst, 0, "b", "c", 1);
  write_text_file(w / "overlap.json", schedule_to_json(s, inst, "sat"));
  const Run r = tool("validate " + (w / "overlap.json") + " " + problem);
  CHECK(r.code == 1);
  const Json report = Json::parse(r.out);
  CHECK_FALSE(report["valid"].get<bool>());
  CHECK(report["violations"].size() > 0);

  CHECK(tool("validate " + (w / "overlap.json") + " " + problem + " -o " + (w / "report.json")).code == 1);
  CHECK_FALSE(read_json(w / "report.json")["valid"].get<bool>());

  Json ghost = Json::parse(schedule_to_json(s, inst, "sat"));
  ghost["ports"][0]["windows"][0]["frames"][0]["stream"] = "ghost";
  write_text_file(w / "ghost.json", ghost.dump());
  CHECK(tool("validate " + (w / "ghost.json") + " " + problem).code == 4);
}

TEST_CASE("simulate: clean runs, loss probes and rejected gate lists") {
  Workdir w("simulate");
  const std::string problem = write_problem(w, "p.json", two_hop());
  REQUIRE(tool("schedule " + problem + " -o " + (w / "out")).code == 0);
  const std::string schedule = w / "out/schedule.json";

  const Run clean = tool("simulate " + schedule + " " + problem + " --seed 3 --trace " + (w / "trace.jsonl"));
  CHECK(clean.code == 0);
  const Json summary = Json::parse(clean.out);
  CHECK(summary["streams"][0]["id"] == "s");
  CHECK(summary["streams"][0]["delivered"] == 2);
  CHECK(summary["streams"][0]["max_e2e_ns"].get<Time>() <= 100'000);
  CHECK(read_text_file(w / "trace.jsonl").find("\"event\":\"deliver\"") != std::string::npos);

  const Run loss = tool("simulate " + schedule + " " + problem + " --loss --summary " + (w / "summary.json"));
  CHECK(loss.code == 0);
  const Json probe = Json::parse(loss.out);
  CHECK(probe["deterministic"].get<bool>());
  // Two repetitions, one droppable hop each.
  CHECK(probe["scenarios"] == 2);
  CHECK(read_json(w / "summary.json")["lost_frames"] == 0);

  Json bad = read_json(schedule);
  bad["ports"][0]["windows"][0]["close"] = 600'000;
  write_text_file(w / "bad.json", bad.dump());
  CHECK(tool("simulate " + (w / "bad.json") + " " + problem).code == 4);
}

TEST_CASE("gantt: empty schedule prints only the header") {
  Workdir w("gantt");
  write_text_file(w / "empty.json", R"({"ports": []})");
  const Run r = tool("gantt " + (w / "empty.json"));
  CHECK(r.code == 0);
  CHECK(r.out.find('\n') == r.out.size() - 1);
  CHECK(tool("gantt " + (w / "nothing.json")).code == 4);
}
