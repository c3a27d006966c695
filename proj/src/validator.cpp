#include <algorithm>
#include <numeric>
#include <sstream>

#include "checker.hpp"
#include "tsn/errors.hpp"
#include "tsn/validator.hpp"

namespace tsn {
namespace {

// Repetition g of stream s as seen on link l: the window its instance uses,
// shifted into absolute time.
struct Occurrence {
  std::size_t frame = 0;
  int window = 0;
  Time open = 0;
  Time close = 0;
  std::int64_t cycle = 0;  // which repetition of the port's hyperperiod
};

std::optional<Occurrence> occurrence(const Schedule& schedule, const Instance& inst, std::size_t s, LinkId l,
                                     std::int64_t g) {
  const Time period = inst.streams()[s].period;
  const std::int64_t n = inst.port(l).hyperperiod / period;
  const auto a = static_cast<int>(g % n);
  const std::size_t frame = inst.frame_index(s, l, a);
  const int k = schedule.assignment[frame];
  const auto& windows = schedule.ports[l].windows;
  if (k < 1 || k > static_cast<int>(windows.size())) return std::nullopt;
  const Time shift = (g - a) * period;
  return Occurrence{frame, k, windows[k - 1].open + shift, windows[k - 1].close + shift, g / n};
}

std::int64_t repetitions_between(const Instance& inst, std::size_t s, LinkId a, LinkId b) {
  const Time period = inst.streams()[s].period;
  return std::lcm(inst.port(a).hyperperiod / period, inst.port(b).hyperperiod / period);
}

std::string fmt(std::initializer_list<std::string> parts) {
  std::string out;
  for (const auto& p : parts) out += p;
  return out;
}

std::string str(std::int64_t v) { return std::to_string(v); }

class Run {
 public:
  Run(const Instance& inst, const EncoderConfig& config, const ValidatorOptions& options, const Schedule& schedule,
      const std::vector<bool>& placed, std::vector<Violation>* out, bool first_only)
      : inst_(inst), config_(config), options_(options), schedule_(schedule), placed_(placed), out_(out),
        first_only_(first_only) {}

  bool execute() {
    check_windows();
    if (!stop()) check_assignment();
    if (!stop() && config_.multi_period) check_period_slots();
    if (!stop() && !config_.multi_period) check_jitter();
    if (!stop()) check_e2e();
    if (!stop()) check_precedence();
    if (!stop()) check_separation(false);
    if (!stop() && config_.fifo_consistency) check_separation(true);
    return !failed_;
  }

 private:
  bool stop() const { return first_only_ && failed_; }
  bool placed(LinkId l) const { return placed_[l]; }

  void report(const char* family, std::optional<LinkId> link, std::optional<int> window,
              std::optional<std::size_t> stream, std::string message) {
    failed_ = true;
    if (out_ != nullptr) out_->push_back(Violation{family, link, window, stream, std::move(message)});
  }

  std::string name(LinkId l) const { return inst_.graph().link_name(l); }
  const std::string& sid(std::size_t s) const { return inst_.streams()[s].id; }

  void check_windows() {
    for (const auto& port : inst_.ports()) {
      if (!placed(port.link)) continue;
      const LinkId l = port.link;
      const auto& w = schedule_.ports[l].windows;
      for (std::size_t k = 0; k < w.size(); ++k) {
        const int idx = static_cast<int>(k) + 1;
        if (w[k].open < 0) report("bounds", l, idx, {}, fmt({"open ", str(w[k].open), " < 0"}));
        if (w[k].close >= port.hyperperiod) {
          report("bounds", l, idx, {}, fmt({"close ", str(w[k].close), " >= hyperperiod ", str(port.hyperperiod)}));
        }
        if (w[k].open > w[k].close) {
          report("open_before_close", l, idx, {}, fmt({"open ", str(w[k].open), " > close ", str(w[k].close)}));
        }
        Time load = 0;
        for (std::size_t f : port.frames) {
          if (schedule_.assignment[f] == idx) load += inst_.frames()[f].duration;
        }
        if (w[k].close - w[k].open != load) {
          report("window_size", l, idx, {},
                 fmt({"size ", str(w[k].close - w[k].open), " != assigned load ", str(load)}));
        }
        for (std::size_t m = k + 1; m < w.size(); ++m) {
          if (!(w[k].close <= w[m].open || w[m].close <= w[k].open)) {
            report("non_overlap", l, idx, {},
                   fmt({"window ", str(idx), " overlaps window ", str(static_cast<std::int64_t>(m) + 1)}));
          }
        }
        if (config_.ordering == Ordering::Sequential && k + 1 < w.size() && w[k].close > w[k + 1].open) {
          report("window_order", l, idx, {}, fmt({"close ", str(w[k].close), " > next open ", str(w[k + 1].open)}));
        }
        if (stop()) return;
      }
    }
  }

  void check_assignment() {
    for (const auto& port : inst_.ports()) {
      if (!placed(port.link)) continue;
      for (std::size_t f : port.frames) {
        if (schedule_.assignment[f] == 0) {
          const auto& fr = inst_.frames()[f];
          report("assignment", port.link, {}, fr.stream,
                 fmt({"repetition ", str(fr.repetition), " of ", sid(fr.stream), " has no window"}));
        }
      }
    }
  }

  void check_period_slots() {
    for (const auto& port : inst_.ports()) {
      if (!placed(port.link)) continue;
      for (std::size_t f : port.frames) {
        const auto& fr = inst_.frames()[f];
        const int k = schedule_.assignment[f];
        if (k < 1) continue;
        const auto& w = schedule_.ports[port.link].windows[k - 1];
        const Time lo = fr.repetition * fr.period;
        const Time hi = lo + fr.period;
        if (w.open < lo || w.close > hi) {
          report("period_slot", port.link, k, fr.stream,
                 fmt({"repetition ", str(fr.repetition), " window [", str(w.open), ",", str(w.close),
                      "] outside slot [", str(lo), ",", str(hi), "]"}));
        }
      }
    }
  }

  void check_jitter() {
    for (std::size_t s = 0; s < inst_.streams().size() && !stop(); ++s) {
      const Stream& st = inst_.streams()[s];
      const LinkId last = st.route.back();
      if (!placed(last)) continue;
      for (int a = 0; a < inst_.instances(s, last); ++a) {
        const std::size_t f = inst_.frame_index(s, last, a);
        const int k = schedule_.assignment[f];
        if (k < 1) continue;
        const Time psi = schedule_.ports[last].windows[k - 1].size();
        const Time bound = st.jitter + inst_.frames()[f].duration;
        if (psi > bound) {
          report("jitter", last, k, s, fmt({"receive window size ", str(psi), " > jitter + L = ", str(bound)}));
        }
      }
    }
  }

  void check_e2e() {
    for (std::size_t s = 0; s < inst_.streams().size() && !stop(); ++s) {
      const Stream& st = inst_.streams()[s];
      const LinkId first = st.route.front();
      const LinkId last = st.route.back();
      if (!placed(first) || !placed(last)) continue;
      for (std::int64_t g = 0; g < repetitions_between(inst_, s, first, last); ++g) {
        auto src = occurrence(schedule_, inst_, s, first, g);
        auto dst = occurrence(schedule_, inst_, s, last, g);
        if (!src || !dst) continue;
        const Time bound = st.e2e - inst_.frames()[dst->frame].duration - config_.delta;
        if (dst->close - src->open > bound) {
          report("e2e", last, dst->window, s,
                 fmt({"repetition ", str(g), " spans ", str(dst->close - src->open), " > e2e - L - delta = ",
                      str(bound)}));
        }
      }
    }
  }

  void check_precedence() {
    for (std::size_t s = 0; s < inst_.streams().size() && !stop(); ++s) {
      const auto& route = inst_.streams()[s].route;
      for (std::size_t h = 0; h + 1 < route.size(); ++h) {
        if (!placed(route[h]) || !placed(route[h + 1])) continue;
        for (std::int64_t g = 0; g < repetitions_between(inst_, s, route[h], route[h + 1]); ++g) {
          auto a = occurrence(schedule_, inst_, s, route[h], g);
          auto b = occurrence(schedule_, inst_, s, route[h + 1], g);
          if (!a || !b) continue;
          if (a->close + config_.delta > b->open) {
            report("precedence", route[h + 1], b->window, s,
                   fmt({"hop ", str(static_cast<std::int64_t>(h) + 1), " closes at ", str(a->close), " + delta ",
                        str(config_.delta), " after next hop opens at ", str(b->open)}));
          }
        }
      }
    }
  }

  // Literal evaluation of the per-window-triple disjunction, flags as 0/1 factors.
  bool verbatim_separated(std::size_t fe_i, std::size_t fe_j, std::size_t fx_i, std::size_t fx_j, LinkId e,
                          LinkId xi, LinkId xj) const {
    const auto& we = schedule_.ports[e].windows;
    const auto& wi = schedule_.ports[xi].windows;
    const auto& wj = schedule_.ports[xj].windows;
    auto flag = [&](std::size_t f, std::size_t k) -> Time { return schedule_.assignment[f] == static_cast<int>(k) + 1; };
    for (std::size_t k = 0; k < we.size(); ++k) {
      for (std::size_t l = 0; l < wi.size(); ++l) {
        for (std::size_t m = 0; m < wj.size(); ++m) {
          const bool first = we[k].close * flag(fe_i, k) <= wj[m].open * flag(fx_j, m);
          const bool second = we[k].close * flag(fe_j, k) <= wi[l].open * flag(fx_i, l);
          const bool same = flag(fe_j, k) == flag(fe_i, k);
          if (!(first || second || same)) return false;
        }
      }
    }
    return true;
  }

  void check_separation(bool same_ingress) {
    const char* family = same_ingress ? "fifo_consistency" : "isolation";
    const auto& streams = inst_.streams();
    for (LinkId e = 0; e < inst_.graph().links().size(); ++e) {
      if (!placed(e)) continue;
      for (std::size_t i = 0; i < streams.size(); ++i) {
        for (std::size_t j = i + 1; j < streams.size(); ++j) {
          const auto& ri = streams[i].route;
          const auto& rj = streams[j].route;
          const auto hi = std::find(ri.begin(), ri.end(), e);
          const auto hj = std::find(rj.begin(), rj.end(), e);
          if (hi == ri.end() || hj == rj.end() || hi == ri.begin() || hj == rj.begin()) continue;
          const LinkId xi = *(hi - 1);
          const LinkId xj = *(hj - 1);
          if ((xi == xj) != same_ingress || !placed(xi) || !placed(xj)) continue;

          const Time cycle =
              std::lcm(inst_.port(e).hyperperiod, std::lcm(inst_.port(xi).hyperperiod, inst_.port(xj).hyperperiod));
          for (std::int64_t g = 0; g < cycle / streams[i].period; ++g) {
            auto out_i = occurrence(schedule_, inst_, i, e, g);
            auto in_i = occurrence(schedule_, inst_, i, xi, g);
            if (!out_i || !in_i) continue;
            for (std::int64_t h = 0; h < cycle / streams[j].period; ++h) {
              auto out_j = occurrence(schedule_, inst_, j, e, h);
              auto in_j = occurrence(schedule_, inst_, j, xj, h);
              if (!out_j || !in_j) continue;
              bool ok = false;
              if (options_.verbatim_isolation) {
                ok = verbatim_separated(out_i->frame, out_j->frame, in_i->frame, in_j->frame, e, xi, xj);
              } else {
                const bool same_window = out_i->window == out_j->window && out_i->cycle == out_j->cycle;
                ok = same_window || out_i->close <= in_j->open || out_j->close <= in_i->open;
              }
              if (!ok) {
                report(family, e, out_i->window, i,
                       fmt({sid(i), " (repetition ", str(g), ") and ", sid(j), " (repetition ", str(h),
                            ") use different windows and overlap in the device"}));
                if (stop()) return;
              }
            }
          }
        }
      }
    }
  }

  const Instance& inst_;
  const EncoderConfig& config_;
  const ValidatorOptions& options_;
  const Schedule& schedule_;
  const std::vector<bool>& placed_;
  std::vector<Violation>* out_;
  bool first_only_;
  bool failed_ = false;
};

void require_shape(const Schedule& schedule, const Instance& inst) {
  if (schedule.ports.size() != inst.ports().size()) throw ModelError("schedule has a different number of ports");
  if (schedule.assignment.size() != inst.frames().size()) {
    throw ModelError("schedule assigns a different number of frames");
  }
  for (const auto& port : inst.ports()) {
    const auto& windows = schedule.ports[port.link].windows;
    if (static_cast<int>(windows.size()) != port.wmax) {
      throw ModelError("schedule has " + std::to_string(windows.size()) + " windows on " +
                       inst.graph().link_name(port.link) + ", expected " + std::to_string(port.wmax));
    }
    for (std::size_t f : port.frames) {
      const int k = schedule.assignment[f];
      if (k < 0 || k > port.wmax) {
        throw ModelError("frame assigned to nonexistent window " + std::to_string(k) + " on " +
                         inst.graph().link_name(port.link));
      }
    }
  }
}

}  // namespace

namespace detail {

bool ScheduleChecker::check(const Schedule& schedule, const std::vector<bool>& placed, std::vector<Violation>* out,
                            bool first_only) const {
  return Run(instance_, config_, options_, schedule, placed, out, first_only).execute();
}

}  // namespace detail

std::vector<Violation> check_schedule(const Schedule& schedule, const Instance& instance,
                                      const EncoderConfig& config, const ValidatorOptions& options) {
  require_shape(schedule, instance);
  std::vector<Violation> out;
  const std::vector<bool> all(instance.ports().size(), true);
  detail::ScheduleChecker(instance, config, options).check(schedule, all, &out, false);
  return out;
}

std::int64_t objective_value(const Schedule& schedule, const Instance& inst, ObjectiveKind kind) {
  std::int64_t total = 0;
  for (std::size_t s = 0; s < inst.streams().size(); ++s) {
    const Stream& st = inst.streams()[s];
    if (kind == ObjectiveKind::MinE2eSum) {
      for (std::int64_t g = 0; g < repetitions_between(inst, s, st.route.front(), st.route.back()); ++g) {
        auto src = occurrence(schedule, inst, s, st.route.front(), g);
        auto dst = occurrence(schedule, inst, s, st.route.back(), g);
        if (!src || !dst) throw ModelError("objective of an incomplete schedule");
        total += dst->close - src->open;
      }
    } else if (kind == ObjectiveKind::MinJitterSum) {
      auto dst = occurrence(schedule, inst, s, st.route.back(), 0);
      if (!dst) throw ModelError("objective of an incomplete schedule");
      total += dst->close - dst->open;
    }
  }
  return total;
}

}  // namespace tsn
