#include "tsn/encoder.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "tsn/errors.hpp"

namespace tsn {
namespace {

std::string fragment(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    const bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
    out.push_back(keep ? c : '_');
  }
  return out;
}

std::string link_fragment(const NetworkGraph& g, LinkId l) {
  return fragment(g.link(l).src) + "-" + fragment(g.link(l).dst);
}

// Where repetition `g` of a stream lands on a port holding `n` of its instances.
struct Slot {
  int instance;
  Time offset;
};

Slot slot_of(std::int64_t g, int n, Time period) {
  const auto a = static_cast<int>(g % n);
  return Slot{a, (g - a) * period};
}

// Term helpers that switch between product and guarded forms.
class Builder {
 public:
  Builder(const ConstraintIR& ir, const EncoderConfig& config)
      : ir_(ir), linear_(config.arithmetic == Arithmetic::Linearized) {}

  bool linear() const { return linear_; }

  Term open(LinkId l, int k) const { return int_var(ir_.ports[l].open[k]); }
  Term close(LinkId l, int k) const { return int_var(ir_.ports[l].close[k]); }
  int windows(LinkId l) const { return static_cast<int>(ir_.ports[l].open.size()); }

  // Flag as it appears in arithmetic (nonlinear) or as a literal (linearized).
  Term eps(const Instance& inst, std::size_t frame, int k) const {
    const auto& name = ir_.ports[inst.frames()[frame].link].eps[inst.local_index(frame)][k];
    return linear_ ? bool_var(name) : int_var(name);
  }

  Term eps_set(const Instance& inst, std::size_t frame, int k) const {
    Term e = eps(inst, frame, k);
    return linear_ ? e : eq(e, int_const(1));
  }

  // Flag-weighted sum over the windows of the frame's port.
  template <typename ValueOf>
  Term select(const Instance& inst, std::size_t frame, ValueOf value_of) const {
    const LinkId l = inst.frames()[frame].link;
    std::vector<Term> terms;
    for (int k = 0; k < windows(l); ++k) {
      terms.push_back(linear_ ? ite(eps(inst, frame, k), value_of(k), int_const(0))
                              : eps(inst, frame, k) * value_of(k));
    }
    return sum(std::move(terms));
  }

  // Flag-weighted sum of constants.
  Term weighted_count(const Instance& inst, std::size_t frame, Time weight, int k) const {
    return linear_ ? ite(eps(inst, frame, k), int_const(weight), int_const(0)) : eps(inst, frame, k) * weight;
  }

 private:
  const ConstraintIR& ir_;
  bool linear_;
};

Time last_hop_duration(const Instance& inst, std::size_t s) {
  const Stream& st = inst.streams()[s];
  return frame_duration(st.size_bytes, inst.graph().link(st.route.back()));
}

// close_last - open_first of repetition g, offsets included.
Term latency_term(const Builder& b, const Instance& inst, std::size_t s, std::int64_t g) {
  const Stream& st = inst.streams()[s];
  const LinkId first = st.route.front();
  const LinkId last = st.route.back();
  const Slot a = slot_of(g, inst.instances(s, first), st.period);
  const Slot z = slot_of(g, inst.instances(s, last), st.period);
  const std::size_t f_first = inst.frame_index(s, first, a.instance);
  const std::size_t f_last = inst.frame_index(s, last, z.instance);
  Term close = b.select(inst, f_last, [&](int k) { return b.close(last, k); });
  Term open = b.select(inst, f_first, [&](int k) { return b.open(first, k); });
  return (close - open) + (z.offset - a.offset);
}

// Distinct repetition pairings between two route links of a stream.
std::int64_t pairing_count(const Instance& inst, std::size_t s, LinkId a, LinkId b) {
  return std::lcm(inst.instances(s, a), inst.instances(s, b));
}

void require_single_period(const Instance& inst, const EncoderConfig& config) {
  if (!config.multi_period && !inst.single_period()) {
    throw UnsupportedFeature(
        "streams with different periods share a link; multi-period mode is required");
  }
}

void encode_separation(ConstraintIR& ir, const Instance& inst, const EncoderConfig& config,
                       bool same_ingress, Category category) {
  const Builder b(ir, config);
  const auto& streams = inst.streams();
  for (LinkId e = 0; e < inst.graph().links().size(); ++e) {
    for (std::size_t i = 0; i < streams.size(); ++i) {
      for (std::size_t j = i + 1; j < streams.size(); ++j) {
        const auto& ri = streams[i].route;
        const auto& rj = streams[j].route;
        auto hi = std::find(ri.begin(), ri.end(), e);
        auto hj = std::find(rj.begin(), rj.end(), e);
        // Talker-sourced frames have no ingress window.
        if (hi == ri.end() || hj == rj.end() || hi == ri.begin() || hj == rj.begin()) continue;
        const LinkId xi = *(hi - 1);
        const LinkId xj = *(hj - 1);
        if ((xi == xj) != same_ingress) continue;

        const Time ti = streams[i].period;
        const Time tj = streams[j].period;
        const Time cycle = std::lcm(inst.port(e).hyperperiod,
                                    std::lcm(inst.port(xi).hyperperiod, inst.port(xj).hyperperiod));
        const int ne_i = inst.instances(i, e);
        const int ne_j = inst.instances(j, e);
        for (std::int64_t g = 0; g < cycle / ti; ++g) {
          const Slot ei = slot_of(g, ne_i, ti);
          const Slot xi_slot = slot_of(g, inst.instances(i, xi), ti);
          const std::size_t fe_i = inst.frame_index(i, e, ei.instance);
          const std::size_t fx_i = inst.frame_index(i, xi, xi_slot.instance);
          Term leave_i = b.select(inst, fe_i, [&](int k) { return b.close(e, k); }) + ei.offset;
          Term enter_i = b.select(inst, fx_i, [&](int k) { return b.open(xi, k); }) + xi_slot.offset;

          for (std::int64_t h = 0; h < cycle / tj; ++h) {
            const Slot ej = slot_of(h, ne_j, tj);
            const Slot xj_slot = slot_of(h, inst.instances(j, xj), tj);
            const std::size_t fe_j = inst.frame_index(j, e, ej.instance);
            const std::size_t fx_j = inst.frame_index(j, xj, xj_slot.instance);
            Term leave_j = b.select(inst, fe_j, [&](int k) { return b.close(e, k); }) + ej.offset;
            Term enter_j = b.select(inst, fx_j, [&](int k) { return b.open(xj, k); }) + xj_slot.offset;

            std::vector<Term> options{le(leave_i, enter_j), le(leave_j, enter_i)};
            // Same window only within the same cycle of the egress port.
            if (g / ne_i == h / ne_j) {
              std::vector<Term> per_window;
              for (int k = 0; k < b.windows(e); ++k) {
                per_window.push_back(b.linear() ? conj({b.eps(inst, fe_i, k), b.eps(inst, fe_j, k)})
                                                : eq(b.eps(inst, fe_i, k), b.eps(inst, fe_j, k)));
              }
              options.push_back(b.linear() ? disj(std::move(per_window)) : conj(std::move(per_window)));
            }
            ir.add(category, disj(std::move(options)));
          }
        }
      }
    }
  }
}

}  // namespace

ConstraintIR declare_schedule(const Instance& inst, const EncoderConfig& config) {
  ConstraintIR ir;
  const auto& g = inst.graph();
  const Sort eps_sort = config.arithmetic == Arithmetic::Linearized ? Sort::Bool : Sort::Int;
  ir.ports.resize(g.links().size());
  for (const auto& port : inst.ports()) {
    auto& pv = ir.ports[port.link];
    pv.link = port.link;
    pv.hyperperiod = port.hyperperiod;
    const std::string lf = link_fragment(g, port.link);
    for (int k = 1; k <= port.wmax; ++k) {
      const std::string base = "w_" + lf + "_" + std::to_string(k);
      pv.open.push_back(base + "_open");
      pv.close.push_back(base + "_close");
      ir.declare(pv.open.back(), Sort::Int, VarInfo{port.link, k, VarRole::Open, std::nullopt});
      ir.declare(pv.close.back(), Sort::Int, VarInfo{port.link, k, VarRole::Close, std::nullopt});
    }
    for (std::size_t f : port.frames) {
      const auto& fr = inst.frames()[f];
      auto& row = pv.eps.emplace_back();
      for (int k = 1; k <= port.wmax; ++k) {
        row.push_back("e_" + lf + "_" + std::to_string(k) + "_" + fragment(inst.streams()[fr.stream].id) + "_" +
                      std::to_string(fr.repetition));
        ir.declare(row.back(), eps_sort, VarInfo{port.link, k, VarRole::Epsilon, f});
      }
    }
  }
  return ir;
}

void encode_well_defined(ConstraintIR& ir, const Instance& inst, const EncoderConfig& config) {
  const Builder b(ir, config);
  for (const auto& port : inst.ports()) {
    const LinkId l = port.link;
    const int w = b.windows(l);
    if (config.ordering == Ordering::Sequential) {
      ir.add(Category::Bounds, ge(b.open(l, 0), int_const(0)));
      ir.add(Category::Bounds, lt(b.close(l, w - 1), int_const(port.hyperperiod)));
    } else {
      for (int k = 0; k < w; ++k) {
        ir.add(Category::Bounds, ge(b.open(l, k), int_const(0)));
        ir.add(Category::Bounds, lt(b.close(l, k), int_const(port.hyperperiod)));
      }
    }
    for (int k = 0; k < w; ++k) ir.add(Category::OpenBeforeClose, le(b.open(l, k), b.close(l, k)));
    if (!b.linear()) {
      for (std::size_t f : port.frames) {
        for (int k = 0; k < w; ++k) {
          Term e = b.eps(inst, f, k);
          ir.add(Category::EpsilonDomain, conj({ge(e, int_const(0)), le(e, int_const(1))}));
        }
      }
    }
  }
}

void encode_ordering(ConstraintIR& ir, const Instance& inst, const EncoderConfig& config) {
  const Builder b(ir, config);
  for (const auto& port : inst.ports()) {
    const LinkId l = port.link;
    const int w = b.windows(l);
    if (config.ordering == Ordering::Sequential) {
      for (int k = 0; k + 1 < w; ++k) ir.add(Category::Ordering, le(b.close(l, k), b.open(l, k + 1)));
    } else {
      for (int k = 0; k < w; ++k) {
        for (int m = k + 1; m < w; ++m) {
          ir.add(Category::Ordering,
                 disj({le(b.close(l, k), b.open(l, m)), le(b.close(l, m), b.open(l, k))}));
        }
      }
    }
  }
}

void encode_assignment(ConstraintIR& ir, const Instance& inst, const EncoderConfig& config) {
  const Builder b(ir, config);
  for (const auto& port : inst.ports()) {
    for (std::size_t f : port.frames) {
      std::vector<Term> flags;
      for (int k = 0; k < b.windows(port.link); ++k) flags.push_back(b.weighted_count(inst, f, 1, k));
      ir.add(Category::Assignment, eq(sum(std::move(flags)), int_const(1)));
    }
  }
}

void encode_window_size(ConstraintIR& ir, const Instance& inst, const EncoderConfig& config) {
  const Builder b(ir, config);
  for (const auto& port : inst.ports()) {
    const LinkId l = port.link;
    for (int k = 0; k < b.windows(l); ++k) {
      std::vector<Term> load{b.open(l, k)};
      for (std::size_t f : port.frames) load.push_back(b.weighted_count(inst, f, inst.frames()[f].duration, k));
      ir.add(Category::WindowSize, eq(b.close(l, k), sum(std::move(load))));
    }
  }
}

void encode_stream_precedence(ConstraintIR& ir, const Instance& inst, const EncoderConfig& config) {
  const Builder b(ir, config);
  for (std::size_t s = 0; s < inst.streams().size(); ++s) {
    const Stream& st = inst.streams()[s];
    for (std::size_t h = 0; h + 1 < st.route.size(); ++h) {
      const LinkId from = st.route[h];
      const LinkId to = st.route[h + 1];
      const int n_from = inst.instances(s, from);
      const int n_to = inst.instances(s, to);
      for (std::int64_t g = 0; g < pairing_count(inst, s, from, to); ++g) {
        const Slot a = slot_of(g, n_from, st.period);
        const Slot z = slot_of(g, n_to, st.period);
        const std::size_t f_from = inst.frame_index(s, from, a.instance);
        const std::size_t f_to = inst.frame_index(s, to, z.instance);
        // close + offset_from + delta <= open + offset_to
        const Time shift = config.delta + a.offset - z.offset;
        for (int k = 0; k < b.windows(from); ++k) {
          for (int m = 0; m < b.windows(to); ++m) {
            if (b.linear()) {
              ir.add(Category::Precedence,
                     implies(conj({b.eps(inst, f_from, k), b.eps(inst, f_to, m)}),
                             le(b.close(from, k) + shift, b.open(to, m))));
            } else {
              Term chi = b.eps(inst, f_from, k) * b.eps(inst, f_to, m);
              ir.add(Category::Precedence, le(chi * (b.close(from, k) + shift), chi * b.open(to, m)));
            }
          }
        }
      }
    }
  }
}

void encode_isolation(ConstraintIR& ir, const Instance& inst, const EncoderConfig& config) {
  encode_separation(ir, inst, config, false, Category::Isolation);
}

void encode_fifo_consistency(ConstraintIR& ir, const Instance& inst, const EncoderConfig& config) {
  encode_separation(ir, inst, config, true, Category::FifoConsistency);
}

void encode_e2e(ConstraintIR& ir, const Instance& inst, const EncoderConfig& config) {
  const Builder b(ir, config);
  for (std::size_t s = 0; s < inst.streams().size(); ++s) {
    const Stream& st = inst.streams()[s];
    const Time bound = st.e2e - last_hop_duration(inst, s) - config.delta;
    for (std::int64_t g = 0; g < pairing_count(inst, s, st.route.front(), st.route.back()); ++g) {
      ir.add(Category::EndToEnd, le(latency_term(b, inst, s, g), int_const(bound)));
    }
  }
}

void encode_jitter(ConstraintIR& ir, const Instance& inst, const EncoderConfig& config) {
  if (config.multi_period) throw UnsupportedFeature("receiver jitter is only defined for single-period schedules");
  require_single_period(inst, config);
  const Builder b(ir, config);
  for (std::size_t s = 0; s < inst.streams().size(); ++s) {
    const Stream& st = inst.streams()[s];
    const LinkId last = st.route.back();
    const std::size_t f = inst.frame_index(s, last, 0);
    Term psi = b.select(inst, f, [&](int k) { return b.close(last, k) - b.open(last, k); });
    ir.add(Category::Jitter, le(psi, int_const(st.jitter + inst.frames()[f].duration)));
  }
}

void encode_multi_period(ConstraintIR& ir, const Instance& inst, const EncoderConfig& config) {
  if (!config.multi_period) throw UnsupportedFeature("period-slot bounds need multi-period mode");
  const Builder b(ir, config);
  for (const auto& port : inst.ports()) {
    const LinkId l = port.link;
    for (std::size_t f : port.frames) {
      const auto& fr = inst.frames()[f];
      const Time lo = fr.repetition * fr.period;
      const Time hi = (fr.repetition + 1) * fr.period;
      for (int k = 0; k < b.windows(l); ++k) {
        Term e = b.eps(inst, f, k);
        if (b.linear()) {
          ir.add(Category::PeriodSlot, implies(e, ge(b.open(l, k), int_const(lo))));
          ir.add(Category::PeriodSlot, implies(e, le(b.close(l, k), int_const(hi))));
        } else {
          ir.add(Category::PeriodSlot, ge(e * b.open(l, k), e * lo));
          ir.add(Category::PeriodSlot, le(e * b.close(l, k), e * hi));
        }
      }
    }
  }
}

void encode_symmetry_breaking(ConstraintIR& ir, const Instance& inst, const EncoderConfig& config) {
  if (config.ordering != Ordering::Sequential) return;
  const Builder b(ir, config);
  for (const auto& port : inst.ports()) {
    const LinkId l = port.link;
    for (int k = 0; k + 1 < b.windows(l); ++k) {
      ir.add(Category::SymmetryBreaking, implies(eq(b.close(l, k), b.open(l, k)),
                                                 eq(b.close(l, k + 1), b.open(l, k + 1))));
    }
  }
}

Time path_latency_floor(const Instance& inst, std::size_t s, Time delta) {
  const Stream& st = inst.streams()[s];
  Time total = 0;
  for (LinkId l : st.route) total += frame_duration(st.size_bytes, inst.graph().link(l));
  return total + static_cast<Time>(st.route.size() - 1) * delta;
}

void encode_objective(ConstraintIR& ir, const Instance& inst, const EncoderConfig& config) {
  if (config.objective == ObjectiveKind::None) {
    ir.objective.reset();
    return;
  }
  const Builder b(ir, config);
  std::vector<Term> terms;
  std::int64_t lower = 0;
  std::int64_t upper = 0;
  for (std::size_t s = 0; s < inst.streams().size(); ++s) {
    const Stream& st = inst.streams()[s];
    const LinkId first = st.route.front();
    const LinkId last = st.route.back();
    if (config.objective == ObjectiveKind::MinE2eSum) {
      const std::int64_t reps = pairing_count(inst, s, first, last);
      for (std::int64_t g = 0; g < reps; ++g) terms.push_back(latency_term(b, inst, s, g));
      lower += reps * path_latency_floor(inst, s, config.delta);
      upper += reps * (inst.port(first).hyperperiod + inst.port(last).hyperperiod);
    } else {
      if (config.multi_period) throw UnsupportedFeature("jitter objective needs single-period mode");
      const std::size_t f = inst.frame_index(s, last, 0);
      terms.push_back(b.select(inst, f, [&](int k) { return b.close(last, k) - b.open(last, k); }));
      lower += inst.frames()[f].duration;
      upper += inst.port(last).hyperperiod;
    }
  }
  ir.objective = Objective{sum(std::move(terms)), lower, upper};
}

ConstraintIR encode(const Instance& inst, const EncoderConfig& config) {
  if (config.delta < 0) throw ModelError("delta must be non-negative");
  require_single_period(inst, config);
  ConstraintIR ir = declare_schedule(inst, config);
  encode_well_defined(ir, inst, config);
  encode_ordering(ir, inst, config);
  encode_assignment(ir, inst, config);
  encode_window_size(ir, inst, config);
  encode_stream_precedence(ir, inst, config);
  encode_isolation(ir, inst, config);
  if (config.fifo_consistency) encode_fifo_consistency(ir, inst, config);
  encode_e2e(ir, inst, config);
  if (config.multi_period) {
    encode_multi_period(ir, inst, config);
  } else {
    encode_jitter(ir, inst, config);
  }
  if (config.symmetry_breaking) encode_symmetry_breaking(ir, inst, config);
  encode_objective(ir, inst, config);
  return ir;
}

void pin_schedule(ConstraintIR& ir, const Schedule& schedule, const Instance& inst, const EncoderConfig& config) {
  const Builder b(ir, config);
  for (const auto& port : inst.ports()) {
    const auto& windows = schedule.ports.at(port.link).windows;
    if (static_cast<int>(windows.size()) != b.windows(port.link)) {
      throw ModelError("schedule window count differs on " + inst.graph().link_name(port.link));
    }
    for (int k = 0; k < b.windows(port.link); ++k) {
      ir.add(Category::Pin, eq(b.open(port.link, k), int_const(windows[k].open)));
      ir.add(Category::Pin, eq(b.close(port.link, k), int_const(windows[k].close)));
      for (std::size_t f : port.frames) {
        const bool set = schedule.assignment.at(f) == k + 1;
        Term e = b.eps(inst, f, k);
        ir.add(Category::Pin, b.linear() ? (set ? e : negate(e)) : eq(e, int_const(set ? 1 : 0)));
      }
    }
  }
}

std::vector<std::string> preflight_warnings(const Instance& inst, const EncoderConfig& config) {
  std::vector<std::string> out;
  for (const auto& port : inst.ports()) {
    Time load = 0;
    for (std::size_t f : port.frames) load += inst.frames()[f].duration;
    if (load >= port.hyperperiod) {
      std::ostringstream os;
      os << "link " << inst.graph().link_name(port.link) << " carries " << load << " ns of frames per "
         << port.hyperperiod << " ns hyperperiod";
      out.push_back(os.str());
    }
  }
  for (std::size_t s = 0; s < inst.streams().size(); ++s) {
    const Stream& st = inst.streams()[s];
    const Time need = path_latency_floor(inst, s, config.delta) + last_hop_duration(inst, s) + config.delta;
    if (st.e2e < need) {
      std::ostringstream os;
      os << "stream " << st.id << " e2e bound " << st.e2e << " ns is below the achievable " << need << " ns";
      out.push_back(os.str());
    }
  }
  return out;
}

}  // namespace tsn
