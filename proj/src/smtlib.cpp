#include "tsn/smtlib.hpp"

#include <cctype>
#include <sstream>

#include "tsn/errors.hpp"

namespace tsn {

std::string_view to_string(Logic logic) { return logic == Logic::QF_LIA ? "QF_LIA" : "QF_NIA"; }

std::string_view to_string(SolverStatus s) {
  switch (s) {
    case SolverStatus::Sat: return "sat";
    case SolverStatus::Unsat: return "unsat";
    case SolverStatus::Unknown: return "unknown";
    case SolverStatus::Timeout: return "timeout";
    case SolverStatus::SolverError: return "solver-error";
  }
  return "solver-error";
}

Logic minimal_logic(const ConstraintIR& ir) { return is_linear(ir) ? Logic::QF_LIA : Logic::QF_NIA; }

std::string emit_smtlib(const ConstraintIR& ir, Logic logic, const EmitOptions& options) {
  if (logic == Logic::QF_LIA) {
    for (const auto& a : ir.assertions) {
      if (!is_linear(a.formula)) {
        throw EncodingError("nonlinear " + std::string(to_string(a.category)) + " assertion under QF_LIA");
      }
    }
    for (const auto& t : options.extra) {
      if (!is_linear(t)) throw EncodingError("nonlinear extra assertion under QF_LIA");
    }
    if (options.minimize && ir.objective && !is_linear(ir.objective->expression)) {
      throw EncodingError("nonlinear objective under QF_LIA");
    }
  }

  std::ostringstream os;
  os << "(set-option :produce-models true)\n";
  if (options.random_seed) os << "(set-option :random-seed " << *options.random_seed << ")\n";
  os << "(set-logic " << to_string(logic) << ")\n";
  for (const auto& v : ir.variables) {
    os << "(declare-fun " << v.name << " () " << (v.sort == Sort::Int ? "Int" : "Bool") << ")\n";
  }
  for (const auto& a : ir.assertions) {
    os << "(assert ";
    write_smtlib(os, a.formula);
    os << ")\n";
  }
  for (const auto& t : options.extra) {
    os << "(assert ";
    write_smtlib(os, t);
    os << ")\n";
  }
  if (options.minimize && ir.objective) {
    os << "(minimize ";
    write_smtlib(os, ir.objective->expression);
    os << ")\n";
  }
  os << "(check-sat)\n(get-model)\n(exit)\n";
  return os.str();
}

namespace {

struct SExpr {
  std::string atom;
  std::vector<SExpr> list;
  bool is_list = false;
};

class SExprReader {
 public:
  explicit SExprReader(std::string_view text) : text_(text) {}

  bool at_end() {
    skip_space();
    return pos_ >= text_.size();
  }

  SExpr read() {
    skip_space();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of solver output");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      SExpr e;
      e.is_list = true;
      while (true) {
        skip_space();
        if (pos_ >= text_.size()) throw ParseError("unbalanced parentheses in solver output");
        if (text_[pos_] == ')') {
          ++pos_;
          return e;
        }
        e.list.push_back(read());
      }
    }
    if (c == ')') throw ParseError("unexpected ')' in solver output");
    SExpr e;
    if (c == '"' || c == '|') {
      const std::size_t end = text_.find(c, pos_ + 1);
      if (end == std::string_view::npos) throw ParseError("unterminated literal in solver output");
      e.atom = std::string(text_.substr(pos_ + 1, end - pos_ - 1));
      pos_ = end + 1;
      return e;
    }
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) && text_[pos_] != '(' &&
           text_[pos_] != ')') {
      ++pos_;
    }
    e.atom = std::string(text_.substr(start, pos_ - start));
    return e;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size()) {
      if (std::isspace(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
      } else if (text_[pos_] == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

std::int64_t value_of(const SExpr& e) {
  if (!e.is_list) {
    if (e.atom == "true") return 1;
    if (e.atom == "false") return 0;
    try {
      std::size_t used = 0;
      const std::int64_t v = std::stoll(e.atom, &used);
      if (used != e.atom.size()) throw ParseError("bad value '" + e.atom + "'");
      return v;
    } catch (const std::logic_error&) {
      throw ParseError("bad value '" + e.atom + "'");
    }
  }
  if (e.list.size() == 2 && !e.list[0].is_list && e.list[0].atom == "-") return -value_of(e.list[1]);
  throw ParseError("unsupported model value");
}

Model parse_model(const SExpr& e) {
  Model model;
  std::size_t first = 0;
  if (!e.list.empty() && !e.list[0].is_list && e.list[0].atom == "model") first = 1;
  for (std::size_t i = first; i < e.list.size(); ++i) {
    const SExpr& def = e.list[i];
    // (define-fun name () Sort value)
    if (!def.is_list || def.list.size() != 5 || def.list[0].atom != "define-fun") {
      throw ParseError("unexpected model entry");
    }
    if (!def.list[2].is_list || !def.list[2].list.empty()) continue;  // skip function definitions
    model[def.list[1].atom] = value_of(def.list[4]);
  }
  return model;
}

}  // namespace

SolverResult parse_solver_output(std::string_view output) {
  SolverResult result;
  result.raw_output = std::string(output);
  try {
    SExprReader reader(output);
    if (reader.at_end()) {
      result.status = SolverStatus::SolverError;
      result.message = "empty solver output";
      return result;
    }
    const SExpr head = reader.read();
    if (head.is_list) {
      result.status = SolverStatus::SolverError;
      result.message = "solver did not answer check-sat";
      return result;
    }
    if (head.atom == "unsat") {
      result.status = SolverStatus::Unsat;
    } else if (head.atom == "unknown") {
      result.status = SolverStatus::Unknown;
    } else if (head.atom == "sat") {
      result.status = SolverStatus::Sat;
      while (!reader.at_end()) {
        const SExpr e = reader.read();
        if (!e.is_list) continue;
        if (!e.list.empty() && !e.list[0].is_list && e.list[0].atom == "error") {
          throw ParseError("solver error after sat: " + (e.list.size() > 1 ? e.list[1].atom : std::string()));
        }
        if (!e.list.empty() && !e.list[0].is_list && e.list[0].atom == "objectives") continue;
        result.model = parse_model(e);
        break;
      }
      if (!result.model) throw ParseError("sat answer without a model");
    } else {
      result.status = SolverStatus::SolverError;
      result.message = "unexpected solver answer '" + head.atom + "'";
    }
  } catch (const ParseError& e) {
    result.status = SolverStatus::SolverError;
    result.model.reset();
    result.message = e.what();
  }
  return result;
}

Schedule decode_model(const SolverResult& result, const ConstraintIR& ir, const Instance& instance) {
  if (result.status != SolverStatus::Sat || !result.model) throw DecodeError("no model to decode");
  const Model& model = *result.model;
  auto lookup = [&](const std::string& name) {
    auto it = model.find(name);
    if (it == model.end()) throw DecodeError("model is missing variable '" + name + "'");
    return it->second;
  };

  Schedule schedule;
  schedule.ports.resize(ir.ports.size());
  schedule.assignment.assign(instance.frames().size(), 0);
  for (const auto& pv : ir.ports) {
    auto& port = schedule.ports[pv.link];
    port.link = pv.link;
    port.hyperperiod = pv.hyperperiod;
    for (std::size_t k = 0; k < pv.open.size(); ++k) {
      port.windows.push_back(WindowTimes{lookup(pv.open[k]), lookup(pv.close[k])});
    }
    const auto& frames = instance.port(pv.link).frames;
    for (std::size_t local = 0; local < pv.eps.size(); ++local) {
      int chosen = 0;
      for (std::size_t k = 0; k < pv.eps[local].size(); ++k) {
        if (lookup(pv.eps[local][k]) == 0) continue;
        if (chosen != 0) throw DecodeError("frame assigned to several windows on " + instance.graph().link_name(pv.link));
        chosen = static_cast<int>(k) + 1;
      }
      if (chosen == 0) throw DecodeError("frame without a window on " + instance.graph().link_name(pv.link));
      schedule.assignment[frames[local]] = chosen;
    }
  }
  if (ir.objective) schedule.objective_value = evaluate(ir.objective->expression, model);
  return schedule;
}

}  // namespace tsn
