#include "tsn/expr.hpp"

#include <sstream>
#include <unordered_set>

#include "tsn/errors.hpp"

namespace tsn {

struct Term::Node {
  Op op;
  Sort sort;
  std::int64_t value = 0;
  std::string name;
  std::vector<Term> args;
};

Term make_term(Op op, Sort sort, std::int64_t value, std::string name, std::vector<Term> args) {
  for (const auto& a : args) {
    if (a.is_null()) throw std::invalid_argument("null term argument");
  }
  return Term(std::make_shared<const Term::Node>(Term::Node{op, sort, value, std::move(name), std::move(args)}));
}

Op Term::op() const { return node_->op; }
Sort Term::sort() const { return node_->sort; }
std::int64_t Term::value() const { return node_->value; }
const std::string& Term::name() const { return node_->name; }
std::span<const Term> Term::args() const { return node_->args; }

bool Term::is_ground() const {
  if (op() == Op::Var) return false;
  for (const auto& a : args()) {
    if (!a.is_ground()) return false;
  }
  return true;
}

Term int_const(std::int64_t v) { return make_term(Op::IntConst, Sort::Int, v, {}, {}); }
Term bool_const(bool v) { return make_term(Op::BoolConst, Sort::Bool, v ? 1 : 0, {}, {}); }
Term int_var(std::string name) { return make_term(Op::Var, Sort::Int, 0, std::move(name), {}); }
Term bool_var(std::string name) { return make_term(Op::Var, Sort::Bool, 0, std::move(name), {}); }

namespace {

void require_sort(const Term& t, Sort s, const char* what) {
  if (t.sort() != s) throw std::invalid_argument(std::string("sort mismatch in ") + what);
}

}  // namespace

Term sum(std::vector<Term> terms) {
  std::vector<Term> kept;
  std::int64_t constant = 0;
  for (auto& t : terms) {
    require_sort(t, Sort::Int, "sum");
    if (t.op() == Op::IntConst) {
      constant += t.value();
    } else if (t.op() == Op::Add) {
      for (const auto& a : t.args()) {
        if (a.op() == Op::IntConst) constant += a.value();
        else kept.push_back(a);
      }
    } else {
      kept.push_back(std::move(t));
    }
  }
  if (constant != 0 || kept.empty()) kept.push_back(int_const(constant));
  if (kept.size() == 1) return kept.front();
  return make_term(Op::Add, Sort::Int, 0, {}, std::move(kept));
}

Term operator+(const Term& a, const Term& b) { return sum({a, b}); }
Term operator+(const Term& a, std::int64_t b) { return sum({a, int_const(b)}); }

Term operator-(const Term& a, const Term& b) {
  require_sort(a, Sort::Int, "-");
  require_sort(b, Sort::Int, "-");
  if (b.op() == Op::IntConst) return a + (-b.value());
  return make_term(Op::Sub, Sort::Int, 0, {}, {a, b});
}

Term operator-(const Term& a, std::int64_t b) { return a + (-b); }

Term operator*(const Term& a, const Term& b) {
  require_sort(a, Sort::Int, "*");
  require_sort(b, Sort::Int, "*");
  if (a.op() == Op::IntConst && b.op() == Op::IntConst) return int_const(a.value() * b.value());
  if (a.op() == Op::IntConst && a.value() == 1) return b;
  if (b.op() == Op::IntConst && b.value() == 1) return a;
  if ((a.op() == Op::IntConst && a.value() == 0) || (b.op() == Op::IntConst && b.value() == 0)) {
    return int_const(0);
  }
  return make_term(Op::Mul, Sort::Int, 0, {}, {a, b});
}

Term operator*(const Term& a, std::int64_t b) { return a * int_const(b); }

namespace {

Term relation(Op op, const Term& a, const Term& b, const char* what) {
  require_sort(a, Sort::Int, what);
  require_sort(b, Sort::Int, what);
  return make_term(op, Sort::Bool, 0, {}, {a, b});
}

Term junction(Op op, std::vector<Term> terms, bool unit) {
  std::vector<Term> kept;
  for (auto& t : terms) {
    require_sort(t, Sort::Bool, "and/or");
    if (t.op() == Op::BoolConst) {
      if ((t.value() != 0) == unit) continue;
      return bool_const(!unit);
    }
    if (t.op() == op) {
      for (const auto& a : t.args()) kept.push_back(a);
    } else {
      kept.push_back(std::move(t));
    }
  }
  if (kept.empty()) return bool_const(unit);
  if (kept.size() == 1) return kept.front();
  return make_term(op, Sort::Bool, 0, {}, std::move(kept));
}

}  // namespace

Term le(const Term& a, const Term& b) { return relation(Op::Le, a, b, "<="); }
Term lt(const Term& a, const Term& b) { return relation(Op::Lt, a, b, "<"); }
Term ge(const Term& a, const Term& b) { return relation(Op::Ge, a, b, ">="); }

Term eq(const Term& a, const Term& b) {
  if (a.sort() != b.sort()) throw std::invalid_argument("sort mismatch in =");
  return make_term(Op::Eq, Sort::Bool, 0, {}, {a, b});
}

Term conj(std::vector<Term> terms) { return junction(Op::And, std::move(terms), true); }
Term disj(std::vector<Term> terms) { return junction(Op::Or, std::move(terms), false); }

Term negate(const Term& a) {
  require_sort(a, Sort::Bool, "not");
  if (a.op() == Op::BoolConst) return bool_const(a.value() == 0);
  return make_term(Op::Not, Sort::Bool, 0, {}, {a});
}

Term implies(const Term& a, const Term& b) {
  require_sort(a, Sort::Bool, "=>");
  require_sort(b, Sort::Bool, "=>");
  return make_term(Op::Implies, Sort::Bool, 0, {}, {a, b});
}

Term ite(const Term& c, const Term& then_term, const Term& else_term) {
  require_sort(c, Sort::Bool, "ite");
  if (then_term.sort() != else_term.sort()) throw std::invalid_argument("sort mismatch in ite");
  return make_term(Op::Ite, then_term.sort(), 0, {}, {c, then_term, else_term});
}

bool is_linear(const Term& t) {
  if (t.op() == Op::Mul) {
    int non_ground = 0;
    for (const auto& a : t.args()) {
      if (!a.is_ground()) ++non_ground;
    }
    if (non_ground > 1) return false;
  }
  for (const auto& a : t.args()) {
    if (!is_linear(a)) return false;
  }
  return true;
}

namespace {

void collect(const Term& t, std::vector<std::string>& out, std::unordered_set<std::string>& seen) {
  if (t.op() == Op::Var) {
    if (seen.insert(t.name()).second) out.push_back(t.name());
    return;
  }
  for (const auto& a : t.args()) collect(a, out, seen);
}

}  // namespace

void collect_variables(const Term& t, std::vector<std::string>& out) {
  std::unordered_set<std::string> seen(out.begin(), out.end());
  collect(t, out, seen);
}

std::int64_t evaluate(const Term& t, const Model& model) {
  auto args = t.args();
  auto arg = [&](std::size_t i) { return evaluate(args[i], model); };
  switch (t.op()) {
    case Op::IntConst:
    case Op::BoolConst:
      return t.value();
    case Op::Var: {
      auto it = model.find(t.name());
      if (it == model.end()) throw DecodeError("model has no value for '" + t.name() + "'");
      return it->second;
    }
    case Op::Add: {
      std::int64_t acc = 0;
      for (std::size_t i = 0; i < args.size(); ++i) acc += arg(i);
      return acc;
    }
    case Op::Sub:
      return arg(0) - arg(1);
    case Op::Mul: {
      std::int64_t acc = 1;
      for (std::size_t i = 0; i < args.size(); ++i) acc *= arg(i);
      return acc;
    }
    case Op::Le:
      return arg(0) <= arg(1);
    case Op::Lt:
      return arg(0) < arg(1);
    case Op::Ge:
      return arg(0) >= arg(1);
    case Op::Eq:
      return arg(0) == arg(1);
    case Op::And:
      for (std::size_t i = 0; i < args.size(); ++i) {
        if (arg(i) == 0) return 0;
      }
      return 1;
    case Op::Or:
      for (std::size_t i = 0; i < args.size(); ++i) {
        if (arg(i) != 0) return 1;
      }
      return 0;
    case Op::Not:
      return arg(0) == 0;
    case Op::Implies:
      return arg(0) == 0 || arg(1) != 0;
    case Op::Ite:
      return arg(0) != 0 ? arg(1) : arg(2);
  }
  return 0;
}

namespace {

const char* op_symbol(Op op) {
  switch (op) {
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::Mul: return "*";
    case Op::Le: return "<=";
    case Op::Lt: return "<";
    case Op::Ge: return ">=";
    case Op::Eq: return "=";
    case Op::And: return "and";
    case Op::Or: return "or";
    case Op::Not: return "not";
    case Op::Implies: return "=>";
    case Op::Ite: return "ite";
    default: return "?";
  }
}

}  // namespace

void write_smtlib(std::ostream& os, const Term& t) {
  switch (t.op()) {
    case Op::IntConst:
      if (t.value() < 0) os << "(- " << -t.value() << ')';
      else os << t.value();
      return;
    case Op::BoolConst:
      os << (t.value() != 0 ? "true" : "false");
      return;
    case Op::Var:
      os << t.name();
      return;
    default:
      os << '(' << op_symbol(t.op());
      for (const auto& a : t.args()) {
        os << ' ';
        write_smtlib(os, a);
      }
      os << ')';
  }
}

std::string to_smtlib(const Term& t) {
  std::ostringstream os;
  write_smtlib(os, t);
  return os.str();
}

}  // namespace tsn
