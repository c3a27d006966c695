#pragma once

// Solver-agnostic term language: integer and boolean terms over declared
// variables. Terms are immutable and share structure.

#include <cstdint>
#include <map>
#include <memory>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace tsn {

enum class Sort { Int, Bool };

enum class Op {
  IntConst,
  BoolConst,
  Var,
  Add,
  Sub,
  Mul,
  Le,
  Lt,
  Ge,
  Eq,
  And,
  Or,
  Not,
  Implies,
  Ite,
};

/// Variable valuation; booleans are stored as 0/1.
using Model = std::map<std::string, std::int64_t>;

class Term {
 public:
  Term() = default;

  Op op() const;
  Sort sort() const;
  std::int64_t value() const;        // IntConst / BoolConst
  const std::string& name() const;   // Var
  std::span<const Term> args() const;

  bool is_null() const { return node_ == nullptr; }
  bool is_const() const { return op() == Op::IntConst || op() == Op::BoolConst; }
  /// True when no variable occurs in the term.
  bool is_ground() const;

  friend Term make_term(Op op, Sort sort, std::int64_t value, std::string name, std::vector<Term> args);

 private:
  struct Node;
  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

Term int_const(std::int64_t v);
Term bool_const(bool v);
Term int_var(std::string name);
Term bool_var(std::string name);

Term sum(std::vector<Term> terms);
Term operator+(const Term& a, const Term& b);
Term operator+(const Term& a, std::int64_t b);
Term operator-(const Term& a, const Term& b);
Term operator-(const Term& a, std::int64_t b);
Term operator*(const Term& a, const Term& b);
Term operator*(const Term& a, std::int64_t b);

Term le(const Term& a, const Term& b);
Term lt(const Term& a, const Term& b);
Term ge(const Term& a, const Term& b);
Term eq(const Term& a, const Term& b);
Term conj(std::vector<Term> terms);
Term disj(std::vector<Term> terms);
Term negate(const Term& a);
Term implies(const Term& a, const Term& b);
Term ite(const Term& c, const Term& then_term, const Term& else_term);

/// False when some product multiplies two non-ground factors.
bool is_linear(const Term& t);

/// Collects variable names in first-occurrence order.
void collect_variables(const Term& t, std::vector<std::string>& out);

/// Evaluates under a model; throws DecodeError on unbound variables.
std::int64_t evaluate(const Term& t, const Model& model);

/// SMT-LIB2 rendering of a term.
void write_smtlib(std::ostream& os, const Term& t);
std::string to_smtlib(const Term& t);

}  // namespace tsn
