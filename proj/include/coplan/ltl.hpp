#pragma once
// LTL front end: syntax tree, parser, negation normal form, Buchi translation
// and lasso semantics.

#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace coplan::ltl {

enum class Op { True, False, Atom, Not, And, Or, Next, Until, Release, Eventually, Always, Implies };

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  Op op;
  std::string name;  // Atom only
  FormulaPtr lhs;    // unary operand or left operand
  FormulaPtr rhs;
};

FormulaPtr mk_true();
FormulaPtr mk_false();
FormulaPtr mk_atom(std::string name);
FormulaPtr mk_unary(Op op, FormulaPtr a);
FormulaPtr mk_binary(Op op, FormulaPtr a, FormulaPtr b);

struct ParseError : std::runtime_error {
  std::size_t pos;
  ParseError(const std::string& msg, std::size_t p) : std::runtime_error(msg), pos(p) {}
};

/// Parses operators true false ! & | -> X U R F G, parentheses, and atoms.
/// Atoms containing characters other than [A-Za-z0-9_] must be double quoted.
/// An empty alphabet disables the unknown-atom check.
FormulaPtr parse_ltl(std::string_view text, const std::set<std::string>& alphabet = {});

/// Fully parenthesized; parse_ltl(to_string(f)) reproduces f.
std::string to_string(const FormulaPtr& f);
bool structurally_equal(const FormulaPtr& a, const FormulaPtr& b);
int depth(const FormulaPtr& f);
std::set<std::string> atoms_of(const FormulaPtr& f);

FormulaPtr to_nnf(const FormulaPtr& f);
bool is_nnf(const FormulaPtr& f);

using Letter = std::set<std::string>;

struct LassoWord {
  std::vector<Letter> prefix;
  std::vector<Letter> cycle;
};

struct Literal {
  std::string atom;
  bool positive = true;
  auto operator<=>(const Literal&) const = default;
};

struct BuchiTransition {
  int from = 0;
  int to = 0;
  std::vector<Literal> label;  // conjunction; empty means unconstrained
};

struct BuchiAutomaton {
  int num_states = 0;
  std::vector<int> initial;
  std::vector<bool> accepting;
  std::vector<BuchiTransition> transitions;

  std::size_t num_transitions() const { return transitions.size(); }
  std::string dump() const;
};

bool label_allows(const std::vector<Literal>& label, const Letter& letter);

/// Tableau expansion to a generalized automaton, then counter degeneralization.
/// Unreachable states and states with no accepting future are removed.
BuchiAutomaton translate_to_buchi(const FormulaPtr& nnf);

bool accepts_lasso(const BuchiAutomaton& ba, const LassoWord& w);
bool holds_on_lasso(const FormulaPtr& f, const LassoWord& w);

}  // namespace coplan::ltl
