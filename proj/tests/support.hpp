#pragma once
// Shared helpers for the test binaries: formula enumeration, lasso
// enumeration, a naive LTL evaluator and small scenario builders.

#include <Eigen/Dense>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "coplan/ltl.hpp"
#include "coplan/planner.hpp"

namespace testsupport {

using namespace coplan::ltl;

/// NNF formulas over atoms a, b (F and G are rewritten to U and R). Depth 0 literals, all depth-1 forms, all
/// unary depth-2 forms, and a structured slice of depth 3.
inline std::vector<FormulaPtr> nnf_corpus() {
  std::vector<FormulaPtr> lit{mk_true(), mk_false(), mk_atom("a"), mk_atom("b"), mk_unary(Op::Not, mk_atom("a")),
                              mk_unary(Op::Not, mk_atom("b"))};
  const Op un[] = {Op::Next, Op::Eventually, Op::Always};
  const Op bin[] = {Op::And, Op::Or, Op::Until, Op::Release};
  std::vector<FormulaPtr> d1;
  for (Op o : un)
    for (auto& x : lit) d1.push_back(mk_unary(o, x));
  for (Op o : bin)
    for (auto& x : lit)
      for (auto& y : lit) d1.push_back(mk_binary(o, x, y));
  std::vector<FormulaPtr> d2;
  for (Op o : un)
    for (auto& x : d1) d2.push_back(mk_unary(o, x));
  for (Op o : bin)
    for (Op i : un)
      for (const char* y : {"a", "b"}) {
        d2.push_back(mk_binary(o, mk_unary(i, mk_atom("a")), mk_atom(y)));
        d2.push_back(mk_binary(o, mk_atom(y), mk_unary(i, mk_atom("b"))));
      }
  std::vector<FormulaPtr> d3;
  for (Op o1 : un)
    for (Op o2 : un)
      for (Op o3 : un)
        for (auto& l : {lit[2], lit[4]}) d3.push_back(mk_unary(o1, mk_unary(o2, mk_unary(o3, l))));
  for (Op o1 : un)
    for (Op b : bin)
      for (Op o2 : un) d3.push_back(mk_unary(o1, mk_binary(b, mk_unary(o2, mk_atom("a")), mk_atom("b"))));
  for (Op b1 : bin)
    for (Op b2 : bin)
      d3.push_back(mk_binary(b1, mk_binary(b2, mk_atom("a"), mk_atom("b")), mk_unary(Op::Eventually, mk_atom("a"))));
  std::vector<FormulaPtr> all = lit;
  for (auto* v : {&d1, &d2, &d3}) all.insert(all.end(), v->begin(), v->end());
  for (auto& f : all) f = to_nnf(f);
  return all;
}

/// All lassos with prefix length <= maxp and cycle length 1..maxc over 2^atoms.
inline std::vector<LassoWord> all_lassos(const std::vector<std::string>& atoms, int maxp, int maxc) {
  std::vector<Letter> letters;
  for (unsigned m = 0; m < (1u << atoms.size()); ++m) {
    Letter l;
    for (std::size_t k = 0; k < atoms.size(); ++k)
      if (m & (1u << k)) l.insert(atoms[k]);
    letters.push_back(l);
  }
  std::vector<std::vector<Letter>> seqs[8];
  seqs[0] = {{}};
  for (int n = 1; n <= std::max(maxp, maxc); ++n)
    for (const auto& s : seqs[n - 1])
      for (const auto& l : letters) {
        auto t = s;
        t.push_back(l);
        seqs[n].push_back(t);
      }
  std::vector<LassoWord> out;
  for (int p = 0; p <= maxp; ++p)
    for (int c = 1; c <= maxc; ++c)
      for (const auto& pre : seqs[p])
        for (const auto& cyc : seqs[c]) out.push_back({pre, cyc});
  return out;
}

/// Direct recursive semantics on the unrolled word. Until looks ahead one
/// full period past the prefix, which covers every distinct suffix.
inline bool naive_holds(const FormulaPtr& f, const LassoWord& w, int i = 0) {
  const int p = static_cast<int>(w.prefix.size()), c = static_cast<int>(w.cycle.size());
  auto norm = [&](int k) { return k < p ? k : p + (k - p) % c; };
  auto at = [&](int k) -> const Letter& { k = norm(k); return k < p ? w.prefix[k] : w.cycle[k - p]; };
  const int span = p + c + 1;
  switch (f->op) {
    case Op::True: return true;
    case Op::False: return false;
    case Op::Atom: return at(i).count(f->name) > 0;
    case Op::Not: return !naive_holds(f->lhs, w, i);
    case Op::And: return naive_holds(f->lhs, w, i) && naive_holds(f->rhs, w, i);
    case Op::Or: return naive_holds(f->lhs, w, i) || naive_holds(f->rhs, w, i);
    case Op::Implies: return !naive_holds(f->lhs, w, i) || naive_holds(f->rhs, w, i);
    case Op::Next: return naive_holds(f->lhs, w, norm(i + 1));
    case Op::Eventually:
      for (int j = i; j < i + span; ++j)
        if (naive_holds(f->lhs, w, norm(j))) return true;
      return false;
    case Op::Always:
      for (int j = i; j < i + span; ++j)
        if (!naive_holds(f->lhs, w, norm(j))) return false;
      return true;
    case Op::Until:
      for (int j = i; j < i + span; ++j) {
        if (naive_holds(f->rhs, w, norm(j))) return true;
        if (!naive_holds(f->lhs, w, norm(j))) return false;
      }
      return false;
    case Op::Release:
      for (int j = i; j < i + span; ++j) {
        if (!naive_holds(f->rhs, w, norm(j))) return false;
        if (naive_holds(f->lhs, w, norm(j))) return true;
      }
      return true;
  }
  return false;
}

}  // namespace testsupport
