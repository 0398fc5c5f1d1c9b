#include "coplan/ltl.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <tuple>
#include <sstream>

namespace coplan::ltl {

FormulaPtr mk_true() { return std::make_shared<Formula>(Formula{Op::True, {}, nullptr, nullptr}); }
FormulaPtr mk_false() { return std::make_shared<Formula>(Formula{Op::False, {}, nullptr, nullptr}); }
FormulaPtr mk_atom(std::string name) {
  return std::make_shared<Formula>(Formula{Op::Atom, std::move(name), nullptr, nullptr});
}
FormulaPtr mk_unary(Op op, FormulaPtr a) {
  return std::make_shared<Formula>(Formula{op, {}, std::move(a), nullptr});
}
FormulaPtr mk_binary(Op op, FormulaPtr a, FormulaPtr b) {
  return std::make_shared<Formula>(Formula{op, {}, std::move(a), std::move(b)});
}

namespace {

bool is_unary(Op op) {
  return op == Op::Not || op == Op::Next || op == Op::Eventually || op == Op::Always;
}
bool is_binary(Op op) {
  return op == Op::And || op == Op::Or || op == Op::Until || op == Op::Release ||
         op == Op::Implies;
}

// ---- parser ----

enum class Tok { End, LParen, RParen, Not, And, Or, Implies, X, U, R, F, G, True, False, Atom };

struct Token {
  Tok kind;
  std::string text;
  std::size_t pos;
};

bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::vector<Token> lex(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) { ++i; continue; }
    std::size_t start = i;
    switch (c) {
      case '(': out.push_back({Tok::LParen, "(", start}); ++i; continue;
      case ')': out.push_back({Tok::RParen, ")", start}); ++i; continue;
      case '!': out.push_back({Tok::Not, "!", start}); ++i; continue;
      case '&': out.push_back({Tok::And, "&", start}); ++i; if (i < s.size() && s[i] == '&') ++i; continue;
      case '|': out.push_back({Tok::Or, "|", start}); ++i; if (i < s.size() && s[i] == '|') ++i; continue;
      case '-':
        if (i + 1 < s.size() && s[i + 1] == '>') { out.push_back({Tok::Implies, "->", start}); i += 2; continue; }
        throw ParseError("unexpected '-'", start);
      case '"': {
        std::size_t j = s.find('"', i + 1);
        if (j == std::string_view::npos) throw ParseError("unterminated quoted atom", start);
        if (j == i + 1) throw ParseError("empty atom", start);
        out.push_back({Tok::Atom, std::string(s.substr(i + 1, j - i - 1)), start});
        i = j + 1;
        continue;
      }
      default: break;
    }
    if (!ident_char(c)) throw ParseError(std::string("unexpected character '") + c + "'", start);
    while (i < s.size() && ident_char(s[i])) ++i;
    std::string w(s.substr(start, i - start));
    Tok k = Tok::Atom;
    if (w == "X") k = Tok::X;
    else if (w == "U") k = Tok::U;
    else if (w == "R") k = Tok::R;
    else if (w == "F") k = Tok::F;
    else if (w == "G") k = Tok::G;
    else if (w == "true") k = Tok::True;
    else if (w == "false") k = Tok::False;
    out.push_back({k, w, start});
  }
  out.push_back({Tok::End, "", s.size()});
  return out;
}

// implies < or < and < until/release < unary
class Parser {
 public:
  Parser(std::vector<Token> toks, const std::set<std::string>& alphabet)
      : toks_(std::move(toks)), alphabet_(alphabet) {}

  FormulaPtr parse() {
    auto f = implies();
    if (peek().kind != Tok::End) throw ParseError("trailing input '" + peek().text + "'", peek().pos);
    return f;
  }

 private:
  const Token& peek() const { return toks_[i_]; }
  Token take() { return toks_[i_++]; }

  FormulaPtr implies() {
    auto a = disj();
    if (peek().kind == Tok::Implies) {
      take();
      return mk_binary(Op::Implies, a, implies());
    }
    return a;
  }
  FormulaPtr disj() {
    auto a = conj();
    while (peek().kind == Tok::Or) { take(); a = mk_binary(Op::Or, a, conj()); }
    return a;
  }
  FormulaPtr conj() {
    auto a = until();
    while (peek().kind == Tok::And) { take(); a = mk_binary(Op::And, a, until()); }
    return a;
  }
  FormulaPtr until() {
    auto a = unary();
    if (peek().kind == Tok::U) { take(); return mk_binary(Op::Until, a, until()); }
    if (peek().kind == Tok::R) { take(); return mk_binary(Op::Release, a, until()); }
    return a;
  }
  FormulaPtr unary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Not: take(); return mk_unary(Op::Not, unary());
      case Tok::X: take(); return mk_unary(Op::Next, unary());
      case Tok::F: take(); return mk_unary(Op::Eventually, unary());
      case Tok::G: take(); return mk_unary(Op::Always, unary());
      case Tok::True: take(); return mk_true();
      case Tok::False: take(); return mk_false();
      case Tok::Atom: {
        Token a = take();
        if (!alphabet_.empty() && !alphabet_.count(a.text))
          throw ParseError("unknown atom '" + a.text + "'", a.pos);
        return mk_atom(a.text);
      }
      case Tok::LParen: {
        take();
        auto f = implies();
        if (peek().kind != Tok::RParen) throw ParseError("expected ')'", peek().pos);
        take();
        return f;
      }
      default:
        throw ParseError(t.kind == Tok::End ? "unexpected end of input" : "unexpected '" + t.text + "'",
                         t.pos);
    }
  }

  std::vector<Token> toks_;
  const std::set<std::string>& alphabet_;
  std::size_t i_ = 0;
};

bool needs_quotes(const std::string& n) {
  if (n == "X" || n == "U" || n == "R" || n == "F" || n == "G" || n == "true" || n == "false")
    return true;
  return !std::all_of(n.begin(), n.end(), ident_char);
}

}  // namespace

FormulaPtr parse_ltl(std::string_view text, const std::set<std::string>& alphabet) {
  return Parser(lex(text), alphabet).parse();
}

std::string to_string(const FormulaPtr& f) {
  switch (f->op) {
    case Op::True: return "true";
    case Op::False: return "false";
    case Op::Atom: return needs_quotes(f->name) ? "\"" + f->name + "\"" : f->name;
    case Op::Not: return "!" + to_string(f->lhs);
    case Op::Next: return "X " + to_string(f->lhs);
    case Op::Eventually: return "F " + to_string(f->lhs);
    case Op::Always: return "G " + to_string(f->lhs);
    default: break;
  }
  const char* sym = "";
  switch (f->op) {
    case Op::And: sym = " & "; break;
    case Op::Or: sym = " | "; break;
    case Op::Until: sym = " U "; break;
    case Op::Release: sym = " R "; break;
    case Op::Implies: sym = " -> "; break;
    default: break;
  }
  return "(" + to_string(f->lhs) + sym + to_string(f->rhs) + ")";
}

bool structurally_equal(const FormulaPtr& a, const FormulaPtr& b) {
  if (a->op != b->op) return false;
  if (a->op == Op::Atom) return a->name == b->name;
  if (is_unary(a->op)) return structurally_equal(a->lhs, b->lhs);
  if (is_binary(a->op)) return structurally_equal(a->lhs, b->lhs) && structurally_equal(a->rhs, b->rhs);
  return true;
}

int depth(const FormulaPtr& f) {
  if (is_unary(f->op)) return 1 + depth(f->lhs);
  if (is_binary(f->op)) return 1 + std::max(depth(f->lhs), depth(f->rhs));
  return 0;
}

std::set<std::string> atoms_of(const FormulaPtr& f) {
  std::set<std::string> out;
  std::function<void(const FormulaPtr&)> rec = [&](const FormulaPtr& g) {
    if (g->op == Op::Atom) out.insert(g->name);
    if (g->lhs) rec(g->lhs);
    if (g->rhs) rec(g->rhs);
  };
  rec(f);
  return out;
}

// ---- NNF ----

namespace {

FormulaPtr nnf(const FormulaPtr& f, bool neg) {
  switch (f->op) {
    case Op::True: return neg ? mk_false() : f;
    case Op::False: return neg ? mk_true() : f;
    case Op::Atom: return neg ? mk_unary(Op::Not, f) : f;
    case Op::Not: return nnf(f->lhs, !neg);
    case Op::Next: return mk_unary(Op::Next, nnf(f->lhs, neg));
    case Op::And:
      return mk_binary(neg ? Op::Or : Op::And, nnf(f->lhs, neg), nnf(f->rhs, neg));
    case Op::Or:
      return mk_binary(neg ? Op::And : Op::Or, nnf(f->lhs, neg), nnf(f->rhs, neg));
    case Op::Implies:
      // a -> b  ==  !a | b
      return neg ? mk_binary(Op::And, nnf(f->lhs, false), nnf(f->rhs, true))
                 : mk_binary(Op::Or, nnf(f->lhs, true), nnf(f->rhs, false));
    case Op::Until:
      return mk_binary(neg ? Op::Release : Op::Until, nnf(f->lhs, neg), nnf(f->rhs, neg));
    case Op::Release:
      return mk_binary(neg ? Op::Until : Op::Release, nnf(f->lhs, neg), nnf(f->rhs, neg));
    case Op::Eventually:
      return neg ? mk_binary(Op::Release, mk_false(), nnf(f->lhs, true))
                 : mk_binary(Op::Until, mk_true(), nnf(f->lhs, false));
    case Op::Always:
      return neg ? mk_binary(Op::Until, mk_true(), nnf(f->lhs, true))
                 : mk_binary(Op::Release, mk_false(), nnf(f->lhs, false));
  }
  return f;
}

}  // namespace

FormulaPtr to_nnf(const FormulaPtr& f) { return nnf(f, false); }

bool is_nnf(const FormulaPtr& f) {
  switch (f->op) {
    case Op::Not: return f->lhs->op == Op::Atom;
    case Op::Eventually:
    case Op::Always:
    case Op::Implies: return false;
    default: break;
  }
  if (f->lhs && !is_nnf(f->lhs)) return false;
  if (f->rhs && !is_nnf(f->rhs)) return false;
  return true;
}

// ---- automata ----

bool label_allows(const std::vector<Literal>& label, const Letter& letter) {
  for (const auto& l : label)
    if (static_cast<bool>(letter.count(l.atom)) != l.positive) return false;
  return true;
}

std::string BuchiAutomaton::dump() const {
  std::ostringstream os;
  os << "states " << num_states << "\ninitial";
  auto init = initial;
  std::sort(init.begin(), init.end());
  for (int s : init) os << ' ' << s;
  os << "\naccepting";
  for (int s = 0; s < num_states; ++s)
    if (accepting[s]) os << ' ' << s;
  os << '\n';
  std::vector<std::string> lines;
  for (const auto& t : transitions) {
    std::ostringstream l;
    l << t.from << " -> " << t.to << " [";
    for (std::size_t k = 0; k < t.label.size(); ++k)
      l << (k ? " & " : "") << (t.label[k].positive ? "" : "!") << t.label[k].atom;
    l << "]";
    lines.push_back(l.str());
  }
  std::sort(lines.begin(), lines.end());
  for (const auto& l : lines) os << l << '\n';
  return os.str();
}

namespace {

// Interns subformulas so tableau sets hold small integers.
class Closure {
 public:
  int id(const FormulaPtr& f) {
    std::string key = to_string(f);
    auto it = index_.find(key);
    if (it != index_.end()) return it->second;
    int k = static_cast<int>(forms_.size());
    forms_.push_back(f);
    index_.emplace(std::move(key), k);
    return k;
  }
  const FormulaPtr& at(int k) const { return forms_[k]; }

 private:
  std::vector<FormulaPtr> forms_;
  std::map<std::string, int> index_;
};

struct Node {
  std::set<int> incoming;  // -1 marks the initial pseudo-node
  std::set<int> todo, old, next;
};

class Tableau {
 public:
  explicit Tableau(const FormulaPtr& f) {
    Node n;
    n.incoming.insert(-1);
    n.todo.insert(cl_.id(f));
    expand(std::move(n));
  }

  Closure cl_;
  std::vector<Node> nodes_;

 private:
  void expand(Node n) {
    while (!n.todo.empty()) {
      int k = *n.todo.begin();
      n.todo.erase(n.todo.begin());
      if (n.old.count(k)) continue;
      const FormulaPtr f = cl_.at(k);
      switch (f->op) {
        case Op::True: n.old.insert(k); break;
        case Op::False: return;
        case Op::Atom:
        case Op::Not: {
          FormulaPtr comp = f->op == Op::Atom ? mk_unary(Op::Not, f) : f->lhs;
          if (n.old.count(cl_.id(comp))) return;
          n.old.insert(k);
          break;
        }
        case Op::And:
          n.old.insert(k);
          add_todo(n, f->lhs);
          add_todo(n, f->rhs);
          break;
        case Op::Next:
          n.old.insert(k);
          n.next.insert(cl_.id(f->lhs));
          break;
        case Op::Or:
        case Op::Until:
        case Op::Release: {
          Node a = n, b = n;
          a.old.insert(k);
          b.old.insert(k);
          if (f->op == Op::Or) {
            add_todo(a, f->lhs);
            add_todo(b, f->rhs);
          } else if (f->op == Op::Until) {
            add_todo(a, f->lhs);
            a.next.insert(k);
            add_todo(b, f->rhs);
          } else {
            add_todo(a, f->rhs);
            a.next.insert(k);
            add_todo(b, f->lhs);
            add_todo(b, f->rhs);
          }
          expand(std::move(a));
          expand(std::move(b));
          return;
        }
        default: throw std::logic_error("tableau input is not in NNF");
      }
    }
    for (auto& m : nodes_) {
      if (m.old == n.old && m.next == n.next) {
        m.incoming.insert(n.incoming.begin(), n.incoming.end());
        return;
      }
    }
    int me = static_cast<int>(nodes_.size());
    Node succ;
    succ.incoming.insert(me);
    succ.todo = n.next;
    nodes_.push_back(std::move(n));
    expand(std::move(succ));
  }

  void add_todo(Node& n, const FormulaPtr& g) {
    int k = cl_.id(g);
    if (!n.old.count(k)) n.todo.insert(k);
  }
};

// Tarjan SCC over adjacency lists; returns component id per vertex.
std::vector<int> scc(const std::vector<std::vector<int>>& adj, int& ncomp) {
  int n = static_cast<int>(adj.size());
  std::vector<int> idx(n, -1), low(n, 0), comp(n, -1), stack;
  std::vector<bool> on(n, false);
  int counter = 0;
  ncomp = 0;
  struct Frame { int v; std::size_t e; };
  for (int s = 0; s < n; ++s) {
    if (idx[s] >= 0) continue;
    std::vector<Frame> call{{s, 0}};
    idx[s] = low[s] = counter++;
    stack.push_back(s);
    on[s] = true;
    while (!call.empty()) {
      auto& fr = call.back();
      if (fr.e < adj[fr.v].size()) {
        int w = adj[fr.v][fr.e++];
        if (idx[w] < 0) {
          idx[w] = low[w] = counter++;
          stack.push_back(w);
          on[w] = true;
          call.push_back({w, 0});
        } else if (on[w]) {
          low[fr.v] = std::min(low[fr.v], idx[w]);
        }
      } else {
        int v = fr.v;
        call.pop_back();
        if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
        if (low[v] == idx[v]) {
          int w;
          do {
            w = stack.back();
            stack.pop_back();
            on[w] = false;
            comp[w] = ncomp;
          } while (w != v);
          ++ncomp;
        }
      }
    }
  }
  return comp;
}

// Vertices that can reach a cycle through an accepting vertex.
std::vector<bool> live_vertices(const std::vector<std::vector<int>>& adj, const std::vector<bool>& acc) {
  int n = static_cast<int>(adj.size());
  int nc = 0;
  auto comp = scc(adj, nc);
  std::vector<int> csize(nc, 0);
  std::vector<bool> self(n, false), good(nc, false);
  for (int v = 0; v < n; ++v) {
    ++csize[comp[v]];
    for (int w : adj[v])
      if (w == v) self[v] = true;
  }
  for (int v = 0; v < n; ++v)
    if (acc[v] && (csize[comp[v]] > 1 || self[v])) good[comp[v]] = true;
  std::vector<std::vector<int>> radj(n);
  for (int v = 0; v < n; ++v)
    for (int w : adj[v]) radj[w].push_back(v);
  std::vector<bool> live(n, false);
  std::vector<int> work;
  for (int v = 0; v < n; ++v)
    if (good[comp[v]]) { live[v] = true; work.push_back(v); }
  while (!work.empty()) {
    int v = work.back();
    work.pop_back();
    for (int u : radj[v])
      if (!live[u]) { live[u] = true; work.push_back(u); }
  }
  return live;
}

// Coarsest bisimulation quotient, then removal of edges implied by a weaker
// edge between the same pair of states.
BuchiAutomaton reduce(const BuchiAutomaton& in) {
  int n = in.num_states;
  std::vector<int> block(n);
  for (int s = 0; s < n; ++s) block[s] = in.accepting[s] ? 1 : 0;
  for (;;) {
    std::map<std::pair<int, std::set<std::pair<std::vector<Literal>, int>>>, int> sig_ids;
    std::vector<int> next(n);
    std::vector<std::set<std::pair<std::vector<Literal>, int>>> sig(n);
    for (const auto& t : in.transitions) sig[t.from].insert({t.label, block[t.to]});
    for (int s = 0; s < n; ++s) {
      auto key = std::make_pair(block[s], sig[s]);
      auto it = sig_ids.find(key);
      if (it == sig_ids.end()) it = sig_ids.emplace(key, static_cast<int>(sig_ids.size())).first;
      next[s] = it->second;
    }
    std::size_t before = std::set<int>(block.begin(), block.end()).size();
    block = next;
    if (sig_ids.size() == before) break;
  }
  // renumber blocks by first occurrence so ids follow the original order
  std::map<int, int> order;
  for (int s = 0; s < n; ++s)
    if (!order.count(block[s])) order.emplace(block[s], static_cast<int>(order.size()));
  BuchiAutomaton out;
  out.num_states = static_cast<int>(order.size());
  out.accepting.assign(out.num_states, false);
  for (int s = 0; s < n; ++s) out.accepting[order[block[s]]] = in.accepting[s];
  for (int s : in.initial) {
    int b = order[block[s]];
    if (std::find(out.initial.begin(), out.initial.end(), b) == out.initial.end()) out.initial.push_back(b);
  }
  std::set<std::tuple<int, int, std::vector<Literal>>> edges;
  for (const auto& t : in.transitions) edges.insert({order[block[t.from]], order[block[t.to]], t.label});
  for (const auto& [a, b, lab] : edges) {
    bool implied = false;
    for (const auto& [a2, b2, lab2] : edges) {
      if (a2 != a || b2 != b || lab2 == lab) continue;
      if (std::includes(lab.begin(), lab.end(), lab2.begin(), lab2.end())) { implied = true; break; }
    }
    if (!implied) out.transitions.push_back({a, b, lab});
  }
  return out;
}

}  // namespace

BuchiAutomaton translate_to_buchi(const FormulaPtr& f) {
  if (!is_nnf(f)) throw std::invalid_argument("translate_to_buchi expects an NNF formula");
  Tableau tab(f);
  const auto& nodes = tab.nodes_;
  int nn = static_cast<int>(nodes.size());

  std::vector<int> untils;
  for (int i = 0; i < nn; ++i)
    for (int k : nodes[i].old)
      if (tab.cl_.at(k)->op == Op::Until && std::find(untils.begin(), untils.end(), k) == untils.end())
        untils.push_back(k);
  std::sort(untils.begin(), untils.end());
  int nacc = std::max<int>(1, static_cast<int>(untils.size()));

  auto in_f = [&](int node, int i) {
    if (untils.empty()) return true;
    int u = untils[i];
    if (!nodes[node].old.count(u)) return true;
    return nodes[node].old.count(tab.cl_.id(tab.cl_.at(u)->rhs)) > 0;
  };

  std::vector<std::vector<Literal>> lits(nn);
  for (int i = 0; i < nn; ++i) {
    for (int k : nodes[i].old) {
      const auto& g = tab.cl_.at(k);
      if (g->op == Op::Atom) lits[i].push_back({g->name, true});
      if (g->op == Op::Not) lits[i].push_back({g->lhs->name, false});
    }
    std::sort(lits[i].begin(), lits[i].end());
  }

  // Degeneralized states: 0 is the initial state, 1 + node * nacc + counter otherwise.
  int total = 1 + nn * nacc;
  std::vector<std::vector<std::pair<int, int>>> edges(total);  // (dest, labelling node)
  for (int j = 0; j < nn; ++j) {
    for (int src : nodes[j].incoming) {
      if (src < 0) {
        edges[0].push_back({1 + j * nacc, j});
        continue;
      }
      for (int c = 0; c < nacc; ++c) {
        int nc = in_f(src, c) ? (c + 1) % nacc : c;
        edges[1 + src * nacc + c].push_back({1 + j * nacc + nc, j});
      }
    }
  }
  std::vector<bool> acc(total, false);
  for (int i = 0; i < nn; ++i) acc[1 + i * nacc] = in_f(i, 0);

  std::vector<std::vector<int>> adj(total);
  for (int v = 0; v < total; ++v)
    for (auto [w, lab] : edges[v]) adj[v].push_back(w);
  std::vector<bool> reach(total, false);
  std::vector<int> work{0};
  reach[0] = true;
  while (!work.empty()) {
    int v = work.back();
    work.pop_back();
    for (int w : adj[v])
      if (!reach[w]) { reach[w] = true; work.push_back(w); }
  }
  auto live = live_vertices(adj, acc);

  std::vector<int> remap(total, -1);
  BuchiAutomaton ba;
  for (int v = 0; v < total; ++v)
    if (reach[v] && live[v]) remap[v] = ba.num_states++;
  if (remap[0] < 0) {
    // empty language: a single non-accepting initial state
    ba.num_states = 1;
    ba.initial = {0};
    ba.accepting = {false};
    return ba;
  }
  ba.initial = {remap[0]};
  ba.accepting.assign(ba.num_states, false);
  for (int v = 0; v < total; ++v)
    if (remap[v] >= 0) ba.accepting[remap[v]] = acc[v];
  for (int v = 0; v < total; ++v) {
    if (remap[v] < 0) continue;
    for (auto [w, lab] : edges[v])
      if (remap[w] >= 0) ba.transitions.push_back({remap[v], remap[w], lits[lab]});
  }
  // The initial state is never re-entered, so its acceptance flag is free.
  auto best = reduce(ba);
  bool reentered = std::any_of(ba.transitions.begin(), ba.transitions.end(),
                               [&](const BuchiTransition& t) { return t.to == ba.initial[0]; });
  if (!reentered) {
    ba.accepting[ba.initial[0]] = !ba.accepting[ba.initial[0]];
    auto alt = reduce(ba);
    if (alt.num_states < best.num_states) best = std::move(alt);
  }
  return best;
}

bool accepts_lasso(const BuchiAutomaton& ba, const LassoWord& w) {
  if (w.cycle.empty()) throw std::invalid_argument("lasso cycle must be nonempty");
  int p = static_cast<int>(w.prefix.size());
  int n = p + static_cast<int>(w.cycle.size());
  auto letter = [&](int i) -> const Letter& { return i < p ? w.prefix[i] : w.cycle[i - p]; };
  auto succ = [&](int i) { return i + 1 < n ? i + 1 : p; };
  int total = ba.num_states * n;
  std::vector<std::vector<int>> adj(total);
  std::vector<bool> acc(total, false);
  for (const auto& t : ba.transitions)
    for (int i = 0; i < n; ++i)
      if (label_allows(t.label, letter(i))) adj[t.from * n + i].push_back(t.to * n + succ(i));
  for (int s = 0; s < ba.num_states; ++s)
    for (int i = 0; i < n; ++i) acc[s * n + i] = ba.accepting[s];
  auto live = live_vertices(adj, acc);
  for (int s : ba.initial)
    if (live[s * n + 0]) return true;
  return false;
}

bool holds_on_lasso(const FormulaPtr& f, const LassoWord& w) {
  if (w.cycle.empty()) throw std::invalid_argument("lasso cycle must be nonempty");
  int p = static_cast<int>(w.prefix.size());
  int n = p + static_cast<int>(w.cycle.size());
  auto letter = [&](int i) -> const Letter& { return i < p ? w.prefix[i] : w.cycle[i - p]; };
  auto succ = [&](int i) { return i + 1 < n ? i + 1 : p; };
  std::map<const Formula*, std::vector<char>> memo;

  std::function<const std::vector<char>&(const FormulaPtr&)> eval = [&](const FormulaPtr& g)
      -> const std::vector<char>& {
    auto it = memo.find(g.get());
    if (it != memo.end()) return it->second;
    std::vector<char> v(n, 0);
    switch (g->op) {
      case Op::True: std::fill(v.begin(), v.end(), 1); break;
      case Op::False: break;
      case Op::Atom:
        for (int i = 0; i < n; ++i) v[i] = letter(i).count(g->name) > 0;
        break;
      case Op::Not: {
        const auto& a = eval(g->lhs);
        for (int i = 0; i < n; ++i) v[i] = !a[i];
        break;
      }
      case Op::And:
      case Op::Or:
      case Op::Implies: {
        const auto& a = eval(g->lhs);
        const auto& b = eval(g->rhs);
        for (int i = 0; i < n; ++i)
          v[i] = g->op == Op::And ? (a[i] && b[i]) : g->op == Op::Or ? (a[i] || b[i]) : (!a[i] || b[i]);
        break;
      }
      case Op::Next: {
        const auto& a = eval(g->lhs);
        for (int i = 0; i < n; ++i) v[i] = a[succ(i)];
        break;
      }
      default: {
        // fixpoints over the finite position graph: least for U/F, greatest for R/G
        bool least = g->op == Op::Until || g->op == Op::Eventually;
        std::vector<char> a(n, 1), b;
        if (g->op == Op::Until || g->op == Op::Release) {
          a = eval(g->lhs);
          b = eval(g->rhs);
        } else {
          b = eval(g->lhs);
          if (g->op == Op::Always) std::fill(a.begin(), a.end(), 0);
        }
        std::fill(v.begin(), v.end(), least ? 0 : 1);
        for (bool changed = true; changed;) {
          changed = false;
          for (int i = n - 1; i >= 0; --i) {
            char nv = least ? (b[i] || (a[i] && v[succ(i)])) : (b[i] && (a[i] || v[succ(i)]));
            if (nv != v[i]) { v[i] = nv; changed = true; }
          }
        }
      }
    }
    return memo.emplace(g.get(), std::move(v)).first->second;
  };
  return eval(f)[0];
}

}  // namespace coplan::ltl
