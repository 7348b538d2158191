#include "spinr/exprlang.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <deque>
#include <set>

#include "spinr/curvature.hpp"
#include "spinr/spinlab.hpp"

namespace spinr::expr {

namespace {

// ------------------------------ lexing ------------------------------------

struct Token {
  enum Kind { Name, Num, Plus, Minus, LBrack, RBrack, LParen, RParen, Comma, End };
  Kind kind;
  std::string text;
  double num = 0.0;
  std::size_t pos = 0;
};

bool is_name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_name_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)); }

std::vector<Token> lex(const std::string& s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (is_name_start(c)) {
      std::size_t j = i + 1;
      while (j < s.size() && is_name_char(s[j])) ++j;
      out.push_back({Token::Name, s.substr(i, j - i), 0.0, i});
      i = j;
      continue;
    }
    if (is_digit(c) || (c == '.' && i + 1 < s.size() && is_digit(s[i + 1]))) {
      std::size_t j = i;
      while (j < s.size() && is_digit(s[j])) ++j;
      if (j < s.size() && s[j] == '.') {
        ++j;
        while (j < s.size() && is_digit(s[j])) ++j;
      }
      if (j < s.size() && (s[j] == 'e' || s[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
        if (k < s.size() && is_digit(s[k])) {
          j = k;
          while (j < s.size() && is_digit(s[j])) ++j;
        }
      }
      std::string text = s.substr(i, j - i);
      out.push_back({Token::Num, text, std::strtod(text.c_str(), nullptr), i});
      i = j;
      continue;
    }
    Token::Kind k;
    switch (c) {
      case '+': k = Token::Plus; break;
      case '-': k = Token::Minus; break;
      case '[': k = Token::LBrack; break;
      case ']': k = Token::RBrack; break;
      case '(': k = Token::LParen; break;
      case ')': k = Token::RParen; break;
      case ',': k = Token::Comma; break;
      default:
        throw ExprError(std::string("unexpected character '") + c + "' at offset " +
                            std::to_string(i),
                        i);
    }
    out.push_back({k, std::string(1, c), 0.0, i});
    ++i;
  }
  out.push_back({Token::End, "", 0.0, s.size()});
  return out;
}

// --------------------- static index analysis ------------------------------

std::set<std::string> free_indices(const Node& n);

// Occurrence counts contributed by a node to its enclosing term: tensor slots
// count directly, a group contributes each of its free indices once.
void add_occurrences(const Node& n, std::map<std::string, int>& occ) {
  if (const auto* tr = std::get_if<TensorRef>(&n.v)) {
    for (const auto& ix : tr->indices) ++occ[ix];
  } else if (const auto* g = std::get_if<Group>(&n.v)) {
    for (const auto& ix : free_indices(*g->inner)) ++occ[ix];
  } else if (const auto* p = std::get_if<Product>(&n.v)) {
    for (const auto& f : p->factors) add_occurrences(*f, occ);
  }
  // Number / ScalarName / Sum: a Sum appears only inside a Group.
}

void check_term_occurrences(const Node& term) {
  std::map<std::string, int> occ;
  add_occurrences(term, occ);
  for (const auto& [sym, cnt] : occ)
    if (cnt >= 3)
      throw ExprError("index '" + sym + "' occurs " + std::to_string(cnt) +
                          " times in a term (at most twice is allowed)",
                      term.pos);
}

std::set<std::string> free_indices(const Node& n) {
  if (const auto* s = std::get_if<Sum>(&n.v)) {
    std::set<std::string> first = free_indices(*s->terms.front().second);
    for (std::size_t t = 1; t < s->terms.size(); ++t) {
      if (free_indices(*s->terms[t].second) != first)
        throw ExprError("terms of a sum have different free-index sets", n.pos);
    }
    return first;
  }
  if (const auto* g = std::get_if<Group>(&n.v)) return free_indices(*g->inner);
  std::map<std::string, int> occ;
  add_occurrences(n, occ);
  std::set<std::string> fr;
  for (const auto& [sym, cnt] : occ)
    if (cnt == 1) fr.insert(sym);
  return fr;
}

// ------------------------------ parsing -----------------------------------

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  NodePtr parse_full() {
    NodePtr e = parse_sum();
    expect(Token::End, "end of input");
    return e;
  }

 private:
  std::vector<Token> toks_;
  std::size_t at_ = 0;

  const Token& cur() const { return toks_[at_]; }
  bool is(Token::Kind k) const { return cur().kind == k; }
  void advance() { ++at_; }
  void expect(Token::Kind k, const char* what) {
    if (!is(k))
      throw ExprError(std::string("expected ") + what + " near offset " +
                          std::to_string(cur().pos),
                      cur().pos);
    if (k != Token::End) advance();
  }

  bool starts_factor() const {
    return is(Token::Name) || is(Token::Num) || is(Token::LParen);
  }

  NodePtr parse_sum() {
    auto node = std::make_shared<Node>();
    node->pos = cur().pos;
    Sum sum;
    int sign = 1;
    if (is(Token::Plus)) {
      advance();
    } else if (is(Token::Minus)) {
      sign = -1;
      advance();
    }
    sum.terms.emplace_back(sign, parse_term());
    while (is(Token::Plus) || is(Token::Minus)) {
      int sg = is(Token::Plus) ? 1 : -1;
      advance();
      sum.terms.emplace_back(sg, parse_term());
    }
    node->v = std::move(sum);
    free_indices(*node);  // validates identical free sets across terms
    return node;
  }

  NodePtr parse_term() {
    auto node = std::make_shared<Node>();
    node->pos = cur().pos;
    Product p;
    if (!starts_factor())
      throw ExprError("expected a factor near offset " + std::to_string(cur().pos),
                      cur().pos);
    while (starts_factor()) p.factors.push_back(parse_factor());
    node->v = std::move(p);
    check_term_occurrences(*node);
    return node;
  }

  NodePtr parse_factor() {
    auto node = std::make_shared<Node>();
    node->pos = cur().pos;
    if (is(Token::Name)) {
      std::string name = cur().text;
      advance();
      if (is(Token::LBrack)) {
        advance();
        TensorRef tr;
        tr.name = std::move(name);
        for (;;) {
          if (!is(Token::Name))
            throw ExprError("expected an index name near offset " +
                                std::to_string(cur().pos),
                            cur().pos);
          tr.indices.push_back(cur().text);
          advance();
          if (is(Token::Comma)) {
            advance();
            continue;
          }
          break;
        }
        expect(Token::RBrack, "']'");
        node->v = std::move(tr);
      } else {
        node->v = ScalarName{std::move(name)};
      }
      return node;
    }
    if (is(Token::Num)) {
      node->v = Number{cur().num};
      advance();
      return node;
    }
    if (is(Token::LParen)) {
      advance();
      Group g;
      g.inner = parse_sum();
      expect(Token::RParen, "')'");
      node->v = std::move(g);
      return node;
    }
    throw ExprError("expected a factor near offset " + std::to_string(cur().pos),
                    cur().pos);
  }
};

// ------------------------------ printing ----------------------------------

std::string fmt_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void print_node(const Node& n, std::string& out) {
  if (const auto* s = std::get_if<Sum>(&n.v)) {
    for (std::size_t t = 0; t < s->terms.size(); ++t) {
      if (t == 0) {
        if (s->terms[t].first < 0) out += "-";
      } else {
        out += s->terms[t].first < 0 ? " - " : " + ";
      }
      print_node(*s->terms[t].second, out);
    }
  } else if (const auto* p = std::get_if<Product>(&n.v)) {
    for (std::size_t f = 0; f < p->factors.size(); ++f) {
      if (f) out += " ";
      print_node(*p->factors[f], out);
    }
  } else if (const auto* tr = std::get_if<TensorRef>(&n.v)) {
    out += tr->name;
    out += "[";
    for (std::size_t s2 = 0; s2 < tr->indices.size(); ++s2) {
      if (s2) out += ",";
      out += tr->indices[s2];
    }
    out += "]";
  } else if (const auto* num = std::get_if<Number>(&n.v)) {
    out += fmt_number(num->value);
  } else if (const auto* sn = std::get_if<ScalarName>(&n.v)) {
    out += sn->name;
  } else if (const auto* g = std::get_if<Group>(&n.v)) {
    out += "(";
    print_node(*g->inner, out);
    out += ")";
  }
}

// ------------------------------ evaluation --------------------------------

struct RealAtom {
  std::vector<std::string> idx;
  std::vector<int> dims;
  std::vector<double> data;
  bool is_delta = false;  // pending materialization until ranges are known
};

struct MatAtom {
  enum Kind { E, F, Psi, GroupMat } kind;
  std::string idx;                          // E / F
  std::vector<std::string> gidx;            // GroupMat
  std::vector<int> gdims;
  const std::vector<CMat>* gmats = nullptr;
  Eigen::Index rows = 0, cols = 0;
};

using Assign = std::map<std::string, int>;

double fetch(const RealAtom& a, const Assign& assign) {
  std::size_t flat = 0;
  for (std::size_t s = 0; s < a.idx.size(); ++s)
    flat = flat * a.dims[s] + static_cast<std::size_t>(assign.at(a.idx[s]));
  return a.data[flat];
}

// Iterates `body` over all assignments of `syms` within `dims`.
template <typename Body>
void for_assignments(const std::vector<std::string>& syms, const std::vector<int>& dims,
                     Assign& assign, Body&& body) {
  std::vector<int> v(syms.size(), 0);
  for (std::size_t s = 0; s < syms.size(); ++s) assign[syms[s]] = 0;
  for (;;) {
    body();
    std::size_t k = syms.size();
    while (k > 0) {
      --k;
      if (++v[k] < dims[k]) {
        assign[syms[k]] = v[k];
        break;
      }
      v[k] = 0;
      assign[syms[k]] = 0;
      if (k == 0) return;
    }
    if (syms.empty()) return;
  }
}

// Contracts two real atoms over the given shared summed indices.
RealAtom contract_pair(const RealAtom& a, const RealAtom& b,
                       const std::set<std::string>& shared,
                       const std::map<std::string, int>& dim_of) {
  RealAtom out;
  for (std::size_t s = 0; s < a.idx.size(); ++s)
    if (!shared.count(a.idx[s])) {
      out.idx.push_back(a.idx[s]);
      out.dims.push_back(a.dims[s]);
    }
  for (std::size_t s = 0; s < b.idx.size(); ++s)
    if (!shared.count(b.idx[s])) {
      out.idx.push_back(b.idx[s]);
      out.dims.push_back(b.dims[s]);
    }
  std::size_t osize = 1;
  for (int d : out.dims) osize *= static_cast<std::size_t>(d);
  out.data.assign(osize, 0.0);

  std::vector<std::string> ssyms(shared.begin(), shared.end());
  std::vector<int> sdims;
  for (const auto& s : ssyms) sdims.push_back(dim_of.at(s));

  Assign assign;
  std::size_t oflat = 0;
  for_assignments(out.idx, out.dims, assign, [&] {
    double acc = 0.0;
    Assign inner = assign;
    for_assignments(ssyms, sdims, inner, [&] { acc += fetch(a, inner) * fetch(b, inner); });
    out.data[oflat++] = acc;
  });
  return out;
}

// Traces a real atom over an index that occurs twice within it.
RealAtom self_trace(const RealAtom& a, const std::string& sym, int dim) {
  RealAtom out;
  for (std::size_t s = 0; s < a.idx.size(); ++s)
    if (a.idx[s] != sym) {
      out.idx.push_back(a.idx[s]);
      out.dims.push_back(a.dims[s]);
    }
  std::size_t osize = 1;
  for (int d : out.dims) osize *= static_cast<std::size_t>(d);
  out.data.assign(osize, 0.0);
  Assign assign;
  std::size_t oflat = 0;
  for_assignments(out.idx, out.dims, assign, [&] {
    double acc = 0.0;
    for (int v = 0; v < dim; ++v) {
      assign[sym] = v;
      acc += fetch(a, assign);
    }
    assign.erase(sym);
    out.data[oflat++] = acc;
  });
  return out;
}

struct TermPieces {
  double coeff = 1.0;
  std::vector<RealAtom> reals;
  std::vector<MatAtom> mats;
  std::vector<std::pair<std::string, int>> slots;  // (symbol, dim or -1) textual order
};

Value evaluate_node(const Node& n, const Environment& env, PlanOrder order,
                    std::deque<Value>& storage);

void collect_factor(const Node& f, const Environment& env, PlanOrder order,
                    std::deque<Value>& storage, TermPieces& tp, int& psi_count) {
  if (const auto* tr = std::get_if<TensorRef>(&f.v)) {
    if (tr->name == "e" || tr->name == "f") {
      if (tr->indices.size() != 1)
        throw ExprError("'" + tr->name + "' takes exactly one index", f.pos);
      if (!env.rep) throw ExprError("no Clifford representation bound", f.pos);
      if (tr->name == "f") {
        if (env.aux_rank == 0)
          throw ExprError("'f' unavailable: auxiliary rank is 0", f.pos);
        if (!env.rep->has_single_aux())
          throw ExprError("'f' unavailable: single auxiliary generators do not act "
                          "on tensor-power modules (m > 1)",
                          f.pos);
      }
      MatAtom m;
      m.kind = tr->name == "e" ? MatAtom::E : MatAtom::F;
      m.idx = tr->indices[0];
      m.rows = m.cols = env.rep->dim;
      tp.slots.emplace_back(m.idx, tr->name == "e" ? env.base_dim : env.aux_rank);
      tp.mats.push_back(std::move(m));
      return;
    }
    if (tr->name == "psi") throw ExprError("'psi' takes no indices", f.pos);
    if (tr->name == "delta") {
      if (tr->indices.size() != 2) throw ExprError("'delta' takes two indices", f.pos);
      RealAtom a;
      a.idx = tr->indices;
      a.dims = {-1, -1};
      a.is_delta = true;
      for (const auto& ix : tr->indices) tp.slots.emplace_back(ix, -1);
      tp.reals.push_back(std::move(a));
      return;
    }
    auto it = env.tensors.find(tr->name);
    if (it == env.tensors.end())
      throw ExprError("unbound tensor '" + tr->name + "'", f.pos);
    if (it->second.dims.size() != tr->indices.size())
      throw ExprError("arity mismatch for '" + tr->name + "': bound arity " +
                          std::to_string(it->second.dims.size()) + ", used with " +
                          std::to_string(tr->indices.size()) + " indices",
                      f.pos);
    RealAtom a;
    a.idx = tr->indices;
    a.dims = it->second.dims;
    a.data = it->second.data;
    for (std::size_t s = 0; s < a.idx.size(); ++s) tp.slots.emplace_back(a.idx[s], a.dims[s]);
    tp.reals.push_back(std::move(a));
    return;
  }
  if (const auto* num = std::get_if<Number>(&f.v)) {
    tp.coeff *= num->value;
    return;
  }
  if (const auto* sn = std::get_if<ScalarName>(&f.v)) {
    if (sn->name == "psi") {
      if (!env.psi) throw ExprError("'psi' is not bound", f.pos);
      MatAtom m;
      m.kind = MatAtom::Psi;
      m.rows = env.psi->size();
      m.cols = 1;
      tp.mats.push_back(std::move(m));
      ++psi_count;
      return;
    }
    auto it = env.scalars.find(sn->name);
    if (it != env.scalars.end()) {
      tp.coeff *= it->second;
      return;
    }
    if (env.tensors.count(sn->name))
      throw ExprError("tensor '" + sn->name + "' used without indices", f.pos);
    throw ExprError("unbound name '" + sn->name + "'", f.pos);
  }
  if (const auto* g = std::get_if<Group>(&f.v)) {
    storage.push_back(evaluate_node(*g->inner, env, order, storage));
    Value& v = storage.back();
    if (v.matrix) {
      MatAtom m;
      m.kind = MatAtom::GroupMat;
      m.gidx = v.indices;
      m.gdims = v.dims;
      m.gmats = &v.mats;
      m.rows = v.mats.front().rows();
      m.cols = v.mats.front().cols();
      for (std::size_t s = 0; s < v.indices.size(); ++s)
        tp.slots.emplace_back(v.indices[s], v.dims[s]);
      tp.mats.push_back(std::move(m));
    } else if (v.indices.empty()) {
      tp.coeff *= v.re[0];
    } else {
      RealAtom a;
      a.idx = v.indices;
      a.dims = v.dims;
      a.data = v.re;
      for (std::size_t s = 0; s < a.idx.size(); ++s)
        tp.slots.emplace_back(a.idx[s], a.dims[s]);
      tp.reals.push_back(std::move(a));
    }
    return;
  }
  throw ExprError("unexpected node inside a term", f.pos);
}

Value evaluate_term(const Product& term, std::size_t pos, const Environment& env,
                    PlanOrder order, std::deque<Value>& storage) {
  TermPieces tp;
  int psi_count = 0;
  for (const auto& f : term.factors) collect_factor(*f, env, order, storage, tp, psi_count);
  if (psi_count > 1) throw ExprError("psi applied twice in a term", pos);

  // Index ranges: unify the dimensions of every slot a symbol occupies;
  // symbols seen only in delta slots default to the base dimension.
  std::vector<std::string> seen_order;
  std::map<std::string, int> occ;
  std::map<std::string, int> dim_of;
  for (const auto& [sym, d] : tp.slots) {
    if (!occ.count(sym)) seen_order.push_back(sym);
    ++occ[sym];
    if (d > 0) {
      auto it = dim_of.find(sym);
      if (it != dim_of.end() && it->second != d)
        throw ExprError("index '" + sym + "' range mismatch: " +
                            std::to_string(it->second) + " vs " + std::to_string(d),
                        pos);
      dim_of[sym] = d;
    }
  }
  for (const auto& sym : seen_order)
    if (!dim_of.count(sym)) {
      if (env.base_dim <= 0)
        throw ExprError("cannot infer the range of index '" + sym + "'", pos);
      dim_of[sym] = env.base_dim;
    }

  // Materialize deltas now that ranges are known.
  for (auto& a : tp.reals) {
    if (!a.is_delta) continue;
    int d0 = dim_of.at(a.idx[0]);
    int d1 = dim_of.at(a.idx[1]);
    if (d0 != d1)
      throw ExprError("'delta' index ranges differ: " + std::to_string(d0) + " vs " +
                          std::to_string(d1),
                      pos);
    a.dims = {d0, d1};
    a.data.assign(static_cast<std::size_t>(d0) * d1, 0.0);
    for (int v = 0; v < d0; ++v) a.data[static_cast<std::size_t>(v) * d1 + v] = 1.0;
    a.is_delta = false;
  }

  // Trace out indices repeated within a single atom.
  for (auto& a : tp.reals) {
    for (;;) {
      std::string dup;
      for (std::size_t s = 0; s < a.idx.size() && dup.empty(); ++s)
        for (std::size_t t2 = s + 1; t2 < a.idx.size(); ++t2)
          if (a.idx[s] == a.idx[t2]) {
            dup = a.idx[s];
            break;
          }
      if (dup.empty()) break;
      a = self_trace(a, dup, dim_of.at(dup));
    }
  }

  // Contract the summed indices whose both occurrences are plain tensors.
  auto real_only = [&] {
    std::map<std::string, int> in_reals;
    for (const auto& a : tp.reals)
      for (const auto& s : a.idx) ++in_reals[s];
    std::set<std::string> res;
    for (const auto& [sym, cnt] : in_reals)
      if (cnt == 2 && occ.at(sym) == 2) res.insert(sym);
    return res;
  };
  std::set<std::string> cset = real_only();
  while (!cset.empty()) {
    std::size_t pick_a = 0, pick_b = 0;
    bool found = false;
    std::size_t best_size = 0;
    for (std::size_t i = 0; i < tp.reals.size() && !(found && order == PlanOrder::Sequential);
         ++i) {
      for (std::size_t j = i + 1; j < tp.reals.size(); ++j) {
        std::set<std::string> shared;
        for (const auto& s : tp.reals[i].idx)
          if (cset.count(s) &&
              std::find(tp.reals[j].idx.begin(), tp.reals[j].idx.end(), s) !=
                  tp.reals[j].idx.end())
            shared.insert(s);
        if (shared.empty()) continue;
        std::size_t size = 1;
        for (std::size_t s = 0; s < tp.reals[i].idx.size(); ++s)
          if (!shared.count(tp.reals[i].idx[s])) size *= tp.reals[i].dims[s];
        for (std::size_t s = 0; s < tp.reals[j].idx.size(); ++s)
          if (!shared.count(tp.reals[j].idx[s])) size *= tp.reals[j].dims[s];
        if (!found || (order == PlanOrder::Greedy && size < best_size)) {
          found = true;
          best_size = size;
          pick_a = i;
          pick_b = j;
        }
        if (order == PlanOrder::Sequential) break;
      }
      if (found && order == PlanOrder::Sequential) break;
    }
    if (!found) break;  // remaining summed pairs all touch matrix atoms
    std::set<std::string> shared;
    for (const auto& s : tp.reals[pick_a].idx)
      if (cset.count(s) &&
          std::find(tp.reals[pick_b].idx.begin(), tp.reals[pick_b].idx.end(), s) !=
              tp.reals[pick_b].idx.end())
        shared.insert(s);
    RealAtom merged = contract_pair(tp.reals[pick_a], tp.reals[pick_b], shared, dim_of);
    tp.reals.erase(tp.reals.begin() + static_cast<std::ptrdiff_t>(pick_b));
    tp.reals[pick_a] = std::move(merged);
    for (const auto& s : shared) cset.erase(s);
    // Newly created self-duplicates cannot appear (occurrence <= 2 globally).
  }

  // Free indices in first-appearance order; remaining summed ones are
  // enumerated together with the matrix chain.
  std::vector<std::string> fsyms;
  std::vector<int> fdims;
  std::vector<std::string> esyms;
  std::vector<int> edims;
  std::set<std::string> contracted_away;
  {
    std::set<std::string> live;  // symbols still present on atoms
    for (const auto& a : tp.reals)
      for (const auto& s : a.idx) live.insert(s);
    for (const auto& m : tp.mats) {
      if (!m.idx.empty()) live.insert(m.idx);
      for (const auto& s : m.gidx) live.insert(s);
    }
    for (const auto& sym : seen_order) {
      if (occ.at(sym) == 1) {
        fsyms.push_back(sym);
        fdims.push_back(dim_of.at(sym));
      } else if (live.count(sym)) {
        esyms.push_back(sym);
        edims.push_back(dim_of.at(sym));
      }
    }
  }

  Value out;
  out.indices = fsyms;
  out.dims = fdims;
  std::size_t osize = 1;
  for (int d : fdims) osize *= static_cast<std::size_t>(d);

  if (tp.mats.empty()) {
    out.matrix = false;
    out.re.assign(osize, 0.0);
    Assign assign;
    std::size_t oflat = 0;
    for_assignments(fsyms, fdims, assign, [&] {
      double v = tp.coeff;
      Assign inner = assign;
      double acc = 0.0;
      for_assignments(esyms, edims, inner, [&] {
        double w = 1.0;
        for (const auto& a : tp.reals) w *= fetch(a, inner);
        acc += w;
      });
      out.re[oflat++] = v * acc;
    });
    return out;
  }

  // Matrix-valued result: validate the chain shape once.
  for (std::size_t k = 1; k < tp.mats.size(); ++k)
    if (tp.mats[k - 1].cols != tp.mats[k].rows)
      throw ExprError("matrix dimension mismatch in a product (psi must be the "
                      "rightmost matrix factor)",
                      pos);
  Eigen::Index rows = tp.mats.front().rows, cols = tp.mats.back().cols;
  out.matrix = true;
  out.mats.assign(osize, CMat::Zero(rows, cols));

  CMat psimat;
  if (env.psi) psimat = *env.psi;

  auto mat_at = [&](const MatAtom& m, const Assign& assign) -> CMat {
    switch (m.kind) {
      case MatAtom::E:
        return env.rep->e(assign.at(m.idx));
      case MatAtom::F:
        return env.rep->f(assign.at(m.idx));
      case MatAtom::Psi:
        return psimat;
      case MatAtom::GroupMat: {
        std::size_t flat = 0;
        for (std::size_t s = 0; s < m.gidx.size(); ++s)
          flat = flat * m.gdims[s] + static_cast<std::size_t>(assign.at(m.gidx[s]));
        return (*m.gmats)[flat];
      }
    }
    throw ExprError("corrupt matrix atom", pos);
  };

  Assign assign;
  std::size_t oflat = 0;
  for_assignments(fsyms, fdims, assign, [&] {
    CMat acc = CMat::Zero(rows, cols);
    Assign inner = assign;
    for_assignments(esyms, edims, inner, [&] {
      double w = tp.coeff;
      for (const auto& a : tp.reals) w *= fetch(a, inner);
      if (w == 0.0) return;
      CMat p = mat_at(tp.mats[0], inner);
      for (std::size_t k = 1; k < tp.mats.size(); ++k) p = p * mat_at(tp.mats[k], inner);
      acc += w * p;
    });
    out.mats[oflat++] = std::move(acc);
  });
  return out;
}

// Reorders v's entries to the given free-index order.
Value align_to(const Value& v, const std::vector<std::string>& target,
               const std::vector<int>& target_dims, std::size_t pos) {
  if (v.indices == target) return v;
  std::vector<std::size_t> perm(target.size());
  for (std::size_t t = 0; t < target.size(); ++t) {
    auto it = std::find(v.indices.begin(), v.indices.end(), target[t]);
    if (it == v.indices.end())
      throw ExprError("free index '" + target[t] + "' missing from a term", pos);
    perm[t] = static_cast<std::size_t>(it - v.indices.begin());
    if (v.dims[perm[t]] != target_dims[t])
      throw ExprError("free index '" + target[t] + "' ranges differ across a sum", pos);
  }
  Value out;
  out.indices = target;
  out.dims = target_dims;
  out.matrix = v.matrix;
  std::size_t osize = 1;
  for (int d : target_dims) osize *= static_cast<std::size_t>(d);
  if (v.matrix)
    out.mats.resize(osize);
  else
    out.re.resize(osize);
  Assign assign;
  std::size_t oflat = 0;
  for_assignments(target, target_dims, assign, [&] {
    std::size_t vflat = 0;
    for (std::size_t s = 0; s < v.indices.size(); ++s)
      vflat = vflat * v.dims[s] + static_cast<std::size_t>(assign.at(v.indices[s]));
    if (v.matrix)
      out.mats[oflat] = v.mats[vflat];
    else
      out.re[oflat] = v.re[vflat];
    ++oflat;
  });
  return out;
}

// Embeds a real value as multiples of the identity (Clifford scalars).
Value promote_to_matrix(const Value& v, Eigen::Index rows, Eigen::Index cols,
                        std::size_t pos) {
  if (rows != cols)
    throw ExprError("cannot mix a scalar-valued term with a non-square matrix term", pos);
  Value out;
  out.indices = v.indices;
  out.dims = v.dims;
  out.matrix = true;
  out.mats.reserve(v.re.size());
  for (double x : v.re) out.mats.push_back(x * CMat::Identity(rows, cols));
  return out;
}

Value evaluate_node(const Node& n, const Environment& env, PlanOrder order,
                    std::deque<Value>& storage) {
  if (const auto* s = std::get_if<Sum>(&n.v)) {
    Value acc = evaluate_node(*s->terms[0].second, env, order, storage);
    if (s->terms[0].first < 0) {
      if (acc.matrix)
        for (auto& m : acc.mats) m = -m;
      else
        for (auto& x : acc.re) x = -x;
    }
    for (std::size_t t = 1; t < s->terms.size(); ++t) {
      Value v = evaluate_node(*s->terms[t].second, env, order, storage);
      v = align_to(v, acc.indices, acc.dims, n.pos);
      if (acc.matrix != v.matrix) {
        if (acc.matrix)
          v = promote_to_matrix(v, acc.mats.front().rows(), acc.mats.front().cols(), n.pos);
        else {
          acc = promote_to_matrix(acc, v.mats.front().rows(), v.mats.front().cols(), n.pos);
        }
      }
      double sg = s->terms[t].first;
      if (acc.matrix)
        for (std::size_t i2 = 0; i2 < acc.mats.size(); ++i2) acc.mats[i2] += sg * v.mats[i2];
      else
        for (std::size_t i2 = 0; i2 < acc.re.size(); ++i2) acc.re[i2] += sg * v.re[i2];
    }
    return acc;
  }
  if (const auto* p = std::get_if<Product>(&n.v))
    return evaluate_term(*p, n.pos, env, order, storage);
  if (const auto* g = std::get_if<Group>(&n.v))
    return evaluate_node(*g->inner, env, order, storage);
  // Bare leaf: treat as a one-factor term.
  Product p;
  p.factors.push_back(std::make_shared<Node>(n));
  return evaluate_term(p, n.pos, env, order, storage);
}

}  // namespace

// ------------------------------ public API --------------------------------

std::size_t Value::flat_size() const {
  std::size_t s = 1;
  for (int d : dims) s *= static_cast<std::size_t>(d);
  return s;
}

double Value::max_abs() const {
  double m = 0.0;
  if (matrix) {
    for (const auto& mm : mats) m = std::max(m, mm.cwiseAbs().maxCoeff());
  } else {
    for (double x : re) m = std::max(m, std::abs(x));
  }
  return m;
}

NodePtr parse(const std::string& text) {
  Parser p(lex(text));
  return p.parse_full();
}

std::string print(const NodePtr& ast) {
  std::string out;
  print_node(*ast, out);
  return out;
}

bool equal(const NodePtr& a, const NodePtr& b) {
  if (a->v.index() != b->v.index()) return false;
  if (const auto* s = std::get_if<Sum>(&a->v)) {
    const auto& t = std::get<Sum>(b->v);
    if (s->terms.size() != t.terms.size()) return false;
    for (std::size_t i = 0; i < s->terms.size(); ++i)
      if (s->terms[i].first != t.terms[i].first ||
          !equal(s->terms[i].second, t.terms[i].second))
        return false;
    return true;
  }
  if (const auto* p = std::get_if<Product>(&a->v)) {
    const auto& q = std::get<Product>(b->v);
    if (p->factors.size() != q.factors.size()) return false;
    for (std::size_t i = 0; i < p->factors.size(); ++i)
      if (!equal(p->factors[i], q.factors[i])) return false;
    return true;
  }
  if (const auto* tr = std::get_if<TensorRef>(&a->v)) {
    const auto& ur = std::get<TensorRef>(b->v);
    return tr->name == ur.name && tr->indices == ur.indices;
  }
  if (const auto* num = std::get_if<Number>(&a->v))
    return num->value == std::get<Number>(b->v).value;
  if (const auto* sn = std::get_if<ScalarName>(&a->v))
    return sn->name == std::get<ScalarName>(b->v).name;
  if (const auto* g = std::get_if<Group>(&a->v))
    return equal(g->inner, std::get<Group>(b->v).inner);
  return false;
}

bool is_reserved_name(const std::string& name) {
  static const std::set<std::string> kReserved = {"e",   "f",   "psi",   "delta", "R", "Ric",
                                                  "scal", "h",  "eta",   "Theta", "T"};
  return kReserved.count(name) > 0;
}

Environment make_environment(std::shared_ptr<const CliffordRep> rep,
                             const CurvatureTensor& R) {
  Environment env;
  env.rep = std::move(rep);
  env.base_dim = R.n;
  env.aux_rank = env.rep ? env.rep->r : 0;
  if (env.rep && env.rep->n != R.n)
    throw std::invalid_argument("make_environment: representation/curvature dimension mismatch");
  const int n = R.n;
  Binding rb;
  rb.dims = {n, n, n, n};
  rb.data = R.a;
  env.tensors["R"] = std::move(rb);
  RMat ric = ricci(R);
  Binding ricb;
  ricb.dims = {n, n};
  ricb.data.resize(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) ricb.data[static_cast<std::size_t>(i) * n + j] = ric(i, j);
  env.tensors["Ric"] = std::move(ricb);
  env.scalars["scal"] = scal(R);
  return env;
}

Environment make_environment(const GeometricDatum& datum) {
  Environment env = make_environment(datum.rep, datum.R);
  env.psi = datum.psi;
  const int n = datum.rep->n, r = datum.rep->r;
  if (r >= 2) {
    TwoFormFamily ef = eta_forms(*datum.rep, datum.psi);
    Binding eb, tb;
    eb.dims = tb.dims = {n, n, r, r};
    std::size_t sz = static_cast<std::size_t>(n) * n * r * r;
    eb.data.assign(sz, 0.0);
    tb.data.assign(sz, 0.0);
    for (int q = 0; q < n; ++q)
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < r; ++k)
          for (int l = 0; l < r; ++l) {
            std::size_t flat = ((static_cast<std::size_t>(q) * n + i) * r + k) * r + l;
            eb.data[flat] = ef.form(k, l)(q, i);
            tb.data[flat] = datum.theta.form(k, l)(q, i);
          }
    env.tensors["eta"] = std::move(eb);
    env.tensors["Theta"] = std::move(tb);
  }
  return env;
}

void bind_tensor(Environment& env, const std::string& name, std::vector<int> dims,
                 std::vector<double> data) {
  if (is_reserved_name(name))
    throw std::invalid_argument("bind_tensor: '" + name + "' is a reserved name");
  std::size_t sz = 1;
  for (int d : dims) {
    if (d <= 0) throw std::invalid_argument("bind_tensor: nonpositive dimension");
    sz *= static_cast<std::size_t>(d);
  }
  if (sz != data.size()) throw std::invalid_argument("bind_tensor: data size mismatch");
  env.tensors[name] = Binding{std::move(dims), std::move(data)};
}

void bind_h(Environment& env, const RMat& h) {
  const int n = static_cast<int>(h.rows());
  Binding b;
  b.dims = {n, n};
  b.data.resize(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) b.data[static_cast<std::size_t>(i) * n + j] = h(i, j);
  env.tensors["h"] = std::move(b);
}

void bind_T(Environment& env, const SecondDerivSymbol& T) {
  Binding b;
  b.dims = {T.n, T.n, T.n, T.n};
  b.data = T.t;
  env.tensors["T"] = std::move(b);
}

Value evaluate(const NodePtr& ast, const Environment& env, PlanOrder order) {
  std::deque<Value> storage;
  return evaluate_node(*ast, env, order, storage);
}

VerificationReport check_identity(const NodePtr& lhs, const NodePtr& rhs,
                                  const Environment& env, double tol) {
  Value lv = evaluate(lhs, env);
  Value rv = evaluate(rhs, env);

  VerificationReport out;
  out.check = "expression_identity";
  out.inputs["lhs"] = print(lhs);
  out.inputs["rhs"] = print(rhs);
  out.tol = tol;

  std::set<std::string> lf(lv.indices.begin(), lv.indices.end());
  std::set<std::string> rf(rv.indices.begin(), rv.indices.end());
  double lmax = lv.max_abs(), rmax = rv.max_abs();
  if (lf != rf) {
    // Comparison across different free-index sets is meaningful only against
    // an identically-zero side (e.g. rhs "0 delta[i,l]").
    if (lmax != 0.0 && rmax != 0.0) {
      std::string ls, rs;
      for (const auto& s : lf) ls += (ls.empty() ? "" : ",") + s;
      for (const auto& s : rf) rs += (rs.empty() ? "" : ",") + s;
      throw std::invalid_argument("free-index mismatch: lhs {" + ls + "} vs rhs {" + rs +
                                  "}");
    }
    double residual = std::max(lmax, rmax) / (1.0 + std::max(lmax, rmax));
    out.residuals["max_difference"] = residual;
    out.pass = residual < tol;
    return out;
  }

  double maxdiff = 0.0;
  // Promote if one side is matrix-valued and the other is not.
  if (lv.matrix != rv.matrix) {
    if (lv.matrix)
      rv = promote_to_matrix(rv, lv.mats.front().rows(), lv.mats.front().cols(), 0);
    else
      lv = promote_to_matrix(lv, rv.mats.front().rows(), rv.mats.front().cols(), 0);
  }
  if (rv.indices != lv.indices) rv = align_to(rv, lv.indices, lv.dims, 0);
  if (lv.dims != rv.dims) throw std::invalid_argument("free-index ranges differ");
  if (lv.matrix) {
    if (lv.mats.front().rows() != rv.mats.front().rows() ||
        lv.mats.front().cols() != rv.mats.front().cols())
      throw std::invalid_argument("matrix shapes differ between sides");
    for (std::size_t i = 0; i < lv.mats.size(); ++i)
      maxdiff = std::max(maxdiff, (lv.mats[i] - rv.mats[i]).cwiseAbs().maxCoeff());
  } else {
    for (std::size_t i = 0; i < lv.re.size(); ++i)
      maxdiff = std::max(maxdiff, std::abs(lv.re[i] - rv.re[i]));
  }
  double residual = maxdiff / (1.0 + std::max(lmax, rmax));
  out.residuals["max_difference"] = residual;
  out.pass = residual < tol;
  return out;
}

VerificationReport check_identity(const std::string& lhs, const std::string& rhs,
                                  const Environment& env, double tol) {
  return check_identity(parse(lhs), parse(rhs), env, tol);
}

}  // namespace spinr::expr
