#pragma once

#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "wfshacl/automata/pbf.hpp"
#include "wfshacl/document.hpp"
#include "wfshacl/error.hpp"

namespace wfshacl {

/// Letter of the tree alphabet: bottom, root, or a set of concept names,
/// nominals, roles (the role leading from the parent to this node) and
/// markers (rho, a) saying that this node has a rho-edge to nominal a.
struct Symbol {
  enum class Kind { Bottom, Root, Letter };
  Kind kind = Kind::Letter;
  std::set<ConceptName> concepts;
  std::set<NodeId> nominals;
  std::set<Role> roles;
  std::set<std::pair<Role, NodeId>> markers;

  static Symbol bottom() { return Symbol{Kind::Bottom, {}, {}, {}, {}}; }
  static Symbol root() { return Symbol{Kind::Root, {}, {}, {}, {}}; }

  bool is_bottom() const { return kind == Kind::Bottom; }
  bool is_root() const { return kind == Kind::Root; }
  bool has_role(const Role& r) const { return roles.count(r) > 0; }

  std::string to_string() const {
    if (kind == Kind::Bottom) return "bot";
    if (kind == Kind::Root) return "root";
    std::vector<std::string> items;
    for (const auto& c : concepts) items.push_back(c.str());
    for (const auto& a : nominals) items.push_back("<" + a.str() + ">");
    for (const auto& r : roles) items.push_back(r.str());
    for (const auto& [r, a] : markers) items.push_back("->" + r.str() + " <" + a.str() + ">");
    std::string out = "{";
    for (std::size_t i = 0; i < items.size(); ++i) out += (i ? ", " : "") + items[i];
    return out + "}";
  }

  friend bool operator==(const Symbol&, const Symbol&) = default;
};

/// Reads the text produced by Symbol::to_string. Bare identifiers are roles
/// when they name a role in `roles`, concept names otherwise.
inline Symbol parse_symbol(const std::string& text, const std::set<RoleName>& roles) {
  auto trim = [](std::string s) {
    auto b = s.find_first_not_of(" \t");
    auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  std::string t = trim(text);
  if (t == "bot") return Symbol::bottom();
  if (t == "root") return Symbol::root();
  if (t.size() < 2 || t.front() != '{' || t.back() != '}')
    throw Error(ErrorKind::InvalidArgument, "symbol must be bot, root or {...}: '" + text + "'");
  Symbol s;
  std::string body = t.substr(1, t.size() - 2);
  std::size_t start = 0;
  while (start <= body.size()) {
    std::size_t comma = body.find(',', start);
    std::string item = trim(body.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    start = comma == std::string::npos ? body.size() + 1 : comma + 1;
    if (item.empty()) continue;
    auto read_role = [&](std::string r) {
      bool inv = !r.empty() && r.back() == '-';
      if (inv) r.pop_back();
      return Role(RoleName(r), inv);
    };
    auto read_nominal = [&](const std::string& n) {
      if (n.size() < 3 || n.front() != '<' || n.back() != '>')
        throw Error(ErrorKind::InvalidArgument, "bad nominal in symbol: '" + n + "'");
      return NodeId(n.substr(1, n.size() - 2));
    };
    if (item.rfind("->", 0) == 0) {
      std::string rest = trim(item.substr(2));
      auto sp = rest.find(' ');
      if (sp == std::string::npos) throw Error(ErrorKind::InvalidArgument, "bad marker in symbol: '" + item + "'");
      s.markers.insert({read_role(rest.substr(0, sp)), read_nominal(trim(rest.substr(sp + 1)))});
    } else if (item.front() == '<') {
      s.nominals.insert(read_nominal(item));
    } else {
      Role r = read_role(item);
      if (roles.count(r.name))
        s.roles.insert(r);
      else
        s.concepts.insert(ConceptName(item));
    }
  }
  return s;
}

/// Everything an automaton and its guesses are built over: the normalized
/// constraints, the nominals a_1..a_l, and the formula universe sub(C) plus
/// the negated shape names.
struct GuessSpace {
  ConstraintSet constraints;
  std::optional<ShapeName> goal;
  std::vector<Target> targets;
  std::vector<NodeId> nominals;
  std::set<ShapeExpr> sub;
  std::vector<ShapeExpr> universe;
  std::set<ConceptName> concepts;
  std::vector<Role> roles;

  std::optional<std::size_t> nominal_index(const NodeId& a) const {
    auto it = std::find(nominals.begin(), nominals.end(), a);
    if (it == nominals.end()) return std::nullopt;
    return static_cast<std::size_t>(it - nominals.begin());
  }
};

namespace detail {

inline GuessSpace make_space(ConstraintSet normalized, std::set<NodeId> nominals, std::set<ConceptName> concepts,
                             std::set<RoleName> role_names) {
  GuessSpace sp;
  ExprSignature sig = normalized.signature();
  nominals.insert(sig.nominals.begin(), sig.nominals.end());
  concepts.insert(sig.concepts.begin(), sig.concepts.end());
  role_names.insert(sig.roles.begin(), sig.roles.end());
  for (const auto& [h, b] : normalized.defs()) {
    sp.sub.insert(ShapeExpr::shape(h));
    collect_sub(b, sp.sub);
  }
  std::set<ShapeExpr> u = sp.sub;
  for (const auto& e : sp.sub)
    if (e.kind() == ShapeExpr::Kind::Shape) u.insert(ShapeExpr::neg(e.shape_name()));
  for (const auto& a : nominals) u.insert(ShapeExpr::nominal(a));
  for (const auto& c : concepts) u.insert(ShapeExpr::concept_ref(c));
  sp.universe.assign(u.begin(), u.end());
  sp.nominals.assign(nominals.begin(), nominals.end());
  sp.concepts = std::move(concepts);
  for (const auto& r : role_names) {
    sp.roles.push_back(Role(r));
    sp.roles.push_back(Role(r, true));
  }
  sp.constraints = std::move(normalized);
  return sp;
}

}  // namespace detail

/// Universe for shape s against c: the closure of s, normalized.
inline GuessSpace guess_space(const ConstraintSet& c, const ShapeName& s) {
  GuessSpace sp = detail::make_space(normalize(restrict_to(c, s)), {}, {}, {});
  sp.goal = s;
  return sp;
}

/// Universe for a document: all constraints plus target symbols.
inline GuessSpace guess_space(const Document& d) {
  d.check();
  std::set<NodeId> nominals;
  std::set<ConceptName> concepts;
  std::set<RoleName> roles;
  for (const auto& t : d.targets) {
    switch (t.kind()) {
      case Target::Kind::Node: nominals.insert(t.node()); break;
      case Target::Kind::Class: concepts.insert(t.concept_name()); break;
      case Target::Kind::Role: roles.insert(t.role().name); break;
    }
  }
  GuessSpace sp = detail::make_space(normalize(d.constraints), nominals, concepts, roles);
  sp.targets = d.targets;
  return sp;
}

/// Guess (G, f, C). A nullopt entry of the list is bottom; the mapping is
/// zero-based.
struct Guess {
  std::vector<std::optional<std::set<ShapeExpr>>> list;
  std::set<std::tuple<NodeId, Role, NodeId>> connections;
  std::vector<std::size_t> mapping;

  friend bool operator==(const Guess&, const Guess&) = default;

  std::string to_string(const GuessSpace& sp) const {
    std::string out = "G = [";
    for (std::size_t i = 0; i < list.size(); ++i) {
      out += i ? "; " : "";
      out += "<" + sp.nominals[i].str() + ">: ";
      if (!list[i]) {
        out += "bot";
        continue;
      }
      out += "{";
      std::size_t j = 0;
      for (const auto& e : *list[i]) out += (j++ ? ", " : "") + e.to_string();
      out += "}";
    }
    out += "], f = [";
    for (std::size_t i = 0; i < mapping.size(); ++i) out += (i ? ", " : "") + std::to_string(mapping[i] + 1);
    out += "], C = {";
    std::size_t j = 0;
    for (const auto& [a, r, b] : connections)
      out += (j++ ? ", " : "") + std::string("(<") + a.str() + ">, " + r.str() + ", <" + b.str() + ">)";
    return out + "}";
  }
};

/// The guess invariants: gamma_i is bottom or a nonempty subset of the
/// universe, a_i lies in gamma_{f(i)} and in no other entry, entries without
/// nominals are bottom, and connections are closed under inversion.
inline bool guess_invariants_hold(const GuessSpace& sp, const Guess& g) {
  const std::size_t l = sp.nominals.size();
  if (g.list.size() != l || g.mapping.size() != l) return false;
  std::set<ShapeExpr> universe(sp.universe.begin(), sp.universe.end());
  for (std::size_t i = 0; i < l; ++i) {
    if (g.mapping[i] >= l) return false;
    if (!g.list[i]) continue;
    if (g.list[i]->empty()) return false;
    bool has_nominal = false;
    for (const auto& e : *g.list[i]) {
      if (!universe.count(e)) return false;
      has_nominal = has_nominal || e.kind() == ShapeExpr::Kind::Nominal;
    }
    if (!has_nominal) return false;
  }
  for (std::size_t i = 0; i < l; ++i) {
    ShapeExpr ai = ShapeExpr::nominal(sp.nominals[i]);
    for (std::size_t j = 0; j < l; ++j) {
      bool in = g.list[j] && g.list[j]->count(ai);
      if (in != (j == g.mapping[i])) return false;
    }
  }
  std::set<RoleName> names;
  for (const auto& r : sp.roles) names.insert(r.name);
  for (const auto& [a, r, b] : g.connections) {
    if (!sp.nominal_index(a) || !sp.nominal_index(b) || !names.count(r.name)) return false;
    if (!g.connections.count({b, r.inverse(), a})) return false;
  }
  return true;
}

/// All guesses in a fixed order: mapping f lexicographically, then the guess
/// list, then the connections. Throws BudgetExceeded when more than `budget`
/// guesses exist. `emit` returns false to stop early.
inline std::size_t enumerate_guesses(const GuessSpace& sp, const std::function<bool(const Guess&)>& emit,
                                     std::size_t budget = 1'000'000) {
  const std::size_t l = sp.nominals.size();
  std::vector<ShapeExpr> free;
  for (const auto& e : sp.universe)
    if (e.kind() != ShapeExpr::Kind::Nominal) free.push_back(e);
  std::vector<std::tuple<NodeId, Role, NodeId>> pairs;
  for (const auto& a : sp.nominals)
    for (const auto& b : sp.nominals)
      for (const auto& r : sp.roles)
        if (!r.inverted) pairs.emplace_back(a, r, b);

  // Saturating count, checked before anything is emitted.
  auto mul = [&](std::size_t x, std::size_t y) { return y != 0 && x > budget / y ? budget + 1 : x * y; };
  auto pow2 = [&](std::size_t e) {
    std::size_t v = 1;
    for (std::size_t i = 0; i < e && v <= budget; ++i) v = mul(v, 2);
    return v;
  };
  std::size_t total = 0;
  {
    std::vector<std::size_t> f(l, 0);
    std::size_t fcount = 1;
    for (std::size_t i = 0; i < l; ++i) fcount = mul(fcount, l);
    // Number of guess lists depends only on the image size of f.
    std::map<std::size_t, std::size_t> by_image;
    for (std::size_t m = 0; m < fcount && l > 0 && l <= 8; ++m) {
      std::size_t x = m;
      std::set<std::size_t> img;
      for (std::size_t i = 0; i < l; ++i, x /= l) img.insert(x % l);
      ++by_image[img.size()];
    }
    if (l > 8) throw Error(ErrorKind::BudgetExceeded, "too many nominals for guess enumeration");
    if (l == 0) by_image[0] = 1;
    for (const auto& [img, cnt] : by_image) {
      std::size_t lists = 1;
      for (std::size_t i = 0; i < img; ++i) lists = mul(lists, pow2(free.size()));
      total += mul(mul(cnt, lists), pow2(pairs.size()));
      if (total > budget) throw Error(ErrorKind::BudgetExceeded, "more than " + std::to_string(budget) + " guesses");
    }
  }

  std::size_t emitted = 0;
  std::vector<std::size_t> f(l, 0);
  for (bool more_f = true; more_f;) {
    std::vector<std::size_t> image;
    for (std::size_t i = 0; i < l; ++i)
      if (std::find(image.begin(), image.end(), f[i]) == image.end()) image.push_back(f[i]);
    std::sort(image.begin(), image.end());
    std::vector<std::size_t> masks(image.size(), 0);
    const std::size_t per = std::size_t{1} << free.size();
    for (bool more_g = true; more_g;) {
      Guess g;
      g.mapping = f;
      g.list.assign(l, std::nullopt);
      for (std::size_t t = 0; t < image.size(); ++t) {
        std::set<ShapeExpr> gamma;
        for (std::size_t i = 0; i < l; ++i)
          if (f[i] == image[t]) gamma.insert(ShapeExpr::nominal(sp.nominals[i]));
        for (std::size_t b = 0; b < free.size(); ++b)
          if (masks[t] >> b & 1u) gamma.insert(free[b]);
        g.list[image[t]] = std::move(gamma);
      }
      for (std::size_t cm = 0; cm < (std::size_t{1} << pairs.size()); ++cm) {
        Guess h = g;
        for (std::size_t b = 0; b < pairs.size(); ++b)
          if (cm >> b & 1u) {
            const auto& [a, r, c] = pairs[b];
            h.connections.insert({a, r, c});
            h.connections.insert({c, r.inverse(), a});
          }
        ++emitted;
        if (!emit(h)) return emitted;
      }
      more_g = false;
      for (std::size_t t = image.size(); t-- > 0;) {
        if (++masks[t] < per) {
          more_g = true;
          break;
        }
        masks[t] = 0;
      }
    }
    more_f = false;
    for (std::size_t i = l; i-- > 0;) {
      if (++f[i] < l) {
        more_f = true;
        break;
      }
      f[i] = 0;
    }
  }
  return emitted;
}

enum class StateKind { Bottom, Init, Q0, Q0Prime, Qi, Q, QPrime, QDoublePrime, TrPos, TrNeg, RolePos, RoleNeg };

struct StateInfo {
  StateKind kind;
  /// Nominal number for Qi, universe index for Tr states, role index for
  /// role states.
  std::size_t index = 0;
};

/// Two-way alternating parity tree automaton for a shape or a document under
/// one guess. The transition function is computed on demand because the
/// alphabet is exponential.
class TwoATA {
 public:
  TwoATA(std::shared_ptr<const GuessSpace> sp, Guess g, std::size_t k)
      : sp_(std::move(sp)), guess_(std::move(g)), k_(k) {
    add({StateKind::Bottom});
    initial_ = add({StateKind::Init});
    add({StateKind::Q0});
    add({StateKind::Q0Prime});
    for (std::size_t i = 1; i <= sp_->nominals.size(); ++i) add({StateKind::Qi, i});
    add({StateKind::Q});
    add({StateKind::QPrime});
    add({StateKind::QDoublePrime});
    for (std::size_t e = 0; e < sp_->universe.size(); ++e) {
      tr_pos_.push_back(add({StateKind::TrPos, e}));
      tr_neg_.push_back(add({StateKind::TrNeg, e}));
    }
    for (std::size_t r = 0; r < sp_->roles.size(); ++r) {
      role_pos_.push_back(add({StateKind::RolePos, r}));
      role_neg_.push_back(add({StateKind::RoleNeg, r}));
    }
    // Universe positions of the parts each transition refers to.
    using K = ShapeExpr::Kind;
    parts_.assign(sp_->universe.size(), {0, 0});
    for (std::size_t i = 0; i < sp_->universe.size(); ++i) {
      const ShapeExpr& e = sp_->universe[i];
      switch (e.kind()) {
        case K::Shape: parts_[i][0] = index_of(sp_->constraints.body(e.shape_name())); break;
        case K::NegShape: parts_[i][0] = index_of(ShapeExpr::shape(e.shape_name())); break;
        case K::And:
        case K::Or: parts_[i] = {index_of(e.left()), index_of(e.right())}; break;
        case K::Exists:
        case K::Forall: parts_[i][0] = index_of(e.body()); break;
        default: break;
      }
    }
  }

  const GuessSpace& space() const { return *sp_; }
  const Guess& guess() const { return guess_; }
  std::size_t branching() const { return k_; }
  std::size_t size() const { return states_.size(); }
  std::size_t initial() const { return initial_; }
  const StateInfo& state(std::size_t q) const { return states_[q]; }
  bool is_document() const { return !sp_->goal.has_value(); }

  /// Same automaton over k'-ary trees; the construction is uniform in k.
  TwoATA with_branching(std::size_t k) const {
    TwoATA out = *this;
    out.k_ = k;
    return out;
  }

  /// 1 exactly on the tr+ states.
  int priority(std::size_t q) const { return states_[q].kind == StateKind::TrPos ? 1 : 0; }

  std::size_t fixed(StateKind k, std::size_t i = 0) const {
    switch (k) {
      case StateKind::Bottom: return 0;
      case StateKind::Init: return 1;
      case StateKind::Q0: return 2;
      case StateKind::Q0Prime: return 3;
      case StateKind::Qi: return 3 + i;
      case StateKind::Q: return 4 + sp_->nominals.size();
      case StateKind::QPrime: return 5 + sp_->nominals.size();
      case StateKind::QDoublePrime: return 6 + sp_->nominals.size();
      default: break;
    }
    throw Error(ErrorKind::InvalidArgument, "not a fixed state kind");
  }

  std::optional<std::size_t> find_tr(bool positive, const ShapeExpr& e) const {
    auto it = std::lower_bound(sp_->universe.begin(), sp_->universe.end(), e);
    if (it == sp_->universe.end() || *it != e) return std::nullopt;
    std::size_t i = static_cast<std::size_t>(it - sp_->universe.begin());
    return positive ? tr_pos_[i] : tr_neg_[i];
  }
  std::size_t tr(bool positive, const ShapeExpr& e) const { return tr_at(positive, index_of(e)); }
  std::size_t role_state(const Role& r, bool negated) const {
    for (std::size_t i = 0; i < sp_->roles.size(); ++i)
      if (sp_->roles[i] == r) return negated ? role_neg_[i] : role_pos_[i];
    throw Error(ErrorKind::InvalidArgument, "role '" + r.str() + "' is not in the automaton");
  }

  std::string state_name(std::size_t q) const {
    const StateInfo& s = states_[q];
    switch (s.kind) {
      case StateKind::Bottom: return "bot";
      case StateKind::Init: return "q~";
      case StateKind::Q0: return "q0";
      case StateKind::Q0Prime: return "q0'";
      case StateKind::Qi: return "q" + std::to_string(s.index);
      case StateKind::Q: return "q";
      case StateKind::QPrime: return "q'";
      case StateKind::QDoublePrime: return "q''";
      case StateKind::TrPos: return "tr+(" + sp_->universe[s.index].to_string() + ")";
      case StateKind::TrNeg: return "tr-(" + sp_->universe[s.index].to_string() + ")";
      case StateKind::RolePos: return sp_->roles[s.index].str();
      case StateKind::RoleNeg: return "!" + sp_->roles[s.index].str();
    }
    return {};
  }

  std::string show(const Pbf& f) const {
    return f.to_string([this](std::size_t q) { return state_name(q); },
                       [this](std::size_t i) { return "<" + sp_->nominals[i - 1].str() + ">"; });
  }

  Pbf delta(std::size_t q, const Symbol& sigma) const {
    const StateInfo& st = states_[q];
    const std::size_t l = sp_->nominals.size();
    const bool root = sigma.is_root();
    switch (st.kind) {
      case StateKind::Q0: {
        if (!root) return Pbf::bottom();
        std::vector<Pbf> parts;
        for (std::size_t i = 1; i <= l; ++i) parts.push_back(Pbf::atom(int(i), fixed(StateKind::Qi, i)));
        for (std::size_t i = l + 1; i <= k_; ++i) parts.push_back(Pbf::atom(int(i), fixed(StateKind::Q)));
        for (std::size_t i = 1; i <= k_; ++i) parts.push_back(Pbf::atom(int(i), fixed(StateKind::QDoublePrime)));
        return Pbf::conj(std::move(parts));
      }
      case StateKind::Qi: {
        if (root || !qi_matches(st.index, sigma)) return Pbf::bottom();
        return all_children(fixed(StateKind::Q));
      }
      case StateKind::Q:
        if (root || !sigma.nominals.empty()) return Pbf::bottom();
        return all_children(fixed(StateKind::Q));
      case StateKind::QDoublePrime: return sigma.roles.empty() ? Pbf::top() : Pbf::bottom();
      default: break;
    }
    if (sigma.is_bottom()) return st.kind == StateKind::Bottom ? Pbf::top() : Pbf::bottom();
    switch (st.kind) {
      case StateKind::Bottom: return Pbf::bottom();
      case StateKind::Init: return Pbf::conj(Pbf::atom(0, fixed(StateKind::Q0)), Pbf::atom(0, fixed(StateKind::Q0Prime)));
      case StateKind::Q0Prime: return delta_q0_prime();
      case StateKind::QPrime: return delta_q_prime(sigma);
      case StateKind::RolePos: return sigma.has_role(sp_->roles[st.index]) ? Pbf::top() : Pbf::bottom();
      case StateKind::RoleNeg:
        return !sigma.has_role(sp_->roles[st.index]) && !root ? Pbf::top() : Pbf::bottom();
      case StateKind::TrPos: return delta_tr(true, st.index, sigma);
      case StateKind::TrNeg: return delta_tr(false, st.index, sigma);
      default: break;
    }
    return Pbf::bottom();
  }

 private:
  std::size_t index_of(const ShapeExpr& e) const {
    auto it = std::lower_bound(sp_->universe.begin(), sp_->universe.end(), e);
    if (it == sp_->universe.end() || *it != e)
      throw Error(ErrorKind::InvalidArgument, "no tr state for '" + e.to_string() + "'");
    return static_cast<std::size_t>(it - sp_->universe.begin());
  }
  std::size_t tr_at(bool positive, std::size_t i) const { return positive ? tr_pos_[i] : tr_neg_[i]; }

  std::size_t add(StateInfo s) {
    states_.push_back(s);
    return states_.size() - 1;
  }

  Pbf all_children(std::size_t q) const {
    std::vector<Pbf> parts;
    for (std::size_t j = 1; j <= k_; ++j) parts.push_back(Pbf::atom(int(j), q));
    return Pbf::conj(std::move(parts));
  }

  const std::optional<std::set<ShapeExpr>>& gamma_of(const NodeId& a) const {
    return guess_.list[guess_.mapping[*sp_->nominal_index(a)]];
  }
  bool in_gamma(const NodeId& a, const ShapeExpr& e) const {
    const auto& g = gamma_of(a);
    return g && g->count(e);
  }
  Direction jump(const NodeId& a) const { return Direction::to_nominal(guess_.mapping[*sp_->nominal_index(a)] + 1); }

  // gamma_i restricted to nominals and concept names must equal the letter's,
  // and the letter must carry a marker for every connection of its nominals.
  bool qi_matches(std::size_t i, const Symbol& sigma) const {
    std::set<ConceptName> gc;
    std::set<NodeId> gn;
    if (const auto& g = guess_.list[i - 1])
      for (const auto& e : *g) {
        if (e.kind() == ShapeExpr::Kind::Concept) gc.insert(e.concept_name());
        if (e.kind() == ShapeExpr::Kind::Nominal) gn.insert(e.nominal_id());
      }
    if (gc != sigma.concepts || gn != sigma.nominals) return false;
    for (const auto& a : sigma.nominals)
      for (const auto& [x, r, y] : guess_.connections)
        if (x == a && !sigma.markers.count({r, y})) return false;
    return true;
  }

  Pbf gamma_conjunct(std::size_t i) const {
    const auto& g = guess_.list[i - 1];
    if (!g) return Pbf::atom(int(i), fixed(StateKind::Bottom));
    std::vector<Pbf> parts;
    for (const auto& e : *g) parts.push_back(Pbf::atom(int(i), tr(true, e)));
    for (const auto& t : sp_->targets)
      if (t.kind() == Target::Kind::Node && guess_.mapping[*sp_->nominal_index(t.node())] + 1 == i)
        parts.push_back(Pbf::atom(int(i), tr(true, ShapeExpr::shape(t.shape))));
    return Pbf::conj(std::move(parts));
  }

  Pbf delta_q0_prime() const {
    std::vector<Pbf> parts;
    for (std::size_t i = 1; i <= sp_->nominals.size(); ++i) parts.push_back(gamma_conjunct(i));
    if (sp_->goal) {
      std::vector<Pbf> somewhere;
      std::size_t ts = tr(true, ShapeExpr::shape(*sp_->goal));
      for (std::size_t i = 1; i <= k_; ++i) somewhere.push_back(Pbf::atom(int(i), ts));
      parts.push_back(Pbf::disj(std::move(somewhere)));
    }
    for (std::size_t i = 1; i <= k_; ++i)
      parts.push_back(Pbf::disj(Pbf::atom(int(i), fixed(StateKind::QPrime)), Pbf::atom(int(i), fixed(StateKind::Bottom))));
    return Pbf::conj(std::move(parts));
  }

  Pbf delta_q_prime(const Symbol& sigma) const {
    std::vector<Pbf> parts;
    // Universal and failed existential commitments of a nominal reach the
    // nodes that point back at it.
    for (const auto& [rho, a] : sigma.markers) {
      const auto& g = gamma_of(a);
      if (!g) continue;
      Role r = rho.inverse();
      for (const auto& e : *g) {
        if (e.kind() == ShapeExpr::Kind::Forall && e.role() == r) parts.push_back(Pbf::atom(0, tr(true, e.body())));
        if (e.kind() == ShapeExpr::Kind::NegShape && sp_->constraints.defines(e.shape_name())) {
          const ShapeExpr& b = sp_->constraints.body(e.shape_name());
          if (b.kind() == ShapeExpr::Kind::Exists && b.role() == r) parts.push_back(Pbf::atom(0, tr(false, b.body())));
        }
      }
    }
    for (const auto& t : sp_->targets) {
      std::size_t ts = tr(true, ShapeExpr::shape(t.shape));
      if (t.kind() == Target::Kind::Class && sigma.concepts.count(t.concept_name())) parts.push_back(Pbf::atom(0, ts));
      if (t.kind() == Target::Kind::Role) {
        const Role& r = t.role();
        bool subject = sigma.has_role(r.inverse());
        for (const auto& [rho, a] : sigma.markers) subject = subject || rho == r;
        if (subject) {
          parts.push_back(Pbf::atom(0, ts));
        } else {
          for (std::size_t j = 1; j <= k_; ++j)
            parts.push_back(Pbf::disj({Pbf::atom(int(j), role_state(r, true)), Pbf::atom(int(j), fixed(StateKind::Bottom)),
                                       Pbf::atom(0, ts)}));
        }
      }
    }
    for (std::size_t j = 1; j <= k_; ++j)
      parts.push_back(Pbf::disj(Pbf::atom(int(j), fixed(StateKind::QPrime)), Pbf::atom(int(j), fixed(StateKind::Bottom))));
    return Pbf::conj(std::move(parts));
  }

  // Children j with (j, tr(s)) & (j, r).
  Pbf some_child(bool positive, std::size_t s, const Role& r) const {
    std::vector<Pbf> parts;
    for (std::size_t j = 1; j <= k_; ++j)
      parts.push_back(Pbf::conj(Pbf::atom(int(j), tr_at(positive, s)), Pbf::atom(int(j), role_state(r, false))));
    return Pbf::disj(std::move(parts));
  }

  // Parent and every child reached by r satisfy tr(s).
  Pbf every_neighbour(bool positive, std::size_t s, const Role& r) const {
    std::vector<Pbf> parts;
    parts.push_back(Pbf::disj(Pbf::atom(-1, tr_at(positive, s)), Pbf::atom(0, role_state(r.inverse(), true))));
    for (std::size_t j = 1; j <= k_; ++j)
      parts.push_back(Pbf::disj({Pbf::atom(int(j), tr_at(positive, s)), Pbf::atom(int(j), role_state(r, true)),
                                 Pbf::atom(int(j), fixed(StateKind::Bottom))}));
    return Pbf::conj(std::move(parts));
  }

  Pbf delta_tr(bool positive, std::size_t ei, const Symbol& sigma) const {
    using K = ShapeExpr::Kind;
    const ShapeExpr& e = sp_->universe[ei];
    const auto& [first, second] = parts_[ei];
    switch (e.kind()) {
      case K::Concept:
      case K::Nominal: {
        bool in = e.kind() == K::Concept ? sigma.concepts.count(e.concept_name()) > 0
                                         : sigma.nominals.count(e.nominal_id()) > 0;
        if (positive) return in ? Pbf::top() : Pbf::bottom();
        return !in && !sigma.is_root() ? Pbf::top() : Pbf::bottom();
      }
      case K::Shape: return Pbf::atom(0, tr_at(positive, first));
      case K::NegShape: return Pbf::atom(0, tr_at(!positive, first));
      case K::And:
      case K::Or: {
        Pbf a = Pbf::atom(0, tr_at(positive, first)), b = Pbf::atom(0, tr_at(positive, second));
        return (e.kind() == K::And) == positive ? Pbf::conj(std::move(a), std::move(b))
                                                : Pbf::disj(std::move(a), std::move(b));
      }
      case K::Exists:
      case K::Forall: break;
    }
    const Role& r = e.role();
    const ShapeExpr& s = e.body();
    const bool existential = (e.kind() == K::Exists) == positive;
    // Membership in the guess that a marked nominal needs: s itself on the
    // positive side, !s on the negative side.
    auto needed = [&](const NodeId& a) {
      if (positive) return in_gamma(a, s);
      return s.kind() == K::Shape && in_gamma(a, ShapeExpr::neg(s.shape_name()));
    };
    std::vector<NodeId> marked;
    for (const auto& [rho, a] : sigma.markers)
      if (rho == r) marked.push_back(a);
    if (existential) {
      std::vector<Pbf> parts;
      for (const auto& a : marked)
        if (needed(a)) parts.push_back(Pbf::atom(jump(a), tr_at(positive, first)));
      parts.push_back(some_child(positive, first, r));
      return Pbf::disj(std::move(parts));
    }
    std::vector<Pbf> parts;
    for (const auto& a : marked) {
      if (!needed(a)) return Pbf::bottom();
      parts.push_back(Pbf::atom(jump(a), tr_at(positive, first)));
    }
    parts.push_back(every_neighbour(positive, first, r));
    return Pbf::conj(std::move(parts));
  }

  std::shared_ptr<const GuessSpace> sp_;
  Guess guess_;
  std::size_t k_;
  std::vector<StateInfo> states_;
  std::size_t initial_ = 1;
  std::vector<std::size_t> tr_pos_, tr_neg_, role_pos_, role_neg_;
  std::vector<std::array<std::size_t, 2>> parts_;
};

namespace detail {

/// One more than the larger of l and the number of modal subformulas; the
/// negated side turns universals into existential moves, so both count.
inline std::size_t default_branching(const GuessSpace& sp) {
  std::size_t modal = 0;
  for (const auto& e : sp.sub)
    if (e.is_modal()) ++modal;
  return std::max(modal, sp.nominals.size()) + 1;
}

inline TwoATA build(GuessSpace sp, const Guess& g) {
  if (!guess_invariants_hold(sp, g)) throw Error(ErrorKind::InvalidArgument, "guess violates the guess invariants");
  std::size_t k = default_branching(sp);
  return TwoATA(std::make_shared<const GuessSpace>(std::move(sp)), g, k);
}

}  // namespace detail

inline TwoATA build_2ata(const ConstraintSet& c, const ShapeName& s, const Guess& g) {
  return detail::build(guess_space(c, s), g);
}

inline TwoATA build_doc_2ata(const Document& d, const Guess& g) { return detail::build(guess_space(d), g); }

/// States with priorities, then delta on each requested letter.
inline std::string dump(const TwoATA& a, const std::vector<Symbol>& symbols) {
  std::string out = "states " + std::to_string(a.size()) + "\nbranching " + std::to_string(a.branching()) + "\n";
  out += "guess " + a.guess().to_string(a.space()) + "\n";
  for (std::size_t q = 0; q < a.size(); ++q) out += "state " + a.state_name(q) + " priority " + std::to_string(a.priority(q)) + "\n";
  for (const auto& sym : symbols)
    for (std::size_t q = 0; q < a.size(); ++q)
      out += "delta(" + a.state_name(q) + ", " + sym.to_string() + ") = " + a.show(a.delta(q, sym)) + "\n";
  return out;
}

}  // namespace wfshacl
