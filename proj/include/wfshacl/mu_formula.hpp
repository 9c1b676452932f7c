#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "wfshacl/error.hpp"
#include "wfshacl/names.hpp"
#include "wfshacl/text_format.hpp"

namespace wfshacl {

/// Hybrid mu-calculus formula in negation normal form. Nodes are immutable and
/// shared, so a formula is a DAG; all operations treat it as the tree it denotes.
class MuFormula {
 public:
  enum class Kind { True, False, Concept, NotConcept, Nominal, NotNominal, Var, And, Or, Box, Diamond, Mu, Nu };

  static MuFormula top() { return make(Kind::True); }
  static MuFormula bottom() { return make(Kind::False); }
  static MuFormula concept_lit(ConceptName c, bool negated = false) {
    return make(negated ? Kind::NotConcept : Kind::Concept, c.str());
  }
  static MuFormula nominal(NodeId a, bool negated = false) {
    return make(negated ? Kind::NotNominal : Kind::Nominal, a.str());
  }
  static MuFormula var(std::string x) { return make(Kind::Var, std::move(x)); }
  static MuFormula conj(MuFormula a, MuFormula b) { return make(Kind::And, {}, {}, std::move(a), std::move(b)); }
  static MuFormula disj(MuFormula a, MuFormula b) { return make(Kind::Or, {}, {}, std::move(a), std::move(b)); }
  static MuFormula box(Role r, MuFormula f) { return make(Kind::Box, {}, std::move(r), std::move(f)); }
  static MuFormula diamond(Role r, MuFormula f) { return make(Kind::Diamond, {}, std::move(r), std::move(f)); }
  static MuFormula mu(std::string x, MuFormula f) { return make(Kind::Mu, std::move(x), {}, std::move(f)); }
  static MuFormula nu(std::string x, MuFormula f) { return make(Kind::Nu, std::move(x), {}, std::move(f)); }

  /// Left-nested conjunction; empty list gives top.
  static MuFormula conj_all(const std::vector<MuFormula>& fs) {
    if (fs.empty()) return top();
    MuFormula r = fs[0];
    for (std::size_t i = 1; i < fs.size(); ++i) r = conj(r, fs[i]);
    return r;
  }
  static MuFormula disj_all(const std::vector<MuFormula>& fs) {
    if (fs.empty()) return bottom();
    MuFormula r = fs[0];
    for (std::size_t i = 1; i < fs.size(); ++i) r = disj(r, fs[i]);
    return r;
  }

  Kind kind() const { return n_->kind; }
  /// Concept, nominal or variable token; the bound variable for binders.
  const std::string& name() const { return n_->name; }
  const Role& role() const { return n_->role; }
  const MuFormula& left() const { return *n_->a; }
  const MuFormula& right() const { return *n_->b; }
  const MuFormula& body() const { return *n_->a; }

  bool is_binder() const { return kind() == Kind::Mu || kind() == Kind::Nu; }
  bool is_modal() const { return kind() == Kind::Box || kind() == Kind::Diamond; }
  bool is_binary() const { return kind() == Kind::And || kind() == Kind::Or; }
  bool is_literal() const { return !is_binder() && !is_modal() && !is_binary(); }

  /// Identity of the shared node, for DAG-aware memoization.
  const void* id() const { return n_.get(); }

  int compare(const MuFormula& o) const {
    if (n_ == o.n_) return 0;
    if (kind() != o.kind()) return kind() < o.kind() ? -1 : 1;
    if (int c = name().compare(o.name()); c != 0) return c < 0 ? -1 : 1;
    if (auto c = role() <=> o.role(); c != 0) return c < 0 ? -1 : 1;
    if (n_->a) {
      if (int c = n_->a->compare(*o.n_->a); c != 0) return c;
    }
    if (n_->b) return n_->b->compare(*o.n_->b);
    return 0;
  }
  friend bool operator==(const MuFormula& a, const MuFormula& b) { return a.compare(b) == 0; }
  friend std::strong_ordering operator<=>(const MuFormula& a, const MuFormula& b) { return a.compare(b) <=> 0; }

  std::string to_string() const;

 private:
  struct Node {
    Kind kind;
    std::string name;
    Role role;
    std::shared_ptr<const MuFormula> a, b;
  };

  static MuFormula make(Kind k, std::string name = {}, Role r = {}, std::optional<MuFormula> a = std::nullopt,
                        std::optional<MuFormula> b = std::nullopt) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->name = std::move(name);
    n->role = std::move(r);
    if (a) n->a = std::make_shared<const MuFormula>(std::move(*a));
    if (b) n->b = std::make_shared<const MuFormula>(std::move(*b));
    MuFormula f;
    f.n_ = std::move(n);
    return f;
  }

  MuFormula() = default;
  std::shared_ptr<const Node> n_;
};

namespace detail {

// Binders extend as far right as possible, so they print bare only at the
// tail of the surrounding text. Precedences: | 1, & 2, prefix forms 3.
inline std::string print_mu(const MuFormula& f, int min_prec, bool tail) {
  using K = MuFormula::Kind;
  switch (f.kind()) {
    case K::True: return "true";
    case K::False: return "false";
    case K::Concept: return f.name();
    case K::NotConcept: return "!" + f.name();
    case K::Nominal: return "@" + f.name();
    case K::NotNominal: return "!@" + f.name();
    case K::Var: return f.name();
    case K::And:
    case K::Or: {
      int p = f.kind() == K::Or ? 1 : 2;
      bool paren = p < min_prec;
      std::string s = print_mu(f.left(), p, false) + (f.kind() == K::Or ? " | " : " & ") +
                      print_mu(f.right(), p + 1, paren || tail);
      return paren ? "(" + s + ")" : s;
    }
    case K::Box:
    case K::Diamond: {
      std::string op = f.kind() == K::Box ? "[" + f.role().str() + "] " : "<" + f.role().str() + "> ";
      return op + print_mu(f.body(), 3, tail);
    }
    case K::Mu:
    case K::Nu: {
      const MuFormula& b = f.body();
      std::string body = b.is_binary() ? "(" + print_mu(b, 0, true) + ")" : print_mu(b, 3, true);
      std::string s = std::string(f.kind() == K::Mu ? "mu " : "nu ") + f.name() + " . " + body;
      return tail ? s : "(" + s + ")";
    }
  }
  return {};
}

}  // namespace detail

inline std::string MuFormula::to_string() const { return detail::print_mu(*this, 0, true); }

namespace detail {

class MuParser {
 public:
  explicit MuParser(std::string_view text) : cur_(text, 1) {}

  MuFormula parse() {
    MuFormula f = disj();
    if (!cur_.at_end()) cur_.fail("unexpected trailing input");
    return f;
  }

 private:
  MuFormula disj() {
    MuFormula f = conj();
    while (cur_.accept("|")) f = MuFormula::disj(f, conj());
    return f;
  }
  MuFormula conj() {
    MuFormula f = unary();
    while (cur_.accept("&")) f = MuFormula::conj(f, unary());
    return f;
  }
  MuFormula unary() {
    if (cur_.accept("(")) {
      MuFormula f = disj();
      cur_.expect(")");
      return f;
    }
    if (cur_.accept("!")) {
      if (cur_.accept("@")) return MuFormula::nominal(NodeId(cur_.ident("node id")), true);
      std::string c = cur_.ident("concept name");
      if (bound(c)) cur_.fail("negated variable '" + c + "' is outside negation normal form");
      return MuFormula::concept_lit(ConceptName(c), true);
    }
    if (cur_.accept("@")) return MuFormula::nominal(NodeId(cur_.ident("node id")));
    if (cur_.accept("<")) {
      Role r = parse_role(cur_);
      cur_.expect(">");
      return MuFormula::diamond(r, unary());
    }
    if (cur_.accept("[")) {
      Role r = parse_role(cur_);
      cur_.expect("]");
      return MuFormula::box(r, unary());
    }
    bool is_mu = cur_.accept_word("mu");
    if (is_mu || cur_.accept_word("nu")) {
      std::string x = cur_.ident("variable");
      cur_.expect(".");
      scope_.push_back(x);
      MuFormula body = disj();
      scope_.pop_back();
      return is_mu ? MuFormula::mu(x, body) : MuFormula::nu(x, body);
    }
    if (cur_.accept_word("true")) return MuFormula::top();
    if (cur_.accept_word("false")) return MuFormula::bottom();
    std::string tok = cur_.ident("formula");
    if (bound(tok)) return MuFormula::var(tok);
    return MuFormula::concept_lit(ConceptName(tok));
  }

  bool bound(const std::string& x) const {
    for (const auto& s : scope_)
      if (s == x) return true;
    return false;
  }

  Cursor cur_;
  std::vector<std::string> scope_;
};

}  // namespace detail

/// Identifiers bound by an enclosing binder are variables; the rest are concepts.
inline MuFormula parse_mu_formula(std::string_view text) { return detail::MuParser(text).parse(); }

/// Free variables of a formula.
inline std::set<std::string> free_vars(const MuFormula& f) {
  using K = MuFormula::Kind;
  std::unordered_map<const void*, std::set<std::string>> memo;
  std::function<const std::set<std::string>&(const MuFormula&)> go = [&](const MuFormula& g) -> const std::set<std::string>& {
    if (auto it = memo.find(g.id()); it != memo.end()) return it->second;
    std::set<std::string> out;
    if (g.kind() == K::Var) {
      out.insert(g.name());
    } else if (g.is_binary()) {
      out = go(g.left());
      const auto& r = go(g.right());
      out.insert(r.begin(), r.end());
    } else if (g.is_modal()) {
      out = go(g.body());
    } else if (g.is_binder()) {
      out = go(g.body());
      out.erase(g.name());
    }
    return memo.emplace(g.id(), std::move(out)).first->second;
  };
  return go(f);
}

inline bool is_closed(const MuFormula& f) { return free_vars(f).empty(); }

/// True iff the variable occurs anywhere in f, bound or free.
inline bool mentions_var(const MuFormula& f, const std::string& x) {
  std::unordered_map<const void*, bool> memo;
  std::function<bool(const MuFormula&)> go = [&](const MuFormula& g) -> bool {
    if (auto it = memo.find(g.id()); it != memo.end()) return it->second;
    bool r = false;
    if (g.kind() == MuFormula::Kind::Var) r = g.name() == x;
    else if (g.is_binary()) r = go(g.left()) || go(g.right());
    else if (g.is_modal() || g.is_binder()) r = go(g.body());
    memo.emplace(g.id(), r);
    return r;
  };
  return go(f);
}

namespace detail {

template <class F>
MuFormula rebuild(const MuFormula& g, F&& child) {
  using K = MuFormula::Kind;
  switch (g.kind()) {
    case K::And: return MuFormula::conj(child(g.left()), child(g.right()));
    case K::Or: return MuFormula::disj(child(g.left()), child(g.right()));
    case K::Box: return MuFormula::box(g.role(), child(g.body()));
    case K::Diamond: return MuFormula::diamond(g.role(), child(g.body()));
    case K::Mu: return MuFormula::mu(g.name(), child(g.body()));
    case K::Nu: return MuFormula::nu(g.name(), child(g.body()));
    default: return g;
  }
}

}  // namespace detail

/// Drops every binder whose variable does not occur in its body.
inline MuFormula cln(const MuFormula& f) {
  std::unordered_map<const void*, MuFormula> memo;
  std::function<MuFormula(const MuFormula&)> go = [&](const MuFormula& g) -> MuFormula {
    if (auto it = memo.find(g.id()); it != memo.end()) return it->second;
    MuFormula r = g;
    if (g.is_binder() && !mentions_var(g.body(), g.name())) r = go(g.body());
    else if (!g.is_literal()) r = detail::rebuild(g, go);
    memo.emplace(g.id(), r);
    return r;
  };
  return go(f);
}

/// Negation-normal-form complement of a closed formula.
inline MuFormula dualize(const MuFormula& f) {
  using K = MuFormula::Kind;
  if (auto fv = free_vars(f); !fv.empty()) throw Error(ErrorKind::FreeVariable, "cannot dualize: '" + *fv.begin() + "' is free");
  std::unordered_map<const void*, MuFormula> memo;
  std::function<MuFormula(const MuFormula&)> go = [&](const MuFormula& g) -> MuFormula {
    if (auto it = memo.find(g.id()); it != memo.end()) return it->second;
    MuFormula r = g;
    switch (g.kind()) {
      case K::True: r = MuFormula::bottom(); break;
      case K::False: r = MuFormula::top(); break;
      case K::Concept: r = MuFormula::concept_lit(ConceptName(g.name()), true); break;
      case K::NotConcept: r = MuFormula::concept_lit(ConceptName(g.name())); break;
      case K::Nominal: r = MuFormula::nominal(NodeId(g.name()), true); break;
      case K::NotNominal: r = MuFormula::nominal(NodeId(g.name())); break;
      case K::Var: r = g; break;
      case K::And: r = MuFormula::disj(go(g.left()), go(g.right())); break;
      case K::Or: r = MuFormula::conj(go(g.left()), go(g.right())); break;
      case K::Box: r = MuFormula::diamond(g.role(), go(g.body())); break;
      case K::Diamond: r = MuFormula::box(g.role(), go(g.body())); break;
      case K::Mu: r = MuFormula::nu(g.name(), go(g.body())); break;
      case K::Nu: r = MuFormula::mu(g.name(), go(g.body())); break;
    }
    memo.emplace(g.id(), r);
    return r;
  };
  return go(f);
}

/// Number of distinct shared nodes.
inline std::size_t dag_size(const MuFormula& f) {
  std::set<const void*> seen;
  std::function<void(const MuFormula&)> go = [&](const MuFormula& g) {
    if (!seen.insert(g.id()).second) return;
    if (g.is_binary()) {
      go(g.left());
      go(g.right());
    } else if (!g.is_literal()) {
      go(g.body());
    }
  };
  go(f);
  return seen.size();
}

/// Size of the denoted tree, saturating at cap.
inline std::size_t tree_size(const MuFormula& f, std::size_t cap = static_cast<std::size_t>(-1)) {
  std::unordered_map<const void*, std::size_t> memo;
  std::function<std::size_t(const MuFormula&)> go = [&](const MuFormula& g) -> std::size_t {
    if (auto it = memo.find(g.id()); it != memo.end()) return it->second;
    std::size_t r = 1;
    if (g.is_binary()) r += std::min(cap, go(g.left()) + go(g.right()));
    else if (!g.is_literal()) r += go(g.body());
    r = std::min(r, cap);
    memo.emplace(g.id(), r);
    return r;
  };
  return go(f);
}

/// Renames binders so that each variable is bound exactly once; the first
/// binder of a name in pre-order keeps it, later ones get a `~n` suffix.
inline MuFormula rename_apart(const MuFormula& f) {
  using K = MuFormula::Kind;
  std::map<std::string, int> uses;
  std::map<std::string, std::vector<std::string>> scope;
  std::function<MuFormula(const MuFormula&)> go = [&](const MuFormula& g) -> MuFormula {
    switch (g.kind()) {
      case K::Var: {
        auto it = scope.find(g.name());
        return (it == scope.end() || it->second.empty()) ? g : MuFormula::var(it->second.back());
      }
      case K::Mu:
      case K::Nu: {
        int n = uses[g.name()]++;
        std::string fresh = n == 0 ? g.name() : g.name() + "~" + std::to_string(n + 1);
        scope[g.name()].push_back(fresh);
        MuFormula b = go(g.body());
        scope[g.name()].pop_back();
        return g.kind() == K::Mu ? MuFormula::mu(fresh, b) : MuFormula::nu(fresh, b);
      }
      default: return g.is_literal() ? g : detail::rebuild(g, go);
    }
  };
  return go(f);
}

/// Concepts, roles and nominals occurring in a formula.
struct MuSignature {
  std::set<ConceptName> concepts;
  std::set<RoleName> roles;
  std::set<NodeId> nominals;
};

inline MuSignature signature_of(const MuFormula& f) {
  using K = MuFormula::Kind;
  MuSignature sig;
  std::set<const void*> seen;
  std::function<void(const MuFormula&)> go = [&](const MuFormula& g) {
    if (!seen.insert(g.id()).second) return;
    switch (g.kind()) {
      case K::Concept:
      case K::NotConcept: sig.concepts.insert(ConceptName(g.name())); break;
      case K::Nominal:
      case K::NotNominal: sig.nominals.insert(NodeId(g.name())); break;
      case K::Box:
      case K::Diamond:
        sig.roles.insert(g.role().name);
        go(g.body());
        break;
      case K::And:
      case K::Or:
        go(g.left());
        go(g.right());
        break;
      case K::Mu:
      case K::Nu: go(g.body()); break;
      default: break;
    }
  };
  go(f);
  return sig;
}

}  // namespace wfshacl
