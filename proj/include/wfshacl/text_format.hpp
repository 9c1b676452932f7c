#pragma once

#include <cctype>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include "wfshacl/document.hpp"
#include "wfshacl/graph.hpp"

namespace wfshacl {

namespace detail {

inline bool ident_start(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
inline bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '#' || c == '\'' || c == ':' || c == '~';
}

/// Single-line scanner with 1-based positions for error messages.
class Cursor {
 public:
  Cursor(std::string_view text, std::size_t line) : text_(text), line_(line) {}

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    // A '#' that starts a token opens a comment.
    if (pos_ < text_.size() && text_[pos_] == '#') pos_ = text_.size();
  }
  bool at_end() {
    skip_ws();
    return pos_ >= text_.size();
  }
  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }
  bool accept(std::string_view tok) {
    skip_ws();
    if (text_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }
  void expect(std::string_view tok) {
    if (!accept(tok)) fail("expected '" + std::string(tok) + "'");
  }
  /// Keyword followed by a non-identifier character.
  bool accept_word(std::string_view w) {
    skip_ws();
    if (text_.substr(pos_, w.size()) == w && (pos_ + w.size() >= text_.size() || !ident_char(text_[pos_ + w.size()]))) {
      pos_ += w.size();
      return true;
    }
    return false;
  }
  std::string ident(const char* what) {
    skip_ws();
    std::size_t start = pos_;
    if (pos_ >= text_.size() || !ident_start(text_[pos_])) fail(std::string("expected ") + what);
    while (pos_ < text_.size() && ident_char(text_[pos_])) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }
  /// Raw token up to (not including) one of the stop characters.
  std::string until(std::string_view stops, const char* what) {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && stops.find(text_[pos_]) == std::string_view::npos) ++pos_;
    std::string tok(text_.substr(start, pos_ - start));
    while (!tok.empty() && std::isspace(static_cast<unsigned char>(tok.back()))) tok.pop_back();
    if (tok.empty()) fail(std::string("expected ") + what);
    return tok;
  }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(line_, pos_ + 1, msg); }
  std::size_t column() const { return pos_ + 1; }

 private:
  std::string_view text_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

inline bool is_upper_token(const std::string& s) { return !s.empty() && std::isupper(static_cast<unsigned char>(s[0])); }

inline Role parse_role(Cursor& cur) {
  std::string r = cur.ident("role name");
  bool inv = cur.accept("-");
  return Role(RoleName(r), inv);
}

class ExprParser {
 public:
  explicit ExprParser(Cursor& c) : cur_(c) {}

  ShapeExpr expr() {
    ShapeExpr e = conj();
    while (cur_.accept("|")) e = ShapeExpr::disj(e, conj());
    return e;
  }

 private:
  ShapeExpr conj() {
    ShapeExpr e = unary();
    while (cur_.accept("&")) e = ShapeExpr::conj(e, unary());
    return e;
  }

  ShapeExpr unary() {
    if (cur_.accept("!")) {
      std::string s = cur_.ident("shape name after '!'");
      if (is_upper_token(s)) cur_.fail("negation applies to shape names only, got concept '" + s + "'");
      return ShapeExpr::neg(ShapeName(s));
    }
    if (cur_.accept("(")) {
      ShapeExpr e = expr();
      cur_.expect(")");
      return e;
    }
    if (cur_.accept("<")) {
      std::string a = cur_.until(">", "node id");
      cur_.expect(">");
      return ShapeExpr::nominal(NodeId(a));
    }
    bool some = cur_.accept_word("some");
    if (some || cur_.accept_word("all")) {
      Role r = parse_role(cur_);
      cur_.expect(".");
      ShapeExpr body = expr();
      return some ? ShapeExpr::exists(r, body) : ShapeExpr::forall(r, body);
    }
    std::string tok = cur_.ident("shape expression");
    if (is_upper_token(tok)) return ShapeExpr::concept_ref(ConceptName(tok));
    return ShapeExpr::shape(ShapeName(tok));
  }

  Cursor& cur_;
};

template <class F>
void for_each_line(std::string_view text, F&& f) {
  std::size_t line = 1, start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view l = text.substr(start, end - start);
    if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
    f(l, line);
    ++line;
    start = end + 1;
  }
}

}  // namespace detail

/// Parses a single shape expression (line 1).
inline ShapeExpr parse_shape_expr(std::string_view text) {
  detail::Cursor cur(text, 1);
  ShapeExpr e = detail::ExprParser(cur).expr();
  if (!cur.at_end()) cur.fail("unexpected trailing input");
  return e;
}

/// Parses a document; shape references are checked once the whole text is read.
inline Document parse_document(std::string_view text) {
  Document d;
  detail::for_each_line(text, [&](std::string_view line, std::size_t no) {
    detail::Cursor cur(line, no);
    if (cur.at_end()) return;
    if (cur.accept_word("target")) {
      Target t;
      if (cur.accept_word("node")) {
        std::string a = cur.accept("<") ? cur.until(">", "node id") : cur.ident("node id");
        if (cur.peek() == '>') cur.expect(">");
        t.subject = NodeId(a);
      } else if (cur.accept_word("class")) {
        std::string c = cur.ident("concept name");
        if (!detail::is_upper_token(c)) cur.fail("concept names start with an upper-case letter");
        t.subject = ConceptName(c);
      } else if (cur.accept_word("role")) {
        t.subject = detail::parse_role(cur);
      } else {
        cur.fail("expected 'node', 'class' or 'role'");
      }
      std::string s = cur.ident("shape name");
      if (detail::is_upper_token(s)) cur.fail("shape names start with a lower-case letter");
      t.shape = ShapeName(s);
      if (!cur.at_end()) cur.fail("unexpected trailing input");
      d.targets.push_back(std::move(t));
      return;
    }
    std::string head = cur.ident("shape name");
    if (detail::is_upper_token(head)) cur.fail("shape names start with a lower-case letter");
    cur.expect("<-");
    ShapeExpr body = detail::ExprParser(cur).expr();
    if (!cur.at_end()) cur.fail("unexpected trailing input");
    try {
      d.constraints.define(ShapeName(head), body);
    } catch (const Error& e) {
      throw ParseError(no, 1, e.what());
    }
  });
  d.check();
  return d;
}

inline DataGraph parse_graph(std::string_view text) {
  std::set<ConceptAssertion> cs;
  std::set<RoleAssertion> rs;
  detail::for_each_line(text, [&](std::string_view line, std::size_t no) {
    detail::Cursor cur(line, no);
    while (!cur.at_end()) {
      std::string pred = cur.ident("predicate name");
      cur.expect("(");
      std::string a = cur.until(",)", "node id");
      if (cur.accept(",")) {
        std::string b = cur.until(")", "node id");
        cur.expect(")");
        rs.insert(RoleAssertion{RoleName(pred), NodeId(a), NodeId(b)});
      } else {
        cur.expect(")");
        cs.insert(ConceptAssertion{ConceptName(pred), NodeId(a)});
      }
      cur.accept(".");
    }
  });
  return DataGraph(std::move(cs), std::move(rs));
}

inline std::string to_text(const DataGraph& g) {
  std::string out;
  for (const auto& c : g.concept_assertions()) out += c.concept_name.str() + "(" + c.node.str() + ")\n";
  for (const auto& r : g.role_assertions()) out += r.role.str() + "(" + r.subject.str() + "," + r.object.str() + ")\n";
  return out;
}

/// Compact single-line form, e.g. {B(a), p(0,1)}.
inline std::string to_inline(const DataGraph& g) {
  std::string out = "{";
  bool first = true;
  auto sep = [&] {
    if (!first) out += ", ";
    first = false;
  };
  for (const auto& c : g.concept_assertions()) {
    sep();
    out += c.concept_name.str() + "(" + c.node.str() + ")";
  }
  for (const auto& r : g.role_assertions()) {
    sep();
    out += r.role.str() + "(" + r.subject.str() + "," + r.object.str() + ")";
  }
  return out + "}";
}

inline std::string to_text(const ConstraintSet& c) {
  std::string out;
  for (const auto& [h, b] : c.defs()) out += h.str() + " <- " + b.to_string() + "\n";
  return out;
}

inline std::string to_text(const Target& t) {
  switch (t.kind()) {
    case Target::Kind::Node: return "target node <" + t.node().str() + "> " + t.shape.str();
    case Target::Kind::Class: return "target class " + t.concept_name().str() + " " + t.shape.str();
    case Target::Kind::Role: return "target role " + t.role().str() + " " + t.shape.str();
  }
  return {};
}

inline std::string to_text(const Document& d) {
  std::string out = to_text(d.constraints);
  for (const auto& t : d.targets) out += to_text(t) + "\n";
  return out;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string to_string(const NodeSet& s) {
  std::string out = "{";
  bool first = true;
  for (const auto& a : s) {
    if (!first) out += ", ";
    first = false;
    out += a.str();
  }
  return out + "}";
}

}  // namespace wfshacl
