#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <string>
#include <string_view>

namespace wfshacl {

/// Compares two tokens, treating all-digit tokens numerically so that
/// node "10" sorts after node "9". Mixed tokens fall back to byte order.
inline int natural_compare(std::string_view a, std::string_view b) {
  auto all_digits = [](std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
      if (c < '0' || c > '9') return false;
    return true;
  };
  if (all_digits(a) && all_digits(b)) {
    auto strip = [](std::string_view s) {
      std::size_t i = 0;
      while (i + 1 < s.size() && s[i] == '0') ++i;
      return s.substr(i);
    };
    auto x = strip(a), y = strip(b);
    if (x.size() != y.size()) return x.size() < y.size() ? -1 : 1;
    if (int c = x.compare(y); c != 0) return c < 0 ? -1 : 1;
  } else if (all_digits(a) != all_digits(b)) {
    return all_digits(a) ? -1 : 1;
  }
  int c = a.compare(b);
  return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

/// Interned-by-value identifier. The tag keeps the four name spaces apart at
/// compile time.
template <class Tag>
class Name {
 public:
  Name() = default;
  explicit Name(std::string value) : value_(std::move(value)) {}
  explicit Name(const char* value) : value_(value) {}

  const std::string& str() const { return value_; }
  bool empty() const { return value_.empty(); }

  friend bool operator==(const Name& a, const Name& b) { return a.value_ == b.value_; }
  friend std::strong_ordering operator<=>(const Name& a, const Name& b) {
    return natural_compare(a.value_, b.value_) <=> 0;
  }

 private:
  std::string value_;
};

struct NodeTag {};
struct ConceptTag {};
struct RoleTag {};
struct ShapeTag {};

using NodeId = Name<NodeTag>;
using ConceptName = Name<ConceptTag>;
using RoleName = Name<RoleTag>;
using ShapeName = Name<ShapeTag>;

/// A role name or its inverse.
struct Role {
  RoleName name;
  bool inverted = false;

  Role() = default;
  explicit Role(RoleName n, bool inv = false) : name(std::move(n)), inverted(inv) {}
  explicit Role(const char* n, bool inv = false) : name(n), inverted(inv) {}

  Role inverse() const { return Role(name, !inverted); }
  std::string str() const { return inverted ? name.str() + "-" : name.str(); }

  friend bool operator==(const Role&, const Role&) = default;
  friend std::strong_ordering operator<=>(const Role& a, const Role& b) {
    if (auto c = a.name <=> b.name; c != 0) return c;
    return a.inverted <=> b.inverted;
  }
};

}  // namespace wfshacl

template <class Tag>
struct std::hash<wfshacl::Name<Tag>> {
  std::size_t operator()(const wfshacl::Name<Tag>& n) const noexcept {
    return std::hash<std::string>{}(n.str());
  }
};

template <>
struct std::hash<wfshacl::Role> {
  std::size_t operator()(const wfshacl::Role& r) const noexcept {
    return std::hash<std::string>{}(r.name.str()) * 2 + (r.inverted ? 1 : 0);
  }
};
