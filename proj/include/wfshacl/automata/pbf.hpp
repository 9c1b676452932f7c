#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace wfshacl {

/// Where an automaton copy moves: a tree direction in [k] = {-1, 0, 1..k},
/// or straight to the root child that encodes nominal i (1-based).
struct Direction {
  bool nominal = false;
  int value = 0;

  static Direction tree(int d) { return {false, d}; }
  static Direction to_nominal(std::size_t i) { return {true, static_cast<int>(i)}; }

  friend bool operator==(const Direction&, const Direction&) = default;
  friend auto operator<=>(const Direction&, const Direction&) = default;
};

struct PbfAtom {
  Direction dir;
  std::size_t state = 0;

  friend bool operator==(const PbfAtom&, const PbfAtom&) = default;
  friend auto operator<=>(const PbfAtom&, const PbfAtom&) = default;
};

/// Positive boolean formula over (direction, state) atoms. There is no
/// negation constructor. Conjunctions and disjunctions are n-ary and the
/// constructors fold away constants.
class Pbf {
 public:
  enum class Kind { True, False, Atom, And, Or };

  static Pbf top() { return Pbf(Kind::True); }
  static Pbf bottom() { return Pbf(Kind::False); }
  static Pbf atom(Direction d, std::size_t q) {
    Pbf p(Kind::Atom);
    p.atom_ = {d, q};
    return p;
  }
  static Pbf atom(int d, std::size_t q) { return atom(Direction::tree(d), q); }

  static Pbf conj(std::vector<Pbf> parts) { return combine(Kind::And, std::move(parts)); }
  static Pbf disj(std::vector<Pbf> parts) { return combine(Kind::Or, std::move(parts)); }
  static Pbf conj(Pbf a, Pbf b) { return conj(std::vector<Pbf>{std::move(a), std::move(b)}); }
  static Pbf disj(Pbf a, Pbf b) { return disj(std::vector<Pbf>{std::move(a), std::move(b)}); }

  Kind kind() const { return kind_; }
  const PbfAtom& atom() const { return atom_; }
  const std::vector<Pbf>& parts() const { return parts_; }

  /// Truth under the valuation that makes exactly the atoms in J true.
  bool satisfied_by(const std::function<bool(const PbfAtom&)>& in_j) const {
    switch (kind_) {
      case Kind::True: return true;
      case Kind::False: return false;
      case Kind::Atom: return in_j(atom_);
      case Kind::And:
        for (const auto& p : parts_)
          if (!p.satisfied_by(in_j)) return false;
        return true;
      case Kind::Or:
        for (const auto& p : parts_)
          if (p.satisfied_by(in_j)) return true;
        return false;
    }
    return false;
  }

  void collect_atoms(std::vector<PbfAtom>& out) const {
    if (kind_ == Kind::Atom) out.push_back(atom_);
    for (const auto& p : parts_) p.collect_atoms(out);
  }

  std::string to_string(const std::function<std::string(std::size_t)>& state_name,
                        const std::function<std::string(std::size_t)>& nominal_name) const {
    switch (kind_) {
      case Kind::True: return "true";
      case Kind::False: return "false";
      case Kind::Atom: {
        std::string d = atom_.dir.nominal ? "@" + nominal_name(static_cast<std::size_t>(atom_.dir.value))
                                          : std::to_string(atom_.dir.value);
        return "(" + d + ", " + state_name(atom_.state) + ")";
      }
      case Kind::And:
      case Kind::Or: {
        std::string out;
        for (std::size_t i = 0; i < parts_.size(); ++i) {
          if (i) out += kind_ == Kind::And ? " & " : " | ";
          const Pbf& p = parts_[i];
          bool paren = p.kind_ == Kind::And || p.kind_ == Kind::Or;
          std::string s = p.to_string(state_name, nominal_name);
          out += paren ? "(" + s + ")" : s;
        }
        return out;
      }
    }
    return {};
  }

  friend bool operator==(const Pbf& a, const Pbf& b) {
    return a.kind_ == b.kind_ && a.atom_ == b.atom_ && a.parts_ == b.parts_;
  }

 private:
  explicit Pbf(Kind k) : kind_(k) {}

  static Pbf combine(Kind k, std::vector<Pbf> parts) {
    const Kind unit = k == Kind::And ? Kind::True : Kind::False;
    const Kind zero = k == Kind::And ? Kind::False : Kind::True;
    Pbf out(k);
    for (auto& p : parts) {
      if (p.kind_ == zero) return Pbf(zero);
      if (p.kind_ == unit) continue;
      if (p.kind_ == k) {
        for (auto& q : p.parts_) out.parts_.push_back(std::move(q));
      } else {
        out.parts_.push_back(std::move(p));
      }
    }
    if (out.parts_.empty()) return Pbf(unit);
    if (out.parts_.size() == 1) return std::move(out.parts_.front());
    return out;
  }

  Kind kind_;
  PbfAtom atom_;
  std::vector<Pbf> parts_;
};

}  // namespace wfshacl
