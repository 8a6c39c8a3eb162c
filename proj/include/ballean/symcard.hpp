#pragma once

#include <optional>
#include <string>

#include "ballean/common.hpp"

namespace ballean {

/// Symbolic cardinal for the bornology invariants add/cov/cof. Concrete
/// desk-scale values are Fin(n) or ℵ0; the higher levels exist so that the
/// inference rules over abstract declarations can compare hypotheses like
/// cov(B) < add(B').
class SymCard {
 public:
  enum class Kind { Fin, Aleph0, AtLeastAleph1 };

  static SymCard fin(Nat n) { return SymCard(Kind::Fin, n, ""); }
  static SymCard aleph0() { return SymCard(Kind::Aleph0, 0, ""); }
  static SymCard atLeastAleph1(std::string name = "") {
    return SymCard(Kind::AtLeastAleph1, 0, std::move(name));
  }

  Kind kind() const { return kind_; }
  Nat finValue() const { return n_; }
  const std::string& name() const { return name_; }

  /// Tri-valued comparison: nullopt when the order is not derivable (two
  /// distinct declared cardinals above ℵ1).
  static std::optional<int> compare(const SymCard& a, const SymCard& b) {
    if (a.kind_ != b.kind_) return rank(a.kind_) < rank(b.kind_) ? -1 : 1;
    switch (a.kind_) {
      case Kind::Fin:
        return a.n_ == b.n_ ? 0 : (a.n_ < b.n_ ? -1 : 1);
      case Kind::Aleph0:
        return 0;
      case Kind::AtLeastAleph1:
        if (a.name_ == b.name_) return 0;
        return std::nullopt;
    }
    return std::nullopt;
  }

  static bool knownLess(const SymCard& a, const SymCard& b) {
    auto c = compare(a, b);
    return c && *c < 0;
  }
  static bool knownEqual(const SymCard& a, const SymCard& b) {
    auto c = compare(a, b);
    return c && *c == 0;
  }
  static bool knownNotEqual(const SymCard& a, const SymCard& b) {
    auto c = compare(a, b);
    return c && *c != 0;
  }
  static bool knownLessEqual(const SymCard& a, const SymCard& b) {
    auto c = compare(a, b);
    return c && *c <= 0;
  }

  /// min/max pick a side when comparable; incomparable pairs fall back to the
  /// left argument tagged with the operation (never hit by concrete corpora).
  static SymCard minOf(const SymCard& a, const SymCard& b) {
    auto c = compare(a, b);
    if (c) return *c <= 0 ? a : b;
    return atLeastAleph1("min(" + a.str() + "," + b.str() + ")");
  }
  static SymCard maxOf(const SymCard& a, const SymCard& b) {
    auto c = compare(a, b);
    if (c) return *c >= 0 ? a : b;
    return atLeastAleph1("max(" + a.str() + "," + b.str() + ")");
  }

  std::string str() const {
    switch (kind_) {
      case Kind::Fin:
        return std::to_string(n_);
      case Kind::Aleph0:
        return "aleph0";
      case Kind::AtLeastAleph1:
        return name_.empty() ? "aleph1+" : name_;
    }
    return "";
  }

 private:
  SymCard(Kind k, Nat n, std::string name)
      : kind_(k), n_(n), name_(std::move(name)) {}
  static int rank(Kind k) {
    switch (k) {
      case Kind::Fin: return 0;
      case Kind::Aleph0: return 1;
      case Kind::AtLeastAleph1: return 2;
    }
    return 0;
  }

  Kind kind_;
  Nat n_;
  std::string name_;
};

/// Parses "aleph0", "(fin n)" style atoms, or a bare name treated as a
/// declared cardinal at least ℵ1.
SymCard parseSymCard(const std::string& word);

}  // namespace ballean
