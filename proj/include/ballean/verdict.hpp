#pragma once

#include <string>

#include "ballean/common.hpp"

namespace ballean {

enum class Truth { True, False, Unknown };

inline const char* truthName(Truth t) {
  switch (t) {
    case Truth::True: return "TRUE";
    case Truth::False: return "FALSE";
    default: return "UNKNOWN";
  }
}

/// Three-valued answer. False verdicts for universal properties carry a
/// concrete counterexample (rendered); Unknown records the horizon that was
/// exhausted. Only operations documented as semi-decisions produce Unknown.
class Verdict {
 public:
  Verdict() : value_(Truth::Unknown) {}

  static Verdict yes(std::string note = "") {
    Verdict v;
    v.value_ = Truth::True;
    v.note_ = std::move(note);
    return v;
  }
  static Verdict no(std::string witness, std::string note = "") {
    Verdict v;
    v.value_ = Truth::False;
    v.witness_ = std::move(witness);
    v.note_ = std::move(note);
    return v;
  }
  static Verdict unknown(Nat horizon, std::string note = "") {
    Verdict v;
    v.value_ = Truth::Unknown;
    v.horizon_ = horizon;
    v.note_ = std::move(note);
    return v;
  }

  Truth value() const { return value_; }
  bool isTrue() const { return value_ == Truth::True; }
  bool isFalse() const { return value_ == Truth::False; }
  bool isUnknown() const { return value_ == Truth::Unknown; }
  const std::string& witness() const { return witness_; }
  const std::string& note() const { return note_; }
  Nat horizon() const { return horizon_; }

  Verdict withNote(std::string note) const {
    Verdict v = *this;
    v.note_ = std::move(note);
    return v;
  }

  std::string render() const {
    std::string out = truthName(value_);
    if (isFalse() && !witness_.empty()) out += " witness=" + witness_;
    if (isUnknown() && horizon_ > 0) out += " horizon=" + std::to_string(horizon_);
    if (!note_.empty()) out += " [" + note_ + "]";
    return out;
  }

 private:
  Truth value_;
  std::string witness_;
  std::string note_;
  Nat horizon_ = 0;
};

}  // namespace ballean
