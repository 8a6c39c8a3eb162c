#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ballean {

using Nat = std::uint64_t;

struct GroundMismatchError : std::runtime_error {
  explicit GroundMismatchError(const std::string& what) : std::runtime_error(what) {}
};
struct EncodingError : std::runtime_error {
  explicit EncodingError(const std::string& what) : std::runtime_error(what) {}
};
struct UnsupportedPresentationError : std::runtime_error {
  explicit UnsupportedPresentationError(const std::string& what) : std::runtime_error(what) {}
};
struct PreconditionError : std::runtime_error {
  explicit PreconditionError(const std::string& what) : std::runtime_error(what) {}
};
struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

/// Evaluation budget for semi-decisions. All sweeps, caps and stability
/// windows derive from the horizon so that a single flag reproduces a run.
struct Budget {
  Nat horizon = 4096;

  std::size_t radiusCap() const {
    return static_cast<std::size_t>(std::clamp<Nat>(horizon / 256, 4, 64));
  }
  std::size_t indexCap() const { return radiusCap(); }
  std::size_t searchCap() const { return radiusCap() * 4; }
  Nat scanCap() const { return horizon * 4 + 64; }

  Budget withHorizon(Nat h) const {
    Budget b = *this;
    b.horizon = h;
    return b;
  }
};

/// Exact rational in lowest terms; the value type for slowly oscillating
/// functions and epsilon thresholds.
class Rational {
 public:
  Rational() : num_(0), den_(1) {}
  Rational(std::int64_t n) : num_(n), den_(1) {}
  Rational(std::int64_t n, std::int64_t d) : num_(n), den_(d) { normalize(); }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  friend Rational operator+(Rational a, Rational b) {
    return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }
  friend Rational operator-(Rational a, Rational b) {
    return Rational(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
  }
  friend Rational operator*(Rational a, Rational b) {
    return Rational(a.num_ * b.num_, a.den_ * b.den_);
  }
  friend Rational operator/(Rational a, Rational b) {
    if (b.num_ == 0) throw DomainError("rational division by zero");
    return Rational(a.num_ * b.den_, a.den_ * b.num_);
  }
  friend bool operator==(Rational a, Rational b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(Rational a, Rational b) { return !(a == b); }
  friend bool operator<(Rational a, Rational b) {
    return a.num_ * b.den_ < b.num_ * a.den_;
  }
  friend bool operator<=(Rational a, Rational b) { return a < b || a == b; }
  friend bool operator>(Rational a, Rational b) { return b < a; }
  friend bool operator>=(Rational a, Rational b) { return b <= a; }

  std::string str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

  /// Parses "p/q" or "p"; throws DomainError on malformed input.
  static Rational parse(const std::string& text);

 private:
  void normalize() {
    if (den_ == 0) throw DomainError("rational with zero denominator");
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    const std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  std::int64_t num_;
  std::int64_t den_;
};

inline Rational Rational::parse(const std::string& text) {
  const auto slash = text.find('/');
  try {
    if (slash == std::string::npos) return Rational(std::stoll(text));
    return Rational(std::stoll(text.substr(0, slash)),
                    std::stoll(text.substr(slash + 1)));
  } catch (const std::exception&) {
    throw DomainError("malformed rational: " + text);
  }
}

}  // namespace ballean
