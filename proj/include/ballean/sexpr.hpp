#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace ballean {

/// Position-annotated parse failure for instance documents.
struct ParseError : std::runtime_error {
  ParseError(std::string msg, int line, int col)
      : std::runtime_error(msg + " at " + std::to_string(line) + ":" +
                           std::to_string(col)),
        line(line),
        col(col) {}
  int line;
  int col;
};

/// Node-labeled tree: atoms are symbols or integers, everything else is a
/// parenthesized list. Comments run from ';' to end of line.
class Sexpr {
 public:
  enum class Kind { Symbol, Integer, List };

  static Sexpr symbol(std::string s) {
    Sexpr e;
    e.kind_ = Kind::Symbol;
    e.sym_ = std::move(s);
    return e;
  }
  static Sexpr integer(std::int64_t v) {
    Sexpr e;
    e.kind_ = Kind::Integer;
    e.int_ = v;
    return e;
  }
  static Sexpr list(std::vector<Sexpr> items) {
    Sexpr e;
    e.kind_ = Kind::List;
    e.items_ = std::move(items);
    return e;
  }

  Kind kind() const { return kind_; }
  bool isSymbol() const { return kind_ == Kind::Symbol; }
  bool isSymbol(const std::string& s) const {
    return kind_ == Kind::Symbol && sym_ == s;
  }
  bool isInteger() const { return kind_ == Kind::Integer; }
  bool isList() const { return kind_ == Kind::List; }

  const std::string& sym() const { return sym_; }
  std::int64_t integerValue() const { return int_; }
  const std::vector<Sexpr>& items() const { return items_; }

  /// Head symbol of a list form, or empty string.
  std::string head() const {
    if (isList() && !items_.empty() && items_[0].isSymbol()) return items_[0].sym();
    return "";
  }

  int line = 0;
  int col = 0;

  std::string render() const;

  /// Parses a whole document (sequence of forms).
  static std::vector<Sexpr> parseAll(const std::string& text);

 private:
  Kind kind_ = Kind::List;
  std::string sym_;
  std::int64_t int_ = 0;
  std::vector<Sexpr> items_;
};

}  // namespace ballean
