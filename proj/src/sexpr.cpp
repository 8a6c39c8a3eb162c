#include "ballean/sexpr.hpp"

#include <cctype>

namespace ballean {

namespace {

struct Cursor {
  const std::string& text;
  std::size_t pos = 0;
  int line = 1;
  int col = 1;

  bool done() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }
  char next() {
    const char c = text[pos++];
    if (c == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    return c;
  }
  void skipSpace() {
    while (!done()) {
      const char c = peek();
      if (c == ';') {
        while (!done() && peek() != '\n') next();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        next();
      } else {
        break;
      }
    }
  }
};

bool atomChar(char c) {
  return !std::isspace(static_cast<unsigned char>(c)) && c != '(' && c != ')' &&
         c != ';';
}

Sexpr parseOne(Cursor& cur);

Sexpr parseList(Cursor& cur) {
  const int line = cur.line;
  const int col = cur.col;
  cur.next();  // consume '('
  std::vector<Sexpr> items;
  for (;;) {
    cur.skipSpace();
    if (cur.done()) throw ParseError("unterminated list", line, col);
    if (cur.peek() == ')') {
      cur.next();
      break;
    }
    items.push_back(parseOne(cur));
  }
  Sexpr e = Sexpr::list(std::move(items));
  e.line = line;
  e.col = col;
  return e;
}

Sexpr parseAtom(Cursor& cur) {
  const int line = cur.line;
  const int col = cur.col;
  std::string word;
  while (!cur.done() && atomChar(cur.peek())) word.push_back(cur.next());
  if (word.empty()) throw ParseError("empty atom", line, col);
  const bool numeric =
      (word.size() > (word[0] == '-' ? 1u : 0u)) &&
      word.find_first_not_of("0123456789", word[0] == '-' ? 1 : 0) ==
          std::string::npos;
  Sexpr e = numeric ? Sexpr::integer(std::stoll(word)) : Sexpr::symbol(word);
  e.line = line;
  e.col = col;
  return e;
}

Sexpr parseOne(Cursor& cur) {
  cur.skipSpace();
  if (cur.done()) throw ParseError("unexpected end of input", cur.line, cur.col);
  if (cur.peek() == ')') throw ParseError("unexpected ')'", cur.line, cur.col);
  if (cur.peek() == '(') return parseList(cur);
  return parseAtom(cur);
}

}  // namespace

std::vector<Sexpr> Sexpr::parseAll(const std::string& text) {
  Cursor cur{text};
  std::vector<Sexpr> forms;
  for (;;) {
    cur.skipSpace();
    if (cur.done()) break;
    forms.push_back(parseOne(cur));
  }
  return forms;
}

std::string Sexpr::render() const {
  switch (kind_) {
    case Kind::Symbol:
      return sym_;
    case Kind::Integer:
      return std::to_string(int_);
    case Kind::List: {
      std::string out = "(";
      for (std::size_t i = 0; i < items_.size(); ++i) {
        if (i) out += ' ';
        out += items_[i].render();
      }
      out += ')';
      return out;
    }
  }
  return "";
}

}  // namespace ballean
