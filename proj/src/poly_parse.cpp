#include <cctype>
#include <cstdlib>
#include <string>

#include "sdcbf/errors.hpp"
#include "sdcbf/poly.hpp"

namespace sdcbf {

namespace {

struct Parser {
  const std::string& text;
  size_t pos = 0;
  const VarSpacePtr& space;

  Parser(const std::string& t, const VarSpacePtr& s) : text(t), space(s) {}

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  bool peek_is(char c) {
    skip_ws();
    return pos < text.size() && text[pos] == c;
  }

  bool consume(char c) {
    if (peek_is(c)) {
      ++pos;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) {
    throw ParseError("polynomial parse error at position " + std::to_string(pos) + ": " + what +
                     " in '" + text + "'");
  }

  MultiPoly parse_expr() {
    MultiPoly acc = parse_term();
    while (true) {
      if (consume('+'))
        acc = acc + parse_term();
      else if (consume('-'))
        acc = acc - parse_term();
      else
        return acc;
    }
  }

  MultiPoly parse_term() {
    MultiPoly acc = parse_factor();
    while (consume('*')) acc = acc * parse_factor();
    return acc;
  }

  MultiPoly parse_factor() {
    MultiPoly base = parse_atom();
    skip_ws();
    if (consume('^')) {
      skip_ws();
      if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos])))
        fail("expected nonnegative integer exponent after '^'");
      unsigned long e = 0;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
        e = e * 10 + static_cast<unsigned long>(text[pos] - '0');
        if (e > 64) fail("exponent too large");
        ++pos;
      }
      MultiPoly out = MultiPoly::constant(space, 1.0);
      for (unsigned long i = 0; i < e; ++i) out = out * base;
      return out;
    }
    return base;
  }

  MultiPoly parse_atom() {
    skip_ws();
    if (pos >= text.size()) fail("unexpected end of expression");
    char c = text[pos];
    if (c == '(') {
      ++pos;
      MultiPoly inner = parse_expr();
      if (!consume(')')) fail("expected ')'");
      return inner;
    }
    if (c == '-') {
      ++pos;
      return -parse_factor();
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* start = text.c_str() + pos;
      char* end = nullptr;
      double v = std::strtod(start, &end);
      if (end == start) fail("invalid number literal");
      pos += static_cast<size_t>(end - start);
      return MultiPoly::constant(space, v);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos;
      while (pos < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
        ++pos;
      std::string name = text.substr(start, pos - start);
      int idx = space->index_of(name);
      if (idx < 0) fail("unknown variable '" + name + "'");
      return MultiPoly::variable(space, idx);
    }
    fail(std::string("unexpected character '") + c + "'");
  }
};

}  // namespace

MultiPoly parse_poly(const std::string& text, const VarSpacePtr& space) {
  Parser p(text, space);
  MultiPoly out = p.parse_expr();
  p.skip_ws();
  if (p.pos != text.size()) p.fail("trailing input");
  return out;
}

}  // namespace sdcbf
