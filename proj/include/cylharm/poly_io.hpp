#pragma once

// Polynomial text format:
//
//   # comment
//   dim 3
//   1/2 2 0 0      <- coefficient, then one exponent per variable
//   -1 0 0 0
//
// Duplicate exponent vectors are summed on load. The writer emits graded-lex
// order, lowest degree first.

#include "cylharm/polynomial.hpp"

#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace cylharm {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column),
        detail_(what) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& detail() const { return detail_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string detail_;
};

namespace detail {

struct Token {
  std::string text;
  std::size_t column;  // 1-based
};

inline std::vector<Token> tokenize(const std::string& line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    if (i >= line.size() || line[i] == '#') break;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r' && line[i] != '#') ++i;
    out.push_back({line.substr(start, i - start), start + 1});
  }
  return out;
}

}  // namespace detail

inline Polynomial read_polynomial(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  std::optional<Polynomial> poly;
  while (std::getline(in, line)) {
    ++lineno;
    const auto tokens = detail::tokenize(line);
    if (tokens.empty()) continue;
    if (!poly) {
      if (tokens[0].text != "dim") throw ParseError(lineno, tokens[0].column, "expected header 'dim <n>'");
      if (tokens.size() != 2) throw ParseError(lineno, tokens[0].column, "header takes exactly one value");
      const auto& t = tokens[1];
      std::size_t n = 0;
      try {
        std::size_t used = 0;
        const long v = std::stol(t.text, &used);
        if (used != t.text.size() || v < 1) throw std::invalid_argument("");
        n = static_cast<std::size_t>(v);
      } catch (const std::exception&) {
        throw ParseError(lineno, t.column, "dimension must be a positive integer");
      }
      poly.emplace(n);
      continue;
    }
    const std::size_t n = poly->dim();
    if (tokens.size() != n + 1)
      throw ParseError(lineno, tokens[0].column,
                       "expected coefficient and " + std::to_string(n) + " exponents, got " +
                           std::to_string(tokens.size()) + " fields");
    auto coeff = parse_rational(tokens[0].text);
    if (!coeff) throw ParseError(lineno, tokens[0].column, "malformed rational '" + tokens[0].text + "'");
    MultiIndex alpha(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& t = tokens[i + 1];
      bool ok = !t.text.empty() && t.text.size() <= 6;
      for (char ch : t.text) ok = ok && ch >= '0' && ch <= '9';
      if (!ok) throw ParseError(lineno, t.column, "exponent must be a non-negative integer");
      alpha[i] = static_cast<unsigned>(std::stoul(t.text));
    }
    poly->add_term(std::move(alpha), *coeff);
  }
  if (!poly) throw ParseError(lineno + 1, 1, "missing 'dim <n>' header");
  return *std::move(poly);
}

inline Polynomial parse_polynomial(const std::string& text) {
  std::istringstream in(text);
  return read_polynomial(in);
}

inline Polynomial load_polynomial(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open polynomial file '" + path + "'");
  try {
    return read_polynomial(in);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), e.column(), e.detail() + " (in " + path + ")");
  }
}

inline void write_polynomial(std::ostream& out, const Polynomial& f) {
  out << "dim " << f.dim() << '\n';
  for (const auto& [alpha, c] : f.terms()) {
    out << to_string(c);
    for (unsigned e : alpha) out << ' ' << e;
    out << '\n';
  }
}

inline std::string format_polynomial(const Polynomial& f) {
  std::ostringstream out;
  write_polynomial(out, f);
  return out.str();
}

inline void save_polynomial(const std::string& path, const Polynomial& f) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write polynomial file '" + path + "'");
  write_polynomial(out, f);
}

/// Human-oriented rendering, e.g. "1/2*x1^2 - 1/2*x2^2 + 1/2".
inline std::string pretty(const Polynomial& f) {
  if (f.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (auto it = f.terms().rbegin(); it != f.terms().rend(); ++it) {
    const auto& [alpha, c] = *it;
    Rational mag = abs(c);
    out += first ? (c < 0 ? "-" : "") : (c < 0 ? " - " : " + ");
    first = false;
    std::string mono;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      if (alpha[i] == 0) continue;
      if (!mono.empty()) mono += "*";
      mono += "x" + std::to_string(i + 1);
      if (alpha[i] > 1) mono += "^" + std::to_string(alpha[i]);
    }
    if (mono.empty()) out += to_string(mag);
    else if (mag == 1) out += mono;
    else out += to_string(mag) + "*" + mono;
  }
  return out;
}

}  // namespace cylharm
