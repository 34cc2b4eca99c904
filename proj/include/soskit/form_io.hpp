#pragma once

#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "soskit/error.hpp"
#include "soskit/form.hpp"

// Text format, one form per block:
//
//   form n=<int> d=<int>
//   <raw coefficient> <e1> ... <en>
//   ...
//
// `#` starts a comment. Duplicate exponent rows are summed.

namespace soskit {

namespace io {

/// Splits a stream into whitespace-trimmed, comment-free, non-empty lines
/// with their 1-based line numbers.
struct Line {
  int number;
  std::vector<std::string> tokens;
};

inline std::vector<Line> tokenize(std::istream& in) {
  std::vector<Line> lines;
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream ss(raw);
    Line line{number, {}};
    for (std::string tok; ss >> tok;) line.tokens.push_back(tok);
    if (!line.tokens.empty()) lines.push_back(std::move(line));
  }
  return lines;
}

inline int parse_key_int(const std::string& token, const std::string& key, int line) {
  const std::string prefix = key + "=";
  if (token.rfind(prefix, 0) != 0)
    throw Error(Errc::ParseError, "line " + std::to_string(line) + ": expected " + prefix + "<int>");
  const std::string value = token.substr(prefix.size());
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != value.size())
    throw Error(Errc::ParseError, "line " + std::to_string(line) + ": bad integer in " + token);
  return v;
}

inline bool is_form_header(const Line& line) { return line.tokens.front() == "form"; }

/// Parses one form block starting at lines[pos]; advances pos past the
/// block. The block ends at the end of input or the first line that is not
/// a term row.
inline Form parse_form_block(const std::vector<Line>& lines, std::size_t& pos) {
  if (pos >= lines.size() || !is_form_header(lines[pos]))
    throw Error(Errc::ParseError, "expected 'form n=<int> d=<int>' header");
  const Line& header = lines[pos];
  if (header.tokens.size() != 3)
    throw Error(Errc::ParseError, "line " + std::to_string(header.number) + ": malformed form header");
  const int n = parse_key_int(header.tokens[1], "n", header.number);
  const int d = parse_key_int(header.tokens[2], "d", header.number);
  if (n < 1 || d < 0)
    throw Error(Errc::ParseError, "line " + std::to_string(header.number) + ": need n >= 1 and d >= 0");
  Form p(n, d);
  ++pos;
  for (; pos < lines.size(); ++pos) {
    const Line& line = lines[pos];
    auto coeff = parse_rational(line.tokens.front());
    if (!coeff) break;  // next block or trailer
    if (line.tokens.size() != static_cast<std::size_t>(n) + 1)
      throw Error(Errc::ParseError, "line " + std::to_string(line.number) + ": expected coefficient and " +
                                        std::to_string(n) + " exponents");
    std::vector<int> e;
    for (std::size_t k = 1; k < line.tokens.size(); ++k) {
      const std::string& tok = line.tokens[k];
      if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
        throw Error(Errc::ParseError, "line " + std::to_string(line.number) + ": bad exponent '" + tok + "'");
      e.push_back(std::stoi(tok));
    }
    MultiIndex i(std::move(e));
    if (i.degree() != d)
      throw Error(Errc::DegreeMismatch, "line " + std::to_string(line.number) + ": term degree " +
                                            std::to_string(i.degree()) + " != " + std::to_string(d));
    p.add_raw(i, *coeff);
  }
  return p;
}

}  // namespace io

inline Form parse_form(std::istream& in) {
  auto lines = io::tokenize(in);
  std::size_t pos = 0;
  Form p = io::parse_form_block(lines, pos);
  if (pos != lines.size())
    throw Error(Errc::ParseError, "line " + std::to_string(lines[pos].number) + ": unexpected content after form");
  return p;
}

inline Form parse_form(const std::string& text) {
  std::istringstream in(text);
  return parse_form(in);
}

inline Form read_form_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open " + path);
  return parse_form(in);
}

/// Canonical serialization: terms in canonical order, reduced raw
/// coefficients.
inline std::string format_form(const Form& p) {
  std::ostringstream out;
  out << "form n=" << p.arity() << " d=" << p.degree() << '\n';
  for (const auto& [i, a] : p.coefficients()) {
    out << to_string(Rational(a * multinomial(i)));
    for (int e : i.exponents()) out << ' ' << e;
    out << '\n';
  }
  return out.str();
}

/// Human-readable polynomial, e.g. `x1^4 - 4*x1^3*x2`.
inline std::string pretty(const Form& p) {
  if (p.is_zero()) return "0";
  std::string s;
  bool first = true;
  for (const auto& [i, a] : p.coefficients()) {
    Rational raw = a * multinomial(i);
    const bool negative = raw < 0;
    if (negative) raw = -raw;
    s += first ? (negative ? "-" : "") : (negative ? " - " : " + ");
    first = false;
    std::string mono;
    for (std::size_t k = 0; k < i.arity(); ++k) {
      if (i[k] == 0) continue;
      if (!mono.empty()) mono += '*';
      mono += "x" + std::to_string(k + 1);
      if (i[k] > 1) mono += "^" + std::to_string(i[k]);
    }
    if (mono.empty()) {
      s += to_string(raw);
    } else {
      if (raw != 1) s += to_string(raw) + "*";
      s += mono;
    }
  }
  return s;
}

}  // namespace soskit
