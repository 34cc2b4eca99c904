#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "soskit/error.hpp"
#include "soskit/form_io.hpp"
#include "soskit/sos_solver.hpp"

// Certificate file:
//
//   cert k=<int>
//   weight <rational>      # optional per summand, default 1
//   form n=<int> d=<int>
//   ...terms...
//
// repeated once per summand; the certified identity is p = sum weight * h^2.
//
// Witness file:
//
//   witness k=<int>
//   form n=<int> d=<int>
//   ...terms...
//   pairing <rational>

namespace soskit {

inline std::string format_certificate(const SosCertificate& cert) {
  std::ostringstream out;
  out << "cert k=" << cert.k << '\n';
  for (const auto& t : cert.terms) {
    if (t.weight != 1) out << "weight " << to_string(t.weight) << '\n';
    out << format_form(t.h);
  }
  return out.str();
}

inline SosCertificate parse_certificate(std::istream& in) {
  const auto lines = io::tokenize(in);
  if (lines.empty() || lines[0].tokens.size() != 2 || lines[0].tokens[0] != "cert")
    throw Error(Errc::ParseError, "expected 'cert k=<int>' header");
  SosCertificate cert;
  cert.k = io::parse_key_int(lines[0].tokens[1], "k", lines[0].number);
  std::size_t pos = 1;
  while (pos < lines.size()) {
    Rational weight = 1;
    if (lines[pos].tokens[0] == "weight") {
      if (lines[pos].tokens.size() != 2)
        throw Error(Errc::ParseError, "line " + std::to_string(lines[pos].number) + ": malformed weight");
      weight = parse_rational_or_throw(lines[pos].tokens[1]);
      ++pos;
    }
    Form h = io::parse_form_block(lines, pos);
    cert.terms.push_back({std::move(weight), std::move(h)});
  }
  return cert;
}

inline std::string format_witness(const DualWitness& w) {
  std::ostringstream out;
  out << "witness k=" << w.k << '\n' << format_form(w.q) << "pairing " << to_string(w.pairing) << '\n';
  return out.str();
}

inline DualWitness parse_witness(std::istream& in) {
  const auto lines = io::tokenize(in);
  if (lines.empty() || lines[0].tokens.size() != 2 || lines[0].tokens[0] != "witness")
    throw Error(Errc::ParseError, "expected 'witness k=<int>' header");
  const int k = io::parse_key_int(lines[0].tokens[1], "k", lines[0].number);
  std::size_t pos = 1;
  Form q = io::parse_form_block(lines, pos);
  if (pos + 1 != lines.size() || lines[pos].tokens.size() != 2 || lines[pos].tokens[0] != "pairing")
    throw Error(Errc::ParseError, "expected a final 'pairing <rational>' line");
  return DualWitness{std::move(q), parse_rational_or_throw(lines[pos].tokens[1]), k};
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::Io, "cannot write " + path);
  out << text;
  if (!out) throw Error(Errc::Io, "failed writing " + path);
}

}  // namespace soskit
