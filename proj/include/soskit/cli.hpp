#pragma once

#include <CLI11.hpp>
#include <json.hpp>

#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "soskit/certificate_io.hpp"
#include "soskit/constructions.hpp"
#include "soskit/error.hpp"
#include "soskit/form_io.hpp"
#include "soskit/moment.hpp"
#include "soskit/suite.hpp"
#include "soskit/sos_solver.hpp"

// Command-line front end. Every command prints line-oriented records, either
// `key=value` pairs or one JSON object per line with --json-lines.

namespace soskit::cli {

namespace exit_code {
inline constexpr int member = 0;
inline constexpr int not_member = 1;
inline constexpr int undecided = 2;
inline constexpr int usage = 10;
inline constexpr int k_out_of_range = 11;
inline constexpr int explosion = 12;
}  // namespace exit_code

inline int exit_for(Errc c) {
  switch (c) {
    case Errc::KOutOfRange: return exit_code::k_out_of_range;
    case Errc::SupportExplosion:
    case Errc::SubsetExplosion: return exit_code::explosion;
    default: return exit_code::usage;
  }
}

struct RunConfig {
  std::string input;
  std::string second_input;
  std::string out;
  int k = 1;
  double tol = 1e-9;
  int max_iters = 50000;
  std::uint64_t seed = 0;
  double rho = 1.0;
  double cap = 1e6;
  bool no_prune = false;
  bool force = false;
  bool json_lines = false;

  SolverOptions solver() const {
    SolverOptions o;
    o.tol_primal = o.tol_dual = tol;
    o.max_iters = max_iters;
    o.seed = seed;
    o.rho = rho;
    o.support_cap = cap;
    o.prune = !no_prune;
    return o;
  }

  DualOptions dual() const {
    DualOptions o;
    o.cap = static_cast<std::uint64_t>(cap);
    o.force = force;
    return o;
  }
};

/// One output record; values are kept in insertion order.
class Record {
 public:
  Record& add(std::string key, std::string value) {
    fields_.emplace_back(std::move(key), std::move(value));
    return *this;
  }
  Record& add(std::string key, long long value) { return add(std::move(key), std::to_string(value)); }
  Record& add(std::string key, double value) {
    std::ostringstream s;
    s << std::setprecision(6) << value;
    return add(std::move(key), s.str());
  }

  std::string render(bool json) const {
    if (json) {
      nlohmann::ordered_json j = nlohmann::ordered_json::object();
      for (const auto& [k, v] : fields_) j[k] = v;
      return j.dump();
    }
    std::string line;
    for (const auto& [k, v] : fields_) {
      if (!line.empty()) line += ' ';
      line += k + '=' + quote(v);
    }
    return line;
  }

 private:
  static std::string quote(const std::string& v) {
    if (!v.empty() && v.find_first_of(" \t\"\\=") == std::string::npos) return v;
    std::string q = "\"";
    for (char c : v) {
      if (c == '"' || c == '\\') q += '\\';
      q += c;
    }
    return q + '"';
  }

  std::vector<std::pair<std::string, std::string>> fields_;
};

inline std::string join_support(const std::vector<MultiIndex>& s) {
  std::string out;
  for (const auto& i : s) out += (out.empty() ? "" : ";") + to_string(i);
  return out;
}

inline std::string join_rationals(const std::vector<Rational>& v) {
  std::string out;
  for (const auto& r : v) out += (out.empty() ? "" : ",") + to_string(r);
  return out;
}

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) parts.push_back(item);
  return parts;
}

inline int parse_int(const std::string& s) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(Errc::BadParams, "not an integer: '" + s + "'");
}

inline std::vector<int> parse_ints(const std::string& s) {
  std::vector<int> v;
  for (const auto& t : split(s, ',')) v.push_back(parse_int(t));
  if (v.empty()) throw Error(Errc::BadParams, "empty integer list");
  return v;
}

inline Rational parse_param(const std::string& s) {
  auto r = parse_rational(s);
  if (!r) throw Error(Errc::BadParams, "not a rational: '" + s + "'");
  return *r;
}

inline void emit(std::ostream& out, const RunConfig& cfg, const Record& r) {
  out << r.render(cfg.json_lines) << '\n';
}

inline Form read_input(const std::string& path) {
  if (path.empty()) throw Error(Errc::Io, "missing input file");
  return read_form_file(path);
}

}  // namespace detail

inline int cmd_check(const RunConfig& cfg, std::ostream& out) {
  const Form p = detail::read_input(cfg.input);
  const MembershipVerdict v = membership(p, cfg.k, cfg.solver());
  Record r;
  r.add("command", "check").add("status", to_string(v.status)).add("k", static_cast<long long>(cfg.k));
  std::string artifact = "none";
  if (v.certificate) {
    r.add("terms", static_cast<long long>(v.certificate->terms.size()));
    if (!cfg.out.empty()) {
      write_text_file(cfg.out, format_certificate(*v.certificate));
      artifact = cfg.out;
    }
  } else if (v.witness) {
    r.add("pairing", to_string(v.witness->pairing));
    if (!cfg.out.empty()) {
      write_text_file(cfg.out, format_witness(*v.witness));
      artifact = cfg.out;
    }
  }
  r.add("artifact", artifact)
      .add("iterations", static_cast<long long>(v.iterations))
      .add("primal_residual", v.primal_residual)
      .add("dual_residual", v.dual_residual);
  detail::emit(out, cfg, r);
  switch (v.status) {
    case MembershipStatus::Member: return exit_code::member;
    case MembershipStatus::NotMember: return exit_code::not_member;
    case MembershipStatus::Undecided: break;
  }
  return exit_code::undecided;
}

inline int cmd_dual_check(const RunConfig& cfg, std::ostream& out) {
  const Form p = detail::read_input(cfg.input);
  const DualVerdict v = dual_membership(p, cfg.k, cfg.dual());
  Record r;
  r.add("command", "dual-check").add("status", v.member ? "MEMBER" : "NOT_MEMBER").add("k", static_cast<long long>(cfg.k));
  if (v.violating_support) {
    r.add("support", join_support(*v.violating_support)).add("vector", join_rationals(*v.violating_vector));
  }
  std::string artifact = "none";
  if (!cfg.out.empty()) {
    write_text_file(cfg.out, r.render(false) + '\n');
    artifact = cfg.out;
  }
  r.add("artifact", artifact);
  detail::emit(out, cfg, r);
  return v.member ? exit_code::member : exit_code::not_member;
}

inline int cmd_gram(const RunConfig& cfg, std::ostream& out) {
  const Form p = detail::read_input(cfg.input);
  const MomentMatrix m = moment_matrix(p);
  std::vector<Record> records;
  records.emplace_back()
      .add("command", "gram")
      .add("size", static_cast<long long>(m.size()))
      .add("basis", join_support(m.basis));
  for (std::size_t i = 0; i < m.size(); ++i)
    records.emplace_back().add("row", static_cast<long long>(i)).add("values", join_rationals(m.entries[i]));
  if (!cfg.out.empty()) {
    std::string text;
    for (const auto& r : records) text += r.render(cfg.json_lines) + '\n';
    write_text_file(cfg.out, text);
  }
  for (const auto& r : records) detail::emit(out, cfg, r);
  return 0;
}

inline int cmd_pair(const RunConfig& cfg, std::ostream& out) {
  const Form p = detail::read_input(cfg.input);
  const Form h = detail::read_input(cfg.second_input);
  Record r;
  r.add("command", "pair").add("value", to_string(pair_with_square(p, h)));
  detail::emit(out, cfg, r);
  return 0;
}

struct ConstructParams {
  std::string name;
  std::string a, lambdas, alphas, input;
  std::vector<std::string> terms;
  std::string r, s, t, lambda, radius = "1/100";
  int d = 0, k = 0, n = 0, which = 1, power = 0, eps1 = 1, eps2 = 1;
  bool agiform_scaling = false;
};

inline Form build_construction(const ConstructParams& c) {
  using detail::parse_param;
  auto need = [](bool ok, const char* what) {
    if (!ok) throw Error(Errc::BadParams, what);
  };
  if (c.name == "hurwitz") {
    need(!c.a.empty(), "hurwitz needs --a");
    return hurwitz(detail::parse_ints(c.a));
  }
  if (c.name == "agiform") {
    need(!c.lambdas.empty() && !c.alphas.empty(), "agiform needs --lambdas and --alphas");
    AgiformSpec spec;
    for (const auto& l : detail::split(c.lambdas, ',')) spec.lambdas.push_back(parse_param(l));
    for (const auto& a : detail::split(c.alphas, ';')) spec.alphas.emplace_back(detail::parse_ints(a));
    return agiform(spec);
  }
  if (c.name == "motzkin") return motzkin(!c.agiform_scaling);
  if (c.name == "separator") {
    need(c.d > 0 && c.k > 0, "separator needs --d and --k");
    return binary_separator(c.d, c.k);
  }
  if (c.name == "trinomial") {
    need(c.n > 0 && c.d > 0, "trinomial needs --n and --d");
    return trinomial(c.n, c.d);
  }
  if (c.name == "perturbed-fermat") {
    need(c.n > 0 && c.d > 0, "perturbed-fermat needs --n and --d");
    PerturbationSpec spec;
    spec.s = parse_param(c.radius);
    for (const auto& term : c.terms) {
      const auto parts = detail::split(term, ':');
      need(parts.size() == 2, "--term expects eps:e1,e2,...");
      spec.terms.push_back({parse_param(parts[0]), MultiIndex(detail::parse_ints(parts[1]))});
    }
    return perturbed_fermat(c.n, c.d, spec);
  }
  if (c.name == "dual-example") {
    need(c.which == 1 || c.which == 2, "dual-example --which must be 1 or 2");
    return dual_example(c.which);
  }
  if (c.name == "extremal") {
    need(!c.r.empty() && !c.s.empty() && !c.t.empty(), "extremal needs --r, --s and --t");
    need((c.eps1 == 1 || c.eps1 == -1) && (c.eps2 == 1 || c.eps2 == -1), "--eps1/--eps2 must be 1 or -1");
    return extremal_generator(parse_param(c.r), parse_param(c.s), parse_param(c.t), c.eps1, c.eps2);
  }
  if (c.name == "thicken") {
    need(!c.input.empty() && !c.lambda.empty(), "thicken needs --input and --lambda");
    return thicken(read_form_file(c.input), parse_param(c.lambda));
  }
  if (c.name == "polya-lift") {
    need(!c.input.empty() && c.power >= 0, "polya-lift needs --input and --power >= 0");
    return polya_lift(read_form_file(c.input), c.power);
  }
  throw Error(Errc::BadParams, "unknown construction '" + c.name + "'");
}

inline int cmd_construct(const RunConfig& cfg, const ConstructParams& c, std::ostream& out) {
  const Form p = build_construction(c);
  if (cfg.out.empty()) {
    out << format_form(p);
    return 0;
  }
  write_text_file(cfg.out, format_form(p));
  Record r;
  r.add("command", "construct").add("name", c.name).add("terms", static_cast<long long>(p.term_count()));
  r.add("artifact", cfg.out);
  detail::emit(out, cfg, r);
  return 0;
}

inline int cmd_verify_paper(const RunConfig& cfg, const std::string& only, std::ostream& out) {
  int failed = 0, total = 0;
  suite::run_suite(only, cfg.seed, cfg.solver(), [&](const suite::CriterionResult& res) {
    ++total;
    failed += !res.passed;
    Record r;
    r.add("criterion", static_cast<long long>(res.id))
        .add("status", res.passed ? "PASS" : "FAIL")
        .add("group", res.group)
        .add("seconds", res.seconds)
        .add("title", res.title)
        .add("detail", res.detail);
    detail::emit(out, cfg, r);
    out.flush();
  });
  Record summary;
  summary.add("command", "verify-paper")
      .add("passed", static_cast<long long>(total - failed))
      .add("failed", static_cast<long long>(failed));
  detail::emit(out, cfg, summary);
  if (total == 0) return exit_code::usage;
  return failed == 0 ? 0 : 1;
}

/// Parses arguments, runs one subcommand and returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse sum-of-squares cones: membership, duals and constructions", "soskit"};
  app.require_subcommand(1);
  RunConfig cfg;
  ConstructParams con;
  std::string only;

  auto common = [&](CLI::App* sub, bool solver) {
    sub->add_flag("--json-lines", cfg.json_lines, "Emit JSON objects instead of key=value records");
    sub->add_option("--out", cfg.out, "Write the artifact to this path");
    sub->add_option("--seed", cfg.seed, "Seed for randomized steps");
    if (!solver) return;
    sub->add_option("--k", cfg.k, "Maximal number of terms per square");
    sub->add_option("--tol", cfg.tol, "Primal and dual residual tolerance");
    sub->add_option("--max-iters", cfg.max_iters, "Iteration limit of the splitting solver");
    sub->add_option("--rho", cfg.rho, "Splitting penalty parameter");
    sub->add_option("--cap", cfg.cap, "Limit on enumerated supports or submatrices");
    sub->add_flag("--no-prune", cfg.no_prune, "Keep the full Gram basis");
    sub->add_flag("--force", cfg.force, "Ignore the submatrix cap");
  };

  auto* check = app.add_subcommand("check", "Decide membership in the k-sparse sos cone");
  check->add_option("file", cfg.input, "Form file")->required();
  common(check, true);
  auto* dual = app.add_subcommand("dual-check", "Decide membership in the dual cone");
  dual->add_option("file", cfg.input, "Form file")->required();
  common(dual, true);
  auto* gram = app.add_subcommand("gram", "Print the moment matrix M_p");
  gram->add_option("file", cfg.input, "Form file")->required();
  common(gram, false);
  auto* pair = app.add_subcommand("pair", "Print the pairing [p, h^2]");
  pair->add_option("form", cfg.input, "Form file for p")->required();
  pair->add_option("square", cfg.second_input, "Form file for h")->required();
  common(pair, false);

  auto* construct = app.add_subcommand("construct", "Write a named construction as a form file");
  construct->add_option("name", con.name, "Construction name")->required();
  construct->add_option("--a", con.a, "hurwitz exponents, e.g. 2,1,1");
  construct->add_option("--lambdas", con.lambdas, "agiform weights, comma separated");
  construct->add_option("--alphas", con.alphas, "agiform exponents, e.g. 4,2,0;2,4,0;0,0,6");
  construct->add_option("--d", con.d, "Degree");
  construct->add_option("--k", con.k, "Number of terms of the separator");
  construct->add_option("--n", con.n, "Number of variables");
  construct->add_option("--which", con.which, "dual-example index (1 or 2)");
  construct->add_option("--r", con.r, "extremal parameter r");
  construct->add_option("--s", con.s, "extremal parameter s");
  construct->add_option("--t", con.t, "extremal parameter t");
  construct->add_option("--eps1", con.eps1, "extremal sign eps1");
  construct->add_option("--eps2", con.eps2, "extremal sign eps2");
  construct->add_option("--input", con.input, "Input form for thicken and polya-lift");
  construct->add_option("--lambda", con.lambda, "thicken weight");
  construct->add_option("--power", con.power, "polya-lift exponent r");
  construct->add_option("--term", con.terms, "perturbed-fermat term eps:e1,...,en (repeatable)");
  construct->add_option("--radius", con.radius, "perturbed-fermat bound on |eps|");
  construct->add_flag("--agiform-scaling", con.agiform_scaling, "motzkin with equal agiform weights");
  common(construct, false);

  auto* verify = app.add_subcommand("verify-paper", "Run the built-in example and property suite");
  verify->add_option("--only", only, "Group name or comma-separated criterion ids");
  common(verify, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::usage;
  }

  try {
    if (check->parsed()) return cmd_check(cfg, out);
    if (dual->parsed()) return cmd_dual_check(cfg, out);
    if (gram->parsed()) return cmd_gram(cfg, out);
    if (pair->parsed()) return cmd_pair(cfg, out);
    if (construct->parsed()) return cmd_construct(cfg, con, out);
    if (verify->parsed()) return cmd_verify_paper(cfg, only, out);
  } catch (const Error& e) {
    err << "error: " << errc_name(e.code()) << ": " << e.what() << '\n';
    return exit_for(e.code());
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::usage;
  }
  return exit_code::usage;
}

}  // namespace soskit::cli
