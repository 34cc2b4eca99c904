#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "soskit/certificate_io.hpp"
#include "soskit/constructions.hpp"
#include "soskit/form_io.hpp"

using namespace soskit;

namespace {

Errc parse_error_code(const std::string& text) {
  try {
    parse_form(text);
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::ZeroForm;
}

}  // namespace

TEST(FormIo, ParsesCommentsAndDuplicates) {
  const Form p = parse_form(
      "# p1 twice\n"
      "form n=2 d=4\n"
      "1 4 0   # x^4\n"
      "-2 3 1\n"
      "-2 3 1\n");
  EXPECT_EQ(p, dual_example(1));
}

TEST(FormIo, CanonicalOutput) {
  const Form p = parse_form("form n=2 d=4\n-8/2 3 1\n1 4 0\n");
  EXPECT_EQ(format_form(p), "form n=2 d=4\n1 4 0\n-4 3 1\n");
  EXPECT_EQ(pretty(p), "x1^4 - 4*x1^3*x2");
  EXPECT_EQ(format_form(Form(3, 2)), "form n=3 d=2\n");
}

TEST(FormIo, Errors) {
  EXPECT_EQ(parse_error_code(""), Errc::ParseError);
  EXPECT_EQ(parse_error_code("form n=2\n"), Errc::ParseError);
  EXPECT_EQ(parse_error_code("form n=2 d=4\n1 4\n"), Errc::ParseError);
  EXPECT_EQ(parse_error_code("form n=2 d=4\n1 3 0\n"), Errc::DegreeMismatch);
  EXPECT_EQ(parse_error_code("form n=2 d=4\n1/0 4 0\n"), Errc::ParseError);
  EXPECT_EQ(parse_error_code("form n=2 d=4\n1 4 0\njunk\n"), Errc::ParseError);
  EXPECT_THROW(read_form_file("/nonexistent/p.form"), Error);
}

TEST(CertificateIo, RoundTrip) {
  const Form h1 = parse_form("form n=2 d=2\n1 2 0\n1 1 1\n");
  const Form h2 = parse_form("form n=2 d=2\n1 0 2\n");
  const SosCertificate cert{2, {{make_rational(3, 2), h1}, {1, h2}}, true};
  std::istringstream in(format_certificate(cert));
  const SosCertificate back = parse_certificate(in);
  EXPECT_EQ(back.k, 2);
  ASSERT_EQ(back.terms.size(), 2u);
  EXPECT_EQ(back.terms[0].weight, make_rational(3, 2));
  EXPECT_EQ(back.terms[0].h, h1);
  EXPECT_EQ(back.terms[1].weight, 1);
  EXPECT_EQ(back.terms[1].h, h2);
}

TEST(CertificateIo, WitnessRoundTrip) {
  const DualWitness w{parse_form("form n=2 d=4\n-1 3 1\n"), make_rational(-1, 2), 1};
  std::istringstream in(format_witness(w));
  const DualWitness back = parse_witness(in);
  EXPECT_EQ(back.q, w.q);
  EXPECT_EQ(back.pairing, w.pairing);
  EXPECT_EQ(back.k, 1);
}

TEST(CertificateIo, RejectsMalformed) {
  std::istringstream no_header("form n=2 d=2\n1 2 0\n");
  EXPECT_THROW(parse_certificate(no_header), Error);
  std::istringstream no_pairing("witness k=1\nform n=2 d=4\n-1 3 1\n");
  EXPECT_THROW(parse_witness(no_pairing), Error);
  EXPECT_THROW(write_text_file("/nonexistent/dir/x", "x"), Error);
}

TEST(CertificateIo, WritesFile) {
  const auto path = std::filesystem::temp_directory_path() / "soskit_io_test.form";
  write_text_file(path.string(), format_form(motzkin()));
  EXPECT_EQ(read_form_file(path.string()), motzkin());
  std::filesystem::remove(path);
}
