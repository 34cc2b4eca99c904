#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "soskit/certificate_io.hpp"
#include "soskit/cli.hpp"
#include "soskit/constructions.hpp"

using namespace soskit;

namespace {

const std::string samples = SOSKIT_SAMPLES_DIR;

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "soskit");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("soskit_cli_test_" + name)).string();
}

std::string sample(const std::string& name) { return samples + "/" + name; }

}  // namespace

TEST(Cli, CheckMemberWritesCertificate) {
  const std::string path = temp_path("cert.txt");
  const CliRun r = run({"check", sample("square.form"), "--k", "2", "--out", path});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("status=MEMBER"), std::string::npos);
  EXPECT_NE(r.out.find("k=2"), std::string::npos);
  EXPECT_NE(r.out.find("artifact=" + path), std::string::npos);
  std::ifstream in(path);
  const SosCertificate cert = parse_certificate(in);
  EXPECT_TRUE(verify_certificate(read_form_file(sample("square.form")), cert, 2));
  std::filesystem::remove(path);
}

TEST(Cli, CheckNonMemberWritesWitness) {
  const std::string path = temp_path("witness.txt");
  const CliRun r = run({"check", sample("square.form"), "--k", "1", "--out", path});
  EXPECT_EQ(r.code, 1) << r.err;
  EXPECT_NE(r.out.find("status=NOT_MEMBER"), std::string::npos);
  std::ifstream in(path);
  const DualWitness w = parse_witness(in);
  EXPECT_TRUE(verify_witness(read_form_file(sample("square.form")), w));
  std::filesystem::remove(path);
}

TEST(Cli, CheckErrors) {
  EXPECT_EQ(run({"check", sample("square.form"), "--k", "0"}).code, 11);
  EXPECT_EQ(run({"check", sample("square.form"), "--k", "-1"}).code, 11);
  EXPECT_EQ(run({"check", sample("square.form"), "--k", "9"}).code, 0);
  EXPECT_EQ(run({"check", "/nonexistent.form", "--k", "1"}).code, 10);
  EXPECT_EQ(run({"check", sample("motzkin.form"), "--k", "3", "--cap", "2"}).code, 12);
  EXPECT_EQ(run({"check"}).code, 10);
  EXPECT_EQ(run({"bogus"}).code, 10);
  const std::string bad = temp_path("bad.form");
  write_text_file(bad, "form n=2 d=4\n1 3 0\n");
  EXPECT_EQ(run({"check", bad, "--k", "1"}).code, 10);
  std::filesystem::remove(bad);
}

TEST(Cli, CheckUndecidedOnTinyBudget) {
  const CliRun r = run({"check", sample("hurwitz211.form"), "--k", "2", "--max-iters", "1"});
  EXPECT_TRUE(r.code == 0 || r.code == 2) << r.out;
}

TEST(Cli, DualCheck) {
  EXPECT_EQ(run({"dual-check", sample("p1.form"), "--k", "1"}).code, 0);
  const CliRun r = run({"dual-check", sample("p1.form"), "--k", "2"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("support=(2,0);(1,1)"), std::string::npos) << r.out;
  EXPECT_EQ(run({"dual-check", sample("p2.form"), "--k", "2"}).code, 0);
  EXPECT_EQ(run({"dual-check", sample("p2.form"), "--k", "3"}).code, 1);
  EXPECT_EQ(run({"dual-check", sample("p2.form"), "--k", "4"}).code, 1);
  EXPECT_EQ(run({"dual-check", sample("p2.form"), "--k", "0"}).code, 11);
  EXPECT_EQ(run({"dual-check", sample("motzkin.form"), "--k", "5", "--cap", "10"}).code, 12);
  EXPECT_EQ(run({"dual-check", sample("motzkin.form"), "--k", "5", "--cap", "10", "--force"}).code, 1);
}

TEST(Cli, JsonLines) {
  const CliRun r = run({"dual-check", sample("p1.form"), "--k", "2", "--json-lines"});
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["status"], "NOT_MEMBER");
  EXPECT_EQ(j["k"], "2");
  EXPECT_EQ(j["support"], "(2,0);(1,1)");
  EXPECT_EQ(j["artifact"], "none");
}

TEST(Cli, Gram) {
  const CliRun r = run({"gram", sample("p2.form")});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("basis=(2,0);(1,1);(0,2)"), std::string::npos);
  EXPECT_NE(r.out.find("row=0 values=4,-2,1"), std::string::npos);
  EXPECT_NE(r.out.find("row=2 values=1,-2,4"), std::string::npos);
}

TEST(Cli, Pair) {
  const CliRun r = run({"pair", sample("p1.form"), sample("h1.form")});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("value=-1"), std::string::npos);
}

TEST(Cli, Construct) {
  CliRun r = run({"construct", "separator", "--d", "4", "--k", "3"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(parse_form(r.out), binary_separator(4, 3));
  r = run({"construct", "hurwitz", "--a", "2,1,1"});
  EXPECT_EQ(parse_form(r.out), hurwitz({2, 1, 1}));
  r = run({"construct", "motzkin"});
  EXPECT_EQ(parse_form(r.out), motzkin());
  EXPECT_EQ(parse_form(r.out), read_form_file(sample("motzkin.form")));
  r = run({"construct", "agiform", "--lambdas", "1/2,1/2", "--alphas", "4,0;0,4"});
  EXPECT_EQ(r.code, 0) << r.err;
  r = run({"construct", "perturbed-fermat", "--n", "3", "--d", "3", "--term", "1/100:1,1,1"});
  EXPECT_EQ(parse_form(r.out).term_count(), 4u);
  r = run({"construct", "extremal", "--r", "2", "--s", "2", "--t", "1", "--eps2", "-1"});
  EXPECT_EQ(parse_form(r.out), extremal_generator(2, 2, 1, 1, -1));
  r = run({"construct", "thicken", "--input", sample("h1.form"), "--lambda", "1"});
  EXPECT_EQ(parse_form(r.out), thicken(read_form_file(sample("h1.form")), 1));
  r = run({"construct", "polya-lift", "--input", sample("p1.form"), "--power", "1"});
  EXPECT_EQ(parse_form(r.out).degree(), 6);
  r = run({"construct", "dual-example", "--which", "2"});
  EXPECT_EQ(parse_form(r.out), read_form_file(sample("p2.form")));
  r = run({"construct", "trinomial", "--n", "3", "--d", "3"});
  EXPECT_EQ(parse_form(r.out), trinomial(3, 3));

  const std::string path = temp_path("construct.form");
  r = run({"construct", "motzkin", "--out", path});
  EXPECT_NE(r.out.find("artifact=" + path), std::string::npos);
  EXPECT_EQ(read_form_file(path), motzkin());
  std::filesystem::remove(path);
}

TEST(Cli, ConstructBadParams) {
  EXPECT_EQ(run({"construct", "nonsense"}).code, 10);
  EXPECT_EQ(run({"construct", "separator", "--d", "4", "--k", "9"}).code, 11);
  EXPECT_EQ(run({"construct", "hurwitz", "--a", "1,2"}).code, 10);
  EXPECT_EQ(run({"construct", "hurwitz"}).code, 10);
  EXPECT_EQ(run({"construct", "hurwitz", "--a", "x"}).code, 10);
  EXPECT_EQ(run({"construct", "extremal", "--r", "1", "--s", "1", "--t", "2"}).code, 10);
  EXPECT_EQ(run({"construct", "perturbed-fermat", "--n", "3", "--d", "3", "--term", "1/2:1,1,1"}).code, 10);
}

TEST(Cli, VerifyPaperSubset) {
  const CliRun r = run({"verify-paper", "--only", "duals"});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("criterion=1 status=PASS"), std::string::npos);
  EXPECT_NE(r.out.find("criterion=8 status=PASS"), std::string::npos);
  EXPECT_EQ(r.out.find("criterion=2 "), std::string::npos);
  EXPECT_NE(r.out.find("passed=4 failed=0"), std::string::npos);
  EXPECT_EQ(run({"verify-paper", "--only", "nothing"}).code, 10);
}

TEST(Cli, DeterministicOutput) {
  const CliRun a = run({"check", sample("hurwitz211.form"), "--k", "2", "--seed", "7"});
  const CliRun b = run({"check", sample("hurwitz211.form"), "--k", "2", "--seed", "7"});
  EXPECT_EQ(a.code, b.code);
  EXPECT_EQ(a.out, b.out);
}

TEST(Cli, RecordQuoting) {
  cli::Record r;
  r.add("a", "x y").add("b", "plain").add("c", "q\"uote");
  EXPECT_EQ(r.render(false), "a=\"x y\" b=plain c=\"q\\\"uote\"");
}
