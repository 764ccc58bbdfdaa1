#include <doctest.h>

#include <gridfield/field_io.hpp>
#include <gridfield/likelihood.hpp>

#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

using json = nlohmann::json;

namespace {

const std::string cli = GRIDFIELD_CLI_PATH;

int run(const std::string& args, const std::string& out_file = "") {
  std::string cmd = cli + " " + args;
  cmd += " > " + (out_file.empty() ? std::string("/dev/null") : out_file);
  cmd += " 2>/dev/null";
  int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

json run_json(const std::string& args) {
  std::string out = "/tmp/gridfield_cli_out.json";
  REQUIRE(run(args, out) == 0);
  std::ifstream f(out);
  return json::parse(f);
}

}  // namespace

TEST_CASE("simulate then loglik round trip") {
  std::string field = "/tmp/gridfield_cli_field.txt";
  json sim = run_json("simulate --n 6 --d 2 --phi 1.5 --theta 0.8 --theta 1.2 "
                      "--seed 7 --field-out " +
                      field);
  CHECK(sim["values"] == 36);
  CHECK(sim["jitter_applied"] == false);

  json ll = run_json("loglik --field " + field +
                     " --d 2 --phi 1.5 --theta 0.8 --theta 1.2");
  gridfield::LatticeField f = gridfield::read_field_file(field);
  gridfield::ModelParams p;
  p.phi = 1.5;
  p.thetas = {0.8, 1.2};
  CHECK(double(ll["loglik"]) ==
        doctest::Approx(gridfield::loglik(f, p)).epsilon(1e-12));
}

TEST_CASE("phi-only estimation through the command line") {
  std::string field = "/tmp/gridfield_cli_field2.txt";
  REQUIRE(run("simulate --n 16 --d 1 --phi 2.0 --theta 1.0 --seed 3 "
              "--field-out " +
              field) == 0);
  json est = run_json("estimate --field " + field +
                      " --mode phi-only --theta-tilde 1.0");
  CHECK(double(est["phi_hat"]) > 0.0);
}

TEST_CASE("sieve estimation through the command line") {
  json est = run_json(
      "estimate --n 12 --d 1 --phi 1.0 --theta 1.0 --seed 5 --mode sieve "
      "--nu 0.5 --bounds 0:0.5:2.0 --bounds 1:0.5:2.0");
  CHECK(est["evaluations"].get<std::size_t>() == est["sieve_size"]);
  CHECK(double(est["phi_hat"]) >= 0.5);
  CHECK(double(est["phi_hat"]) <= 2.0);
}

TEST_CASE("fisher output is a symmetric matrix of the right size") {
  json fis = run_json("fisher --n 12 --d 2 --theta 1.0 --theta 1.0");
  auto m = fis["matrix"];
  REQUIRE(m.size() == 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(double(m[i][j]) == doctest::Approx(double(m[j][i])));
  CHECK(double(m[0][0]) == doctest::Approx(4.0 * 144.0 / 2.0));
}

TEST_CASE("validate exit codes") {
  // full run is exercised elsewhere; a failing tolerance must flip the code
  CHECK(run("validate --tol-override determinant-closed=1e-30") == 1);
  CHECK(run("validate --inject-sign-flip") == 1);
}

TEST_CASE("bad arguments fail loudly") {
  CHECK(run("loglik --d 2 --theta 1.0 --theta 1.0 --theta 1.0") != 0);
  CHECK(run("estimate --n 12 --d 1 --mode nonsense") != 0);
  CHECK(run("estimate --n 12 --d 1 --mode sieve --bounds zz") != 0);
  CHECK(run("nosuchcommand") != 0);
}
