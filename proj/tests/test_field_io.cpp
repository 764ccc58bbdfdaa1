#include <doctest.h>

#include <gridfield/field_io.hpp>
#include <gridfield/sampling.hpp>
#include <gridfield/validation.hpp>

#include <sstream>
#include <stdexcept>

using namespace gridfield;

TEST_CASE("field round trip preserves every bit") {
  ModelParams p;
  p.phi = 1.7;
  p.thetas = {0.3, 2.5};
  GridSpec grid{5, 2};
  LatticeField f = sample_field(p, grid, SeededStream{2024, 9});

  std::stringstream buf;
  write_field(buf, f, p, 2024);
  FieldFileHeader h;
  LatticeField g = read_field(buf, &h);

  CHECK(h.version == 1);
  CHECK(h.d == 2);
  CHECK(h.n == 5);
  CHECK(h.phi == 1.7);
  CHECK(h.thetas == p.thetas);
  CHECK(h.seed == 2024);
  CHECK(h.ordering == "lexicographic-ascending");
  CHECK(g.grid.n == 5);
  CHECK(g.grid.d == 2);
  REQUIRE(g.values.size() == f.values.size());
  for (std::size_t k = 0; k < f.values.size(); ++k)
    CHECK(g.values[k] == f.values[k]);
}

TEST_CASE("malformed field files are rejected") {
  SUBCASE("wrong magic") {
    std::stringstream buf("something-else 1\n");
    CHECK_THROWS_AS(read_field(buf), std::runtime_error);
  }
  SUBCASE("truncated values") {
    std::stringstream buf(
        "gridfield-field 1\nd 1\nn 2\nphi 1\ntheta 1\nseed 0\n"
        "ordering lexicographic-ascending\nvalues 2\n0.5\n");
    CHECK_THROWS_AS(read_field(buf), std::runtime_error);
  }
  SUBCASE("theta count mismatch") {
    std::stringstream buf(
        "gridfield-field 1\nd 2\nn 2\nphi 1\ntheta 1\nseed 0\n"
        "ordering lexicographic-ascending\nvalues 4\n0\n0\n0\n0\n");
    CHECK_THROWS_AS(read_field(buf), std::runtime_error);
  }
  SUBCASE("unknown ordering") {
    std::stringstream buf(
        "gridfield-field 1\nd 1\nn 2\nphi 1\ntheta 1\nseed 0\n"
        "ordering column-major\nvalues 2\n0\n0\n");
    CHECK_THROWS_AS(read_field(buf), std::runtime_error);
  }
}

TEST_CASE("self-check suite passes at reduced sizes") {
  ValidationOptions opts;
  opts.sizes = {6, 8};
  opts.thetas = {0.5, 2.0};
  ValidationReport rep = run_validation(opts);
  for (const auto& c : rep.checks) {
    INFO(c.name, " worst ", c.worst, " tol ", c.tol);
    CHECK(c.passed);
  }
  CHECK(rep.all_passed());
  CHECK(rep.to_text().find("FAIL") == std::string::npos);
}

TEST_CASE("sign-flip mutation makes the inverse check fail") {
  ValidationOptions opts;
  opts.sizes = {6};
  opts.thetas = {1.0};
  opts.inject_sign_flip = true;
  ValidationReport rep = run_validation(opts);
  CHECK_FALSE(rep.all_passed());
  bool inverse_failed = false;
  for (const auto& c : rep.checks)
    if (c.name == "inverse-entries") inverse_failed = !c.passed;
  CHECK(inverse_failed);
}

TEST_CASE("tolerance overrides are honored") {
  ValidationOptions opts;
  opts.sizes = {6};
  opts.thetas = {1.0};
  opts.tol_overrides["determinant-closed"] = 1e-30;  // impossible
  ValidationReport rep = run_validation(opts);
  bool det_failed = false;
  for (const auto& c : rep.checks)
    if (c.name == "determinant-closed") {
      CHECK(c.tol == 1e-30);
      det_failed = !c.passed;
    }
  CHECK(det_failed);
}
