#include <gridfield/estimation.hpp>
#include <gridfield/field_io.hpp>
#include <gridfield/likelihood.hpp>
#include <gridfield/oracle.hpp>
#include <gridfield/sampling.hpp>
#include <gridfield/structured.hpp>
#include <gridfield/validation.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using json = nlohmann::json;
using namespace gridfield;

struct CommonOpts {
  int n = 16;
  int d = 1;
  double phi = 1.0;
  std::vector<double> thetas;
  std::vector<double> theta_tildes;
  std::uint64_t seed = 0;
  std::string out;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool wants_tilde) {
  cmd->add_option("--n", o.n, "points per axis")->check(CLI::Range(2, 1 << 20));
  cmd->add_option("--d", o.d, "lattice dimension")->check(CLI::Range(1, 8));
  cmd->add_option("--phi", o.phi, "variance scale");
  cmd->add_option("--theta", o.thetas, "rate, one per axis (repeatable)");
  if (wants_tilde)
    cmd->add_option("--theta-tilde", o.theta_tildes,
                    "working rate, one per axis (repeatable)");
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--out", o.out, "write the JSON report to this file");
}

ModelParams make_params(const CommonOpts& o) {
  ModelParams p;
  p.phi = o.phi;
  p.thetas = o.thetas;
  if (p.thetas.empty()) p.thetas.assign(o.d, 1.0);
  if (int(p.thetas.size()) == 1 && o.d > 1)
    p.thetas.assign(o.d, p.thetas[0]);
  p.validate();
  if (p.d() != o.d)
    throw CLI::ValidationError("--theta count must match --d");
  return p;
}

void emit(const json& report, const std::string& out) {
  if (out.empty()) {
    std::cout << report.dump(2) << "\n";
  } else {
    std::ofstream f(out);
    if (!f) throw std::runtime_error("cannot open " + out);
    f << report.dump(2) << "\n";
  }
}

std::vector<Bounds> parse_bounds(const std::vector<std::string>& specs,
                                 int d) {
  // "t:lo:hi" with t = 0 for the variance scale, 1..d for the rates
  std::vector<Bounds> bounds(std::size_t(d) + 1, Bounds{0.5, 2.5});
  for (const auto& s : specs) {
    std::istringstream ss(s);
    int t;
    char c1, c2;
    double lo, hi;
    if (!(ss >> t >> c1 >> lo >> c2 >> hi) || c1 != ':' || c2 != ':' ||
        t < 0 || t > d)
      throw CLI::ValidationError("bad --bounds spec '" + s +
                                 "', expected t:lo:hi");
    bounds[std::size_t(t)] = Bounds{lo, hi};
  }
  return bounds;
}

int cmd_simulate(const CommonOpts& o, const std::string& field_out) {
  ModelParams p = make_params(o);
  GridSpec grid{o.n, o.d};
  SampleMetadata meta;
  LatticeField f = sample_field(p, grid, SeededStream{o.seed, 0}, &meta);
  if (!field_out.empty()) write_field_file(field_out, f, p, o.seed);
  json report{{"command", "simulate"},
              {"n", o.n},
              {"d", o.d},
              {"phi", p.phi},
              {"theta", p.thetas},
              {"seed", o.seed},
              {"values", f.values.size()},
              {"jitter_applied", meta.jitter_applied},
              {"field_file", field_out}};
  if (field_out.empty()) report["field"] = f.values;
  emit(report, o.out);
  return 0;
}

int cmd_loglik(const CommonOpts& o, const std::string& field_in) {
  ModelParams p = make_params(o);
  LatticeField f;
  if (field_in.empty()) {
    f = sample_field(p, {o.n, o.d}, SeededStream{o.seed, 0});
  } else {
    f = read_field_file(field_in);
  }
  double ll = loglik(f, p);
  double q = quad_form(f, p);
  emit(json{{"command", "loglik"},
            {"n", f.grid.n},
            {"d", f.grid.d},
            {"phi", p.phi},
            {"theta", p.thetas},
            {"loglik", ll},
            {"quad_form", q}},
       o.out);
  return 0;
}

int cmd_estimate(const CommonOpts& o, const std::string& field_in,
                 const std::vector<std::string>& bound_specs, double nu,
                 const std::string& mode) {
  LatticeField f;
  ModelParams truth;
  if (field_in.empty()) {
    truth = make_params(o);
    f = sample_field(truth, {o.n, o.d}, SeededStream{o.seed, 0});
  } else {
    FieldFileHeader h;
    f = read_field_file(field_in, &h);
    truth.phi = h.phi;
    truth.thetas = h.thetas;
  }
  json report{{"command", "estimate"},
              {"n", f.grid.n},
              {"d", f.grid.d},
              {"mode", mode}};
  if (mode == "phi-only") {
    std::vector<double> tt = o.theta_tildes;
    if (tt.empty()) tt.assign(std::size_t(f.grid.d), 1.0);
    if (int(tt.size()) == 1 && f.grid.d > 1)
      tt.assign(std::size_t(f.grid.d), tt[0]);
    report["theta_tilde"] = tt;
    report["phi_hat"] = estimate_phi(f, tt);
  } else if (mode == "sieve") {
    if (nu <= 0.0) nu = default_nu(f.grid.d);
    Sieve sieve = build_sieve(parse_bounds(bound_specs, f.grid.d), f.grid.n,
                              nu);
    EstimationResult res = sieve_mle(f, sieve);
    report["nu"] = nu;
    report["sieve_size"] = sieve.size();
    report["consistency_guaranteed"] = sieve.consistency_guaranteed;
    report["phi_hat"] = res.phi_hat;
    report["theta_hat"] = res.theta_hats;
    report["loglik_at_max"] = res.loglik_at_max;
    report["evaluations"] = res.evaluations;
    report["ties"] = res.ties;
  } else {
    throw CLI::ValidationError("--mode must be phi-only or sieve");
  }
  emit(report, o.out);
  return 0;
}

int cmd_fisher(const CommonOpts& o, bool exact) {
  ModelParams p = make_params(o);
  FisherMatrix F = exact ? fisher_trace_exact(p, o.n)
                         : fisher_asymptotic(p, o.n);
  std::vector<std::vector<double>> rows;
  for (int i = 0; i <= o.d; ++i) {
    std::vector<double> row;
    for (int j = 0; j <= o.d; ++j) row.push_back(F.m(i, j));
    rows.push_back(row);
  }
  emit(json{{"command", "fisher"},
            {"n", o.n},
            {"d", o.d},
            {"phi", p.phi},
            {"theta", p.thetas},
            {"form", exact ? "exact-trace" : "leading-order"},
            {"ordering", "phi first, then one row per axis rate"},
            {"matrix", rows}},
       o.out);
  return 0;
}

int cmd_validate(const std::string& out,
                 const std::vector<std::string>& overrides,
                 bool inject_sign_flip) {
  ValidationOptions opts;
  opts.inject_sign_flip = inject_sign_flip;
  for (const auto& s : overrides) {
    auto pos = s.find('=');
    if (pos == std::string::npos)
      throw CLI::ValidationError("bad --tol-override '" + s +
                                 "', expected name=value");
    opts.tol_overrides[s.substr(0, pos)] = std::stod(s.substr(pos + 1));
  }
  ValidationReport report = run_validation(opts);
  std::cout << report.to_text();
  if (!out.empty()) {
    json j{{"command", "validate"}, {"passed", report.all_passed()}};
    for (const auto& c : report.checks)
      j["checks"].push_back(json{{"name", c.name},
                                 {"passed", c.passed},
                                 {"worst", c.worst},
                                 {"tol", c.tol},
                                 {"covers", c.detail}});
    emit(j, out);
  }
  return report.all_passed() ? 0 : 1;
}

int cmd_bench(const CommonOpts& o) {
  ModelParams p = make_params(o);
  using clock = std::chrono::steady_clock;
  auto ms = [](clock::time_point a, clock::time_point b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
  };

  LatticeField f = sample_field(p, {o.n, o.d}, SeededStream{o.seed, 0});
  auto t0 = clock::now();
  double ll = loglik(f, p);
  auto t1 = clock::now();

  json report{{"command", "bench"},
              {"n", o.n},
              {"d", o.d},
              {"loglik", ll},
              {"structured_ms", ms(t0, t1)}};

  std::size_t N = f.grid.size();
  if (N <= 4096) {
    Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(
        f.values.data(), long(N));
    auto t2 = clock::now();
    Eigen::MatrixXd sigma = oracle::dense_covariance(p, f.grid);
    double dense_ll = oracle::dense_mvn_logdensity(x, sigma);
    auto t3 = clock::now();
    report["dense_ms"] = ms(t2, t3);
    report["dense_loglik"] = dense_ll;
    report["speedup"] = ms(t2, t3) / std::max(1e-9, ms(t0, t1));
  }
  emit(report, o.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian lattice fields with separable Matern-3/2 "
               "correlation: simulation, likelihood, estimation"};
  app.require_subcommand(1);

  CommonOpts o;
  std::string field_path;
  std::string mode = "sieve";
  std::vector<std::string> bound_specs;
  std::vector<std::string> tol_overrides;
  double nu = 0.0;
  bool exact_fisher = true;
  bool inject_sign_flip = false;
  int reps = 1;

  auto* sim = app.add_subcommand("simulate", "draw a field and write it out");
  add_common(sim, o, false);
  sim->add_option("--field-out", field_path, "field file to write");

  auto* ll = app.add_subcommand("loglik", "evaluate the log-likelihood");
  add_common(ll, o, false);
  ll->add_option("--field", field_path, "field file to read");

  auto* est = app.add_subcommand("estimate", "variance / rate estimation");
  add_common(est, o, true);
  est->add_option("--field", field_path, "field file to read");
  est->add_option("--mode", mode, "phi-only or sieve");
  est->add_option("--bounds", bound_specs,
                  "t:lo:hi with t = 0 for phi, 1..d for rates (repeatable)");
  est->add_option("--nu", nu, "sieve mesh exponent (0 = default)");

  auto* fis = app.add_subcommand("fisher", "Fisher information matrix");
  add_common(fis, o, false);
  fis->add_flag("!--leading", exact_fisher,
                "use the leading-order form instead of exact traces");

  auto* val = app.add_subcommand("validate", "run the self-check suites");
  val->add_option("--out", o.out, "write the JSON report to this file");
  val->add_option("--tol-override", tol_overrides,
                  "name=value tolerance override (repeatable)");
  val->add_flag("--inject-sign-flip", inject_sign_flip,
                "mutation smoke test: must make the inverse check fail");

  auto* ben = app.add_subcommand("bench", "time structured vs dense");
  add_common(ben, o, false);
  ben->add_option("--reps", reps, "repetitions");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(o, field_path);
    if (ll->parsed()) return cmd_loglik(o, field_path);
    if (est->parsed())
      return cmd_estimate(o, field_path, bound_specs, nu, mode);
    if (fis->parsed()) return cmd_fisher(o, exact_fisher);
    if (val->parsed())
      return cmd_validate(o.out, tol_overrides, inject_sign_flip);
    if (ben->parsed()) return cmd_bench(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
