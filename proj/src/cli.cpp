#include "schwarz/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "schwarz/errors.hpp"
#include "schwarz/extremal.hpp"
#include "schwarz/harmonic_lab.hpp"
#include "schwarz/schwarz_bound.hpp"

namespace schwarz {

namespace {

using nlohmann::ordered_json;

constexpr double kMaxGridRadius = 0.999;
constexpr double kSharpnessRatioTol = 1e-6;
constexpr double kOriginTol = 1e-9;
constexpr double kGradientRatioTol = 1e-9;
constexpr double kGradientMomentTol = 1e-11;
constexpr double kCorollaryTol = 1e-9;
constexpr double kCorollaryEqualityTol = 1e-12;
constexpr double kShiftScale = 3.0;

// Rounds to 15 significant digits so JSON and CSV carry the same values.
double round15(double v) {
  if (!std::isfinite(v)) return v;
  return std::strtod(format_real(v).c_str(), nullptr);
}

ordered_json exponent_json(const Exponent& e) {
  if (e.is_infinite()) return "inf";
  return round15(e.value());
}

struct Common {
  std::string p_text;
  int n = 0;
  int nodes = kDefaultNodeCount;
  std::string out_path;
};

SolverOptions solver_options(const Common& c) {
  if (c.nodes < 2) throw InvalidArgument("--nodes must be >= 2");
  SolverOptions opts;
  opts.nodes = c.nodes;
  return opts;
}

ordered_json base_meta(const std::string& command) {
  ordered_json meta;
  meta["tool"] = "schwarz";
  meta["version"] = kToolVersion;
  meta["command"] = command;
  return meta;
}

void add_exponents(ordered_json& meta, const ExponentPair& ex) {
  meta["p"] = exponent_json(ex.p);
  meta["q"] = exponent_json(ex.q);
}

// Writes text to --out when given, else to out.
void emit(const std::string& text, const Common& c, std::ostream& out) {
  if (c.out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(c.out_path, std::ios::binary);
  if (!file) throw InvalidArgument("cannot open output file '" + c.out_path + "'");
  file << text;
  if (!file) throw Error("failed writing output file '" + c.out_path + "'");
}

std::string csv_meta(const ordered_json& meta) {
  std::string s;
  for (const auto& [key, value] : meta.items()) {
    s += "# " + key + "=";
    if (value.is_string()) {
      s += value.get<std::string>();
    } else if (value.is_number_float()) {
      s += format_real(value.get<double>());
    } else {
      s += value.dump();
    }
    s += "\n";
  }
  return s;
}

std::string json_text(const ordered_json& j) { return j.dump(2) + "\n"; }

ordered_json check_entry(const std::string& name, double value, double target, double tol) {
  const bool passed = std::abs(value - target) <= tol;
  return ordered_json{{"name", name},
                      {"value", round15(value)},
                      {"target", round15(target)},
                      {"tolerance", tol},
                      {"passed", passed}};
}

// Collects failed checks; returns the exit code.
int finish_report(ordered_json& report, const ordered_json& checks) {
  ordered_json failures = ordered_json::array();
  for (const auto& c : checks) {
    if (!c["passed"].get<bool>()) failures.push_back(c["name"]);
  }
  report["checks"] = checks;
  report["failures"] = failures;
  report["passed"] = failures.empty();
  return failures.empty() ? 0 : 1;
}

int cmd_gp(const Common& c, const std::string& grid_text, const std::string& format,
           std::ostream& out) {
  const ExponentPair ex = conjugate(parse_exponent(c.p_text));
  const BallDim dim(c.n);
  const SolverOptions opts = solver_options(c);
  const std::vector<double> grid = parse_radius_grid(grid_text);
  const BoundCurve curve = g_curve(ex, dim, grid, opts);

  ordered_json meta = base_meta("gp");
  add_exponents(meta, ex);
  meta["n"] = c.n;
  meta["nodes"] = opts.nodes;
  meta["root_rel_tol"] = opts.root_rel_tol;
  meta["rows"] = static_cast<int>(curve.points.size());

  std::string text;
  if (format == "csv") {
    text = csv_meta(meta) + "r,a_star,g_p\n";
    for (const BoundPoint& pt : curve.points) {
      text += format_real(pt.r) + "," + format_real(pt.a_star) + "," + format_real(pt.g_value) +
              "\n";
    }
  } else {
    ordered_json rows = ordered_json::array();
    for (const BoundPoint& pt : curve.points) {
      rows.push_back(ordered_json{
          {"r", round15(pt.r)}, {"a_star", round15(pt.a_star)}, {"g_p", round15(pt.g_value)}});
    }
    text = json_text(ordered_json{{"meta", meta}, {"rows", rows}});
  }
  emit(text, c, out);
  return 0;
}

int cmd_sharp_constant(const Common& c, const std::string& format, std::ostream& out) {
  const ExponentPair ex = conjugate(parse_exponent(c.p_text));
  const BallDim dim(c.n);
  const double value = sharp_gradient_constant(ex, dim);

  ordered_json meta = base_meta("sharp-constant");
  add_exponents(meta, ex);
  meta["n"] = c.n;
  if (gradient_constant_is_limit(ex)) {
    meta["note"] = "limit case q = inf: constant is n * sup|eta_n| = n";
  }
  std::string text;
  if (format == "csv") {
    text = csv_meta(meta) + "n,constant\n" + std::to_string(c.n) + "," + format_real(value) + "\n";
  } else {
    ordered_json rows = ordered_json::array();
    rows.push_back(ordered_json{{"n", c.n}, {"constant", round15(value)}});
    text = json_text(ordered_json{{"meta", meta}, {"rows", rows}});
  }
  emit(text, c, out);
  return 0;
}

// Runs body; a computational error becomes a failed report with exit 1.
template <class Body>
int run_report(const std::string& command, const Common& c, ordered_json meta, Body&& body,
               std::ostream& out) {
  ordered_json report;
  int code = 0;
  try {
    code = body(report);
  } catch (const UsageError&) {
    throw;
  } catch (const Error& e) {
    report["error"] = e.what();
    report["failures"] = ordered_json::array({command});
    report["passed"] = false;
    code = 1;
  }
  emit(json_text(ordered_json{{"meta", meta}, {"report", report}}), c, out);
  return code;
}

int cmd_verify_sharpness(const Common& c, double R, std::ostream& out) {
  const ExponentPair ex = conjugate(parse_exponent(c.p_text));
  const BallDim dim(c.n);
  const SolverOptions opts = solver_options(c);
  if (!(R > 0.0 && R < 1.0)) throw InvalidRadius("R must lie in (0, 1), got " + format_real(R));
  if (R >= kNearBoundaryRadius && opts.nodes < kNearBoundaryNodes) {
    throw NearBoundary("R=" + format_real(R) + " needs at least " +
                       std::to_string(kNearBoundaryNodes) + " nodes");
  }
  if (ex.q.is_infinite()) {
    throw InvalidExponent("sharpness is verified for p > 1 only; p = 1 is a limit case");
  }
  ordered_json meta = base_meta("verify sharpness");
  add_exponents(meta, ex);
  meta["n"] = c.n;
  meta["R"] = round15(R);
  meta["nodes"] = opts.nodes;
  meta["ratio_tolerance"] = kSharpnessRatioTol;
  meta["origin_tolerance"] = kOriginTol;
  return run_report(
      "sharpness", c, meta,
      [&](ordered_json& report) {
        const SharpnessReport rep = sharpness_report(R, ex, dim, opts);
        report["lhs"] = round15(rep.lhs);
        report["norm"] = round15(rep.norm);
        report["bound"] = round15(rep.bound);
        report["ratio"] = round15(rep.ratio);
        report["origin_value"] = round15(rep.origin_value);
        ordered_json checks = ordered_json::array();
        checks.push_back(check_entry("ratio", rep.ratio, 1.0, kSharpnessRatioTol));
        checks.push_back(check_entry("origin_value", rep.origin_value, 0.0, kOriginTol));
        return finish_report(report, checks);
      },
      out);
}

int cmd_verify_bound(const Common& c, int samples, int degree, int target_dim, int trials,
                     std::uint64_t seed, std::ostream& out) {
  const ExponentPair ex = conjugate(parse_exponent(c.p_text));
  const BallDim dim(c.n);
  const SolverOptions opts = solver_options(c);
  if (samples < 1) throw InvalidArgument("--samples must be >= 1");
  if (trials < 1) throw InvalidArgument("--trials must be >= 1");
  // Validates n, degree and m before any work.
  (void)random_harmonic(dim, degree, target_dim, seed);

  ordered_json meta = base_meta("verify bound");
  add_exponents(meta, ex);
  meta["n"] = c.n;
  meta["samples"] = samples;
  meta["degree"] = degree;
  meta["m"] = target_dim;
  meta["trials"] = trials;
  meta["seed"] = seed;
  meta["nodes"] = opts.nodes;
  meta["violation_tolerance"] = "1e-7 * ||f||_p";
  return run_report(
      "bound", c, meta,
      [&](ordered_json& report) {
        int violations = 0;
        int unconverged = 0;
        double worst = std::numeric_limits<double>::infinity();
        ordered_json failures = ordered_json::array();
        const BoundTable table(ex, dim, kTrialRadiusMax, opts);
        report["table_error"] = round15(table.validation_error());
        for (int i = 0; i < samples; ++i) {
          const std::uint64_t sample_seed = derive_seed(seed, static_cast<std::uint64_t>(i));
          const HarmonicSample s = random_harmonic(dim, degree, target_dim, sample_seed);
          const BoundCheckReport rep = check_schwarz(s, table, trials, derive_seed(sample_seed, 1));
          violations += rep.violations;
          if (!rep.norm_converged) ++unconverged;
          worst = std::min(worst, rep.worst_slack / rep.norm);
          if (rep.violations > 0) {
            failures.push_back(ordered_json{{"sample", i},
                                            {"violations", rep.violations},
                                            {"worst_slack", round15(rep.worst_slack)}});
          }
        }
        report["samples"] = samples;
        report["violations"] = violations;
        report["worst_relative_slack"] = round15(worst);
        report["unconverged_norms"] = unconverged;
        report["failures"] = failures;
        report["passed"] = violations == 0;
        return violations == 0 ? 0 : 1;
      },
      out);
}

int cmd_verify_gradient(const Common& c, std::ostream& out) {
  const ExponentPair ex = conjugate(parse_exponent(c.p_text));
  const BallDim dim(c.n);
  const SolverOptions opts = solver_options(c);
  ordered_json meta = base_meta("verify gradient");
  add_exponents(meta, ex);
  meta["n"] = c.n;
  meta["nodes"] = opts.nodes;
  return run_report(
      "gradient", c, meta,
      [&](ordered_json& report) {
        const double constant = sharp_gradient_constant(ex, dim);
        const double moment = g_prime_at_zero(ex, dim, opts);
        report["constant"] = round15(constant);
        report["g_prime_at_zero"] = round15(moment);
        ordered_json checks = ordered_json::array();
        checks.push_back(check_entry("g_prime_at_zero", moment, constant,
                                     kGradientMomentTol * std::max(1.0, constant)));
        if (ex.q.is_infinite()) {
          report["note"] = "p = 1 is a limit case; no extremal boundary data";
        } else {
          const double ratio = gradient_extremal_check(ex, dim, opts);
          report["extremal_ratio"] = round15(ratio);
          checks.push_back(check_entry("extremal_ratio", ratio, constant, kGradientRatioTol));
        }
        return finish_report(report, checks);
      },
      out);
}

int cmd_verify_corollary(const Common& c, int samples, int degree, int target_dim,
                         std::uint64_t seed, std::ostream& out) {
  const BallDim dim(c.n);
  if (samples < 1) throw InvalidArgument("--samples must be >= 1");
  (void)random_harmonic(dim, degree, target_dim, seed);

  ordered_json meta = base_meta("verify corollary");
  meta["n"] = c.n;
  meta["samples"] = samples;
  meta["degree"] = degree;
  meta["m"] = target_dim;
  meta["seed"] = seed;
  meta["tolerance"] = kCorollaryTol;
  meta["equality_tolerance"] = kCorollaryEqualityTol;
  return run_report(
      "corollary", c, meta,
      [&](ordered_json& report) {
        int violations = 0;
        double worst = std::numeric_limits<double>::infinity();
        ordered_json failures = ordered_json::array();
        for (int i = 0; i < samples; ++i) {
          const std::uint64_t sample_seed = derive_seed(seed, static_cast<std::uint64_t>(i));
          const HarmonicSample s = random_harmonic(dim, degree, target_dim, sample_seed);
          std::mt19937_64 rng(derive_seed(sample_seed, 2));
          std::normal_distribution<double> normal(0.0, kShiftScale);
          std::vector<double> shift(target_dim);
          for (double& v : shift) v = normal(rng);
          const InequalityCheck chk = check_corollary(s, shift);
          worst = std::min(worst, chk.slack);
          if (chk.lhs > chk.rhs + kCorollaryTol) {
            ++violations;
            failures.push_back(ordered_json{{"sample", i}, {"slack", round15(chk.slack)}});
          }
        }
        // Equality case f = x_n + c.
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(1, c.n);
        M(0, c.n - 1) = 1.0;
        const HarmonicSample xn = linear_harmonic(dim, M);
        const double shift[1] = {5.0};
        const InequalityCheck eq = check_corollary(xn, shift);
        const bool equality = std::abs(eq.lhs - eq.rhs) <= kCorollaryEqualityTol;
        if (!equality) failures.push_back(ordered_json{{"equality_case", round15(eq.slack)}});
        report["samples"] = samples;
        report["violations"] = violations;
        report["worst_slack"] = round15(worst);
        report["equality_case"] = ordered_json{
            {"lhs", round15(eq.lhs)}, {"rhs", round15(eq.rhs)}, {"passed", equality}};
        report["failures"] = failures;
        const bool passed = violations == 0 && equality;
        report["passed"] = passed;
        return passed ? 0 : 1;
      },
      out);
}

}  // namespace

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

std::vector<double> parse_radius_grid(const std::string& text) {
  auto parse_number = [](const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v)) {
      throw InvalidArgument("cannot parse radius '" + s + "'");
    }
    return v;
  };
  std::vector<double> grid;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() != 3) throw InvalidArgument("range grid must be start:stop:step");
    const double start = parse_number(parts[0]);
    const double stop = parse_number(parts[1]);
    const double step = parse_number(parts[2]);
    if (!(step > 0.0) || stop < start) {
      throw InvalidArgument("range grid needs step > 0 and stop >= start");
    }
    const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
    if (count > 1000000) throw InvalidArgument("range grid too large");
    for (long i = 0; i < count; ++i) grid.push_back(round15(start + static_cast<double>(i) * step));
  } else {
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) grid.push_back(parse_number(item));
  }
  if (grid.empty()) throw InvalidArgument("empty radius grid");
  for (double r : grid) {
    if (!(r >= 0.0 && r < kMaxGridRadius)) {
      throw InvalidRadius("grid radius " + format_real(r) + " outside [0, 0.999)");
    }
  }
  return grid;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sharp Schwarz-lemma bounds for harmonic maps of the unit ball", "schwarz"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  Common common;
  std::string format = "csv";
  std::string grid_text;
  double R = 0.0;
  int samples = 100;
  int degree = 6;
  int target_dim = 1;
  int trials = 100;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* sub, bool with_p, bool with_nodes) {
    if (with_p) sub->add_option("--p", common.p_text, "exponent p >= 1 or 'inf'")->required();
    sub->add_option("--n", common.n, "ball dimension n >= 2")->required();
    if (with_nodes) sub->add_option("--nodes", common.nodes, "quadrature nodes per piece");
    sub->add_option("--out", common.out_path, "write output to this file");
  };

  CLI::App* gp = app.add_subcommand("gp", "tabulate a*(r) and g_p(r)");
  add_common(gp, true, true);
  gp->add_option("--r-grid", grid_text, "start:stop:step or comma list")->required();
  gp->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));

  CLI::App* sc = app.add_subcommand("sharp-constant", "sharp gradient constant at the origin");
  add_common(sc, true, false);
  sc->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));

  CLI::App* verify = app.add_subcommand("verify", "verification reports (JSON)");
  verify->require_subcommand(1);
  CLI::App* v_sharp = verify->add_subcommand("sharpness", "extremal equality at x = R N");
  add_common(v_sharp, true, true);
  v_sharp->add_option("--R", R, "radius in (0, 1)")->required();
  CLI::App* v_bound = verify->add_subcommand("bound", "bound on random harmonic maps");
  add_common(v_bound, true, true);
  v_bound->add_option("--samples", samples);
  v_bound->add_option("--degree", degree);
  v_bound->add_option("--m", target_dim, "target dimension");
  v_bound->add_option("--trials", trials, "trial points per sample");
  v_bound->add_option("--seed", seed);
  CLI::App* v_grad = verify->add_subcommand("gradient", "gradient constant and its extremal");
  add_common(v_grad, true, true);
  CLI::App* v_cor = verify->add_subcommand("corollary", "p = 2 gradient corollary");
  add_common(v_cor, false, false);
  v_cor->add_option("--samples", samples);
  v_cor->add_option("--degree", degree);
  v_cor->add_option("--m", target_dim, "target dimension");
  v_cor->add_option("--seed", seed);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    if (gp->parsed()) return cmd_gp(common, grid_text, format, out);
    if (sc->parsed()) return cmd_sharp_constant(common, format, out);
    if (v_sharp->parsed()) return cmd_verify_sharpness(common, R, out);
    if (v_bound->parsed()) {
      return cmd_verify_bound(common, samples, degree, target_dim, trials, seed, out);
    }
    if (v_grad->parsed()) return cmd_verify_gradient(common, out);
    if (v_cor->parsed()) {
      return cmd_verify_corollary(common, samples, degree, target_dim, seed, out);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  err << "error: no command\n";
  return 2;
}

}  // namespace schwarz
