#include "sphkh/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <limits>
#include <sstream>

#include "sphkh/discrepancy.hpp"
#include "sphkh/error.hpp"
#include "sphkh/io.hpp"
#include "sphkh/sampling.hpp"

namespace sphkh {

namespace fs = std::filesystem;

std::string command_name(Command c) {
  switch (c) {
    case Command::VerifyIdentity: return "verify-identity";
    case Command::Bound: return "bound";
    case Command::Corollary3: return "corollary3";
    case Command::Thm4a: return "thm4a";
    case Command::Thm4b: return "thm4b";
    case Command::Partition: return "partition";
    case Command::MeshNorm: return "meshnorm";
    case Command::Scaling: return "scaling";
  }
  return "?";
}

namespace {

constexpr double kSlackTolerance = 1e-9;

double parse_exponent(const std::string& s) {
  if (s == "inf" || s == "infinity" || s == "Inf") return std::numeric_limits<double>::infinity();
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || !(v >= 1.0)) throw UsageError("--p: expected a number >= 1 or 'inf', got '" + s + "'", 2);
  return v;
}

void add_options(CLI::App& sub, RunConfig& cfg, std::string& p_text) {
  sub.add_option("--d", cfg.d, "sphere dimension d (S^d in R^{d+1})");
  sub.add_option("--r0", cfg.r0, "inner radius r0");
  sub.add_option("--r", cfg.r, "shell radius r");
  sub.add_option("--p", p_text, "Hoelder exponent (>= 1 or 'inf')");
  sub.add_option("--tol", cfg.tol, "tolerance on the identity's relative residual");
  sub.add_option("--trunc-tol", cfg.truncation_tol, "tail tolerance of field expansions");
  sub.add_option("--seed", cfg.seed, "seed for random inputs");
  sub.add_option("--sigma", cfg.sigma, "signed measure or rule (CSV/JSON)");
  sub.add_option("--field", cfg.field, "charge field (JSON)");
  sub.add_option("--points", cfg.points, "point set (CSV/JSON)");
  sub.add_option("--output,-o", cfg.output, "JSON report path");
  sub.add_option("--table", cfg.table, "CSV table path");
  sub.add_option("--profile", cfg.profile, "CSV dump of the potential on the shell");
  sub.add_option("--expansion", cfg.expansion, "CSV dump of the field expansion");
  sub.add_option("--quad-degree", cfg.quad_degree, "shell quadrature degree");
  sub.add_option("--mu-degree", cfg.mu_degree, "degree of the surface-measure surrogate");
  sub.add_option("--n", cfg.n, "number of regions / points");
  sub.add_option("--n-values", cfg.n_values, "ascending n values for scaling")->delimiter(',');
  sub.add_option("--random-atoms", cfg.random_atoms, "atoms of the random measure");
  sub.add_option("--random-charges", cfg.random_charges, "charges of the random field");
  sub.add_option("--random-points", cfg.random_points, "random scattering size");
  sub.add_option("--charge-radius", cfg.charge_radius, "largest charge radius (default 0.8 r0)");
  sub.add_option("--epsilon", cfg.epsilon, "target potential bound");
  sub.add_option("--epsilon-factor", cfg.epsilon_factor, "epsilon as a multiple of the gate threshold");
  sub.add_option("--radii", cfg.radii, "number of radii in the admissible window");
  sub.add_option("--resolution", cfg.resolution, "sample cells for the mesh norm (default 16 n)");
}

void validate(const RunConfig& cfg) {
  if (cfg.d < 2) throw UsageError("--d: requires d >= 2", 2);
  if (!(cfg.r0 > 0.0)) throw UsageError("--r0: requires 0 < r0", 2);
  if (!(cfg.r0 < cfg.r)) throw UsageError("--r0/--r: requires r0 < r", 2);
  if (!(cfg.r < 1.0)) throw UsageError("--r: requires r < 1", 2);
  if (!(cfg.tol > 0.0)) throw UsageError("--tol: requires tol > 0", 2);
  if (!(cfg.truncation_tol > 0.0)) throw UsageError("--trunc-tol: requires a positive tolerance", 2);
  if (cfg.quad_degree < 0 || cfg.mu_degree < 0) throw UsageError("quadrature degrees must be nonnegative", 2);
  if (cfg.charge_radius && !(*cfg.charge_radius >= 0.0 && *cfg.charge_radius < cfg.r0)) {
    throw UsageError("--charge-radius: requires 0 <= radius < r0", 2);
  }
  if (cfg.epsilon && !(*cfg.epsilon > 0.0)) throw UsageError("--epsilon: requires epsilon > 0", 2);
  if (!(cfg.epsilon_factor > 0.0)) throw UsageError("--epsilon-factor: requires a positive factor", 2);
  if (cfg.radii < 1) throw UsageError("--radii: requires at least one radius", 2);
  if (cfg.n < 1) throw UsageError("--n: requires n >= 1", 2);
  if (cfg.n_values.empty() || !std::is_sorted(cfg.n_values.begin(), cfg.n_values.end()) || cfg.n_values.front() < 1) {
    throw UsageError("--n-values: requires an ascending list of positive integers", 2);
  }
}

int default_quad_degree(const RunConfig& cfg) {
  if (cfg.quad_degree > 0) return cfg.quad_degree;
  switch (cfg.command) {
    case Command::Thm4a:
    case Command::Thm4b:
    case Command::Scaling:
      return 60;
    default:
      return cfg.d == 2 ? 200 : (cfg.d == 3 ? 120 : 40);
  }
}

struct Context {
  const RunConfig& cfg;
  SphereDim dim;
  Rng rng;
  Json inputs = Json::object();
};

HarmonicField load_field(Context& c) {
  if (c.cfg.field) {
    c.inputs["field"] = {{"path", c.cfg.field->string()}, {"digest", file_digest(*c.cfg.field)}};
    return read_field(*c.cfg.field, c.dim);
  }
  const double rho = c.cfg.charge_radius.value_or(0.8 * c.cfg.r0);
  c.inputs["field"] = {{"random_charges", c.cfg.random_charges}, {"charge_radius", rho}};
  return random_field(c.dim, c.cfg.random_charges, rho, c.rng);
}

DiscreteSignedMeasure load_sigma(Context& c) {
  if (c.cfg.sigma) {
    c.inputs["sigma"] = {{"path", c.cfg.sigma->string()}, {"digest", file_digest(*c.cfg.sigma)}};
    return read_measure(*c.cfg.sigma, c.dim);
  }
  c.inputs["sigma"] = {{"random_atoms", c.cfg.random_atoms}};
  return random_atoms(c.dim, c.cfg.random_atoms, c.rng);
}

Scattering load_points(Context& c) {
  if (c.cfg.points) {
    c.inputs["points"] = {{"path", c.cfg.points->string()}, {"digest", file_digest(*c.cfg.points)}};
    return read_points(*c.cfg.points, c.dim);
  }
  if (c.cfg.random_points > 0) {
    c.inputs["points"] = {{"random_points", c.cfg.random_points}};
    return random_scattering(c.dim, c.cfg.random_points, c.rng);
  }
  c.inputs["points"] = {{"equal_area_centers", c.cfg.n}};
  const SpherePartition p = equal_area_partition(c.dim, c.cfg.n);
  std::vector<SpherePoint> centers;
  for (const auto& reg : p.regions()) centers.push_back(reg.center);
  return {c.dim, std::move(centers), "equal-area centers"};
}

QuadratureMeasure normalized_surface_measure(const Context& c) {
  return QuadratureMeasure::product_rule(c.dim, c.cfg.mu_degree).scaled(1.0 / surface_area(c.dim));
}

Json exponent_json(double p) { return std::isinf(p) ? Json("inf") : Json(p); }

Json report_header(const Context& c, const std::string& type) {
  const RunConfig& cfg = c.cfg;
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["report"] = type;
  j["config"] = {{"command", command_name(cfg.command)},
                 {"d", cfg.d},
                 {"r0", cfg.r0},
                 {"r", cfg.r},
                 {"p", exponent_json(cfg.p)},
                 {"quad_degree", default_quad_degree(cfg)},
                 {"mu_degree", cfg.mu_degree}};
  j["seed"] = cfg.seed;
  j["tolerances"] = {{"residual", cfg.tol}, {"truncation", cfg.truncation_tol}, {"slack", kSlackTolerance}};
  return j;
}

void emit(const Context& c, Json j, std::ostream& out) {
  j["inputs"] = c.inputs;
  if (c.cfg.output) {
    write_json(*c.cfg.output, j);
  } else {
    out << j.dump(2) << "\n";
  }
}

int bound_status(const BoundReport& b) { return b.slack >= -kSlackTolerance ? 0 : 1; }

int run_identity(Context& c, std::ostream& out, std::ostream& err) {
  const HarmonicField f = load_field(c);
  const DiscreteSignedMeasure sigma = load_sigma(c);
  const ShellConfig shell(c.cfg.r0, c.cfg.r);
  const QuadratureMeasure quad = QuadratureMeasure::product_rule(c.dim, default_quad_degree(c.cfg));
  const IdentityReport rep = kh_identity(f, sigma, shell, quad, c.cfg.truncation_tol);
  if (c.cfg.expansion) write_expansion(*c.cfg.expansion, expand_field(f, c.cfg.r, c.cfg.truncation_tol));
  if (c.cfg.profile) write_profile(*c.cfg.profile, potential_on_shell(sigma, shell, quad));
  const int status = rep.relative <= c.cfg.tol ? 0 : 1;
  Json j = report_header(c, "identity");
  j["result"] = to_json(rep);
  j["status"] = status == 0 ? "pass" : "residual exceeds tolerance";
  emit(c, std::move(j), out);
  err << "identity: relative residual " << rep.relative << " (tol " << c.cfg.tol << ") "
      << (status == 0 ? "PASS" : "FAIL") << "\n";
  return status;
}

int run_bound(Context& c, std::ostream& out, std::ostream& err) {
  const HarmonicField f = load_field(c);
  const DiscreteSignedMeasure sigma = load_sigma(c);
  const ShellConfig shell(c.cfg.r0, c.cfg.r);
  const QuadratureMeasure quad = QuadratureMeasure::product_rule(c.dim, default_quad_degree(c.cfg));
  const BoundReport rep = theorem2_bound(f, sigma, shell, quad, c.cfg.p, c.cfg.truncation_tol);
  const int status = bound_status(rep);
  Json j = report_header(c, "bound");
  j["result"] = to_json(rep);
  j["status"] = status == 0 ? "pass" : "bound violated";
  emit(c, std::move(j), out);
  err << "bound: lhs " << rep.lhs << " <= rhs " << rep.rhs << " " << (status == 0 ? "PASS" : "FAIL") << "\n";
  return status;
}

int run_corollary3(Context& c, std::ostream& out, std::ostream& err) {
  const HarmonicField f = load_field(c);
  const QuadratureMeasure mu = normalized_surface_measure(c);
  DiscreteSignedMeasure nu = [&] {
    if (c.cfg.sigma) return load_sigma(c);
    c.inputs["sigma"] = {{"equal_area_rule", c.cfg.n}};
    return partition_rule(mu, equal_area_partition(c.dim, c.cfg.n));
  }();
  const ShellConfig shell(c.cfg.r0, c.cfg.r);
  const QuadratureMeasure quad = QuadratureMeasure::product_rule(c.dim, default_quad_degree(c.cfg));
  const BoundReport rep = corollary3_error(f, mu, nu, shell, quad, c.cfg.p, c.cfg.truncation_tol);
  const int status = bound_status(rep);
  Json j = report_header(c, "corollary3");
  j["result"] = to_json(rep);
  j["status"] = status == 0 ? "pass" : "bound violated";
  emit(c, std::move(j), out);
  err << "corollary3: error " << rep.lhs << " <= " << rep.rhs << " " << (status == 0 ? "PASS" : "FAIL") << "\n";
  return status;
}

int run_thm4a(Context& c, std::ostream& out, std::ostream& err) {
  const Scattering e = load_points(c);
  const SpherePartition matched = match_partition_to_scattering(equal_area_partition(c.dim, e.size()), e);
  const QuadratureMeasure mu = normalized_surface_measure(c);
  const QuadratureMeasure quad = QuadratureMeasure::product_rule(c.dim, default_quad_degree(c.cfg));
  const Theorem4Report rep = theorem4a_bound(mu, matched, c.cfg.r, quad);
  const int status = rep.measured_sup <= rep.bound ? 0 : 1;
  Json j = report_header(c, "thm4a");
  j["result"] = to_json(rep);
  j["status"] = status == 0 ? "pass" : "bound violated";
  emit(c, std::move(j), out);
  err << "thm4a: sup " << rep.measured_sup << " <= bound " << rep.bound << " " << (status == 0 ? "PASS" : "FAIL")
      << "\n";
  return status;
}

int run_thm4b(Context& c, std::ostream& out, std::ostream& err) {
  const Scattering e = load_points(c);
  const QuadratureMeasure mu = normalized_surface_measure(c);
  const QuadratureMeasure quad = QuadratureMeasure::product_rule(c.dim, default_quad_degree(c.cfg));
  const double eps = c.cfg.epsilon ? *c.cfg.epsilon : c.cfg.epsilon_factor * gate_threshold(e, mu.total_mass());
  Json j = report_header(c, "thm4b");
  j["epsilon"] = eps;
  try {
    const Theorem4Report rep = theorem4b_pipeline(e, mu, eps, c.cfg.r0, quad, c.cfg.radii);
    const int status = rep.diagnosis.empty() ? 0 : 1;
    j["result"] = to_json(rep);
    j["status"] = status == 0 ? "pass" : "potential exceeds epsilon";
    emit(c, std::move(j), out);
    err << "thm4b: max sup " << rep.measured_sup << " <= epsilon " << eps << " over " << rep.radii.size()
        << " radii " << (status == 0 ? "PASS" : "FAIL") << "\n";
    return status;
  } catch (const GateFailure& g) {
    j["result"] = to_json(g.report());
    j["status"] = "gate failure";
    emit(c, std::move(j), out);
    err << "thm4b: " << g.what() << "\n";
    return 1;
  }
}

int run_partition(Context& c, std::ostream& out, std::ostream& err) {
  SpherePartition p = [&] {
    if (c.cfg.points) {
      const Scattering e = load_points(c);
      return match_partition_to_scattering(equal_area_partition(c.dim, e.size()), e);
    }
    c.inputs["n"] = c.cfg.n;
    return equal_area_partition(c.dim, c.cfg.n);
  }();
  Json j = report_header(c, "partition");
  j["result"] = to_json(p);
  j["status"] = "pass";
  emit(c, std::move(j), out);
  err << "partition: " << p.size() << " regions, norm " << partition_norm(p) << "\n";
  return 0;
}

int run_meshnorm(Context& c, std::ostream& out, std::ostream& err) {
  const Scattering e = load_points(c);
  const std::size_t res = c.cfg.resolution > 0 ? c.cfg.resolution : 16 * e.size();
  const MeshNormEstimate m = mesh_norm(e, c.dim, res);
  Json j = report_header(c, "meshnorm");
  j["result"] = to_json(m);
  j["result"]["resolution"] = res;
  j["result"]["points"] = e.size();
  j["status"] = "pass";
  emit(c, std::move(j), out);
  err << "meshnorm: " << m.lower() << " <= delta <= " << m.upper() << "\n";
  return 0;
}

int run_scaling(Context& c, std::ostream& out, std::ostream& err) {
  const QuadratureMeasure mu = normalized_surface_measure(c);
  const QuadratureMeasure quad = QuadratureMeasure::product_rule(c.dim, default_quad_degree(c.cfg));
  const ScalingStudy s = scaling_study(c.dim, c.cfg.n_values, c.cfg.r, mu, quad);
  if (c.cfg.table) write_scaling_table(*c.cfg.table, s);
  bool ok = true;
  for (const auto& row : s.rows) ok = ok && row.measured_sup <= row.bound;
  Json j = report_header(c, "scaling");
  j["result"] = to_json(s);
  j["status"] = ok ? "pass" : "bound violated";
  emit(c, std::move(j), out);
  err << "scaling: sup exponent " << s.sup_exponent << ", partition-norm exponent " << s.partition_exponent << "\n";
  return ok ? 0 : 1;
}

}  // namespace

RunConfig parse_args(int argc, const char* const* argv) {
  RunConfig cfg;
  std::string p_text = "2";
  CLI::App app{"Integration-error identities and potential bounds on spheres", "sphkh"};
  app.require_subcommand(1, 1);
  struct Entry {
    Command cmd;
    const char* help;
  };
  const Entry entries[] = {
      {Command::VerifyIdentity, "check the integration-error identity for a field and a signed measure"},
      {Command::Bound, "evaluate both sides of the Hoelder bound"},
      {Command::Corollary3, "bound the error of a quadrature rule against the surface measure"},
      {Command::Thm4a, "potential of a partition rule against its bound"},
      {Command::Thm4b, "mesh-norm gate, reduction and radius window for a target epsilon"},
      {Command::Partition, "export an equal-area partition"},
      {Command::MeshNorm, "estimate the mesh norm of a point set"},
      {Command::Scaling, "decay of potentials for equal-area center rules"},
  };
  std::vector<std::pair<CLI::App*, Command>> subs;
  for (const auto& e : entries) {
    CLI::App* sub = app.add_subcommand(command_name(e.cmd), e.help);
    add_options(*sub, cfg, p_text);
    subs.emplace_back(sub, e.cmd);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    throw UsageError(app.help(), 0);
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    if (argc <= 1) msg = "no command given";
    throw UsageError(msg + "\n" + app.help(), 2);
  }
  for (const auto& [sub, cmd] : subs) {
    if (sub->parsed()) cfg.command = cmd;
  }
  cfg.p = parse_exponent(p_text);
  validate(cfg);
  return cfg;
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  Context c{cfg, SphereDim(cfg.d), Rng(cfg.seed)};
  try {
    switch (cfg.command) {
      case Command::VerifyIdentity: return run_identity(c, out, err);
      case Command::Bound: return run_bound(c, out, err);
      case Command::Corollary3: return run_corollary3(c, out, err);
      case Command::Thm4a: return run_thm4a(c, out, err);
      case Command::Thm4b: return run_thm4b(c, out, err);
      case Command::Partition: return run_partition(c, out, err);
      case Command::MeshNorm: return run_meshnorm(c, out, err);
      case Command::Scaling: return run_scaling(c, out, err);
    }
  } catch (const MatchingError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    err << "error: malformed JSON input: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = parse_args(argc, argv);
  } catch (const UsageError& e) {
    (e.exit_code() == 0 ? out : err) << e.what() << "\n";
    return e.exit_code();
  }
  return run(cfg, out, err);
}

}  // namespace sphkh
