// kstab: certify, refute or scale K-stability instances read from JSON files.
//
// Exit codes: 0 certified (or scale/repr/eval succeeded), 2 refuted,
// 3 unknown, 1 input or usage error.

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "kstab/io.hpp"

namespace {

using namespace kstab;
using io::json;

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kRefuted = 2;
constexpr int kUnknown = 3;

struct RunConfig {
  std::string input;
  std::string cone;
  std::string sigma = "auto";
  double tol = 0.0;  // 0 keeps the library defaults
  int max_iter = 0;
  double trace_cap = 0.0;
  std::uint64_t seed = 42;
  int samples = 1000;
  std::string witness;
  std::string json_out;
};

std::string num(double x) {
  std::ostringstream s;
  s << std::setprecision(17) << x;
  return s.str();
}

std::string num(Complex z) {
  std::ostringstream s;
  s << std::setprecision(17) << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i";
  return s.str();
}

void write_json(const RunConfig& cfg, const json& doc) {
  if (cfg.json_out.empty()) return;
  std::ofstream out(cfg.json_out);
  if (!out) throw ParseError("--json: cannot write " + cfg.json_out);
  out << doc.dump(2) << "\n";
}

CertifyOptions certify_options(const RunConfig& cfg) {
  CertifyOptions o;
  if (cfg.tol > 0.0) o.sdp.feas_tol = o.sdp.res_tol = cfg.tol;
  if (cfg.max_iter > 0) o.sdp.max_iter = cfg.max_iter;
  o.sdp.trace_cap = cfg.trace_cap;
  o.seed = cfg.seed;
  o.samples = cfg.samples;
  if (cfg.sigma == "+1" || cfg.sigma == "1") o.sigmas = {1};
  else if (cfg.sigma == "-1") o.sigmas = {-1};
  return o;
}

ConeSpec resolve_cone(const RunConfig& cfg, const io::Problem& p) {
  if (!cfg.cone.empty()) return io::parse_cone_selector(cfg.cone);
  if (p.cone) return *p.cone;
  throw ParseError("no cone given: pass --cone or add a \"cone\" field");
}

std::optional<VectorXcd> resolve_witness(const RunConfig& cfg, const io::Problem& p) {
  if (cfg.witness.empty()) return p.witness;
  const json doc = io::read_json(cfg.witness);
  VectorXcd z;
  if (doc.contains("witness")) z = io::parse_complex_vector(doc.at("witness"), "witness");
  else if (doc.contains("z")) z = io::parse_complex_vector(doc.at("z"), "z");
  else z = io::parse_complex_vector(doc, "witness");
  if (z.size() != p.n) throw ParseError("witness: expected length " + std::to_string(p.n));
  return z;
}

void print_witness(const Witness& w) {
  std::cout << "witness (" << to_string(w.kind) << "): "
            << (w.accepted ? "accepted" : "rejected") << "\n";
  for (Index j = 0; j < w.z.size(); ++j) std::cout << "  z" << j + 1 << " = " << num(w.z(j)) << "\n";
  std::cout << "  |f(z)| = " << num(w.f_residual) << " (tolerance " << num(w.tolerance) << ")\n"
            << "  interior margin of Im z = " << num(w.interior_margin) << "\n";
  if (!w.reason.empty()) std::cout << "  " << w.reason << "\n";
}

void print_stats(const SampleStats& s) {
  std::cout << "sampling: " << s.samples << " samples, " << s.degree_drops << " degree drops, "
            << s.sign_changes << " sign changes, " << s.root_failures
            << " root failures, largest imaginary ratio " << num(s.max_imag_ratio) << "\n";
}

void print_certificate(const Certified& c) {
  const auto& cert = c.certificate;
  std::cout << "certified via " << c.route << ", sigma = " << (cert.sigma > 0 ? "+1" : "-1");
  if (cert.scaled) std::cout << ", nu = " << num(cert.nu);
  std::cout << "\n  min eigenvalue of C = " << num(c.report.min_eig) << "\n  residual = "
            << num(c.report.residual) << "\n  spot checks: " << c.report.spot_checks
            << ", verification " << (c.report.passed ? "passed" : "FAILED") << "\n";
  for (const auto& f : c.report.failures) std::cout << "  " << f << "\n";
  if (c.representation)
    std::cout << "  determinantal representation: det D(z) = " << num(c.representation->sign)
              << " * ell(z)^(n-2) * f(z), max relative error "
              << num(c.representation->max_rel_error) << "\n";
}

int report_verdict(const RunConfig& cfg, const Verdict& v) {
  write_json(cfg, io::verdict_to_json(v));
  if (const auto* c = std::get_if<Certified>(&v)) {
    std::cout << "verdict: CERTIFIED\n";
    print_certificate(*c);
    return kOk;
  }
  if (const auto* r = std::get_if<Refuted>(&v)) {
    std::cout << "verdict: REFUTED\n";
    print_witness(r->witness);
    return kRefuted;
  }
  const auto& u = std::get<Unknown>(v);
  std::cout << "verdict: UNKNOWN\n";
  for (const auto& b : u.branches) {
    std::cout << "  sigma " << (b.sigma > 0 ? "+1" : "-1") << ": " << sdp::to_string(b.status);
    if (b.farkas_tau) std::cout << " (verified dual ray, tau = " << num(*b.farkas_tau) << ")";
    std::cout << "\n";
  }
  for (const auto& d : u.diagnostics) std::cout << "  " << d << "\n";
  if (u.sampling) print_stats(*u.sampling);
  return kUnknown;
}

template <typename F>
std::optional<Witness> search_witness(const F& f, const ConeSpec& K, const RunConfig& cfg,
                                      SampleStats& stats) {
  const SampleResult s = hyperbolicity_sample(f, K, cfg.samples, cfg.seed);
  stats = s.stats;
  if (s.witness) return s.witness;
  return minimize_interior_zero(f, K, 20, cfg.seed);
}

std::optional<Witness> search_witness(const io::Problem& p, const ConeSpec& K, const RunConfig& cfg,
                                      SampleStats& stats) {
  if (p.kind == io::ProblemKind::Determinantal) return search_witness(p.det, K, cfg, stats);
  return search_witness(p.quad, K, cfg, stats);
}

Witness check(const io::Problem& p, const ConeSpec& K, const VectorXcd& z) {
  if (p.kind == io::ProblemKind::Determinantal) return check_witness(p.det, K, z);
  return check_witness(p.quad, K, z);
}

int run_certify(const RunConfig& cfg) {
  const io::Problem p = io::load_problem(cfg.input);
  const ConeSpec K = resolve_cone(cfg, p);
  const CertifyOptions opts = certify_options(cfg);
  Verdict v = Unknown{};
  if (p.kind == io::ProblemKind::Determinantal) {
    auto shortcut = stability_shortcuts(p.det, K);
    v = shortcut ? *shortcut : certify_determinantal(p.det, K, opts);
  } else {
    v = certify_quadratic(p.quad, K, opts);
  }
  if (auto* u = std::get_if<Unknown>(&v)) {
    if (const auto z = p.witness) {
      const Witness w = check(p, K, *z);
      if (w.accepted) return report_verdict(cfg, Refuted{w});
      u->diagnostics.push_back("supplied witness rejected: " + w.reason);
    }
    if (!u->sampling) {
      SampleStats stats;
      if (auto w = search_witness(p, K, cfg, stats)) return report_verdict(cfg, Refuted{*w});
      u->sampling = stats;
      u->diagnostics.push_back("no interior zero found by sampling or local search");
    }
  }
  return report_verdict(cfg, v);
}

int run_refute(const RunConfig& cfg) {
  const io::Problem p = io::load_problem(cfg.input);
  const ConeSpec K = resolve_cone(cfg, p);
  if (const auto z = resolve_witness(cfg, p)) {
    const Witness w = check(p, K, *z);
    write_json(cfg, json{{"refuted", w.accepted}, {"witness", io::witness_to_json(w)}});
    std::cout << (w.accepted ? "REFUTED\n" : "NOT REFUTED\n");
    print_witness(w);
    return w.accepted ? kRefuted : kUnknown;
  }
  SampleStats stats;
  const auto w = search_witness(p, K, cfg, stats);
  json doc{{"refuted", w.has_value()},
           {"sampling",
            {{"samples", stats.samples},
             {"degree_drops", stats.degree_drops},
             {"sign_changes", stats.sign_changes},
             {"root_failures", stats.root_failures},
             {"max_imag_ratio", stats.max_imag_ratio}}}};
  if (w) doc["witness"] = io::witness_to_json(*w);
  write_json(cfg, doc);
  std::cout << (w ? "REFUTED\n" : "NO COUNTEREXAMPLE FOUND\n");
  print_stats(stats);
  if (w) print_witness(*w);
  return w ? kRefuted : kUnknown;
}

int run_scale(const RunConfig& cfg) {
  const io::Problem p = io::load_problem(cfg.input);
  if (p.kind != io::ProblemKind::Determinantal)
    throw ParseError("scale: expects a determinantal problem");
  const ConeSpec K = resolve_cone(cfg, p);
  ScaleOptions opts;
  opts.transform = p.transform;
  opts.sdp = certify_options(cfg).sdp;
  ScaleResult r;
  try {
    r = scale_certify(p.det.pencil, K, opts);
  } catch (const ScalingPreconditionError& e) {
    r.message = e.what();
  } catch (const UnboundedSliceError& e) {
    r.message = e.what();
  }
  json doc{{"ok", r.ok}, {"nu_star", r.nu_star}};
  if (!r.message.empty()) doc["message"] = r.message;
  if (r.certificate.C.size() > 0) {
    doc["transform"] = io::to_json(r.transform)["re"];
    doc["certificate"] = io::certificate_to_json(r.certificate, r.report);
  }
  write_json(cfg, doc);
  std::cout << (r.ok ? "SCALED\n" : "SCALING FAILED\n") << "  nu* = " << num(r.nu_star) << "\n";
  if (r.certificate.C.size() > 0)
    std::cout << "  min eigenvalue of C = " << num(r.report.min_eig) << "\n  residual = "
              << num(r.report.residual) << "\n  verification "
              << (r.report.passed ? "passed" : "FAILED") << "\n";
  if (!r.message.empty()) std::cout << "  " << r.message << "\n";
  return r.ok ? kOk : kUnknown;
}

int run_repr(const RunConfig& cfg) {
  const io::Problem p = io::load_problem(cfg.input);
  if (p.kind != io::ProblemKind::Quadratic) throw ParseError("repr: expects a quadratic problem");
  const Index n = p.n;
  const Inertia in = inertia(p.quad.A);
  double s = 0.0;
  if (in == Inertia{n - 1, 1, 0}) s = 1.0;
  else if (in == Inertia{1, n - 1, 0}) s = -1.0;
  if (s == 0.0) {
    std::cout << "NO REPRESENTATION\n  quadratic part has no Lorentzian signature\n";
    write_json(cfg, json{{"ok", false}, {"message", "no Lorentzian signature"}});
    return kUnknown;
  }
  const LorentzPencil lp = f_pencil(s * p.quad.A);
  json pencil = json::array();
  for (const auto& m : lp.F.coeffs) pencil.push_back(io::to_json(m));
  json doc{{"ok", true},
           {"ell", io::to_json(lp.ell)["re"]},
           {"transform", io::to_json(lp.T)["re"]},
           {"pencil", pencil},
           {"sign", -s}};
  std::cout << "REPRESENTATION\n  det F(z) = " << num(-s) << " * ell(z)^(n-2) * init(f)(z)\n  ell =";
  for (Index j = 0; j < n; ++j) std::cout << " " << num(lp.ell(j));
  std::cout << "\n";

  std::optional<ConeSpec> K;
  if (!cfg.cone.empty() || p.cone) K = resolve_cone(cfg, p);
  if (K) {
    const Verdict v = certify_quadratic(p.quad, *K, certify_options(cfg));
    const auto* c = std::get_if<Certified>(&v);
    if (c && c->representation) {
      json cert = io::certificate_to_json(c->certificate, c->report, c->representation);
      doc["certified"] = cert;
      std::cout << "  certified against the cone; representation from the certificate:\n";
      print_certificate(*c);
    } else {
      doc["certified"] = nullptr;
      std::cout << "  not certified against the cone\n";
    }
  }
  write_json(cfg, doc);
  return kOk;
}

int run_eval(const RunConfig& cfg) {
  const io::Problem p = io::load_problem(cfg.input);
  const auto z = resolve_witness(cfg, p);
  if (!z) throw ParseError("eval: pass a point with --witness or a \"witness\" field");
  const Complex value =
      p.kind == io::ProblemKind::Determinantal ? evaluate(p.det, *z) : evaluate(p.quad, *z);
  json doc{{"point", io::to_json(*z)}, {"value", {{"re", value.real()}, {"im", value.imag()}}}};
  std::cout << "f(z) = " << num(value) << "\n";
  if (!cfg.cone.empty() || p.cone) {
    const Witness w = check(p, resolve_cone(cfg, p), *z);
    doc["witness"] = io::witness_to_json(w);
    std::cout << "interior margin of Im z = " << num(w.interior_margin) << "\n";
  }
  write_json(cfg, doc);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certify or refute stability of polynomials with respect to spectrahedral cones"};
  app.require_subcommand(1, 1);
  RunConfig cfg;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("input", cfg.input, "problem document (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--cone", cfg.cone, "psd:m, orthant:n, lorentz:n or file:PATH (default: the problem's cone)");
    sub->add_option("--json", cfg.json_out, "write the machine-readable result to this path");
    sub->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
    sub->add_option("--samples", cfg.samples, "hyperbolicity samples")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--witness", cfg.witness, "complex point document (refute, eval)");
    sub->add_option("--sigma", cfg.sigma, "auto tries +1 then -1")
        ->capture_default_str()
        ->check(CLI::IsMember({"auto", "+1", "1", "-1"}));
    sub->add_option("--tol", cfg.tol, "SDP feasibility and residual tolerance (default 1e-8)")->check(CLI::PositiveNumber);
    sub->add_option("--max-iter", cfg.max_iter, "interior-point iteration cap (default 200)")->check(CLI::PositiveNumber);
    sub->add_option("--trace-cap", cfg.trace_cap, "trace bound of the feasibility program (default 1000 * block size)")
        ->check(CLI::PositiveNumber);
  };

  auto* certify = app.add_subcommand("certify", "certify stability; falls back to refutation");
  auto* refute = app.add_subcommand("refute", "check a witness or search for one");
  auto* scale = app.add_subcommand("scale", "maximize the scaling factor nu");
  auto* repr = app.add_subcommand("repr", "determinantal representation of a quadratic");
  auto* eval = app.add_subcommand("eval", "evaluate f at a complex point");
  for (auto* sub : {certify, refute, scale, repr, eval}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*certify) return run_certify(cfg);
    if (*refute) return run_refute(cfg);
    if (*scale) return run_scale(cfg);
    if (*repr) return run_repr(cfg);
    return run_eval(cfg);
  } catch (const ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
  } catch (const DimensionError& e) {
    std::cerr << "dimension error: " << e.what() << "\n";
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "input error: " << e.what() << "\n";
  }
  return kUsage;
}
