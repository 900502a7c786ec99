#pragma once

// Checks shared by the acceptance binary and the gtest property suites. Each
// returns pass/fail with a one-line detail string.

#include <functional>
#include <sstream>

#include "support.hpp"

namespace kstab::checks {

using testing::m2;

struct Outcome {
  bool pass = false;
  std::string detail;
};

inline std::string fmt(double x) {
  std::ostringstream s;
  s.precision(3);
  s << x;
  return s.str();
}

inline Outcome all_of(const std::vector<std::pair<std::string, Outcome>>& parts) {
  Outcome out{true, ""};
  for (const auto& [name, o] : parts) {
    out.pass = out.pass && o.pass;
    if (!out.detail.empty()) out.detail += "; ";
    out.detail += name + (o.pass ? " ok" : " FAILED") + (o.detail.empty() ? "" : " (" + o.detail + ")");
  }
  return out;
}

inline Verdict certify_problem(const io::Problem& p, const ConeSpec& K, const CertifyOptions& opts = {}) {
  return p.kind == io::ProblemKind::Determinantal ? certify_determinantal(p.det, K, opts)
                                                  : certify_quadratic(p.quad, K, opts);
}

// A known Choi matrix certifying the 2x2 determinantal instance against psd(2).
inline Outcome psd_determinantal_certified() {
  const io::Problem p = testing::load("psd2_determinantal.json");
  const ConeSpec K = *p.cone;
  const Verdict v = certify_determinantal(p.det, K);
  MatrixXd c(4, 4);
  c << 4, 1, 0, 2, 1, 8, 2, 0, 0, 2, 2, 0, 2, 0, 0, 4;
  ChoiCertificate cert;
  cert.l = 2;
  cert.d = 2;
  cert.C = c.cast<Complex>();
  const VerificationReport rep = verify_certificate(cert, K, p.det.pencil.coeffs);
  const bool ok = is_certified(v) && rep.passed && rep.residual <= 1e-9 && rep.min_eig >= -1e-9;
  return {ok, std::string("verdict ") + (is_certified(v) ? "certified" : "not certified") +
                  ", reference C residual " + fmt(rep.residual) + ", min eig " + fmt(rep.min_eig)};
}

inline Outcome identity_pencil_unique_choi() {
  const io::Problem p = testing::load("psd2_identity_pencil.json");
  const Verdict v = certify_determinantal(p.det, *p.cone);
  const auto* c = std::get_if<Certified>(&v);
  if (!c) return {false, "not certified"};
  MatrixXd expected(4, 4);
  expected << 1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 1;
  const double err = (c->certificate.C - expected.cast<Complex>()).cwiseAbs().maxCoeff();
  return {err <= 1e-6 && c->report.passed, "max entry error " + fmt(err)};
}

inline Outcome lorentz_alt_pencil_unknown(int samples = 10000) {
  const io::Problem p = testing::load("lorentz_alt_pencil.json");
  const ConeSpec K = *p.cone;
  const Verdict v = certify_determinantal(p.det, K);
  const auto* u = std::get_if<Unknown>(&v);
  if (!u) return {false, "verdict is not unknown"};
  bool rays = u->branches.size() == 2;
  std::string detail;
  for (const auto& b : u->branches) {
    rays = rays && b.status == sdp::Status::Infeasible && b.farkas_tau.has_value();
    detail += "sigma " + std::to_string(b.sigma) + " " + sdp::to_string(b.status) +
              (b.farkas_tau ? " tau " + fmt(*b.farkas_tau) : "") + ", ";
  }
  const SampleResult s = hyperbolicity_sample(p.det, K, samples, 42);
  detail += std::to_string(s.stats.samples) + " samples, witness " + (s.witness ? "found" : "none");
  return {rays && !s.witness, detail};
}

inline Outcome rotated_scaling_factor() {
  const io::Problem p = testing::load("psd2_rotated_scaling.json");
  ScaleOptions opts;
  opts.transform = p.transform;
  const ScaleResult r = scale_certify(p.det.pencil, *p.cone, opts);
  const bool range = r.nu_star >= 0.499 && r.nu_star <= 0.501;

  VectorXd e1 = VectorXd::Zero(3);
  e1(0) = 1.0;
  const ConeSpec Kt = custom_cone(r.M, e1);
  const auto half = scaled_target(r.target, r.nu_star / 2);
  const auto sol = sdp::solve(build_containment_system(r.M, half, 1, false));
  bool half_ok = sol.status == sdp::Status::Feasible;
  if (half_ok) {
    const ChoiCertificate cert = assemble_certificate(sol, r.M, half, 1, false);
    half_ok = verify_certificate(cert, Kt, half).passed;
  }
  return {range && r.ok && r.report.passed && half_ok,
          "nu* = " + fmt(r.nu_star) + ", certificate " + (r.report.passed ? "verified" : "rejected") +
              ", nu*/2 " + (half_ok ? "feasible" : "infeasible")};
}

inline double relative_identity_error(const std::function<double(const VectorXd&)>& lhs,
                                      const std::function<double(const VectorXd&)>& rhs, Index n,
                                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  double worst = 0.0;
  for (int k = 0; k < 7; ++k) {
    VectorXd z(n);
    for (Index j = 0; j < n; ++j) z(j) = normal(rng);
    const double r = rhs(z);
    worst = std::max(worst, std::abs(lhs(z) - r) / (1e-12 + std::abs(r)));
  }
  return worst;
}

inline Outcome lorentz_representation_identity() {
  const io::Problem p = testing::load("lorentzian_form_4var.json");
  const MatrixXd& A = p.quad.A;
  auto f = [&](const VectorXd& z) { return z.dot(A * z); };
  auto reference_pencil = [](const VectorXd& z) {
    const double l = 4 * z(0) + 2 * z(3);
    MatrixXd m(4, 4);
    m << l, 0, 0, z(0) + 2 * z(3), 0, l, 0, z(1), 0, 0, l, z(2), z(0) + 2 * z(3), z(1), z(2), l;
    return m;
  };
  const double reference_err = relative_identity_error(
      [&](const VectorXd& z) { return reference_pencil(z).determinant(); },
      [&](const VectorXd& z) { return -std::pow(4 * z(0) + 2 * z(3), 2) * f(z); }, 4, 11);
  const LorentzPencil lp = f_pencil(A);
  const double own_err = relative_identity_error(
      [&](const VectorXd& z) { return lp.F(z).determinant(); },
      [&](const VectorXd& z) { return -std::pow(lp.ell.dot(z), 2) * f(z); }, 4, 12);
  return {reference_err <= 1e-6 && own_err <= 1e-6,
          "reference pencil rel err " + fmt(reference_err) + ", f_pencil rel err " + fmt(own_err)};
}

inline Outcome non_stable_witnesses() {
  const io::Problem a = testing::load("orthant_factored_pencil.json");
  VectorXd y(3);
  y << 1, 2, 1;
  const auto wa = probe_direction(a.det, *a.cone, y);
  const io::Problem aq = testing::load("orthant_factored_form.json");
  const bool member = improj_contains(aq.quad, y);
  const bool a_ok = wa && wa->accepted && wa->kind == WitnessKind::DegreeDrop && member;

  const io::Problem b = testing::load("psd2_coordinate_product.json");
  VectorXcd zb(3);
  zb << Complex(0, 1), 0.0, Complex(0, 1);
  const Witness wb = check_witness(b.det, *b.cone, zb);

  const io::Problem c = testing::load("psd2_lorentz_determinant.json");
  const Witness wc = check_witness(c.det, *c.cone, *c.witness);
  const double alpha = std::sqrt(Complex(-3, 2)).imag();
  const bool c_ok = wc.accepted && wc.interior_margin > 0 && alpha > 1;

  return all_of({{"(a) degree-drop witness and membership",
                  {a_ok, wa ? "witness " + to_string(wa->kind) : "no witness"}},
                 {"(b) i*I", {wb.accepted, "|f| " + fmt(wb.f_residual)}},
                 {"(c)", {c_ok, "alpha " + fmt(alpha) + ", margin " + fmt(wc.interior_margin)}}});
}

// Brute-force solvability of f(x + i y) = 0 over real x by multi-start
// Levenberg-Marquardt on (Re f, Im f). Returns the smallest |f| found.
inline double min_abs_on_fiber(const QuadPoly& f, const VectorXd& y, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const Index n = f.num_vars();
  double best = std::numeric_limits<double>::infinity();
  for (int start = 0; start < 40 && best > 1e-10; ++start) {
    VectorXd x(n);
    for (Index j = 0; j < n; ++j) x(j) = 3.0 * normal(rng);
    double mu = 1e-3;
    for (int it = 0; it < 200; ++it) {
      const VectorXcd z = x.cast<Complex>() + Complex(0, 1) * y.cast<Complex>();
      const Complex v = f(z);
      const VectorXcd g = 2.0 * f.A.cast<Complex>() * z + f.b.cast<Complex>();
      Eigen::MatrixXd J(2, n);
      J.row(0) = g.real().transpose();
      J.row(1) = g.imag().transpose();
      Eigen::Vector2d r(v.real(), v.imag());
      const MatrixXd H = J.transpose() * J + mu * MatrixXd::Identity(n, n);
      const VectorXd step = H.ldlt().solve(-J.transpose() * r);
      const VectorXd xn = x + step;
      const double cur = std::abs(v);
      const double next = std::abs(f((xn.cast<Complex>() + Complex(0, 1) * y.cast<Complex>()).eval()));
      if (next < cur) {
        x = xn;
        mu = std::max(mu / 3, 1e-12);
      } else {
        mu *= 4;
      }
      if (std::min(cur, next) < 1e-13 || mu > 1e8) break;
    }
    best = std::min(best, std::abs(f((x.cast<Complex>() + Complex(0, 1) * y.cast<Complex>()).eval())));
  }
  return best;
}

inline Outcome type_ii_cross_check(int instances = 20) {
  std::mt19937_64 rng(33);
  std::normal_distribution<double> normal;
  int agree = 0, total = 0, members = 0;
  while (total < instances) {
    const MatrixXd A = testing::random_symmetric(3, rng);
    VectorXd b(3);
    for (Index j = 0; j < 3; ++j) b(j) = normal(rng);
    const QuadPoly f{A, b, normal(rng)};
    QuadClassification c;
    try {
      c = classify(f);
    } catch (const Error&) {
      continue;
    }
    if (c.q_type != QuadType::II || c.r != 3 || (c.p != 1 && c.p != 2)) continue;
    VectorXd y(3);
    for (Index j = 0; j < 3; ++j) y(j) = normal(rng);
    const bool claimed = improj_contains(f, y);
    const double residual = min_abs_on_fiber(f, y, 100 + std::uint64_t(total));
    const bool brute = residual <= 1e-6;
    const bool brute_no = residual > 1e-3;
    if ((claimed && brute) || (!claimed && brute_no)) ++agree;
    members += claimed ? 1 : 0;
    ++total;
  }
  return {agree >= instances - 1, std::to_string(agree) + "/" + std::to_string(total) + " agree (" +
                                      std::to_string(members) + " members)"};
}

inline Outcome khatri_rao_positivity(int instances = 100) {
  std::mt19937_64 rng(51);
  double worst = std::numeric_limits<double>::infinity();
  for (int k = 0; k < instances; ++k) {
    const Index l = 1 + k % 4, d = 1 + (k / 4) % 3;
    const MatrixXd M = testing::random_psd(l, 1 + k % l, rng);
    const MatrixXd C = testing::random_psd(l * d, 1 + k % (l * d), rng);
    worst = std::min(worst, min_eigenvalue(khatri_rao(M, C, d)));
  }
  return {worst >= -1e-9, "smallest eigenvalue " + fmt(worst)};
}

inline Outcome sylvester_inertia(int instances = 100) {
  std::mt19937_64 rng(52);
  std::uniform_real_distribution<double> scale(0.5, 2.0);
  int agree = 0;
  for (int k = 0; k < instances; ++k) {
    const Index n = 2 + k % 5;
    MatrixXd A = testing::random_symmetric(n, rng);
    if (k % 3 == 0) {  // rank deficient
      const auto e = sym_eigen(A);
      VectorXd v = e.values;
      v(0) = 0.0;
      A = e.vectors * v.asDiagonal() * e.vectors.transpose();
    }
    const auto q = sym_eigen(testing::random_symmetric(n, rng)).vectors;
    VectorXd s(n);
    for (Index j = 0; j < n; ++j) s(j) = scale(rng);
    const MatrixXd S = q * s.asDiagonal() * sym_eigen(testing::random_symmetric(n, rng)).vectors;
    if (inertia(A) == inertia(MatrixXd(S.transpose() * A * S))) ++agree;
  }
  return {agree == instances, std::to_string(agree) + "/" + std::to_string(instances) + " preserved"};
}

struct CertifiedFixture {
  std::string name;
  Verdict verdict;
  io::Problem problem;
  ConeSpec cone;
};

inline const std::vector<std::string>& fixture_corpus() {
  static const std::vector<std::string> names{"psd2_determinantal.json",  "psd2_identity_pencil.json",       "lorentz_alt_pencil.json",
                                              "orthant_factored_pencil.json",  "psd2_coordinate_product.json",        "psd2_lorentz_determinant.json",
                                              "hermitian.json", "lorentz_quad.json", "orthant_factored_form.json"};
  return names;
}

inline Outcome certificate_soundness(int samples = 1000) {
  int certified = 0, clean = 0;
  std::string failures;
  for (const auto& name : fixture_corpus()) {
    const io::Problem p = testing::load(name);
    const Verdict v = certify_problem(p, *p.cone);
    if (!is_certified(v)) continue;
    ++certified;
    const SampleResult s = p.kind == io::ProblemKind::Determinantal
                               ? hyperbolicity_sample(p.det, *p.cone, samples, 7)
                               : hyperbolicity_sample(p.quad, *p.cone, samples, 7);
    if (!s.witness) ++clean;
    else failures += " " + name;
  }
  return {certified > 0 && clean == certified,
          std::to_string(clean) + "/" + std::to_string(certified) + " certified fixtures clean" + failures};
}

inline Outcome constant_term_independence(int replacements = 10) {
  std::mt19937_64 rng(53);
  int checked = 0, same = 0;
  for (const auto& name : fixture_corpus()) {
    const io::Problem p = testing::load(name);
    if (p.kind != io::ProblemKind::Determinantal) continue;
    const std::size_t base = certify_determinantal(p.det, *p.cone).index();
    for (int k = 0; k < replacements; ++k) {
      DetPoly g = p.det;
      g.pencil.constant = testing::random_hermitian(g.pencil.size(), rng);
      ++checked;
      if (certify_determinantal(g, *p.cone).index() == base) ++same;
    }
  }
  return {checked > 0 && same == checked,
          std::to_string(same) + "/" + std::to_string(checked) + " verdicts unchanged"};
}

inline Outcome shortcut_agreement(int instances = 20) {
  std::mt19937_64 rng(54);
  int both = 0;
  for (int k = 0; k < instances; ++k) {
    const Index n = 2 + k % 3, d = 2 + k % 2;
    DetPoly f;
    for (Index p = 0; p < n; ++p) {
      // Odd instances use complex Hermitian coefficients G G^*.
      MatrixXcd g = testing::random_psd(d, d, rng).cast<Complex>();
      if (k % 2 == 1) g += Complex(0, 1) * testing::random_symmetric(d, rng);
      f.pencil.coeffs.push_back(k % 2 == 1 ? MatrixXcd(g * g.adjoint()) : g);
    }
    const ConeSpec K = orthant_pencil(n);
    const auto shortcut = stability_shortcuts(f, K);
    const Verdict general = certify_determinantal(f, K);
    if (shortcut && is_certified(*shortcut) && is_certified(general)) ++both;
  }
  return {both == instances, std::to_string(both) + "/" + std::to_string(instances) + " certified by both"};
}

inline Outcome property_suites() {
  return all_of({{"Khatri-Rao", khatri_rao_positivity()},
                 {"Sylvester", sylvester_inertia()},
                 {"soundness", certificate_soundness()},
                 {"A0-independence", constant_term_independence()},
                 {"shortcut agreement", shortcut_agreement()}});
}

}  // namespace kstab::checks
