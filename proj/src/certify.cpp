#include "kstab/certify.hpp"

#include <random>

#include <Eigen/QR>

namespace kstab {
namespace {

bool has_imaginary(const std::vector<MatrixXcd>& mats) {
  for (const auto& m : mats)
    if (m.size() > 0 && m.imag().cwiseAbs().maxCoeff() != 0.0) return true;
  return false;
}

bool near_identity_multiple(const MatrixXd& m, double& alpha) {
  alpha = m.rows() > 0 ? m(0, 0) : 0.0;
  const MatrixXd diff = m - alpha * MatrixXd::Identity(m.rows(), m.cols());
  return alpha > 0.0 && diff.cwiseAbs().maxCoeff() <= 1e-9 * (1.0 + std::abs(alpha));
}

// sum_ij (M)_ij C_ij for a complex block grid.
MatrixXcd compress(const MatrixXd& M, const MatrixXcd& C, Index d) {
  return compress_blocks(M, C, d);
}

double target_scale(const ChoiCertificate& cert, Index p) {
  return (cert.scaled && p == 0) ? 1.0 : cert.nu;
}

std::pair<double, Index> residual_of(const ChoiCertificate& cert, const SymPencil& M,
                                     const std::vector<MatrixXcd>& target) {
  double worst = 0.0;
  Index where = -1;
  for (Index p = 0; p < M.num_vars(); ++p) {
    const MatrixXcd lhs = compress(M.coeffs[std::size_t(p)], cert.C, cert.d);
    const MatrixXcd rhs =
        double(cert.sigma) * target_scale(cert, p) * target[std::size_t(p)];
    const double r = (lhs - rhs).norm();
    if (r > worst || where < 0) {
      worst = r;
      where = p;
    }
  }
  return {worst, where};
}

double min_eig_of(const MatrixXcd& C) {
  if (C.imag().cwiseAbs().maxCoeff() == 0.0) return min_eigenvalue(MatrixXd(C.real()));
  return min_eigenvalue(C);
}

void check_dims(const SymPencil& M, const std::vector<MatrixXcd>& target) {
  if (Index(target.size()) != M.num_vars())
    throw DimensionError("containment system: cone and target have different variable counts");
  if (target.empty()) throw DimensionError("containment system: no variables");
  const Index d = target.front().rows();
  for (const auto& t : target)
    if (t.rows() != d || t.cols() != d)
      throw DimensionError("containment system: target matrices differ in size");
}

QuadPoly initial_quadratic(const QuadPoly& f) {
  return QuadPoly{f.A, VectorXd::Zero(f.num_vars()), 0.0};
}

// Sign s with s * A of inertia (n-1, 1, 0), or 0 if neither sign works.
int lorentz_sign(const SymMatrix& A) {
  const Index n = A.rows();
  const Inertia in = inertia(A);
  if (in == Inertia{n - 1, 1, 0}) return 1;
  if (in == Inertia{1, n - 1, 0}) return -1;
  return 0;
}

std::vector<MatrixXcd> complex_coeffs(const SymPencil& p) {
  std::vector<MatrixXcd> out;
  for (const auto& a : p.coeffs) out.push_back(a.cast<Complex>());
  return out;
}

Verdict try_refute(const QuadPoly& f, const ConeSpec& K, const CertifyOptions& opts,
                   Unknown unknown) {
  const SampleResult sample = hyperbolicity_sample(f, K, opts.samples, opts.seed);
  if (sample.witness) return Refuted{*sample.witness};
  if (auto w = minimize_interior_zero(f, K, 20, opts.seed)) return Refuted{*w};
  unknown.sampling = sample.stats;
  unknown.diagnostics.push_back("no interior zero found by sampling or local search");
  return unknown;
}

// Runs the containment system for every requested sign.
std::optional<Certified> run_branches(const SymPencil& M, const ConeSpec& K,
                                      const std::vector<MatrixXcd>& target,
                                      const CertifyOptions& opts, Unknown& unknown) {
  for (int sigma : opts.sigmas) {
    BranchReport br;
    br.sigma = sigma;
    const sdp::SdpProblem prob = build_containment_system(M, target, sigma, false);
    const sdp::SdpSolution sol = sdp::solve(prob, opts.sdp);
    br.status = sol.status;
    br.lambda = sol.lambda;
    br.iterations = sol.iterations;
    br.message = sol.message;
    if (sol.farkas) br.farkas_tau = sol.farkas->tau;
    unknown.branches.push_back(br);
    if (sol.status != sdp::Status::Feasible) continue;
    Certified c;
    c.certificate = assemble_certificate(sol, M, target, sigma, false);
    c.report = verify_certificate(c.certificate, K, target);
    c.route = "sdp";
    if (c.report.passed) return c;
    unknown.diagnostics.push_back("sigma = " + std::to_string(sigma) +
                                  ": solver point failed verification");
  }
  return std::nullopt;
}

}  // namespace

sdp::SdpProblem build_containment_system(const SymPencil& M, const std::vector<MatrixXcd>& target,
                                         int sigma, bool scaled) {
  check_dims(M, target);
  if (sigma != 1 && sigma != -1) throw DimensionError("containment system: sigma must be +1 or -1");
  const Index n = M.num_vars();
  const Index l = M.size();
  const Index d = target.front().rows();
  const bool herm = has_imaginary(target);
  const Index D = herm ? 2 * d : d;

  std::vector<MatrixXd> rhs;
  for (const auto& t : target) rhs.push_back(herm ? herm_to_real_embed(t) : MatrixXd(t.real()));

  if (scaled) {
    double alpha = 0.0, beta = 0.0;
    if (!near_identity_multiple(M.coeffs.front(), alpha) || std::abs(alpha - 1.0) > 1e-9)
      throw ScalingPreconditionError("scaled system: first cone coefficient is not the identity");
    if (!near_identity_multiple(rhs.front(), beta) || std::abs(beta - 1.0) > 1e-9)
      throw ScalingPreconditionError("scaled system: first target coefficient is not the identity");
  }

  sdp::SdpProblem prob;
  prob.block_dim = l * D;
  prob.has_scalar = scaled;
  prob.objective = scaled ? sdp::Objective::MaximizeNu : sdp::Objective::MaximizeMargin;
  for (Index p = 0; p < n; ++p) {
    const MatrixXd& Mp = M.coeffs[std::size_t(p)];
    const MatrixXd& Tp = rhs[std::size_t(p)];
    for (Index a = 0; a < D; ++a) {
      for (Index b = a; b < D; ++b) {
        MatrixXd A = MatrixXd::Zero(l * D, l * D);
        for (Index i = 0; i < l; ++i)
          for (Index j = 0; j < l; ++j) {
            const double m = Mp(i, j);
            if (m == 0.0) continue;
            A(i * D + a, j * D + b) += 0.5 * m;
            A(j * D + b, i * D + a) += 0.5 * m;
          }
        sdp::Constraint c;
        c.A = std::move(A);
        if (scaled && p > 0) {
          c.g = -double(sigma) * Tp(a, b);
          c.b = 0.0;
        } else {
          c.b = double(sigma) * Tp(a, b);
        }
        prob.constraints.push_back(std::move(c));
      }
    }
  }
  return prob;
}

ChoiCertificate assemble_certificate(const sdp::SdpSolution& sol, const SymPencil& M,
                                     const std::vector<MatrixXcd>& target, int sigma, bool scaled) {
  check_dims(M, target);
  ChoiCertificate cert;
  cert.sigma = sigma;
  cert.scaled = scaled;
  cert.nu = scaled ? sol.nu : 1.0;
  cert.l = M.size();
  cert.d = target.front().rows();
  const Index d = cert.d;
  const bool herm = has_imaginary(target);
  const Index D = herm ? 2 * d : d;
  if (sol.X.rows() != cert.l * D) throw DimensionError("assemble_certificate: solution has wrong size");
  cert.C.resize(cert.l * d, cert.l * d);
  for (Index i = 0; i < cert.l; ++i)
    for (Index j = 0; j < cert.l; ++j) {
      const MatrixXd blk = sol.X.block(i * D, j * D, D, D);
      cert.C.block(i * d, j * d, d, d) = herm ? real_to_herm(blk) : MatrixXcd(blk.cast<Complex>());
    }
  cert.C = (0.5 * (cert.C + cert.C.adjoint())).eval();
  cert.min_eig = min_eig_of(cert.C);
  cert.residual = residual_of(cert, M, target).first;
  return cert;
}

VerificationReport verify_certificate(const ChoiCertificate& cert, const ConeSpec& K,
                                      const std::vector<MatrixXcd>& target) {
  VerificationReport rep;
  check_dims(K.pencil, target);
  if (cert.l != K.block_size() || cert.d != target.front().rows() ||
      cert.C.rows() != cert.l * cert.d || cert.C.cols() != cert.l * cert.d) {
    rep.failures.push_back("certificate shape does not match cone and target");
    return rep;
  }
  if ((cert.C - cert.C.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + cert.C.norm()))
    rep.failures.push_back("block matrix is not Hermitian");

  const double trace = std::abs(cert.C.trace().real());
  rep.min_eig = min_eig_of(cert.C);
  rep.min_eig_tol = -1e-7 * (1.0 + trace);
  if (rep.min_eig < rep.min_eig_tol)
    rep.failures.push_back("block matrix has eigenvalue " + std::to_string(rep.min_eig));

  double tnorm = 0.0;
  for (Index p = 0; p < Index(target.size()); ++p)
    tnorm = std::max(tnorm, target_scale(cert, p) * target[std::size_t(p)].norm());
  const auto [res, where] = residual_of(cert, K.pencil, target);
  rep.residual = res;
  rep.worst_constraint = where;
  rep.residual_tol = 1e-7 * (1.0 + tnorm);
  if (rep.residual > rep.residual_tol)
    rep.failures.push_back("constraint " + std::to_string(where + 1) + " violated by " +
                           std::to_string(res));

  rep.spot_khatri_rao = std::numeric_limits<double>::infinity();
  rep.spot_compressed = std::numeric_limits<double>::infinity();
  for (const VectorXd& x : sample_interior(K, 20, 2024)) {
    const MatrixXd Mx = K.pencil(x);
    const MatrixXcd kr = khatri_rao(Mx, cert.C, cert.d);
    const MatrixXcd cm = compress(Mx, cert.C, cert.d);
    const double kmin = min_eig_of(kr) / (1.0 + kr.norm());
    const double cmin = min_eig_of(cm) / (1.0 + cm.norm());
    rep.spot_khatri_rao = std::min(rep.spot_khatri_rao, kmin);
    rep.spot_compressed = std::min(rep.spot_compressed, cmin);
    ++rep.spot_checks;
  }
  if (rep.spot_khatri_rao < -1e-8)
    rep.failures.push_back("Khatri-Rao spot check failed: " + std::to_string(rep.spot_khatri_rao));
  if (rep.spot_compressed < -1e-8)
    rep.failures.push_back("compressed spot check failed: " + std::to_string(rep.spot_compressed));
  rep.passed = rep.failures.empty();
  return rep;
}

std::optional<Verdict> stability_shortcuts(const DetPoly& f, const ConeSpec& K) {
  if (K.kind != ConeKind::Orthant && K.kind != ConeKind::Psd) return std::nullopt;
  if (f.num_vars() != K.num_vars())
    throw DimensionError("stability_shortcuts: polynomial and cone disagree in variable count");
  const Index d = f.pencil.size();
  const auto& A = f.pencil.coeffs;

  // A zero polynomial is stable under neither criterion.
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  bool nonzero = false;
  for (int k = 0; k < 3 && !nonzero; ++k) {
    VectorXcd z(f.num_vars());
    for (Index j = 0; j < z.size(); ++j) z(j) = Complex(normal(rng), normal(rng));
    double scale = f.pencil.constant ? f.pencil.constant->norm() : 0.0;
    for (Index j = 0; j < z.size(); ++j) scale += A[std::size_t(j)].norm() * std::abs(z(j));
    nonzero = std::abs(evaluate(f, z)) > 1e-12 * (1.0 + std::pow(scale, double(d)));
  }
  if (!nonzero) return std::nullopt;

  ChoiCertificate cert;
  cert.sigma = 1;
  cert.nu = 1.0;
  cert.d = d;
  if (K.kind == ConeKind::Orthant) {
    const Index n = K.size;
    for (const auto& a : A)
      if (min_eigenvalue(a) < -1e-9 * (1.0 + a.norm())) return std::nullopt;
    cert.l = n;
    cert.C = MatrixXcd::Zero(n * d, n * d);
    for (Index p = 0; p < n; ++p) cert.C.block(p * d, p * d, d, d) = A[std::size_t(p)];
  } else {
    const Index m = K.size;
    cert.l = m;
    cert.C = MatrixXcd::Zero(m * d, m * d);
    for (Index p = 0; p < K.num_vars(); ++p) {
      const auto [i1, j1] = K.variable_labels[std::size_t(p)];
      const Index i = i1 - 1, j = j1 - 1;
      if (i == j) {
        cert.C.block(i * d, i * d, d, d) = A[std::size_t(p)];
      } else {
        cert.C.block(i * d, j * d, d, d) = 0.5 * A[std::size_t(p)];
        cert.C.block(j * d, i * d, d, d) = 0.5 * A[std::size_t(p)].adjoint();
      }
    }
    if (min_eig_of(cert.C) < -1e-9 * (1.0 + cert.C.norm())) return std::nullopt;
  }
  cert.min_eig = min_eig_of(cert.C);
  cert.residual = residual_of(cert, K.pencil, A).first;
  Certified c;
  c.certificate = cert;
  c.report = verify_certificate(cert, K, A);
  c.route = "shortcut";
  if (!c.report.passed) return std::nullopt;
  return Verdict{c};
}

Verdict certify_determinantal(const DetPoly& f, const ConeSpec& K, const CertifyOptions& opts) {
  if (f.num_vars() != K.num_vars())
    throw DimensionError("certify_determinantal: polynomial and cone disagree in variable count");
  Unknown unknown;
  try {
    validate(f.pencil);
    const MatrixPencil lead{std::nullopt, f.pencil.coeffs};
    const auto dir = sdp::find_interior_direction(lead, opts.sdp);
    if (dir.status != sdp::Status::Feasible) {
      unknown.diagnostics.push_back("no direction with positive definite coefficient sum found (margin " +
                                    std::to_string(dir.margin) + ")");
      return unknown;
    }
    const MatrixPencil init = init_form(f, dir.e);
    if (auto c = run_branches(K.pencil, K, init.coeffs, opts, unknown)) return *c;
    unknown.diagnostics.push_back("containment system not certified for any sign");
  } catch (const Error& e) {
    unknown.diagnostics.push_back(e.what());
  }
  return unknown;
}

Verdict certify_quadratic(const QuadPoly& f, const ConeSpec& K, const CertifyOptions& opts) {
  const Index n = f.num_vars();
  if (n < 3) throw DimensionError("certify_quadratic: needs at least 3 variables");
  if (K.num_vars() != n)
    throw DimensionError("certify_quadratic: polynomial and cone disagree in variable count");
  Unknown unknown;
  QuadClassification cls;
  try {
    cls = classify(f);
  } catch (const Error& e) {
    unknown.diagnostics.push_back(e.what());
    return unknown;
  }
  if (cls.q_type == QuadType::III || (cls.q_type == QuadType::II && cls.p == 1)) {
    unknown.diagnostics.push_back("type " + to_string(cls.q_type) + " with p = " +
                                  std::to_string(cls.p) +
                                  ": no full-dimensional conic complement component");
    return try_refute(f, K, opts, std::move(unknown));
  }
  const int s = lorentz_sign(f.A);
  if (s == 0) {
    unknown.diagnostics.push_back("SignatureError: quadratic part has no Lorentzian signature");
    return unknown;
  }
  try {
    const LorentzPencil lp = f_pencil(double(s) * f.A);
    const auto target = complex_coeffs(lp.F);
    if (auto c = run_branches(K.pencil, K, target, opts, unknown)) {
      try {
        c->representation = extract_determinantal_rep(c->certificate, initial_quadratic(f), K);
      } catch (const IdentityCheckError& e) {
        unknown.diagnostics.push_back(e.what());
      }
      return *c;
    }
    unknown.diagnostics.push_back("containment system not certified for any sign");
  } catch (const Error& e) {
    unknown.diagnostics.push_back(e.what());
  }
  return unknown;
}

DeterminantalRep extract_determinantal_rep(const ChoiCertificate& cert, const QuadPoly& f,
                                           const ConeSpec& K) {
  const Index n = f.num_vars();
  if (K.num_vars() != n) throw DimensionError("extract_determinantal_rep: variable counts differ");
  const int s = lorentz_sign(f.A);
  if (s == 0) throw SignatureError("extract_determinantal_rep: no Lorentzian signature");
  const LorentzPencil lp = f_pencil(double(s) * f.A);

  DeterminantalRep rep;
  rep.ell = lp.ell;
  for (Index p = 0; p < n; ++p) rep.D.coeffs.push_back(compress(K.pencil.coeffs[std::size_t(p)], cert.C, cert.d));
  if (rep.D.size() != n) throw DimensionError("extract_determinantal_rep: certificate block size differs from n");
  // det D = sigma^n det F = -sigma^n s ell^{n-2} f.
  const double sigma_n = (n % 2 == 0) ? 1.0 : double(cert.sigma);
  rep.sign = -sigma_n * double(s);

  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  for (int k = 0; k < 7; ++k) {
    VectorXd z(n);
    for (Index j = 0; j < n; ++j) z(j) = normal(rng);
    const Complex det = complex_det(rep.D(z.cast<Complex>()));
    const double rhs = rep.sign * std::pow(rep.ell.dot(z), double(n - 2)) * f(z.cast<Complex>()).real();
    const double err = std::abs(det - rhs) / (1e-12 + std::abs(rhs));
    rep.max_rel_error = std::max(rep.max_rel_error, err);
  }
  if (rep.max_rel_error > 1e-6)
    throw IdentityCheckError("extract_determinantal_rep: determinant identity fails (relative error " +
                             std::to_string(rep.max_rel_error) + ")");
  if (K.kind == ConeKind::Psd)
    for (Index i = 0; i < cert.l; ++i)
      if (min_eig_of(cert.block(i, i)) < -1e-8) rep.diagonal_blocks_psd = false;
  return rep;
}

std::vector<MatrixXcd> scaled_target(const std::vector<MatrixXcd>& target, double nu) {
  std::vector<MatrixXcd> out = target;
  for (std::size_t p = 1; p < out.size(); ++p) out[p] *= nu;
  return out;
}

ScaleResult scale_certify(const MatrixPencil& N, const ConeSpec& K, const ScaleOptions& opts) {
  const Index n = K.num_vars();
  if (N.num_vars() != n) throw DimensionError("scale_certify: pencils disagree in variable count");
  validate(N);

  MatrixXd T = MatrixXd::Identity(n, n);
  if (opts.transform) {
    T = *opts.transform;
  } else if (opts.auto_transform) {
    // First column c with M(c) and N(c) both multiples of I; completed by an
    // orthonormal basis of its complement.
    const Index l = K.block_size(), d = N.size();
    MatrixXd sys = MatrixXd::Zero(l * l + 2 * d * d, n + 1);
    VectorXd rhs = VectorXd::Zero(l * l + 2 * d * d);
    for (Index j = 0; j < n; ++j) {
      sys.col(j).head(l * l) = K.pencil.coeffs[std::size_t(j)].reshaped();
      const MatrixXcd& Nj = N.coeffs[std::size_t(j)];
      sys.col(j).segment(l * l, d * d) = Nj.real().reshaped();
      sys.col(j).tail(d * d) = Nj.imag().reshaped();
    }
    rhs.head(l * l) = MatrixXd::Identity(l, l).reshaped();
    sys.col(n).segment(l * l, d * d) = -MatrixXd::Identity(d, d).reshaped();
    const VectorXd sol = sys.colPivHouseholderQr().solve(rhs);
    if ((sys * sol - rhs).norm() > 1e-9 * (1.0 + rhs.norm()) || !(sol(n) > 0.0))
      throw ScalingPreconditionError("scale_certify: no direction maps both pencils to a multiple of I");
    const VectorXd c = sol.head(n).normalized();
    const MatrixXd Q = Eigen::HouseholderQR<MatrixXd>(c).householderQ();
    T.col(0) = c;
    for (Index j = 1; j < n; ++j) T.col(j) = Q.col(j);
  }

  SymPencil M = change_of_variables(K.pencil, T);
  MatrixPencil Nt = change_of_variables(N, T);
  double alpha = 0.0, beta = 0.0;
  if (!near_identity_multiple(M.coeffs.front(), alpha))
    throw ScalingPreconditionError("scale_certify: first cone coefficient is not a positive multiple of I");
  const MatrixXcd& N1 = Nt.coeffs.front();
  if (N1.imag().cwiseAbs().maxCoeff() > 1e-12 || !near_identity_multiple(N1.real(), beta))
    throw ScalingPreconditionError("scale_certify: first target coefficient is not a positive multiple of I");
  for (auto& m : M.coeffs) m /= alpha;
  for (auto& m : Nt.coeffs) m /= beta;
  M.coeffs.front() = MatrixXd::Identity(M.size(), M.size());
  Nt.coeffs.front() = MatrixXcd::Identity(Nt.size(), Nt.size());

  VectorXd e1 = VectorXd::Zero(n);
  e1(0) = 1.0;
  if (!sdp::slice_bounded(M, e1, opts.sdp))
    throw UnboundedSliceError("scale_certify: the slice x_1 = 1 of the cone is not bounded");

  ScaleResult out;
  out.M = M;
  out.target = Nt.coeffs;
  out.transform = T;
  const ConeSpec Kt = custom_cone(M, e1);
  const sdp::SdpProblem prob = build_containment_system(M, out.target, 1, true);
  const sdp::SdpSolution sol = sdp::solve(prob, opts.sdp);
  if (sol.status != sdp::Status::Feasible) {
    out.message = "nu maximization " + sdp::to_string(sol.status) + ": " + sol.message;
    return out;
  }
  out.nu_star = sol.nu;
  out.certificate = assemble_certificate(sol, M, out.target, 1, true);
  out.report = verify_certificate(out.certificate, Kt, out.target);
  out.ok = out.report.passed && out.nu_star > 0.0;
  if (!out.report.passed) out.message = "certificate at nu* failed verification";
  else if (!(out.nu_star > 0.0)) out.message = "optimal nu is not positive";
  return out;
}

}  // namespace kstab
