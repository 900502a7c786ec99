#pragma once

// Containment certificates: the block-matrix semidefinite systems, the
// determinantal and quadratic pipelines, independent verification,
// determinantal representations and the cone-scaling factor.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "kstab/quadratic.hpp"
#include "kstab/refute.hpp"
#include "kstab/sdp.hpp"

namespace kstab {

/// Block matrix C = (C_ij), an l x l grid of d x d Hermitian blocks, with
/// sum_ij (M_p)_ij C_ij = sigma * nu_p * target_p for every p, where nu_p = nu
/// except nu_1 = 1 in scaled mode.
struct ChoiCertificate {
  int sigma = 1;
  double nu = 1.0;
  bool scaled = false;
  Index l = 0;
  Index d = 0;
  MatrixXcd C;  // (l d) x (l d)
  double min_eig = 0.0;
  double residual = 0.0;

  MatrixXcd block(Index i, Index j) const { return C.block(i * d, j * d, d, d); }
  bool is_real() const { return C.imag().cwiseAbs().maxCoeff() == 0.0; }
};

struct VerificationReport {
  bool passed = false;
  double min_eig = 0.0;
  double min_eig_tol = 0.0;
  double residual = 0.0;
  double residual_tol = 0.0;
  Index worst_constraint = -1;  // 0-based p with the largest residual
  double spot_khatri_rao = 0.0;  // smallest eigenvalue over the spot checks
  double spot_compressed = 0.0;
  int spot_checks = 0;
  std::vector<std::string> failures;
};

struct DeterminantalRep {
  VectorXd ell;     // linear form coefficients
  MatrixPencil D;   // D_p = sum_ij (M_p)_ij C_ij
  double sign = -1.0;  // det D(z) = sign * ell(z)^{n-2} * f(z)
  double max_rel_error = 0.0;
  bool diagonal_blocks_psd = true;  // psd cones: every C_ii >= -1e-8
};

struct BranchReport {
  int sigma = 1;
  sdp::Status status = sdp::Status::Inconclusive;
  double lambda = 0.0;
  int iterations = 0;
  std::optional<double> farkas_tau;  // verified, when infeasible
  std::string message;
};

struct Certified {
  ChoiCertificate certificate;
  VerificationReport report;
  std::optional<DeterminantalRep> representation;
  std::string route;  // "shortcut", "sdp"
};

struct Refuted {
  Witness witness;
};

struct Unknown {
  std::vector<std::string> diagnostics;
  std::vector<BranchReport> branches;
  std::optional<SampleStats> sampling;
};

using Verdict = std::variant<Certified, Refuted, Unknown>;

inline bool is_certified(const Verdict& v) { return std::holds_alternative<Certified>(v); }
inline bool is_refuted(const Verdict& v) { return std::holds_alternative<Refuted>(v); }
inline bool is_unknown(const Verdict& v) { return std::holds_alternative<Unknown>(v); }

struct CertifyOptions {
  sdp::Options sdp;
  std::vector<int> sigmas{1, -1};
  int samples = 1000;       // refutation fallback in certify_quadratic
  std::uint64_t seed = 42;
};

/// The linear system of the containment criterion. Hermitian targets are
/// embedded blockwise, so the variable is real of size l d or 2 l d. In
/// scaled mode the first constraint is sum_i C_ii = sigma I and the others
/// carry nu; the objective is then to maximize nu.
sdp::SdpProblem build_containment_system(const SymPencil& M, const std::vector<MatrixXcd>& target,
                                         int sigma, bool scaled);

/// Maps a solution of build_containment_system back to the block grid.
ChoiCertificate assemble_certificate(const sdp::SdpSolution& sol, const SymPencil& M,
                                     const std::vector<MatrixXcd>& target, int sigma, bool scaled);

/// Recomputes min eigenvalue and residuals, and spot-checks 20 cone points x:
/// khatri_rao(M(x), C) and its compression must be psd up to 1e-8.
VerificationReport verify_certificate(const ChoiCertificate& cert, const ConeSpec& K,
                                      const std::vector<MatrixXcd>& target);

/// Shortcut certificates for orthant and psd cones whose pencil
/// coefficients are already psd (block-diagonal or block-grid C).
std::optional<Verdict> stability_shortcuts(const DetPoly& f, const ConeSpec& K);

Verdict certify_determinantal(const DetPoly& f, const ConeSpec& K, const CertifyOptions& opts = {});
Verdict certify_quadratic(const QuadPoly& f, const ConeSpec& K, const CertifyOptions& opts = {});

/// D_p = sum_ij (M_p)_ij C_ij with the identity det D(z) = sign ell(z)^{n-2} f(z)
/// checked at 7 random points. Throws IdentityCheckError.
DeterminantalRep extract_determinantal_rep(const ChoiCertificate& cert, const QuadPoly& f,
                                           const ConeSpec& K);

struct ScaleOptions {
  std::optional<MatrixXd> transform;  // applied to both pencils: p(T z)
  bool auto_transform = false;
  sdp::Options sdp;
};

struct ScaleResult {
  double nu_star = 0.0;
  ChoiCertificate certificate;
  VerificationReport report;
  SymPencil M;                     // cone pencil after transform and normalization
  std::vector<MatrixXcd> target;   // target pencil after transform and normalization
  MatrixXd transform;
  bool ok = false;
  std::string message;
};

/// Maximizes nu with C >= 0, sum_i C_ii = I, sum_ij (M_p)_ij C_ij = nu N_p
/// (p >= 2). Requires M_1 and N_1 to be positive multiples of the identity
/// (ScalingPreconditionError) and the slice {x_1 = 1} of K to be bounded
/// (UnboundedSliceError).
ScaleResult scale_certify(const MatrixPencil& N, const ConeSpec& K, const ScaleOptions& opts = {});

/// Target list (I, nu N_2, ..., nu N_n) for checking a fixed scale with the
/// unscaled system.
std::vector<MatrixXcd> scaled_target(const std::vector<MatrixXcd>& target, double nu);

}  // namespace kstab
