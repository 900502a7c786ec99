#pragma once

// Negative evidence: witness checking, hyperbolicity sampling along interior
// directions, and local search for zeros with interior imaginary part.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kstab/model.hpp"

namespace kstab {

enum class WitnessKind { User, Sampled, DegreeDrop, Minimized };

std::string to_string(WitnessKind k);

/// A point z with f(z) = 0 and Im z in the interior of K, or a rejected
/// candidate together with the reason.
struct Witness {
  VectorXcd z;
  WitnessKind kind = WitnessKind::User;
  double f_residual = 0.0;       // |f(z)|
  double tolerance = 0.0;        // 1e-9 (1 + coefficient scale at z)
  double interior_margin = 0.0;  // smallest eigenvalue of K's pencil at Im z
  bool accepted = false;
  std::string reason;
};

/// Accepts iff |f(z)| <= 1e-9 (1 + scale) and the K-margin of Im z exceeds
/// 1e-7. For determinantal f the scale is (|A_0| + sum |A_j| |z_j|)^d; for
/// quadratics it is |A| |z|^2 + |b| |z| + |c|.
Witness check_witness(const DetPoly& f, const ConeSpec& K, const VectorXcd& z,
                      WitnessKind kind = WitnessKind::User);
Witness check_witness(const QuadPoly& f, const ConeSpec& K, const VectorXcd& z,
                      WitnessKind kind = WitnessKind::User);

struct SampleStats {
  int samples = 0;
  int degree_drops = 0;
  int sign_changes = 0;
  int root_failures = 0;
  double max_imag_ratio = 0.0;  // largest |Im t| / (1 + |t|) seen
};

struct SampleResult {
  std::optional<Witness> witness;
  SampleStats stats;
};

/// Draws interior directions y (half in a ball of radius 0.3 times the
/// interior margin around K's interior direction, half along random rays
/// toward the boundary) and random x, and looks for non-real roots of
/// t -> f(x + t y). Also watches the sign of the initial form along the
/// sampled directions; a sign change locates an interior zero of the initial
/// form by bisection. Every returned witness has passed check_witness.
SampleResult hyperbolicity_sample(const DetPoly& f, const ConeSpec& K, int samples,
                                  std::uint64_t seed);
SampleResult hyperbolicity_sample(const QuadPoly& f, const ConeSpec& K, int samples,
                                  std::uint64_t seed);

/// Examines a single interior direction y: degree drop (initial form
/// vanishing at y) and non-real roots along a few random lines.
std::optional<Witness> probe_direction(const DetPoly& f, const ConeSpec& K, const VectorXd& y,
                                       std::uint64_t seed = 1);
std::optional<Witness> probe_direction(const QuadPoly& f, const ConeSpec& K, const VectorXd& y,
                                       std::uint64_t seed = 1);

/// Deterministic interior points of K: even indices lie in the ball around
/// the interior direction used by hyperbolicity_sample, odd ones on random
/// rays toward the boundary.
std::vector<VectorXd> sample_interior(const ConeSpec& K, int count, std::uint64_t seed);

/// Multi-start Gauss-Newton on (Re f, Im f)(x + i y) over real x and interior
/// y. When start is given the first run begins at i * start.
std::optional<Witness> minimize_interior_zero(const DetPoly& f, const ConeSpec& K,
                                              int multistarts, std::uint64_t seed,
                                              const std::optional<VectorXd>& start = {});
std::optional<Witness> minimize_interior_zero(const QuadPoly& f, const ConeSpec& K,
                                              int multistarts, std::uint64_t seed,
                                              const std::optional<VectorXd>& start = {});

}  // namespace kstab
