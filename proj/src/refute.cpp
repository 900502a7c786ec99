#include "kstab/refute.hpp"

#include <random>

namespace kstab {
namespace {

// Uniform access to the two polynomial classes.
Index degree(const DetPoly& f) { return f.degree_bound(); }
Index degree(const QuadPoly&) { return 2; }

bool is_homogeneous(const DetPoly& f) {
  return f.pencil.homogeneous() || f.pencil.constant->cwiseAbs().maxCoeff() == 0.0;
}
bool is_homogeneous(const QuadPoly& f) { return f.homogeneous(); }

double initial_value(const DetPoly& f, const VectorXd& y) {
  const MatrixPencil lead{std::nullopt, f.pencil.coeffs};
  return complex_det(lead(y.cast<Complex>())).real();
}
double initial_value(const QuadPoly& f, const VectorXd& y) { return y.dot(f.A * y); }

double coefficient_scale(const DetPoly& f, const VectorXcd& z) {
  double s = f.pencil.constant ? f.pencil.constant->norm() : 0.0;
  for (Index j = 0; j < f.num_vars(); ++j)
    s += f.pencil.coeffs[std::size_t(j)].norm() * std::abs(z(j));
  return std::pow(s, double(f.degree_bound()));
}
double coefficient_scale(const QuadPoly& f, const VectorXcd& z) {
  const double zn = z.norm();
  return f.A.norm() * zn * zn + f.b.norm() * zn + std::abs(f.c);
}

class Sampler {
 public:
  Sampler(const ConeSpec& K, std::uint64_t seed) : K_(K), rng_(seed) {
    e_ = K.interior_direction;
    margin_e_ = K.margin(e_);
    coeff_norm_ = 0.0;
    for (const auto& m : K.pencil.coeffs) coeff_norm_ += m.norm();
    const MatrixXd Me = K.pencil(e_);
    const auto eig = sym_eigen(Me);
    inv_sqrt_ = eig.vectors * eig.values.cwiseMax(1e-300).cwiseSqrt().cwiseInverse().asDiagonal() *
                eig.vectors.transpose();
  }

  VectorXd gaussian(Index n) {
    VectorXd v(n);
    for (Index j = 0; j < n; ++j) v(j) = normal_(rng_);
    return v;
  }
  double uniform() { return uniform_(rng_); }

  // y = e + 0.3 margin(e) / sum |M_j| * (point of the unit ball).
  VectorXd local() {
    const Index n = e_.size();
    VectorXd u = gaussian(n);
    u /= std::max(u.norm(), 1e-300);
    const double radius = std::pow(uniform(), 1.0 / double(n));
    return e_ + 0.3 * margin_e_ / std::max(coeff_norm_, 1e-300) * radius * u;
  }

  // y = e + s * t_max * u, with t_max the exit time of the ray from K.
  VectorXd ray() {
    const Index n = e_.size();
    VectorXd u = gaussian(n);
    u *= e_.norm() / std::max(u.norm(), 1e-300);
    const MatrixXd Mu = inv_sqrt_ * K_.pencil(u) * inv_sqrt_;
    const double mu_min = min_eigenvalue(Mu);
    const double t_max = mu_min < 0.0 ? std::min(-1.0 / mu_min, 10.0) : 10.0;
    return e_ + (0.02 + 0.96 * uniform()) * t_max * u;
  }

  const VectorXd& e() const { return e_; }

 private:
  const ConeSpec& K_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_;
  std::uniform_real_distribution<double> uniform_;
  VectorXd e_;
  double margin_e_ = 0.0;
  double coeff_norm_ = 0.0;
  MatrixXd inv_sqrt_;
};

template <typename Poly>
Witness check_impl(const Poly& f, const ConeSpec& K, const VectorXcd& z, WitnessKind kind) {
  if (z.size() != f.num_vars() || K.num_vars() != f.num_vars())
    throw DimensionError("check_witness: point, polynomial and cone disagree in length");
  Witness w;
  w.z = z;
  w.kind = kind;
  w.f_residual = std::abs(evaluate(f, z));
  w.tolerance = 1e-9 * (1.0 + coefficient_scale(f, z));
  w.interior_margin = K.margin(z.imag());
  const bool zero_ok = w.f_residual <= w.tolerance;
  const bool interior_ok = w.interior_margin > 1e-7;
  w.accepted = zero_ok && interior_ok;
  if (!zero_ok)
    w.reason = "|f(z)| = " + std::to_string(w.f_residual) + " exceeds tolerance " +
               std::to_string(w.tolerance);
  if (!interior_ok) {
    if (!w.reason.empty()) w.reason += "; ";
    w.reason += "Im z has cone margin " + std::to_string(w.interior_margin) + " <= 1e-7";
  }
  return w;
}

// Newton polish of a root of the interpolated restriction, followed by a few
// steps on f itself along the same line.
template <typename Poly>
Complex polish_root(const Poly& f, const std::vector<Complex>& coeffs, const VectorXd& x,
                    const VectorXd& y, Complex t) {
  for (int k = 0; k < 2; ++k) {
    const Complex d = poly_derivative(coeffs, t);
    if (d == Complex(0.0)) break;
    t -= poly_eval(coeffs, t) / d;
  }
  auto g = [&](Complex s) { return evaluate(f, (x.cast<Complex>() + s * y.cast<Complex>()).eval()); };
  Complex gt = g(t);
  for (int k = 0; k < 8; ++k) {
    const Complex d = poly_derivative(coeffs, t);
    if (d == Complex(0.0)) break;
    const Complex next = t - gt / d;
    const Complex gn = g(next);
    if (!(std::abs(gn) < std::abs(gt))) break;
    t = next;
    gt = gn;
  }
  return t;
}

template <typename Poly>
std::optional<Witness> minimize_impl(const Poly& f, const ConeSpec& K, int multistarts,
                                     std::uint64_t seed, const std::optional<VectorXd>& start);

// Handles a direction y in int K where the initial form vanishes.
template <typename Poly>
std::optional<Witness> degree_drop_witness(const Poly& f, const ConeSpec& K, const VectorXd& y,
                                           std::uint64_t seed) {
  if (is_homogeneous(f)) {
    Witness w = check_impl(f, K, (Complex(0.0, 1.0) * y.cast<Complex>()).eval(),
                           WitnessKind::DegreeDrop);
    if (w.accepted) return w;
  }
  return minimize_impl(f, K, 4, seed, y);
}

// Non-real roots of t -> f(x + t y) and degree drop at y.
template <typename Poly>
std::optional<Witness> examine_line(const Poly& f, const ConeSpec& K, const VectorXd& x,
                                    const VectorXd& y, SampleStats& stats, std::uint64_t seed) {
  const auto coeffs = univariate_restriction(f, x, y);
  std::vector<Complex> roots;
  try {
    roots = poly_roots(coeffs);
  } catch (const DegreeDropError&) {
    ++stats.degree_drops;
    return degree_drop_witness(f, K, y, seed);
  } catch (const NoConvergence&) {
    ++stats.root_failures;
    return std::nullopt;
  }
  for (Complex t : roots) {
    t = polish_root(f, coeffs, x, y, t);
    const double ratio = std::abs(t.imag()) / (1.0 + std::abs(t));
    stats.max_imag_ratio = std::max(stats.max_imag_ratio, ratio);
    if (ratio <= 1e-6) continue;
    if (t.imag() < 0.0) t = std::conj(t);
    const VectorXcd z = x.cast<Complex>() + t * y.cast<Complex>();
    Witness w = check_impl(f, K, z, WitnessKind::Sampled);
    if (w.accepted) return w;
  }
  return std::nullopt;
}

// Bisects the initial form on the segment from a to b, where it changes sign.
template <typename Poly>
VectorXd bisect_initial(const Poly& f, VectorXd a, VectorXd b) {
  double fa = initial_value(f, a);
  for (int k = 0; k < 200; ++k) {
    const VectorXd mid = 0.5 * (a + b);
    const double fm = initial_value(f, mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (fa > 0.0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
    if ((a - b).norm() <= 1e-16 * (1.0 + a.norm())) break;
  }
  return 0.5 * (a + b);
}

template <typename Poly>
SampleResult sample_impl(const Poly& f, const ConeSpec& K, int samples, std::uint64_t seed) {
  if (K.num_vars() != f.num_vars())
    throw DimensionError("hyperbolicity_sample: polynomial and cone disagree in length");
  SampleResult out;
  if (degree(f) < 1) return out;
  Sampler sampler(K, seed);
  const VectorXd& e = sampler.e();
  const double init_e = initial_value(f, e);
  if (init_e == 0.0) {
    ++out.stats.degree_drops;
    if (auto w = degree_drop_witness(f, K, e, seed)) {
      out.witness = w;
      return out;
    }
  }
  for (int s = 0; s < samples; ++s) {
    ++out.stats.samples;
    const VectorXd y = (s % 2 == 0) ? sampler.local() : sampler.ray();
    if (!(K.margin(y) > 1e-7)) continue;
    const VectorXd x = sampler.gaussian(y.size()) * y.norm();

    const double init_y = initial_value(f, y);
    if (init_e != 0.0 && init_y != 0.0 && (init_y > 0.0) != (init_e > 0.0)) {
      ++out.stats.sign_changes;
      const VectorXd ystar = bisect_initial(f, e, y);
      if (auto w = degree_drop_witness(f, K, ystar, seed + std::uint64_t(s))) {
        out.witness = w;
        return out;
      }
    }
    if (auto w = examine_line(f, K, x, y, out.stats, seed + std::uint64_t(s))) {
      out.witness = w;
      return out;
    }
  }
  return out;
}

template <typename Poly>
std::optional<Witness> probe_impl(const Poly& f, const ConeSpec& K, const VectorXd& y,
                                  std::uint64_t seed) {
  if (y.size() != f.num_vars()) throw DimensionError("probe_direction: direction has wrong length");
  Sampler sampler(K, seed);
  SampleStats stats;
  for (int k = 0; k < 4; ++k) {
    const VectorXd x = sampler.gaussian(y.size()) * (1.0 + y.norm());
    if (auto w = examine_line(f, K, x, y, stats, seed)) return w;
  }
  return std::nullopt;
}

template <typename Poly>
std::optional<Witness> minimize_impl(const Poly& f, const ConeSpec& K, int multistarts,
                                     std::uint64_t seed, const std::optional<VectorXd>& start) {
  const Index n = f.num_vars();
  if (K.num_vars() != n)
    throw DimensionError("minimize_interior_zero: polynomial and cone disagree in length");
  Sampler sampler(K, seed);
  const VectorXd& e = sampler.e();
  const bool homog = is_homogeneous(f);
  const double e_dot_e = e.squaredNorm();

  for (int s = 0; s < multistarts; ++s) {
    VectorXd y;
    if (start && s == 0)
      y = *start;
    else if (start)
      y = *start + 0.05 * (*start).norm() * sampler.gaussian(n);
    else
      y = (s % 2 == 0) ? sampler.local() : sampler.ray();
    VectorXd x = (s % 3 == 2) ? VectorXd(0.5 * y.norm() * sampler.gaussian(n)) : VectorXd::Zero(n);
    if (!(K.margin(y) > 1e-7)) continue;

    auto value = [&](const VectorXd& xr, const VectorXd& yi) {
      VectorXcd z(n);
      z.real() = xr;
      z.imag() = yi;
      return evaluate(f, z);
    };
    Complex F = value(x, y);
    for (int it = 0; it < 200; ++it) {
      VectorXcd z(n);
      z.real() = x;
      z.imag() = y;
      const Witness w = check_impl(f, K, z, WitnessKind::Minimized);
      if (w.accepted && std::norm(F) <= std::max(1e-18, w.tolerance * w.tolerance)) return w;

      // Complex partial derivatives by central differences in the real parts.
      Eigen::Matrix<double, 2, Eigen::Dynamic> J(2, 2 * n);
      for (Index j = 0; j < n; ++j) {
        const double h = 1e-6 * (1.0 + std::abs(z(j)));
        VectorXd xp = x, xm = x;
        xp(j) += h;
        xm(j) -= h;
        const Complex g = (value(xp, y) - value(xm, y)) / (2.0 * h);
        J(0, j) = g.real();
        J(1, j) = g.imag();
        J(0, n + j) = -g.imag();
        J(1, n + j) = g.real();
      }
      const Eigen::Matrix2d JJt = J * J.transpose();
      const double reg = 1e-14 * (1.0 + JJt.trace());
      const Eigen::Vector2d rhs(F.real(), F.imag());
      const VectorXd step = -J.transpose() * (JJt + reg * Eigen::Matrix2d::Identity()).ldlt().solve(rhs);

      double alpha = 1.0;
      bool moved = false;
      for (int bt = 0; bt < 40; ++bt, alpha *= 0.5) {
        VectorXd xn = x + alpha * step.head(n);
        VectorXd yn = y + alpha * step.tail(n);
        if (homog) {
          const double ey = e.dot(yn);
          if (!(ey > 0.0)) continue;
          const double scale = e_dot_e / ey;
          xn *= scale;
          yn *= scale;
        }
        if (!(K.margin(yn) > 1e-7)) continue;
        const Complex Fn = value(xn, yn);
        if (std::abs(Fn) < std::abs(F)) {
          x = xn;
          y = yn;
          F = Fn;
          moved = true;
          break;
        }
      }
      if (!moved) break;
    }
  }
  return std::nullopt;
}

}  // namespace

std::vector<VectorXd> sample_interior(const ConeSpec& K, int count, std::uint64_t seed) {
  Sampler sampler(K, seed);
  std::vector<VectorXd> out;
  for (int k = 0; k < count; ++k) out.push_back(k % 2 == 0 ? sampler.local() : sampler.ray());
  return out;
}

std::string to_string(WitnessKind k) {
  switch (k) {
    case WitnessKind::User: return "user";
    case WitnessKind::Sampled: return "sampled";
    case WitnessKind::DegreeDrop: return "degree-drop";
    case WitnessKind::Minimized: return "minimized";
  }
  return "user";
}

Witness check_witness(const DetPoly& f, const ConeSpec& K, const VectorXcd& z, WitnessKind kind) {
  return check_impl(f, K, z, kind);
}
Witness check_witness(const QuadPoly& f, const ConeSpec& K, const VectorXcd& z, WitnessKind kind) {
  return check_impl(f, K, z, kind);
}

SampleResult hyperbolicity_sample(const DetPoly& f, const ConeSpec& K, int samples,
                                  std::uint64_t seed) {
  return sample_impl(f, K, samples, seed);
}
SampleResult hyperbolicity_sample(const QuadPoly& f, const ConeSpec& K, int samples,
                                  std::uint64_t seed) {
  return sample_impl(f, K, samples, seed);
}

std::optional<Witness> probe_direction(const DetPoly& f, const ConeSpec& K, const VectorXd& y,
                                       std::uint64_t seed) {
  return probe_impl(f, K, y, seed);
}
std::optional<Witness> probe_direction(const QuadPoly& f, const ConeSpec& K, const VectorXd& y,
                                       std::uint64_t seed) {
  return probe_impl(f, K, y, seed);
}

std::optional<Witness> minimize_interior_zero(const DetPoly& f, const ConeSpec& K,
                                              int multistarts, std::uint64_t seed,
                                              const std::optional<VectorXd>& start) {
  return minimize_impl(f, K, multistarts, seed, start);
}
std::optional<Witness> minimize_interior_zero(const QuadPoly& f, const ConeSpec& K,
                                              int multistarts, std::uint64_t seed,
                                              const std::optional<VectorXd>& start) {
  return minimize_impl(f, K, multistarts, seed, start);
}

}  // namespace kstab
