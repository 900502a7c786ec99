#include "kstab/linalg.hpp"

namespace kstab {

Complex poly_eval(const std::vector<Complex>& coeffs, Complex t) {
  Complex acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * t + *it;
  return acc;
}

Complex poly_derivative(const std::vector<Complex>& coeffs, Complex t) {
  Complex acc = 0.0;
  for (std::size_t k = coeffs.size(); k-- > 1;)
    acc = acc * t + double(k) * coeffs[k];
  return acc;
}

std::vector<Complex> poly_from_roots(const std::vector<Complex>& roots,
                                     Complex lead) {
  std::vector<Complex> c{lead};
  for (const Complex& r : roots) {
    std::vector<Complex> next(c.size() + 1, 0.0);
    for (std::size_t k = 0; k < c.size(); ++k) {
      next[k + 1] += c[k];
      next[k] -= r * c[k];
    }
    c = std::move(next);
  }
  return c;
}

namespace {

double reconstruction_error(const std::vector<Complex>& coeffs,
                            const std::vector<Complex>& roots) {
  const auto rebuilt = poly_from_roots(roots, coeffs.back());
  double scale = 0.0, err = 0.0;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    scale = std::max(scale, std::abs(coeffs[k]));
    err = std::max(err, std::abs(rebuilt[k] - coeffs[k]));
  }
  return err / scale;
}

}  // namespace

std::vector<Complex> poly_roots(const std::vector<Complex>& coeffs,
                                int max_iter) {
  if (coeffs.empty()) throw DegreeDropError("poly_roots: empty coefficient list");
  double cmax = 0.0;
  for (const Complex& c : coeffs) cmax = std::max(cmax, std::abs(c));
  if (cmax == 0.0) throw DegreeDropError("poly_roots: zero polynomial");
  if (std::abs(coeffs.back()) <= 1e-12 * cmax)
    throw DegreeDropError("poly_roots: leading coefficient numerically zero");

  const std::size_t deg = coeffs.size() - 1;
  if (deg == 0) return {};

  std::vector<Complex> monic(coeffs.size());
  for (std::size_t k = 0; k <= deg; ++k) monic[k] = coeffs[k] / coeffs.back();

  // Cauchy bound for the initial circle.
  double radius = 0.0;
  for (std::size_t k = 0; k < deg; ++k) radius = std::max(radius, std::abs(monic[k]));
  radius = 1.0 + radius;
  radius = std::min(radius, 1e6);

  std::vector<Complex> z(deg);
  const Complex seed(0.4, 0.9);
  Complex w = 1.0;
  for (std::size_t k = 0; k < deg; ++k) {
    w *= seed;
    z[k] = radius * w / std::abs(w) * (0.5 + 0.5 * double(k + 1) / double(deg));
  }

  const double eps = std::numeric_limits<double>::epsilon();
  for (int iter = 0; iter < max_iter; ++iter) {
    double max_step = 0.0;
    for (std::size_t i = 0; i < deg; ++i) {
      Complex denom = 1.0;
      for (std::size_t j = 0; j < deg; ++j)
        if (j != i) denom *= (z[i] - z[j]);
      if (denom == Complex(0.0)) denom = eps;
      const Complex step = poly_eval(monic, z[i]) / denom;
      z[i] -= step;
      max_step = std::max(max_step, std::abs(step) / (1.0 + std::abs(z[i])));
    }
    if (max_step < 4 * eps) break;
  }
  if (reconstruction_error(coeffs, z) > 1e-7)
    throw NoConvergence("poly_roots: Durand-Kerner did not converge");
  return z;
}

}  // namespace kstab
