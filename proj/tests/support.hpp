#pragma once

#include <random>
#include <string>

#include "kstab/io.hpp"

namespace kstab::testing {

inline std::string fixture(const std::string& name) { return std::string(KSTAB_FIXTURE_DIR) + "/" + name; }

inline io::Problem load(const std::string& name) { return io::load_problem(fixture(name)); }

inline MatrixXcd m2(double a, double b, double c, double d) {
  MatrixXd m(2, 2);
  m << a, b, c, d;
  return m.cast<Complex>();
}

inline MatrixXd random_symmetric(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  MatrixXd a(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) a(i, j) = normal(rng);
  return 0.5 * (a + a.transpose());
}

inline MatrixXcd random_hermitian(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  MatrixXcd a(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) a(i, j) = Complex(normal(rng), normal(rng));
  return 0.5 * (a + a.adjoint());
}

inline MatrixXd random_psd(Index n, Index rank, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  MatrixXd g(n, rank);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < rank; ++j) g(i, j) = normal(rng);
  return g * g.transpose();
}

}  // namespace kstab::testing
