#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "adqec/operator_core.hpp"

namespace adqec {

/// Seeded source for every randomized construction (initial points, test instances).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  std::uint64_t next_seed() { return engine_(); }

  /// Matrix with i.i.d. standard complex Gaussian entries.
  CMatrix ginibre(Index rows, Index cols) {
    CMatrix g(rows, cols);
    for (Index j = 0; j < cols; ++j)
      for (Index i = 0; i < rows; ++i) g(i, j) = Complex(normal(), normal()) / std::sqrt(2.0);
    return g;
  }

  /// Haar-random isometry d_in -> d_out (d_out >= d_in).
  CMatrix isometry(Index d_out, Index d_in) {
    if (d_out < d_in) throw DimensionError("isometry: output smaller than input");
    CMatrix g = ginibre(d_out, d_in);
    Eigen::HouseholderQR<CMatrix> qr(g);
    CMatrix q = qr.householderQ() * CMatrix::Identity(d_out, d_in);
    const CMatrix r = qr.matrixQR();
    for (Index j = 0; j < d_in; ++j) {
      const Complex diag = r(j, j);
      if (std::abs(diag) > 0) q.col(j) *= diag / std::abs(diag);
    }
    return q;
  }

  CMatrix unitary(Index d) { return isometry(d, d); }

  CMatrix hermitian(Index d) {
    CMatrix g = ginibre(d, d);
    return (g + g.adjoint()) / 2.0;
  }

  /// Random full-rank density matrix (Hilbert-Schmidt measure).
  CMatrix density(Index d) {
    CMatrix g = ginibre(d, d);
    CMatrix rho = g * g.adjoint();
    return rho / rho.trace().real();
  }

  /// Kraus operators of a random channel d_in -> d_out with `rank` operators.
  std::vector<CMatrix> channel_kraus(Index d_in, Index d_out, Index rank) {
    CMatrix v = isometry(d_out * rank, d_in);
    std::vector<CMatrix> kraus;
    for (Index k = 0; k < rank; ++k) kraus.push_back(v.block(k * d_out, 0, d_out, d_in));
    return kraus;
  }

  /// Random point on the probability simplex.
  std::vector<double> simplex(std::size_t n) {
    std::vector<double> w(n);
    double total = 0;
    for (auto& x : w) {
      x = -std::log(1.0 - uniform());
      total += x;
    }
    for (auto& x : w) x /= total;
    return w;
  }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace adqec
