#pragma once

// Dense operator algebra shared by every other module.
//
// Conventions (used everywhere in the library):
//   * Subsystems are big-endian: factor 0 is the slowest index.
//   * vectorize(A) = sum_j (A|j>) (x) |j>, i.e. the row-major flattening of A.
//   * Choi matrices of maps X -> Y are laid out on X (x) Y (input first), see
//     code_model.hpp.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <vector>

#include "adqec/errors.hpp"

namespace adqec {

using Index = Eigen::Index;
using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Ordered subsystem dimensions of a multipartite space.
using DimList = std::vector<Index>;

inline Index dim_product(const DimList& dims) {
  return std::accumulate(dims.begin(), dims.end(), Index{1},
                         [](Index a, Index b) { return a * b; });
}

inline DimList concat(const DimList& a, const DimList& b) {
  DimList out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

inline CMatrix identity(Index d) { return CMatrix::Identity(d, d); }

/// |i><j| on a d-dimensional space.
inline CMatrix matrix_unit(Index d, Index i, Index j) {
  CMatrix m = CMatrix::Zero(d, d);
  m(i, j) = 1.0;
  return m;
}

inline CVector basis_ket(Index d, Index i) {
  CVector v = CVector::Zero(d);
  v(i) = 1.0;
  return v;
}

/// Kronecker product with a's indices slowest.
template <typename DerivedA, typename DerivedB>
Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, Eigen::Dynamic> tensor(
    const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(a.rows() * b.rows(),
                                                            a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

template <typename DerivedA, typename DerivedB, typename... Rest>
auto tensor(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b,
            const Rest&... rest) {
  return tensor(tensor(a, b), rest...);
}

namespace detail {

// Offsets of every multi-index over the listed factors, in big-endian order.
inline std::vector<Index> factor_offsets(const DimList& dims, const std::vector<int>& factors) {
  std::vector<Index> strides(dims.size(), 1);
  for (int f = static_cast<int>(dims.size()) - 2; f >= 0; --f) strides[f] = strides[f + 1] * dims[f + 1];
  std::vector<Index> offsets{0};
  for (int f : factors) {
    std::vector<Index> next;
    next.reserve(offsets.size() * dims[f]);
    for (Index base : offsets)
      for (Index k = 0; k < dims[f]; ++k) next.push_back(base + k * strides[f]);
    offsets = std::move(next);
  }
  return offsets;
}

}  // namespace detail

/// Trace out every factor not listed in `keep`; kept factors stay in their original order.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> partial_trace(
    const Eigen::MatrixBase<Derived>& m, const DimList& dims, std::vector<int> keep) {
  const Index total = dim_product(dims);
  if (m.rows() != m.cols() || m.rows() != total)
    throw DimensionError("partial_trace: matrix is " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()) + " but dims multiply to " + std::to_string(total));
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  std::vector<int> traced;
  for (int f = 0; f < static_cast<int>(dims.size()); ++f) {
    if (std::find(keep.begin(), keep.end(), f) == keep.end()) traced.push_back(f);
  }
  for (int f : keep)
    if (f < 0 || f >= static_cast<int>(dims.size())) throw DimensionError("partial_trace: bad factor index");

  const auto kept_off = detail::factor_offsets(dims, keep);
  const auto traced_off = detail::factor_offsets(dims, traced);
  const Index dk = static_cast<Index>(kept_off.size());
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> out(dk, dk);
  out.setZero();
  for (Index j = 0; j < dk; ++j)
    for (Index i = 0; i < dk; ++i) {
      typename Derived::Scalar acc(0);
      for (Index t : traced_off) acc += m(kept_off[i] + t, kept_off[j] + t);
      out(i, j) = acc;
    }
  return out;
}

/// Trace over the second factor of a bipartite (in (x) out) matrix.
template <typename Derived>
auto trace_out_second(const Eigen::MatrixBase<Derived>& m, Index d_first, Index d_second) {
  return partial_trace(m, DimList{d_first, d_second}, {0});
}

/// |A>> = sum_j (A|j>) (x) |j>.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> vectorize(const Eigen::MatrixBase<Derived>& a) {
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> v(a.rows() * a.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) v(i * a.cols() + j) = a(i, j);
  return v;
}

/// Inverse of vectorize for a rows x cols operator.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> unvectorize(
    const Eigen::MatrixBase<Derived>& v, Index rows, Index cols) {
  if (v.size() != rows * cols) throw DimensionError("unvectorize: length mismatch");
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> a(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) a(i, j) = v(i * cols + j);
  return a;
}

template <typename DerivedA, typename DerivedB>
double frobenius_distance(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("frobenius_distance: shape mismatch");
  return (a - b).norm();
}

template <typename Derived>
double hermiticity_error(const Eigen::MatrixBase<Derived>& m) {
  if (m.rows() != m.cols()) throw DimensionError("hermiticity_error: matrix not square");
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> hermitize(
    const Eigen::MatrixBase<Derived>& m) {
  return (m + m.adjoint()) / 2.0;
}

/// Tolerance on Hermiticity accepted by the eigensolvers, relative to the largest entry.
inline constexpr double kHermitianTol = 1e-10;

template <typename Scalar>
struct HermEig {
  RVector values;  // ascending
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> vectors;
};

/// Eigendecomposition of a Hermitian matrix. The input is symmetrized first.
template <typename Derived>
HermEig<typename Derived::Scalar> herm_eig(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  if (m.rows() != m.cols()) throw DimensionError("herm_eig: matrix not square");
  const double scale = std::max(1.0, m.size() ? double(m.cwiseAbs().maxCoeff()) : 1.0);
  if (m.size() && hermiticity_error(m) > kHermitianTol * scale) throw NumericalError("herm_eig: matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> solver(hermitize(m));
  if (solver.info() != Eigen::Success) throw NumericalError("herm_eig: eigensolver failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

/// f(M) for Hermitian M, applied on the spectrum.
template <typename Derived, typename F>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> herm_function(
    const Eigen::MatrixBase<Derived>& m, F&& f) {
  auto eig = herm_eig(m);
  RVector mapped = eig.values.unaryExpr(f);
  return eig.vectors * mapped.asDiagonal() * eig.vectors.adjoint();
}

template <typename Derived>
double min_eigenvalue(const Eigen::MatrixBase<Derived>& m) {
  return herm_eig(m).values(0);
}

/// Negative eigenvalues allowed by the PSD functions, relative to the spectral radius.
inline constexpr double kPsdTol = 1e-10;

/// Pseudo-inverse square root on the support: eigenvalues above `cutoff` map to 1/sqrt.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> inv_sqrt_psd(
    const Eigen::MatrixBase<Derived>& m, double cutoff) {
  auto eig = herm_eig(m);
  const double scale = std::max(1.0, eig.values.cwiseAbs().maxCoeff());
  if (eig.values(0) < -kPsdTol * scale) throw NumericalError("inv_sqrt_psd: matrix has a negative eigenvalue");
  RVector mapped = eig.values.unaryExpr([cutoff](double x) { return x > cutoff ? 1.0 / std::sqrt(x) : 0.0; });
  return eig.vectors * mapped.asDiagonal() * eig.vectors.adjoint();
}

template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> sqrt_psd(
    const Eigen::MatrixBase<Derived>& m) {
  return herm_function(m, [](double x) { return x > 0 ? std::sqrt(x) : 0.0; });
}

/// Von Neumann entropy in bits; eigenvalues below 1e-12 are dropped.
template <typename Derived>
double von_neumann_entropy(const Eigen::MatrixBase<Derived>& rho) {
  auto eig = herm_eig(rho);
  double s = 0.0;
  for (Index i = 0; i < eig.values.size(); ++i) {
    const double p = eig.values(i);
    if (p > 1e-12) s -= p * std::log2(p);
  }
  return s;
}

/// X (x) I_d.
template <typename Derived>
auto kron_identity(const Eigen::MatrixBase<Derived>& x, Index d) {
  using Plain = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  return tensor(x, Plain::Identity(d, d));
}

}  // namespace adqec
