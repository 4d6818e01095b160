#pragma once

// Choi operators, strategic codes and the built-in fixture codes.
//
// Choi layout: the Choi matrix of a map C from X to Y lives on X (x) Y,
//   J = sum_ab |a><b| (x) C(|a><b|) = sum_k |K_k^T>> <<K_k^T|.
// Channel action is C(X) = Tr_X[(X^T (x) I) J].

#include <string>
#include <utility>
#include <vector>

#include "adqec/operator_core.hpp"

namespace adqec {

struct ChoiOperator {
  CMatrix matrix;
  DimList in_dims;
  DimList out_dims;

  ChoiOperator() = default;
  ChoiOperator(CMatrix m, DimList in, DimList out);

  Index d_in() const { return dim_product(in_dims); }
  Index d_out() const { return dim_product(out_dims); }

  /// Tr_out(J); equals I_in for a trace-preserving map.
  CMatrix marginal() const { return trace_out_second(matrix, d_in(), d_out()); }
  double min_eig() const { return min_eigenvalue(matrix); }
};

ChoiOperator choi_from_kraus(const std::vector<CMatrix>& kraus, const DimList& in_dims, const DimList& out_dims);
ChoiOperator choi_from_kraus(const std::vector<CMatrix>& kraus);

/// Kraus operators from the eigendecomposition; eigenvalues below cutoff*lambda_max dropped.
std::vector<CMatrix> kraus_from_choi(const ChoiOperator& c, double cutoff = 1e-12);

CMatrix apply_choi(const ChoiOperator& c, const CMatrix& x);
/// Heisenberg-picture (adjoint) action.
CMatrix apply_choi_adjoint(const ChoiOperator& c, const CMatrix& w);
CMatrix apply_kraus(const std::vector<CMatrix>& kraus, const CMatrix& x);

ChoiOperator identity_channel(const DimList& dims);
ChoiOperator isometry_channel(const CMatrix& v, const DimList& in_dims, const DimList& out_dims);
/// X -> Tr(X) I/d_out.
ChoiOperator depolarizing_channel(const DimList& in_dims, const DimList& out_dims);

DimList qubit_dims(int n);

/// Encoder, checks and decoders of a dynamical code.
///
/// rounds[r] holds the round-r instrument elements for every outcome history:
/// element h*M_r + m_r is outcome m_r after history h, where h indexes the outcomes of
/// rounds 0..r-1 in mixed radix. decoders are indexed by full trajectory.
/// With no rounds the code is static and has a single decoder.
struct StrategicCode {
  ChoiOperator encoder;
  std::vector<std::vector<ChoiOperator>> rounds;
  std::vector<ChoiOperator> decoders;
  std::vector<int> outcome_counts;

  static StrategicCode single_check(ChoiOperator encoder, std::vector<ChoiOperator> checks,
                                    std::vector<ChoiOperator> decoders);

  int check_rounds() const { return static_cast<int>(rounds.size()); }
  /// Number of full trajectories.
  int outcome_count() const;
  const std::vector<ChoiOperator>& checks() const;

  Index logical_dim() const { return encoder.d_in(); }
  Index physical_dim() const { return encoder.d_out(); }
  Index output_dim() const { return decoders.at(0).d_out(); }
};

struct StaticCode {
  ChoiOperator encoder;
  ChoiOperator decoder;

  StrategicCode as_strategic() const;
};

struct ConstraintResidual {
  std::string name;
  double min_eig;
  double residual;  // Frobenius norm of the partial-trace equality violation
};

struct ValidationReport {
  std::vector<ConstraintResidual> entries;
  double tol = 1e-6;

  bool passed() const;
  double worst_residual() const;
  double worst_min_eig() const;
};

ValidationReport validate(const StrategicCode& code, double tol = 1e-6);
ValidationReport validate(const StaticCode& code, double tol = 1e-6);
/// Throws DimensionError when blocks do not chain.
void check_dims(const StrategicCode& code);

/// Kraus set from a map given on computational basis states. Entries are processed in
/// order; images are normalized, and each input joins the first Kraus operator whose
/// images are orthogonal to its own.
std::vector<CMatrix> basis_map_kraus(Index d_in, Index d_out, const std::vector<std::pair<Index, CVector>>& pairs);

/// Kraus of tracing out the listed factors after `kraus`.
std::vector<CMatrix> trace_out_after(const std::vector<CMatrix>& kraus, const DimList& out_dims,
                                     const std::vector<int>& traced);

enum class ThreeQubitReading { Literal, SignFlip };

StrategicCode protocol_2qubit();
StrategicCode protocol_3qubit(ThreeQubitReading reading);
ChoiOperator leung_4qubit_encoder();
/// |0> -> |0...0>, |1> -> |1...1>.
ChoiOperator repetition_encoder(int n);
/// One logical qubit stored in qubit 0 with ancillas in |0>; identity check; decoder discards the ancillas.
StrategicCode identity_code(int n);
/// Three-qubit repetition code with one syndrome measurement (4 outcomes), optionally
/// followed by the flip it points to. Decoders undo a single flip and project onto the code.
StrategicCode repetition_syndrome_code(bool correct);
/// Unencoded qubit: logical = physical = one qubit, identity maps.
StaticCode trivial_static_code();

/// Isometry V (columns are codewords) of an encoder with a rank-one Choi; throws otherwise.
CMatrix encoder_isometry(const ChoiOperator& encoder, double tol = 1e-8);

}  // namespace adqec
