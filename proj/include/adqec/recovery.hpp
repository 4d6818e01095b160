#pragma once

// Petz-type decoders and Knill-Laflamme correctability for strategic codes.
//
// For each full outcome trajectory m the noisy interrogated evolution has Kraus
// operators K_{e,m} = E^(l)_{e_l} C^(l)_{c_l} ... C^(1)_{c_1} E^(0)_{e_0}, where e runs over
// noise terms and check Kraus indices together. Recovery Kraus operators map the final
// physical system to the logical system L through the codeword isometry V.

#include <vector>

#include "adqec/code_model.hpp"
#include "adqec/noise.hpp"

namespace adqec {

/// Interrogator as per-trajectory, per-round Kraus sets (A_r = A_0 throughout).
class Interrogator {
 public:
  Interrogator() = default;
  /// rounds[m][r]: Kraus operators of the round-r element along trajectory m.
  Interrogator(Index dim, std::vector<std::vector<std::vector<CMatrix>>> rounds);

  static Interrogator from_code(const StrategicCode& code);
  /// No checks at all: one trajectory, zero rounds.
  static Interrogator trivial(Index dim);

  Index dim() const { return dim_; }
  int outcome_count() const { return static_cast<int>(rounds_.size()); }
  int check_rounds() const { return rounds_.empty() ? 0 : static_cast<int>(rounds_[0].size()); }
  const std::vector<std::vector<CMatrix>>& trajectory(int m) const { return rounds_.at(m); }

  /// K_{e,m} for every noise term and check Kraus choice; noise index outermost.
  std::vector<CMatrix> effective_kraus(int m, const NoiseProcess& noise) const;
  /// Frobenius norm of sum_m sum K^dag K - I over the checks alone.
  double completeness_error() const;

 private:
  Index dim_ = 0;
  std::vector<std::vector<std::vector<CMatrix>>> rounds_;
};

class CodespaceProjector {
 public:
  /// Columns of v are orthonormal codewords |i>.
  explicit CodespaceProjector(CMatrix v, double tol = 1e-10);
  static CodespaceProjector from_encoder(const ChoiOperator& encoder);

  const CMatrix& isometry() const { return v_; }
  CMatrix matrix() const { return v_ * v_.adjoint(); }
  Index rank() const { return v_.cols(); }
  Index dim() const { return v_.rows(); }

 private:
  CMatrix v_;
};

enum class RecoveryKind { StaticPetz, TemporalPetz, Perfect };
std::string to_string(RecoveryKind k);

/// Kraus of the noise as given, or rotated by the unitary u that diagonalizes the
/// Knill-Laflamme table of each trajectory.
enum class KrausGauge { Raw, Diagonal };

struct RecoveryFamily {
  RecoveryKind kind;
  /// kraus[m]: maps A_l -> L for trajectory m.
  std::vector<std::vector<CMatrix>> kraus;
  /// Whether trajectory m was completed to trace preservation off the noise range.
  std::vector<bool> completed;
  DimList in_dims;
  DimList out_dims;

  std::vector<ChoiOperator> decoders() const;
  /// max over m of the largest eigenvalue of sum R^dag R minus 1.
  double excess() const;
};

struct KLReport {
  /// lambda[m](e', e) = Tr(V^dag K_{e'}^dag K_e V) / dim L.
  std::vector<CMatrix> lambda;
  double offdiag_residual = 0;
  double diag_variance_residual = 0;
  double threshold = 1e-8;
  bool correctable = false;
};

RecoveryFamily static_petz(const CodespaceProjector& proj, const std::vector<CMatrix>& kraus,
                           const DimList& dims = {});
RecoveryFamily temporal_petz(const CodespaceProjector& proj, const Interrogator& t, const NoiseProcess& noise,
                             KrausGauge gauge = KrausGauge::Raw);
KLReport kl_check(const CodespaceProjector& proj, const Interrogator& t, const NoiseProcess& noise,
                  double threshold = 1e-8);
/// Needs kl.correctable; Kraus in the diagonal gauge.
RecoveryFamily perfect_recovery(const CodespaceProjector& proj, const Interrogator& t, const NoiseProcess& noise,
                                const KLReport& kl);

/// The code's encoder and checks with the given decoders.
StrategicCode with_decoders(const StrategicCode& code, const RecoveryFamily& r);

}  // namespace adqec
