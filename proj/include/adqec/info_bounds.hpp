#pragma once

// Purified interrogated dynamics and the entropy-gap bound on decoding fidelity.
//
// For outcome trajectory m the branch state is
//   |psi_m> ~ sum_{i,e} |i>_R (K_{e,m} V|i>)_A |m>_B |e>_E / sqrt(L),
// normalized, with its probability kept as the weight. R has the logical dimension.

#include <cstdint>
#include <string>
#include <vector>

#include "adqec/noise.hpp"
#include "adqec/recovery.hpp"

namespace adqec {

struct PurifiedState {
  CVector psi;
  /// {R, A, B, E}
  DimList dims;
  int outcome = 0;
  double weight = 0;

  static constexpr int R = 0, A = 1, B = 2, E = 3;
};

/// One state per trajectory; a branch with zero probability carries a zero vector.
std::vector<PurifiedState> purify(const CodespaceProjector& proj, const Interrogator& t, const NoiseProcess& noise);

/// Reduced density matrix of a pure state on the listed systems, in list order.
CMatrix reduced_state(const CVector& psi, const DimList& dims, const std::vector<int>& keep);

struct BranchEntropy {
  int outcome;
  double weight;
  double s_r;
  double s_be;
  double s_rbe;
  double gap() const { return s_r + s_be - s_rbe; }
};

struct EntropyReport {
  std::vector<BranchEntropy> branches;
  /// max over branches with nonzero weight of the gap, in bits.
  double epsilon = 0;
};

EntropyReport entropy_gap(const std::vector<PurifiedState>& states);

enum class DecoderSource { SdpOptimal, TemporalPetz };
std::string to_string(DecoderSource s);
DecoderSource parse_decoder_source(const std::string& s);

/// Coefficient per trajectory for decoders A_l -> L: F = sum_m Tr(M_m J_m).
std::vector<CMatrix> recovery_coefficients(const CodespaceProjector& proj, const Interrogator& t,
                                           const NoiseProcess& noise);

struct BoundReport {
  double epsilon = 0;
  double achieved = 0;
  double bound = 0;  // 1 - 2 sqrt(epsilon)
  bool vacuous = false;
  bool satisfied = false;
  DecoderSource source = DecoderSource::SdpOptimal;

  static const char* csv_header() { return "epsilon, bound, achieved, vacuous"; }
  std::string csv_row() const;
};

BoundReport verify_theorem3(const CodespaceProjector& proj, const Interrogator& t, const NoiseProcess& noise,
                            DecoderSource source);

/// Small random instance: n in {1, 2}, two rounds of noise that mix the identity with a
/// random channel, and one random unitary check.
struct BoundInstance {
  CodespaceProjector proj;
  Interrogator checks;
  NoiseProcess noise;
};

BoundInstance random_bound_instance(std::uint64_t seed);

}  // namespace adqec
