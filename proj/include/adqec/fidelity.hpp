#pragma once

// Entanglement fidelity of a code under noise, and the linear coefficient of each
// code block with the other blocks held fixed.
//
// Three routes:
//   * direct: compose encoder, noise terms, checks and decoders into one channel.
//   * factorized: index-form contraction with PrecomputedTensors (static and one check).
//   * chain: forward/backward propagation through any number of check rounds.
// Every coefficient M has the layout of its block's Choi matrix and F = sum Tr(X M).

#include <vector>

#include "adqec/code_model.hpp"
#include "adqec/noise.hpp"

namespace adqec {

enum class FidelityMethod { Direct, Factorized, Chain };

struct ObjectiveValue {
  double fidelity;
  FidelityMethod method;
};

/// Choi matrix (on L (x) L') of the whole noisy protocol.
CMatrix composed_choi(const StrategicCode& code, const NoiseProcess& noise);

ObjectiveValue fidelity_direct(const StrategicCode& code, const NoiseProcess& noise, const CMatrix& rho);
ObjectiveValue fidelity_direct(const StaticCode& code, const NoiseProcess& noise, const CMatrix& rho);

/// Needs a static code with one noise round, or one check round with two noise rounds.
ObjectiveValue fidelity_factorized(const StrategicCode& code, const PrecomputedTensors& tensors);
ObjectiveValue fidelity_factorized(const StaticCode& code, const PrecomputedTensors& tensors);

// Factorized coefficients, single check round (two noise rounds).
std::vector<CMatrix> decoder_coefficients(const ChoiOperator& encoder, const std::vector<ChoiOperator>& checks,
                                          const PrecomputedTensors& tensors);
std::vector<CMatrix> check_coefficients(const ChoiOperator& encoder, const std::vector<ChoiOperator>& decoders,
                                        const PrecomputedTensors& tensors);
CMatrix encoder_coefficient(const std::vector<ChoiOperator>& checks, const std::vector<ChoiOperator>& decoders,
                            const PrecomputedTensors& tensors);

// Factorized coefficients, static code (one noise round).
CMatrix static_decoder_coefficient(const ChoiOperator& encoder, const PrecomputedTensors& tensors);
CMatrix static_encoder_coefficient(const ChoiOperator& decoder, const PrecomputedTensors& tensors);

/// Propagation route for codes with any number of check rounds (noise has rounds+1 slots).
class ChainObjective {
 public:
  ChainObjective(const NoiseProcess& noise, CMatrix rho);

  double fidelity(const StrategicCode& code) const;
  std::vector<CMatrix> decoder_coefficients(const StrategicCode& code) const;
  /// One coefficient per element of code.rounds[round].
  std::vector<CMatrix> check_coefficients(const StrategicCode& code, int round) const;
  CMatrix encoder_coefficient(const StrategicCode& code) const;

  const NoiseProcess& noise() const { return noise_; }
  const CMatrix& rho() const { return rho_; }

 private:
  using Family = std::vector<CMatrix>;  // indexed by s*L + t
  // forward[r][h]: states after noise round r for history h, one per (s,t), input |t><s|
  std::vector<std::vector<Family>> forward(const StrategicCode& code, int branch) const;
  // backward[r][h]: observables paired with forward[r][h]
  std::vector<std::vector<Family>> backward(const StrategicCode& code, int branch) const;
  CMatrix noise_apply(int branch, int round, const CMatrix& x) const;
  CMatrix noise_adjoint(int branch, int round, const CMatrix& w) const;
  void check_code(const StrategicCode& code) const;

  NoiseProcess noise_;
  CMatrix rho_;
  Family r_;  // rho|s><t|rho^dag
};

}  // namespace adqec
