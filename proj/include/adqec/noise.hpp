#pragma once

// Multi-round Kraus noise on n qubits and the amplitude-damping models built on it.
//
// A NoiseProcess is a list of branches. Each branch carries a weight and, for every
// round, a list of Kraus operators; its terms are the cartesian product of the
// per-round lists. A branch with several rounds therefore shares one classical
// label across rounds (the local-k model picks the damped subset once).

#include <array>
#include <string>
#include <vector>

#include "adqec/operator_core.hpp"

namespace adqec {

struct DampingSpec {
  double gamma;
  double gamma0;
  double gamma1;
};

/// Two-round split: gamma0 = gamma/2, gamma1 = gamma/(2-gamma).
DampingSpec split_damping(double gamma);

/// Split into `rounds` slots, each removing gamma/rounds of the initial excited population.
/// Reduces to split_damping for two rounds.
std::vector<double> split_damping_rounds(double gamma, int rounds);

/// Single-qubit amplitude-damping Kraus pair (no-jump, jump).
std::array<CMatrix, 2> ad_kraus(double gamma_r);

struct NoiseBranch {
  double weight = 1.0;
  std::vector<std::vector<CMatrix>> rounds;  // rounds[r] = Kraus operators of round r
};

/// One term of the flattened process: weight and one Kraus operator per round.
struct NoiseTerm {
  double weight;
  std::vector<CMatrix> kraus;
};

class NoiseProcess {
 public:
  NoiseProcess(int n_qubits, std::vector<NoiseBranch> branches, bool complete = true, std::string label = "kraus");

  /// Generic (non-qubit) space of dimension d.
  static NoiseProcess on_dimension(Index d, std::vector<NoiseBranch> branches, bool complete = true);

  int n_qubits() const { return n_qubits_; }
  Index dim() const { return dim_; }
  int rounds() const { return rounds_; }
  const std::vector<NoiseBranch>& branches() const { return branches_; }
  const std::string& label() const { return label_; }

  /// False for truncated models whose rounds are not trace preserving.
  bool complete() const { return complete_; }

  /// max over rounds of || sum_b w_b sum_K K^dag K - I ||_F.
  double completeness_error() const;
  double completeness_error(int round) const;

  /// Throws NumericalError if a complete process violates trace preservation beyond tol.
  void check(double tol = 1e-10) const;

  /// Every (weight, per-round Kraus tuple).
  std::vector<NoiseTerm> terms() const;

  /// Kraus operators of the whole process with sqrt(weight) folded in; element r of
  /// each entry is the round-r operator. Weight goes into round 0 only.
  std::vector<std::vector<CMatrix>> weighted_terms() const;

  /// Single-round process whose Kraus operators are E_l ... E_0 of each term.
  NoiseProcess composed() const;

  /// Per-round marginal channel: sum_b w_b sum_K K (.) K^dag as Kraus list with weights folded.
  std::vector<CMatrix> round_kraus(int round) const;

  /// Apply the marginal channel of one round.
  CMatrix apply_round(int round, const CMatrix& x) const;

 private:
  NoiseProcess(Index dim, int n_qubits, std::vector<NoiseBranch> branches, bool complete, std::string label);

  Index dim_;
  int n_qubits_;
  int rounds_;
  std::vector<NoiseBranch> branches_;
  bool complete_;
  std::string label_;
};

/// Single-qubit operator `op` on qubit q of n, identity elsewhere.
CMatrix embed_qubit(const CMatrix& op, int q, int n);

/// Damping that hits one fixed subset K of k qubits (uniformly chosen) in every round.
/// Per-round strengths from split_damping_rounds(gamma, rounds).
NoiseProcess local_k_noise(int n, int k, double gamma, int rounds = 2);

/// Per-round Kraus list {tensor of single-qubit AD operators with at most k jumps}.
NoiseProcess weight_k_noise(int n, int k, double gamma, int rounds = 2);

/// {sqrt(1 - n p) I, sqrt(p) X_q} in round 0, identity afterwards. Needs n p <= 1.
NoiseProcess single_flip_noise(int n, double p, int rounds = 2);

/// Same model with explicit per-round strengths.
NoiseProcess local_k_noise_strengths(int n, int k, const std::vector<double>& gammas);
NoiseProcess weight_k_noise_strengths(int n, int k, const std::vector<double>& gammas);

/// Index-form tensors of one noise process for a fixed reference state.
///
/// flat(b, r) is the d^2 x d^2 matrix with entry [(a,b'),(y,x)] = N_{a b'}[y,x] where
/// N_{a b'} = sum_K K^* |a><b'| K^T over the round-r Kraus of branch b (branch weight
/// folded into round 0). rflat() has entry [(s,t),(p,q)] = (rho|s><t|rho^dag)[p,q].
class PrecomputedTensors {
 public:
  PrecomputedTensors(const NoiseProcess& noise, const CMatrix& rho);

  int branch_count() const { return static_cast<int>(flat_.size()); }
  int rounds() const { return rounds_; }
  Index dim() const { return dim_; }
  Index logical_dim() const { return rho_.rows(); }
  const CMatrix& rho() const { return rho_; }

  const CMatrix& flat(int branch, int round) const { return flat_.at(branch).at(round); }
  const CMatrix& rflat() const { return rflat_; }

  CMatrix n_entry(int branch, int round, Index a, Index b) const;
  CMatrix r_entry(Index s, Index t) const;

 private:
  Index dim_;
  int rounds_;
  CMatrix rho_;
  std::vector<std::vector<CMatrix>> flat_;
  CMatrix rflat_;
};

PrecomputedTensors precompute_tensors(const NoiseProcess& noise, const CMatrix& rho);

/// Throws NumericalError unless rho is Hermitian, PSD and unit trace within tol.
void check_density(const CMatrix& rho, double tol = 1e-9);

CMatrix maximally_mixed(Index d);

}  // namespace adqec
