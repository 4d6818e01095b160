#pragma once

// Alternating block maximization of the entanglement fidelity: each step fixes all
// blocks but one and solves the resulting SDP exactly. Order per iteration is
// decoders, check rounds (last to first), encoder.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "adqec/code_model.hpp"
#include "adqec/noise.hpp"
#include "adqec/random.hpp"
#include "adqec/sdp.hpp"

namespace adqec {

enum class InitStrategy { RandomIsometry, MaximallyMixedMarginal, Fixture };

std::string to_string(InitStrategy s);

struct SeesawConfig {
  int max_iters = 200;
  /// Stop after `strikes` consecutive iterations with relative gain below this.
  double rel_tol = 1e-7;
  int strikes = 3;
  int restarts = 5;
  std::uint64_t seed = 0;
  InitStrategy init = InitStrategy::RandomIsometry;
  /// Starting point for InitStrategy::Fixture.
  std::optional<StrategicCode> fixture;
  /// Reference state on L; maximally mixed when unset.
  std::optional<CMatrix> rho;
  SdpOptions sdp;
  /// Run certify_kkt after every SDP step.
  bool certify = true;
  /// Static only: keep the encoder and optimize the decoder alone.
  bool fixed_encoder = false;
  /// After each iteration try a step along the last change, kept only if it helps.
  bool extrapolate = true;
  /// Worker threads for independent restarts.
  int jobs = 1;

  void check() const;
};

struct SeesawStep {
  int iteration;
  std::string block;  // "decoder", "check<r>", "encoder"
  /// Objective held after the step; a solve that would lower it is not applied.
  double objective;
  bool certified;
  double slackness;
  int sdp_iterations;
  double seconds;
};

struct SeesawTrace {
  /// Objective before the first iteration and after each one.
  std::vector<double> objectives;
  std::vector<SeesawStep> steps;
  bool converged = false;
  int restart = 0;
  /// Final objective and iteration count of every restart, in restart order.
  std::vector<double> restart_objectives;
  std::vector<int> restart_iterations;
  std::vector<double> restart_worst_decrease;

  int iterations() const { return static_cast<int>(objectives.size()) - 1; }
  double final_objective() const { return objectives.empty() ? 0.0 : objectives.back(); }
  double spread() const;
  /// Largest drop between consecutive logged objectives (steps included).
  double worst_decrease() const;
  bool monotone(double tol = 2e-7) const { return worst_decrease() <= tol; }
  /// Every restart, not only the kept one.
  bool all_monotone(double tol = 2e-7) const;
};

/// Solver failure inside a see-saw run, carrying the progress made so far.
class SeesawFailure : public SolverError {
 public:
  SeesawFailure(const std::string& what, SeesawTrace trace) : SolverError(what), trace_(std::move(trace)) {}
  const SeesawTrace& trace() const { return trace_; }

 private:
  SeesawTrace trace_;
};

struct SeesawRun {
  StrategicCode code;
  SeesawTrace trace;
};

struct StaticSeesawRun {
  StaticCode code;
  SeesawTrace trace;
};

/// One check round with m_count outcomes, two noise rounds; factorized objective.
SeesawRun seesaw_single_check(const NoiseProcess& noise, int n, int m_count, const SeesawConfig& cfg);

/// One noise round, no checks.
StaticSeesawRun seesaw_static(const NoiseProcess& noise, int n, const SeesawConfig& cfg);
/// Static see-saw from a given starting code (used with fixed_encoder).
StaticSeesawRun seesaw_static(const NoiseProcess& noise, const StaticCode& start, const SeesawConfig& cfg);

/// l = m_counts.size() check rounds (1 or 2), l+1 noise rounds; propagation objective.
SeesawRun seesaw_general(const NoiseProcess& noise, int n, const std::vector<int>& m_counts, const SeesawConfig& cfg);

/// Random or structured starting codes, as used by the restarts.
StrategicCode initial_code(Rng& rng, int n, const std::vector<int>& m_counts, InitStrategy init);

enum class NoiseModel { Local, Weight, Flip };

std::string to_string(NoiseModel m);
NoiseModel parse_noise_model(const std::string& s);
NoiseProcess make_noise(NoiseModel model, int n, int k, double gamma, int rounds);

struct SweepConfig {
  NoiseModel model = NoiseModel::Local;
  int n = 2;
  int k = 1;
  int m_count = 1;
  SeesawConfig seesaw;
  /// Parallel sweep points.
  int jobs = 1;
  /// Record wall time in the seconds column; off keeps the CSV reproducible.
  bool timing = false;
};

struct SweepRow {
  double gamma = 0;
  std::string model;
  int n = 0, k = 0, m_count = 0, restarts = 0;
  double best_fidelity = 0;
  double spread = 0;
  double baseline_unencoded = 0;
  std::optional<double> baseline_protocol;
  std::optional<double> baseline_petz;
  int iters_total = 0;
  double seconds = 0;
  std::string error;  // empty on success
  StrategicCode best_code;
  bool monotone = true;
};

struct SweepTable {
  std::vector<SweepRow> rows;

  static const char* header();
  void write_csv(std::ostream& out) const;
};

SweepTable sweep(const std::vector<double>& gammas, const SweepConfig& cfg);

/// Fidelity of one unencoded qubit under the per-qubit damping of the sweep.
double unencoded_fidelity(double gamma);
/// Built-in dynamical protocol for n = 2 or 3 qubits, if any.
std::optional<StrategicCode> fixture_protocol(int n);

}  // namespace adqec
