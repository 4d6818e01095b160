#pragma once

// Block SDPs over Choi matrices:
//
//   maximize  sum_i Tr(M_i X_i)
//   s.t.      X_i >= 0,   sum_{i in g} Tr_out(X_i) = I_in   for every group g.
//
// Dual: minimize sum_g Tr(Y_g) s.t. Y_g (x) I - M_i >= 0 for i in g.
// Solved by a feasible-start primal-dual interior-point method with
// Nesterov-Todd scaling, directly on complex Hermitian blocks.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "adqec/operator_core.hpp"

namespace adqec {

enum class ConstraintKind {
  PerBlockMarginal,  // every block is its own channel
  SummedMarginal,    // all blocks form one instrument
  Grouped            // explicit groups (adaptive instruments)
};

struct SdpBlock {
  CMatrix objective;
  DimList in_dims;
  DimList out_dims;

  Index d_in() const { return dim_product(in_dims); }
  Index d_out() const { return dim_product(out_dims); }
};

struct SdpSubproblem {
  std::vector<SdpBlock> blocks;
  ConstraintKind constraint = ConstraintKind::PerBlockMarginal;
  std::vector<int> groups;  // used with Grouped: group index per block

  /// Group index of each block, resolved from the constraint kind.
  std::vector<int> group_of_blocks() const;
  int group_count() const;
  /// Throws on non-Hermitian objectives or blocks that cannot share a constraint.
  void check() const;
};

enum class SdpStatus { Optimal, MaxIter, Infeasible };

std::string to_string(SdpStatus s);

struct SdpOptions {
  double tol = 1e-9;
  /// Target for max_i |X_i Z_i|_F, relative to 1 + |objective|.
  double slack_tol = 1e-7;
  int max_iters = 100;
  /// Largest block accepted.
  Index max_block = 256;
};

struct SdpSolution {
  std::vector<CMatrix> blocks;
  double objective = 0;
  std::optional<std::vector<CMatrix>> dual;  // Y_g per group
  SdpStatus status = SdpStatus::MaxIter;
  int iterations = 0;
  double gap = 0;                  // primal-dual gap at exit
  double primal_residual = 0;      // max Frobenius norm of Tr_out residuals
  double dual_objective = 0;
};

SdpSolution solve(const SdpSubproblem& p, const SdpOptions& opts = {});
SdpSolution solve(const SdpSubproblem& p, double tol);

/// Objective of arbitrary blocks under p.
double evaluate(const SdpSubproblem& p, const std::vector<CMatrix>& blocks);
/// Constraint residual recomputed with partial_trace.
double constraint_residual(const SdpSubproblem& p, const std::vector<CMatrix>& blocks);

struct CertReport {
  double slackness = 0;      // max_i ||(Y (x) I - M_i) X_i||_F
  double dual_min_eig = 0;   // min_i lambda_min(Y (x) I - M_i)
  double primal_min_eig = 0;
  double primal_residual = 0;
  double duality_gap = 0;    // sum Tr(Y) - primal objective
  double slackness_tol = 1e-5;
  double dual_tol = 1e-6;

  bool passed() const;
};

/// Throws std::invalid_argument when the solution has no dual certificate.
CertReport certify_kkt(const SdpSubproblem& p, const SdpSolution& s, double slackness_tol = 1e-5,
                       double dual_tol = 1e-6);

/// Same report for blocks that did not come from the solver, reusing s's dual.
CertReport certify_kkt(const SdpSubproblem& p, const std::vector<CMatrix>& blocks, const SdpSolution& s,
                       double slackness_tol = 1e-5, double dual_tol = 1e-6);

/// Feasible point with every group spread uniformly: X_i = I/(d_out |g|).
std::vector<CMatrix> uniform_feasible_point(const SdpSubproblem& p);

struct ProbeResult {
  double eps = 0;
  double distance = 0;        // ||X~ - X*||_F over all blocks
  double objective_drop = 0;  // obj(X*) - obj(X~)
  double ratio = 0;           // distance / eps (0 when eps = 0)
};

/// Mixes the solution with the uniform feasible point until the objective drops by eps.
ProbeResult perturbation_probe(const SdpSubproblem& p, const SdpSolution& s, double eps);

/// Plain-text SDPA sparse format of the real-embedded problem (minimization of -objective).
void write_sdpa(const SdpSubproblem& p, std::ostream& out);

}  // namespace adqec
