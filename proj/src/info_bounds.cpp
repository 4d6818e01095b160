#include "adqec/info_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "adqec/random.hpp"
#include "adqec/sdp.hpp"

namespace adqec {

namespace {

constexpr double kZeroWeight = 1e-14;

}  // namespace

std::vector<PurifiedState> purify(const CodespaceProjector& proj, const Interrogator& t, const NoiseProcess& noise) {
  const Index d = proj.dim(), l = proj.rank();
  if (t.dim() != d || noise.dim() != d) throw DimensionError("purify: codespace, checks and noise act on different spaces");
  const CMatrix& v = proj.isometry();
  const int outcomes = t.outcome_count();

  std::vector<PurifiedState> out;
  for (int m = 0; m < outcomes; ++m) {
    const auto kraus = t.effective_kraus(m, noise);
    const Index ne = static_cast<Index>(kraus.size());
    PurifiedState s;
    s.dims = {l, d, outcomes, ne};
    s.outcome = m;
    s.psi = CVector::Zero(l * d * outcomes * ne);
    for (Index e = 0; e < ne; ++e) {
      const CMatrix kv = kraus[e] * v;
      for (Index i = 0; i < l; ++i)
        for (Index a = 0; a < d; ++a) s.psi(((i * d + a) * outcomes + m) * ne + e) = kv(a, i);
    }
    s.psi /= std::sqrt(static_cast<double>(l));
    s.weight = s.psi.squaredNorm();
    if (s.weight > kZeroWeight)
      s.psi /= std::sqrt(s.weight);
    else
      s.psi.setZero();
    out.push_back(std::move(s));
  }
  return out;
}

CMatrix reduced_state(const CVector& psi, const DimList& dims, const std::vector<int>& keep) {
  if (psi.size() != dim_product(dims)) throw DimensionError("reduced_state: vector does not match dims");
  const int k = static_cast<int>(dims.size());
  std::vector<bool> kept(k, false);
  for (int q : keep) {
    if (q < 0 || q >= k || kept[q]) throw DimensionError("reduced_state: bad subsystem list");
    kept[q] = true;
  }
  Index dk = 1;
  for (int q : keep) dk *= dims[q];
  const Index dr = psi.size() / dk;

  CMatrix m = CMatrix::Zero(dk, dr);
  std::vector<Index> digit(k, 0);
  for (Index flat = 0; flat < psi.size(); ++flat) {
    Index rem = flat;
    for (int q = k - 1; q >= 0; --q) {
      digit[q] = rem % dims[q];
      rem /= dims[q];
    }
    Index row = 0, col = 0;
    for (int q : keep) row = row * dims[q] + digit[q];
    for (int q = 0; q < k; ++q)
      if (!kept[q]) col = col * dims[q] + digit[q];
    m(row, col) = psi(flat);
  }
  return m * m.adjoint();
}

EntropyReport entropy_gap(const std::vector<PurifiedState>& states) {
  EntropyReport rep;
  for (const auto& s : states) {
    if (s.dims.size() != 4) throw DimensionError("entropy_gap: state must list R, A, B, E");
    BranchEntropy b{s.outcome, s.weight, 0, 0, 0};
    if (s.weight > kZeroWeight) {
      using P = PurifiedState;
      b.s_r = von_neumann_entropy(reduced_state(s.psi, s.dims, {P::R}));
      b.s_be = von_neumann_entropy(reduced_state(s.psi, s.dims, {P::B, P::E}));
      b.s_rbe = von_neumann_entropy(reduced_state(s.psi, s.dims, {P::R, P::B, P::E}));
      rep.epsilon = std::max(rep.epsilon, b.gap());
    }
    rep.branches.push_back(b);
  }
  return rep;
}

std::string to_string(DecoderSource s) { return s == DecoderSource::SdpOptimal ? "sdp" : "petz"; }

DecoderSource parse_decoder_source(const std::string& s) {
  if (s == "sdp") return DecoderSource::SdpOptimal;
  if (s == "petz") return DecoderSource::TemporalPetz;
  throw std::invalid_argument("unknown decoder source '" + s + "' (expected sdp or petz)");
}

std::vector<CMatrix> recovery_coefficients(const CodespaceProjector& proj, const Interrogator& t,
                                           const NoiseProcess& noise) {
  const Index d = proj.dim(), l = proj.rank();
  const CMatrix& v = proj.isometry();
  std::vector<CMatrix> out;
  for (int m = 0; m < t.outcome_count(); ++m) {
    const auto kraus = t.effective_kraus(m, noise);
    CMatrix c = CMatrix::Zero(d * l, d * l);
    for (Index i = 0; i < l; ++i)
      for (Index j = 0; j < l; ++j) {
        const CMatrix x = v.col(i) * v.col(j).adjoint();
        const CMatrix y = apply_kraus(kraus, x);
        c += tensor(y.transpose(), matrix_unit(l, j, i));
      }
    out.push_back(hermitize(c) / static_cast<double>(l * l));
  }
  return out;
}

std::string BoundReport::csv_row() const {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%.6f, %.6f, %.6f, %d", epsilon, bound, achieved, vacuous ? 1 : 0);
  return buf;
}

BoundReport verify_theorem3(const CodespaceProjector& proj, const Interrogator& t, const NoiseProcess& noise,
                            DecoderSource source) {
  BoundReport rep;
  rep.source = source;
  rep.epsilon = std::max(0.0, entropy_gap(purify(proj, t, noise)).epsilon);
  rep.bound = 1 - 2 * std::sqrt(rep.epsilon);
  rep.vacuous = rep.bound <= 0;

  const auto coeff = recovery_coefficients(proj, t, noise);
  if (source == DecoderSource::SdpOptimal) {
    SdpSubproblem p;
    for (const auto& c : coeff) p.blocks.push_back({c, {proj.dim()}, {proj.rank()}});
    const auto sol = solve(p);
    if (sol.status != SdpStatus::Optimal) throw SolverError("verify_theorem3: decoder SDP ended with " + to_string(sol.status));
    rep.achieved = sol.objective;
  } else {
    const auto decs = temporal_petz(proj, t, noise).decoders();
    for (std::size_t m = 0; m < coeff.size(); ++m) rep.achieved += (coeff[m] * decs[m].matrix).trace().real();
  }
  rep.satisfied = rep.achieved >= rep.bound - 1e-7;
  return rep;
}

BoundInstance random_bound_instance(std::uint64_t seed) {
  Rng rng(seed);
  const int n = 1 + static_cast<int>(rng.uniform() * 2);
  const Index d = Index{1} << n;
  const CMatrix v = n == 1 ? CMatrix(identity(2)) : rng.isometry(d, 2);

  std::vector<NoiseBranch> branches;
  const int nb = 1 + static_cast<int>(rng.uniform() * 2);
  const auto w = rng.simplex(static_cast<std::size_t>(nb));
  for (int b = 0; b < nb; ++b) {
    NoiseBranch br;
    br.weight = w[b];
    for (int r = 0; r < 2; ++r) {
      // identity mixed with a random channel of strength q <= 0.2
      const double u = rng.uniform();
      const double q = 0.2 * u * u;
      std::vector<CMatrix> ks{std::sqrt(1 - q) * identity(d)};
      for (const auto& k : rng.channel_kraus(d, d, 1 + static_cast<Index>(rng.uniform() * 3))) ks.push_back(std::sqrt(q) * k);
      br.rounds.push_back(std::move(ks));
    }
    branches.push_back(std::move(br));
  }

  return {CodespaceProjector(v), Interrogator(d, {{{rng.unitary(d)}}}),
          NoiseProcess(n, std::move(branches))};
}

}  // namespace adqec
