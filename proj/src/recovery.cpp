#include "adqec/recovery.hpp"

#include <cmath>
#include <limits>
#include <optional>

namespace adqec {

Interrogator::Interrogator(Index dim, std::vector<std::vector<std::vector<CMatrix>>> rounds)
    : dim_(dim), rounds_(std::move(rounds)) {
  if (rounds_.empty()) throw std::invalid_argument("Interrogator: need at least one trajectory");
  const std::size_t l = rounds_[0].size();
  for (const auto& traj : rounds_) {
    if (traj.size() != l) throw DimensionError("Interrogator: trajectories have different round counts");
    for (const auto& round : traj) {
      if (round.empty()) throw std::invalid_argument("Interrogator: empty Kraus set");
      for (const auto& k : round)
        if (k.rows() != dim_ || k.cols() != dim_) throw DimensionError("Interrogator: Kraus operator is not dim x dim");
    }
  }
}

Interrogator Interrogator::from_code(const StrategicCode& code) {
  check_dims(code);
  const Index d = code.physical_dim();
  const int l = code.check_rounds();
  if (l == 0) return trivial(d);
  const int total = code.outcome_count();
  std::vector<std::vector<std::vector<CMatrix>>> rounds(total);
  for (int m = 0; m < total; ++m) {
    // element index of round r is the trajectory prefix m_0..m_r in mixed radix
    int suffix = total;
    for (int r = 0; r < l; ++r) {
      suffix /= code.outcome_counts[r];
      const int elem = m / suffix;
      const auto& c = code.rounds[r][elem];
      if (c.d_in() != d || c.d_out() != d) throw DimensionError("Interrogator: checks must keep the physical dimension");
      auto kraus = kraus_from_choi(c);
      if (kraus.empty()) kraus.push_back(CMatrix::Zero(d, d));
      rounds[m].push_back(std::move(kraus));
    }
  }
  return Interrogator(d, std::move(rounds));
}

Interrogator Interrogator::trivial(Index dim) {
  Interrogator t;
  t.dim_ = dim;
  t.rounds_.assign(1, {});
  return t;
}

namespace {

// Products C_l ... C_1 over every Kraus choice along one trajectory.
std::vector<CMatrix> compose_rounds(Index dim, const std::vector<std::vector<CMatrix>>& traj) {
  std::vector<CMatrix> acc{identity(dim)};
  for (const auto& round : traj) {
    std::vector<CMatrix> next;
    for (const auto& a : acc)
      for (const auto& c : round) next.push_back(c * a);
    acc = std::move(next);
  }
  return acc;
}

}  // namespace

std::vector<CMatrix> Interrogator::effective_kraus(int m, const NoiseProcess& noise) const {
  if (noise.dim() != dim_) throw DimensionError("effective_kraus: noise acts on the wrong dimension");
  const auto& traj = trajectory(m);
  const int l = static_cast<int>(traj.size());
  // without checks the rounds are composed directly
  const NoiseProcess proc = l == 0 ? noise.composed() : noise;
  if (proc.rounds() != l + 1)
    throw DimensionError("effective_kraus: " + std::to_string(l) + " check rounds need " + std::to_string(l + 1) +
                         " noise rounds, got " + std::to_string(proc.rounds()));
  std::vector<CMatrix> out;
  for (const auto& term : proc.weighted_terms()) {
    std::vector<CMatrix> acc{term[0]};
    for (int r = 0; r < l; ++r) {
      std::vector<CMatrix> next;
      for (const auto& a : acc)
        for (const auto& c : traj[r]) next.push_back(term[r + 1] * c * a);
      acc = std::move(next);
    }
    for (auto& k : acc) out.push_back(std::move(k));
  }
  return out;
}

double Interrogator::completeness_error() const {
  CMatrix s = CMatrix::Zero(dim_, dim_);
  for (const auto& traj : rounds_)
    for (const auto& c : compose_rounds(dim_, traj)) s += c.adjoint() * c;
  return (s - identity(dim_)).norm();
}

CodespaceProjector::CodespaceProjector(CMatrix v, double tol) : v_(std::move(v)) {
  if (v_.cols() == 0 || v_.cols() > v_.rows()) throw DimensionError("CodespaceProjector: bad isometry shape");
  if ((v_.adjoint() * v_ - identity(v_.cols())).cwiseAbs().maxCoeff() > tol)
    throw NumericalError("CodespaceProjector: codewords are not orthonormal");
}

CodespaceProjector CodespaceProjector::from_encoder(const ChoiOperator& encoder) {
  return CodespaceProjector(encoder_isometry(encoder));
}

std::string to_string(RecoveryKind k) {
  switch (k) {
    case RecoveryKind::StaticPetz: return "static_petz";
    case RecoveryKind::TemporalPetz: return "temporal_petz";
    case RecoveryKind::Perfect: return "perfect";
  }
  return "unknown";
}

std::vector<ChoiOperator> RecoveryFamily::decoders() const {
  std::vector<ChoiOperator> out;
  for (const auto& k : kraus) out.push_back(choi_from_kraus(k, in_dims, out_dims));
  return out;
}

double RecoveryFamily::excess() const {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& set : kraus) {
    const Index d = dim_product(in_dims);
    CMatrix s = CMatrix::Zero(d, d);
    for (const auto& r : set) s += r.adjoint() * r;
    worst = std::max(worst, herm_eig(s).values.maxCoeff() - 1.0);
  }
  return worst;
}

namespace {

constexpr double kPinvCutoff = 1e-10;
constexpr double kCompletionTol = 1e-9;

DimList default_dims(Index d, const DimList& dims) {
  if (!dims.empty()) {
    if (dim_product(dims) != d) throw DimensionError("recovery: dims do not match the physical dimension");
    return dims;
  }
  int n = 0;
  while ((Index{1} << n) < d) ++n;
  return (Index{1} << n) == d ? qubit_dims(n) : DimList{d};
}

// Appends Kraus |0_L><k| sqrt(I - sum R^dag R) for every basis k when the deficit is not negligible.
bool complete(std::vector<CMatrix>& kraus, Index d, Index L) {
  CMatrix s = CMatrix::Zero(d, d);
  for (const auto& r : kraus) s += r.adjoint() * r;
  const CMatrix deficit = hermitize(CMatrix(identity(d) - s));
  if (deficit.trace().real() <= kCompletionTol) return false;
  const CMatrix root = sqrt_psd(deficit);
  for (Index k = 0; k < d; ++k) {
    CMatrix r = CMatrix::Zero(L, d);
    r.row(0) = root.row(k);
    kraus.push_back(std::move(r));
  }
  return true;
}

// V^dag F_e^dag N^{-1/2} with N = sum_e F_e Pi F_e^dag; nullopt when N vanishes.
std::optional<std::vector<CMatrix>> petz_kraus(const CMatrix& v, const std::vector<CMatrix>& f) {
  const Index d = v.rows();
  const CMatrix pi = v * v.adjoint();
  CMatrix n = CMatrix::Zero(d, d);
  for (const auto& k : f) n += k * pi * k.adjoint();
  n = hermitize(n);
  const auto eig = herm_eig(n);
  const double top = eig.values.maxCoeff();
  if (!(top > 0)) return std::nullopt;
  const CMatrix inv_root = inv_sqrt_psd(n, kPinvCutoff * top);
  std::vector<CMatrix> out;
  for (const auto& k : f) out.push_back(v.adjoint() * k.adjoint() * inv_root);
  return out;
}

CMatrix kl_table(const CMatrix& v, const std::vector<CMatrix>& kraus) {
  const Index n = static_cast<Index>(kraus.size());
  const double L = static_cast<double>(v.cols());
  std::vector<CMatrix> kv;
  for (const auto& k : kraus) kv.push_back(k * v);
  CMatrix lambda(n, n);
  for (Index a = 0; a < n; ++a)
    for (Index b = 0; b < n; ++b) lambda(a, b) = (kv[a].adjoint() * kv[b]).trace() / L;
  return hermitize(lambda);
}

struct Gauge {
  CMatrix u;       // columns are eigenvectors of lambda
  RVector d;       // eigenvalues
};

Gauge diagonal_gauge(const CMatrix& lambda) {
  const auto eig = herm_eig(lambda);
  return {eig.vectors, eig.values};
}

// F_e = sum_e' u(e', e) K_e'.
std::vector<CMatrix> rotate(const std::vector<CMatrix>& kraus, const CMatrix& u) {
  std::vector<CMatrix> out;
  for (Index e = 0; e < u.cols(); ++e) {
    CMatrix f = CMatrix::Zero(kraus[0].rows(), kraus[0].cols());
    for (Index a = 0; a < u.rows(); ++a) f += u(a, e) * kraus[a];
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace

RecoveryFamily static_petz(const CodespaceProjector& proj, const std::vector<CMatrix>& kraus, const DimList& dims) {
  if (kraus.empty()) throw std::invalid_argument("static_petz: empty Kraus set");
  const CMatrix& v = proj.isometry();
  for (const auto& k : kraus)
    if (k.cols() != v.rows() || k.rows() != v.rows()) throw DimensionError("static_petz: Kraus shape does not match the codespace");
  auto r = petz_kraus(v, kraus);
  if (!r) throw NumericalError("static_petz: noise maps the codespace to zero");
  RecoveryFamily fam;
  fam.kind = RecoveryKind::StaticPetz;
  fam.in_dims = default_dims(v.rows(), dims);
  fam.out_dims = {proj.rank()};
  fam.completed.push_back(complete(*r, v.rows(), proj.rank()));
  fam.kraus.push_back(std::move(*r));
  return fam;
}

RecoveryFamily temporal_petz(const CodespaceProjector& proj, const Interrogator& t, const NoiseProcess& noise,
                             KrausGauge gauge) {
  const CMatrix& v = proj.isometry();
  if (t.dim() != v.rows()) throw DimensionError("temporal_petz: interrogator and codespace dimensions differ");
  RecoveryFamily fam;
  fam.kind = RecoveryKind::TemporalPetz;
  fam.in_dims = default_dims(v.rows(), {});
  fam.out_dims = {proj.rank()};
  for (int m = 0; m < t.outcome_count(); ++m) {
    auto f = t.effective_kraus(m, noise);
    if (gauge == KrausGauge::Diagonal) f = rotate(f, diagonal_gauge(kl_table(v, f)).u);
    auto r = petz_kraus(v, f);
    // a trajectory that never occurs gets only the completion
    std::vector<CMatrix> set = r ? std::move(*r) : std::vector<CMatrix>{};
    fam.completed.push_back(complete(set, v.rows(), proj.rank()));
    fam.kraus.push_back(std::move(set));
  }
  return fam;
}

KLReport kl_check(const CodespaceProjector& proj, const Interrogator& t, const NoiseProcess& noise, double threshold) {
  const CMatrix& v = proj.isometry();
  if (t.dim() != v.rows()) throw DimensionError("kl_check: interrogator and codespace dimensions differ");
  KLReport rep;
  rep.threshold = threshold;
  const Index L = v.cols();
  for (int m = 0; m < t.outcome_count(); ++m) {
    const auto kraus = t.effective_kraus(m, noise);
    std::vector<CMatrix> kv;
    for (const auto& k : kraus) kv.push_back(k * v);
    const CMatrix lambda = kl_table(v, kraus);
    for (std::size_t a = 0; a < kv.size(); ++a)
      for (std::size_t b = 0; b < kv.size(); ++b) {
        const CMatrix g = kv[a].adjoint() * kv[b];
        for (Index i = 0; i < L; ++i)
          for (Index j = 0; j < L; ++j) {
            if (i == j)
              rep.diag_variance_residual = std::max(rep.diag_variance_residual, std::abs(g(i, i) - lambda(a, b)));
            else
              rep.offdiag_residual = std::max(rep.offdiag_residual, std::abs(g(i, j)));
          }
      }
    rep.lambda.push_back(lambda);
  }
  rep.correctable = rep.offdiag_residual <= threshold && rep.diag_variance_residual <= threshold;
  return rep;
}

RecoveryFamily perfect_recovery(const CodespaceProjector& proj, const Interrogator& t, const NoiseProcess& noise,
                                const KLReport& kl) {
  if (!kl.correctable) throw std::invalid_argument("perfect_recovery: the instance is not correctable");
  if (static_cast<int>(kl.lambda.size()) != t.outcome_count())
    throw DimensionError("perfect_recovery: report does not match the interrogator");
  const CMatrix& v = proj.isometry();
  const Index L = proj.rank();
  RecoveryFamily fam;
  fam.kind = RecoveryKind::Perfect;
  fam.in_dims = default_dims(v.rows(), {});
  fam.out_dims = {L};
  for (int m = 0; m < t.outcome_count(); ++m) {
    const auto kraus = t.effective_kraus(m, noise);
    const Gauge g = diagonal_gauge(kl_table(v, kraus));
    const auto f = rotate(kraus, g.u);
    const double top = std::max(g.d.maxCoeff(), 0.0);
    std::vector<CMatrix> set;
    for (std::size_t e = 0; e < f.size(); ++e) {
      const double de = g.d(static_cast<Index>(e));
      // W_e = F_e V / sqrt(d_e) is an isometry; its adjoint undoes error e
      if (top > 0 && de > kPinvCutoff * top)
        set.push_back((f[e] * v).adjoint() / std::sqrt(de));
      else
        set.push_back(CMatrix::Zero(L, v.rows()));
    }
    fam.completed.push_back(complete(set, v.rows(), L));
    fam.kraus.push_back(std::move(set));
  }
  return fam;
}

StrategicCode with_decoders(const StrategicCode& code, const RecoveryFamily& r) {
  if (static_cast<int>(r.kraus.size()) != code.outcome_count())
    throw DimensionError("with_decoders: recovery has " + std::to_string(r.kraus.size()) + " trajectories, code has " +
                         std::to_string(code.outcome_count()));
  StrategicCode out = code;
  for (std::size_t m = 0; m < r.kraus.size(); ++m) {
    const auto& old = code.decoders[m];
    if (old.d_in() != dim_product(r.in_dims) || old.d_out() != dim_product(r.out_dims))
      throw DimensionError("with_decoders: recovery dimensions do not match the code");
    out.decoders[m] = choi_from_kraus(r.kraus[m], old.in_dims, old.out_dims);
  }
  return out;
}

}  // namespace adqec
