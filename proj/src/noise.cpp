#include "adqec/noise.hpp"

#include <functional>

namespace adqec {

namespace {

void check_gamma(double g, const char* what) {
  if (!(g >= 0.0 && g <= 1.0)) throw std::invalid_argument(std::string(what) + ": damping strength outside [0,1]");
}

int qubits_of(Index d) {
  int n = 0;
  Index p = 1;
  while (p < d) {
    p *= 2;
    ++n;
  }
  return p == d ? n : -1;
}

// All k-subsets of {0..n-1} in lexicographic order.
std::vector<std::vector<int>> subsets(int n, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  std::function<void(int)> rec = [&](int start) {
    if (static_cast<int>(cur.size()) == k) {
      out.push_back(cur);
      return;
    }
    for (int q = start; q < n; ++q) {
      cur.push_back(q);
      rec(q + 1);
      cur.pop_back();
    }
  };
  rec(0);
  return out;
}

CMatrix tensor_all(const std::vector<CMatrix>& ops) {
  CMatrix out = CMatrix::Identity(1, 1);
  for (const auto& op : ops) out = tensor(out, op);
  return out;
}

}  // namespace

DampingSpec split_damping(double gamma) {
  check_gamma(gamma, "split_damping");
  const double g0 = gamma / 2.0;
  const double g1 = gamma / (2.0 - gamma);
  return {gamma, g0, g1};
}

std::vector<double> split_damping_rounds(double gamma, int rounds) {
  check_gamma(gamma, "split_damping_rounds");
  if (rounds < 1) throw std::invalid_argument("split_damping_rounds: need at least one round");
  std::vector<double> out;
  const double r = rounds;
  for (int i = 0; i < rounds; ++i) out.push_back(gamma / (r - i * gamma));
  // the last slot of gamma = 1 is exactly 1
  for (auto& g : out) g = std::min(g, 1.0);
  return out;
}

std::array<CMatrix, 2> ad_kraus(double gamma_r) {
  check_gamma(gamma_r, "ad_kraus");
  CMatrix e0 = CMatrix::Zero(2, 2);
  CMatrix e1 = CMatrix::Zero(2, 2);
  e0(0, 0) = 1.0;
  e0(1, 1) = std::sqrt(1.0 - gamma_r);
  e1(0, 1) = std::sqrt(gamma_r);
  return {e0, e1};
}

NoiseProcess::NoiseProcess(Index dim, int n_qubits, std::vector<NoiseBranch> branches, bool complete,
                           std::string label)
    : dim_(dim), n_qubits_(n_qubits), rounds_(0), branches_(std::move(branches)), complete_(complete),
      label_(std::move(label)) {
  if (branches_.empty()) throw std::invalid_argument("NoiseProcess: no branches");
  rounds_ = static_cast<int>(branches_.front().rounds.size());
  if (rounds_ < 1) throw std::invalid_argument("NoiseProcess: no rounds");
  for (const auto& b : branches_) {
    if (b.weight < 0) throw std::invalid_argument("NoiseProcess: negative branch weight");
    if (static_cast<int>(b.rounds.size()) != rounds_) throw DimensionError("NoiseProcess: branches differ in round count");
    for (const auto& round : b.rounds) {
      if (round.empty()) throw std::invalid_argument("NoiseProcess: empty Kraus list");
      for (const auto& k : round)
        if (k.rows() != dim_ || k.cols() != dim_)
          throw DimensionError("NoiseProcess: Kraus operator is " + std::to_string(k.rows()) + "x" +
                               std::to_string(k.cols()) + ", expected " + std::to_string(dim_));
    }
  }
}

NoiseProcess::NoiseProcess(int n_qubits, std::vector<NoiseBranch> branches, bool complete, std::string label)
    : NoiseProcess(Index{1} << n_qubits, n_qubits, std::move(branches), complete, std::move(label)) {}

NoiseProcess NoiseProcess::on_dimension(Index d, std::vector<NoiseBranch> branches, bool complete) {
  return NoiseProcess(d, qubits_of(d), std::move(branches), complete, "kraus");
}

double NoiseProcess::completeness_error(int round) const {
  CMatrix acc = CMatrix::Zero(dim_, dim_);
  for (const auto& b : branches_)
    for (const auto& k : b.rounds.at(round)) acc += b.weight * k.adjoint() * k;
  return (acc - identity(dim_)).norm();
}

double NoiseProcess::completeness_error() const {
  double worst = 0;
  for (int r = 0; r < rounds_; ++r) worst = std::max(worst, completeness_error(r));
  return worst;
}

void NoiseProcess::check(double tol) const {
  if (!complete_) return;
  for (int r = 0; r < rounds_; ++r) {
    const double err = completeness_error(r);
    if (err > tol)
      throw NumericalError("noise round " + std::to_string(r) + " is not trace preserving (residual " +
                           std::to_string(err) + ")");
  }
}

std::vector<NoiseTerm> NoiseProcess::terms() const {
  std::vector<NoiseTerm> out;
  for (const auto& b : branches_) {
    std::vector<NoiseTerm> partial{{b.weight, {}}};
    for (const auto& round : b.rounds) {
      std::vector<NoiseTerm> next;
      next.reserve(partial.size() * round.size());
      for (const auto& t : partial)
        for (const auto& k : round) {
          NoiseTerm n = t;
          n.kraus.push_back(k);
          next.push_back(std::move(n));
        }
      partial = std::move(next);
    }
    out.insert(out.end(), partial.begin(), partial.end());
  }
  return out;
}

std::vector<std::vector<CMatrix>> NoiseProcess::weighted_terms() const {
  std::vector<std::vector<CMatrix>> out;
  for (auto& t : terms()) {
    t.kraus.front() *= std::sqrt(t.weight);
    out.push_back(std::move(t.kraus));
  }
  return out;
}

NoiseProcess NoiseProcess::composed() const {
  std::vector<NoiseBranch> out;
  for (const auto& b : branches_) {
    std::vector<CMatrix> ops{identity(dim_)};
    for (const auto& round : b.rounds) {
      std::vector<CMatrix> next;
      for (const auto& prev : ops)
        for (const auto& k : round) next.push_back(k * prev);
      ops = std::move(next);
    }
    out.push_back({b.weight, {ops}});
  }
  return NoiseProcess(dim_, n_qubits_, std::move(out), complete_, label_);
}

std::vector<CMatrix> NoiseProcess::round_kraus(int round) const {
  std::vector<CMatrix> out;
  for (const auto& b : branches_)
    for (const auto& k : b.rounds.at(round)) out.push_back(std::sqrt(b.weight) * k);
  return out;
}

CMatrix NoiseProcess::apply_round(int round, const CMatrix& x) const {
  CMatrix acc = CMatrix::Zero(dim_, dim_);
  for (const auto& b : branches_)
    for (const auto& k : b.rounds.at(round)) acc += b.weight * k * x * k.adjoint();
  return acc;
}

CMatrix embed_qubit(const CMatrix& op, int q, int n) {
  std::vector<CMatrix> ops(n, identity(2));
  ops.at(q) = op;
  return tensor_all(ops);
}

NoiseProcess local_k_noise_strengths(int n, int k, const std::vector<double>& gammas) {
  if (n < 1) throw std::invalid_argument("local_k_noise: need at least one qubit");
  if (k < 1 || k > n) throw std::invalid_argument("local_k_noise: need 1 <= k <= n");
  const auto sets = subsets(n, k);
  const double w = 1.0 / static_cast<double>(sets.size());
  std::vector<NoiseBranch> branches;
  for (const auto& set : sets) {
    NoiseBranch b;
    b.weight = w;
    for (double g : gammas) {
      const auto e = ad_kraus(g);
      std::vector<CMatrix> round;
      for (int pattern = 0; pattern < (1 << k); ++pattern) {
        std::vector<CMatrix> ops(n, identity(2));
        for (int j = 0; j < k; ++j) ops[set[j]] = e[(pattern >> (k - 1 - j)) & 1];
        round.push_back(tensor_all(ops));
      }
      b.rounds.push_back(std::move(round));
    }
    branches.push_back(std::move(b));
  }
  return NoiseProcess(n, std::move(branches), true, "local");
}

NoiseProcess weight_k_noise_strengths(int n, int k, const std::vector<double>& gammas) {
  if (n < 1) throw std::invalid_argument("weight_k_noise: need at least one qubit");
  if (k < 0 || k > n) throw std::invalid_argument("weight_k_noise: need 0 <= k <= n");
  NoiseBranch b;
  b.weight = 1.0;
  for (double g : gammas) {
    const auto e = ad_kraus(g);
    std::vector<CMatrix> round;
    for (int pattern = 0; pattern < (1 << n); ++pattern) {
      if (__builtin_popcount(pattern) > k) continue;
      std::vector<CMatrix> ops;
      for (int q = 0; q < n; ++q) ops.push_back(e[(pattern >> (n - 1 - q)) & 1]);
      round.push_back(tensor_all(ops));
    }
    b.rounds.push_back(std::move(round));
  }
  return NoiseProcess(n, {std::move(b)}, k == n, "weight");
}

NoiseProcess local_k_noise(int n, int k, double gamma, int rounds) {
  return local_k_noise_strengths(n, k, split_damping_rounds(gamma, rounds));
}

NoiseProcess weight_k_noise(int n, int k, double gamma, int rounds) {
  return weight_k_noise_strengths(n, k, split_damping_rounds(gamma, rounds));
}

NoiseProcess single_flip_noise(int n, double p, int rounds) {
  if (n < 1 || rounds < 1) throw std::invalid_argument("single_flip_noise: need n >= 1 and rounds >= 1");
  if (!(p >= 0 && n * p <= 1 + 1e-12)) throw std::invalid_argument("single_flip_noise: need 0 <= n p <= 1");
  const Index d = Index{1} << n;
  CMatrix x = CMatrix::Zero(2, 2);
  x(0, 1) = x(1, 0) = 1.0;
  NoiseBranch b;
  std::vector<CMatrix> first{std::sqrt(std::max(0.0, 1 - n * p)) * identity(d)};
  for (int q = 0; q < n; ++q) first.push_back(std::sqrt(p) * embed_qubit(x, q, n));
  b.rounds.push_back(std::move(first));
  for (int r = 1; r < rounds; ++r) b.rounds.push_back({identity(d)});
  return NoiseProcess(n, {b}, true, "flip");
}

void check_density(const CMatrix& rho, double tol) {
  if (rho.rows() != rho.cols() || rho.rows() == 0) throw DimensionError("density matrix must be square");
  if (hermiticity_error(rho) > tol) throw NumericalError("density matrix is not Hermitian");
  if (std::abs(rho.trace() - Complex(1.0)) > tol) throw NumericalError("density matrix does not have unit trace");
  if (min_eigenvalue(rho) < -tol) throw NumericalError("density matrix is not positive semidefinite");
}

CMatrix maximally_mixed(Index d) { return identity(d) / static_cast<double>(d); }

PrecomputedTensors::PrecomputedTensors(const NoiseProcess& noise, const CMatrix& rho)
    : dim_(noise.dim()), rounds_(noise.rounds()), rho_(rho) {
  check_density(rho);
  const Index d = dim_;
  for (const auto& b : noise.branches()) {
    std::vector<CMatrix> per_round;
    for (int r = 0; r < rounds_; ++r) {
      // N_ab[y,x] = sum_K conj(K[y,a]) K[x,b]
      CMatrix flat = CMatrix::Zero(d * d, d * d);
      for (const auto& k : b.rounds[r]) {
        for (Index a = 0; a < d; ++a)
          for (Index bb = 0; bb < d; ++bb) {
            auto row = flat.row(a * d + bb);
            for (Index y = 0; y < d; ++y) {
              const Complex ky = std::conj(k(y, a));
              if (ky == Complex(0)) continue;
              for (Index x = 0; x < d; ++x) row(y * d + x) += ky * k(x, bb);
            }
          }
      }
      if (r == 0) flat *= b.weight;
      per_round.push_back(std::move(flat));
    }
    flat_.push_back(std::move(per_round));
  }
  const Index l = rho.rows();
  rflat_ = CMatrix::Zero(l * l, l * l);
  for (Index s = 0; s < l; ++s)
    for (Index t = 0; t < l; ++t) {
      const CMatrix r = rho.col(s) * rho.adjoint().row(t);
      for (Index p = 0; p < l; ++p)
        for (Index q = 0; q < l; ++q) rflat_(s * l + t, p * l + q) = r(p, q);
    }
}

CMatrix PrecomputedTensors::n_entry(int branch, int round, Index a, Index b) const {
  const CMatrix& f = flat(branch, round);
  CMatrix out(dim_, dim_);
  for (Index y = 0; y < dim_; ++y)
    for (Index x = 0; x < dim_; ++x) out(y, x) = f(a * dim_ + b, y * dim_ + x);
  return out;
}

CMatrix PrecomputedTensors::r_entry(Index s, Index t) const {
  const Index l = rho_.rows();
  CMatrix out(l, l);
  for (Index p = 0; p < l; ++p)
    for (Index q = 0; q < l; ++q) out(p, q) = rflat_(s * l + t, p * l + q);
  return out;
}

PrecomputedTensors precompute_tensors(const NoiseProcess& noise, const CMatrix& rho) {
  return PrecomputedTensors(noise, rho);
}

}  // namespace adqec
