#include "adqec/sdp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#include <limits>
#include <optional>
#include <ostream>

namespace adqec {

std::string to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::Optimal: return "optimal";
    case SdpStatus::MaxIter: return "max_iter";
    case SdpStatus::Infeasible: return "infeasible";
  }
  return "unknown";
}

std::vector<int> SdpSubproblem::group_of_blocks() const {
  std::vector<int> g(blocks.size(), 0);
  switch (constraint) {
    case ConstraintKind::PerBlockMarginal:
      for (std::size_t i = 0; i < g.size(); ++i) g[i] = static_cast<int>(i);
      break;
    case ConstraintKind::SummedMarginal:
      break;
    case ConstraintKind::Grouped:
      if (groups.size() != blocks.size()) throw DimensionError("SdpSubproblem: one group index per block required");
      g = groups;
      break;
  }
  return g;
}

int SdpSubproblem::group_count() const {
  int n = 0;
  for (int g : group_of_blocks()) n = std::max(n, g + 1);
  return n;
}

void SdpSubproblem::check() const {
  if (blocks.empty()) throw DimensionError("SdpSubproblem: no blocks");
  const auto g = group_of_blocks();
  const int ng = group_count();
  std::vector<Index> din(ng, -1);
  std::vector<int> members(ng, 0);
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto& b = blocks[i];
    const Index d = b.d_in() * b.d_out();
    if (b.objective.rows() != d || b.objective.cols() != d)
      throw DimensionError("SdpSubproblem: objective " + std::to_string(i) + " does not match its dims");
    const double scale = std::max(1.0, b.objective.cwiseAbs().maxCoeff());
    if (hermiticity_error(b.objective) > 1e-10 * scale)
      throw NumericalError("SdpSubproblem: objective " + std::to_string(i) + " is not Hermitian");
    if (g[i] < 0) throw DimensionError("SdpSubproblem: negative group index");
    if (din[g[i]] >= 0 && din[g[i]] != b.d_in()) throw DimensionError("SdpSubproblem: group mixes input dimensions");
    din[g[i]] = b.d_in();
    ++members[g[i]];
  }
  for (int k = 0; k < ng; ++k)
    if (members[k] == 0) throw DimensionError("SdpSubproblem: empty constraint group");
}

double evaluate(const SdpSubproblem& p, const std::vector<CMatrix>& blocks) {
  if (blocks.size() != p.blocks.size()) throw DimensionError("evaluate: block count mismatch");
  double f = 0;
  for (std::size_t i = 0; i < blocks.size(); ++i) f += (p.blocks[i].objective * blocks[i]).trace().real();
  return f;
}

namespace {

struct Groups {
  std::vector<int> of;                    // group of each block
  std::vector<std::vector<int>> members;  // blocks of each group
  std::vector<Index> d_in;
};

Groups make_groups(const SdpSubproblem& p) {
  Groups g;
  g.of = p.group_of_blocks();
  const int ng = p.group_count();
  g.members.resize(ng);
  g.d_in.resize(ng);
  for (std::size_t i = 0; i < g.of.size(); ++i) {
    g.members[g.of[i]].push_back(static_cast<int>(i));
    g.d_in[g.of[i]] = p.blocks[i].d_in();
  }
  return g;
}

std::vector<CMatrix> marginal_residuals(const SdpSubproblem& p, const Groups& g, const std::vector<CMatrix>& x) {
  std::vector<CMatrix> r;
  for (std::size_t k = 0; k < g.members.size(); ++k) {
    CMatrix acc = identity(g.d_in[k]);
    for (int i : g.members[k]) acc -= trace_out_second(x[i], p.blocks[i].d_in(), p.blocks[i].d_out());
    r.push_back(std::move(acc));
  }
  return r;
}

/// Largest block re-solved in long double when the double run stalls.
constexpr Index kExtendedPrecisionBlock = 128;

double worst_slackness(const SdpSubproblem& p, const Groups& g, const std::vector<CMatrix>& x,
                       const std::vector<CMatrix>& yhat, double* dual_min = nullptr) {
  double worst = 0, dmin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const CMatrix z = kron_identity(yhat[g.of[i]], p.blocks[i].d_out()) - p.blocks[i].objective;
    worst = std::max(worst, (z * x[i]).norm());
    if (dual_min) dmin = std::min(dmin, min_eigenvalue(z));
  }
  if (dual_min) *dual_min = dmin;
  return worst;
}

// Restrict X_i to the near-null space V_i of Z_i and take the least-norm
// correction of V_i^dag X_i V_i that restores the marginal constraints.
std::optional<std::vector<CMatrix>> face_polish(const SdpSubproblem& p, const Groups& g,
                                                const std::vector<CMatrix>& x, const std::vector<CMatrix>& yhat) {
  const std::size_t nb = x.size();
  std::vector<CMatrix> basis(nb), xi0(nb);
  Index unknowns = 0;
  for (std::size_t i = 0; i < nb; ++i) {
    const CMatrix z = kron_identity(yhat[g.of[i]], p.blocks[i].d_out()) - p.blocks[i].objective;
    const auto e = herm_eig(z);
    const double cut = 1e-5 * (1.0 + e.values.cwiseAbs().maxCoeff());
    Index r = 0;
    while (r < e.values.size() && e.values(r) < cut) ++r;
    if (r == 0) return std::nullopt;
    basis[i] = e.vectors.leftCols(r);
    xi0[i] = hermitize(CMatrix(basis[i].adjoint() * x[i] * basis[i]));
    unknowns += r * r;
  }
  if (unknowns > 20000) return std::nullopt;
  std::vector<CMatrix> out(nb);
  for (std::size_t k = 0; k < g.members.size(); ++k) {
    const Index di = g.d_in[k];
    Index cols = 0;
    for (int i : g.members[k]) cols += basis[i].cols() * basis[i].cols();
    CMatrix a(di * di, cols);
    CVector x0(cols);
    Index c = 0;
    for (int i : g.members[k]) {
      const Index dout = p.blocks[i].d_out(), r = basis[i].cols();
      std::vector<CMatrix> shaped(r);
      for (Index u = 0; u < r; ++u) shaped[u] = unvectorize(basis[i].col(u), di, dout);
      for (Index u = 0; u < r; ++u)
        for (Index v = 0; v < r; ++v, ++c) {
          a.col(c) = vectorize(CMatrix(shaped[u] * shaped[v].adjoint()));
          x0(c) = xi0[i](u, v);
        }
    }
    const CVector resid = vectorize(identity(di)) - a * x0;
    const CVector step = a.completeOrthogonalDecomposition().solve(resid);
    c = 0;
    for (int i : g.members[k]) {
      const Index r = basis[i].cols();
      CMatrix xi(r, r);
      for (Index u = 0; u < r; ++u)
        for (Index v = 0; v < r; ++v, ++c) xi(u, v) = x0(c) + step(c);
      out[i] = hermitize(CMatrix(basis[i] * hermitize(xi) * basis[i].adjoint()));
    }
  }
  return out;
}

// Least-squares refit of the dual against a fixed primal: (Y (x) I) X = M X per group.
std::vector<CMatrix> refit_dual(const SdpSubproblem& p, const Groups& g, const std::vector<CMatrix>& x) {
  std::vector<CMatrix> out;
  for (std::size_t k = 0; k < g.members.size(); ++k) {
    const Index di = g.d_in[k];
    CMatrix gram = CMatrix::Zero(di, di), rhs = CMatrix::Zero(di, di);
    for (int i : g.members[k]) {
      const Index dout = p.blocks[i].d_out(), big = di * dout;
      const CMatrix mx = p.blocks[i].objective * x[i];
      for (Index kk = 0; kk < dout; ++kk) {
        CMatrix xk(di, big), bk(di, big);
        for (Index a = 0; a < di; ++a) {
          xk.row(a) = x[i].row(a * dout + kk);
          bk.row(a) = mx.row(a * dout + kk);
        }
        gram += xk * xk.adjoint();
        rhs += bk * xk.adjoint();
      }
    }
    // Y gram = rhs
    const CMatrix yt = hermitize(gram).completeOrthogonalDecomposition().solve(CMatrix(rhs.adjoint()));
    out.push_back(hermitize(CMatrix(yt.adjoint())));
  }
  return out;
}

template <typename T>
using Mat = Eigen::Matrix<std::complex<T>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename T>
using Vec = Eigen::Matrix<std::complex<T>, Eigen::Dynamic, 1>;
template <typename T>
using RVec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

template <typename T>
Mat<T> herm(const Mat<T>& m) {
  return (m + m.adjoint()) * std::complex<T>(T(0.5));
}

template <typename T>
Mat<T> eye(Index d) {
  return Mat<T>::Identity(d, d);
}

// Nesterov-Todd frame: W = G G^dag with G^-1 X G^-dag = G^dag Z G = diag(lambda).
template <typename T>
struct NtFrame {
  Mat<T> g, ginv, w;
  RVec<T> lambda;
};

template <typename T>
NtFrame<T> nt_frame(const Eigen::LLT<Mat<T>>& cx, const Eigen::LLT<Mat<T>>& cz) {
  const Mat<T> lx = cx.matrixL();
  const Mat<T> lz = cz.matrixL();
  const Mat<T> m = lz.adjoint() * lx;
  Eigen::BDCSVD<Mat<T>> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  NtFrame<T> f;
  f.lambda = svd.singularValues();
  const RVec<T> root = f.lambda.cwiseSqrt();
  f.g = lx * svd.matrixV() * root.cwiseInverse().asDiagonal();
  const Mat<T> lxinv = lx.template triangularView<Eigen::Lower>().solve(eye<T>(lx.rows()));
  f.ginv = root.asDiagonal() * svd.matrixV().adjoint() * lxinv;
  f.w = herm<T>(f.g * f.g.adjoint());
  return f;
}

// Largest alpha with lambda + alpha*d >= 0 for a scaled direction d.
template <typename T>
T scaled_step(const RVec<T>& lambda, const Mat<T>& d) {
  const RVec<T> h = lambda.cwiseSqrt().cwiseInverse();
  const Mat<T> s = h.asDiagonal() * d * h.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Mat<T>> es(herm<T>(s), Eigen::EigenvaluesOnly);
  const T lmin = es.eigenvalues()(0);
  return lmin < 0 ? T(-1) / lmin : std::numeric_limits<T>::infinity();
}

// Phi(Y) = Tr_out(W (Y (x) I) W) as a matrix acting on row-major vec(Y).
template <typename T>
Mat<T> schur_block(const Mat<T>& w, Index di, Index dout) {
  const Index q = dout * dout;
  Mat<T> b1(di * di, q), b2(di * di, q);
  for (Index a = 0; a < di; ++a)
    for (Index i = 0; i < di; ++i)
      for (Index k = 0; k < dout; ++k)
        for (Index l = 0; l < dout; ++l) {
          b1(a * di + i, k * dout + l) = w(a * dout + k, i * dout + l);
          b2(a * di + i, k * dout + l) = w(a * dout + l, i * dout + k);
        }
  const Mat<T> p = b1 * b2.transpose();  // P[(a,i),(j,b)]
  Mat<T> phi(di * di, di * di);
  for (Index a = 0; a < di; ++a)
    for (Index b = 0; b < di; ++b)
      for (Index i = 0; i < di; ++i)
        for (Index j = 0; j < di; ++j) phi(a * di + b, i * di + j) = p(a * di + i, j * di + b);
  return phi;
}

template <typename T>
Mat<T> kron_eye(const Mat<T>& y, Index d) {
  return tensor(y, eye<T>(d));
}

struct IpmResult {
  std::vector<CMatrix> x, yhat;
  int iterations = 0;
  bool converged = false;
};

// Feasible-start primal-dual path following with NT scaling and a Mehrotra
// corrector, carried out in scalar type T.
template <typename T>
IpmResult run_ipm(const SdpSubproblem& p, const Groups& g, const SdpOptions& opts) {
  using M = Mat<T>;
  using C = std::complex<T>;
  const std::size_t nb = p.blocks.size(), ng = g.members.size();
  auto lift = [](const CMatrix& m) -> M { return m.cast<C>(); };
  auto lower = [](const M& m) -> CMatrix { return m.template cast<Complex>(); };
  auto re_tr = [](const M& m) { return static_cast<T>(m.trace().real()); };

  // minimize <C, X> with C = -M
  std::vector<M> c;
  for (const auto& b : p.blocks) c.push_back(-herm<T>(lift(b.objective)));

  std::vector<M> x, z(nb), y(ng);
  for (const auto& u : uniform_feasible_point(p)) x.push_back(lift(u));
  for (std::size_t k = 0; k < ng; ++k) {
    double top = -std::numeric_limits<double>::infinity();
    for (int i : g.members[k]) top = std::max(top, herm_eig(p.blocks[i].objective).values.maxCoeff());
    y[k] = -T(top + 1.0) * eye<T>(g.d_in[k]);
  }
  for (std::size_t i = 0; i < nb; ++i) z[i] = c[i] - kron_eye<T>(y[g.of[i]], p.blocks[i].d_out());

  T total_dim = 0;
  for (const auto& b : p.blocks) total_dim += static_cast<T>(b.d_in() * b.d_out());

  auto primal_obj = [&] {
    T v = 0;
    for (std::size_t i = 0; i < nb; ++i) v -= re_tr(c[i] * x[i]);
    return v;
  };
  auto dual_obj = [&] {
    T v = 0;
    for (const auto& yk : y) v -= re_tr(yk);
    return v;
  };

  IpmResult out;
  auto export_state = [&] {
    out.x.clear();
    out.yhat.clear();
    for (const auto& xi : x) out.x.push_back(lower(herm<T>(xi)));
    for (const auto& yk : y) out.yhat.push_back(lower(herm<T>(-yk)));
  };

  const T step_frac = T(0.98);
  const T tol = static_cast<T>(opts.tol), slack_tol = static_cast<T>(opts.slack_tol);
  int iter = 0;
  for (; iter < opts.max_iters; ++iter) {
    T mu = 0;
    for (std::size_t i = 0; i < nb; ++i) mu += re_tr(x[i] * z[i]);
    mu /= total_dim;
    const T pobj = primal_obj(), dobj = dual_obj();
    std::vector<M> rp(ng);
    T rp_norm = 0;
    for (std::size_t k = 0; k < ng; ++k) {
      rp[k] = eye<T>(g.d_in[k]);
      for (int i : g.members[k]) rp[k] -= trace_out_second(x[i], p.blocks[i].d_in(), p.blocks[i].d_out());
      rp_norm = std::max(rp_norm, rp[k].norm());
    }
    std::vector<M> rd(nb);
    T rd_norm = 0, slack = 0;
    for (std::size_t i = 0; i < nb; ++i) {
      rd[i] = c[i] - z[i] - kron_eye<T>(y[g.of[i]], p.blocks[i].d_out());
      rd_norm = std::max(rd_norm, rd[i].norm());
      slack = std::max(slack, (x[i] * z[i]).norm());
    }
    const T scale = 1 + std::abs(pobj);
    const T rel_gap = std::abs(dobj - pobj) / (scale + std::abs(dobj));
    const T complementarity = mu * total_dim / scale;
    if (rel_gap <= tol && complementarity <= tol && rp_norm <= tol && rd_norm <= tol && slack <= slack_tol * scale) {
      out.converged = true;
      break;
    }

    // factorizations and scaling
    std::vector<Eigen::LLT<M>> cx(nb), cz(nb);
    std::vector<NtFrame<T>> fr(nb);
    bool broken = false;
    for (std::size_t i = 0; i < nb && !broken; ++i) {
      cx[i].compute(herm<T>(x[i]));
      cz[i].compute(herm<T>(z[i]));
      if (cx[i].info() != Eigen::Success || cz[i].info() != Eigen::Success) {
        broken = true;
        break;
      }
      fr[i] = nt_frame<T>(cx[i], cz[i]);
    }
    std::vector<Eigen::LLT<M>> schur(ng);
    for (std::size_t k = 0; k < ng && !broken; ++k) {
      const Index di = g.d_in[k];
      M phi = M::Zero(di * di, di * di);
      for (int i : g.members[k]) phi += schur_block<T>(fr[i].w, di, p.blocks[i].d_out());
      schur[k].compute(herm<T>(phi));
      if (schur[k].info() != Eigen::Success) broken = true;
    }
    if (broken) break;

    auto direction = [&](const std::vector<M>& rc, std::vector<M>& dx, std::vector<M>& dy, std::vector<M>& dz) {
      dx.assign(nb, M());
      dz.assign(nb, M());
      dy.assign(ng, M());
      for (std::size_t k = 0; k < ng; ++k) {
        const Index di = g.d_in[k];
        M rhs = rp[k];
        for (int i : g.members[k]) {
          const M t = rc[i] - fr[i].w * rd[i] * fr[i].w;
          rhs -= trace_out_second(t, di, p.blocks[i].d_out());
        }
        const Vec<T> v = schur[k].solve(vectorize(rhs));
        dy[k] = herm<T>(unvectorize(v, di, di));
      }
      for (std::size_t i = 0; i < nb; ++i) {
        dz[i] = herm<T>(rd[i] - kron_eye<T>(dy[g.of[i]], p.blocks[i].d_out()));
        dx[i] = herm<T>(rc[i] - fr[i].w * dz[i] * fr[i].w);
      }
    };
    auto scaled = [&](const std::vector<M>& dx, const std::vector<M>& dz, std::vector<M>& sx, std::vector<M>& sz) {
      sx.resize(nb);
      sz.resize(nb);
      for (std::size_t i = 0; i < nb; ++i) {
        sx[i] = herm<T>(fr[i].ginv * dx[i] * fr[i].ginv.adjoint());
        sz[i] = herm<T>(fr[i].g.adjoint() * dz[i] * fr[i].g);
      }
    };
    auto steps = [&](const std::vector<M>& sx, const std::vector<M>& sz) {
      T ap = std::numeric_limits<T>::infinity(), ad = ap;
      for (std::size_t i = 0; i < nb; ++i) {
        ap = std::min(ap, scaled_step<T>(fr[i].lambda, sx[i]));
        ad = std::min(ad, scaled_step<T>(fr[i].lambda, sz[i]));
      }
      return std::pair<T, T>(ap, ad);
    };

    // predictor
    std::vector<M> rc(nb), dx, dy, dz, sx, sz;
    for (std::size_t i = 0; i < nb; ++i) rc[i] = -x[i];
    direction(rc, dx, dy, dz);
    scaled(dx, dz, sx, sz);
    auto [ap, ad] = steps(sx, sz);
    ap = std::min(T(1), ap);
    ad = std::min(T(1), ad);
    T mu_aff = 0;
    for (std::size_t i = 0; i < nb; ++i) {
      const M lam = fr[i].lambda.template cast<C>().asDiagonal();
      mu_aff += re_tr((lam + C(ap) * sx[i]) * (lam + C(ad) * sz[i]));
    }
    mu_aff /= total_dim;
    const T sigma = std::clamp(std::pow(std::max(mu_aff, T(0)) / mu, T(3)), T(0), T(1));

    // Mehrotra corrector: lambda o (dx~ + dz~) = sigma mu I - lambda^2 - dx~_a o dz~_a
    for (std::size_t i = 0; i < nb; ++i) {
      const RVec<T>& l = fr[i].lambda;
      const Index d = l.size();
      M t = (sx[i] * sz[i] + sz[i] * sx[i]) * C(T(-0.5));
      for (Index j = 0; j < d; ++j) t(j, j) += sigma * mu - l(j) * l(j);
      for (Index a = 0; a < d; ++a)
        for (Index b = 0; b < d; ++b) t(a, b) *= T(2) / (l(a) + l(b));
      rc[i] = herm<T>(fr[i].g * t * fr[i].g.adjoint());
    }
    direction(rc, dx, dy, dz);
    scaled(dx, dz, sx, sz);
    std::tie(ap, ad) = steps(sx, sz);
    ap = std::min(T(1), step_frac * ap);
    ad = std::min(T(1), step_frac * ad);
    if (ap < T(1e-12) && ad < T(1e-12)) break;

    // the scaled step test can be off when X or Z is badly conditioned; back off until both stay definite
    auto advance = [&](const std::vector<M>& from, const std::vector<M>& d, T& a) {
      std::vector<M> to(nb);
      for (; a >= T(1e-12); a /= 2) {
        bool ok = true;
        for (std::size_t i = 0; i < nb && ok; ++i) {
          to[i] = herm<T>(from[i] + C(a) * d[i]);
          ok = Eigen::LLT<M>(to[i]).info() == Eigen::Success;
        }
        if (ok) return std::optional<std::vector<M>>(std::move(to));
      }
      return std::optional<std::vector<M>>();
    };
    auto xn = advance(x, dx, ap);
    auto zn = advance(z, dz, ad);
    if (!xn || !zn) break;
    x = std::move(*xn);
    z = std::move(*zn);
    for (std::size_t k = 0; k < ng; ++k) y[k] = herm<T>(y[k] + C(ad) * dy[k]);
  }
  out.iterations = iter;
  export_state();
  return out;
}

}  // namespace

double constraint_residual(const SdpSubproblem& p, const std::vector<CMatrix>& blocks) {
  const auto g = make_groups(p);
  double worst = 0;
  for (const auto& r : marginal_residuals(p, g, blocks)) worst = std::max(worst, r.norm());
  return worst;
}

std::vector<CMatrix> uniform_feasible_point(const SdpSubproblem& p) {
  const auto g = make_groups(p);
  std::vector<CMatrix> x;
  for (std::size_t i = 0; i < p.blocks.size(); ++i) {
    const auto& b = p.blocks[i];
    const double scale = 1.0 / (static_cast<double>(b.d_out()) * g.members[g.of[i]].size());
    x.push_back(scale * identity(b.d_in() * b.d_out()));
  }
  return x;
}

SdpSolution solve(const SdpSubproblem& p, double tol) {
  SdpOptions o;
  o.tol = tol;
  return solve(p, o);
}

SdpSolution solve(const SdpSubproblem& p, const SdpOptions& opts) {
  p.check();
  Index largest = 0;
  for (const auto& b : p.blocks) {
    const Index d = b.d_in() * b.d_out();
    if (d > opts.max_block)
      throw BudgetError("SDP block of dimension " + std::to_string(d) + " exceeds the budget of " +
                        std::to_string(opts.max_block));
    largest = std::max(largest, d);
  }
  const auto g = make_groups(p);

  // a double run that stalls short of the slackness target is redone in extended precision
  IpmResult run = run_ipm<double>(p, g, opts);
  if (!run.converged && largest <= kExtendedPrecisionBlock) {
    IpmResult ext = run_ipm<long double>(p, g, opts);
    if (ext.converged || worst_slackness(p, g, ext.x, ext.yhat) < worst_slackness(p, g, run.x, run.yhat)) {
      ext.iterations += run.iterations;
      run = std::move(ext);
    }
  }

  SdpSolution sol;
  sol.blocks = run.x;
  sol.objective = evaluate(p, sol.blocks);
  std::vector<CMatrix> yhat = run.yhat;
  const double scale = 1.0 + std::abs(sol.objective);

  // alternate a primal face polish with a dual refit; keep the result only if
  // it is feasible and tightens slackness
  std::vector<CMatrix> xp = sol.blocks, yp = yhat;
  bool polished = false;
  for (int round = 0; round < 8 && !polished; ++round) {
    const auto face = face_polish(p, g, xp, yp);
    if (!face) break;
    xp = *face;
    const auto refit = refit_dual(p, g, xp);
    double dmin = 0;
    worst_slackness(p, g, xp, refit, &dmin);
    if (dmin < -1e-9 * scale) break;
    yp = refit;
    polished = constraint_residual(p, xp) <= 1e-12 * scale;
  }
  if (polished) {
    double neg = 0, dmin_new = 0, dmin_old = 0;
    for (const auto& x : xp) neg = std::min(neg, min_eigenvalue(x));
    const double s_new = worst_slackness(p, g, xp, yp, &dmin_new);
    const double s_old = worst_slackness(p, g, sol.blocks, yhat, &dmin_old);
    if (neg >= -1e-10 * scale && dmin_new >= std::min(dmin_old, 0.0) - 1e-9 * scale && s_new < s_old) {
      sol.blocks = xp;
      sol.objective = evaluate(p, sol.blocks);
      yhat = yp;
    }
  }

  sol.dual = yhat;
  sol.dual_objective = 0;
  for (const auto& y : yhat) sol.dual_objective += y.trace().real();
  sol.gap = sol.dual_objective - sol.objective;
  sol.primal_residual = constraint_residual(p, sol.blocks);
  sol.iterations = run.iterations;
  // stalled or out of iterations: accept if the gap is already small
  const double rel = std::abs(sol.gap) / scale;
  sol.status = run.converged || (rel <= std::max(opts.tol, 1e-7) && sol.primal_residual <= 1e-7) ? SdpStatus::Optimal
                                                                                                  : SdpStatus::MaxIter;
  return sol;
}

bool CertReport::passed() const { return slackness <= slackness_tol && dual_min_eig >= -dual_tol; }

CertReport certify_kkt(const SdpSubproblem& p, const std::vector<CMatrix>& blocks, const SdpSolution& s,
                       double slackness_tol, double dual_tol) {
  if (!s.dual) throw std::invalid_argument("certify_kkt: solution carries no dual certificate");
  if (blocks.size() != p.blocks.size()) throw DimensionError("certify_kkt: block count mismatch");
  const auto g = make_groups(p);
  if (s.dual->size() != g.members.size()) throw DimensionError("certify_kkt: dual has wrong number of groups");
  CertReport rep;
  rep.slackness_tol = slackness_tol;
  rep.dual_tol = dual_tol;
  rep.dual_min_eig = std::numeric_limits<double>::infinity();
  rep.primal_min_eig = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const CMatrix z = kron_identity((*s.dual)[g.of[i]], p.blocks[i].d_out()) - p.blocks[i].objective;
    rep.slackness = std::max(rep.slackness, (z * blocks[i]).norm());
    rep.dual_min_eig = std::min(rep.dual_min_eig, min_eigenvalue(z));
    rep.primal_min_eig = std::min(rep.primal_min_eig, min_eigenvalue(blocks[i]));
  }
  rep.primal_residual = constraint_residual(p, blocks);
  double dual_value = 0;
  for (const auto& y : *s.dual) dual_value += y.trace().real();
  rep.duality_gap = dual_value - evaluate(p, blocks);
  return rep;
}

CertReport certify_kkt(const SdpSubproblem& p, const SdpSolution& s, double slackness_tol, double dual_tol) {
  return certify_kkt(p, s.blocks, s, slackness_tol, dual_tol);
}

ProbeResult perturbation_probe(const SdpSubproblem& p, const SdpSolution& s, double eps) {
  ProbeResult r;
  r.eps = eps;
  if (eps <= 0) return r;
  const auto xf = uniform_feasible_point(p);
  const double drop_full = s.objective - evaluate(p, xf);
  if (drop_full <= 0) return r;  // the feasible set is flat in the objective
  const double t = std::min(1.0, eps / drop_full);
  double dist2 = 0;
  std::vector<CMatrix> xt;
  for (std::size_t i = 0; i < xf.size(); ++i) {
    xt.push_back((1.0 - t) * s.blocks[i] + t * xf[i]);
    dist2 += (xt.back() - s.blocks[i]).squaredNorm();
  }
  r.distance = std::sqrt(dist2);
  r.objective_drop = s.objective - evaluate(p, xt);
  r.ratio = r.distance / eps;
  return r;
}

void write_sdpa(const SdpSubproblem& p, std::ostream& out) {
  p.check();
  const auto g = make_groups(p);
  // Hermitian H -> [[Re H, -Im H], [Im H, Re H]]; <embed(H)/2, embed(X)> = Re Tr(H X)
  auto embed = [](const CMatrix& h) {
    const Index d = h.rows();
    RMatrix e(2 * d, 2 * d);
    e << h.real(), -h.imag(), h.imag(), h.real();
    return RMatrix(e / 2.0);
  };
  struct Constraint {
    std::vector<std::pair<int, RMatrix>> mats;  // (block, coefficient)
    double rhs;
  };
  std::vector<Constraint> cons;
  for (std::size_t k = 0; k < g.members.size(); ++k) {
    const Index di = g.d_in[k];
    for (Index a = 0; a < di; ++a)
      for (Index c = a; c < di; ++c)
        for (int part = 0; part < (a == c ? 1 : 2); ++part) {
          Constraint con{{}, a == c ? 1.0 : 0.0};
          for (int blk : g.members[k]) {
            const Index dout = p.blocks[blk].d_out();
            CMatrix h = CMatrix::Zero(di * dout, di * dout);
            for (Index o = 0; o < dout; ++o) h(c * dout + o, a * dout + o) = 1.0;  // Tr(X h) = (Tr_out X)[a,c]
            if (part == 1) h *= Complex(0, -1);
            con.mats.emplace_back(blk, embed(hermitize(h)));
          }
          cons.push_back(std::move(con));
        }
  }
  out << "* block SDP over Choi matrices, real embedding; maximize <F0, X>\n";
  out << cons.size() << "\n" << p.blocks.size() << "\n";
  for (const auto& b : p.blocks) out << 2 * b.objective.rows() << " ";
  out << "\n";
  for (const auto& con : cons) out << con.rhs << " ";
  out << "\n";
  out.precision(17);
  auto emit = [&](std::size_t k, int blk, const RMatrix& m) {
    for (Index i = 0; i < m.rows(); ++i)
      for (Index j = i; j < m.cols(); ++j)
        if (std::abs(m(i, j)) > 0) out << k << " " << blk + 1 << " " << i + 1 << " " << j + 1 << " " << m(i, j) << "\n";
  };
  for (std::size_t b = 0; b < p.blocks.size(); ++b) emit(0, static_cast<int>(b), embed(p.blocks[b].objective));
  for (std::size_t k = 0; k < cons.size(); ++k)
    for (const auto& [blk, m] : cons[k].mats) emit(k + 1, blk, m);
}

}  // namespace adqec
