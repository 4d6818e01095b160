#include "adqec/fidelity.hpp"

namespace adqec {

namespace {

// Element of round r reached by trajectory tau.
int prefix_index(const std::vector<int>& counts, int round, int tau) {
  int suffix = 1;
  for (std::size_t r = round + 1; r < counts.size(); ++r) suffix *= counts[r];
  return tau / suffix;
}

void require_rounds(const StrategicCode& code, int noise_rounds) {
  if (noise_rounds != code.check_rounds() + 1)
    throw DimensionError("noise has " + std::to_string(noise_rounds) + " rounds but the code needs " +
                         std::to_string(code.check_rounds() + 1));
}

// H[(s,t),(a,b)] = <t b| C0 |s a>.
CMatrix encoder_index(const ChoiOperator& c0) {
  const Index l = c0.d_in(), d = c0.d_out();
  CMatrix h(l * l, d * d);
  for (Index s = 0; s < l; ++s)
    for (Index t = 0; t < l; ++t)
      for (Index a = 0; a < d; ++a)
        for (Index b = 0; b < d; ++b) h(s * l + t, a * d + b) = c0.matrix(t * d + b, s * d + a);
  return h;
}

// G[(y,x),(c,e)] = C1[(x,e),(y,c)].
CMatrix check_index(const ChoiOperator& c1) {
  const Index d = c1.d_in();
  if (c1.d_out() != d) throw DimensionError("factorized objective needs square checks");
  CMatrix g(d * d, d * d);
  for (Index y = 0; y < d; ++y)
    for (Index x = 0; x < d; ++x)
      for (Index c = 0; c < d; ++c)
        for (Index e = 0; e < d; ++e) g(y * d + x, c * d + e) = c1.matrix(x * d + e, y * d + c);
  return g;
}

// Dt[(y,x),(p,q)] = D[(x,q),(y,p)].
CMatrix decoder_index(const ChoiOperator& dec) {
  const Index d = dec.d_in(), l = dec.d_out();
  CMatrix dt(d * d, l * l);
  for (Index y = 0; y < d; ++y)
    for (Index x = 0; x < d; ++x)
      for (Index p = 0; p < l; ++p)
        for (Index q = 0; q < l; ++q) dt(y * d + x, p * l + q) = dec.matrix(x * l + q, y * l + p);
  return dt;
}

// Block matrix on (d1 (x) d2) with M[(y,p),(x,q)] = K[(y,x),(p,q)].
CMatrix unfold(const CMatrix& k, Index d1, Index d2) {
  CMatrix m(d1 * d2, d1 * d2);
  for (Index y = 0; y < d1; ++y)
    for (Index x = 0; x < d1; ++x)
      for (Index p = 0; p < d2; ++p)
        for (Index q = 0; q < d2; ++q) m(y * d2 + p, x * d2 + q) = k(y * d1 + x, p * d2 + q);
  return m;
}

void require_tensors(const PrecomputedTensors& t, int rounds, Index d, Index l) {
  if (t.rounds() != rounds)
    throw DimensionError("tensors have " + std::to_string(t.rounds()) + " rounds, expected " + std::to_string(rounds));
  if (t.dim() != d) throw DimensionError("tensors are for a different physical dimension");
  if (t.logical_dim() != l) throw DimensionError("tensors are for a different logical dimension");
}

}  // namespace

CMatrix composed_choi(const StrategicCode& code, const NoiseProcess& noise) {
  check_dims(code);
  require_rounds(code, noise.rounds());
  if (noise.dim() != code.physical_dim()) throw DimensionError("noise acts on a different space than the code");
  const Index l = code.logical_dim(), lo = code.output_dim();
  const int trajectories = code.outcome_count();
  CMatrix j = CMatrix::Zero(l * lo, l * lo);
  const auto terms = noise.terms();
  for (Index a = 0; a < l; ++a)
    for (Index b = 0; b < l; ++b) {
      const CMatrix encoded = apply_choi(code.encoder, matrix_unit(l, a, b));
      CMatrix out = CMatrix::Zero(lo, lo);
      for (const auto& term : terms)
        for (int tau = 0; tau < trajectories; ++tau) {
          CMatrix x = term.kraus[0] * encoded * term.kraus[0].adjoint();
          for (int r = 0; r < code.check_rounds(); ++r) {
            x = apply_choi(code.rounds[r][prefix_index(code.outcome_counts, r, tau)], x);
            x = term.kraus[r + 1] * x * term.kraus[r + 1].adjoint();
          }
          out += term.weight * apply_choi(code.decoders[tau], x);
        }
      j.block(a * lo, b * lo, lo, lo) = out;
    }
  return j;
}

ObjectiveValue fidelity_direct(const StrategicCode& code, const NoiseProcess& noise, const CMatrix& rho) {
  check_density(rho);
  const Index l = code.logical_dim();
  if (rho.rows() != l || code.output_dim() != l) throw DimensionError("reference state does not match the code");
  const CMatrix j = composed_choi(code, noise);
  // |r> = sum_s |s> (x) rho|s>
  CVector r(l * l);
  for (Index s = 0; s < l; ++s)
    for (Index p = 0; p < l; ++p) r(s * l + p) = rho(p, s);
  return {(r.adjoint() * j * r)(0, 0).real(), FidelityMethod::Direct};
}

ObjectiveValue fidelity_direct(const StaticCode& code, const NoiseProcess& noise, const CMatrix& rho) {
  return fidelity_direct(code.as_strategic(), noise, rho);
}

std::vector<CMatrix> decoder_coefficients(const ChoiOperator& encoder, const std::vector<ChoiOperator>& checks,
                                          const PrecomputedTensors& tensors) {
  const Index l = encoder.d_in(), d = encoder.d_out();
  require_tensors(tensors, 2, d, l);
  const CMatrix h = encoder_index(encoder);
  std::vector<CMatrix> out;
  for (const auto& check : checks) {
    const CMatrix g = check_index(check);
    CMatrix k = CMatrix::Zero(d * d, l * l);
    for (int b = 0; b < tensors.branch_count(); ++b) {
      const CMatrix u = h * (tensors.flat(b, 0) * g);
      k.noalias() += tensors.flat(b, 1).transpose() * (u.transpose() * tensors.rflat());
    }
    out.push_back(hermitize(unfold(k, d, l)));
  }
  return out;
}

std::vector<CMatrix> check_coefficients(const ChoiOperator& encoder, const std::vector<ChoiOperator>& decoders,
                                        const PrecomputedTensors& tensors) {
  const Index l = encoder.d_in(), d = encoder.d_out();
  require_tensors(tensors, 2, d, l);
  const CMatrix h = encoder_index(encoder);
  std::vector<CMatrix> out;
  for (const auto& dec : decoders) {
    const CMatrix dt = decoder_index(dec);
    CMatrix q = CMatrix::Zero(d * d, d * d);
    for (int b = 0; b < tensors.branch_count(); ++b) {
      const CMatrix t1 = tensors.flat(b, 1) * dt * tensors.rflat().transpose();
      const CMatrix p = h.transpose() * t1.transpose();
      q.noalias() += tensors.flat(b, 0).transpose() * p;
    }
    out.push_back(hermitize(unfold(q, d, d)));
  }
  return out;
}

CMatrix encoder_coefficient(const std::vector<ChoiOperator>& checks, const std::vector<ChoiOperator>& decoders,
                            const PrecomputedTensors& tensors) {
  if (checks.size() != decoders.size()) throw DimensionError("one decoder per check outcome required");
  const Index d = tensors.dim(), l = tensors.logical_dim();
  if (tensors.rounds() != 2) throw DimensionError("tensors must have two rounds");
  CMatrix e = CMatrix::Zero(d * d, l * l);
  for (std::size_t m = 0; m < checks.size(); ++m) {
    if (checks[m].d_in() != d || decoders[m].d_out() != l) throw DimensionError("blocks do not match tensors");
    const CMatrix g = check_index(checks[m]);
    const CMatrix dt = decoder_index(decoders[m]);
    for (int b = 0; b < tensors.branch_count(); ++b) {
      const CMatrix t0 = tensors.flat(b, 0) * g;
      const CMatrix t1 = tensors.flat(b, 1) * dt * tensors.rflat().transpose();
      e.noalias() += t0 * t1;
    }
  }
  CMatrix m(l * d, l * d);
  for (Index s = 0; s < l; ++s)
    for (Index t = 0; t < l; ++t)
      for (Index a = 0; a < d; ++a)
        for (Index b = 0; b < d; ++b) m(s * d + a, t * d + b) = e(a * d + b, s * l + t);
  return hermitize(m);
}

CMatrix static_decoder_coefficient(const ChoiOperator& encoder, const PrecomputedTensors& tensors) {
  const Index l = encoder.d_in(), d = encoder.d_out();
  require_tensors(tensors, 1, d, l);
  const CMatrix h = encoder_index(encoder);
  CMatrix k = CMatrix::Zero(d * d, l * l);
  for (int b = 0; b < tensors.branch_count(); ++b)
    k.noalias() += tensors.flat(b, 0).transpose() * (h.transpose() * tensors.rflat());
  return hermitize(unfold(k, d, l));
}

CMatrix static_encoder_coefficient(const ChoiOperator& decoder, const PrecomputedTensors& tensors) {
  const Index d = decoder.d_in(), l = decoder.d_out();
  require_tensors(tensors, 1, d, l);
  const CMatrix dt = decoder_index(decoder);
  CMatrix t = CMatrix::Zero(d * d, l * l);
  for (int b = 0; b < tensors.branch_count(); ++b) t.noalias() += tensors.flat(b, 0) * dt * tensors.rflat().transpose();
  CMatrix m(l * d, l * d);
  for (Index s = 0; s < l; ++s)
    for (Index tt = 0; tt < l; ++tt)
      for (Index a = 0; a < d; ++a)
        for (Index b = 0; b < d; ++b) m(s * d + a, tt * d + b) = t(a * d + b, s * l + tt);
  return hermitize(m);
}

ObjectiveValue fidelity_factorized(const StrategicCode& code, const PrecomputedTensors& tensors) {
  check_dims(code);
  double f = 0;
  if (code.check_rounds() == 0) {
    const CMatrix m = static_decoder_coefficient(code.encoder, tensors);
    f = (code.decoders[0].matrix * m).trace().real();
  } else if (code.check_rounds() == 1) {
    const auto ms = decoder_coefficients(code.encoder, code.checks(), tensors);
    for (std::size_t i = 0; i < ms.size(); ++i) f += (code.decoders[i].matrix * ms[i]).trace().real();
  } else {
    throw DimensionError("factorized objective supports at most one check round");
  }
  return {f, FidelityMethod::Factorized};
}

ObjectiveValue fidelity_factorized(const StaticCode& code, const PrecomputedTensors& tensors) {
  return fidelity_factorized(code.as_strategic(), tensors);
}

ChainObjective::ChainObjective(const NoiseProcess& noise, CMatrix rho) : noise_(noise), rho_(std::move(rho)) {
  check_density(rho_);
  const Index l = rho_.rows();
  for (Index s = 0; s < l; ++s)
    for (Index t = 0; t < l; ++t) r_.push_back(rho_.col(s) * rho_.adjoint().row(t));
}

CMatrix ChainObjective::noise_apply(int branch, int round, const CMatrix& x) const {
  return apply_kraus(noise_.branches()[branch].rounds[round], x);
}

CMatrix ChainObjective::noise_adjoint(int branch, int round, const CMatrix& w) const {
  CMatrix out = CMatrix::Zero(w.rows(), w.cols());
  for (const auto& k : noise_.branches()[branch].rounds[round]) out.noalias() += k.adjoint() * w * k;
  return out;
}

void ChainObjective::check_code(const StrategicCode& code) const {
  check_dims(code);
  require_rounds(code, noise_.rounds());
  if (noise_.dim() != code.physical_dim()) throw DimensionError("noise acts on a different space than the code");
  for (const auto& round : code.rounds)
    for (const auto& c : round)
      if (c.d_out() != noise_.dim()) throw DimensionError("chain objective needs checks that keep the physical space");
  if (rho_.rows() != code.logical_dim() || code.output_dim() != code.logical_dim())
    throw DimensionError("reference state does not match the code");
}

std::vector<std::vector<ChainObjective::Family>> ChainObjective::forward(const StrategicCode& code,
                                                                         int branch) const {
  const Index l = rho_.rows();
  std::vector<std::vector<Family>> f(code.check_rounds() + 1);
  Family first;
  for (Index s = 0; s < l; ++s)
    for (Index t = 0; t < l; ++t)
      first.push_back(noise_apply(branch, 0, apply_choi(code.encoder, matrix_unit(l, t, s))));
  f[0].push_back(std::move(first));
  for (int r = 0; r < code.check_rounds(); ++r) {
    const int m = code.outcome_counts[r];
    for (std::size_t h = 0; h < f[r].size(); ++h)
      for (int k = 0; k < m; ++k) {
        Family next;
        for (const auto& x : f[r][h])
          next.push_back(noise_apply(branch, r + 1, apply_choi(code.rounds[r][h * m + k], x)));
        f[r + 1].push_back(std::move(next));
      }
  }
  return f;
}

std::vector<std::vector<ChainObjective::Family>> ChainObjective::backward(const StrategicCode& code,
                                                                          int branch) const {
  const int rounds = code.check_rounds();
  std::vector<std::vector<Family>> b(rounds + 1);
  for (const auto& dec : code.decoders) {
    Family fam;
    for (const auto& r : r_) fam.push_back(apply_choi_adjoint(dec, r));
    b[rounds].push_back(std::move(fam));
  }
  for (int r = rounds - 1; r >= 0; --r) {
    const int m = code.outcome_counts[r];
    const std::size_t histories = b[r + 1].size() / m;
    for (std::size_t h = 0; h < histories; ++h) {
      Family fam(r_.size());
      for (int k = 0; k < m; ++k) {
        const auto& c = code.rounds[r][h * m + k];
        for (std::size_t i = 0; i < r_.size(); ++i) {
          CMatrix g = apply_choi_adjoint(c, noise_adjoint(branch, r + 1, b[r + 1][h * m + k][i]));
          if (k == 0) fam[i] = std::move(g);
          else fam[i] += g;
        }
      }
      b[r].push_back(std::move(fam));
    }
  }
  return b;
}

double ChainObjective::fidelity(const StrategicCode& code) const {
  check_code(code);
  const int last = code.check_rounds();
  double f = 0;
  for (int br = 0; br < static_cast<int>(noise_.branches().size()); ++br) {
    const auto fw = forward(code, br);
    double acc = 0;
    for (std::size_t tau = 0; tau < code.decoders.size(); ++tau)
      for (std::size_t i = 0; i < r_.size(); ++i)
        acc += (apply_choi(code.decoders[tau], fw[last][tau][i]) * r_[i]).trace().real();
    f += noise_.branches()[br].weight * acc;
  }
  return f;
}

std::vector<CMatrix> ChainObjective::decoder_coefficients(const StrategicCode& code) const {
  check_code(code);
  const int last = code.check_rounds();
  const Index d = code.decoders[0].d_in(), l = rho_.rows();
  std::vector<CMatrix> out(code.decoders.size(), CMatrix::Zero(d * l, d * l));
  for (int br = 0; br < static_cast<int>(noise_.branches().size()); ++br) {
    const double w = noise_.branches()[br].weight;
    const auto fw = forward(code, br);
    for (std::size_t tau = 0; tau < code.decoders.size(); ++tau)
      for (std::size_t i = 0; i < r_.size(); ++i)
        out[tau].noalias() += w * tensor(CMatrix(fw[last][tau][i].transpose()), r_[i]);
  }
  for (auto& m : out) m = hermitize(m);
  return out;
}

std::vector<CMatrix> ChainObjective::check_coefficients(const StrategicCode& code, int round) const {
  check_code(code);
  if (round < 0 || round >= code.check_rounds()) throw DimensionError("check round out of range");
  const int m = code.outcome_counts[round];
  const auto& elems = code.rounds[round];
  std::vector<CMatrix> out;
  for (const auto& c : elems) out.push_back(CMatrix::Zero(c.matrix.rows(), c.matrix.cols()));
  for (int br = 0; br < static_cast<int>(noise_.branches().size()); ++br) {
    const double w = noise_.branches()[br].weight;
    const auto fw = forward(code, br);
    const auto bw = backward(code, br);
    for (std::size_t e = 0; e < elems.size(); ++e) {
      const std::size_t h = e / m;
      for (std::size_t i = 0; i < r_.size(); ++i) {
        const CMatrix g = noise_adjoint(br, round + 1, bw[round + 1][e][i]);
        out[e].noalias() += w * tensor(CMatrix(fw[round][h][i].transpose()), g);
      }
    }
  }
  for (auto& x : out) x = hermitize(x);
  return out;
}

CMatrix ChainObjective::encoder_coefficient(const StrategicCode& code) const {
  check_code(code);
  const Index l = rho_.rows(), d = code.physical_dim();
  CMatrix out = CMatrix::Zero(l * d, l * d);
  for (int br = 0; br < static_cast<int>(noise_.branches().size()); ++br) {
    const double w = noise_.branches()[br].weight;
    const auto bw = backward(code, br);
    for (Index s = 0; s < l; ++s)
      for (Index t = 0; t < l; ++t)
        out.noalias() += w * tensor(matrix_unit(l, s, t), noise_adjoint(br, 0, bw[0][0][s * l + t]));
  }
  return hermitize(out);
}

}  // namespace adqec
