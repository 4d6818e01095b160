#include "adqec/code_model.hpp"
#include "adqec/noise.hpp"

namespace adqec {

ChoiOperator::ChoiOperator(CMatrix m, DimList in, DimList out)
    : matrix(std::move(m)), in_dims(std::move(in)), out_dims(std::move(out)) {
  const Index d = dim_product(in_dims) * dim_product(out_dims);
  if (matrix.rows() != d || matrix.cols() != d)
    throw DimensionError("ChoiOperator: matrix is " + std::to_string(matrix.rows()) + "x" +
                         std::to_string(matrix.cols()) + " but dims multiply to " + std::to_string(d));
}

DimList qubit_dims(int n) { return DimList(static_cast<std::size_t>(n), 2); }

ChoiOperator choi_from_kraus(const std::vector<CMatrix>& kraus, const DimList& in_dims, const DimList& out_dims) {
  const Index di = dim_product(in_dims), dout = dim_product(out_dims);
  CMatrix j = CMatrix::Zero(di * dout, di * dout);
  for (const auto& k : kraus) {
    if (k.rows() != dout || k.cols() != di)
      throw DimensionError("choi_from_kraus: Kraus operator is " + std::to_string(k.rows()) + "x" +
                           std::to_string(k.cols()) + ", expected " + std::to_string(dout) + "x" + std::to_string(di));
    const CVector v = vectorize(CMatrix(k.transpose()));
    j.noalias() += v * v.adjoint();
  }
  return ChoiOperator(std::move(j), in_dims, out_dims);
}

ChoiOperator choi_from_kraus(const std::vector<CMatrix>& kraus) {
  if (kraus.empty()) throw DimensionError("choi_from_kraus: empty Kraus list");
  return choi_from_kraus(kraus, {kraus[0].cols()}, {kraus[0].rows()});
}

std::vector<CMatrix> kraus_from_choi(const ChoiOperator& c, double cutoff) {
  const Index di = c.d_in(), dout = c.d_out();
  auto eig = herm_eig(c.matrix);
  const double top = std::max(eig.values.maxCoeff(), 0.0);
  std::vector<CMatrix> out;
  for (Index k = eig.values.size() - 1; k >= 0; --k) {
    const double lam = eig.values(k);
    if (lam <= cutoff * std::max(top, 1e-300)) continue;
    CMatrix kr(dout, di);
    for (Index a = 0; a < di; ++a)
      for (Index x = 0; x < dout; ++x) kr(x, a) = std::sqrt(lam) * eig.vectors(a * dout + x, k);
    // phase convention: the first largest entry is real positive
    Index r = 0, col = 0;
    kr.cwiseAbs().maxCoeff(&r, &col);
    kr *= std::conj(kr(r, col)) / std::abs(kr(r, col));
    out.push_back(std::move(kr));
  }
  return out;
}

CMatrix apply_choi(const ChoiOperator& c, const CMatrix& x) {
  const Index di = c.d_in(), dout = c.d_out();
  if (x.rows() != di || x.cols() != di) throw DimensionError("apply_choi: input has wrong dimension");
  CMatrix out = CMatrix::Zero(dout, dout);
  for (Index a = 0; a < di; ++a)
    for (Index b = 0; b < di; ++b) {
      const Complex xab = x(a, b);
      if (xab == Complex(0)) continue;
      out.noalias() += xab * c.matrix.block(a * dout, b * dout, dout, dout);
    }
  return out;
}

CMatrix apply_choi_adjoint(const ChoiOperator& c, const CMatrix& w) {
  const Index di = c.d_in(), dout = c.d_out();
  if (w.rows() != dout || w.cols() != dout) throw DimensionError("apply_choi_adjoint: input has wrong dimension");
  CMatrix out(di, di);
  const CMatrix wt = w.transpose();
  for (Index a = 0; a < di; ++a)
    for (Index b = 0; b < di; ++b) out(a, b) = (c.matrix.block(b * dout, a * dout, dout, dout).cwiseProduct(wt)).sum();
  return out;
}

CMatrix apply_kraus(const std::vector<CMatrix>& kraus, const CMatrix& x) {
  if (kraus.empty()) throw DimensionError("apply_kraus: empty Kraus list");
  CMatrix out = CMatrix::Zero(kraus[0].rows(), kraus[0].rows());
  for (const auto& k : kraus) out.noalias() += k * x * k.adjoint();
  return out;
}

ChoiOperator identity_channel(const DimList& dims) {
  return choi_from_kraus({identity(dim_product(dims))}, dims, dims);
}

ChoiOperator isometry_channel(const CMatrix& v, const DimList& in_dims, const DimList& out_dims) {
  return choi_from_kraus({v}, in_dims, out_dims);
}

ChoiOperator depolarizing_channel(const DimList& in_dims, const DimList& out_dims) {
  const Index di = dim_product(in_dims), dout = dim_product(out_dims);
  return ChoiOperator(CMatrix::Identity(di * dout, di * dout) / static_cast<double>(dout), in_dims, out_dims);
}

StrategicCode StrategicCode::single_check(ChoiOperator encoder, std::vector<ChoiOperator> checks,
                                          std::vector<ChoiOperator> decoders) {
  StrategicCode code;
  code.encoder = std::move(encoder);
  code.outcome_counts = {static_cast<int>(checks.size())};
  code.rounds = {std::move(checks)};
  code.decoders = std::move(decoders);
  check_dims(code);
  return code;
}

int StrategicCode::outcome_count() const {
  int total = 1;
  for (int m : outcome_counts) total *= m;
  return total;
}

const std::vector<ChoiOperator>& StrategicCode::checks() const {
  if (rounds.empty()) throw DimensionError("StrategicCode: static code has no checks");
  return rounds.front();
}

StrategicCode StaticCode::as_strategic() const {
  StrategicCode code;
  code.encoder = encoder;
  code.decoders = {decoder};
  check_dims(code);
  return code;
}

void check_dims(const StrategicCode& code) {
  if (code.rounds.size() != code.outcome_counts.size())
    throw DimensionError("StrategicCode: outcome counts do not match the number of rounds");
  Index d = code.encoder.d_out();
  int histories = 1;
  for (std::size_t r = 0; r < code.rounds.size(); ++r) {
    if (code.outcome_counts[r] < 1) throw DimensionError("StrategicCode: outcome count below one");
    histories *= code.outcome_counts[r];
    if (static_cast<int>(code.rounds[r].size()) != histories)
      throw DimensionError("StrategicCode: round " + std::to_string(r) + " has " +
                           std::to_string(code.rounds[r].size()) + " elements, expected " + std::to_string(histories));
    Index next = -1;
    for (const auto& c : code.rounds[r]) {
      if (c.d_in() != d) throw DimensionError("StrategicCode: check input does not match previous output");
      if (next >= 0 && c.d_out() != next) throw DimensionError("StrategicCode: check outputs differ across outcomes");
      next = c.d_out();
    }
    d = next;
  }
  if (static_cast<int>(code.decoders.size()) != histories)
    throw DimensionError("StrategicCode: " + std::to_string(code.decoders.size()) + " decoders for " +
                         std::to_string(histories) + " trajectories");
  for (const auto& dec : code.decoders) {
    if (dec.d_in() != d) throw DimensionError("StrategicCode: decoder input does not match check output");
    if (dec.d_out() != code.encoder.d_in()) throw DimensionError("StrategicCode: decoder output is not logical");
  }
}

bool ValidationReport::passed() const {
  for (const auto& e : entries)
    if (e.residual > tol || e.min_eig < -tol) return false;
  return true;
}

double ValidationReport::worst_residual() const {
  double w = 0;
  for (const auto& e : entries) w = std::max(w, e.residual);
  return w;
}

double ValidationReport::worst_min_eig() const {
  double w = 0;
  for (const auto& e : entries) w = std::min(w, e.min_eig);
  return w;
}

ValidationReport validate(const StrategicCode& code, double tol) {
  ValidationReport rep;
  rep.tol = tol;
  const auto& enc = code.encoder;
  rep.entries.push_back({"encoder", enc.min_eig(), (enc.marginal() - identity(enc.d_in())).norm()});
  int histories = 1;
  for (std::size_t r = 0; r < code.rounds.size(); ++r) {
    const int m = code.outcome_counts[r];
    for (int h = 0; h < histories; ++h) {
      const auto& first = code.rounds[r][h * m];
      CMatrix sum = CMatrix::Zero(first.d_in(), first.d_in());
      double min_eig = std::numeric_limits<double>::infinity();
      for (int k = 0; k < m; ++k) {
        const auto& c = code.rounds[r][h * m + k];
        sum += c.marginal();
        min_eig = std::min(min_eig, c.min_eig());
      }
      std::string name = "check[" + std::to_string(r) + "]";
      if (histories > 1) name += "[history " + std::to_string(h) + "]";
      rep.entries.push_back({name, min_eig, (sum - identity(first.d_in())).norm()});
    }
    histories *= m;
  }
  for (std::size_t i = 0; i < code.decoders.size(); ++i) {
    const auto& d = code.decoders[i];
    rep.entries.push_back(
        {"decoder[" + std::to_string(i) + "]", d.min_eig(), (d.marginal() - identity(d.d_in())).norm()});
  }
  return rep;
}

ValidationReport validate(const StaticCode& code, double tol) { return validate(code.as_strategic(), tol); }

std::vector<CMatrix> basis_map_kraus(Index d_in, Index d_out, const std::vector<std::pair<Index, CVector>>& pairs) {
  std::vector<std::vector<std::pair<Index, CVector>>> groups;
  std::vector<bool> seen(static_cast<std::size_t>(d_in), false);
  for (const auto& [input, image] : pairs) {
    if (input < 0 || input >= d_in || image.size() != d_out) throw DimensionError("basis_map_kraus: bad entry");
    if (seen[input]) throw std::invalid_argument("basis_map_kraus: input listed twice");
    seen[input] = true;
    const double nrm = image.norm();
    if (nrm == 0) throw std::invalid_argument("basis_map_kraus: zero image");
    CVector u = image / nrm;
    bool placed = false;
    for (auto& g : groups) {
      bool orth = true;
      for (const auto& [_, v] : g)
        if (std::abs(v.dot(u)) > 1e-12) orth = false;
      if (orth) {
        g.emplace_back(input, u);
        placed = true;
        break;
      }
    }
    if (!placed) groups.push_back({{input, u}});
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end())
    throw std::invalid_argument("basis_map_kraus: map does not cover every basis state");
  std::vector<CMatrix> kraus;
  for (const auto& g : groups) {
    CMatrix k = CMatrix::Zero(d_out, d_in);
    for (const auto& [input, u] : g) k.col(input) = u;
    kraus.push_back(std::move(k));
  }
  return kraus;
}

std::vector<CMatrix> trace_out_after(const std::vector<CMatrix>& kraus, const DimList& out_dims,
                                     const std::vector<int>& traced) {
  std::vector<int> kept;
  for (int f = 0; f < static_cast<int>(out_dims.size()); ++f)
    if (std::find(traced.begin(), traced.end(), f) == traced.end()) kept.push_back(f);
  const auto kept_off = detail::factor_offsets(out_dims, kept);
  const auto traced_off = detail::factor_offsets(out_dims, traced);
  const Index dout = dim_product(out_dims);
  std::vector<CMatrix> out;
  for (Index t : traced_off) {
    CMatrix p = CMatrix::Zero(static_cast<Index>(kept_off.size()), dout);
    for (std::size_t i = 0; i < kept_off.size(); ++i) p(static_cast<Index>(i), kept_off[i] + t) = 1.0;
    for (const auto& k : kraus) out.push_back(p * k);
  }
  return out;
}

namespace {

CVector ket_of(const std::vector<std::pair<Index, double>>& amps, Index d) {
  CVector v = CVector::Zero(d);
  for (const auto& [i, a] : amps) v(i) += a;
  return v;
}

}  // namespace

StrategicCode protocol_2qubit() {
  const double h = 1.0 / std::sqrt(2.0);
  // qubit order: main, auxiliary; |ma> has index 2m + a
  CMatrix v(4, 2);
  v.col(0) = ket_of({{0, h}, {3, h}}, 4);
  v.col(1) = ket_of({{0, h}, {3, -h}}, 4);
  auto encoder = isometry_channel(v, {2}, qubit_dims(2));

  const CVector plus = ket_of({{0, h}, {2, h}}, 4);   // (|00>+|10>)/sqrt2
  const CVector minus = ket_of({{0, h}, {2, -h}}, 4);  // (|00>-|10>)/sqrt2
  auto check_kraus = basis_map_kraus(4, 4, {{0, plus}, {1, basis_ket(4, 1)}, {3, minus}, {2, minus}});
  auto check = choi_from_kraus(check_kraus, qubit_dims(2), qubit_dims(2));

  auto dec_kraus = basis_map_kraus(4, 4, {{0, basis_ket(4, 0)}, {2, basis_ket(4, 2)}, {1, minus}, {3, minus}});
  auto decoder = choi_from_kraus(trace_out_after(dec_kraus, qubit_dims(2), {1}), qubit_dims(2), {2});
  return StrategicCode::single_check(std::move(encoder), {std::move(check)}, {std::move(decoder)});
}

StrategicCode protocol_3qubit(ThreeQubitReading reading) {
  const double h = 1.0 / std::sqrt(2.0);
  // qubit order: m, a1, a2; |m a1 a2> has index 4m + 2a1 + a2
  const CVector ghz_plus = ket_of({{0, h}, {7, h}}, 8);
  const CVector ghz_minus = ket_of({{0, h}, {7, -h}}, 8);
  ChoiOperator encoder;
  if (reading == ThreeQubitReading::SignFlip) {
    CMatrix v(8, 2);
    v.col(0) = ghz_plus;
    v.col(1) = ghz_minus;
    encoder = isometry_channel(v, {2}, qubit_dims(3));
  } else {
    // both logical states map to the same codeword: a replacement channel
    std::vector<CMatrix> kraus;
    for (Index i = 0; i < 2; ++i) kraus.push_back(ghz_plus * basis_ket(2, i).adjoint());
    encoder = choi_from_kraus(kraus, {2}, qubit_dims(3));
  }

  std::vector<std::pair<Index, CVector>> check_map;
  for (Index i : {0, 7, 1, 2, 3, 4, 5, 6}) {
    CVector image;
    if (i == 5) image = ket_of({{4, 0.5}, {5, 0.5}}, 8);
    else if (i == 6) image = ket_of({{4, 0.5}, {6, 0.5}}, 8);
    else if (i == 7) image = basis_ket(8, 4);
    else image = basis_ket(8, i);
    check_map.emplace_back(i, image);
  }
  auto check = choi_from_kraus(basis_map_kraus(8, 8, check_map), qubit_dims(3), qubit_dims(3));

  const CVector dplus = ket_of({{0, h}, {4, h}}, 8);
  const CVector dminus = ket_of({{0, h}, {4, -h}}, 8);
  std::vector<std::pair<Index, CVector>> dec_map{{0, dplus}, {4, dminus}};
  for (Index i : {1, 2, 3, 5, 6, 7}) dec_map.emplace_back(i, dminus);
  auto dec_kraus = trace_out_after(basis_map_kraus(8, 8, dec_map), qubit_dims(3), {1, 2});
  auto decoder = choi_from_kraus(dec_kraus, qubit_dims(3), {2});
  return StrategicCode::single_check(std::move(encoder), {std::move(check)}, {std::move(decoder)});
}

ChoiOperator leung_4qubit_encoder() {
  const double h = 1.0 / std::sqrt(2.0);
  CMatrix v(16, 2);
  v.col(0) = ket_of({{0b0000, h}, {0b1111, h}}, 16);
  v.col(1) = ket_of({{0b0011, h}, {0b1100, h}}, 16);
  return isometry_channel(v, {2}, qubit_dims(4));
}

ChoiOperator repetition_encoder(int n) {
  const Index d = Index{1} << n;
  CMatrix v = CMatrix::Zero(d, 2);
  v(0, 0) = 1.0;
  v(d - 1, 1) = 1.0;
  return isometry_channel(v, {2}, qubit_dims(n));
}

StrategicCode repetition_syndrome_code(bool correct) {
  CMatrix v = CMatrix::Zero(8, 2);
  v(0, 0) = v(7, 1) = 1.0;
  CMatrix x = CMatrix::Zero(2, 2);
  x(0, 1) = x(1, 0) = 1.0;
  const CMatrix p0 = v * v.adjoint();
  std::vector<CMatrix> flips{identity(8)};
  for (int q = 0; q < 3; ++q) flips.push_back(embed_qubit(x, q, 3));

  std::vector<ChoiOperator> checks;
  for (int s = 0; s < 4; ++s) {
    const CMatrix proj = flips[s] * p0 * flips[s];
    checks.push_back(choi_from_kraus({correct ? CMatrix(flips[s] * proj) : proj}, qubit_dims(3), qubit_dims(3)));
  }
  std::vector<CMatrix> dec;
  for (const auto& f : flips) dec.push_back(v.adjoint() * f);
  const auto decoder = choi_from_kraus(dec, qubit_dims(3), {2});
  return StrategicCode::single_check(repetition_encoder(3), std::move(checks), std::vector<ChoiOperator>(4, decoder));
}

StrategicCode identity_code(int n) {
  const Index d = Index{1} << n;
  const Index anc = d / 2;
  CMatrix v = CMatrix::Zero(d, 2);
  v(0, 0) = 1.0;
  v(anc, 1) = 1.0;
  auto encoder = isometry_channel(v, {2}, qubit_dims(n));
  std::vector<int> ancillas;
  for (int q = 1; q < n; ++q) ancillas.push_back(q);
  auto dec_kraus = trace_out_after({identity(d)}, qubit_dims(n), ancillas);
  auto decoder = choi_from_kraus(dec_kraus, qubit_dims(n), {2});
  return StrategicCode::single_check(std::move(encoder), {identity_channel(qubit_dims(n))}, {std::move(decoder)});
}

StaticCode trivial_static_code() { return {identity_channel({2}), identity_channel({2})}; }

CMatrix encoder_isometry(const ChoiOperator& encoder, double tol) {
  auto kraus = kraus_from_choi(encoder, 1e-12);
  if (kraus.empty()) throw NumericalError("encoder_isometry: zero encoder");
  CMatrix v = kraus.front();
  const double rest = (encoder.matrix - choi_from_kraus({v}, encoder.in_dims, encoder.out_dims).matrix).norm();
  if (rest > tol) throw NumericalError("encoder_isometry: encoder is not an isometry channel");
  // fix the global phase so the largest entry of column 0 is real positive
  Index r = 0;
  v.col(0).cwiseAbs().maxCoeff(&r);
  const Complex ph = v(r, 0);
  if (std::abs(ph) > 0) v *= std::conj(ph) / std::abs(ph);
  return v;
}

}  // namespace adqec
