#include <gtest/gtest.h>

#include "adqec/code_model.hpp"
#include "adqec/random.hpp"

using namespace adqec;

namespace {

CVector codeword(const ChoiOperator& enc, Index i) {
  const CMatrix rho = apply_choi(enc, matrix_unit(enc.d_in(), i, i));
  const auto e = herm_eig(rho);
  return e.vectors.col(e.values.size() - 1);
}

// |<u|v>| = 1 up to a phase.
bool same_ray(const CVector& u, const CVector& v) { return std::abs(std::abs(u.dot(v)) - 1.0) < 1e-12; }

CVector ket(std::initializer_list<std::pair<Index, double>> amps, Index d) {
  CVector v = CVector::Zero(d);
  for (auto [i, a] : amps) v(i) = a;
  return v;
}

}  // namespace

TEST(Choi, IdentityIsMaximallyEntangled) {
  const auto c = choi_from_kraus({identity(2)}, {2}, {2});
  CVector phi = CVector::Zero(4);
  phi(0) = phi(3) = 1.0;
  EXPECT_LT(frobenius_distance(c.matrix, CMatrix(phi * phi.adjoint())), 1e-15);
}

TEST(Choi, ResetChannelIsTracePreserving) {
  const auto c = choi_from_kraus({matrix_unit(2, 0, 0), matrix_unit(2, 0, 1)}, {2}, {2});
  EXPECT_LT(frobenius_distance(c.marginal(), identity(2)), 1e-15);
}

TEST(Choi, IsometryHasRankOne) {
  Rng rng(20);
  const CMatrix v = rng.isometry(4, 2);
  const auto c = isometry_channel(v, {2}, {2, 2});
  const auto e = herm_eig(c.matrix);
  int rank = 0;
  for (Index i = 0; i < e.values.size(); ++i) rank += e.values(i) > 1e-10;
  EXPECT_EQ(rank, 1);
  EXPECT_LT(frobenius_distance(c.marginal(), identity(2)), 1e-12);
}

TEST(Choi, ActionMatchesKraus) {
  Rng rng(21);
  const auto kraus = rng.channel_kraus(3, 4, 3);
  const auto c = choi_from_kraus(kraus, {3}, {4});
  for (int trial = 0; trial < 10; ++trial) {
    const CMatrix x = rng.ginibre(3, 3);
    EXPECT_LT(frobenius_distance(apply_choi(c, x), apply_kraus(kraus, x)), 1e-12);
    // adjoint: Tr(W C(X)) = Tr(C^dag(W) X)
    const CMatrix w = rng.ginibre(4, 4);
    const Complex lhs = (w * apply_choi(c, x)).trace();
    const Complex rhs = (apply_choi_adjoint(c, w) * x).trace();
    EXPECT_LT(std::abs(lhs - rhs), 1e-12);
  }
}

TEST(Choi, KrausRoundTrip) {
  Rng rng(22);
  const auto kraus = rng.channel_kraus(2, 4, 3);
  const auto c = choi_from_kraus(kraus, {2}, {2, 2});
  const auto back = kraus_from_choi(c);
  EXPECT_EQ(back.size(), 3u);
  for (int trial = 0; trial < 10; ++trial) {
    const CMatrix x = rng.density(2);
    EXPECT_LT(frobenius_distance(apply_kraus(back, x), apply_kraus(kraus, x)), 1e-9);
  }
}

TEST(Choi, RejectsShapeMismatch) {
  EXPECT_THROW(choi_from_kraus({identity(2), identity(3)}, {2}, {2}), DimensionError);
  EXPECT_THROW(ChoiOperator(identity(3), {2}, {2}), DimensionError);
}

TEST(Validate, IdentityCode) {
  const auto rep = validate(identity_code(1));
  EXPECT_TRUE(rep.passed());
  EXPECT_LE(rep.worst_residual(), 1e-12);
}

TEST(Validate, ScaledEncoderViolates) {
  auto code = identity_code(1);
  code.encoder.matrix *= 2.0;
  const auto rep = validate(code);
  EXPECT_FALSE(rep.passed());
  EXPECT_NEAR(rep.entries[0].residual, identity(2).norm(), 1e-12);
}

TEST(Validate, NegativeBlockFails) {
  auto code = identity_code(1);
  code.decoders[0].matrix(0, 0) -= 0.5;
  code.decoders[0].matrix(3, 3) += 0.5;
  EXPECT_FALSE(validate(code).passed());
}

TEST(Fixtures, AllValidate) {
  EXPECT_TRUE(validate(protocol_2qubit()).passed());
  EXPECT_TRUE(validate(protocol_3qubit(ThreeQubitReading::SignFlip)).passed());
  EXPECT_TRUE(validate(protocol_3qubit(ThreeQubitReading::Literal)).passed());
  for (int n = 1; n <= 3; ++n) EXPECT_TRUE(validate(identity_code(n)).passed());
  EXPECT_TRUE(validate(trivial_static_code()).passed());
  const auto leung = leung_4qubit_encoder();
  EXPECT_LT(frobenius_distance(leung.marginal(), identity(2)), 1e-12);
  EXPECT_LT(frobenius_distance(repetition_encoder(3).marginal(), identity(2)), 1e-12);
}

TEST(Fixtures, TwoQubitCodewords) {
  const auto code = protocol_2qubit();
  const double h = 1 / std::sqrt(2.0);
  EXPECT_TRUE(same_ray(codeword(code.encoder, 0), ket({{0, h}, {3, h}}, 4)));
  EXPECT_TRUE(same_ray(codeword(code.encoder, 1), ket({{0, h}, {3, -h}}, 4)));
  EXPECT_LT(frobenius_distance(code.encoder.marginal(), identity(2)), 1e-12);
}

TEST(Fixtures, TwoQubitCheckOnBasisStates) {
  const auto code = protocol_2qubit();
  const auto& check = code.checks()[0];
  const double h = 1 / std::sqrt(2.0);
  const CVector plus = ket({{0, h}, {2, h}}, 4), minus = ket({{0, h}, {2, -h}}, 4);
  auto out = [&](Index i) { return apply_choi(check, matrix_unit(4, i, i)); };
  EXPECT_LT(frobenius_distance(out(0), CMatrix(plus * plus.adjoint())), 1e-12);
  EXPECT_LT(frobenius_distance(out(1), matrix_unit(4, 1, 1)), 1e-12);
  EXPECT_LT(frobenius_distance(out(2), CMatrix(minus * minus.adjoint())), 1e-12);
  EXPECT_LT(frobenius_distance(out(3), CMatrix(minus * minus.adjoint())), 1e-12);
}

TEST(Fixtures, ThreeQubitCheck) {
  const auto code = protocol_3qubit(ThreeQubitReading::SignFlip);
  const auto& check = code.checks()[0];
  EXPECT_LT(frobenius_distance(apply_choi(check, matrix_unit(8, 7, 7)), matrix_unit(8, 4, 4)), 1e-12);
  EXPECT_LT(frobenius_distance(apply_choi(check, matrix_unit(8, 0, 0)), matrix_unit(8, 0, 0)), 1e-12);
  for (Index i : {1, 2, 3, 4})
    EXPECT_LT(frobenius_distance(apply_choi(check, matrix_unit(8, i, i)), matrix_unit(8, i, i)), 1e-12);
  const double h = 1 / std::sqrt(2.0);
  const CVector v = ket({{4, h}, {5, h}}, 8);
  EXPECT_LT(frobenius_distance(apply_choi(check, matrix_unit(8, 5, 5)), CMatrix(v * v.adjoint())), 1e-12);
}

TEST(Fixtures, ThreeQubitReadings) {
  const double h = 1 / std::sqrt(2.0);
  const auto flip = protocol_3qubit(ThreeQubitReading::SignFlip);
  EXPECT_TRUE(same_ray(codeword(flip.encoder, 1), ket({{0, h}, {7, -h}}, 8)));
  const auto lit = protocol_3qubit(ThreeQubitReading::Literal);
  // both logical states land on the same codeword
  EXPECT_TRUE(same_ray(codeword(lit.encoder, 0), ket({{0, h}, {7, h}}, 8)));
  EXPECT_TRUE(same_ray(codeword(lit.encoder, 1), ket({{0, h}, {7, h}}, 8)));
}

TEST(Fixtures, LeungCodewordsOrthonormal) {
  const CMatrix v = encoder_isometry(leung_4qubit_encoder());
  EXPECT_LT(frobenius_distance(CMatrix(v.adjoint() * v), identity(2)), 1e-12);
  const double h = 1 / std::sqrt(2.0);
  EXPECT_TRUE(same_ray(v.col(0), ket({{0b0000, h}, {0b1111, h}}, 16)));
  EXPECT_TRUE(same_ray(v.col(1), ket({{0b0011, h}, {0b1100, h}}, 16)));
}

TEST(BasisMap, CoversEveryInput) {
  EXPECT_THROW(basis_map_kraus(2, 2, {{0, basis_ket(2, 0)}}), std::invalid_argument);
  const auto k = basis_map_kraus(2, 2, {{0, basis_ket(2, 0)}, {1, basis_ket(2, 0)}});
  EXPECT_EQ(k.size(), 2u);
  CMatrix sum = CMatrix::Zero(2, 2);
  for (const auto& x : k) sum += x.adjoint() * x;
  EXPECT_LT(frobenius_distance(sum, identity(2)), 1e-15);
}

TEST(StrategicCode, DimensionChecks) {
  auto code = identity_code(2);
  code.decoders.push_back(code.decoders[0]);
  EXPECT_THROW(check_dims(code), DimensionError);
  EXPECT_THROW(StrategicCode::single_check(identity_channel({2}), {identity_channel({2, 2})},
                                           {identity_channel({2})}),
               DimensionError);
}
