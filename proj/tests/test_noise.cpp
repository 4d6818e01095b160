#include <gtest/gtest.h>

#include "adqec/code_model.hpp"
#include "adqec/noise.hpp"
#include "adqec/random.hpp"

using namespace adqec;

namespace {

// Choi matrix of a Kraus list, built from the channel action on matrix units.
CMatrix process_matrix(const std::vector<CMatrix>& kraus) {
  const Index d = kraus[0].cols(), dout = kraus[0].rows();
  CMatrix j = CMatrix::Zero(d * dout, d * dout);
  for (Index a = 0; a < d; ++a)
    for (Index b = 0; b < d; ++b) {
      CMatrix out = CMatrix::Zero(dout, dout);
      for (const auto& k : kraus) out += k * matrix_unit(d, a, b) * k.adjoint();
      j.block(a * dout, b * dout, dout, dout) = out;
    }
  return j;
}

std::vector<CMatrix> all_kraus(const NoiseProcess& p) {
  std::vector<CMatrix> out;
  for (const auto& t : p.weighted_terms()) {
    CMatrix k = identity(p.dim());
    for (const auto& e : t) k = e * k;
    out.push_back(k);
  }
  return out;
}

}  // namespace

TEST(SplitDamping, Values) {
  auto s = split_damping(0.0);
  EXPECT_EQ(s.gamma0, 0.0);
  EXPECT_EQ(s.gamma1, 0.0);
  s = split_damping(0.5);
  EXPECT_NEAR(s.gamma0, 0.25, 1e-15);
  EXPECT_NEAR(s.gamma1, 1.0 / 3.0, 1e-15);
  s = split_damping(1.0);
  EXPECT_NEAR(s.gamma0, 0.5, 1e-15);
  EXPECT_NEAR(s.gamma1, 1.0, 1e-15);
  for (double g = 0; g <= 1.0; g += 0.05) {
    s = split_damping(g);
    EXPECT_NEAR(s.gamma0 + s.gamma1 - s.gamma0 * s.gamma1, g, 1e-12);
  }
  EXPECT_THROW(split_damping(-0.1), std::invalid_argument);
  EXPECT_THROW(split_damping(1.1), std::invalid_argument);
}

TEST(SplitDamping, ManyRoundsCompose) {
  for (int r = 1; r <= 4; ++r)
    for (double g : {0.0, 0.3, 0.7, 1.0}) {
      const auto gs = split_damping_rounds(g, r);
      double survive = 1;
      for (double x : gs) survive *= 1 - x;
      EXPECT_NEAR(1 - survive, g, 1e-12);
    }
  const auto two = split_damping_rounds(0.4, 2);
  const auto ref = split_damping(0.4);
  EXPECT_DOUBLE_EQ(two[0], ref.gamma0);
  EXPECT_DOUBLE_EQ(two[1], ref.gamma1);
}

TEST(AdKraus, Values) {
  auto e = ad_kraus(0.0);
  EXPECT_LT(frobenius_distance(e[0], identity(2)), 1e-15);
  EXPECT_LT(e[1].norm(), 1e-15);
  e = ad_kraus(1.0);
  EXPECT_LT(frobenius_distance(e[0], matrix_unit(2, 0, 0)), 1e-15);
  EXPECT_LT(frobenius_distance(e[1], matrix_unit(2, 0, 1)), 1e-15);
  e = ad_kraus(0.36);
  EXPECT_NEAR(e[0](1, 1).real(), 0.8, 1e-15);
  EXPECT_NEAR(e[1](0, 1).real(), 0.6, 1e-15);
  for (double g : {0.0, 0.1, 0.5, 0.99}) {
    e = ad_kraus(g);
    EXPECT_LT(frobenius_distance(CMatrix(e[0].adjoint() * e[0] + e[1].adjoint() * e[1]), identity(2)), 1e-14);
  }
  EXPECT_THROW(ad_kraus(1.5), std::invalid_argument);
}

TEST(LocalK, SingleQubit) {
  const auto p = local_k_noise(1, 1, 0.4);
  const auto s = split_damping(0.4);
  const auto e = ad_kraus(s.gamma0);
  ASSERT_EQ(p.branches().size(), 1u);
  const auto& r0 = p.branches()[0].rounds[0];
  ASSERT_EQ(r0.size(), 2u);
  EXPECT_EQ((r0[0] - e[0]).norm(), 0.0);
  EXPECT_EQ((r0[1] - e[1]).norm(), 0.0);
}

TEST(LocalK, WeightsAndCompleteness) {
  const auto p = local_k_noise(2, 1, 0.3);
  ASSERT_EQ(p.branches().size(), 2u);
  for (const auto& b : p.branches()) EXPECT_DOUBLE_EQ(b.weight, 0.5);

  const auto q = local_k_noise(3, 2, 0.7);
  EXPECT_EQ(q.branches().size(), 3u);
  for (int r = 0; r < q.rounds(); ++r) EXPECT_LT(q.completeness_error(r), 1e-10);
  double total = 0;
  for (const auto& b : q.branches()) total += b.weight;
  EXPECT_NEAR(total, 1.0, 1e-15);
  EXPECT_THROW(local_k_noise(2, 3, 0.1), std::invalid_argument);
}

TEST(LocalK, BranchAppliesSubsetEveryRound) {
  // the subset is chosen once: terms never damp qubit 1 in round 0 and qubit 0 in round 1
  const auto p = local_k_noise(2, 1, 0.5);
  for (const auto& t : p.terms()) {
    const CMatrix& k0 = t.kraus[0];
    const CMatrix& k1 = t.kraus[1];
    const bool q0_first = (k0 - embed_qubit(ad_kraus(0.25)[0], 0, 2)).norm() < 1e-14 ||
                          (k0 - embed_qubit(ad_kraus(0.25)[1], 0, 2)).norm() < 1e-14;
    const bool q0_second = (k1 - embed_qubit(ad_kraus(1.0 / 3.0)[0], 0, 2)).norm() < 1e-14 ||
                           (k1 - embed_qubit(ad_kraus(1.0 / 3.0)[1], 0, 2)).norm() < 1e-14;
    EXPECT_EQ(q0_first, q0_second);
  }
}

TEST(WeightK, Counts) {
  const auto z = weight_k_noise(3, 0, 0.2);
  ASSERT_EQ(z.branches()[0].rounds[0].size(), 1u);
  const auto e0 = ad_kraus(split_damping(0.2).gamma0)[0];
  EXPECT_LT((z.branches()[0].rounds[0][0] - tensor(e0, e0, e0)).norm(), 1e-15);
  EXPECT_FALSE(z.complete());

  const auto full = weight_k_noise(2, 2, 0.6);
  EXPECT_EQ(full.branches()[0].rounds[0].size(), 4u);
  EXPECT_TRUE(full.complete());
  EXPECT_LT(full.completeness_error(), 1e-12);

  const auto one = weight_k_noise(2, 1, 0.2);
  EXPECT_EQ(one.branches()[0].rounds[0].size(), 3u);
  EXPECT_FALSE(one.complete());
  EXPECT_GT(one.completeness_error(), 1e-6);
  EXPECT_NO_THROW(one.check());  // skipped for truncated models
  EXPECT_THROW(weight_k_noise(2, 3, 0.1), std::invalid_argument);
}

TEST(Noise, TwoRoundCompositionIsTotalDamping) {
  for (double g : {0.1, 0.35, 0.8, 1.0}) {
    const auto p = local_k_noise(1, 1, g);
    const auto e = ad_kraus(g);
    const CMatrix want = process_matrix({e[0], e[1]});
    EXPECT_LT(frobenius_distance(process_matrix(all_kraus(p)), want), 1e-12) << g;
    EXPECT_LT(frobenius_distance(process_matrix(all_kraus(p.composed())), want), 1e-12) << g;
  }
}

TEST(Noise, ModelsCoincideAtFullWeight) {
  for (int n : {1, 2, 3}) {
    const auto a = local_k_noise(n, n, 0.45);
    const auto b = weight_k_noise(n, n, 0.45);
    for (int r = 0; r < 2; ++r)
      EXPECT_LT(frobenius_distance(process_matrix(a.round_kraus(r)), process_matrix(b.round_kraus(r))), 1e-12);
  }
}

TEST(Noise, RejectsBadKraus) {
  NoiseBranch b{1.0, {{identity(3)}}};
  EXPECT_THROW(NoiseProcess(1, {b}), DimensionError);
  NoiseBranch neg{-1.0, {{identity(2)}}};
  EXPECT_THROW(NoiseProcess(1, {neg}), std::invalid_argument);
}

TEST(Tensors, IdentityNoiseAndMixedReference) {
  const auto p = local_k_noise(2, 1, 0.0);
  const auto t = precompute_tensors(p, maximally_mixed(2));
  for (Index a = 0; a < 4; ++a)
    for (Index b = 0; b < 4; ++b) {
      CMatrix sum = CMatrix::Zero(4, 4);
      for (int br = 0; br < t.branch_count(); ++br) sum += t.n_entry(br, 0, a, b);
      EXPECT_LT(frobenius_distance(sum, matrix_unit(4, a, b)), 1e-15);
      EXPECT_LT(frobenius_distance(t.n_entry(0, 1, a, b), matrix_unit(4, a, b)), 1e-15);
    }
  CMatrix r00 = CMatrix::Zero(2, 2);
  r00(0, 0) = 0.25;
  EXPECT_LT(frobenius_distance(t.r_entry(0, 0), r00), 1e-15);
}

TEST(Tensors, HermitianSymmetry) {
  Rng rng(11);
  std::vector<NoiseBranch> br{{0.3, {rng.channel_kraus(4, 4, 3), rng.channel_kraus(4, 4, 2)}},
                              {0.7, {rng.channel_kraus(4, 4, 2), rng.channel_kraus(4, 4, 3)}}};
  const NoiseProcess p(2, br);
  const auto t = precompute_tensors(p, rng.density(2));
  for (int b = 0; b < 2; ++b)
    for (int r = 0; r < 2; ++r)
      for (Index x = 0; x < 4; ++x)
        for (Index y = 0; y < 4; ++y)
          EXPECT_LT(frobenius_distance(CMatrix(t.n_entry(b, r, x, y).adjoint()), t.n_entry(b, r, y, x)), 1e-14);
  for (Index s = 0; s < 2; ++s)
    for (Index u = 0; u < 2; ++u)
      EXPECT_LT(frobenius_distance(CMatrix(t.r_entry(s, u).adjoint()), t.r_entry(u, s)), 1e-15);
}

TEST(Tensors, RejectsInvalidDensity) {
  const auto p = local_k_noise(1, 1, 0.2);
  EXPECT_THROW(precompute_tensors(p, identity(2)), NumericalError);
  CMatrix bad = CMatrix::Zero(2, 2);
  bad(0, 0) = 1.5;
  bad(1, 1) = -0.5;
  EXPECT_THROW(precompute_tensors(p, bad), NumericalError);
}
