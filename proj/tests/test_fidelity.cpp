#include <gtest/gtest.h>

#include "adqec/fidelity.hpp"
#include "support.hpp"

using namespace adqec;
using namespace adqec::testing;

namespace {

double unencoded_closed_form(double g) {
  const double a = (1 + std::sqrt(1 - g)) / 2;
  return a * a;
}

NoiseProcess identity_noise(int n, int rounds) {
  NoiseBranch b;
  for (int r = 0; r < rounds; ++r) b.rounds.push_back({identity(Index{1} << n)});
  return NoiseProcess(n, {b});
}

}  // namespace

TEST(Fidelity, NoiselessIdentityCode) {
  const auto code = identity_code(1);
  const auto noise = local_k_noise(1, 1, 0.0);
  const CMatrix rho = maximally_mixed(2);
  EXPECT_NEAR(fidelity_direct(code, noise, rho).fidelity, 1.0, 1e-12);
  EXPECT_NEAR(fidelity_factorized(code, precompute_tensors(noise, rho)).fidelity, 1.0, 1e-12);
  EXPECT_NEAR(ChainObjective(noise, rho).fidelity(code), 1.0, 1e-12);
}

TEST(Fidelity, UnencodedClosedForm) {
  const auto code = identity_code(1);
  for (double g : {0.1, 0.2, 0.5, 0.9}) {
    const auto noise = local_k_noise(1, 1, g);
    const double f = fidelity_direct(code, noise, maximally_mixed(2)).fidelity;
    EXPECT_NEAR(f, unencoded_closed_form(g), 1e-12) << g;
  }
  EXPECT_NEAR(unencoded_closed_form(0.2), 0.897214, 1e-6);
}

TEST(Fidelity, ClosedFormFromKrausTraces) {
  // sum_e |Tr(rho E_e)|^2 for a random channel and reference state
  Rng rng(30);
  const auto kraus = rng.channel_kraus(2, 2, 3);
  const CMatrix rho = rng.density(2);
  NoiseBranch b{1.0, {kraus}};
  const NoiseProcess noise(1, {b});
  double want = 0;
  for (const auto& k : kraus) want += std::norm((rho * k).trace());
  EXPECT_NEAR(fidelity_direct(trivial_static_code(), noise, rho).fidelity, want, 1e-12);
  EXPECT_NEAR(fidelity_factorized(trivial_static_code(), precompute_tensors(noise, rho)).fidelity, want, 1e-12);
}

TEST(Fidelity, Protocol2QubitMethodsAgree) {
  const auto code = protocol_2qubit();
  const auto noise = local_k_noise(2, 1, 0.3);
  const CMatrix rho = maximally_mixed(2);
  const double d = fidelity_direct(code, noise, rho).fidelity;
  const double f = fidelity_factorized(code, precompute_tensors(noise, rho)).fidelity;
  EXPECT_NEAR(d, f, 1e-9);
  EXPECT_NEAR(ChainObjective(noise, rho).fidelity(code), d, 1e-9);
}

TEST(Fidelity, FixturesAreNoiseless) {
  const CMatrix rho = maximally_mixed(2);
  EXPECT_NEAR(fidelity_direct(protocol_2qubit(), identity_noise(2, 2), rho).fidelity, 1.0, 1e-12);
  EXPECT_NEAR(fidelity_direct(protocol_3qubit(ThreeQubitReading::SignFlip), identity_noise(3, 2), rho).fidelity, 1.0,
              1e-12);
  EXPECT_LT(fidelity_direct(protocol_3qubit(ThreeQubitReading::Literal), identity_noise(3, 2), rho).fidelity, 0.6);
}

TEST(Fidelity, FullyMixingEncoder) {
  auto code = identity_code(1);
  code.encoder = depolarizing_channel({2}, {2});
  const auto noise = local_k_noise(1, 1, 0.0);
  const CMatrix rho = maximally_mixed(2);
  EXPECT_NEAR(fidelity_factorized(code, precompute_tensors(noise, rho)).fidelity, 0.25, 1e-12);
  EXPECT_NEAR(fidelity_direct(code, noise, rho).fidelity, 0.25, 1e-12);
}

TEST(Fidelity, RandomInstancesAgree) {
  Rng rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 2;
    const int m = 1 + (trial / 2) % 2;
    const auto code = random_code(rng, n, m);
    const auto noise = random_noise(rng, n, 2, 1 + trial % 3);
    const CMatrix rho = rng.density(2);
    const double d = fidelity_direct(code, noise, rho).fidelity;
    const double f = fidelity_factorized(code, precompute_tensors(noise, rho)).fidelity;
    const double c = ChainObjective(noise, rho).fidelity(code);
    EXPECT_NEAR(d, f, 1e-9) << trial;
    EXPECT_NEAR(d, c, 1e-9) << trial;
    EXPECT_GE(d, -1e-7);
    EXPECT_LE(d, 1 + 1e-7);
  }
}

TEST(Fidelity, CoefficientsReproduceObjective) {
  Rng rng(32);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 1 + trial % 2;
    const auto code = random_code(rng, n, 2);
    const auto noise = random_noise(rng, n, 2);
    const CMatrix rho = rng.density(2);
    const auto t = precompute_tensors(noise, rho);
    const ChainObjective chain(noise, rho);
    const double f = fidelity_direct(code, noise, rho).fidelity;

    const auto md = decoder_coefficients(code.encoder, code.checks(), t);
    const auto mc = check_coefficients(code.encoder, code.decoders, t);
    const CMatrix me = encoder_coefficient(code.checks(), code.decoders, t);
    const auto cd = chain.decoder_coefficients(code);
    const auto cc = chain.check_coefficients(code, 0);
    const CMatrix ce = chain.encoder_coefficient(code);
    double fd = 0, fc = 0;
    for (int m = 0; m < 2; ++m) {
      fd += (code.decoders[m].matrix * md[m]).trace().real();
      fc += (code.checks()[m].matrix * mc[m]).trace().real();
      EXPECT_LT(frobenius_distance(md[m], cd[m]), 1e-10);
      EXPECT_LT(frobenius_distance(mc[m], cc[m]), 1e-10);
    }
    EXPECT_NEAR(fd, f, 1e-10);
    EXPECT_NEAR(fc, f, 1e-10);
    EXPECT_NEAR((code.encoder.matrix * me).trace().real(), f, 1e-10);
    EXPECT_LT(frobenius_distance(me, ce), 1e-10);
  }
}

TEST(Fidelity, StaticCoefficients) {
  Rng rng(33);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 1 + trial % 2;
    StaticCode code{random_channel(rng, {2}, qubit_dims(n)), random_channel(rng, qubit_dims(n), {2})};
    const auto noise = random_noise(rng, n, 1);
    const CMatrix rho = rng.density(2);
    const auto t = precompute_tensors(noise, rho);
    const double f = fidelity_direct(code, noise, rho).fidelity;
    EXPECT_NEAR(fidelity_factorized(code, t).fidelity, f, 1e-10);
    EXPECT_NEAR((code.encoder.matrix * static_encoder_coefficient(code.decoder, t)).trace().real(), f, 1e-10);
    const ChainObjective chain(noise, rho);
    EXPECT_NEAR(chain.fidelity(code.as_strategic()), f, 1e-10);
    EXPECT_LT(frobenius_distance(static_decoder_coefficient(code.encoder, t),
                                 chain.decoder_coefficients(code.as_strategic())[0]),
              1e-10);
  }
}

TEST(Fidelity, TwoCheckRoundsChainMatchesDirect) {
  Rng rng(34);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 1 + trial % 2;
    const DimList phys = qubit_dims(n);
    StrategicCode code;
    code.encoder = random_channel(rng, {2}, phys);
    code.outcome_counts = {2, 2};
    code.rounds.push_back(random_instrument(rng, phys, phys, 2));
    std::vector<ChoiOperator> second;
    for (int h = 0; h < 2; ++h)
      for (auto& c : random_instrument(rng, phys, phys, 2)) second.push_back(c);
    code.rounds.push_back(second);
    for (int t = 0; t < 4; ++t) code.decoders.push_back(random_channel(rng, phys, {2}));
    ASSERT_TRUE(validate(code).passed());
    const auto noise = random_noise(rng, n, 3);
    const CMatrix rho = rng.density(2);
    const ChainObjective chain(noise, rho);
    const double f = fidelity_direct(code, noise, rho).fidelity;
    EXPECT_NEAR(chain.fidelity(code), f, 1e-10);
    for (int r = 0; r < 2; ++r) {
      const auto cc = chain.check_coefficients(code, r);
      double acc = 0;
      for (std::size_t e = 0; e < cc.size(); ++e) acc += (code.rounds[r][e].matrix * cc[e]).trace().real();
      EXPECT_NEAR(acc, f, 1e-10);
    }
    EXPECT_NEAR((code.encoder.matrix * chain.encoder_coefficient(code)).trace().real(), f, 1e-10);
    EXPECT_THROW(fidelity_factorized(code, precompute_tensors(noise, rho)), DimensionError);
  }
}

TEST(Fidelity, LinearInEachBlock) {
  Rng rng(35);
  const auto a = random_code(rng, 2, 1);
  const auto b = random_code(rng, 2, 1);
  const auto noise = random_noise(rng, 2, 2);
  const CMatrix rho = maximally_mixed(2);
  for (double alpha : {0.0, 0.3, 1.0}) {
    auto mix = a;
    mix.decoders[0].matrix = alpha * a.decoders[0].matrix + (1 - alpha) * b.decoders[0].matrix;
    auto other = a;
    other.decoders[0] = b.decoders[0];
    const double want =
        alpha * fidelity_direct(a, noise, rho).fidelity + (1 - alpha) * fidelity_direct(other, noise, rho).fidelity;
    EXPECT_NEAR(fidelity_direct(mix, noise, rho).fidelity, want, 1e-10);

    auto mixc = a;
    mixc.rounds[0][0].matrix = alpha * a.checks()[0].matrix + (1 - alpha) * b.checks()[0].matrix;
    auto otherc = a;
    otherc.rounds[0][0] = b.checks()[0];
    const double wantc =
        alpha * fidelity_direct(a, noise, rho).fidelity + (1 - alpha) * fidelity_direct(otherc, noise, rho).fidelity;
    EXPECT_NEAR(fidelity_direct(mixc, noise, rho).fidelity, wantc, 1e-10);
  }
}

TEST(Fidelity, DimensionMismatch) {
  const auto code = protocol_2qubit();
  EXPECT_THROW(fidelity_direct(code, local_k_noise(3, 1, 0.1), maximally_mixed(2)), DimensionError);
  EXPECT_THROW(fidelity_direct(code, local_k_noise(2, 1, 0.1, 3), maximally_mixed(2)), DimensionError);
}
