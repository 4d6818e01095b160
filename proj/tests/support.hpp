#pragma once

// Random instances shared by the test binaries.

#include "adqec/code_model.hpp"
#include "adqec/noise.hpp"
#include "adqec/random.hpp"

namespace adqec::testing {

/// Instrument d_in -> d_out with m outcomes, each outcome `rank` Kraus operators.
inline std::vector<ChoiOperator> random_instrument(Rng& rng, const DimList& in, const DimList& out, int m,
                                                   Index rank = 2) {
  const Index di = dim_product(in), dout = dim_product(out);
  const auto kraus = rng.channel_kraus(di, dout, rank * m);
  std::vector<ChoiOperator> elems;
  for (int k = 0; k < m; ++k) {
    std::vector<CMatrix> part(kraus.begin() + k * rank, kraus.begin() + (k + 1) * rank);
    elems.push_back(choi_from_kraus(part, in, out));
  }
  return elems;
}

inline ChoiOperator random_channel(Rng& rng, const DimList& in, const DimList& out, Index rank = 2) {
  return random_instrument(rng, in, out, 1, rank)[0];
}

/// Random single-check code: logical qubit, n physical qubits, m outcomes.
inline StrategicCode random_code(Rng& rng, int n, int m) {
  const DimList phys = qubit_dims(n);
  auto enc = random_channel(rng, {2}, phys, 2);
  auto checks = random_instrument(rng, phys, phys, m, 2);
  std::vector<ChoiOperator> decs;
  for (int k = 0; k < m; ++k) decs.push_back(random_channel(rng, phys, {2}, 2));
  return StrategicCode::single_check(std::move(enc), std::move(checks), std::move(decs));
}

/// Random multi-branch noise with the given number of rounds.
inline NoiseProcess random_noise(Rng& rng, int n, int rounds, int branches = 2) {
  const Index d = Index{1} << n;
  const auto w = rng.simplex(static_cast<std::size_t>(branches));
  std::vector<NoiseBranch> out;
  for (int b = 0; b < branches; ++b) {
    NoiseBranch br;
    br.weight = w[b];
    for (int r = 0; r < rounds; ++r) br.rounds.push_back(rng.channel_kraus(d, d, 1 + (b + r) % 3));
    out.push_back(std::move(br));
  }
  return NoiseProcess(n, std::move(out));
}

}  // namespace adqec::testing
