#include "adqec/seesaw.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <thread>
#include <tuple>

#include "adqec/fidelity.hpp"
#include "adqec/random.hpp"
#include "adqec/recovery.hpp"

namespace adqec {

std::string to_string(InitStrategy s) {
  switch (s) {
    case InitStrategy::RandomIsometry: return "random_isometry";
    case InitStrategy::MaximallyMixedMarginal: return "maximally_mixed_marginal";
    case InitStrategy::Fixture: return "fixture";
  }
  return "unknown";
}

void SeesawConfig::check() const {
  if (max_iters < 1) throw std::invalid_argument("SeesawConfig: max_iters must be at least 1");
  if (!(rel_tol > 0)) throw std::invalid_argument("SeesawConfig: rel_tol must be positive");
  if (strikes < 1) throw std::invalid_argument("SeesawConfig: strikes must be at least 1");
  if (restarts < 1) throw std::invalid_argument("SeesawConfig: restarts must be at least 1");
  if (init == InitStrategy::Fixture && !fixture) throw std::invalid_argument("SeesawConfig: fixture init without a code");
}

bool SeesawTrace::all_monotone(double tol) const {
  if (!monotone(tol)) return false;
  return std::all_of(restart_worst_decrease.begin(), restart_worst_decrease.end(), [&](double d) { return d <= tol; });
}

double SeesawTrace::spread() const {
  if (restart_objectives.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(restart_objectives.begin(), restart_objectives.end());
  return *hi - *lo;
}

double SeesawTrace::worst_decrease() const {
  double worst = 0;
  double prev = objectives.empty() ? -std::numeric_limits<double>::infinity() : objectives.front();
  for (const auto& s : steps) {
    worst = std::max(worst, prev - s.objective);
    prev = s.objective;
  }
  for (std::size_t i = 1; i < objectives.size(); ++i) worst = std::max(worst, objectives[i - 1] - objectives[i]);
  return worst;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Runs fn(0..count-1) on up to `jobs` threads; exceptions are stored per index.
void parallel_for(int count, int jobs, const std::function<void(int)>& fn, std::vector<std::exception_ptr>& errors) {
  errors.assign(count, nullptr);
  auto guarded = [&](int i) {
    try {
      fn(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const int workers = std::max(1, std::min(jobs, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) guarded(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) guarded(i);
    });
  for (auto& t : pool) t.join();
}

// Coefficient oracle for one objective route.
struct Objective {
  std::function<double(const StrategicCode&)> fidelity;
  std::function<std::vector<CMatrix>(const StrategicCode&)> decoder;
  std::function<std::vector<CMatrix>(const StrategicCode&, int)> check;
  std::function<CMatrix(const StrategicCode&)> encoder;
};

Objective factorized_objective(PrecomputedTensors t) {
  auto shared = std::make_shared<PrecomputedTensors>(std::move(t));
  Objective o;
  o.fidelity = [shared](const StrategicCode& c) { return fidelity_factorized(c, *shared).fidelity; };
  o.decoder = [shared](const StrategicCode& c) {
    if (c.check_rounds() == 0) return std::vector<CMatrix>{static_decoder_coefficient(c.encoder, *shared)};
    return decoder_coefficients(c.encoder, c.checks(), *shared);
  };
  o.check = [shared](const StrategicCode& c, int) { return check_coefficients(c.encoder, c.decoders, *shared); };
  o.encoder = [shared](const StrategicCode& c) {
    if (c.check_rounds() == 0) return static_encoder_coefficient(c.decoders[0], *shared);
    return encoder_coefficient(c.checks(), c.decoders, *shared);
  };
  return o;
}

Objective chain_objective(const NoiseProcess& noise, const CMatrix& rho) {
  auto shared = std::make_shared<ChainObjective>(noise, rho);
  Objective o;
  o.fidelity = [shared](const StrategicCode& c) { return shared->fidelity(c); };
  o.decoder = [shared](const StrategicCode& c) { return shared->decoder_coefficients(c); };
  o.check = [shared](const StrategicCode& c, int r) { return shared->check_coefficients(c, r); };
  o.encoder = [shared](const StrategicCode& c) { return shared->encoder_coefficient(c); };
  return o;
}

// Instrument with m elements whose Kraus operators are blocks of a random isometry.
std::vector<ChoiOperator> random_split(Rng& rng, const DimList& dims, int m) {
  if (m == 1) return {identity_channel(dims)};
  const Index d = dim_product(dims);
  const CMatrix v = rng.isometry(d * m, d);
  std::vector<ChoiOperator> out;
  for (int k = 0; k < m; ++k) out.push_back(choi_from_kraus({CMatrix(v.block(k * d, 0, d, d))}, dims, dims));
  return out;
}

class Runner {
 public:
  Runner(const Objective& obj, const SeesawConfig& cfg) : obj_(obj), cfg_(cfg) {}

  SeesawRun run(StrategicCode code) {
    SeesawTrace trace;
    double current = obj_.fidelity(code);
    trace.objectives.push_back(current);
    int strikes = 0;
    double beta = 1.0;
    for (int it = 1; it <= cfg_.max_iters; ++it) {
      const double before = current;
      const StrategicCode prev = code;
      current = decoder_step(code, trace, it, current);
      for (int r = code.check_rounds() - 1; r >= 0; --r) current = check_step(code, trace, it, r, current);
      if (!cfg_.fixed_encoder) current = encoder_step(code, trace, it, current);
      if (cfg_.extrapolate && it > 1) current = extrapolate(prev, code, trace, it, current, beta);
      trace.objectives.push_back(current);

      // a perfect code cannot improve further
      if (current >= 1.0 - cfg_.rel_tol) {
        trace.converged = true;
        break;
      }
      const double gain = (current - before) / std::max(std::abs(before), 1e-12);
      strikes = gain < cfg_.rel_tol ? strikes + 1 : 0;
      if (strikes >= cfg_.strikes) {
        trace.converged = true;
        break;
      }
    }
    return {std::move(code), std::move(trace)};
  }

 private:
  // Tries code + beta (code - prev), pulled back onto the constraint set; beta adapts.
  double extrapolate(const StrategicCode& prev, StrategicCode& code, SeesawTrace& trace, int it, double current,
                     double& beta) {
    const auto t0 = Clock::now();
    auto value = [&](double b) -> std::pair<double, std::optional<StrategicCode>> {
      auto trial = extrapolated(prev, code, b);
      const double f = trial ? obj_.fidelity(*trial) : -1.0;
      return {f, std::move(trial)};
    };
    auto [best_f, best] = value(beta);
    double best_beta = beta;
    if (best_f > current) {
      // grow while it keeps improving
      for (double b = 2 * beta; b <= kMaxBeta; b *= 2) {
        auto [f, trial] = value(b);
        if (!(f > best_f)) break;
        best_f = f, best = std::move(trial), best_beta = b;
      }
    } else {
      for (double b = beta / 2; b >= kMinBeta && !(best_f > current); b /= 2) {
        std::tie(best_f, best) = value(b);
        best_beta = b;
      }
    }
    if (!(best_f > current)) {
      beta = kMinBeta;
      return current;
    }
    code = std::move(*best);
    beta = best_beta;
    trace.steps.push_back(
        {it, "extrapolate", best_f, false, std::numeric_limits<double>::quiet_NaN(), 0, seconds_since(t0)});
    return best_f;
  }

  std::optional<StrategicCode> extrapolated(const StrategicCode& prev, const StrategicCode& code, double beta) const {
    StrategicCode out = code;
    auto push = [beta](ChoiOperator& x, const ChoiOperator& old) {
      x.matrix = clip_psd(CMatrix(x.matrix + beta * (x.matrix - old.matrix)));
    };
    for (std::size_t j = 0; j < out.decoders.size(); ++j) {
      push(out.decoders[j], prev.decoders[j]);
      if (!retract({&out.decoders[j]})) return std::nullopt;
    }
    for (int r = 0; r < out.check_rounds(); ++r) {
      auto& elems = out.rounds[r];
      const int m = out.outcome_counts[r];
      for (std::size_t e = 0; e < elems.size(); ++e) push(elems[e], prev.rounds[r][e]);
      for (std::size_t h = 0; h < elems.size(); h += m) {
        std::vector<ChoiOperator*> group;
        for (int k = 0; k < m; ++k) group.push_back(&elems[h + k]);
        if (!retract(group)) return std::nullopt;
      }
    }
    if (!cfg_.fixed_encoder) {
      push(out.encoder, prev.encoder);
      if (!retract({&out.encoder})) return std::nullopt;
    }
    return out;
  }

  static CMatrix clip_psd(const CMatrix& x) {
    return herm_function(hermitize(x), [](double v) { return v > 0 ? v : 0.0; });
  }

  // Congruence by (sum_k Tr_out X_k)^{-1/2} (x) I makes the group an instrument again.
  static bool retract(const std::vector<ChoiOperator*>& group) {
    const Index di = group[0]->d_in(), dout = group[0]->d_out();
    CMatrix a = CMatrix::Zero(di, di);
    for (const auto* x : group) a += x->marginal();
    const auto eig = herm_eig(a);
    if (eig.values(0) < 1e-8) return false;
    const CMatrix c = kron_identity(inv_sqrt_psd(a, 0.0), dout);
    for (auto* x : group) x->matrix = hermitize(CMatrix(c * x->matrix * c.adjoint()));
    return true;
  }

  static constexpr double kMaxBeta = 1024.0;
  static constexpr double kMinBeta = 0.125;

  struct Outcome {
    std::vector<CMatrix> blocks;
    double objective;
    bool accepted;
  };

  Outcome solve_step(const SdpSubproblem& p, SeesawTrace& trace, int it, const std::string& name, double current) {
    const auto t0 = Clock::now();
    const auto sol = solve(p, cfg_.sdp);
    const double secs = seconds_since(t0);
    if (sol.status != SdpStatus::Optimal)
      throw SeesawFailure("see-saw " + name + " step at iteration " + std::to_string(it) + " ended with status " +
                              to_string(sol.status),
                          trace);
    bool certified = false;
    double slack = std::numeric_limits<double>::quiet_NaN();
    if (cfg_.certify && sol.dual) {
      const auto rep = certify_kkt(p, sol);
      certified = rep.passed();
      slack = rep.slackness;
    }
    // the current block is feasible, so a lower value only reflects solver tolerance
    const bool accept = sol.objective >= current;
    const double value = accept ? sol.objective : current;
    trace.steps.push_back({it, name, value, certified, slack, sol.iterations, secs});
    return {sol.blocks, value, accept};
  }

  double decoder_step(StrategicCode& code, SeesawTrace& trace, int it, double current) {
    const auto coeff = obj_.decoder(code);
    SdpSubproblem p;
    for (std::size_t j = 0; j < coeff.size(); ++j)
      p.blocks.push_back({coeff[j], code.decoders[j].in_dims, code.decoders[j].out_dims});
    p.constraint = ConstraintKind::PerBlockMarginal;
    const auto out = solve_step(p, trace, it, "decoder", current);
    if (out.accepted)
      for (std::size_t j = 0; j < coeff.size(); ++j) code.decoders[j].matrix = hermitize(out.blocks[j]);
    return out.objective;
  }

  double check_step(StrategicCode& code, SeesawTrace& trace, int it, int r, double current) {
    const auto coeff = obj_.check(code, r);
    auto& elems = code.rounds[r];
    const int m = code.outcome_counts[r];
    SdpSubproblem p;
    for (std::size_t e = 0; e < elems.size(); ++e) {
      p.blocks.push_back({coeff[e], elems[e].in_dims, elems[e].out_dims});
      p.groups.push_back(static_cast<int>(e) / m);
    }
    p.constraint = ConstraintKind::Grouped;
    const auto out = solve_step(p, trace, it, "check" + std::to_string(r), current);
    if (out.accepted)
      for (std::size_t e = 0; e < elems.size(); ++e) elems[e].matrix = hermitize(out.blocks[e]);
    return out.objective;
  }

  double encoder_step(StrategicCode& code, SeesawTrace& trace, int it, double current) {
    SdpSubproblem p;
    p.blocks.push_back({obj_.encoder(code), code.encoder.in_dims, code.encoder.out_dims});
    const auto out = solve_step(p, trace, it, "encoder", current);
    if (out.accepted) code.encoder.matrix = hermitize(out.blocks[0]);
    return out.objective;
  }

  const Objective& obj_;
  const SeesawConfig& cfg_;
};

void check_budget(int n, const SdpOptions& opts, bool checks) {
  const Index d = Index{1} << n;
  const Index need = std::max(checks ? d * d : Index{0}, 2 * d);
  if (need > opts.max_block)
    throw BudgetError("see-saw on " + std::to_string(n) + " qubits needs SDP blocks of dimension " +
                      std::to_string(need) + ", over the budget of " + std::to_string(opts.max_block));
}

CMatrix reference_state(const SeesawConfig& cfg) {
  const CMatrix rho = cfg.rho ? *cfg.rho : maximally_mixed(2);
  check_density(rho);
  return rho;
}

// Multi-start driver: restart i starts from initial_code with the i-th derived seed.
SeesawRun multistart(const Objective& obj, int n, const std::vector<int>& m_counts, const SeesawConfig& cfg) {
  cfg.check();
  std::vector<std::uint64_t> seeds;
  Rng master(cfg.seed);
  for (int i = 0; i < cfg.restarts; ++i) seeds.push_back(master.next_seed());
  // a fixture start is deterministic, so one run covers every restart
  const int count = cfg.init == InitStrategy::Fixture ? 1 : cfg.restarts;

  std::vector<std::optional<SeesawRun>> runs(count);
  std::vector<std::exception_ptr> errors;
  parallel_for(
      count, cfg.jobs,
      [&](int i) {
        StrategicCode start;
        if (cfg.init == InitStrategy::Fixture) {
          start = *cfg.fixture;
        } else {
          Rng rng(seeds[i]);
          start = initial_code(rng, n, m_counts, cfg.init);
        }
        Runner runner(obj, cfg);
        runs[i] = runner.run(std::move(start));
      },
      errors);
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  int best = 0;
  for (int i = 1; i < count; ++i)
    if (runs[i]->trace.final_objective() > runs[best]->trace.final_objective()) best = i;
  SeesawRun out = std::move(*runs[best]);
  out.trace.restart = best;
  for (int i = 0; i < count; ++i)
    out.trace.restart_objectives.push_back(i == best ? out.trace.final_objective() : runs[i]->trace.final_objective());
  out.trace.restart_iterations.clear();
  for (int i = 0; i < count; ++i)
    out.trace.restart_iterations.push_back(i == best ? out.trace.iterations() : runs[i]->trace.iterations());
  out.trace.restart_worst_decrease.clear();
  for (int i = 0; i < count; ++i)
    out.trace.restart_worst_decrease.push_back(i == best ? out.trace.worst_decrease() : runs[i]->trace.worst_decrease());
  return out;
}

void check_fixture(const SeesawConfig& cfg, int n, const std::vector<int>& m_counts) {
  if (cfg.init != InitStrategy::Fixture) return;
  const auto& f = *cfg.fixture;
  check_dims(f);
  if (f.physical_dim() != (Index{1} << n) || f.outcome_counts != m_counts)
    throw DimensionError("see-saw: fixture code does not match the requested qubits and outcome counts");
}

}  // namespace

StrategicCode initial_code(Rng& rng, int n, const std::vector<int>& m_counts, InitStrategy init) {
  const DimList phys = qubit_dims(n);
  const Index d = dim_product(phys);
  StrategicCode code;
  code.outcome_counts = m_counts;
  int histories = 1;
  switch (init) {
    case InitStrategy::RandomIsometry: {
      code.encoder = isometry_channel(rng.isometry(d, 2), {2}, phys);
      for (int m : m_counts) {
        std::vector<ChoiOperator> round;
        for (int h = 0; h < histories; ++h)
          for (auto& c : random_split(rng, phys, m)) round.push_back(std::move(c));
        code.rounds.push_back(std::move(round));
        histories *= m;
      }
      for (int t = 0; t < histories; ++t)
        code.decoders.push_back(choi_from_kraus(rng.channel_kraus(d, 2, d), phys, {2}));
      break;
    }
    case InitStrategy::MaximallyMixedMarginal: {
      code.encoder = depolarizing_channel({2}, phys);
      for (int m : m_counts) {
        ChoiOperator elem = depolarizing_channel(phys, phys);
        elem.matrix /= static_cast<double>(m);
        code.rounds.push_back(std::vector<ChoiOperator>(static_cast<std::size_t>(histories * m), elem));
        histories *= m;
      }
      code.decoders.assign(histories, depolarizing_channel(phys, {2}));
      break;
    }
    case InitStrategy::Fixture:
      throw std::invalid_argument("initial_code: fixture starts come from the config");
  }
  return code;
}

SeesawRun seesaw_single_check(const NoiseProcess& noise, int n, int m_count, const SeesawConfig& cfg) {
  if (n < 1) throw std::invalid_argument("seesaw_single_check: need at least one qubit");
  if (m_count < 1) throw std::invalid_argument("seesaw_single_check: need at least one outcome");
  if (noise.rounds() != 2) throw DimensionError("seesaw_single_check: noise must have two rounds");
  if (noise.dim() != (Index{1} << n)) throw DimensionError("seesaw_single_check: noise acts on the wrong qubits");
  check_budget(n, cfg.sdp, true);
  check_fixture(cfg, n, {m_count});
  const auto obj = factorized_objective(precompute_tensors(noise, reference_state(cfg)));
  return multistart(obj, n, {m_count}, cfg);
}

StaticSeesawRun seesaw_static(const NoiseProcess& noise, int n, const SeesawConfig& cfg) {
  if (n < 1) throw std::invalid_argument("seesaw_static: need at least one qubit");
  if (noise.rounds() != 1) throw DimensionError("seesaw_static: noise must have one round");
  if (noise.dim() != (Index{1} << n)) throw DimensionError("seesaw_static: noise acts on the wrong qubits");
  check_budget(n, cfg.sdp, false);
  check_fixture(cfg, n, {});
  if (cfg.fixed_encoder && cfg.init != InitStrategy::Fixture)
    throw std::invalid_argument("seesaw_static: a fixed encoder needs a fixture start");
  const auto obj = factorized_objective(precompute_tensors(noise, reference_state(cfg)));
  auto run = multistart(obj, n, {}, cfg);
  return {StaticCode{run.code.encoder, run.code.decoders[0]}, std::move(run.trace)};
}

StaticSeesawRun seesaw_static(const NoiseProcess& noise, const StaticCode& start, const SeesawConfig& cfg) {
  SeesawConfig c = cfg;
  c.init = InitStrategy::Fixture;
  c.fixture = start.as_strategic();
  int n = 0;
  while ((Index{1} << n) < start.encoder.d_out()) ++n;
  return seesaw_static(noise, n, c);
}

SeesawRun seesaw_general(const NoiseProcess& noise, int n, const std::vector<int>& m_counts, const SeesawConfig& cfg) {
  const int l = static_cast<int>(m_counts.size());
  if (l < 1 || l > 2) throw std::invalid_argument("seesaw_general: supports one or two check rounds");
  if (n < 1) throw std::invalid_argument("seesaw_general: need at least one qubit");
  for (int m : m_counts)
    if (m < 1) throw std::invalid_argument("seesaw_general: outcome counts must be positive");
  if (noise.rounds() != l + 1)
    throw DimensionError("seesaw_general: " + std::to_string(l) + " check rounds need " + std::to_string(l + 1) +
                         " noise rounds, got " + std::to_string(noise.rounds()));
  if (noise.dim() != (Index{1} << n)) throw DimensionError("seesaw_general: noise acts on the wrong qubits");
  check_budget(n, cfg.sdp, true);
  check_fixture(cfg, n, m_counts);
  const auto obj = chain_objective(noise, reference_state(cfg));
  return multistart(obj, n, m_counts, cfg);
}

std::string to_string(NoiseModel m) {
  switch (m) {
    case NoiseModel::Local: return "local";
    case NoiseModel::Weight: return "weight";
    case NoiseModel::Flip: return "flip";
  }
  return "?";
}

NoiseModel parse_noise_model(const std::string& s) {
  if (s == "local") return NoiseModel::Local;
  if (s == "weight") return NoiseModel::Weight;
  if (s == "flip") return NoiseModel::Flip;
  throw std::invalid_argument("unknown noise model '" + s + "' (expected local, weight or flip)");
}

NoiseProcess make_noise(NoiseModel model, int n, int k, double gamma, int rounds) {
  switch (model) {
    case NoiseModel::Local: return local_k_noise(n, k, gamma, rounds);
    case NoiseModel::Weight: return weight_k_noise(n, k, gamma, rounds);
    case NoiseModel::Flip: return single_flip_noise(n, gamma, rounds);
  }
  throw std::invalid_argument("make_noise: unknown model");
}

double unencoded_fidelity(double gamma) {
  const double a = (1 + std::sqrt(1 - gamma)) / 2;
  return a * a;
}

std::optional<StrategicCode> fixture_protocol(int n) {
  if (n == 2) return protocol_2qubit();
  if (n == 3) return protocol_3qubit(ThreeQubitReading::SignFlip);
  return std::nullopt;
}

const char* SweepTable::header() {
  return "gamma, model, n, k, m_count, restarts, best_fidelity, spread, baseline_unencoded, baseline_protocol, "
         "baseline_petz, iters_total, seconds";
}

namespace {

std::string fixed(double v, int digits = 6) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  // avoid printing -0.000000
  std::string s(buf);
  if (s.find_first_not_of("-0.") == std::string::npos && s[0] == '-') s.erase(0, 1);
  return s;
}

std::string fixed(const std::optional<double>& v) {
  return v ? fixed(*v) : "nan";
}

}  // namespace

void SweepTable::write_csv(std::ostream& out) const {
  out << header() << '\n';
  for (const auto& r : rows) {
    out << fixed(r.gamma) << ", " << r.model << ", " << r.n << ", " << r.k << ", " << r.m_count << ", "
        << r.restarts << ", " << fixed(r.best_fidelity) << ", " << fixed(r.spread) << ", "
        << fixed(r.baseline_unencoded) << ", " << fixed(r.baseline_protocol) << ", " << fixed(r.baseline_petz)
        << ", " << r.iters_total << ", " << fixed(r.seconds, 3) << '\n';
  }
}

SweepTable sweep(const std::vector<double>& gammas, const SweepConfig& cfg) {
  for (double g : gammas)
    if (!(g >= 0 && g <= 1)) throw std::invalid_argument("sweep: damping strengths must lie in [0, 1]");
  cfg.seesaw.check();
  check_budget(cfg.n, cfg.seesaw.sdp, true);

  SweepTable table;
  table.rows.resize(gammas.size());
  std::vector<std::exception_ptr> errors;
  parallel_for(
      static_cast<int>(gammas.size()), cfg.jobs,
      [&](int i) {
        const auto t0 = Clock::now();
        SweepRow& row = table.rows[i];
        row.gamma = gammas[i];
        row.model = to_string(cfg.model);
        row.n = cfg.n;
        row.k = cfg.k;
        row.m_count = cfg.m_count;
        row.restarts = cfg.seesaw.init == InitStrategy::Fixture ? 1 : cfg.seesaw.restarts;
        row.baseline_unencoded = unencoded_fidelity(row.gamma);
        const double nan = std::numeric_limits<double>::quiet_NaN();
        try {
          const auto noise = make_noise(cfg.model, cfg.n, cfg.k, row.gamma, 2);
          const CMatrix rho = reference_state(cfg.seesaw);
          if (const auto proto = fixture_protocol(cfg.n)) {
            row.baseline_protocol = fidelity_direct(*proto, noise, rho).fidelity;
            const auto petz = temporal_petz(CodespaceProjector::from_encoder(proto->encoder),
                                            Interrogator::from_code(*proto), noise);
            row.baseline_petz = fidelity_direct(with_decoders(*proto, petz), noise, rho).fidelity;
          }
          auto run = seesaw_single_check(noise, cfg.n, cfg.m_count, cfg.seesaw);
          row.best_fidelity = run.trace.final_objective();
          row.spread = run.trace.spread();
          for (int it : run.trace.restart_iterations) row.iters_total += it;
          row.monotone = run.trace.all_monotone();
          row.best_code = std::move(run.code);
        } catch (const std::exception& e) {
          row.error = e.what();
          row.best_fidelity = nan;
          row.spread = nan;
        }
        row.seconds = cfg.timing ? seconds_since(t0) : 0.0;
      },
      errors);
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return table;
}

}  // namespace adqec
