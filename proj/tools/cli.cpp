#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include "adqec/code_io.hpp"
#include "adqec/fidelity.hpp"
#include "adqec/info_bounds.hpp"
#include "adqec/recovery.hpp"
#include "adqec/seesaw.hpp"

#ifndef ADQEC_VERSION
#define ADQEC_VERSION "0.0.0"
#endif

namespace adqec::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NoiseOpts {
  std::string model = "local";
  int k = 1;
  double gamma = 0.1;
};

void add_noise_opts(CLI::App* app, NoiseOpts& o) {
  app->add_option("--model", o.model, "Noise model: local, weight or flip")->capture_default_str();
  app->add_option("--k", o.k, "Damped qubits (local) or largest jump weight (weight)")->capture_default_str();
  app->add_option("--gamma", o.gamma, "Damping strength, or flip probability for the flip model")->capture_default_str();
}

json noise_json(const NoiseOpts& o, int n, int rounds) {
  return {{"model", o.model}, {"n", n}, {"k", o.k}, {"gamma", o.gamma}, {"rounds", rounds}};
}

int qubits_of(Index d) {
  int n = 0;
  while ((Index{1} << n) < d) ++n;
  if ((Index{1} << n) != d) throw DimensionError("physical dimension " + std::to_string(d) + " is not a qubit register");
  return n;
}

int default_jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string iso_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Outputs of one command, plus the manifest written next to them.
class Run {
 public:
  Run(std::string command, std::vector<std::string> args)
      : command_(std::move(command)), args_(std::move(args)), started_(iso_now()), t0_(std::chrono::steady_clock::now()) {}

  void input(const std::string& path) { inputs_.push_back(path); }
  void seed(std::uint64_t s) { seed_ = s; }

  void write(const std::string& path, const std::string& text) {
    for (const auto& in : inputs_)
      if (fs::exists(in) && fs::exists(path) && fs::equivalent(in, path))
        throw UsageError("refusing to overwrite input file " + in);
    if (const auto dir = fs::path(path).parent_path(); !dir.empty()) fs::create_directories(dir);
    save_text(path, text);
    outputs_.push_back(path);
  }

  void finish(const std::string& prefix) {
    json outs = json::array();
    for (const auto& p : outputs_) outs.push_back({{"path", p}, {"sha256", sha256_file(p)}});
    json inputs = json::array();
    for (const auto& p : inputs_) inputs.push_back({{"path", p}, {"sha256", sha256_file(p)}});
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
    const json m = {{"command", command_}, {"args", args_},     {"seed", seed_},   {"version", ADQEC_VERSION},
                    {"started", started_}, {"seconds", secs},   {"inputs", inputs}, {"outputs", outs}};
    const std::string path = prefix + ".manifest.json";
    if (const auto dir = fs::path(path).parent_path(); !dir.empty()) fs::create_directories(dir);
    save_text(path, m.dump(2));
  }

 private:
  std::string command_;
  std::vector<std::string> args_;
  std::string started_;
  std::chrono::steady_clock::time_point t0_;
  std::uint64_t seed_ = 0;
  std::vector<std::string> inputs_;
  std::vector<std::string> outputs_;
};

std::optional<StrategicCode> named_fixture(const std::string& name) {
  if (name == "protocol2") return protocol_2qubit();
  if (name == "protocol3") return protocol_3qubit(ThreeQubitReading::SignFlip);
  if (name == "protocol3-literal") return protocol_3qubit(ThreeQubitReading::Literal);
  if (name == "repetition") return repetition_syndrome_code(true);
  if (name == "repetition-measure") return repetition_syndrome_code(false);
  if (name == "trivial") return trivial_static_code().as_strategic();
  if (name == "leung") return StaticCode{leung_4qubit_encoder(), depolarizing_channel(qubit_dims(4), {2})}.as_strategic();
  if (name.rfind("identity", 0) == 0 && name.size() > 8) {
    const int n = std::stoi(name.substr(8));
    if (n < 1 || n > 6) throw UsageError("identity fixture needs 1 to 6 qubits");
    return identity_code(n);
  }
  return std::nullopt;
}

bool is_static_fixture(const std::string& name) { return name == "trivial" || name == "leung"; }

/// random, mixed, fixture:<name> or fixture:<path to code JSON>.
void apply_init(const std::string& spec, SeesawConfig& cfg, Run& run) {
  if (spec == "random") {
    cfg.init = InitStrategy::RandomIsometry;
  } else if (spec == "mixed") {
    cfg.init = InitStrategy::MaximallyMixedMarginal;
  } else if (spec.rfind("fixture:", 0) == 0) {
    const std::string what = spec.substr(8);
    cfg.init = InitStrategy::Fixture;
    if (auto f = named_fixture(what)) {
      cfg.fixture = std::move(*f);
    } else if (fs::exists(what)) {
      run.input(what);
      cfg.fixture = load_code(what).code;
    } else {
      throw UsageError("unknown fixture '" + what + "'");
    }
  } else {
    throw UsageError("--init must be random, mixed or fixture:<name|file>");
  }
}

struct SeesawOpts {
  int restarts = 5;
  int max_iters = 200;
  double rel_tol = 1e-7;
  std::uint64_t seed = 0;
  std::string init = "random";
  int jobs = default_jobs();
  bool timing = false;
  bool no_extrapolate = false;
};

void add_seesaw_opts(CLI::App* app, SeesawOpts& o) {
  app->add_option("--restarts", o.restarts, "Independent starts; the best is kept")->capture_default_str();
  app->add_option("--max-iters", o.max_iters, "Iteration cap per start")->capture_default_str();
  app->add_option("--rel-tol", o.rel_tol, "Relative gain that counts as no progress")->capture_default_str();
  app->add_option("--seed", o.seed, "Master seed")->capture_default_str();
  app->add_option("--init", o.init, "random, mixed, fixture:<name> or fixture:<file>")->capture_default_str();
  app->add_option("--jobs", o.jobs, "Worker threads (default: all cores)");
  app->add_flag("--timing", o.timing, "Record wall time in the CSV output");
  app->add_flag("--no-extrapolate", o.no_extrapolate, "Plain alternation without the extrapolated step");
}

SeesawConfig seesaw_config(const SeesawOpts& o, Run& run) {
  SeesawConfig c;
  c.restarts = o.restarts;
  c.max_iters = o.max_iters;
  c.rel_tol = o.rel_tol;
  c.seed = o.seed;
  c.extrapolate = !o.no_extrapolate;
  c.jobs = std::max(1, o.jobs);
  apply_init(o.init, c, run);
  run.seed(o.seed);
  return c;
}

std::string trace_csv(const SeesawTrace& t, bool timing) {
  std::ostringstream out;
  out << "iteration, block, objective, certified, slackness, sdp_iterations" << (timing ? ", seconds" : "") << '\n';
  if (!t.objectives.empty()) out << "0, start, " << std::setprecision(10) << std::fixed << t.objectives.front() << ", 0, nan, 0" << (timing ? ", 0.000" : "") << '\n';
  for (const auto& s : t.steps) {
    char slack[32];
    if (std::isnan(s.slackness))
      std::snprintf(slack, sizeof slack, "nan");
    else
      std::snprintf(slack, sizeof slack, "%.3e", s.slackness);
    char line[256];
    std::snprintf(line, sizeof line, "%d, %s, %.10f, %d, %s, %d", s.iteration, s.block.c_str(), s.objective,
                  s.certified ? 1 : 0, slack, s.sdp_iterations);
    out << line;
    if (timing) {
      std::snprintf(line, sizeof line, ", %.3f", s.seconds);
      out << line;
    }
    out << '\n';
  }
  return out.str();
}

json validation_json(const ValidationReport& r) {
  json entries = json::array();
  for (const auto& e : r.entries) entries.push_back({{"name", e.name}, {"min_eig", e.min_eig}, {"residual", e.residual}});
  return {{"passed", r.passed()}, {"tol", r.tol}, {"worst_residual", r.worst_residual()},
          {"worst_min_eig", r.worst_min_eig()}, {"entries", entries}};
}

json decoders_doc(const std::vector<ChoiOperator>& decs) { return json::parse(decoders_to_json(decs)); }

// ---------------------------------------------------------------------------------------

int cmd_sweep(const std::vector<std::string>& args, const NoiseOpts& noise, int n, int m, const std::string& gammas_spec,
              const SeesawOpts& so, const std::string& prefix, std::ostream& out, std::ostream& err) {
  Run run("sweep", args);
  SweepConfig cfg;
  cfg.model = parse_noise_model(noise.model);
  cfg.n = n;
  cfg.k = noise.k;
  cfg.m_count = m;
  cfg.seesaw = seesaw_config(so, run);
  cfg.timing = so.timing;
  const auto gammas = parse_gammas(gammas_spec);
  // parallel over sweep points first, over restarts when there is a single point
  const int jobs = std::max(1, so.jobs);
  cfg.jobs = std::min<int>(jobs, static_cast<int>(gammas.size()));
  cfg.seesaw.jobs = gammas.size() > 1 ? 1 : jobs;

  const auto table = sweep(gammas, cfg);
  std::ostringstream csv;
  table.write_csv(csv);
  run.write(prefix + ".csv", csv.str());

  Series opt{"optimized (m=" + std::to_string(m) + ")", {}, {}}, un{"unencoded", {}, {}},
      proto{"fixture protocol", {}, {}}, petz{"fixture + Petz decoder", {}, {}};
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& r : table.rows) {
    for (Series* s : {&opt, &un, &proto, &petz}) s->x.push_back(r.gamma);
    opt.y.push_back(r.error.empty() ? r.best_fidelity : nan);
    un.y.push_back(r.baseline_unencoded);
    proto.y.push_back(r.baseline_protocol.value_or(nan));
    petz.y.push_back(r.baseline_petz.value_or(nan));
  }
  std::vector<Series> series{opt, un};
  if (std::any_of(proto.y.begin(), proto.y.end(), [](double v) { return !std::isnan(v); })) series.push_back(proto);
  if (std::any_of(petz.y.begin(), petz.y.end(), [](double v) { return !std::isnan(v); })) series.push_back(petz);
  run.write(prefix + ".svg", svg_chart(series, "damping strength", "entanglement fidelity"));
  run.finish(prefix);

  out << csv.str();
  int code = kOk;
  for (const auto& r : table.rows)
    if (!r.error.empty()) {
      err << "gamma " << fixed6(r.gamma) << ": " << r.error << '\n';
      code = kSolver;
    }
  return code;
}

int cmd_optimize(const std::vector<std::string>& args, const NoiseOpts& noise, int n, int m, int rounds,
                 bool fixed_encoder, const SeesawOpts& so, const std::string& prefix, std::ostream& out) {
  Run run("optimize", args);
  SeesawConfig cfg = seesaw_config(so, run);
  cfg.fixed_encoder = fixed_encoder;
  if (rounds < 0 || rounds > 2) throw UsageError("--rounds must be 0, 1 or 2");
  if (fixed_encoder && rounds != 0) throw UsageError("--fixed-encoder applies to static codes (--rounds 0)");
  const auto model = parse_noise_model(noise.model);
  const auto process = make_noise(model, n, noise.k, noise.gamma, rounds + 1);

  std::string code_json;
  SeesawTrace trace;
  ValidationReport report;
  if (rounds == 0) {
    auto r = seesaw_static(process, n, cfg);
    code_json = to_json(r.code);
    report = validate(r.code);
    trace = std::move(r.trace);
  } else {
    auto r = rounds == 1 ? seesaw_single_check(process, n, m, cfg) : seesaw_general(process, n, {m, m}, cfg);
    code_json = to_json(r.code);
    report = validate(r.code);
    trace = std::move(r.trace);
  }
  run.write(prefix + ".json", code_json);
  run.write(prefix + ".trace.csv", trace_csv(trace, so.timing));
  run.finish(prefix);
  out << "fidelity " << fixed6(trace.final_objective()) << '\n';
  out << "iterations " << trace.iterations() << " (restart " << trace.restart << ")\n";
  out << "spread " << fixed6(trace.spread()) << '\n';
  out << "valid " << (report.passed() ? "yes" : "no") << " (worst residual " << report.worst_residual() << ")\n";
  return report.passed() ? kOk : kValidation;
}

int cmd_evaluate(const std::vector<std::string>& args, const std::string& path, const NoiseOpts& noise, bool force,
                 const std::string& prefix, std::ostream& out, std::ostream& err) {
  Run run("evaluate", args);
  run.input(path);
  const auto doc = load_code(path);
  const auto& code = doc.code;
  for (const auto& w : doc.warnings) err << "warning: " << w << '\n';
  const int n = qubits_of(code.physical_dim());
  const int rounds = code.check_rounds() + 1;
  const auto process = make_noise(parse_noise_model(noise.model), n, noise.k, noise.gamma, rounds);
  const auto report = validate(code);
  if (!report.passed() && !force) {
    err << "code fails validation (worst residual " << report.worst_residual() << ", worst min eigenvalue "
        << report.worst_min_eig() << "); use --force to evaluate anyway\n";
    return kValidation;
  }
  const CMatrix rho = maximally_mixed(code.logical_dim());
  const double direct = fidelity_direct(code, process, rho).fidelity;
  double other;
  std::string method;
  if (code.check_rounds() <= 1) {
    other = fidelity_factorized(code, precompute_tensors(process, rho)).fidelity;
    method = "factorized";
  } else {
    other = ChainObjective(process, rho).fidelity(code);
    method = "chain";
  }
  const json rep = {{"code", path},
                    {"kind", doc.is_static ? "static" : "strategic"},
                    {"noise", noise_json(noise, n, rounds)},
                    {"direct", direct},
                    {method, other},
                    {"difference", std::abs(direct - other)},
                    {"validation", validation_json(report)},
                    {"warnings", doc.warnings}};
  run.write(prefix + ".json", rep.dump(2));
  run.finish(prefix);
  char line[160];
  std::snprintf(line, sizeof line, "direct %.9f\n%s %.9f\ndifference %.3e\n", direct, method.c_str(), other,
                std::abs(direct - other));
  out << line;
  return kOk;
}

int cmd_petz(const std::vector<std::string>& args, const std::string& path, const NoiseOpts& noise, bool is_static,
             const std::string& gauge, const std::string& prefix, std::ostream& out) {
  Run run("petz", args);
  run.input(path);
  const auto doc = load_code(path);
  const auto& code = doc.code;
  const int n = qubits_of(code.physical_dim());
  const auto proj = CodespaceProjector::from_encoder(code.encoder);
  const CMatrix rho = maximally_mixed(code.logical_dim());
  if (gauge != "raw" && gauge != "diagonal") throw UsageError("--gauge must be raw or diagonal");

  RecoveryFamily fam;
  double fid = 0;
  int rounds;
  if (is_static) {
    if (code.check_rounds() != 0) throw UsageError("--static needs a code without checks");
    rounds = 1;
    const auto process = make_noise(parse_noise_model(noise.model), n, noise.k, noise.gamma, 1);
    fam = static_petz(proj, process.round_kraus(0), code.encoder.out_dims);
    fid = fidelity_direct(StaticCode{code.encoder, fam.decoders()[0]}, process, rho).fidelity;
  } else {
    rounds = code.check_rounds() + 1;
    const auto process = make_noise(parse_noise_model(noise.model), n, noise.k, noise.gamma, rounds);
    fam = temporal_petz(proj, Interrogator::from_code(code), process,
                        gauge == "raw" ? KrausGauge::Raw : KrausGauge::Diagonal);
    fid = fidelity_direct(with_decoders(code, fam), process, rho).fidelity;
  }
  const auto decs = fam.decoders();
  json rep = {{"code", path},
              {"kind", to_string(fam.kind)},
              {"noise", noise_json(noise, n, rounds)},
              {"fidelity", fid},
              {"completed", fam.completed},
              {"excess", fam.excess()}};
  if (decs[0].d_in() == decs[0].d_out()) {
    const auto id = identity_channel(decs[0].in_dims);
    double worst = 0;
    for (const auto& d : decs) worst = std::max(worst, frobenius_distance(d.matrix, id.matrix));
    rep["identity_distance"] = worst;
  }
  rep["decoders"] = decoders_doc(decs)["decoders"];
  run.write(prefix + ".json", rep.dump(2));
  run.finish(prefix);
  out << "fidelity " << fixed6(fid) << '\n';
  return kOk;
}

int cmd_checkkl(const std::vector<std::string>& args, const std::string& path, const NoiseOpts& noise,
                double threshold, const std::string& prefix, std::ostream& out) {
  Run run("checkkl", args);
  run.input(path);
  const auto code = load_code(path).code;
  const int n = qubits_of(code.physical_dim());
  const int rounds = code.check_rounds() + 1;
  const auto process = make_noise(parse_noise_model(noise.model), n, noise.k, noise.gamma, rounds);
  const auto kl = kl_check(CodespaceProjector::from_encoder(code.encoder), Interrogator::from_code(code), process,
                           threshold);
  const json rep = {{"code", path},
                    {"noise", noise_json(noise, n, rounds)},
                    {"correctable", kl.correctable},
                    {"offdiag_residual", kl.offdiag_residual},
                    {"diag_variance_residual", kl.diag_variance_residual},
                    {"threshold", kl.threshold},
                    {"outcomes", kl.lambda.size()}};
  run.write(prefix + ".json", rep.dump(2));
  run.finish(prefix);
  out << rep.dump(2) << '\n';
  return kOk;
}

json bound_json(const BoundReport& r) {
  return {{"epsilon", r.epsilon},   {"bound", r.bound},         {"achieved", r.achieved},
          {"vacuous", r.vacuous},   {"satisfied", r.satisfied}, {"decoder", to_string(r.source)}};
}

int cmd_bound(const std::vector<std::string>& args, const std::string& path, const std::string& seeds,
              const NoiseOpts& noise, const std::string& source_name, const std::string& prefix, std::ostream& out) {
  Run run("bound", args);
  const auto source = parse_decoder_source(source_name);
  json reports = json::array();
  bool all = true;
  out << BoundReport::csv_header() << '\n';
  auto record = [&](const BoundReport& r, json extra) {
    json j = bound_json(r);
    j.update(extra);
    reports.push_back(std::move(j));
    all = all && r.satisfied;
    out << r.csv_row() << '\n';
  };
  if (!seeds.empty()) {
    if (!path.empty()) throw UsageError("give either --code or --random-seeds");
    // seed ranges default to a unit step
    const std::string spec = std::count(seeds.begin(), seeds.end(), ':') == 1 ? seeds + ":1" : seeds;
    for (double s : parse_gammas(spec)) {
      if (s < 0 || s != std::floor(s)) throw UsageError("--random-seeds must list nonnegative integers");
      const auto inst = random_bound_instance(static_cast<std::uint64_t>(s));
      record(verify_theorem3(inst.proj, inst.checks, inst.noise, source), {{"seed", static_cast<std::uint64_t>(s)}});
    }
  } else {
    if (path.empty()) throw UsageError("bound needs --code or --random-seeds");
    run.input(path);
    const auto code = load_code(path).code;
    const int n = qubits_of(code.physical_dim());
    const int rounds = code.check_rounds() + 1;
    const auto process = make_noise(parse_noise_model(noise.model), n, noise.k, noise.gamma, rounds);
    record(verify_theorem3(CodespaceProjector::from_encoder(code.encoder), Interrogator::from_code(code), process, source),
           {{"code", path}, {"noise", noise_json(noise, n, rounds)}});
  }
  const json rep = {{"reports", reports}, {"all_satisfied", all}};
  run.write(prefix + ".json", rep.dump(2));
  run.finish(prefix);
  return kOk;
}

int cmd_fixture(const std::vector<std::string>& args, const std::string& name, const std::string& prefix,
                std::ostream& out) {
  Run run("fixture", args);
  const auto f = named_fixture(name);
  if (!f) throw UsageError("unknown fixture '" + name + "'");
  const std::string text =
      is_static_fixture(name) ? to_json(StaticCode{f->encoder, f->decoders.at(0)}) : to_json(*f);
  run.write(prefix + ".json", text);
  run.finish(prefix);
  out << prefix << ".json\n";
  return kOk;
}

}  // namespace

std::vector<double> parse_gammas(const std::string& spec) {
  auto num = [&](const std::string& s) {
    std::size_t pos = 0;
    double v;
    try {
      v = std::stod(s, &pos);
    } catch (const std::exception&) {
      throw UsageError("bad number '" + s + "' in '" + spec + "'");
    }
    if (pos != s.size()) throw UsageError("bad number '" + s + "' in '" + spec + "'");
    return v;
  };
  std::vector<double> out;
  if (spec.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw UsageError("range must be start:stop:step");
    const double a = num(parts[0]), b = num(parts[1]), s = num(parts[2]);
    if (!(s > 0) || b < a) throw UsageError("range needs step > 0 and stop >= start");
    const long count = static_cast<long>(std::floor((b - a) / s + 1e-9)) + 1;
    if (count > 100000) throw UsageError("range has too many points");
    for (long i = 0; i < count; ++i) out.push_back(std::round((a + i * s) * 1e12) / 1e12);
  } else {
    std::stringstream ss(spec);
    for (std::string p; std::getline(ss, p, ',');) out.push_back(num(p));
  }
  if (out.empty()) throw UsageError("empty list '" + spec + "'");
  return out;
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read " + path);
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 14];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return hex.str();
}

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '&') out += "&amp;";
    else if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else out += c;
  }
  return out;
}

}  // namespace

std::string svg_chart(const std::vector<Series>& series, const std::string& x_label, const std::string& y_label) {
  constexpr double W = 800, H = 500, left = 70, right = 210, top = 30, bottom = 60;
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (std::isnan(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 - x0 < 1e-12) x0 -= 0.05, x1 += 0.05;
  if (y1 - y0 < 1e-12) y0 -= 0.05, y1 += 0.05;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  const double pw = W - left - right, ph = H - top - bottom;
  auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return top + (y1 - y) / (y1 - y0) * ph; };

  std::ostringstream o;
  o << std::fixed << std::setprecision(2);
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"500\" viewBox=\"0 0 800 500\">\n";
  o << "<rect width=\"800\" height=\"500\" fill=\"white\"/>\n";
  o << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = x0 + (x1 - x0) * i / 5, yv = y0 + (y1 - y0) * i / 5;
    o << "<line x1=\"" << px(xv) << "\" y1=\"" << top + ph << "\" x2=\"" << px(xv) << "\" y2=\"" << top + ph + 5
      << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << px(xv) << "\" y=\"" << top + ph + 20 << "\" font-size=\"12\" text-anchor=\"middle\">"
      << std::setprecision(3) << xv << std::setprecision(2) << "</text>\n";
    o << "<line x1=\"" << left - 5 << "\" y1=\"" << py(yv) << "\" x2=\"" << left << "\" y2=\"" << py(yv)
      << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << left - 8 << "\" y=\"" << py(yv) + 4 << "\" font-size=\"12\" text-anchor=\"end\">"
      << std::setprecision(4) << yv << std::setprecision(2) << "</text>\n";
  }
  o << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 15 << "\" font-size=\"14\" text-anchor=\"middle\">"
    << escape(x_label) << "</text>\n";
  o << "<text x=\"18\" y=\"" << top + ph / 2 << "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
    << top + ph / 2 << ")\">" << escape(y_label) << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* c = colors[k % 6];
    o << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"2\" points=\"";
    bool first = true;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (std::isnan(s.y[i])) continue;
      o << (first ? "" : " ") << px(s.x[i]) << "," << py(s.y[i]);
      first = false;
    }
    o << "\"/>\n";
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i)
      if (!std::isnan(s.y[i]))
        o << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i]) << "\" r=\"3\" fill=\"" << c << "\"/>\n";
    const double ly = top + 10 + 22 * static_cast<double>(k);
    o << "<line x1=\"" << W - right + 15 << "\" y1=\"" << ly << "\" x2=\"" << W - right + 40 << "\" y2=\"" << ly
      << "\" stroke=\"" << c << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << W - right + 46 << "\" y=\"" << ly + 4 << "\" font-size=\"12\">" << escape(s.name)
      << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Optimize and analyze dynamical quantum error-correcting codes"};
  app.require_subcommand(1);
  app.set_version_flag("--version", ADQEC_VERSION);

  NoiseOpts noise;
  SeesawOpts so;
  int n = 2, m = 1, rounds = 1;
  std::string gammas = "0:0.5:0.1", prefix, code_path, gauge = "raw", source = "sdp", seeds, fixture_name;
  bool force = false, is_static = false, fixed_encoder = false;
  double threshold = 1e-8;

  auto* sw = app.add_subcommand("sweep", "See-saw optimization over a range of damping strengths (CSV + SVG)");
  add_noise_opts(sw, noise);
  sw->add_option("--n", n, "Physical qubits")->capture_default_str();
  sw->add_option("--m", m, "Check outcomes")->capture_default_str();
  sw->add_option("--gammas", gammas, "start:stop:step (inclusive), a,b,c or one value")->capture_default_str();
  add_seesaw_opts(sw, so);
  sw->add_option("--out", prefix, "Output prefix")->default_str("sweep");

  auto* opt = app.add_subcommand("optimize", "See-saw optimization at one damping strength (code JSON + trace CSV)");
  add_noise_opts(opt, noise);
  opt->add_option("--n", n, "Physical qubits")->capture_default_str();
  opt->add_option("--m", m, "Outcomes per check round")->capture_default_str();
  opt->add_option("--rounds", rounds, "Check rounds: 0 (static), 1 or 2")->capture_default_str();
  opt->add_flag("--fixed-encoder", fixed_encoder, "Static only: optimize the decoder of a fixture encoder");
  add_seesaw_opts(opt, so);
  opt->add_option("--out", prefix, "Output prefix")->default_str("code");

  auto* ev = app.add_subcommand("evaluate", "Fidelity of a stored code by two independent routes");
  ev->add_option("--code", code_path, "Code JSON")->required();
  add_noise_opts(ev, noise);
  ev->add_flag("--force", force, "Evaluate even when validation fails");
  ev->add_option("--out", prefix, "Output prefix")->default_str("evaluate");

  auto* pz = app.add_subcommand("petz", "Petz-type decoders for a stored code");
  pz->add_option("--code", code_path, "Code JSON")->required();
  add_noise_opts(pz, noise);
  pz->add_flag("--static", is_static, "Static Petz map over one noise round");
  pz->add_option("--gauge", gauge, "Kraus gauge: raw or diagonal")->capture_default_str();
  pz->add_option("--out", prefix, "Output prefix")->default_str("petz");

  auto* kl = app.add_subcommand("checkkl", "Knill-Laflamme correctability of a stored code");
  kl->add_option("--code", code_path, "Code JSON")->required();
  add_noise_opts(kl, noise);
  kl->add_option("--threshold", threshold, "Residual threshold")->capture_default_str();
  kl->add_option("--out", prefix, "Output prefix")->default_str("checkkl");

  auto* bd = app.add_subcommand("bound", "Entropy-gap fidelity bound against an achieved decoder");
  bd->add_option("--code", code_path, "Code JSON");
  bd->add_option("--random-seeds", seeds, "Batch of random instances: a:b, a:b:step or a,b,c");
  add_noise_opts(bd, noise);
  bd->add_option("--decoder", source, "sdp or petz")->capture_default_str();
  bd->add_option("--out", prefix, "Output prefix")->default_str("bound");

  auto* fx = app.add_subcommand("fixture", "Write a built-in code as JSON");
  fx->add_option("--name", fixture_name,
                 "protocol2, protocol3, protocol3-literal, repetition, repetition-measure, trivial, leung, identity<N>")
      ->required();
  fx->add_option("--out", prefix, "Output prefix")->default_str("fixture");

  std::vector<std::string> argv_store{"qecopt"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  auto pick_prefix = [&](const char* fallback) { return prefix.empty() ? std::string(fallback) : prefix; };
  try {
    if (*sw) return cmd_sweep(args, noise, n, m, gammas, so, pick_prefix("sweep"), out, err);
    if (*opt) return cmd_optimize(args, noise, n, m, rounds, fixed_encoder, so, pick_prefix("code"), out);
    if (*ev) return cmd_evaluate(args, code_path, noise, force, pick_prefix("evaluate"), out, err);
    if (*pz) return cmd_petz(args, code_path, noise, is_static, gauge, pick_prefix("petz"), out);
    if (*kl) return cmd_checkkl(args, code_path, noise, threshold, pick_prefix("checkkl"), out);
    if (*bd) return cmd_bound(args, code_path, seeds, noise, source, pick_prefix("bound"), out);
    if (*fx) return cmd_fixture(args, fixture_name, pick_prefix("fixture"), out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const BudgetError& e) {
    err << "error: " << e.what() << '\n';
    return kBudget;
  } catch (const SolverError& e) {
    err << "solver error: " << e.what() << '\n';
    return kSolver;
  } catch (const FormatError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kValidation;
  } catch (const DimensionError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kValidation;
  } catch (const NumericalError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kValidation;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return kUsage;
}

}  // namespace adqec::cli
