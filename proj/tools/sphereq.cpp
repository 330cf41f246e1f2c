// Command-line driver: solve/verify spherical and constrained equations,
// run the instance transformations, evaluate hash families, and reproduce
// the statistical experiments. Exit codes: 0 positive/success, 1 negative/
// unsolvable, 2 unknown/budget, >2 error.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sphereq/experiments.hpp"
#include "sphereq/sphereq.hpp"

namespace {

using namespace sphereq;

constexpr int kExitSolvable = 0;
constexpr int kExitUnsolvable = 1;
constexpr int kExitUnknown = 2;
constexpr int kExitError = 3;

struct Global {
  std::uint64_t seed = 0;
  std::uint64_t budget = 1u << 22;
  std::string format = "text";  // text | csv
};

// Key/value report writer. Reports go to stdout and are a pure function of
// (command, flags, seed); wall-clock timing goes to stderr so identical runs
// stay byte-identical.
class Report {
 public:
  Report(const Global& global, std::string command) : csv_(global.format == "csv") {
    kv("command", std::move(command));
    kv("seed", std::to_string(global.seed));
  }

  void kv(const std::string& key, const std::string& value) {
    lines_.push_back(csv_ ? key + "," + value : key + ": " + value);
  }

  void kv(const std::string& key, std::uint64_t value) { kv(key, std::to_string(value)); }

  void kv(const std::string& key, double value) {
    std::ostringstream out;
    out << value;
    kv(key, out.str());
  }

  /// Raw line (witness bodies, table rows).
  void raw(const std::string& line) { lines_.push_back(line); }

  void witness(const Assignment& a) {
    kv("witness", std::to_string(a.values.size()) + " values");
    for (const auto& z : a.values) raw(csv_ ? "z," + to_string(z) : "z " + to_string(z));
  }

  void flush() const {
    for (const auto& line : lines_) std::cout << line << "\n";
  }

  bool csv() const { return csv_; }

 private:
  bool csv_;
  std::vector<std::string> lines_;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << text;
}

int status_exit(Status s) {
  switch (s) {
    case Status::Solvable: return kExitSolvable;
    case Status::Unsolvable: return kExitUnsolvable;
    case Status::Unknown: return kExitUnknown;
  }
  return kExitError;
}

CiseInstance as_cise(const ParsedInstance& inst) {
  if (const auto* sph = std::get_if<SphericalInstance>(&inst)) return unconstrained(*sph);
  if (const auto* cise = std::get_if<CiseInstance>(&inst)) return *cise;
  throw WrongVariant("expected a spherical or cise instance file");
}

bool all_free(const CiseInstance& inst) {
  return std::all_of(inst.constraints.begin(), inst.constraints.end(), [](const auto& c) {
    return c.kind() == VariableConstraint::Kind::Free;
  });
}

// ---------------------------------------------------------------------------

int run_solve(const Global& global, const std::string& path, const std::string& mode,
              const std::string& witness_out) {
  const CiseInstance inst = as_cise(parse_instance(read_file(path)));

  SolveReport rep;
  if (mode == "generic") {
    if (!all_free(inst)) throw WrongVariant("the closed-form solver ignores constraints");
    rep = solve_generic(inst.base);
  } else if (mode == "brute") {
    rep = solve_bruteforce(inst, global.budget);
  } else {  // auto
    rep = all_free(inst) ? solve_auto(inst.base, global.budget)
                         : solve_bruteforce(inst, global.budget);
  }

  Report report(global, "solve");
  report.kv("instance", path);
  report.kv("mode", mode);
  report.kv("status", to_string(rep.status));
  report.kv("method", rep.method);
  if (!rep.note.empty()) report.kv("note", rep.note);
  if (rep.witness) {
    if (!verify(inst, *rep.witness)) throw std::logic_error("witness failed re-verification");
    report.witness(*rep.witness);
    if (!witness_out.empty())
      write_file(witness_out, serialize_witness(inst.base.params, *rep.witness));
  }
  report.flush();
  return status_exit(rep.status);
}

int run_verify(const Global& global, const std::string& path, const std::string& witness_path) {
  const ParsedInstance parsed = parse_instance(read_file(path));
  const auto [params, assignment] = parse_witness(read_file(witness_path));

  bool ok = false;
  if (const auto* sph = std::get_if<SphericalInstance>(&parsed)) {
    if (sph->params != params) throw ParamMismatch("witness parameters do not match the instance");
    ok = verify(*sph, assignment);
  } else if (const auto* cise = std::get_if<CiseInstance>(&parsed)) {
    if (cise->base.params != params)
      throw ParamMismatch("witness parameters do not match the instance");
    ok = verify(*cise, assignment);
  } else {
    throw WrongVariant("expected a spherical or cise instance file");
  }

  Report report(global, "verify");
  report.kv("instance", path);
  report.kv("witness_file", witness_path);
  report.kv("status", ok ? "valid" : "invalid");
  report.flush();
  return ok ? kExitSolvable : kExitUnsolvable;
}

/// Shared tail for commands whose payload is a new instance file: with -o the
/// file is written and a report emitted; without, the raw file text goes to
/// stdout so the command can be piped.
int emit_instance(const Global& global, const std::string& command, const std::string& text,
                  const std::string& out_path, Report* report) {
  if (out_path.empty()) {
    std::cout << text;
    return kExitSolvable;
  }
  write_file(out_path, text);
  if (report) {
    report->kv("output", out_path);
    report->flush();
  } else {
    Report rep(global, command);
    rep.kv("output", out_path);
    rep.flush();
  }
  return kExitSolvable;
}

int run_reduce(const Global& global, const std::string& sub, const std::string& path,
               const std::string& out_path, std::size_t index) {
  const ParsedInstance parsed = parse_instance(read_file(path));

  if (sub == "ssp-to-sph") {
    const auto* ssp = std::get_if<SspInstance>(&parsed);
    if (!ssp) throw WrongVariant("expected an ssp instance file");
    const SspReduction red = ssp_to_spherical(*ssp);
    Report report(global, "reduce ssp-to-sph");
    report.kv("equivalence_exact", red.equivalence_exact ? "true" : "false");
    return emit_instance(global, "reduce ssp-to-sph", serialize(red.instance), out_path, &report);
  }
  if (sub == "isis-to-cise") {
    const auto* isis = std::get_if<IsisInstance>(&parsed);
    if (!isis) throw WrongVariant("expected an isis instance file");
    const IsisCiseReduction red = isis_to_cise(*isis);
    return emit_instance(global, "reduce isis-to-cise", serialize(red.cise), out_path, nullptr);
  }
  if (sub == "sis-to-cise123") {
    const auto* sis = std::get_if<SisInstance>(&parsed);
    if (!sis) throw WrongVariant("expected a sis instance file");
    const SisCiseReduction red = sis_to_cise123(*sis);
    return emit_instance(global, "reduce sis-to-cise123", serialize(red.cise), out_path, nullptr);
  }
  if (sub == "guess-index") {
    const auto* sis = std::get_if<SisInstance>(&parsed);
    if (!sis) throw WrongVariant("expected a sis instance file");
    const GuessReduction red = isis_from_sis_guess(*sis, index);
    Report report(global, "reduce guess-index");
    report.kv("guessed_index", static_cast<std::uint64_t>(red.guessed_index));
    return emit_instance(global, "reduce guess-index", serialize(red.instance), out_path, &report);
  }
  if (sub == "cise-to-agwp") {
    const CiseInstance cise = as_cise(parsed);
    const AgwpInstance agwp = cise_to_agwp(cise, global.budget);
    return emit_instance(global, "reduce cise-to-agwp", serialize(agwp), out_path, nullptr);
  }
  throw Error("unknown reduction '" + sub + "'");
}

int run_agwp_solve(const Global& global, const std::string& path) {
  const ParsedInstance parsed = parse_instance(read_file(path));
  const auto* agwp = std::get_if<AgwpInstance>(&parsed);
  if (!agwp) throw WrongVariant("expected an agwp instance file");

  const AgwpReport rep = agwp_solve(*agwp, global.budget);
  Report report(global, "agwp-solve");
  report.kv("instance", path);
  report.kv("status", to_string(rep.status));
  if (!rep.note.empty()) report.kv("note", rep.note);
  if (rep.witness_edges) {
    GroupElement product = identity(agwp->params);
    std::string edges;
    for (std::size_t e : *rep.witness_edges) {
      product = multiply(product, agwp->edges[e].label);
      if (!edges.empty()) edges += ' ';
      edges += std::to_string(e);
    }
    if (product != identity(agwp->params))
      throw std::logic_error("witness path failed re-verification");
    report.kv("path_edges", edges.empty() ? "(empty)" : edges);
  }
  report.flush();
  return status_exit(rep.status);
}

// ---------------------------------------------------------------------------

Hash01Spec load_hash_spec(const std::string& path) {
  const ParsedInstance parsed = parse_instance(read_file(path));
  const auto* sph = std::get_if<SphericalInstance>(&parsed);
  if (!sph) throw WrongVariant("hash specs are spherical instance files");
  return make_hash01(sph->params, sph->coefficients);  // rhs is not part of the spec
}

int run_hash(const Global& global, const std::string& sub, const std::string& spec_path,
             const std::string& bits_text, const std::string& x_text, const std::string& y_text,
             const std::string& target_text, std::uint64_t p, std::uint64_t n, std::uint64_t m,
             const std::string& out_path) {
  if (sub == "sample") {
    const GroupParams params = make_params(p, static_cast<std::size_t>(n));
    RandomSource rng(global.seed);
    const Hash01Spec spec = sample_hash_family(params, static_cast<std::size_t>(m), rng);
    const SphericalInstance file =
        make_spherical(params, spec.coefficients, identity(params));
    return emit_instance(global, "hash sample", serialize(file), out_path, nullptr);
  }

  const Hash01Spec spec = load_hash_spec(spec_path);
  if (sub == "eval") {
    const GroupElement digest = eval_hash01(spec, parse_bits(bits_text));
    Report report(global, "hash eval");
    report.kv("bits", bits_text);
    report.kv("digest", to_string(digest));
    report.flush();
    return kExitSolvable;
  }
  if (sub == "jc") {
    const JcSpec table = jc_from_hash01(spec);
    const GroupElement digest = eval_jc(table, parse_bits(bits_text));
    Report report(global, "hash jc");
    report.kv("bits", bits_text);
    report.kv("digest", to_string(digest));
    report.flush();
    return kExitSolvable;
  }
  if (sub == "collide-to-cise") {
    const CollisionCise out = collision_to_cise(spec, parse_bits(x_text), parse_bits(y_text));
    Report report(global, "hash collide-to-cise");
    report.kv("x", x_text);
    report.kv("y", y_text);
    if (!verify(out.cise, out.witness)) throw std::logic_error("witness failed re-verification");
    report.witness(out.witness);
    return emit_instance(global, "hash collide-to-cise", serialize(out.cise), out_path, &report);
  }
  if (sub == "preimage-to-cise") {
    const GroupElement target = parse_element_text(target_text, spec.params);
    const CiseInstance out = preimage_to_cise(spec, target);
    return emit_instance(global, "hash preimage-to-cise", serialize(out), out_path, nullptr);
  }
  throw Error("unknown hash command '" + sub + "'");
}

// ---------------------------------------------------------------------------

void emit_stat_report(Report& report, const std::string& prefix, const StatReport& stat) {
  report.kv(prefix + "_trials", stat.trials);
  report.kv(prefix + "_successes", stat.successes);
  report.kv(prefix + "_estimate", stat.point_estimate);
  if (stat.exact_value) {
    report.kv(prefix + "_exact", *stat.exact_value);
    report.kv(prefix + "_band_low", stat.band_low);
    report.kv(prefix + "_band_high", stat.band_high);
    report.kv(prefix + "_within_band",
              stat.point_estimate >= stat.band_low && stat.point_estimate <= stat.band_high
                  ? "true"
                  : "false");
  }
}

bool stat_ok(const StatReport& stat) {
  if (!stat.exact_value) return true;
  return stat.point_estimate >= stat.band_low && stat.point_estimate <= stat.band_high;
}

int run_stats(const Global& global, const std::string& sub, std::uint64_t p, std::uint64_t n,
              std::uint64_t m, std::uint64_t s, std::uint64_t trials, std::uint64_t count,
              const std::string& x_text, const std::string& y_text, const std::string& preset,
              bool natural_log, const std::string& out_path) {
  if (sub == "params") {
    const ParamRegime regime = validate_params(static_cast<std::size_t>(n),
                                               static_cast<std::size_t>(m), p, natural_log);
    Report report(global, "stats params");
    report.kv("p", p);
    report.kv("n", n);
    report.kv("m", m);
    report.kv("log_base", natural_log ? "e" : "2");
    report.kv("lower", regime.lower);
    report.kv("upper", regime.upper);
    report.kv("valid", regime.valid ? "true" : "false");
    for (const auto& v : regime.violations) report.kv("violation", v);
    report.flush();
    return regime.valid ? kExitSolvable : kExitUnsolvable;
  }
  if (sub == "generic") {
    const RandomSource rng(global.seed);
    const GenericStats stats = generic_stats(s, trials, rng);
    Report report(global, "stats generic");
    report.kv("s", s);
    emit_stat_report(report, "m_large", stats.m_large);
    emit_stat_report(report, "beta_nontrivial", stats.beta_nontrivial);
    report.flush();
    return stat_ok(stats.m_large) && stat_ok(stats.beta_nontrivial) ? kExitSolvable
                                                                    : kExitUnsolvable;
  }
  if (sub == "uniformity") {
    const GroupParams params = make_params(p, static_cast<std::size_t>(n));
    const UniformityReport out =
        hash_uniformity(params, static_cast<std::size_t>(m), global.budget);
    Report report(global, "stats uniformity");
    report.kv("p", p);
    report.kv("n", n);
    report.kv("m", m);
    report.kv("average_tv", out.average_tv.get_str());
    report.kv("unconditional_uniform", out.unconditional_uniform ? "true" : "false");
    report.flush();
    return kExitSolvable;
  }
  if (sub == "universality") {
    const GroupParams params = make_params(p, static_cast<std::size_t>(n));
    const mpq_class value = universality_check(params, static_cast<std::size_t>(m),
                                               parse_bits(x_text), parse_bits(y_text),
                                               global.budget);
    Report report(global, "stats universality");
    report.kv("p", p);
    report.kv("n", n);
    report.kv("m", m);
    report.kv("x", x_text);
    report.kv("y", y_text);
    report.kv("value", value.get_str());
    report.flush();
    return kExitSolvable;
  }
  if (sub == "device") {
    const GroupParams params = make_params(p, static_cast<std::size_t>(n));
    RandomSource rng(global.seed);
    const Hash01Spec spec = sample_hash_family(params, static_cast<std::size_t>(m), rng);
    Report report(global, "stats device");
    report.kv("p", p);
    report.kv("n", n);
    report.kv("m", m);
    report.kv("count", count);
    for (std::uint64_t i = 0; i < count; ++i) {
      RandomSource sub_rng = rng.substream(i);
      const DeviceSample sample = hidden_function_device(spec, sub_rng);
      report.raw(report.csv() ? to_string(sample.bits) + "," + to_string(sample.value)
                              : "pair " + to_string(sample.bits) + " -> " +
                                    to_string(sample.value));
    }
    report.flush();
    return kExitSolvable;
  }
  if (sub == "random-cise") {
    const GroupParams params = make_params(p, static_cast<std::size_t>(n));
    const VariableConstraint::Kind kind = preset == "123" ? VariableConstraint::Kind::Preset123
                                                          : VariableConstraint::Kind::Preset12;
    const RandomSource rng(global.seed);
    if (count < 1) throw InvariantViolation("count must be at least 1");
    std::uint64_t solvable = 0, unknown = 0;
    std::optional<CiseInstance> last;
    for (std::uint64_t i = 0; i < count; ++i) {
      RandomSource sub_rng = rng.substream(i);
      last = random_cise(params, static_cast<std::size_t>(m), kind, sub_rng);
      const SolveReport rep = solve_bruteforce(*last, global.budget);
      if (rep.status == Status::Solvable) ++solvable;
      if (rep.status == Status::Unknown) ++unknown;
    }
    Report report(global, "stats random-cise");
    report.kv("p", p);
    report.kv("n", n);
    report.kv("m", m);
    report.kv("preset", preset);
    report.kv("count", count);
    report.kv("solvable", solvable);
    report.kv("unknown", unknown);
    report.kv("solvable_fraction",
              count ? static_cast<double>(solvable) / static_cast<double>(count) : 0.0);
    report.flush();
    if (!out_path.empty()) write_file(out_path, serialize(*last));
    return kExitSolvable;
  }
  throw Error("unknown stats command '" + sub + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spherical equations over Z_p^n x| Z_p^*: solvers, reductions, hashes, experiments"};
  app.require_subcommand(1);

  Global global;
  if (const char* env_seed = std::getenv("SPHEREQ_SEED"))
    global.seed = std::strtoull(env_seed, nullptr, 10);
  app.add_option("--seed", global.seed, "random seed (default: $SPHEREQ_SEED or 0)");
  app.add_option("--budget", global.budget, "work cap for exhaustive procedures");
  app.add_option("--format", global.format, "report format")
      ->check(CLI::IsMember({"text", "csv"}));

  // solve
  std::string solve_path, solve_mode = "auto", solve_witness_out;
  auto* solve_cmd = app.add_subcommand("solve", "decide a spherical/cise instance");
  solve_cmd->add_option("instance", solve_path, "instance file")->required();
  solve_cmd->add_option("--mode", solve_mode, "generic | brute | auto")
      ->check(CLI::IsMember({"generic", "brute", "auto"}));
  solve_cmd->add_option("--witness-out", solve_witness_out, "write the witness file here");

  // verify
  std::string verify_path, verify_witness;
  auto* verify_cmd = app.add_subcommand("verify", "check a witness against an instance");
  verify_cmd->add_option("instance", verify_path, "instance file")->required();
  verify_cmd->add_option("--witness", verify_witness, "witness file")->required();

  // reduce
  std::string reduce_sub, reduce_path, reduce_out;
  std::size_t reduce_index = 1;
  auto* reduce_cmd = app.add_subcommand("reduce", "transform an instance between problems");
  reduce_cmd
      ->add_option("kind", reduce_sub,
                   "ssp-to-sph | isis-to-cise | sis-to-cise123 | guess-index | cise-to-agwp")
      ->required()
      ->check(CLI::IsMember(
          {"ssp-to-sph", "isis-to-cise", "sis-to-cise123", "guess-index", "cise-to-agwp"}));
  reduce_cmd->add_option("instance", reduce_path, "instance file")->required();
  reduce_cmd->add_option("-o,--output", reduce_out, "write the reduced instance here");
  reduce_cmd->add_option("--index", reduce_index, "1-based column to guess (guess-index)");

  // agwp-solve
  std::string agwp_path;
  auto* agwp_cmd = app.add_subcommand("agwp-solve", "decide an acyclic-graph word problem");
  agwp_cmd->add_option("instance", agwp_path, "agwp instance file")->required();

  // hash
  std::string hash_sub, hash_spec, hash_bits, hash_x, hash_y, hash_target, hash_out;
  std::uint64_t hash_p = 3, hash_n = 1, hash_m = 1;
  auto* hash_cmd = app.add_subcommand("hash", "0/1-spherical hash family operations");
  hash_cmd->add_option("kind", hash_sub, "eval | jc | sample | collide-to-cise | preimage-to-cise")
      ->required()
      ->check(CLI::IsMember({"eval", "jc", "sample", "collide-to-cise", "preimage-to-cise"}));
  hash_cmd->add_option("--spec", hash_spec, "hash spec (spherical instance file)");
  hash_cmd->add_option("--bits", hash_bits, "message bits, e.g. 0110");
  hash_cmd->add_option("--x", hash_x, "first message (collide-to-cise)");
  hash_cmd->add_option("--y", hash_y, "second message (collide-to-cise)");
  hash_cmd->add_option("--target", hash_target, "target element, e.g. \"2 1\"");
  hash_cmd->add_option("--p", hash_p, "modulus (sample)");
  hash_cmd->add_option("--n", hash_n, "dimension (sample)");
  hash_cmd->add_option("--m", hash_m, "coefficient count (sample)");
  hash_cmd->add_option("-o,--output", hash_out, "write the produced file here");

  // stats
  std::string stats_sub, stats_x, stats_y, stats_preset = "12", stats_out;
  std::uint64_t stats_p = 3, stats_n = 1, stats_m = 1, stats_s = 8, stats_trials = 10000,
                stats_count = 1;
  bool stats_natural_log = false;
  auto* stats_cmd = app.add_subcommand("stats", "distribution experiments and exact checks");
  stats_cmd
      ->add_option("kind", stats_sub,
                   "params | generic | uniformity | universality | device | random-cise")
      ->required()
      ->check(CLI::IsMember(
          {"params", "generic", "uniformity", "universality", "device", "random-cise"}));
  stats_cmd->add_option("--p", stats_p, "modulus");
  stats_cmd->add_option("--n", stats_n, "dimension");
  stats_cmd->add_option("--m", stats_m, "coefficient count");
  stats_cmd->add_option("--s", stats_s, "stratification bound (generic)");
  stats_cmd->add_option("--trials", stats_trials, "sample count (generic)");
  stats_cmd->add_option("--count", stats_count, "draw count (device, random-cise)");
  stats_cmd->add_option("--x", stats_x, "first message (universality)");
  stats_cmd->add_option("--y", stats_y, "second message (universality)");
  stats_cmd->add_option("--preset", stats_preset, "candidate preset: 12 | 123")
      ->check(CLI::IsMember({"12", "123"}));
  stats_cmd->add_flag("--natural-log", stats_natural_log, "use ln instead of log2 (params)");
  stats_cmd->add_option("-o,--output", stats_out, "write the last drawn instance (random-cise)");

  // let --seed/--budget/--format appear after the subcommand too
  for (CLI::App* sub : app.get_subcommands(/*filter=*/nullptr)) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  const auto started = std::chrono::steady_clock::now();
  int code = kExitError;
  try {
    if (solve_cmd->parsed())
      code = run_solve(global, solve_path, solve_mode, solve_witness_out);
    else if (verify_cmd->parsed())
      code = run_verify(global, verify_path, verify_witness);
    else if (reduce_cmd->parsed())
      code = run_reduce(global, reduce_sub, reduce_path, reduce_out, reduce_index);
    else if (agwp_cmd->parsed())
      code = run_agwp_solve(global, agwp_path);
    else if (hash_cmd->parsed())
      code = run_hash(global, hash_sub, hash_spec, hash_bits, hash_x, hash_y, hash_target,
                      hash_p, hash_n, hash_m, hash_out);
    else if (stats_cmd->parsed())
      code = run_stats(global, stats_sub, stats_p, stats_n, stats_m, stats_s, stats_trials,
                       stats_count, stats_x, stats_y, stats_preset, stats_natural_log, stats_out);
  } catch (const BudgetExceeded& e) {
    std::cerr << "unknown: " << e.what() << "\n";
    code = kExitUnknown;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    code = kExitError;
  }

  const auto elapsed = std::chrono::duration_cast<std::chrono::microseconds>(
      std::chrono::steady_clock::now() - started);
  std::cerr << "time_ms: " << static_cast<double>(elapsed.count()) / 1000.0 << "\n";
  return code;
}
