// ap-extremal: counting, search, certification and constructions from the command line.
//
// Exit codes: 0 success, 2 usage/parse/IO error, 3 bound or identity violation,
// 4 search or sweep budget exhausted, 5 certification failure.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "apx/analytic.hpp"
#include "apx/certify.hpp"
#include "apx/constructions.hpp"
#include "apx/counting.hpp"
#include "apx/search.hpp"
#include "apx/version.hpp"

namespace {

using namespace apx;
using nlohmann::ordered_json;

enum Exit { kOk = 0, kUsage = 2, kViolation = 3, kBudget = 4, kCertFailure = 5 };

struct Global {
  std::string format = "table";
  bool structured() const { return format == "structured"; }
};

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

unsigned default_jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << text)) throw std::runtime_error("cannot write '" + path + "'");
}

EquationSpec equation_from(const std::string& eq, const std::string& lambda) {
  if (eq == "ap") return EquationSpec::ap_sum();
  if (eq == "diff") return EquationSpec::ap_diff();
  if (eq == "sum") return EquationSpec::plain_sum();
  if (lambda.empty()) throw std::invalid_argument("--eq " + eq + " needs --lambda p/q");
  if (eq == "lambda") return EquationSpec::lambda_sum(Rational::parse(lambda));
  if (eq == "lambda-diff") return EquationSpec::lambda_diff(Rational::parse(lambda));
  throw std::invalid_argument("unknown equation '" + eq + "'");
}

const std::vector<std::string> kEquations = {"ap", "diff", "sum", "lambda", "lambda-diff"};

// ---------------------------------------------------------------------------
// count

struct CountArgs {
  std::string a, b, c, eq = "ap", lambda, method = "auto";
};

int run_count(const Global& g, const CountArgs& args) {
  const EquationSpec eq = equation_from(args.eq, args.lambda);
  const NumSet a = read_set_file(args.a);
  CountReport report;
  if (eq.kind() == EquationKind::ApDiff && args.b.empty() && args.c.empty()) {
    report = count_diff(a);
  } else {
    const NumSet b = args.b.empty() ? a : read_set_file(args.b);
    NumSet c;
    if (args.c == "union")
      c = set_union(a, b);
    else if (!args.c.empty())
      c = read_set_file(args.c);
    else
      c = eq.is_difference() ? a : set_union(a, b);
    const CountMethod method = args.method == "pairs"         ? CountMethod::Pairs
                               : args.method == "convolution" ? CountMethod::Convolution
                                                              : CountMethod::Auto;
    report = count_triples(a, b, c, eq, method);
  }
  std::cout << (g.structured() ? to_structured(report) : to_table(report));
  if (report.violated()) {
    std::cerr << "error: a closed-form bound is violated; this indicates an implementation bug\n";
    return kViolation;
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// search

struct SearchArgs {
  std::string objective = "max-diff", eq, lambda, checkpoint;
  int n = 0, span = 0;
  unsigned jobs = 0;
  bool resume = false, no_prune = false;
  std::size_t witness_cap = 64;
  std::uint64_t budget = UINT64_MAX;
};

int run_search(const Global& g, const SearchArgs& args) {
  const auto objective = parse_objective(args.objective);
  if (!objective) throw std::invalid_argument("unknown objective '" + args.objective + "'");
  SearchSpec spec;
  spec.objective = *objective;
  const std::string eq = args.eq.empty() ? (*objective == Objective::MaxTUnion ? "ap" : "diff") : args.eq;
  spec.eq = equation_from(eq, args.lambda);
  spec.n = args.n;
  spec.span = args.span > 0 ? args.span : SearchSpec::default_span(spec.objective, spec.n);
  spec.witness_cap = args.witness_cap;
  spec.prune = !args.no_prune;

  SearchOptions opts;
  opts.jobs = args.jobs ? args.jobs : default_jobs();
  opts.budget = args.budget;

  std::optional<SearchState> resume;
  if (args.resume) {
    if (args.checkpoint.empty()) throw std::invalid_argument("--resume needs --checkpoint FILE");
    resume = checkpoint_resume(args.checkpoint);
  }
  Timer timer;
  try {
    const SearchResult r = enumerate_max(spec, opts, resume ? &*resume : nullptr);
    if (!args.checkpoint.empty()) checkpoint_save(r.state, args.checkpoint);
    std::cout << (g.structured() ? search_result_to_structured(r) : search_result_to_table(r));
    std::cerr << "stats: units=" << r.units << " nodes=" << r.state.nodes << " seconds=" << timer.seconds() << "\n";
    return kOk;
  } catch (const BudgetExceeded& e) {
    const SearchState& s = e.state();
    if (!args.checkpoint.empty()) {
      checkpoint_save(s, args.checkpoint);
      std::cerr << "budget exhausted after " << s.completed.size() << " units; state saved to '" << args.checkpoint
                << "', rerun with --resume\n";
    } else {
      std::cerr << "budget exhausted after " << s.completed.size()
                << " units; pass --checkpoint FILE to keep the partial state\n";
    }
    return kBudget;
  }
}

// ---------------------------------------------------------------------------
// verify

struct VerifyArgs {
  std::string target, tol = "1/1000000000", threshold, certificate, replay;
  std::uint64_t budget = 50'000'000;
  unsigned jobs = 0;
  std::uint64_t trials = 100000, seed = 20240607;
  int size_cap = -1, span = -1, n_max = -1;
};

std::vector<std::string> rational_row(const std::vector<Rational>& xs) {
  std::vector<std::string> out;
  for (const auto& x : xs) out.push_back(x.str());
  return out;
}

std::string join(const std::vector<std::string>& xs) {
  std::string out = "(";
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ", " : "") + xs[i];
  return out + ")";
}

int emit_certificate(const Global& g, const CertifyResult& r, const std::string& name) {
  const Certificate& c = r.certificate;
  const auto best = r.best_witness();
  const char* status = r.status == CertStatus::Certified        ? "certified"
                       : r.status == CertStatus::BudgetExhausted ? "budget-exhausted"
                                                                 : "unresolved";
  if (g.structured()) {
    ordered_json j;
    j["target"] = name;
    j["status"] = status;
    j["threshold"] = c.threshold.str();
    j["tol"] = c.tol.str();
    if (r.ok()) {
      j["max_bound"] = c.max_bound.str();
      j["leaves"] = c.leaves.size();
      j["near_maximal"] = c.stats.near_maximal;
    }
    if (best) j["witness"] = {{"point", rational_row(best->point)}, {"value", best->value.str()}};
    auto boxes = ordered_json::array();
    for (const auto& b : r.surviving) {
      auto row = ordered_json::array();
      for (const auto& d : b.dims) row.push_back(d.str());
      boxes.push_back(std::move(row));
    }
    if (!r.ok()) j["surviving"] = std::move(boxes);
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "target      " << name << "\n";
    std::cout << "status      " << status << "\n";
    std::cout << "threshold   " << c.threshold.str() << " + " << c.tol.str() << "\n";
    if (r.ok()) {
      std::cout << "max bound   " << c.max_bound.str() << " (" << c.max_bound.to_double() << ")\n";
      std::cout << "leaves      " << c.leaves.size() << " (" << c.stats.near_maximal << " near-maximal)\n";
    }
    if (best) std::cout << "witness     " << join(rational_row(best->point)) << " -> " << best->value.str() << "\n";
    for (const auto& b : r.surviving) {
      std::cout << "surviving  ";
      for (const auto& d : b.dims) std::cout << " " << d.str();
      std::cout << "\n";
    }
  }
  return r.ok() ? kOk : kCertFailure;
}

int run_replay(const Global& g, const std::string& path) {
  const Certificate c = certificate_from_json(slurp(path));
  Timer timer;
  const ReplayReport rep = replay_certificate(c);
  if (g.structured()) {
    ordered_json j;
    j["target"] = target_name(c.target);
    j["replay"] = rep.ok ? "ok" : "failed";
    j["leaves_checked"] = rep.leaves_checked;
    j["max_bound"] = rep.max_bound.str();
    j["message"] = rep.message;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "target      " << target_name(c.target) << "\n";
    std::cout << "replay      " << (rep.ok ? "ok" : "FAILED") << "\n";
    std::cout << "leaves      " << rep.leaves_checked << "\n";
    std::cout << "max bound   " << rep.max_bound.str() << "\n";
    if (!rep.message.empty()) std::cout << "message     " << rep.message << "\n";
  }
  std::cerr << "stats: replay seconds=" << timer.seconds() << "\n";
  return rep.ok ? kOk : kCertFailure;
}

int emit_identity(const Global& g, const IdentityReport& r) {
  if (g.structured()) {
    ordered_json j;
    j["name"] = r.name;
    j["trials"] = r.trials;
    j["failures"] = r.failures;
    j["failing"] = r.failing;
    j["probe_trials"] = r.probe_trials;
    j["probe_mismatches"] = r.probe_mismatches;
    if (!r.note.empty()) j["note"] = r.note;
    j["ok"] = r.ok();
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "check       " << r.name << "\n";
    std::cout << "trials      " << r.trials << "\n";
    std::cout << "failures    " << r.failures << "\n";
    for (const auto& f : r.failing) std::cout << "  " << f << "\n";
    if (r.probe_trials)
      std::cout << "probe       " << r.probe_mismatches << " of " << r.probe_trials << " outside the domain differ\n";
    if (!r.note.empty()) std::cout << "note        " << r.note << "\n";
    std::cout << "result      " << (r.ok() ? "ok" : "FAILED") << "\n";
  }
  return r.ok() ? kOk : kViolation;
}

int emit_critical(const Global& g) {
  const auto points = critical_point_report();
  bool ok = true;
  ordered_json arr = ordered_json::array();
  for (const auto& p : points) {
    ok = ok && p.on_line;
    if (g.structured())
      arr.push_back({{"function", p.function}, {"x0", p.x0.str()}, {"x1", p.x1.str()}, {"line", p.line},
                     {"on_line", p.on_line}});
    else
      std::cout << p.function << "  critical point (" << p.x0.str() << ", " << p.x1.str() << ")  " << p.line << ": "
                << (p.on_line ? "on line" : "NOT on line") << "\n";
  }
  if (g.structured()) std::cout << ordered_json{{"critical_points", arr}, {"ok", ok}}.dump(2) << "\n";
  return ok ? kOk : kViolation;
}

int emit_sweep(const Global& g, const SweepReport& r) {
  std::cout << (g.structured() ? sweep_to_structured(r) : sweep_to_table(r));
  if (!r.complete) return kBudget;
  return r.violations ? kViolation : kOk;
}

int run_verify(const Global& g, const VerifyArgs& args) {
  if (!args.replay.empty()) return run_replay(g, args.replay);
  if (args.target.empty()) throw std::invalid_argument("verify needs --target or --replay");
  const unsigned jobs = args.jobs ? args.jobs : default_jobs();
  const auto pick = [](int v, int fallback) { return v >= 0 ? v : fallback; };
  SweepOptions so{jobs, args.budget};
  Timer timer;
  int code = kOk;
  if (const auto target = parse_cert_target(args.target)) {
    CertifyOptions opts;
    opts.tol = Rational::parse(args.tol);
    if (opts.tol.sign() <= 0) throw std::invalid_argument("--tol must be positive");
    if (!args.threshold.empty()) opts.threshold = Rational::parse(args.threshold);
    opts.budget = args.budget;
    opts.jobs = jobs;
    const CertifyResult r = certify_sup(*target, opts);
    code = emit_certificate(g, r, args.target);
    if (r.ok() && !args.certificate.empty()) write_file(args.certificate, certificate_to_json(r.certificate));
    std::cerr << "stats: nodes=" << r.nodes << " leaves=" << r.certificate.stats.leaves
              << " frame=" << r.certificate.stats.frame_leaves << " centered=" << r.certificate.stats.centered_leaves
              << " tangent=" << r.certificate.stats.tangent_leaves << " max_depth=" << r.certificate.stats.max_depth;
  } else if (args.target == "balancing") {
    code = emit_identity(g, verify_balancing_identity(args.trials, args.seed));
  } else if (args.target == "xy-lemma") {
    code = emit_identity(g, verify_xy_lemma(args.trials, args.seed));
  } else if (args.target == "decomposition") {
    code = emit_identity(g, verify_decomposition(args.trials, args.seed));
  } else if (args.target == "critical-points") {
    code = emit_critical(g);
  } else if (args.target == "main-scan") {
    code = emit_sweep(g, verify_main_sweep(pick(args.n_max, 7), pick(args.span, 10), so));
  } else if (args.target == "principal-scan") {
    code = emit_sweep(g, verify_principal_sweep(pick(args.n_max, 5), pick(args.span, 6), so));
  } else if (args.target == "leqfis-scan") {
    code = emit_sweep(g, leqfis_scan(pick(args.size_cap, 5), pick(args.span, 8), so));
  } else if (args.target == "recast-scan") {
    code = emit_sweep(g, recast_scan(pick(args.size_cap, 5), pick(args.span, 8), so));
  } else if (args.target == "compression-scan") {
    code = emit_sweep(g, compression_property_scan(pick(args.size_cap, 3), pick(args.span, 6), so));
  } else {
    throw std::invalid_argument("unknown verify target '" + args.target + "'");
  }
  std::cerr << (parse_cert_target(args.target) ? " " : "stats: ") << "seconds=" << timer.seconds() << "\n";
  return code;
}

// ---------------------------------------------------------------------------
// construct

int run_construct(const Global& g, const std::string& family, std::int64_t m) {
  const NumSet s = family == "staircase" ? staircase(m) : symmetric_interval(m);
  if (g.structured()) {
    ordered_json j;
    j["family"] = family;
    j["m"] = m;
    j["size"] = s.size();
    auto elems = ordered_json::array();
    for (const auto& x : s) elems.push_back(x.str());
    j["elements"] = std::move(elems);
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << format_set(s);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Counting, extremal search and certified bounds for progression equations", "ap-extremal"};
  app.set_version_flag("--version", std::string(apx::kToolVersion));
  app.set_config("--config", "", "Config file (TOML/INI, same keys as the flags; flags win)");
  app.require_subcommand(1);
  Global g;
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"table", "structured"}));

  std::uint64_t env_budget = 0;
  const char* env = std::getenv("AP_EXTREMAL_BUDGET");
  if (env && *env) {
    try {
      env_budget = std::stoull(env);
    } catch (const std::exception&) {
      std::cerr << "error: AP_EXTREMAL_BUDGET must be a nonnegative integer\n";
      return kUsage;
    }
  }

  CountArgs ca;
  auto* count = app.add_subcommand("count", "Count solutions of an equation over sets read from files");
  count->add_option("--a", ca.a, "Set file for A")->required();
  count->add_option("--b", ca.b, "Set file for B (default A)");
  count->add_option("--c", ca.c, "Set file for C, or 'union' for A u B");
  count->add_option("--eq", ca.eq, "Equation")->check(CLI::IsMember(kEquations));
  count->add_option("--lambda", ca.lambda, "Coefficient p/q for the lambda equations");
  count->add_option("--method", ca.method, "Counting method")->check(CLI::IsMember({"auto", "pairs", "convolution"}));

  SearchArgs sa;
  if (env_budget) sa.budget = env_budget;
  auto* search = app.add_subcommand("search", "Exhaustive search for extremal configurations");
  search->add_option("--objective", sa.objective, "Objective")
      ->check(CLI::IsMember({"max-t-union", "max-diff", "max-diff-antisym"}));
  search->add_option("--eq", sa.eq, "Equation (default ap for max-t-union, diff otherwise)")
      ->check(CLI::IsMember(kEquations));
  search->add_option("--lambda", sa.lambda, "Coefficient p/q for the lambda equations");
  search->add_option("--n", sa.n, "Total size")->required()->check(CLI::PositiveNumber);
  search->add_option("--span", sa.span, "Ambient span (default 4n, or 2n for max-t-union)")->check(CLI::PositiveNumber);
  search->add_option("--jobs", sa.jobs, "Worker threads (default: available cores)");
  search->add_option("--checkpoint", sa.checkpoint, "Checkpoint file written on completion or budget exhaustion");
  search->add_flag("--resume", sa.resume, "Resume from the checkpoint file");
  search->add_option("--witness-cap", sa.witness_cap, "Maximum witnesses reported")->check(CLI::PositiveNumber);
  search->add_option("--budget", sa.budget, "Node budget (env AP_EXTREMAL_BUDGET)");
  search->add_flag("--no-prune", sa.no_prune, "Disable bound-based pruning");

  VerifyArgs va;
  if (env_budget) va.budget = env_budget;
  auto* verify = app.add_subcommand("verify", "Certify inequalities and run exhaustive oracle sweeps");
  verify->add_option("--target", va.target, "Target")
      ->check(CLI::IsMember({"lemma-inequality", "claim1", "claim2-u", "claim2-v", "balancing", "xy-lemma",
                             "decomposition", "critical-points", "leqfis-scan", "compression-scan", "main-scan",
                             "principal-scan", "recast-scan"}));
  verify->add_option("--tol", va.tol, "Tolerance p/q");
  verify->add_option("--threshold", va.threshold, "Threshold p/q (default per target)");
  verify->add_option("--budget", va.budget, "Node or configuration budget (env AP_EXTREMAL_BUDGET)");
  verify->add_option("--certificate", va.certificate, "Write the certificate to this file");
  verify->add_option("--replay", va.replay, "Replay a certificate file instead of certifying");
  verify->add_option("--jobs", va.jobs, "Worker threads (default: available cores)");
  verify->add_option("--trials", va.trials, "Random trials for identity checks");
  verify->add_option("--seed", va.seed, "Seed for identity checks");
  verify->add_option("--size-cap", va.size_cap, "Set size cap for triple scans");
  verify->add_option("--span", va.span, "Span for scans (half-width for principal-scan)");
  verify->add_option("--n-max", va.n_max, "Size cap for main-scan and principal-scan");

  std::string family;
  std::int64_t m = 0;
  auto* construct = app.add_subcommand("construct", "Emit an extremal construction as a set file");
  construct->add_option("--family", family, "Family")->required()->check(CLI::IsMember({"staircase", "interval"}));
  construct->add_option("--m", m, "Family parameter")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*count) return run_count(g, ca);
    if (*search) return run_search(g, sa);
    if (*verify) return run_verify(g, va);
    if (*construct) return run_construct(g, family, m);
  } catch (const apx::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
  } catch (const apx::CheckpointError& e) {
    std::cerr << "error: " << e.what() << "\n";
  } catch (const apx::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return kUsage;
}
