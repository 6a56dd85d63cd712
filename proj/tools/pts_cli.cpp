// Command-line front end: run scenario files, verify mechanism properties,
// inspect best responses, and reproduce the named presets.
//
// Exit status: 0 success, 1 an expectation or check failed, 2 usage or config error.

#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pts/pts.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw UsageError("cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

pts::SimConfig load(const std::string& path, std::optional<std::uint64_t> seed) {
  auto cfg = pts::parse_config(read_file(path));
  if (seed) cfg.seed = *seed;
  return cfg;
}

void write_file(const fs::path& dir, const std::string& name, const std::string& body) {
  fs::create_directories(dir);
  std::ofstream os(dir / name, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + (dir / name).string());
  os << body;
}

int cmd_simulate(const std::string& path, std::optional<std::uint64_t> seed, const fs::path& out_dir) {
  const auto cfg = load(path, seed);
  const auto trace = pts::run_simulation(cfg);
  std::ostringstream csv, summary;
  pts::write_trace_csv(csv, trace);
  pts::write_summary(summary, trace);
  write_file(out_dir, "trace.csv", csv.str());
  write_file(out_dir, "summary.txt", summary.str());
  std::cout << summary.str() << "wrote " << (out_dir / "trace.csv").string() << '\n';
  return kOk;
}

/// Belief of a profile at R, or nullopt when the profile cannot express one
/// (e.g. a convex-mix update whose prior is left to the agent).
std::optional<pts::BeliefState> profile_belief(const pts::AgentProfile& p, const pts::SimConfig& cfg, const pts::Distribution& r) {
  try {
    return pts::belief_state(p.update, pts::resolve_prior(p, cfg.truth, r), r);
  } catch (const pts::ConfigError&) {
    return std::nullopt;
  }
}

int cmd_verify(const std::string& path, std::optional<std::uint64_t> seed, const fs::path& out_dir) {
  const auto cfg = load(path, seed);
  const auto r = pts::normalize(cfg.initial_counts());
  std::vector<pts::VerificationReport> reports;

  {
    const auto arb = pts::check_arbitrage_free(cfg.payment, r);
    pts::VerificationReport rep;
    rep.claim = "arbitrage-free at R0";
    rep.seed = cfg.seed;
    rep.verdict = arb.arbitrage_free ? pts::Verdict::holds : pts::Verdict::refuted;
    rep.margin = arb.spread;
    rep.add("expected", pts::detail::join(arb.expected));
    if (!arb.arbitrage_free) {
      rep.witness = "report " + cfg.answers.label(arb.best_report) + " expects " + pts::format_real(arb.expected[arb.best_report]) +
                    ", report " + cfg.answers.label(arb.worst_report) + " expects " + pts::format_real(arb.expected[arb.worst_report]);
    }
    reports.push_back(rep);
  }
  {
    const auto dec = pts::decompose_consensus(cfg.payment, r);
    pts::VerificationReport rep;
    rep.claim = "consensus form f(rr) + [r == rr] C/R[r]";
    rep.seed = cfg.seed;
    rep.verdict = dec.ok ? pts::Verdict::holds : pts::Verdict::refuted;
    if (dec.ok) {
      rep.add("C", pts::format_real(dec.scale));
      rep.add("f", pts::detail::join(dec.shift));
    } else {
      rep.witness = dec.violation;
    }
    reports.push_back(rep);
  }

  for (const auto& entry : cfg.population) {
    const auto& p = entry.profile;
    const auto belief = profile_belief(p, cfg, r);
    if (belief) {
      reports.push_back(pts::verify_truthful_equilibrium(cfg.payment, *belief, r, pts::kStrictMargin, "truthful-equilibrium " + p.name));
      pts::VerificationReport th;
      th.claim = "rho-threshold " + p.name;
      th.seed = cfg.seed;
      if (pts::is_self_predicting(*belief)) {
        const double rho = pts::truthfulness_threshold(*belief);
        th.verdict = pts::Verdict::holds;
        th.margin = rho;
        th.add("threshold", pts::format_real(rho));
        th.add("R0 within threshold", pts::is_rho_close(r, belief->prior(), std::min(rho, 0.999999)) ? "yes" : "no");
      } else {
        th.verdict = pts::Verdict::inconclusive;
        th.add("self_predicting", "no");
      }
      reports.push_back(th);
    }
    if (const auto* h = std::get_if<pts::Helpful>(&p.strategy)) {
      const auto prior = pts::resolve_prior(p, cfg.truth, r);
      const auto table = pts::tabulate_strategy(p, cfg.truth, r, cfg.payment);
      pts::VerificationReport rep;
      rep.claim = "rho-helpful " + p.name;
      rep.seed = cfg.seed;
      rep.verdict = pts::check_helpful(table, prior, r, h->rho) ? pts::Verdict::holds : pts::Verdict::refuted;
      std::string s;
      for (std::size_t o = 0; o < table.size(); ++o) s += cfg.answers.label(o) + "->" + cfg.answers.label(table[o]) + " ";
      rep.add("strategy", s);
      reports.push_back(rep);
    }
  }

  std::ostringstream os;
  bool refuted = false;
  for (const auto& rep : reports) {
    pts::write_report(os, rep);
    refuted = refuted || rep.verdict == pts::Verdict::refuted;
  }
  write_file(out_dir, "verify.txt", os.str());
  std::cout << os.str();
  return refuted ? kFailed : kOk;
}

int cmd_best_response(const std::string& path, std::optional<std::uint64_t> seed, const std::string& observe, const fs::path& out_dir) {
  const auto cfg = load(path, seed);
  if (!cfg.answers.contains(observe)) throw UsageError("--observe: unknown answer '" + observe + "'");
  const auto o = cfg.answers.index_of(observe);
  const auto r = pts::normalize(cfg.initial_counts());
  std::ostringstream os;
  os << "profile,report,expected_payoff,best\n";
  const auto roster = cfg.roster();
  std::vector<std::string> seen;
  for (const auto& p : roster) {
    if (std::find(seen.begin(), seen.end(), p.name) != seen.end()) continue;
    seen.push_back(p.name);
    const auto prior = pts::resolve_prior(p, cfg.truth, r);
    const auto br = pts::best_response(o, p, prior, cfg.payment, r, pts::truthful_peer(cfg.answers.size()));
    for (std::size_t x = 0; x < br.payoffs.size(); ++x) {
      os << p.name << ',' << cfg.answers.label(x) << ',' << pts::format_real(br.payoffs[x]) << ',' << (x == br.report) << '\n';
    }
  }
  if (!out_dir.empty()) write_file(out_dir, "best_response.csv", os.str());
  std::cout << os.str();
  return kOk;
}

int cmd_preset(std::vector<std::string> names, std::uint64_t seed, const fs::path& out_dir, bool parallel) {
  if (names.size() == 1 && names[0] == "all") names = pts::preset_names();
  for (const auto& n : names) {
    const auto& known = pts::preset_names();
    if (std::find(known.begin(), known.end(), n) == known.end()) throw UsageError("unknown preset '" + n + "'");
  }
  std::vector<pts::PresetResult> results;
  if (parallel) {
    std::vector<std::future<pts::PresetResult>> jobs;
    for (const auto& n : names) jobs.push_back(std::async(std::launch::async, [n, seed] { return pts::run_preset(n, seed); }));
    for (auto& j : jobs) results.push_back(j.get());
  } else {
    for (const auto& n : names) results.push_back(pts::run_preset(n, seed));
  }
  bool ok = true;
  for (const auto& r : results) {
    pts::write_preset(r, out_dir);
    std::cout << r.expectations_text() << '\n';
    ok = ok && r.passed();
  }
  return ok ? kOk : kFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Peer Truth Serum simulator and verifier"};
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed;
  std::string out_dir = "out";
  std::string config;
  std::string observe;
  std::vector<std::string> presets;
  bool parallel = false;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "RNG seed (overrides the config)");
    sub->add_option("--out-dir", out_dir, "directory for output files")->capture_default_str();
  };

  auto* simulate = app.add_subcommand("simulate", "run a scenario file; writes trace.csv and summary.txt");
  simulate->add_option("config", config, "scenario file")->required();
  common(simulate);

  auto* verify = app.add_subcommand("verify", "check payment and profile properties at the initial histogram");
  verify->add_option("config", config, "scenario file")->required();
  common(verify);

  auto* best = app.add_subcommand("best-response", "expected payoff of every report for one observation");
  best->add_option("config", config, "scenario file")->required();
  best->add_option("--observe", observe, "observed answer label")->required();
  common(best);

  auto* preset = app.add_subcommand("preset", "reproduce named experiments (or 'all')");
  preset->add_option("name", presets, "preset names")->required();
  preset->add_flag("--parallel", parallel, "run presets concurrently");
  common(preset);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*simulate) return cmd_simulate(config, seed, out_dir);
    if (*verify) return cmd_verify(config, seed, out_dir);
    if (*best) return cmd_best_response(config, seed, observe, best->count("--out-dir") ? fs::path(out_dir) : fs::path());
    if (*preset) return cmd_preset(presets, seed.value_or(0), out_dir, parallel);
  } catch (const pts::ParseError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const pts::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
