#pragma once

// Named experiments. Each preset runs an analysis or a simulation, renders a
// CSV and a plain-text report, and checks a list of documented expectations.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pts/analysis.hpp"
#include "pts/mechanisms.hpp"
#include "pts/probability.hpp"
#include "pts/simulation.hpp"
#include "pts/text_io.hpp"

namespace pts {

struct Expectation {
  std::string name;
  std::string anchor;  ///< the result the expectation reproduces
  bool passed = false;
  std::string observed;
};

struct PresetResult {
  std::string name;
  std::uint64_t seed = 0;
  std::string csv;
  std::string report;
  std::vector<Expectation> expectations;
  std::map<std::string, double> values;  ///< named quantities, for programmatic checks

  bool passed() const {
    return std::all_of(expectations.begin(), expectations.end(), [](const Expectation& e) { return e.passed; });
  }

  std::string expectations_text() const {
    std::ostringstream os;
    os << "preset: " << name << "\nseed: " << seed << '\n';
    for (const auto& e : expectations) {
      os << (e.passed ? "PASS " : "FAIL ") << e.name << "\n  anchor: " << e.anchor << "\n  observed: " << e.observed << '\n';
    }
    os << "result: " << (passed() ? "all expectations hold" : "expectation failed") << '\n';
    return os.str();
  }
};

class UnknownPreset : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace preset_detail {

inline void expect(PresetResult& out, std::string name, std::string anchor, bool passed, std::string observed) {
  out.expectations.push_back({std::move(name), std::move(anchor), passed, std::move(observed)});
}

inline bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

inline const AnswerSpace& xyz() {
  static const AnswerSpace s({"x", "y", "z"});
  return s;
}

inline BeliefState self_dominating_table() {
  return BeliefState::from_rows({{0.3, 0.4, 0.3}, {0.7, 0.2, 0.1}, {0.1, 0.8, 0.1}, {0.2, 0.3, 0.5}});
}

inline BeliefState pts_first_case_table() {
  return BeliefState::from_rows({{0.5, 0.4, 0.1}, {0.7, 0.2, 0.1}, {0.4, 0.5, 0.1}, {0.4, 0.4, 0.2}});
}

inline BeliefState pts_second_case_table() {
  const double third = 1.0 / 3.0;
  return BeliefState::from_rows({{third, third, third}, {0.5, 0.3, 0.2}, {0.3, 0.5, 0.2}, {0.2, 0.3, 0.5}});
}

/// Payoff of every report at every observation against a truthful peer.
template <PaymentFunction Pay>
std::string payoff_csv(const BeliefState& b, const Pay& pay, const Distribution& r, const AnswerSpace& answers,
                       PresetResult& out) {
  std::ostringstream os;
  os << "observation,report,expected_payoff,best_response\n";
  const auto peer = truthful_peer(b.size());
  for (std::size_t o = 0; o < b.size(); ++o) {
    const auto br = best_response(b.posterior(o), pay, r, peer);
    for (std::size_t x = 0; x < b.size(); ++x) {
      os << answers.label(o) << ',' << answers.label(x) << ',' << format_real(br.payoffs[x]) << ','
         << (x == br.report ? 1 : 0) << '\n';
      out.values["payoff." + answers.label(o) + "." + answers.label(x)] = br.payoffs[x];
    }
    out.values["best." + answers.label(o)] = static_cast<double>(br.report);
  }
  return os.str();
}

inline std::string describe_belief(const BeliefState& b) {
  std::ostringstream os;
  os << "belief:\n" << emit_belief_table(b);
  return os.str();
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

inline std::string trace_csv(const SimTrace& trace) {
  std::ostringstream os;
  write_trace_csv(os, trace);
  return os.str();
}

inline std::string summary_text(const SimTrace& trace) {
  std::ostringstream os;
  write_summary(os, trace);
  return os.str();
}

inline std::string list(const std::vector<double>& v) {
  std::string s;
  for (double x : v) s += (s.empty() ? "" : " ") + format_real(x);
  return s;
}

/// Checkpoints ..., T/10^4, T/100, T.
/// Between decade-spaced points the sampling noise of L1 is comparable to
/// its expected decrease, so consecutive points are two decades apart.
inline std::vector<std::size_t> log_grid(std::size_t rounds, std::size_t factor = 100) {
  std::vector<std::size_t> grid{rounds - 1};
  for (std::size_t t = rounds / factor; t >= 1; t /= factor) grid.push_back(t);
  std::reverse(grid.begin(), grid.end());
  return grid;
}

inline bool decreasing_on_grid(const SimTrace& trace, const std::vector<std::size_t>& grid) {
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(trace.rounds[grid[i]].l1 < trace.rounds[grid[i - 1]].l1)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

inline PresetResult output_agreement_example(std::uint64_t seed) {
  PresetResult out;
  out.name = "output-agreement-example";
  out.seed = seed;
  const auto b = self_dominating_table();
  const auto pay = PaymentSpec::output_agreement(1.0);
  const auto r = Distribution::uniform(3);
  out.csv = payoff_csv(b, pay, r, xyz(), out);
  const auto eq = verify_truthful_equilibrium(pay, b, r);
  std::ostringstream rep;
  rep << "mechanism: output_agreement C=1\n" << describe_belief(b) << '\n';
  write_report(rep, eq);
  out.report = rep.str();

  const double px = out.values["payoff.x.x"], py = out.values["payoff.x.y"], pz = out.values["payoff.x.z"];
  expect(out, "report x after observing x pays 0.7", "output agreement worked example, expected score for reporting x",
         near(px, 0.7, 1e-12), format_real(px));
  expect(out, "report y after observing x pays Pr[y|x] = 0.2 from the belief table",
         "output agreement worked example, expected score for reporting y (table row x)", near(py, 0.2, 1e-12),
         format_real(py));
  expect(out, "losing mass 1 - Pr[x|x] = 0.3 is spread over y and z", "output agreement worked example, 0.3 off-x mass",
         near(py + pz, 0.3, 1e-12), format_real(py + pz));
  expect(out, "belief is self-dominating", "self-dominating belief table", is_self_dominating(b), is_self_dominating(b) ? "yes" : "no");
  expect(out, "truthful reporting is a strict best response at every observation",
         "output agreement is truthful under self-dominating beliefs", eq.holds(), to_string(eq.verdict));
  return out;
}

inline PresetResult pts_example_1(std::uint64_t seed) {
  PresetResult out;
  out.name = "pts-example-1";
  out.seed = seed;
  const auto b = pts_first_case_table();
  const auto pay = PaymentSpec::peer_truth_serum(1.0);
  const auto r = Distribution::uniform(3);
  const auto q = Distribution::from_probabilities(std::vector<double>{0.55, 0.4, 0.05});
  out.csv = payoff_csv(b, pay, r, xyz(), out);
  const auto eq = verify_truthful_equilibrium(pay, b, r);
  const auto opt = verify_optimality(r, b, 10000, ScoringRule{ScoringKind::logarithmic, 1.0});
  std::ostringstream rep;
  rep << "mechanism: pts C=1 f=0, R uniform, Q = 0.55 0.4 0.05\n" << describe_belief(b) << '\n';
  write_report(rep, eq);
  write_report(rep, opt);
  out.report = rep.str();

  const double pz = out.values["payoff.z.z"], px = out.values["payoff.z.x"], py = out.values["payoff.z.y"];
  expect(out, "report z after observing z pays 0.2/(1/3) = 0.6", "PTS worked example, first belief table", near(pz, 0.6, 1e-12),
         format_real(pz));
  expect(out, "report x after observing z pays 0.4/(1/3) = 1.2", "PTS worked example, first belief table", near(px, 1.2, 1e-12),
         format_real(px));
  expect(out, "report y after observing z pays 1.2", "PTS worked example, first belief table", near(py, 1.2, 1e-12), format_real(py));
  expect(out, "best response to z is x (tie with y broken by answer order)", "PTS worked example, report x or y rather than z",
         out.values["best.z"] == 0.0, xyz().label(static_cast<std::size_t>(out.values["best.z"])));
  expect(out, "truthful equilibrium is refuted at observation z", "PTS worked example, honest reporting is not a best response",
         eq.verdict == Verdict::refuted && eq.witness.rfind("observe 2", 0) == 0, to_string(eq.verdict) + std::string(": ") + eq.witness);
  expect(out, "prior is informed relative to R and Q", "PTS worked example, prior closer to Q than R", is_informed(b.prior(), r, q),
         is_informed(b.prior(), r, q) ? "yes" : "no");
  expect(out, "belief is self-predicting", "first PTS belief table", is_self_predicting(b),
         is_self_predicting(b) ? "yes" : "no");
  expect(out, "log-score gain argmax agrees with PTS argmax", "optimality of PTS for the log scoring rule", opt.holds(),
         to_string(opt.verdict));
  return out;
}

inline PresetResult pts_example_2(std::uint64_t seed) {
  PresetResult out;
  out.name = "pts-example-2";
  out.seed = seed;
  const auto b = pts_second_case_table();
  const auto pay = PaymentSpec::peer_truth_serum(1.0);
  const auto r = Distribution::uniform(3);
  out.csv = payoff_csv(b, pay, r, xyz(), out);
  const auto eq = verify_truthful_equilibrium(pay, b, r);
  const double gap = self_prediction_gap(b, 2);
  const double threshold = truthfulness_threshold(b);
  out.values["gap.z"] = gap;
  out.values["threshold"] = threshold;
  std::ostringstream rep;
  rep << "mechanism: pts C=1 f=0, R uniform\n" << describe_belief(b) << "gap(z): " << format_real(gap)
      << "\nthreshold: " << format_real(threshold) << "\n\n";
  write_report(rep, eq);
  out.report = rep.str();

  const double pz = out.values["payoff.z.z"], py = out.values["payoff.z.y"];
  expect(out, "report z after observing z pays 0.5/(1/3) = 1.5", "PTS worked example, second belief table", near(pz, 1.5, 1e-12),
         format_real(pz));
  expect(out, "report y after observing z pays 0.3/(1/3) = 0.9", "PTS worked example, second belief table", near(py, 0.9, 1e-12),
         format_real(py));
  expect(out, "truthful reporting is a strict best response at every observation",
         "PTS worked example, prior close to R makes honesty the best response", eq.holds(), to_string(eq.verdict));
  expect(out, "self-prediction gap at z is 2/3", "gap definition applied to the second belief table", near(gap, 2.0 / 3.0, 1e-12),
         format_real(gap));
  return out;
}

inline PresetResult helpful_convergence(std::uint64_t seed) {
  PresetResult out;
  out.name = "helpful-convergence";
  out.seed = seed;
  constexpr std::size_t kSeeds = 20;
  std::vector<double> helpful_l1, truthful_l1;
  std::size_t decreasing = 0, decade_decreasing = 0;
  std::ostringstream rep;
  rep << "helpful agents, prior (Q + R)/2, rho 0.1, M 2, seeds " << seed << ".." << seed + kSeeds - 1 << "\n";
  std::vector<std::size_t> grid;
  for (std::size_t k = 0; k < kSeeds; ++k) {
    const auto cfg = scenario_helpful_convergence(seed + k);
    const auto trace = run_simulation(cfg);
    grid = log_grid(cfg.rounds);
    const bool dec = decreasing_on_grid(trace, grid);
    decreasing += dec;
    decade_decreasing += decreasing_on_grid(trace, log_grid(cfg.rounds, 10));
    helpful_l1.push_back(trace.summary.final_l1);
    if (k == 0) out.csv = trace_csv(trace);
    std::vector<double> at;
    for (auto t : grid) at.push_back(trace.rounds[t].l1);
    rep << "seed " << seed + k << " final_l1 " << format_real(trace.summary.final_l1) << " grid_l1 " << list(at)
        << (dec ? " decreasing" : " not-decreasing") << '\n';
    truthful_l1.push_back(run_simulation(scenario_truthful_baseline(seed + k)).summary.final_l1);
  }
  const double med = median(helpful_l1), base = median(truthful_l1);
  out.values["median_final_l1"] = med;
  out.values["decreasing_seeds"] = static_cast<double>(decreasing);
  out.values["truthful_median_final_l1"] = base;
  rep << "decreasing on the decade grid: " << decade_decreasing << "/" << kSeeds << '\n';
  rep << "truthful baseline final_l1 " << list(truthful_l1) << '\n';
  out.report = rep.str();

  std::string grid_text;
  for (auto t : grid) grid_text += (grid_text.empty() ? "" : ",") + std::to_string(t);
  expect(out, "median final L1(R^T, Q) < 0.05 over 20 seeds", "asymptotic accuracy of helpful reporting", med < 0.05,
         format_real(med));
  expect(out, "L1 decreasing on the grid t = " + grid_text + " in at least 18 of 20 seeds",
         "asymptotic accuracy of helpful reporting", decreasing >= 18, std::to_string(decreasing) + "/20");
  expect(out, "truthful agents: median final L1 < 0.03", "law of large numbers baseline", base < 0.03, format_real(base));
  return out;
}

inline PresetResult no_general_prior(std::uint64_t seed) {
  PresetResult out;
  out.name = "no-general-prior";
  out.seed = seed;
  constexpr std::size_t kSeeds = 10;
  constexpr std::size_t kWindow = 10000;
  std::vector<double> freq_y;
  double r_y = 0.0;
  std::ostringstream rep;
  rep << "fixed prior (R0[x], R0[y] - 0.1, R0[z] + 0.1), R0 = Q = 0.5 0.3 0.2, delta 0.001, 50000 reports per seed\n";
  std::size_t persistent = 0;
  for (std::size_t k = 0; k < kSeeds; ++k) {
    const auto cfg = scenario_no_general_prior(0.1, 0.001, Distribution::from_probabilities(std::vector<double>{0.5, 0.3, 0.2}), seed + k);
    const auto trace = run_simulation(cfg);
    r_y = cfg.truth[1];
    const double f = trace.tail_frequency(1, kWindow);
    freq_y.push_back(f);
    persistent += std::abs(f - r_y) > 0.05;
    if (k == 0) out.csv = trace_csv(trace);
    rep << "seed " << seed + k << " tail_freq_y " << format_real(f) << " final_R " << list({trace.summary.final_public_dist.begin(), trace.summary.final_public_dist.end()})
        << '\n';
  }
  const double avg = mean(freq_y);
  out.values["mean_tail_freq_y"] = avg;
  out.values["r_y"] = r_y;
  out.report = rep.str();
  expect(out, "|freq(y) - R[y]| > 0.05 over the last 10^4 reports, averaged over 10 seeds",
         "no mechanism is truthful for all priors near R: y-observers drift away from R[y]", std::abs(avg - r_y) > 0.05,
         "freq " + format_real(avg) + " vs R[y] " + format_real(r_y));
  expect(out, "the gap exceeds 0.05 in every seed", "same construction, persistence across seeds", persistent == kSeeds,
         std::to_string(persistent) + "/10");
  return out;
}

inline PresetResult common_prior(std::uint64_t seed) {
  PresetResult out;
  out.name = "common-prior";
  out.seed = seed;
  constexpr std::size_t kSeeds = 10;
  std::vector<double> fx, fz, l1;
  std::ostringstream rep;
  rep << "shifted private priors, Q = 0.5 0.2 0.3, epsilon 0.05, delta 0.001, 10^5 reports per seed\n";
  for (std::size_t k = 0; k < kSeeds; ++k) {
    const auto trace = run_simulation(scenario_common_prior(0.05, 0.001, seed + k));
    fx.push_back(trace.summary.report_frequencies[0]);
    fz.push_back(trace.summary.report_frequencies[2]);
    l1.push_back(trace.summary.final_l1);
    if (k == 0) out.csv = trace_csv(trace);
    rep << "seed " << seed + k << " freq " << list(trace.summary.report_frequencies) << " final_l1 " << format_real(trace.summary.final_l1)
        << '\n';
  }
  const double mx = mean(fx), mz = mean(fz), ml1 = mean(l1);
  out.values["freq_x"] = mx;
  out.values["freq_z"] = mz;
  out.values["max_freq_z"] = *std::max_element(fz.begin(), fz.end());
  out.values["min_freq_x"] = *std::min_element(fx.begin(), fx.end());
  out.values["mean_final_l1"] = ml1;
  out.report = rep.str();
  expect(out, "long-run freq(z) < 0.27 in every seed", "without a common prior R stays away from Q: z stays below 0.3",
         out.values["max_freq_z"] < 0.27, "max " + format_real(out.values["max_freq_z"]) + ", mean " + format_real(mz));
  expect(out, "long-run freq(x) > 0.52 in every seed", "without a common prior R stays away from Q", out.values["min_freq_x"] > 0.52,
         "min " + format_real(out.values["min_freq_x"]) + ", mean " + format_real(mx));
  return out;
}

/// Quadratic-rule test beliefs: convex-mix updates of a random prior are
/// linear self-predicting (diagonal gain w(1 - Pr[o]) against -w Pr[x]).
inline BeliefState sample_linear_self_predicting(Rng& rng, std::size_t n) {
  for (;;) {
    BeliefState b;
    if (uniform01(rng) < 0.5) {
      const auto prior = sample_distribution(rng, n, 0.02);
      const double w = uniform_real(rng, 0.05, 0.8);
      std::vector<Distribution> rows;
      for (std::size_t o = 0; o < n; ++o) rows.push_back(convex_mix_posterior(w, prior, o));
      b = BeliefState(prior, std::move(rows));
    } else {
      b = sample_self_predicting_table(rng, sample_distribution(rng, n, 0.02));
    }
    if (is_linear_self_predicting(b)) return b;
  }
}

struct OptimalityTally {
  std::size_t holds = 0, refuted = 0, inconclusive = 0;
  std::string first_witness;
};

inline OptimalityTally optimality_sweep(ScoringKind kind, std::size_t samples, std::uint64_t seed, std::ostringstream& csv) {
  Rng rng(seed);
  OptimalityTally tally;
  const ScoringRule rule{kind, 1.0};
  for (std::size_t s = 0; s < samples; ++s) {
    const std::size_t n = 2 + uniform_index(rng, 4);
    const auto r = sample_distribution(rng, n, 0.02);
    const auto b = kind == ScoringKind::logarithmic ? sample_self_predicting_belief(rng, n) : sample_linear_self_predicting(rng, n);
    const auto rep = verify_optimality(r, b, 10000, rule);
    switch (rep.verdict) {
      case Verdict::holds: ++tally.holds; break;
      case Verdict::refuted:
        ++tally.refuted;
        if (tally.first_witness.empty()) tally.first_witness = "sample " + std::to_string(s) + ": " + rep.witness;
        break;
      case Verdict::inconclusive: ++tally.inconclusive; break;
    }
    csv << to_string(kind) << ',' << s << ',' << n << ',' << to_string(rep.verdict) << ',' << format_real(rep.margin) << '\n';
  }
  return tally;
}

inline PresetResult optimality_check(std::uint64_t seed) {
  PresetResult out;
  out.name = "optimality-check";
  out.seed = seed;
  constexpr std::size_t kSamples = 100;
  std::ostringstream csv;
  csv << "rule,sample,n,verdict,gain_margin\n";
  const auto log_t = optimality_sweep(ScoringKind::logarithmic, kSamples, seed, csv);
  const auto quad_t = optimality_sweep(ScoringKind::quadratic, kSamples, seed + 1, csv);
  out.csv = csv.str();
  std::ostringstream rep;
  for (const auto& [label, t] : {std::pair{"logarithmic", log_t}, std::pair{"quadratic", quad_t}}) {
    rep << label << ": holds " << t.holds << " refuted " << t.refuted << " inconclusive " << t.inconclusive << '\n';
    if (!t.first_witness.empty()) rep << "  witness " << t.first_witness << '\n';
  }
  out.report = rep.str();
  out.values["log.refuted"] = static_cast<double>(log_t.refuted);
  out.values["log.inconclusive"] = static_cast<double>(log_t.inconclusive);
  out.values["quad.refuted"] = static_cast<double>(quad_t.refuted);
  out.values["quad.inconclusive"] = static_cast<double>(quad_t.inconclusive);

  auto summary = [](const OptimalityTally& t) {
    return std::to_string(t.refuted) + " refuted, " + std::to_string(t.inconclusive) + " inconclusive of " + std::to_string(kSamples);
  };
  expect(out, "log rule: gain argmax equals PTS argmax, no refutations and < 5% inconclusive",
         "PTS maximizes the center's log-score gain at t = 10^4",
         log_t.refuted == 0 && log_t.inconclusive * 20 < kSamples, summary(log_t));
  expect(out, "quadratic rule: gain argmax equals quadratic-PTS argmax, no refutations and < 5% inconclusive",
         "quadratic PTS maximizes the center's quadratic-score gain under linear self-prediction",
         quad_t.refuted == 0 && quad_t.inconclusive * 20 < kSamples, summary(quad_t));
  return out;
}

inline PresetResult binary_informed(std::uint64_t seed) {
  PresetResult out;
  out.name = "binary-informed";
  out.seed = seed;
  const auto cfg = scenario_binary_informed(seed);
  const auto trace = run_simulation(cfg);
  out.csv = trace_csv(trace);

  // Observers of a value R under-represents relative to Q must report it;
  // observers of the other value may switch to it (helpful reporting).
  std::size_t checked = 0, dishonest = 0;
  for (const auto& rec : trace.rounds) {
    for (std::size_t i = 0; i < rec.reports.size(); ++i) {
      const auto o = rec.observations[i];
      if (rec.public_dist[o] <= cfg.truth[o]) {
        ++checked;
        dishonest += rec.reports[i] != o;
      }
    }
  }
  // Lemma sweep: indicative binary beliefs are self-predicting.
  Rng rng(seed);
  std::size_t counterexamples = 0;
  constexpr std::size_t kBeliefs = 10000;
  for (std::size_t s = 0; s < kBeliefs;) {
    const auto prior = sample_distribution(rng, 2, 0.01);
    const auto b = BeliefState(prior, {sample_distribution(rng, 2, 0.01), sample_distribution(rng, 2, 0.01)});
    if (!is_indicative(b, 0) || !is_indicative(b, 1)) continue;
    ++s;
    counterexamples += !is_self_predicting(b);
  }
  const double l1_start = trace.rounds.front().l1;
  out.values["dishonest"] = static_cast<double>(dishonest);
  out.values["final_l1"] = trace.summary.final_l1;
  out.values["lemma_counterexamples"] = static_cast<double>(counterexamples);
  std::ostringstream rep;
  write_summary(rep, trace);
  rep << "under-represented observations checked: " << checked << "\nmisreported: " << dishonest << "\ninitial_l1: " << format_real(l1_start)
      << "\nlemma beliefs: " << kBeliefs << " counterexamples: " << counterexamples << '\n';
  out.report = rep.str();

  expect(out, "observers of the under-represented value always report it", "binary PTS with informed priors admits helpful reporting",
         dishonest == 0 && checked > 0, std::to_string(dishonest) + " misreports in " + std::to_string(checked));
  expect(out, "final L1(R^T, Q) < 0.05", "binary PTS with informed priors is asymptotically accurate", trace.summary.final_l1 < 0.05,
         format_real(trace.summary.final_l1) + " (start " + format_real(l1_start) + ")");
  expect(out, "indicative binary beliefs are self-predicting (10^4 samples)", "binary lemma", counterexamples == 0,
         std::to_string(counterexamples) + " counterexamples");
  return out;
}

}  // namespace preset_detail

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"output-agreement-example", "pts-example-1", "pts-example-2",
                                                 "helpful-convergence",      "no-general-prior", "common-prior",
                                                 "optimality-check",         "binary-informed"};
  return names;
}

inline PresetResult run_preset(std::string_view name, std::uint64_t seed = 0) {
  using namespace preset_detail;
  static const std::map<std::string, std::function<PresetResult(std::uint64_t)>, std::less<>> table = {
      {"output-agreement-example", output_agreement_example},
      {"pts-example-1", pts_example_1},
      {"pts-example-2", pts_example_2},
      {"helpful-convergence", helpful_convergence},
      {"no-general-prior", no_general_prior},
      {"common-prior", common_prior},
      {"optimality-check", optimality_check},
      {"binary-informed", binary_informed},
  };
  auto it = table.find(name);
  if (it == table.end()) throw UnknownPreset("unknown preset '" + std::string(name) + "'");
  return it->second(seed);
}

/// Writes <name>.csv, <name>.report.txt and <name>.expectations.txt.
inline void write_preset(const PresetResult& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto put = [&](const std::string& file, const std::string& body) {
    std::ofstream os(dir / file, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + (dir / file).string());
    os << body;
  };
  put(r.name + ".csv", r.csv);
  put(r.name + ".report.txt", "preset: " + r.name + "\nseed: " + std::to_string(r.seed) + "\n\n" + r.report);
  put(r.name + ".expectations.txt", r.expectations_text());
}

}  // namespace pts
