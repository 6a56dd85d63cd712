// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "pts/pts.hpp"

using namespace pts;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v) { return format_real(v); }

Outcome worked_examples() {
  const auto t0 = Clock::now();
  const auto oa = run_preset("output-agreement-example");
  const auto p1 = run_preset("pts-example-1");
  const auto p2 = run_preset("pts-example-2");
  const double secs = seconds_since(t0);
  const auto near = [](double a, double b) { return std::abs(a - b) <= 1e-12; };
  const double oa_x = oa.values.at("payoff.x.x");
  const double oa_off = oa.values.at("payoff.x.y") + oa.values.at("payoff.x.z");
  bool ok = near(oa_x, 0.7) && near(oa_off, 0.3) && near(p1.values.at("payoff.z.z"), 0.6) &&
            near(p1.values.at("payoff.z.x"), 1.2) && near(p2.values.at("payoff.z.z"), 1.5) &&
            near(p2.values.at("payoff.z.y"), 0.9) && oa.passed() && p1.passed() && p2.passed() && secs < 1.0;
  std::ostringstream os;
  os << "oa x " << fmt(oa_x) << " off-x " << fmt(oa_off) << " (y alone " << fmt(oa.values.at("payoff.x.y")) << "); ex1 z "
     << fmt(p1.values.at("payoff.z.z")) << " x " << fmt(p1.values.at("payoff.z.x")) << "; ex2 z " << fmt(p2.values.at("payoff.z.z"))
     << " y " << fmt(p2.values.at("payoff.z.y")) << "; " << fmt(secs) << " s";
  return {ok, os.str()};
}

Outcome arbitrage_free() {
  const auto t0 = Clock::now();
  Rng rng(101);
  double max_err = 0.0;
  std::size_t oa_missed = 0, nonuniform = 0;
  for (int i = 0; i < 10000; ++i) {
    const std::size_t n = 2 + uniform_index(rng, 5);
    const auto r = sample_distribution(rng, n, 1e-4);
    const double c = uniform_real(rng, 0.1, 10.0);
    const auto chk = check_arbitrage_free(PaymentSpec::peer_truth_serum(c, NegatedScaleShift{}), r);
    for (double e : chk.expected) max_err = std::max(max_err, std::abs(e));
    if (r == Distribution::uniform(n)) continue;
    ++nonuniform;
    const auto oa = check_arbitrage_free(PaymentSpec::output_agreement(c), r);
    oa_missed += oa.arbitrage_free || !(oa.spread > 0.0);
  }
  const double secs = seconds_since(t0);
  std::ostringstream os;
  os << "max |E pay| " << max_err << "; output agreement missed " << oa_missed << "/" << nonuniform << "; " << fmt(secs) << " s";
  return {max_err < 1e-10 && oa_missed == 0 && secs < 10.0, os.str()};
}

Outcome truthfulness_threshold_check() {
  const auto t0 = Clock::now();
  Rng rng(102);
  const auto pay = PaymentSpec::peer_truth_serum();
  std::size_t violations = 0, beliefs = 0, eligible = 0, misreporting = 0;
  while (beliefs < 1000) {
    const std::size_t n = 2 + uniform_index(rng, 4);
    const auto b = sample_self_predicting_belief(rng, n);
    const double th = truthfulness_threshold(b);
    ++beliefs;
    const auto peer = truthful_peer(n);
    std::vector<Distribution> below{sample_rho_close(rng, b.prior(), 0.9 * th)};
    if (auto adv = adversarial_public(b, 0.9 * th)) below.push_back(*adv);
    for (const auto& r : below) {
      for (std::size_t o = 0; o < n; ++o) violations += best_response(b.posterior(o), pay, r, peer).report != o;
    }
    if (2.0 * th >= 1.0) continue;
    const auto above = adversarial_public(b, 2.0 * th);
    if (!above) continue;
    ++eligible;
    bool lies = false;
    for (std::size_t o = 0; o < n; ++o) lies = lies || best_response(b.posterior(o), pay, *above, peer).report != o;
    misreporting += lies;
  }
  const double secs = seconds_since(t0);
  std::ostringstream os;
  os << "0.9x threshold: " << violations << " violations over " << beliefs << " beliefs; 2x threshold: " << misreporting << "/"
     << eligible << " configurations misreport; " << fmt(secs) << " s";
  return {violations == 0 && misreporting >= 1 && secs < 30.0, os.str()};
}

Outcome helpful(const PresetResult& r, double secs) {
  std::ostringstream os;
  os << "median final L1 " << fmt(r.values.at("median_final_l1")) << ", decreasing on grid in "
     << r.values.at("decreasing_seeds") << "/20 seeds; " << fmt(secs) << " s";
  return {r.values.at("median_final_l1") < 0.05 && r.values.at("decreasing_seeds") >= 18 && secs < 120.0, os.str()};
}

Outcome truthful_baseline(const PresetResult& r) {
  const double m = r.values.at("truthful_median_final_l1");
  return {m < 0.03, "truthful median final L1 " + fmt(m)};
}

Outcome impossibility() {
  auto t0 = Clock::now();
  const auto ngp = run_preset("no-general-prior");
  const double s1 = seconds_since(t0);
  t0 = Clock::now();
  const auto cp = run_preset("common-prior");
  const double s2 = seconds_since(t0);
  const double gap = std::abs(ngp.values.at("mean_tail_freq_y") - ngp.values.at("r_y"));
  std::ostringstream os;
  os << "no-general-prior |freq(y) - R[y]| " << fmt(gap) << " (" << fmt(s1) << " s); common-prior max freq(z) "
     << fmt(cp.values.at("max_freq_z")) << ", min freq(x) " << fmt(cp.values.at("min_freq_x")) << " (" << fmt(s2) << " s)";
  return {ngp.passed() && gap > 0.05 && cp.passed() && cp.values.at("max_freq_z") < 0.27 && cp.values.at("min_freq_x") > 0.52 &&
              s1 < 120.0 && s2 < 120.0,
          os.str()};
}

Outcome confusion_pairs() {
  Rng rng(107);
  double worst = 0.0;
  std::size_t pairs = 0;
  while (pairs < 100) {
    const std::size_t n = 2 + uniform_index(rng, 4);
    const auto alpha = sample_dirichlet_params(rng, n);
    const std::size_t x = uniform_index(rng, n), y = uniform_index(rng, n);
    if (x == y || !(alpha[y] > 2.0)) continue;
    ++pairs;
    const auto [b1, b2] = dirichlet_confusion_pair(alpha, x, y);
    const auto r = sample_distribution(rng, n, 0.01);
    const auto peer = truthful_peer(n);
    std::vector<PaymentSpec> payments{PaymentSpec::peer_truth_serum()};
    for (int k = 0; k < 20; ++k) {
      std::vector<double> f(n);
      for (auto& v : f) v = uniform_real(rng, -2.0, 2.0);
      payments.push_back(PaymentSpec::peer_truth_serum(uniform_real(rng, 0.1, 5.0), TableShift{f}));
    }
    for (const auto& pay : payments) {
      for (std::size_t rep = 0; rep < n; ++rep) {
        const double a = expected_payoff(rep, b1.posterior(x), pay, r, peer);
        const double b = expected_payoff(rep, b2.posterior(y), pay, r, peer);
        worst = std::max(worst, std::abs(a - b));
      }
    }
  }
  std::ostringstream os;
  os << pairs << " pairs x 21 payments, max payoff difference " << worst;
  return {worst <= 1e-12, os.str()};
}

Outcome binary_lemma() {
  Rng rng(108);
  std::size_t checked = 0, counterexamples = 0;
  while (checked < 10000) {
    const BeliefState b(sample_distribution(rng, 2, 0.001), {sample_distribution(rng, 2, 0.001), sample_distribution(rng, 2, 0.001)});
    if (!is_indicative(b, 0) || !is_indicative(b, 1)) continue;
    ++checked;
    counterexamples += !is_self_predicting(b);
  }
  return {counterexamples == 0, std::to_string(counterexamples) + " counterexamples in " + std::to_string(checked)};
}

Outcome optimality() {
  const auto r = run_preset("optimality-check");
  std::ostringstream os;
  os << "log: " << r.values.at("log.refuted") << " refuted, " << r.values.at("log.inconclusive") << " excluded of 100; quadratic: "
     << r.values.at("quad.refuted") << " refuted, " << r.values.at("quad.inconclusive") << " excluded of 100";
  const bool ok = r.values.at("log.refuted") == 0 && r.values.at("quad.refuted") == 0 && r.values.at("log.inconclusive") < 5 &&
                  r.values.at("quad.inconclusive") < 5;
  return {ok, os.str()};
}

Outcome decomposition() {
  Rng rng(110);
  double worst = 0.0;
  std::size_t failed = 0, accepted_perturbed = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = 2 + uniform_index(rng, 5);
    const auto r = sample_distribution(rng, n, 1e-3);
    const double c = uniform_real(rng, 0.1, 10.0);
    std::vector<double> f(n);
    for (auto& v : f) v = uniform_real(rng, -5.0, 5.0);
    const auto table = tabulate(PaymentSpec::peer_truth_serum(c, TableShift{f}), r);
    const auto d = decompose_consensus(table, r);
    if (!d.ok) {
      ++failed;
      continue;
    }
    worst = std::max(worst, std::abs(d.scale - c));
    for (std::size_t k = 0; k < n; ++k) worst = std::max(worst, std::abs(d.shift[k] - f[k]));
  }
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = 2 + uniform_index(rng, 5);
    const auto r = sample_distribution(rng, n, 1e-3);
    std::vector<double> f(n);
    for (auto& v : f) v = uniform_real(rng, -5.0, 5.0);
    auto table = tabulate(PaymentSpec::peer_truth_serum(uniform_real(rng, 0.1, 10.0), TableShift{f}), r);
    const std::size_t a = uniform_index(rng, n);
    std::size_t b = uniform_index(rng, n - 1);
    if (b >= a) ++b;
    table(a, b) += (uniform01(rng) < 0.5 ? -1.0 : 1.0) * uniform_real(rng, 0.01, 1.0);
    accepted_perturbed += decompose_consensus(table, r).ok;
  }
  std::ostringstream os;
  os << "round-trip max error " << worst << ", " << failed << " rejected; perturbed tables accepted " << accepted_perturbed << "/1000";
  return {failed == 0 && worst <= 1e-10 && accepted_perturbed == 0, os.str()};
}

Outcome determinism() {
  std::size_t mismatches = 0;
  std::string names;
  for (const char* name : {"pts-example-1", "no-general-prior", "binary-informed"}) {
    const auto a = run_preset(name, 11), b = run_preset(name, 11);
    mismatches += a.csv != b.csv || a.csv.empty();
    names += std::string(names.empty() ? "" : ", ") + name;
  }
  return {mismatches == 0, names + ": " + std::to_string(mismatches) + " mismatching CSV outputs"};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const std::string& title, const std::function<Outcome()>& run) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << id << "] " << title << ": " << o.detail << std::endl;
  };

  const auto t0 = Clock::now();
  std::optional<PresetResult> conv;
  double conv_secs = 0.0;
  auto convergence = [&]() -> const PresetResult& {
    if (!conv) {
      const auto s = Clock::now();
      conv = run_preset("helpful-convergence");
      conv_secs = seconds_since(s);
    }
    return *conv;
  };

  report(1, "worked examples exact", worked_examples);
  report(2, "PTS arbitrage-free, output agreement not", arbitrage_free);
  report(3, "truthfulness threshold", truthfulness_threshold_check);
  report(4, "helpful convergence", [&] {
    const auto& r = convergence();
    return helpful(r, conv_secs);
  });
  report(5, "truthful baseline", [&] { return truthful_baseline(convergence()); });
  report(6, "impossibility reproductions", impossibility);
  report(7, "confusion-pair indistinguishability", confusion_pairs);
  report(8, "binary lemma", binary_lemma);
  report(9, "optimality (log and quadratic)", optimality);
  report(10, "consensus decomposition round-trip", decomposition);
  report(11, "determinism", determinism);
  std::cout << (failures ? "FAILED " : "ALL PASSED ") << "(" << failures << " failing, " << fmt(seconds_since(t0)) << " s)" << std::endl;
  return failures ? 1 : 0;
}
