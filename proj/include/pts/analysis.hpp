#pragma once

// Numeric checks of equilibrium, impossibility and optimality claims, belief
// samplers, and the scenario constructors used by the presets.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pts/agents.hpp"
#include "pts/mechanisms.hpp"
#include "pts/probability.hpp"
#include "pts/random.hpp"
#include "pts/simulation.hpp"

namespace pts {

enum class Verdict { holds, refuted, inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::refuted: return "refuted";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

struct VerificationReport {
  std::string claim;
  Verdict verdict = Verdict::inconclusive;
  std::string witness;  ///< re-checkable configuration when refuted
  std::vector<std::pair<std::string, std::string>> details;
  std::size_t samples = 1;
  std::uint64_t seed = 0;
  double margin = 0.0;

  bool holds() const { return verdict == Verdict::holds; }
  void add(std::string key, std::string value) { details.emplace_back(std::move(key), std::move(value)); }
};

namespace detail {

inline std::string join(const std::vector<double>& v) {
  std::ostringstream os;
  os.precision(12);
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? " " : "") << v[i];
  return os.str();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Truthfulness

/// min_o delta(o) / (2 + delta(o)): largest rho for which R rho-close to the
/// prior still makes PTS strictly truthful.
inline double truthfulness_threshold(const BeliefState& b) {
  if (!is_self_predicting(b)) throw std::domain_error("truthfulness threshold needs a self-predicting belief");
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t o = 0; o < b.size(); ++o) {
    const double gap = self_prediction_gap(b, o);
    best = std::min(best, gap / (2.0 + gap));
  }
  return best;
}

/// Truthful reporting is a strict best response to a truthful peer at every observation.
template <PaymentFunction Pay>
VerificationReport verify_truthful_equilibrium(const Pay& pay, const BeliefState& b, const Distribution& public_dist,
                                               double tol = kStrictMargin, std::string claim = "truthful-equilibrium") {
  VerificationReport rep;
  rep.claim = std::move(claim);
  rep.verdict = Verdict::holds;
  rep.margin = std::numeric_limits<double>::infinity();
  const auto peer = truthful_peer(b.size());
  for (std::size_t o = 0; o < b.size(); ++o) {
    const auto br = best_response(b.posterior(o), pay, public_dist, peer);
    double margin = std::numeric_limits<double>::infinity();
    std::size_t rival = o;
    for (std::size_t x = 0; x < b.size(); ++x) {
      if (x == o) continue;
      const double m = br.payoffs[o] - br.payoffs[x];
      if (m < margin) {
        margin = m;
        rival = x;
      }
    }
    rep.add("payoffs[o=" + std::to_string(o) + "]", detail::join(br.payoffs));
    if (margin < rep.margin) rep.margin = margin;
    if (!(margin > tol) && rep.verdict == Verdict::holds) {
      rep.verdict = Verdict::refuted;
      rep.witness = "observe " + std::to_string(o) + " -> report " + std::to_string(br.report == o ? rival : br.report) +
                    " payoffs " + detail::join(br.payoffs);
    }
  }
  return rep;
}

/// Sampler of admissible private types around a common prior.
using TypeSampler = std::function<BeliefState(Rng&, const Distribution& prior)>;

/// Ex-post check of a deterministic symmetric profile: for every sampled own
/// type and observation, no deviation beats the profile's report against a
/// peer playing the same profile. Sampled, so "holds" means holds on the sample.
template <PaymentFunction Pay>
VerificationReport verify_expost_equilibrium(const Pay& pay, const PeerStrategy& profile, const Distribution& prior,
                                             const TypeSampler& sampler, const Distribution& public_dist,
                                             std::size_t n_samples, std::uint64_t seed, double tol = kStrictMargin,
                                             std::string claim = "expost-equilibrium") {
  VerificationReport rep;
  rep.claim = std::move(claim);
  rep.samples = n_samples;
  rep.seed = seed;
  rep.verdict = Verdict::holds;
  rep.margin = std::numeric_limits<double>::infinity();
  Rng rng(seed);
  for (std::size_t s = 0; s < n_samples; ++s) {
    const auto type = sampler(rng, prior);
    for (std::size_t o = 0; o < type.size(); ++o) {
      const auto& post = type.posterior(o);
      const double own = expected_payoff(profile[o], post, pay, public_dist, profile);
      for (std::size_t r = 0; r < type.size(); ++r) {
        if (r == profile[o]) continue;
        const double dev = expected_payoff(r, post, pay, public_dist, profile);
        rep.margin = std::min(rep.margin, own - dev);
        if (!(own - dev > tol) && rep.verdict == Verdict::holds) {
          rep.verdict = Verdict::refuted;
          std::ostringstream os;
          os.precision(12);
          os << "sample " << s << " observe " << o << " deviate " << profile[o] << " -> " << r << " gain " << dev - own
             << " prior " << detail::join({prior.begin(), prior.end()}) << " posterior "
             << detail::join({post.begin(), post.end()});
          rep.witness = os.str();
        }
      }
    }
  }
  rep.add("worst_margin", std::to_string(rep.margin));
  return rep;
}

// ---------------------------------------------------------------------------
// Belief samplers

/// Dirichlet coefficients with total mass uniform on [N+1, max_sigma] and
/// every coefficient above 1.
inline DirichletParams sample_dirichlet_params(Rng& rng, std::size_t n, double max_sigma = 100.0) {
  const double sigma = uniform_real(rng, static_cast<double>(n) + 1.0, max_sigma);
  auto w = sample_simplex_weights(rng, n);
  double total = 0.0;
  for (double v : w) total += v;
  const double spare = sigma - static_cast<double>(n);
  std::vector<double> alpha(n);
  for (std::size_t i = 0; i < n; ++i) alpha[i] = 1.0 + spare * w[i] / total;
  return DirichletParams(std::move(alpha));
}

/// Posterior row o = prior * lift / Z with random lifts, redrawn until lift[o]
/// is the strict maximum; self-predicting by construction.
inline BeliefState sample_self_predicting_table(Rng& rng, const Distribution& prior) {
  const std::size_t n = prior.size();
  std::vector<Distribution> rows;
  for (std::size_t o = 0; o < n; ++o) {
    for (;;) {
      std::vector<double> lift(n);
      for (auto& l : lift) l = uniform_real(rng, 0.05, 2.0);
      const double own = lift[o];
      bool top = true;
      for (std::size_t x = 0; x < n; ++x) {
        if (x != o && lift[x] >= own * (1.0 - 1e-6)) top = false;
      }
      if (!top) continue;
      std::vector<double> w(n);
      for (std::size_t x = 0; x < n; ++x) w[x] = prior[x] * lift[x];
      rows.push_back(Distribution::from_weights(w));
      break;
    }
  }
  BeliefState b(prior, std::move(rows));
  if (!is_self_predicting(b)) return sample_self_predicting_table(rng, prior);
  return b;
}

/// Any posterior rows at all; used to exhibit failures outside the admissible class.
inline BeliefState sample_unrestricted_table(Rng& rng, const Distribution& prior) {
  std::vector<Distribution> rows;
  for (std::size_t o = 0; o < prior.size(); ++o) rows.push_back(sample_distribution(rng, prior.size(), 0.01));
  return BeliefState(prior, std::move(rows));
}

/// Mixed sampler: half Dirichlet beliefs, half self-predicting random tables
/// with a random prior.
inline BeliefState sample_self_predicting_belief(Rng& rng, std::size_t n) {
  if (uniform01(rng) < 0.5) return dirichlet_belief(sample_dirichlet_params(rng, n));
  return sample_self_predicting_table(rng, sample_distribution(rng, n, 0.02));
}

/// Dirichlet beliefs whose prior is the given one: alpha = sigma * prior.
inline TypeSampler dirichlet_type_sampler(double max_sigma = 100.0) {
  return [max_sigma](Rng& rng, const Distribution& prior) {
    const double lo = std::max(static_cast<double>(prior.size()) + 1.0, 1.0 / prior.min() + 1e-6);
    const double sigma = uniform_real(rng, lo, std::max(lo, max_sigma));
    std::vector<double> alpha(prior.size());
    for (std::size_t i = 0; i < alpha.size(); ++i) alpha[i] = sigma * prior[i];
    return dirichlet_belief(DirichletParams(std::move(alpha)));
  };
}

inline TypeSampler self_predicting_type_sampler() {
  return [](Rng& rng, const Distribution& prior) { return sample_self_predicting_table(rng, prior); };
}

inline TypeSampler unrestricted_type_sampler() {
  return [](Rng& rng, const Distribution& prior) { return sample_unrestricted_table(rng, prior); };
}

/// Random R that is rho-close to `prior`.
inline Distribution sample_rho_close(Rng& rng, const Distribution& prior, double rho) {
  for (double shrink = 1.0;; shrink *= 0.5) {
    std::vector<double> w(prior.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = prior[i] * (1.0 + shrink * rho * uniform_real(rng, -1.0, 1.0));
    auto r = Distribution::from_weights(w);
    if (is_rho_close(r, prior, rho)) return r;
    if (shrink < 1e-6) return prior;
  }
}

/// The rho-close R that is least favourable to truth-telling: raise R at the
/// observation with the smallest gap to (1+rho) Pr[o], lower its closest rival
/// to (1-rho) Pr[y], and spread the difference over the remaining values.
/// Empty when no such R stays rho-close.
inline std::optional<Distribution> adversarial_public(const BeliefState& b, double rho) {
  const std::size_t n = b.size();
  const auto& prior = b.prior();
  std::size_t worst_o = 0, worst_y = 1;
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t o = 0; o < n; ++o) {
    const auto& row = b.posterior(o);
    for (std::size_t y = 0; y < n; ++y) {
      if (y == o) continue;
      const double g = (row[o] / prior[o]) * (prior[y] / row[y]);
      if (g < worst) {
        worst = g;
        worst_o = o;
        worst_y = y;
      }
    }
  }
  std::vector<double> r(prior.begin(), prior.end());
  r[worst_o] = (1.0 + rho) * prior[worst_o];
  r[worst_y] = (1.0 - rho) * prior[worst_y];
  const double excess = rho * (prior[worst_o] - prior[worst_y]);
  double rest = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i != worst_o && i != worst_y) rest += prior[i];
  }
  if (std::abs(excess) > 0.0) {
    if (rest <= 0.0 || std::abs(excess) > rho * rest) return std::nullopt;
    for (std::size_t i = 0; i < n; ++i) {
      if (i != worst_o && i != worst_y) r[i] = prior[i] * (1.0 - excess / rest);
    }
  }
  auto out = Distribution::from_weights(r);
  // Renormalization can move entries by rounding; accept a hair of slack.
  if (!is_rho_close(out, prior, std::min(rho * (1.0 + 1e-9), 0.999999999))) return std::nullopt;
  return out;
}

// ---------------------------------------------------------------------------
// Prior-free impossibility

/// Two Dirichlet beliefs with alpha2 = alpha1 + e_x - e_y, so that belief 1
/// after observing x equals belief 2 after observing y.
inline std::pair<BeliefState, BeliefState> dirichlet_confusion_pair(const DirichletParams& alpha, std::size_t x, std::size_t y) {
  if (x == y) throw std::domain_error("confusion pair needs two distinct values");
  if (x >= alpha.size() || y >= alpha.size()) throw std::domain_error("value outside the answer space");
  if (!(alpha[y] > 2.0)) throw std::domain_error("confusion pair needs alpha_y > 2");
  std::vector<double> a2(alpha.alpha().begin(), alpha.alpha().end());
  a2[x] += 1.0;
  a2[y] -= 1.0;
  auto first = dirichlet_belief(alpha);
  auto second = dirichlet_belief(DirichletParams(std::move(a2)));
  const auto& p1 = first.posterior(x);
  const auto& p2 = second.posterior(y);
  for (std::size_t i = 0; i < p1.size(); ++i) {
    if (std::abs(p1[i] - p2[i]) > 1e-12) throw std::logic_error("confusion pair posteriors differ");
  }
  return {std::move(first), std::move(second)};
}

// ---------------------------------------------------------------------------
// Scenario constructors

namespace detail {

inline std::vector<double> scaled_counts(const Distribution& d, double mass) {
  std::vector<double> c(d.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = d[i] * mass;
  return c;
}

inline AnswerSpace xyz() { return AnswerSpace({"x", "y", "z"}); }

}  // namespace detail

/// Belief of the fixed-prior construction: Pr = (R[x], R[y] - eps, R[z] + eps),
/// point-mass posteriors after x and z, and after y the rescaled (y, z) rows
/// nudged by delta towards y.
inline BeliefState no_general_prior_belief(const Distribution& r, double epsilon, double delta) {
  const double px = r[0], py = r[1] - epsilon, pz = r[2] + epsilon;
  const double k = 1.0 / (py + pz);
  return BeliefState::from_rows({{px, py, pz}, {1.0, 0.0, 0.0}, {0.0, (py + delta) * k, (pz - delta) * k}, {0.0, 0.0, 1.0}});
}

/// Agents hold the fixed prior above while Q equals the asymmetric R they
/// started from; observers of y prefer reporting z, so the histogram drifts
/// away from Q.
inline SimConfig scenario_no_general_prior(double epsilon = 0.1, double delta = 0.001,
                                           const Distribution& start = Distribution::from_probabilities(std::vector<double>{0.5, 0.3, 0.2}),
                                           std::uint64_t seed = 0) {
  if (start.size() != 3) throw std::domain_error("construction uses three values");
  if (start[0] == start[1] || start[1] == start[2] || start[0] == start[2]) throw std::domain_error("R must be asymmetric");
  if (!(delta > 0.0 && delta < epsilon)) throw std::domain_error("need 0 < delta < epsilon");
  if (!(epsilon < std::min(start[1], 1.0 - start[2]))) throw std::domain_error("need epsilon < min(R[y], 1 - R[z])");

  AgentProfile agent;
  agent.name = "fixed-prior";
  agent.strategy = BestResponder{};
  agent.update = TableUpdate{no_general_prior_belief(start, epsilon, delta)};
  agent.prior = OwnPrior{};

  SimConfig c;
  c.answers = detail::xyz();
  c.truth = start;
  c.agents_per_round = 2;
  c.rounds = 25000;
  c.histogram_init = detail::scaled_counts(start, 100.0);
  c.payment = PaymentSpec::peer_truth_serum();
  c.population = {{agent, 2}};
  c.seed = seed;
  return c;
}

inline const Distribution& common_prior_truth() {
  static const Distribution q = Distribution::from_probabilities(std::vector<double>{0.5, 0.2, 0.3});
  return q;
}

/// Heterogeneous-prior construction. Each agent believes its peers hold
/// prior R; its own prior is shifted by epsilon and its posteriors depend on
/// whether R under- or over-represents y relative to Q.
inline BeliefState common_prior_belief(const Distribution& r, const Distribution& truth, double epsilon, double delta) {
  if (r[1] <= truth[1]) {
    // y under-represented: observers of z are pulled towards y.
    const double eps = std::min({epsilon, 0.5 * r[0], 0.5 * (1.0 - r[1])});
    const double px = r[0] - eps, py = r[1] + eps, pz = r[2];
    const double k = 1.0 / (py + pz);
    return BeliefState::from_rows(
        {{px, py, pz}, {1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, py * k - delta * pz, pz * k + delta * pz}});
  }
  // y over-represented: observers of y are pulled towards x.
  const double eps = std::min(epsilon, 0.5 * r[1]);
  const double px = r[0], py = r[1] - eps, pz = r[2] + eps;
  const double k = 1.0 / (px + py);
  return BeliefState::from_rows(
      {{px, py, pz}, {1.0, 0.0, 0.0}, {px * k - delta * px, py * k + delta * px, 0.0}, {0.0, 0.0, 1.0}});
}

inline SimConfig scenario_common_prior(double epsilon = 0.05, double delta = 0.001, std::uint64_t seed = 0) {
  if (!(delta > 0.0 && delta < epsilon)) throw std::domain_error("need 0 < delta < epsilon");
  const Distribution truth = common_prior_truth();

  AgentProfile agent;
  agent.name = "shifted-prior";
  agent.strategy = BestResponder{};
  agent.update = PublicContingentUpdate{"common-prior", [truth, epsilon, delta](const Distribution& r) {
                                          return common_prior_belief(r, truth, epsilon, delta);
                                        }};
  agent.prior = OwnPrior{};

  SimConfig c;
  c.answers = detail::xyz();
  c.truth = truth;
  c.agents_per_round = 2;
  c.rounds = 50000;
  c.histogram_init = {70.0, 20.0, 10.0};
  c.payment = PaymentSpec::peer_truth_serum();
  c.population = {{agent, 2}};
  c.seed = seed;
  return c;
}

inline const Distribution& convergence_truth() {
  static const Distribution q = Distribution::from_probabilities(std::vector<double>{0.4, 0.25, 0.15, 0.12, 0.08});
  return q;
}

/// Five values, common informed prior (Q + R)/2, canonical helpful agents.
inline SimConfig scenario_helpful_convergence(std::uint64_t seed = 0, double rho = 0.1) {
  AgentProfile agent;
  agent.name = "helpful";
  agent.strategy = Helpful{rho};
  agent.prior = InformedMixPrior{0.5};

  SimConfig c;
  c.answers = AnswerSpace::indexed(5);
  c.truth = convergence_truth();
  c.agents_per_round = 2;
  c.rounds = 50000;
  c.payment = PaymentSpec::peer_truth_serum();
  c.population = {{agent, 2}};
  c.seed = seed;
  c.rho = rho;
  return c;
}

inline SimConfig scenario_truthful_baseline(std::uint64_t seed = 0) {
  SimConfig c = scenario_helpful_convergence(seed);
  AgentProfile agent;
  agent.name = "truthful";
  c.population = {{agent, 2}};
  return c;
}

/// Binary answers, heterogeneous informed priors (different mixes of Q and R),
/// indicative convex-mix updates, best-response agents.
inline SimConfig scenario_binary_informed(std::uint64_t seed = 0) {
  std::vector<PopulationEntry> pop;
  const double mixes[] = {0.3, 0.6, 0.9};
  const double weights[] = {0.2, 0.35, 0.5};
  for (int i = 0; i < 3; ++i) {
    AgentProfile a;
    a.name = "informed-" + std::to_string(i);
    a.strategy = BestResponder{};
    a.update = ConvexMixUpdate{weights[i]};
    a.prior = InformedMixPrior{mixes[i]};
    pop.push_back({a, 1});
  }
  SimConfig c;
  c.answers = AnswerSpace({"yes", "no"});
  c.truth = Distribution::from_probabilities(std::vector<double>{0.7, 0.3});
  c.agents_per_round = 3;
  c.rounds = 20000;
  c.histogram_init = {1.0, 4.0};
  c.payment = PaymentSpec::peer_truth_serum();
  c.population = std::move(pop);
  c.seed = seed;
  return c;
}

// ---------------------------------------------------------------------------
// Optimality

struct CenterGain {
  double exact = 0.0;
  double first_order = 0.0;
};

/// Change in the center's score of R on `sample` after folding in `report` at
/// step t, exactly and to first order in eps = 1/(t+1).
inline CenterGain center_gain(const Distribution& r, std::size_t report, std::size_t sample, std::size_t t, const ScoringRule& rule) {
  if (t < 1) throw std::domain_error("center_gain needs t >= 1");
  const double eps = 1.0 / (static_cast<double>(t) + 1.0);
  const auto shifted = incremental_update(r, report, t);
  CenterGain g;
  g.exact = score(rule, shifted, sample) - score(rule, r, sample);
  const double match = report == sample ? 1.0 : 0.0;
  if (rule.kind == ScoringKind::logarithmic) {
    g.first_order = rule.scale * eps * (match / r[report] - 1.0);
  } else {
    double sq = 0.0;
    for (double v : r) sq += v * v;
    g.first_order = rule.scale * eps * (2.0 * match - 2.0 * r[sample] - 2.0 * r[report] + 2.0 * sq);
  }
  return g;
}

inline constexpr double kDecisionMargin = 1e-9;
inline constexpr double kTieTolerance = 1e-12;

/// For every observation, the report that maximizes the center's expected
/// exact gain must be the report that maximizes the expected payment of the
/// matching mechanism (PTS for the log rule, quadratic PTS for the quadratic
/// rule) against a truthful peer.
inline VerificationReport verify_optimality(const Distribution& r, const BeliefState& b, std::size_t t, const ScoringRule& rule,
                                            std::string claim = "optimality") {
  VerificationReport rep;
  rep.claim = std::move(claim);
  rep.verdict = Verdict::holds;
  rep.margin = std::numeric_limits<double>::infinity();
  const std::size_t n = b.size();
  const auto pay = rule.kind == ScoringKind::logarithmic ? PaymentSpec::peer_truth_serum(rule.scale) : PaymentSpec::quadratic_pts();
  const auto peer = truthful_peer(n);
  bool inconclusive = false;

  // Reports within kTieTolerance of the maximum form the argmax set; the gap
  // to the best report outside the set is the decision margin.
  struct Choice {
    std::vector<std::size_t> argmax;
    double margin = std::numeric_limits<double>::infinity();
  };
  auto choose = [](const std::vector<double>& v) {
    const double top = *std::max_element(v.begin(), v.end());
    Choice c;
    double outside = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (top - v[i] <= kTieTolerance) {
        c.argmax.push_back(i);
      } else {
        outside = std::max(outside, v[i]);
      }
    }
    c.margin = top - outside;
    return c;
  };
  auto show = [](const std::vector<std::size_t>& v) {
    std::string s;
    for (auto i : v) s += (s.empty() ? "" : ",") + std::to_string(i);
    return s;
  };

  for (std::size_t o = 0; o < n; ++o) {
    const auto& post = b.posterior(o);
    std::vector<double> exact(n, 0.0), linear(n, 0.0), payment(n, 0.0);
    for (std::size_t report = 0; report < n; ++report) {
      for (std::size_t s = 0; s < n; ++s) {
        const auto g = center_gain(r, report, s, t, rule);
        exact[report] += post[s] * g.exact;
        linear[report] += post[s] * g.first_order;
      }
      payment[report] = expected_payoff(report, post, pay, r, peer);
    }
    const auto gain = choose(exact);
    const auto paid = choose(payment);
    double approx_err = 0.0;
    for (std::size_t i = 0; i < n; ++i) approx_err = std::max(approx_err, std::abs(exact[i] - linear[i]));

    rep.add("o=" + std::to_string(o), "gain_argmax " + show(gain.argmax) + " payment_argmax " + show(paid.argmax) +
                                          " gains " + detail::join(exact) + " payments " + detail::join(payment));
    rep.margin = std::min(rep.margin, gain.margin);
    if (gain.margin <= kDecisionMargin || paid.margin <= kDecisionMargin || approx_err >= 0.5 * gain.margin) {
      inconclusive = true;
      continue;
    }
    if (gain.argmax != paid.argmax && rep.verdict == Verdict::holds) {
      rep.verdict = Verdict::refuted;
      rep.witness = "observe " + std::to_string(o) + ": gain argmax " + show(gain.argmax) + " vs payment argmax " +
                    show(paid.argmax);
    }
  }
  if (rep.verdict == Verdict::holds && inconclusive) rep.verdict = Verdict::inconclusive;
  return rep;
}

}  // namespace pts
