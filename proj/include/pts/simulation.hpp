#pragma once

// Round-based elicitation game: agents observe, report against the frozen
// public histogram, are paired with a random peer and paid; the center then
// publishes the updated histogram.

#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pts/agents.hpp"
#include "pts/mechanisms.hpp"
#include "pts/probability.hpp"
#include "pts/random.hpp"

namespace pts {

struct PopulationEntry {
  AgentProfile profile;
  std::size_t count = 1;
};

struct SimConfig {
  AnswerSpace answers;
  Distribution truth;
  std::size_t agents_per_round = 2;
  std::size_t rounds = 1000;
  std::vector<double> histogram_init;  ///< empty means all ones
  PaymentSpec payment;
  std::vector<PopulationEntry> population;  ///< empty means agents_per_round truthful agents
  std::uint64_t seed = 0;
  double rho = 0.1;

  std::vector<double> initial_counts() const {
    if (!histogram_init.empty()) return histogram_init;
    return std::vector<double>(answers.size(), 1.0);
  }

  /// One profile per agent slot, in population order.
  std::vector<AgentProfile> roster() const {
    std::vector<AgentProfile> out;
    if (population.empty()) {
      AgentProfile honest;
      honest.name = "truthful";
      out.assign(agents_per_round, honest);
      return out;
    }
    for (const auto& e : population) {
      for (std::size_t i = 0; i < e.count; ++i) out.push_back(e.profile);
    }
    return out;
  }

  void validate() const {
    const std::size_t n = answers.size();
    if (n < 2) throw ConfigError("answers: need at least 2 values");
    if (truth.size() != n) throw ConfigError("truth: size differs from the answer space");
    if (agents_per_round < 2) throw ConfigError("agents_per_round: M > 1 agents are needed for peer comparison");
    if (rounds < 1) throw ConfigError("rounds: at least one round is needed");
    const auto init = initial_counts();
    if (init.size() != n) throw ConfigError("histogram_init: size differs from the answer space");
    for (double c : init) {
      if (!(c > 0.0) || !std::isfinite(c)) throw ConfigError("histogram_init: counts must be strictly positive");
    }
    if (!(rho >= 0.0 && rho < 1.0)) throw ConfigError("rho: must lie in [0, 1)");
    if (!population.empty()) {
      std::size_t total = 0;
      for (const auto& e : population) {
        total += e.count;
        if (const auto* s = std::get_if<Singleton>(&e.profile.strategy); s && s->value >= n) {
          throw ConfigError("population." + e.profile.name + ": singleton value outside the answer space");
        }
        if (const auto* h = std::get_if<Helpful>(&e.profile.strategy); h && !(h->rho >= 0.0 && h->rho < 1.0)) {
          throw ConfigError("population." + e.profile.name + ": rho must lie in [0, 1)");
        }
      }
      if (total != agents_per_round) throw ConfigError("population: counts must add up to agents_per_round");
    }
  }
};

/// Public histogram H^t and its normalization R^t.
struct HistogramState {
  std::vector<double> counts;
  std::size_t t = 0;

  Distribution public_dist() const { return normalize(counts); }
  double total() const { return std::accumulate(counts.begin(), counts.end(), 0.0); }
};

struct RoundRecord {
  std::size_t t = 0;
  Distribution public_dist;  ///< R^t every agent faced in this round
  std::vector<std::size_t> observations;
  std::vector<std::size_t> reports;
  std::vector<std::size_t> references;  ///< index of the peer whose report was used
  std::vector<double> rewards;
  double l1 = 0.0;  ///< l1(R^t, Q)

  double mean_reward() const {
    return rewards.empty() ? 0.0 : std::accumulate(rewards.begin(), rewards.end(), 0.0) / static_cast<double>(rewards.size());
  }
};

struct SimSummary {
  std::vector<double> report_frequencies;
  std::map<std::string, double> reward_by_profile;
  Distribution final_public_dist;
  double final_l1 = 0.0;
  std::size_t total_reports = 0;
};

struct SimTrace {
  AnswerSpace answers;
  std::uint64_t seed = 0;
  std::vector<RoundRecord> rounds;
  SimSummary summary;

  /// Fraction of `value` among the last `window` reports (all reports when window is 0).
  double tail_frequency(std::size_t value, std::size_t window) const {
    std::size_t seen = 0, hits = 0;
    for (auto it = rounds.rbegin(); it != rounds.rend(); ++it) {
      for (auto r = it->reports.rbegin(); r != it->reports.rend(); ++r) {
        if (window != 0 && seen == window) return static_cast<double>(hits) / static_cast<double>(seen);
        ++seen;
        hits += (*r == value);
      }
    }
    return seen == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(seen);
  }
};

/// Histogram-shift form of adding one report x to a histogram of t reports:
/// R'[x] = R[x] + (1 - R[x])/(t+1), R'[y] = R[y] - R[y]/(t+1).
inline Distribution incremental_update(const Distribution& r, std::size_t x, std::size_t t) {
  if (t < 1) throw std::domain_error("incremental_update needs t >= 1");
  if (x >= r.size()) throw std::domain_error("report outside the answer space");
  const double eps = 1.0 / (static_cast<double>(t) + 1.0);
  std::vector<double> out(r.size());
  for (std::size_t y = 0; y < r.size(); ++y) out[y] = y == x ? r[y] + eps * (1.0 - r[y]) : r[y] - eps * r[y];
  return Distribution::from_weights(out);
}

/// One round. Observations and peer assignments are drawn from `rng` up
/// front, in agent order, so the draw sequence does not depend on strategies.
template <PaymentFunction Pay>
std::pair<RoundRecord, HistogramState> run_round(const HistogramState& state, const std::vector<AgentProfile>& agents,
                                                 const Distribution& truth, const Pay& pay, Rng& rng) {
  const std::size_t m = agents.size();
  if (m < 2) throw std::domain_error("a round needs at least 2 agents");
  RoundRecord rec;
  rec.t = state.t;
  rec.public_dist = state.public_dist();
  rec.l1 = l1_distance(rec.public_dist, truth);

  rec.observations.resize(m);
  for (auto& o : rec.observations) o = sample_categorical(rng, truth);
  rec.references.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    std::size_t j = uniform_index(rng, m - 1);
    if (j >= i) ++j;
    rec.references[i] = j;
  }

  rec.reports.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    rec.reports[i] = choose_report(agents[i], rec.observations[i], truth, rec.public_dist, pay);
  }
  rec.rewards.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    rec.rewards[i] = pay(rec.reports[i], rec.reports[rec.references[i]], rec.public_dist);
  }

  HistogramState next = state;
  for (auto r : rec.reports) next.counts[r] += 1.0;
  next.t = state.t + 1;
  return {std::move(rec), std::move(next)};
}

inline SimTrace run_simulation(const SimConfig& config) {
  config.validate();
  const auto agents = config.roster();
  Rng rng(config.seed);

  SimTrace trace;
  trace.answers = config.answers;
  trace.seed = config.seed;
  trace.rounds.reserve(config.rounds);

  HistogramState state{config.initial_counts(), 0};
  std::vector<double> freq(config.answers.size(), 0.0);
  for (std::size_t t = 0; t < config.rounds; ++t) {
    auto [rec, next] = run_round(state, agents, config.truth, config.payment, rng);
    for (std::size_t i = 0; i < agents.size(); ++i) {
      freq[rec.reports[i]] += 1.0;
      trace.summary.reward_by_profile[agents[i].name] += rec.rewards[i];
    }
    trace.rounds.push_back(std::move(rec));
    state = std::move(next);
  }

  trace.summary.total_reports = config.rounds * agents.size();
  for (auto& f : freq) f /= static_cast<double>(trace.summary.total_reports);
  trace.summary.report_frequencies = std::move(freq);
  trace.summary.final_public_dist = state.public_dist();
  trace.summary.final_l1 = l1_distance(trace.summary.final_public_dist, config.truth);
  return trace;
}

}  // namespace pts
