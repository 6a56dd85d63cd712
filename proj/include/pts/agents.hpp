#pragma once

// Private belief-update types, reporting strategies and best responses.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "pts/mechanisms.hpp"
#include "pts/probability.hpp"

namespace pts {

/// Semantic problem in a scenario or profile description.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Update types

struct DirichletUpdate {
  DirichletParams params;
};

struct TableUpdate {
  BeliefState belief;
};

/// (1 - w) prior + w point_mass(o), with the point mass clamped by the floor.
struct ConvexMixUpdate {
  double weight = 0.5;
};

/// Belief that is a function of the public distribution. Used for the
/// counterexample constructions, where prior and posteriors are defined
/// relative to the current R.
struct PublicContingentUpdate {
  std::string name;
  std::function<BeliefState(const Distribution& public_dist)> belief;
};

using UpdateType = std::variant<DirichletUpdate, TableUpdate, ConvexMixUpdate, PublicContingentUpdate>;

inline std::string describe(const UpdateType& u) {
  return std::visit(
      [](const auto& v) -> std::string {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, DirichletUpdate>) return "dirichlet";
        else if constexpr (std::is_same_v<V, TableUpdate>) return "table";
        else if constexpr (std::is_same_v<V, ConvexMixUpdate>) return "convex_mix";
        else return "contingent:" + v.name;
      },
      u);
}

inline void require_matching_prior(const Distribution& own, const Distribution& supplied, const char* family) {
  require_same_size(own, supplied);
  for (std::size_t i = 0; i < own.size(); ++i) {
    if (std::abs(own[i] - supplied[i]) > 1e-9) {
      throw ConfigError(std::string(family) + " update carries a prior that differs from the supplied one");
    }
  }
}

inline Distribution convex_mix_posterior(double weight, const Distribution& prior, std::size_t observed) {
  if (!(weight > 0.0 && weight < 1.0)) throw ConfigError("convex_mix weight must lie in (0, 1)");
  const auto mass = Distribution::point_mass(prior.size(), observed);
  std::vector<double> mixed(prior.size());
  for (std::size_t i = 0; i < prior.size(); ++i) mixed[i] = (1.0 - weight) * prior[i] + weight * mass[i];
  return Distribution::from_weights(mixed);
}

/// The full belief state a type holds given its prior and the public distribution.
inline BeliefState belief_state(const UpdateType& u, const Distribution& prior, const Distribution& public_dist) {
  return std::visit(
      [&](const auto& v) -> BeliefState {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, DirichletUpdate>) {
          auto b = dirichlet_belief(v.params);
          require_matching_prior(b.prior(), prior, "dirichlet");
          return b;
        } else if constexpr (std::is_same_v<V, TableUpdate>) {
          require_matching_prior(v.belief.prior(), prior, "table");
          return v.belief;
        } else if constexpr (std::is_same_v<V, ConvexMixUpdate>) {
          std::vector<Distribution> rows;
          for (std::size_t o = 0; o < prior.size(); ++o) rows.push_back(convex_mix_posterior(v.weight, prior, o));
          return BeliefState(prior, std::move(rows));
        } else {
          return v.belief(public_dist);
        }
      },
      u);
}

/// Posterior of type `u` after observing `observed`.
inline Distribution apply_update(const UpdateType& u, const Distribution& prior, std::size_t observed) {
  if (observed >= prior.size()) throw std::domain_error("observation outside the answer space");
  return std::visit(
      [&](const auto& v) -> Distribution {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, DirichletUpdate>) {
          require_matching_prior(Distribution::from_weights(v.params.alpha()), prior, "dirichlet");
          return dirichlet_posterior(v.params, observed);
        } else if constexpr (std::is_same_v<V, TableUpdate>) {
          require_matching_prior(v.belief.prior(), prior, "table");
          return v.belief.posterior(observed);
        } else if constexpr (std::is_same_v<V, ConvexMixUpdate>) {
          return convex_mix_posterior(v.weight, prior, observed);
        } else {
          throw ConfigError("contingent update '" + v.name + "' needs the public distribution");
        }
      },
      u);
}

// ---------------------------------------------------------------------------
// Strategies and profiles

struct Truthful {};
struct Singleton {
  std::size_t value = 0;
};
/// Truthful when R is rho-close to the prior, otherwise the first
/// under-reported value.
struct Helpful {
  double rho = 0.1;
};
/// Best response to a truthful peer under the agent's own belief.
struct BestResponder {};

using Strategy = std::variant<Truthful, Singleton, Helpful, BestResponder>;

struct OwnPrior {};
struct TruthPrior {};
struct PublicPrior {};
/// weight Q + (1 - weight) R; informed with respect to R by construction.
struct InformedMixPrior {
  double weight = 0.5;
};
struct FixedPrior {
  Distribution prior;
};

using PriorModel = std::variant<OwnPrior, TruthPrior, PublicPrior, InformedMixPrior, FixedPrior>;

struct AgentProfile {
  std::string name = "agent";
  Strategy strategy = Truthful{};
  UpdateType update = ConvexMixUpdate{0.5};
  PriorModel prior = TruthPrior{};
};

inline Distribution resolve_prior(const AgentProfile& profile, const Distribution& truth, const Distribution& public_dist) {
  return std::visit(
      [&](const auto& p) -> Distribution {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, TruthPrior>) {
          return truth;
        } else if constexpr (std::is_same_v<P, PublicPrior>) {
          return public_dist;
        } else if constexpr (std::is_same_v<P, InformedMixPrior>) {
          std::vector<double> w(truth.size());
          for (std::size_t i = 0; i < w.size(); ++i) w[i] = p.weight * truth[i] + (1.0 - p.weight) * public_dist[i];
          return Distribution::from_weights(w);
        } else if constexpr (std::is_same_v<P, FixedPrior>) {
          return p.prior;
        } else {
          return std::visit(
              [&](const auto& u) -> Distribution {
                using U = std::decay_t<decltype(u)>;
                if constexpr (std::is_same_v<U, DirichletUpdate>) return Distribution::from_weights(u.params.alpha());
                else if constexpr (std::is_same_v<U, TableUpdate>) return u.belief.prior();
                else if constexpr (std::is_same_v<U, PublicContingentUpdate>) return u.belief(public_dist).prior();
                else throw ConfigError("convex_mix update has no prior of its own");
              },
              profile.update);
        }
      },
      profile.prior);
}

/// Deterministic peer behaviour: entry o is the report given observation o.
using PeerStrategy = std::vector<std::size_t>;

inline PeerStrategy truthful_peer(std::size_t n) {
  PeerStrategy s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = i;
  return s;
}

inline PeerStrategy singleton_peer(std::size_t n, std::size_t value) { return PeerStrategy(n, value); }

/// sum_x posterior[x] tau(report, peer(x), R).
template <PaymentFunction Pay>
double expected_payoff(std::size_t report, const Distribution& posterior, const Pay& pay, const Distribution& public_dist,
                       const PeerStrategy& peer) {
  if (peer.size() != posterior.size()) throw std::domain_error("peer strategy does not cover the answer space");
  double total = 0.0;
  for (std::size_t x = 0; x < posterior.size(); ++x) total += posterior[x] * pay(report, peer[x], public_dist);
  return total;
}

struct BestResponse {
  std::size_t report = 0;
  std::vector<double> payoffs;

  /// Payoff of the best report minus the best alternative.
  double margin() const {
    double second = -std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < payoffs.size(); ++r) {
      if (r != report) second = std::max(second, payoffs[r]);
    }
    return payoffs[report] - second;
  }
};

/// Argmax of expected payoff; ties go to the lowest index.
template <PaymentFunction Pay>
BestResponse best_response(const Distribution& posterior, const Pay& pay, const Distribution& public_dist, const PeerStrategy& peer) {
  BestResponse out;
  out.payoffs.resize(posterior.size());
  for (std::size_t r = 0; r < posterior.size(); ++r) {
    out.payoffs[r] = expected_payoff(r, posterior, pay, public_dist, peer);
    if (strictly_greater(out.payoffs[r], out.payoffs[out.report])) out.report = r;
  }
  return out;
}

template <PaymentFunction Pay>
BestResponse best_response(std::size_t observed, const AgentProfile& profile, const Distribution& prior, const Pay& pay,
                           const Distribution& public_dist, const PeerStrategy& peer) {
  const auto belief = belief_state(profile.update, prior, public_dist);
  return best_response(belief.posterior(observed), pay, public_dist, peer);
}

/// Truthful when R is rho-close to the prior; otherwise the first value in
/// answer order that R under-reports relative to the prior.
inline std::size_t helpful_report(std::size_t observed, const Distribution& prior, const Distribution& public_dist, double rho) {
  if (is_rho_close(public_dist, prior, rho)) return observed;
  for (std::size_t x = 0; x < prior.size(); ++x) {
    if (public_dist[x] < prior[x]) return x;
  }
  throw std::logic_error("no under-reported value although R is not rho-close to the prior");
}

/// Checks both helpfulness clauses for a deterministic strategy.
inline bool check_helpful(const PeerStrategy& strategy, const Distribution& prior, const Distribution& public_dist, double rho) {
  const std::size_t n = prior.size();
  if (is_rho_close(public_dist, prior, rho)) {
    for (std::size_t o = 0; o < n; ++o) {
      if (strategy[o] != o) return false;
    }
  }
  for (std::size_t o = 0; o < n; ++o) {
    const std::size_t x = strategy[o];
    if (x != o && public_dist[x] >= prior[x]) return false;
  }
  return true;
}

/// The report an agent with this profile submits.
template <PaymentFunction Pay>
std::size_t choose_report(const AgentProfile& profile, std::size_t observed, const Distribution& truth,
                          const Distribution& public_dist, const Pay& pay) {
  return std::visit(
      [&](const auto& s) -> std::size_t {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Truthful>) {
          return observed;
        } else if constexpr (std::is_same_v<S, Singleton>) {
          return s.value;
        } else if constexpr (std::is_same_v<S, Helpful>) {
          return helpful_report(observed, resolve_prior(profile, truth, public_dist), public_dist, s.rho);
        } else {
          const auto prior = resolve_prior(profile, truth, public_dist);
          return best_response(observed, profile, prior, pay, public_dist, truthful_peer(truth.size())).report;
        }
      },
      profile.strategy);
}

/// Strategy as an observation -> report table, for helpfulness checks.
template <PaymentFunction Pay>
PeerStrategy tabulate_strategy(const AgentProfile& profile, const Distribution& truth, const Distribution& public_dist,
                               const Pay& pay) {
  PeerStrategy s(truth.size());
  for (std::size_t o = 0; o < s.size(); ++o) s[o] = choose_report(profile, o, truth, public_dist, pay);
  return s;
}

}  // namespace pts
