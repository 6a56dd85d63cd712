#pragma once

// Finite distributions over a categorical answer space, belief states and the
// predicates that classify how an agent's belief reacts to an observation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace pts {

/// Smallest probability any entry of a Distribution may hold.
inline constexpr double kProbabilityFloor = 1e-9;

/// Margin used for strict comparisons: a > b means a - b > kStrictMargin.
inline constexpr double kStrictMargin = 1e-12;

/// Tolerance on the total mass of a Distribution.
inline constexpr double kMassTolerance = 1e-12;

inline bool strictly_greater(double a, double b) { return a - b > kStrictMargin; }

/// Ordered set of answer labels. The order is used for tie-breaking and for
/// picking the first under-reported value.
class AnswerSpace {
 public:
  AnswerSpace() = default;

  explicit AnswerSpace(std::vector<std::string> labels) : labels_(std::move(labels)) {
    if (labels_.size() < 2) throw std::domain_error("answer space needs at least 2 values");
    std::unordered_set<std::string> seen;
    for (const auto& l : labels_) {
      if (l.empty()) throw std::domain_error("empty answer label");
      if (!seen.insert(l).second) throw std::domain_error("duplicate answer label '" + l + "'");
    }
  }

  /// Labels x1..xN.
  static AnswerSpace indexed(std::size_t n) {
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < n; ++i) labels.push_back("x" + std::to_string(i + 1));
    return AnswerSpace(std::move(labels));
  }

  std::size_t size() const { return labels_.size(); }
  const std::string& label(std::size_t i) const { return labels_.at(i); }
  const std::vector<std::string>& labels() const { return labels_; }

  std::size_t index_of(const std::string& label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) throw std::domain_error("unknown answer '" + label + "'");
    return static_cast<std::size_t>(it - labels_.begin());
  }

  bool contains(const std::string& label) const {
    return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
  }

  friend bool operator==(const AnswerSpace&, const AnswerSpace&) = default;

 private:
  std::vector<std::string> labels_;
};

/// Fully mixed probability vector. Every entry is at least kProbabilityFloor
/// and the entries sum to one.
class Distribution {
 public:
  Distribution() = default;

  /// Normalizes nonnegative weights, then lifts entries below the floor and
  /// rescales the rest so that the floor survives renormalization.
  static Distribution from_weights(std::span<const double> weights) {
    if (weights.size() < 2) throw std::domain_error("distribution needs at least 2 entries");
    double total = 0.0;
    for (double w : weights) {
      if (!std::isfinite(w) || w < 0.0) throw std::domain_error("weights must be finite and nonnegative");
      total += w;
    }
    if (!(total > 0.0)) throw std::domain_error("cannot normalize an all-zero vector");

    std::vector<double> p(weights.begin(), weights.end());
    // Already-normalized input is kept bit-for-bit so that emit/parse is idempotent.
    if (std::abs(total - 1.0) > 4.0 * std::numeric_limits<double>::epsilon()) {
      for (double& v : p) v /= total;
    }

    std::vector<bool> pinned(p.size(), false);
    for (;;) {
      std::size_t n_pinned = 0;
      double free_mass = 0.0;
      bool changed = false;
      for (std::size_t i = 0; i < p.size(); ++i) {
        if (!pinned[i] && p[i] < kProbabilityFloor) {
          pinned[i] = true;
          changed = true;
        }
        if (pinned[i]) {
          ++n_pinned;
        } else {
          free_mass += p[i];
        }
      }
      if (!changed) break;
      const double target = 1.0 - static_cast<double>(n_pinned) * kProbabilityFloor;
      for (std::size_t i = 0; i < p.size(); ++i) {
        p[i] = pinned[i] ? kProbabilityFloor : p[i] * target / free_mass;
      }
    }
    return Distribution(std::move(p));
  }

  /// Accepts an explicit probability vector (e.g. a belief table row). The
  /// input may contain zeros; it must sum to one within input_tolerance.
  static Distribution from_probabilities(std::span<const double> probs, double input_tolerance = 1e-9) {
    double total = std::accumulate(probs.begin(), probs.end(), 0.0);
    if (std::abs(total - 1.0) > input_tolerance) {
      throw std::domain_error("probabilities sum to " + std::to_string(total) + ", expected 1");
    }
    return from_weights(probs);
  }

  static Distribution uniform(std::size_t n) { return from_weights(std::vector<double>(n, 1.0)); }

  /// Point mass at `index`, clamped by the floor.
  static Distribution point_mass(std::size_t n, std::size_t index) {
    std::vector<double> w(n, 0.0);
    w.at(index) = 1.0;
    return from_weights(w);
  }

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  double at(std::size_t i) const { return probs_.at(i); }
  std::span<const double> values() const { return probs_; }
  auto begin() const { return probs_.begin(); }
  auto end() const { return probs_.end(); }

  double min() const { return *std::min_element(probs_.begin(), probs_.end()); }

  friend bool operator==(const Distribution&, const Distribution&) = default;

 private:
  explicit Distribution(std::vector<double> p) : probs_(std::move(p)) {}

  std::vector<double> probs_;
};

inline Distribution normalize(std::span<const double> counts) { return Distribution::from_weights(counts); }

inline void require_same_size(const Distribution& a, const Distribution& b) {
  if (a.size() != b.size()) throw std::domain_error("distributions over different answer spaces");
}

inline double l1_distance(const Distribution& p, const Distribution& q) {
  require_same_size(p, q);
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) d += std::abs(p[i] - q[i]);
  return d;
}

/// True iff every R[x] lies in [(1-rho) P[x], (1+rho) P[x]].
inline bool is_rho_close(const Distribution& r, const Distribution& p, double rho) {
  if (!(rho >= 0.0 && rho < 1.0)) throw std::domain_error("rho must lie in [0, 1)");
  require_same_size(r, p);
  for (std::size_t i = 0; i < r.size(); ++i) {
    // closed interval; the slack absorbs rounding in the bounds themselves
    const double slack = 1e-12 * p[i];
    if (r[i] < (1.0 - rho) * p[i] - slack || r[i] > (1.0 + rho) * p[i] + slack) return false;
  }
  return true;
}

/// The prior never sits on the far side of the public distribution from the
/// truth: (R[x] - Q[x]) (R[x] - Pr[x]) >= 0 for every x.
inline bool is_informed(const Distribution& prior, const Distribution& r, const Distribution& q) {
  require_same_size(prior, r);
  require_same_size(r, q);
  for (std::size_t i = 0; i < r.size(); ++i) {
    if ((r[i] - q[i]) * (r[i] - prior[i]) < 0.0) return false;
  }
  return true;
}

inline bool is_rho_informed(const Distribution& prior, const Distribution& r, const Distribution& q, double rho) {
  return is_informed(prior, r, q) || is_rho_close(r, prior, rho);
}

/// A prior plus one posterior row per possible observation.
class BeliefState {
 public:
  BeliefState() = default;

  BeliefState(Distribution prior, std::vector<Distribution> posteriors)
      : prior_(std::move(prior)), posteriors_(std::move(posteriors)) {
    if (posteriors_.size() != prior_.size()) {
      throw std::domain_error("belief state needs one posterior row per answer");
    }
    for (const auto& row : posteriors_) require_same_size(row, prior_);
  }

  /// Builds a belief from raw rows; row 0 is the prior, row 1+o the posterior given o.
  static BeliefState from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.size() < 3) throw std::domain_error("belief table needs a prior row and at least 2 posterior rows");
    auto prior = Distribution::from_probabilities(rows.front());
    std::vector<Distribution> post;
    for (std::size_t i = 1; i < rows.size(); ++i) post.push_back(Distribution::from_probabilities(rows[i]));
    return BeliefState(std::move(prior), std::move(post));
  }

  std::size_t size() const { return prior_.size(); }
  const Distribution& prior() const { return prior_; }
  const Distribution& posterior(std::size_t observed) const { return posteriors_.at(observed); }
  const std::vector<Distribution>& posteriors() const { return posteriors_; }

  friend bool operator==(const BeliefState&, const BeliefState&) = default;

 private:
  Distribution prior_;
  std::vector<Distribution> posteriors_;
};

inline bool is_self_dominating(const BeliefState& b) {
  for (std::size_t o = 0; o < b.size(); ++o) {
    const auto& row = b.posterior(o);
    for (std::size_t x = 0; x < b.size(); ++x) {
      if (x != o && !strictly_greater(row[o], row[x])) return false;
    }
  }
  return true;
}

inline bool is_self_predicting(const BeliefState& b) {
  const auto& prior = b.prior();
  for (std::size_t o = 0; o < b.size(); ++o) {
    const auto& row = b.posterior(o);
    for (std::size_t x = 0; x < b.size(); ++x) {
      if (x != o && !strictly_greater(row[o] / prior[o], row[x] / prior[x])) return false;
    }
  }
  return true;
}

/// min over x != o of (Pr[o|o]/Pr[o]) (Pr[x]/Pr[x|o]) - 1. Positive exactly
/// when the update is self-predicting at o.
inline double self_prediction_gap(const BeliefState& b, std::size_t observed) {
  const auto& prior = b.prior();
  const auto& row = b.posterior(observed);
  const double own_lift = row[observed] / prior[observed];
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t x = 0; x < b.size(); ++x) {
    if (x == observed) continue;
    gap = std::min(gap, own_lift * (prior[x] / row[x]) - 1.0);
  }
  return gap;
}

/// Self-predicting with respect to the quadratic score: additive increases.
inline bool is_linear_self_predicting(const BeliefState& b) {
  const auto& prior = b.prior();
  for (std::size_t o = 0; o < b.size(); ++o) {
    const auto& row = b.posterior(o);
    for (std::size_t x = 0; x < b.size(); ++x) {
      if (x != o && !strictly_greater(row[o] - prior[o], row[x] - prior[x])) return false;
    }
  }
  return true;
}

inline bool is_indicative(const BeliefState& b, std::size_t observed) {
  return strictly_greater(b.posterior(observed)[observed], b.prior()[observed]);
}

/// Dirichlet hyperparameters of a categorical belief model. All entries > 1.
class DirichletParams {
 public:
  explicit DirichletParams(std::vector<double> alpha) : alpha_(std::move(alpha)) {
    if (alpha_.size() < 2) throw std::domain_error("dirichlet needs at least 2 coefficients");
    for (double a : alpha_) {
      if (!std::isfinite(a) || !(a > 1.0)) throw std::domain_error("dirichlet coefficients must exceed 1");
    }
    sigma_ = std::accumulate(alpha_.begin(), alpha_.end(), 0.0);
  }

  std::size_t size() const { return alpha_.size(); }
  double operator[](std::size_t i) const { return alpha_[i]; }
  std::span<const double> alpha() const { return alpha_; }
  double sigma() const { return sigma_; }

  friend bool operator==(const DirichletParams&, const DirichletParams&) = default;

 private:
  std::vector<double> alpha_;
  double sigma_ = 0.0;
};

inline Distribution dirichlet_posterior(const DirichletParams& params, std::size_t observed) {
  std::vector<double> a(params.alpha().begin(), params.alpha().end());
  a.at(observed) += 1.0;
  return Distribution::from_weights(a);
}

/// Prior alpha/Sigma and posterior rows (alpha + e_k)/(Sigma + 1) from a
/// single conjugate update.
inline BeliefState dirichlet_belief(const DirichletParams& params) {
  std::vector<Distribution> rows;
  rows.reserve(params.size());
  for (std::size_t k = 0; k < params.size(); ++k) rows.push_back(dirichlet_posterior(params, k));
  return BeliefState(Distribution::from_weights(params.alpha()), std::move(rows));
}

}  // namespace pts
