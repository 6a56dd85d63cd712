#pragma once

// Peer-consistency payment functions tau(r, rr, R), proper scoring rules and
// structural checks on payment tables.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "pts/probability.hpp"

namespace pts {

enum class MechanismKind { output_agreement, pts, pts_quadratic };

inline const char* to_string(MechanismKind k) {
  switch (k) {
    case MechanismKind::output_agreement: return "output_agreement";
    case MechanismKind::pts: return "pts";
    case MechanismKind::pts_quadratic: return "pts_quadratic";
  }
  return "?";
}

/// C is a fixed positive constant.
struct FixedScale {
  double value = 1.0;
};

/// C = alpha * min_x R[x], evaluated against the R in force at payment time.
struct MinProbabilityScale {
  double alpha = 1.0;
};

using PaymentScale = std::variant<FixedScale, MinProbabilityScale>;

/// f(rr) = beta for every reference report.
struct ConstantShift {
  double beta = 0.0;
};

/// f(rr) = -C, which makes the expected payment under R exactly zero.
struct NegatedScaleShift {};

/// f given value by value.
struct TableShift {
  std::vector<double> values;
};

using PaymentShift = std::variant<ConstantShift, NegatedScaleShift, TableShift>;

inline double output_agreement_pay(std::size_t report, std::size_t reference, double scale) {
  if (!(scale > 0.0)) throw std::domain_error("output agreement needs C > 0");
  return report == reference ? scale : 0.0;
}

/// 2 - 2R[r] on agreement, -2R[r] otherwise.
inline double pts_quadratic_pay(std::size_t report, std::size_t reference, const Distribution& public_dist) {
  const double r = public_dist.at(report);
  return report == reference ? 2.0 - 2.0 * r : -2.0 * r;
}

/// Mechanism identity plus its scale C and report-independent shift f.
struct PaymentSpec {
  MechanismKind kind = MechanismKind::pts;
  PaymentScale scale = FixedScale{1.0};
  PaymentShift shift = ConstantShift{0.0};

  static PaymentSpec output_agreement(double c = 1.0) { return {MechanismKind::output_agreement, FixedScale{c}, ConstantShift{0.0}}; }
  static PaymentSpec peer_truth_serum(double c = 1.0, PaymentShift f = ConstantShift{0.0}) {
    return {MechanismKind::pts, FixedScale{c}, std::move(f)};
  }
  static PaymentSpec quadratic_pts() { return {MechanismKind::pts_quadratic, FixedScale{1.0}, ConstantShift{0.0}}; }

  double scale_at(const Distribution& public_dist) const {
    double c = std::visit(
        [&](const auto& s) -> double {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, FixedScale>) {
            return s.value;
          } else {
            return s.alpha * public_dist.min();
          }
        },
        scale);
    if (kind != MechanismKind::pts_quadratic && !(c > 0.0)) throw std::domain_error("payment scale C must be positive");
    return c;
  }

  double shift_at(std::size_t reference, const Distribution& public_dist) const {
    return std::visit(
        [&](const auto& f) -> double {
          using F = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<F, ConstantShift>) {
            return f.beta;
          } else if constexpr (std::is_same_v<F, NegatedScaleShift>) {
            return -scale_at(public_dist);
          } else {
            return f.values.at(reference);
          }
        },
        shift);
  }

  /// tau(report, reference, R).
  double operator()(std::size_t report, std::size_t reference, const Distribution& public_dist) const {
    const double c = scale_at(public_dist);
    const double f = shift_at(reference, public_dist);
    switch (kind) {
      case MechanismKind::output_agreement:
        return f + output_agreement_pay(report, reference, c);
      case MechanismKind::pts:
        return f + (report == reference ? c / public_dist.at(report) : 0.0);
      case MechanismKind::pts_quadratic:
        return f + c * pts_quadratic_pay(report, reference, public_dist);
    }
    return 0.0;
  }
};

/// f(rr) + C/R[r] when r == rr, f(rr) otherwise.
inline double pts_pay(std::size_t report, std::size_t reference, const Distribution& public_dist, const PaymentSpec& spec) {
  if (spec.kind != MechanismKind::pts) throw std::domain_error("pts_pay called with a non-PTS spec");
  if (public_dist.min() < kProbabilityFloor * (1.0 - 1e-9)) throw std::domain_error("public distribution is not fully mixed");
  return spec(report, reference, public_dist);
}

template <class F>
concept PaymentFunction = requires(const F& f, std::size_t r, std::size_t rr, const Distribution& d) {
  { f(r, rr, d) } -> std::convertible_to<double>;
};

/// Payments for a fixed R; row = own report, column = reference report.
class PaymentTable {
 public:
  PaymentTable() = default;
  explicit PaymentTable(std::size_t n) : n_(n), cells_(n * n, 0.0) {}
  explicit PaymentTable(const std::vector<std::vector<double>>& rows) : PaymentTable(rows.size()) {
    for (std::size_t r = 0; r < n_; ++r) {
      if (rows[r].size() != n_) throw std::domain_error("payment table must be square");
      for (std::size_t c = 0; c < n_; ++c) (*this)(r, c) = rows[r][c];
    }
  }

  std::size_t size() const { return n_; }
  double& operator()(std::size_t report, std::size_t reference) { return cells_[report * n_ + reference]; }
  double operator()(std::size_t report, std::size_t reference) const { return cells_[report * n_ + reference]; }

  friend bool operator==(const PaymentTable&, const PaymentTable&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> cells_;
};

template <PaymentFunction Pay>
PaymentTable tabulate(const Pay& pay, const Distribution& public_dist) {
  PaymentTable t(public_dist.size());
  for (std::size_t r = 0; r < t.size(); ++r) {
    for (std::size_t rr = 0; rr < t.size(); ++rr) t(r, rr) = pay(r, rr, public_dist);
  }
  return t;
}

enum class ScoringKind { logarithmic, quadratic };

struct ScoringRule {
  ScoringKind kind = ScoringKind::logarithmic;
  double scale = 1.0;
};

inline const char* to_string(ScoringKind k) { return k == ScoringKind::logarithmic ? "logarithmic" : "quadratic"; }

/// C log R[x] or C (2 R[x] - sum_y R[y]^2).
inline double score(const ScoringRule& rule, const Distribution& public_dist, std::size_t outcome) {
  if (!(rule.scale > 0.0)) throw std::domain_error("scoring rule scale must be positive");
  if (rule.kind == ScoringKind::logarithmic) return rule.scale * std::log(public_dist.at(outcome));
  double sq = 0.0;
  for (double v : public_dist) sq += v * v;
  return rule.scale * (2.0 * public_dist.at(outcome) - sq);
}

inline constexpr double kStructuralTolerance = 1e-9;

struct ArbitrageCheck {
  bool arbitrage_free = false;
  double constant = 0.0;              ///< common expected payment when arbitrage_free
  std::vector<double> expected;       ///< sum_rr R[rr] tau(r, rr) per report r
  std::size_t best_report = 0;
  std::size_t worst_report = 0;
  double spread = 0.0;
};

/// Expected payment of an agent whose belief equals R must not depend on the report.
inline ArbitrageCheck check_arbitrage_free(const PaymentTable& table, const Distribution& public_dist,
                                           double tol = kStructuralTolerance) {
  if (table.size() != public_dist.size()) throw std::domain_error("payment table and R differ in size");
  ArbitrageCheck out;
  out.expected.assign(table.size(), 0.0);
  for (std::size_t r = 0; r < table.size(); ++r) {
    for (std::size_t rr = 0; rr < table.size(); ++rr) out.expected[r] += public_dist[rr] * table(r, rr);
  }
  auto [lo, hi] = std::minmax_element(out.expected.begin(), out.expected.end());
  out.worst_report = static_cast<std::size_t>(lo - out.expected.begin());
  out.best_report = static_cast<std::size_t>(hi - out.expected.begin());
  out.spread = *hi - *lo;
  out.arbitrage_free = out.spread <= tol;
  out.constant = out.expected.front();
  return out;
}

template <PaymentFunction Pay>
ArbitrageCheck check_arbitrage_free(const Pay& pay, const Distribution& public_dist, double tol = kStructuralTolerance) {
  return check_arbitrage_free(tabulate(pay, public_dist), public_dist, tol);
}

/// Outcome of writing tau(r, rr) = f(rr) + [r == rr] C / R[r].
struct ConsensusDecomposition {
  bool ok = false;
  double scale = 0.0;          ///< C
  std::vector<double> shift;   ///< f(rr)
  std::string violation;       ///< empty when ok
  /// Failing cell for off-diagonal dependence: tau(report, reference) vs tau(other_report, reference).
  std::optional<std::size_t> report, other_report, reference;
};

inline ConsensusDecomposition decompose_consensus(const PaymentTable& table, const Distribution& public_dist,
                                                  double tol = kStructuralTolerance) {
  const std::size_t n = table.size();
  if (n != public_dist.size()) throw std::domain_error("payment table and R differ in size");
  ConsensusDecomposition out;
  out.shift.assign(n, 0.0);

  auto close = [tol](double a, double b) { return std::abs(a - b) <= tol * std::max(1.0, std::max(std::abs(a), std::abs(b))); };

  for (std::size_t rr = 0; rr < n; ++rr) {
    const std::size_t first = rr == 0 ? 1 : 0;
    out.shift[rr] = table(first, rr);
    for (std::size_t r = first + 1; r < n; ++r) {
      if (r == rr) continue;
      if (!close(table(r, rr), out.shift[rr])) {
        out.report = r;
        out.other_report = first;
        out.reference = rr;
        out.violation = "off-diagonal payment depends on own report at reference " + std::to_string(rr) + " (reports " +
                        std::to_string(first) + " and " + std::to_string(r) + ")";
        return out;
      }
    }
  }

  out.scale = (table(0, 0) - out.shift[0]) * public_dist[0];
  for (std::size_t r = 1; r < n; ++r) {
    const double c = (table(r, r) - out.shift[r]) * public_dist[r];
    if (!close(c, out.scale)) {
      out.report = r;
      out.reference = r;
      out.violation = "diagonal residual at " + std::to_string(r) + " is not C/R[r]";
      return out;
    }
  }
  if (!(out.scale > tol)) {
    out.report = 0;
    out.reference = 0;
    out.violation = "consensus scale C is not positive";
    return out;
  }
  out.ok = true;
  return out;
}

template <PaymentFunction Pay>
ConsensusDecomposition decompose_consensus(const Pay& pay, const Distribution& public_dist, double tol = kStructuralTolerance) {
  return decompose_consensus(tabulate(pay, public_dist), public_dist, tol);
}

}  // namespace pts
