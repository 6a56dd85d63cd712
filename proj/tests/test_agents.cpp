#include <gtest/gtest.h>

#include <vector>

#include "pts/agents.hpp"
#include "pts/analysis.hpp"
#include "pts/random.hpp"

using namespace pts;

namespace {

Distribution dist(std::vector<double> v) { return Distribution::from_probabilities(v); }

BeliefState self_dominating() {
  return BeliefState::from_rows({{0.3, 0.4, 0.3}, {0.7, 0.2, 0.1}, {0.1, 0.8, 0.1}, {0.2, 0.3, 0.5}});
}

BeliefState first_case() {
  return BeliefState::from_rows({{0.5, 0.4, 0.1}, {0.7, 0.2, 0.1}, {0.4, 0.5, 0.1}, {0.4, 0.4, 0.2}});
}

BeliefState second_case() {
  const double t = 1.0 / 3.0;
  return BeliefState::from_rows({{t, t, t}, {0.5, 0.3, 0.2}, {0.3, 0.5, 0.2}, {0.2, 0.3, 0.5}});
}

AgentProfile table_agent(const BeliefState& b) {
  AgentProfile p;
  p.strategy = BestResponder{};
  p.update = TableUpdate{b};
  p.prior = OwnPrior{};
  return p;
}

}  // namespace

TEST(ApplyUpdate, Families) {
  const auto u3 = Distribution::uniform(3);
  const auto d = apply_update(DirichletUpdate{DirichletParams({2, 2, 2})}, u3, 0);
  EXPECT_NEAR(d[0], 3.0 / 7.0, 1e-15);
  const auto c = apply_update(ConvexMixUpdate{0.3}, dist({0.5, 0.5}), 0);
  EXPECT_NEAR(c[0], 0.65, 1e-9);
  EXPECT_NEAR(c[1], 0.35, 1e-9);
  const auto t = apply_update(TableUpdate{first_case()}, first_case().prior(), 2);
  EXPECT_NEAR(t[0], 0.4, 1e-12);
  EXPECT_NEAR(t[2], 0.2, 1e-12);
}

TEST(ApplyUpdate, PriorMismatchIsAConfigError) {
  EXPECT_THROW(apply_update(TableUpdate{first_case()}, Distribution::uniform(3), 0), ConfigError);
  EXPECT_THROW(apply_update(DirichletUpdate{DirichletParams({3, 2, 2})}, Distribution::uniform(3), 0), ConfigError);
  EXPECT_THROW(apply_update(ConvexMixUpdate{1.0}, Distribution::uniform(3), 0), ConfigError);
}

TEST(ApplyUpdate, ConvexMixIsFullyMixed) {
  const auto p = apply_update(ConvexMixUpdate{0.999}, dist({0.9999, 0.0001}), 0);
  EXPECT_GE(p.min(), kProbabilityFloor);
}

TEST(ExpectedPayoff, WorkedExamples) {
  const auto pay = PaymentSpec::peer_truth_serum();
  const auto u = Distribution::uniform(3);
  const auto post = second_case().posterior(2);
  EXPECT_NEAR(expected_payoff(2, post, pay, u, truthful_peer(3)), 1.5, 1e-12);
  EXPECT_NEAR(expected_payoff(1, post, pay, u, truthful_peer(3)), 0.9, 1e-12);
  const auto shifted = PaymentSpec::peer_truth_serum(1.0, ConstantShift{-0.4});
  EXPECT_NEAR(expected_payoff(1, post, shifted, u, singleton_peer(3, 0)), -0.4, 1e-15);
}

TEST(BestResponse, WorkedExamples) {
  const auto u = Distribution::uniform(3);
  const auto peer = truthful_peer(3);
  const auto oa = best_response(self_dominating().posterior(0), PaymentSpec::output_agreement(), u, peer);
  EXPECT_EQ(oa.report, 0u);
  EXPECT_NEAR(oa.payoffs[0], 0.7, 1e-12);
  EXPECT_NEAR(oa.payoffs[1], 0.2, 1e-12);

  const auto first = best_response(first_case().posterior(2), PaymentSpec::peer_truth_serum(), u, peer);
  EXPECT_EQ(first.report, 0u);  // tie with y at 1.2 goes to the lower index
  EXPECT_NEAR(first.payoffs[1], 1.2, 1e-12);
  EXPECT_NEAR(first.margin(), 0.0, 1e-12);

  const auto second = best_response(2, table_agent(second_case()), second_case().prior(), PaymentSpec::peer_truth_serum(), u, peer);
  EXPECT_EQ(second.report, 2u);
}

TEST(Helpful, CanonicalReport) {
  const auto u = Distribution::uniform(3);
  EXPECT_EQ(helpful_report(1, u, dist({0.34, 0.33, 0.33}), 0.1), 1u);
  for (std::size_t o = 0; o < 3; ++o) {
    EXPECT_EQ(helpful_report(o, dist({0.5, 0.4, 0.1}), u, 0.1), 0u);
    EXPECT_EQ(helpful_report(o, dist({0.3, 0.6, 0.1}), u, 0.1), 1u);
  }
}

TEST(Helpful, Checks) {
  const auto prior = dist({0.5, 0.4, 0.1});
  const auto u = Distribution::uniform(3);
  EXPECT_TRUE(check_helpful(truthful_peer(3), prior, u, 0.1));
  PeerStrategy canonical(3);
  for (std::size_t o = 0; o < 3; ++o) canonical[o] = helpful_report(o, prior, u, 0.1);
  EXPECT_TRUE(check_helpful(canonical, prior, u, 0.1));
  EXPECT_FALSE(check_helpful(singleton_peer(3, 2), prior, u, 0.1));
  // rho-close: any misreport violates the first clause
  EXPECT_FALSE(check_helpful(singleton_peer(3, 0), u, dist({0.34, 0.33, 0.33}), 0.1));
}

TEST(Helpful, RandomCanonicalStrategiesPassTheCheck) {
  Rng rng(21);
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = 2 + uniform_index(rng, 5);
    const auto prior = sample_distribution(rng, n), r = sample_distribution(rng, n);
    const double rho = uniform_real(rng, 0.0, 0.5);
    PeerStrategy s(n);
    for (std::size_t o = 0; o < n; ++o) s[o] = helpful_report(o, prior, r, rho);
    EXPECT_TRUE(check_helpful(s, prior, r, rho));
  }
}

TEST(Properties, TruthfulBelowThreshold) {
  Rng rng(22);
  const auto pay = PaymentSpec::peer_truth_serum();
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = 2 + uniform_index(rng, 4);
    const auto b = sample_self_predicting_belief(rng, n);
    const double rho = 0.9 * truthfulness_threshold(b);
    const auto r = sample_rho_close(rng, b.prior(), rho);
    for (std::size_t o = 0; o < n; ++o) ASSERT_EQ(best_response(b.posterior(o), pay, r, truthful_peer(n)).report, o);
  }
}

TEST(Properties, PosteriorSubsetClaim) {
  Rng rng(23);
  for (int i = 0; i < 2000; ++i) {
    const std::size_t n = 2 + uniform_index(rng, 4);
    const auto b = sample_self_predicting_belief(rng, n);
    const auto r = sample_distribution(rng, n);
    for (std::size_t o = 0; o < n; ++o) {
      for (std::size_t x = 0; x < n; ++x) {
        if (x == o) continue;
        if (b.prior()[x] / r[x] <= b.prior()[o] / r[o]) {
          EXPECT_LT(b.posterior(o)[x] / r[x], b.posterior(o)[o] / r[o]);
        }
      }
    }
  }
}

TEST(Properties, OutputAgreementTruthfulUnderSelfDomination) {
  Rng rng(24);
  int seen = 0;
  while (seen < 500) {
    const std::size_t n = 2 + uniform_index(rng, 4);
    std::vector<Distribution> rows;
    for (std::size_t o = 0; o < n; ++o) {
      std::vector<double> w(n);
      for (std::size_t x = 0; x < n; ++x) w[x] = uniform_real(rng, 0.01, 1.0) + (x == o ? uniform_real(rng, 0.0, 2.0) : 0.0);
      rows.push_back(Distribution::from_weights(w));
    }
    const BeliefState b(sample_distribution(rng, n), rows);
    if (!is_self_dominating(b)) continue;
    ++seen;
    const auto r = sample_distribution(rng, n);
    for (std::size_t o = 0; o < n; ++o) {
      ASSERT_EQ(best_response(b.posterior(o), PaymentSpec::output_agreement(), r, truthful_peer(n)).report, o);
    }
  }
}

TEST(Properties, BinaryInformedHonestAtUnderReportedValue) {
  Rng rng(25);
  const auto pay = PaymentSpec::peer_truth_serum();
  for (int i = 0; i < 5000; ++i) {
    const auto q = sample_distribution(rng, 2), r = sample_distribution(rng, 2);
    const double mix = uniform01(rng);
    const auto prior = Distribution::from_weights(std::vector<double>{mix * q[0] + (1 - mix) * r[0], mix * q[1] + (1 - mix) * r[1]});
    ASSERT_TRUE(is_informed(prior, r, q));
    const auto b = belief_state(ConvexMixUpdate{uniform_real(rng, 0.01, 0.99)}, prior, r);
    const std::size_t under = r[0] < q[0] ? 0 : 1;
    if (r[under] >= q[under]) continue;
    EXPECT_EQ(best_response(b.posterior(under), pay, r, truthful_peer(2)).report, under);
  }
}

TEST(Profiles, ResolvePrior) {
  AgentProfile p;
  const auto q = dist({0.6, 0.4}), r = dist({0.2, 0.8});
  p.prior = TruthPrior{};
  EXPECT_EQ(resolve_prior(p, q, r), q);
  p.prior = PublicPrior{};
  EXPECT_EQ(resolve_prior(p, q, r), r);
  p.prior = InformedMixPrior{0.5};
  EXPECT_NEAR(resolve_prior(p, q, r)[0], 0.4, 1e-12);
  p.prior = OwnPrior{};
  EXPECT_THROW(resolve_prior(p, q, r), ConfigError);
}

TEST(Profiles, ChooseReport) {
  const auto q = Distribution::uniform(3);
  const auto pay = PaymentSpec::peer_truth_serum();
  AgentProfile p;
  p.strategy = Singleton{2};
  EXPECT_EQ(choose_report(p, 0, q, q, pay), 2u);
  p.strategy = Truthful{};
  EXPECT_EQ(choose_report(p, 1, q, q, pay), 1u);
  const auto table = tabulate_strategy(table_agent(first_case()), q, Distribution::uniform(3), pay);
  EXPECT_EQ(table, (PeerStrategy{0, 1, 0}));
}
