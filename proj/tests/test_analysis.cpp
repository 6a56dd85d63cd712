#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "pts/analysis.hpp"

using namespace pts;

namespace {

Distribution dist(std::vector<double> v) { return Distribution::from_probabilities(v); }

BeliefState first_case() {
  return BeliefState::from_rows({{0.5, 0.4, 0.1}, {0.7, 0.2, 0.1}, {0.4, 0.5, 0.1}, {0.4, 0.4, 0.2}});
}

BeliefState second_case() {
  const double t = 1.0 / 3.0;
  return BeliefState::from_rows({{t, t, t}, {0.5, 0.3, 0.2}, {0.3, 0.5, 0.2}, {0.2, 0.3, 0.5}});
}

}  // namespace

TEST(Threshold, Examples) {
  EXPECT_NEAR(truthfulness_threshold(second_case()), 0.25, 1e-12);
  EXPECT_NEAR(truthfulness_threshold(dirichlet_belief(DirichletParams({2, 2, 2}))), 0.2, 1e-12);
  EXPECT_LT(truthfulness_threshold(dirichlet_belief(DirichletParams({1e6, 1e6}))), 1e-6);
  EXPECT_THROW(truthfulness_threshold(BeliefState::from_rows({{0.5, 0.5}, {0.4, 0.6}, {0.3, 0.7}})), std::domain_error);
}

TEST(TruthfulEquilibrium, Examples) {
  const auto u = Distribution::uniform(3);
  EXPECT_TRUE(verify_truthful_equilibrium(PaymentSpec::peer_truth_serum(), second_case(), u).holds());
  const auto bad = verify_truthful_equilibrium(PaymentSpec::peer_truth_serum(), first_case(), u);
  EXPECT_EQ(bad.verdict, Verdict::refuted);
  EXPECT_EQ(bad.witness.rfind("observe 2 -> report 0", 0), 0u) << bad.witness;
  const auto oa = BeliefState::from_rows({{0.3, 0.4, 0.3}, {0.7, 0.2, 0.1}, {0.1, 0.8, 0.1}, {0.2, 0.3, 0.5}});
  EXPECT_TRUE(verify_truthful_equilibrium(PaymentSpec::output_agreement(), oa, u).holds());
}

TEST(TruthfulEquilibrium, SelfPredictionViolationIsRefutedAtThePrior) {
  Rng rng(41);
  int violations = 0;
  for (int i = 0; i < 3000; ++i) {
    const std::size_t n = 2 + uniform_index(rng, 4);
    const auto b = sample_unrestricted_table(rng, sample_distribution(rng, n, 0.02));
    const auto rep = verify_truthful_equilibrium(PaymentSpec::peer_truth_serum(), b, b.prior());
    if (is_self_predicting(b)) {
      EXPECT_TRUE(rep.holds());
    } else {
      ++violations;
      EXPECT_EQ(rep.verdict, Verdict::refuted);
      EXPECT_FALSE(rep.witness.empty());
    }
  }
  EXPECT_GT(violations, 100);
}

TEST(ExPost, TruthfulAtPriorHolds) {
  const auto prior = dist({0.5, 0.3, 0.2});
  const auto rep = verify_expost_equilibrium(PaymentSpec::peer_truth_serum(), truthful_peer(3), prior, self_predicting_type_sampler(),
                                             prior, 300, 9);
  EXPECT_TRUE(rep.holds()) << rep.witness;
  EXPECT_EQ(rep.seed, 9u);
  const auto dir = verify_expost_equilibrium(PaymentSpec::peer_truth_serum(), truthful_peer(3), prior, dirichlet_type_sampler(), prior,
                                             300, 10);
  EXPECT_TRUE(dir.holds()) << dir.witness;
}

TEST(ExPost, SingletonAtUnderReportedValueHolds) {
  const auto prior = dist({0.5, 0.3, 0.2});
  const auto r = dist({0.3, 0.4, 0.3});
  const auto rep = verify_expost_equilibrium(PaymentSpec::peer_truth_serum(), singleton_peer(3, 0), prior, unrestricted_type_sampler(),
                                             r, 200, 11);
  EXPECT_TRUE(rep.holds());
}

TEST(ExPost, UnrestrictedTypesRefuteTruthfulness) {
  const auto prior = dist({0.5, 0.3, 0.2});
  const auto rep = verify_expost_equilibrium(PaymentSpec::peer_truth_serum(), truthful_peer(3), prior, unrestricted_type_sampler(),
                                             prior, 200, 12);
  EXPECT_EQ(rep.verdict, Verdict::refuted);
  EXPECT_FALSE(rep.witness.empty());
}

TEST(Samplers, ProduceAdmissibleBeliefs) {
  Rng rng(42);
  for (int i = 0; i < 500; ++i) {
    const std::size_t n = 2 + uniform_index(rng, 5);
    const auto a = sample_dirichlet_params(rng, n);
    EXPECT_GE(a.sigma(), static_cast<double>(n) + 1.0 - 1e-9);
    EXPECT_LE(a.sigma(), 100.0 + 1e-9);
    EXPECT_TRUE(is_self_predicting(sample_self_predicting_belief(rng, n)));
    const auto prior = sample_distribution(rng, n);
    const double rho = uniform_real(rng, 0.0, 0.5);
    EXPECT_TRUE(is_rho_close(sample_rho_close(rng, prior, rho), prior, rho));
  }
}

TEST(Adversarial, MisreportAboveThreshold) {
  Rng rng(43);
  int found = 0, tried = 0;
  for (int i = 0; i < 300; ++i) {
    const auto b = sample_self_predicting_belief(rng, 3);
    const double th = truthfulness_threshold(b);
    if (2.0 * th >= 1.0) continue;
    if (const auto below = adversarial_public(b, 0.9 * th)) {
      for (std::size_t o = 0; o < 3; ++o) {
        ASSERT_EQ(best_response(b.posterior(o), PaymentSpec::peer_truth_serum(), *below, truthful_peer(3)).report, o);
      }
    }
    const auto r = adversarial_public(b, 2.0 * th);
    if (!r) continue;
    ++tried;
    bool misreport = false;
    for (std::size_t o = 0; o < 3; ++o) {
      misreport = misreport || best_response(b.posterior(o), PaymentSpec::peer_truth_serum(), *r, truthful_peer(3)).report != o;
    }
    found += misreport;
  }
  EXPECT_GT(tried, 0);
  EXPECT_GT(found, 0);
}

TEST(ConfusionPair, WorkedExample) {
  const auto [b1, b2] = dirichlet_confusion_pair(DirichletParams({2, 3, 2}), 0, 1);
  const auto& p = b1.posterior(0);
  EXPECT_NEAR(p[0], 3.0 / 8.0, 1e-15);
  EXPECT_NEAR(p[1], 3.0 / 8.0, 1e-15);
  EXPECT_NEAR(p[2], 2.0 / 8.0, 1e-15);
  EXPECT_NEAR(b2.prior()[0], 3.0 / 7.0, 1e-15);
  const auto u = Distribution::uniform(3);
  for (std::size_t r = 0; r < 3; ++r) {
    EXPECT_NEAR(expected_payoff(r, b1.posterior(0), PaymentSpec::peer_truth_serum(), u, truthful_peer(3)),
                expected_payoff(r, b2.posterior(1), PaymentSpec::peer_truth_serum(), u, truthful_peer(3)), 1e-12);
  }
  EXPECT_THROW(dirichlet_confusion_pair(DirichletParams({2, 2, 2}), 0, 1), std::domain_error);
  EXPECT_THROW(dirichlet_confusion_pair(DirichletParams({2, 3, 2}), 1, 1), std::domain_error);
}

TEST(NoGeneralPrior, YObserversReportZ) {
  const auto cfg = scenario_no_general_prior();
  const auto r = normalize(cfg.initial_counts());
  const auto& agent = cfg.population.front().profile;
  const auto prior = resolve_prior(agent, cfg.truth, r);
  EXPECT_NEAR(prior[1], 0.2, 1e-12);
  const auto br = best_response(1, agent, prior, cfg.payment, r, truthful_peer(3));
  EXPECT_EQ(br.report, 2u);
  EXPECT_GT(br.payoffs[2], br.payoffs[1]);
  EXPECT_THROW(scenario_no_general_prior(0.1, 0.0), std::domain_error);
  EXPECT_THROW(scenario_no_general_prior(0.0, 0.001), std::domain_error);
}

TEST(CommonPrior, RegimeReports) {
  const auto cfg = scenario_common_prior();
  const auto& agent = cfg.population.front().profile;
  const auto q = common_prior_truth();
  auto report = [&](const Distribution& r, std::size_t o) { return choose_report(agent, o, q, r, cfg.payment); };
  const auto low_y = dist({0.7, 0.15, 0.15});
  EXPECT_EQ(report(low_y, 2), 1u);
  EXPECT_EQ(report(low_y, 0), 0u);
  const auto high_y = dist({0.45, 0.3, 0.25});
  EXPECT_EQ(report(high_y, 1), 0u);
  EXPECT_EQ(report(high_y, 0), 0u);
}

TEST(CenterGain, LogRuleExamples) {
  const auto r = dist({0.5, 0.3, 0.2});
  const ScoringRule rule{ScoringKind::logarithmic, 1.0};
  const std::size_t t = 99;
  const double eps = 0.01;
  const auto same = center_gain(r, 1, 1, t, rule);
  EXPECT_NEAR(same.exact, std::log(1.0 + eps * 0.7 / 0.3), 1e-12);
  EXPECT_NEAR(same.first_order, eps * (1.0 / 0.3 - 1.0), 1e-15);
  const auto diff = center_gain(r, 1, 0, t, rule);
  EXPECT_NEAR(diff.exact, std::log(1.0 - eps), 1e-12);
  EXPECT_NEAR(diff.first_order, -eps, 1e-15);
  EXPECT_THROW(center_gain(r, 0, 0, 0, rule), std::domain_error);
}

TEST(CenterGain, SecondOrderErrorIsStable) {
  Rng rng(44);
  for (auto kind : {ScoringKind::logarithmic, ScoringKind::quadratic}) {
    const ScoringRule rule{kind, 1.0};
    for (int i = 0; i < 100; ++i) {
      const std::size_t n = 2 + uniform_index(rng, 4);
      const auto r = sample_distribution(rng, n, 0.05);
      const std::size_t a = uniform_index(rng, n), s = uniform_index(rng, n);
      // err(t) / eps^2 should settle to a constant K as eps -> 0
      const auto k_at = [&](std::size_t t) {
        const double eps = 1.0 / (static_cast<double>(t) + 1.0);
        const auto g = center_gain(r, a, s, t, rule);
        return (g.exact - g.first_order) / (eps * eps);
      };
      const double k1 = k_at(999), k2 = k_at(9999);
      EXPECT_NEAR(k1, k2, 0.02 * std::max(1.0, std::abs(k2)));
      EXPECT_LT(std::abs(k2), 1.0 / (r.min() * r.min()) + 2.0);
    }
  }
}

TEST(Optimality, Examples) {
  const auto u = Distribution::uniform(3);
  const ScoringRule log_rule{ScoringKind::logarithmic, 1.0};
  EXPECT_TRUE(verify_optimality(u, second_case(), 10000, log_rule).holds());
  // x and y tie on payment after observing z: never refuted, the tie is reported
  const auto first = verify_optimality(u, first_case(), 10000, log_rule);
  EXPECT_NE(first.verdict, Verdict::refuted);
  bool found = false;
  for (const auto& [k, v] : first.details) {
    if (k == "o=2") found = v.find("payment_argmax 0,1 ") != std::string::npos;
  }
  EXPECT_TRUE(found);
  EXPECT_TRUE(verify_optimality(u, second_case(), 10000, ScoringRule{ScoringKind::quadratic, 1.0}).holds());
}

TEST(Scenarios, ConstructorsValidate) {
  EXPECT_NO_THROW(scenario_common_prior().validate());
  EXPECT_NO_THROW(scenario_helpful_convergence().validate());
  EXPECT_NO_THROW(scenario_truthful_baseline().validate());
  EXPECT_NO_THROW(scenario_binary_informed().validate());
  EXPECT_NO_THROW(scenario_no_general_prior().validate());
}
