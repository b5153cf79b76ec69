#include <cmath>
#include <memory>
#include <numeric>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "dualpor/effective.hpp"
#include "dualpor/errors.hpp"
#include "dualpor/units.hpp"
#include "oracles.hpp"

using namespace dualpor;

namespace {

ConstitutiveSet sim1_set() {
  ConstitutiveSet set;
  set.matrix = {0.35, 1.0e-13, {1.0e5, 2.0}};
  set.fracture = {0.01, 1.0e-13, {1.0e4, 2.0}};
  set.fluids = {1.0e-3, 2.0e-3};
  return set;
}

const ConstitutiveModel& sim1_model() {
  static const ConstitutiveModel model(sim1_set());
  return model;
}

std::vector<double> random_grid(std::mt19937_64& rng, std::size_t steps) {
  std::uniform_real_distribution<double> step(0.01, 1.0);
  std::vector<double> g{0.0};
  for (std::size_t i = 0; i < steps; ++i) g.push_back(g.back() + step(rng));
  return g;
}

// Q^{n+1/2} from the unrationalized kernel integrals.
double model1_oracle(const std::vector<double>& p, const std::vector<double>& t, double c,
                     std::size_t n) {
  double now = 0.0, before = 0.0;
  for (std::size_t k = 1; k <= n + 1; ++k) now += oracle::kernel_integral(t, n + 1, k, c) * (p[k] - p[0]);
  for (std::size_t k = 1; k <= n; ++k) before += oracle::kernel_integral(t, n, k, c) * (p[k] - p[0]);
  return -(now - before) / (t[n + 1] - t[n]);
}

// Q^{n+1/2} from the U^n_k expansion; ah[k - 1] = alpha_hat^k.
double model2_oracle(const std::vector<double>& p, const std::vector<double>& ah,
                     const std::vector<double>& t, double c, std::size_t n) {
  auto u = [&](std::size_t level, std::size_t k) {
    double s = 0.0;
    for (std::size_t l = k; l <= level; ++l) s += ah[l - 1] * (t[l] - t[l - 1]);
    return s;
  };
  auto level_sum = [&](std::size_t level) {
    double s = 0.0;
    for (std::size_t k = 1; k <= level; ++k) {
      s += ah[k - 1] * (p[k] - p[0]) * (t[k] - t[k - 1]) /
           (std::sqrt(u(level, k)) + std::sqrt(u(level, k + 1)));
    }
    return s;
  };
  return -2.0 * c / (t[n + 1] - t[n]) * (level_sum(n + 1) - level_sum(n));
}

}  // namespace

TEST(Quadrature, EquidistantHandValues) {
  const QuadratureTable table(uniform_time_grid(5.0, 5), 1.0);
  EXPECT_TRUE(table.equidistant());
  EXPECT_NEAR(table.I(3, 1), 2.0 * (std::sqrt(3.0) - std::sqrt(2.0)), 1.0e-15);
  EXPECT_NEAR(table.I(3, 1), 0.63567, 5.0e-6);
  EXPECT_NEAR(table.J(0), 2.0, 1.0e-15);
  EXPECT_NEAR(table.J(1), 2.0 / (std::sqrt(2.0) + 1.0), 1.0e-15);
  EXPECT_NEAR(table.J(1), 0.82843, 5.0e-6);
}

TEST(Quadrature, ClosedFormOnRandomGrids) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const auto g = random_grid(rng, 40);
    const QuadratureTable table(g, 1.7);
    for (std::size_t n = 1; n <= 40; ++n) {
      for (std::size_t k = 1; k <= n; ++k) {
        ASSERT_LT(oracle::relative(table.I(n, k), oracle::kernel_integral(g, n, k, 1.7)), 1.0e-12);
      }
    }
  }
}

TEST(Quadrature, PositivityAndSumIdentity) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = random_grid(rng, 200);
    const QuadratureTable table(g, 0.8);
    for (std::size_t n = 0; n < 200; ++n) {
      const auto row = table.d_row(n);
      for (std::size_t k = 1; k <= n; ++k) ASSERT_GT(row[k], 0.0);
      const double sum = std::accumulate(row.begin(), row.end(), 0.0);
      ASSERT_LT(oracle::relative(sum, 2.0 * 0.8 * std::sqrt(g[n + 1] - g[n])), 1.0e-12);
    }
  }
}

TEST(Quadrature, DifferencesMatchDefinition) {
  const std::vector<double> g{0.0, 0.5, 0.7, 1.6, 2.0, 3.1};
  const QuadratureTable table(g, 1.0);
  for (std::size_t n = 1; n + 1 < g.size(); ++n) {
    for (std::size_t k = 1; k <= n; ++k) {
      EXPECT_NEAR(table.D(n, k), table.I(n, k) - table.I(n + 1, k), 1.0e-13);
    }
    double closing = table.I(n + 1, n + 1);
    for (std::size_t k = 1; k <= n; ++k) closing += table.I(n + 1, k) - table.I(n, k);
    EXPECT_NEAR(table.D(n, 0), closing, 1.0e-13);
  }
}

TEST(Quadrature, EquidistantShiftInvariance) {
  const QuadratureTable table(uniform_time_grid(units::days(10.0), 200), 3.0e-6);
  for (std::size_t n = 1; n < 200; ++n) {
    for (std::size_t k = 1; k <= n; ++k) {
      ASSERT_LT(oracle::relative(table.I(n + 1, k + 1), table.I(n, k)), 1.0e-12);
    }
  }
}

TEST(Quadrature, RejectsBadGrids) {
  EXPECT_THROW(QuadratureTable({0.0, 1.0, 1.0}, 1.0), ParameterError);
  EXPECT_THROW(QuadratureTable({0.0}, 1.0), ParameterError);
  EXPECT_THROW(QuadratureTable({0.5, 1.0}, 1.0), ParameterError);
  EXPECT_THROW(QuadratureTable({0.0, 1.0}, -1.0), ParameterError);
}

TEST(HistoryTerm, Examples) {
  const auto g = uniform_time_grid(4.0, 4);
  const QuadratureTable table(g, 1.3);
  const std::vector<double> constant(5, 0.6);
  for (std::size_t n = 0; n < 4; ++n) {
    EXPECT_NEAR(history_term(constant, table, n), 0.6 * 2.0 * 1.3 * std::sqrt(g[n + 1] - g[n]), 1.0e-14);
  }
  const std::vector<double> p{0.4, 0.5};
  EXPECT_NEAR(history_term(p, table, 0), table.I(1, 1) * 0.4, 1.0e-15);
  EXPECT_EQ(history_term(std::vector<double>(5, 0.0), table, 3), 0.0);
}

TEST(ModelOne, ConstantSaturationGivesZero) {
  const auto g = graded_time_grid(100.0, 0.1, 1.2, 5.0);
  const QuadratureTable table(g, 2.0);
  const std::vector<double> p(g.size(), 0.7);
  for (std::size_t n = 0; n + 1 < g.size(); ++n) EXPECT_EQ(q_model1(p, table, n), 0.0);
}

TEST(ModelOne, MatchesKernelIntegralOracle) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> value(0.1, 0.9);
  const auto g = random_grid(rng, 60);
  std::vector<double> p(g.size());
  for (auto& v : p) v = value(rng);
  const QuadratureTable table(g, 0.9);
  for (std::size_t n = 0; n + 1 < g.size(); ++n) {
    const double ref = model1_oracle(p, g, 0.9, n);
    EXPECT_NEAR(q_model1(p, table, n), ref, 1.0e-11 * (std::abs(ref) + 1.0));
  }
}

TEST(ModelOne, EquidistantConvolutionForm) {
  const auto g = uniform_time_grid(30.0, 30);
  const QuadratureTable table(g, 1.0);
  std::vector<double> p(g.size());
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = 0.3 + 0.02 * k + 0.01 * std::sin(static_cast<double>(k));
  for (std::size_t n = 0; n + 1 < g.size(); ++n) {
    double conv = 0.0;
    for (std::size_t k = 0; k <= n; ++k) conv += (p[k + 1] - p[k]) * table.J(n - k);
    EXPECT_NEAR(q_model1(p, table, n), -conv, 1.0e-12);
  }
}

TEST(ModelOne, StepApproachesClosedForm) {
  const double c = 0.5, jump = 0.4;
  const auto g = uniform_time_grid(1.0, 1000);
  const QuadratureTable table(g, c);
  std::vector<double> p(g.size(), 0.5 + jump);
  p[0] = 0.5;
  for (std::size_t n = 0; n + 1 < g.size(); ++n) {
    // the interval average of -c jump / sqrt(t) is exact for a step
    const double exact = -2.0 * c * jump * (std::sqrt(g[n + 1]) - std::sqrt(g[n])) / (g[n + 1] - g[n]);
    EXPECT_NEAR(q_model1(p, table, n), exact, 1.0e-12 * std::abs(exact));
  }
  const double t = g[999];
  EXPECT_NEAR(q_model1(p, table, 999) / (-c * jump / std::sqrt(t)), 1.0, 1.0e-3);
}

TEST(ModelTwo, ConstantAlphaHatReducesToModelOne) {
  const auto& model = sim1_model();
  const auto set = sim1_set();
  const double abar = model.alpha_bar();
  const auto p1 = EffectiveSourceParams::model1(2, set.matrix, abar);
  const auto p2 = EffectiveSourceParams::model2(2, set.matrix);
  EXPECT_NEAR(p1.c_m, p2.c_m * std::sqrt(abar), 1.0e-12 * p1.c_m);
  std::mt19937_64 rng(5);
  const auto g = random_grid(rng, 80);
  std::vector<double> p(g.size());
  std::uniform_real_distribution<double> value(0.5, 1.0);
  for (auto& v : p) v = value(rng);
  const std::vector<double> ah(g.size() - 1, abar);
  const QuadratureTable table(g, p1.c_m);
  for (std::size_t n = 0; n + 1 < g.size(); ++n) {
    const double q1 = q_model1(p, table, n);
    EXPECT_NEAR(q_model2(p, ah, g, p2.c_m, n), q1, 1.0e-10 * std::abs(q1));
  }
}

TEST(ModelTwo, MatchesExpansionOracle) {
  std::mt19937_64 rng(9);
  const auto g = random_grid(rng, 50);
  std::uniform_real_distribution<double> value(0.2, 0.9), coef(1.0, 5.0);
  std::vector<double> p(g.size()), ah(g.size() - 1);
  for (auto& v : p) v = value(rng);
  for (auto& a : ah) a = coef(rng);
  for (std::size_t n = 0; n + 1 < g.size(); ++n) {
    const double ref = model2_oracle(p, ah, g, 0.7, n);
    EXPECT_NEAR(q_model2(p, ah, g, 0.7, n), ref, 1.0e-10 * (std::abs(ref) + 1.0));
  }
}

TEST(ModelTwo, ConstantSaturationGivesZero) {
  const auto g = uniform_time_grid(10.0, 10);
  const std::vector<double> p(g.size(), 0.9);
  const std::vector<double> ah(g.size() - 1, 2.0);
  for (std::size_t n = 0; n + 1 < g.size(); ++n) EXPECT_EQ(q_model2(p, ah, g, 1.0, n), 0.0);
}

TEST(ModelTwo, SplitRecombines) {
  const auto g = graded_time_grid(50.0, 0.5, 1.1, 4.0);
  std::vector<double> p(g.size()), ah(g.size() - 1);
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = 0.5 + 0.3 * std::sin(0.2 * k);
  for (std::size_t k = 0; k < ah.size(); ++k) ah[k] = 1.0 + 0.1 * k;
  for (std::size_t n = 0; n + 1 < g.size(); ++n) {
    const auto split = model2_split(p, ah, g, 1.1, n);
    const double dt = g[n + 1] - g[n];
    EXPECT_NEAR(split.weight, 2.0 * 1.1 * std::sqrt(ah[n] * dt), 1.0e-14);
    EXPECT_NEAR(-(split.weight * (p[n + 1] - p[0]) - split.history) / dt, q_model2(p, ah, g, 1.1, n),
                1.0e-12);
  }
}

TEST(AlphaHatHistory, RunningRange) {
  const auto& model = sim1_model();
  const std::vector<double> s{0.5, 0.6, 0.4, 0.45, 0.7};
  const auto ah = alpha_hat_history(s, model);
  ASSERT_EQ(ah.size(), 4u);
  EXPECT_DOUBLE_EQ(ah[0], model.alpha_hat(0.5, 0.6));
  EXPECT_DOUBLE_EQ(ah[1], model.alpha_hat(0.4, 0.6));
  EXPECT_DOUBLE_EQ(ah[2], model.alpha_hat(0.4, 0.6));
  EXPECT_DOUBLE_EQ(ah[3], model.alpha_hat(0.4, 0.7));
}

TEST(EffectiveExchange, ConstantTrajectoryIsZero) {
  const auto g = uniform_time_grid(units::days(10.0), 100);
  const auto set = sim1_set();
  for (const auto& params : {EffectiveSourceParams::model1(2, set.matrix, sim1_model().alpha_bar()),
                             EffectiveSourceParams::model2(2, set.matrix)}) {
    const auto q = effective_exchange(BoundaryTrajectory::constant(0.3), g, sim1_model(), params, 0.01);
    ASSERT_EQ(q.size(), 100u);
    for (double v : q.values) EXPECT_EQ(v, 0.0);
    EXPECT_TRUE(q.divided_by_delta);
  }
}

TEST(EffectiveExchange, RampImbibes) {
  const auto g = uniform_time_grid(units::days(10.0), 200);
  const auto set = sim1_set();
  const auto q = effective_exchange(BoundaryTrajectory::ramp(0.05, 0.1, 0.9), g, sim1_model(),
                                    EffectiveSourceParams::model1(2, set.matrix, sim1_model().alpha_bar()));
  for (double v : q.values) EXPECT_LT(v, 0.0);
  EXPECT_EQ(q.method, ExchangeMethod::EffectiveI);
}

TEST(SourceParams, Constants) {
  const auto set = sim1_set();
  const auto p1 = EffectiveSourceParams::model1(3, set.matrix, 2.0);
  EXPECT_NEAR(p1.c_m, 6.0 * std::sqrt(0.35 * 1.0e-13 * 2.0 / std::numbers::pi), 1.0e-20);
  const auto p2 = EffectiveSourceParams::model2(3, set.matrix, true);
  EXPECT_NEAR(p2.c_m, 2.0 * std::sqrt(0.35 * 1.0e-13 / std::numbers::pi), 1.0e-20);
  EXPECT_THROW(EffectiveSourceParams::model1(0, set.matrix, 1.0), ParameterError);
}
