#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "dualpor/effective.hpp"
#include "dualpor/errors.hpp"
#include "dualpor/fvsolver.hpp"
#include "dualpor/units.hpp"

using namespace dualpor;

namespace {

ConstitutiveSet sim1_set() {
  ConstitutiveSet set;
  set.matrix = {0.35, 1.0e-13, {1.0e5, 2.0}};
  set.fracture = {0.01, 1.0e-11, {1.0e4, 2.0}};
  set.fluids = {1.0e-3, 2.0e-3};
  return set;
}

std::shared_ptr<const ConstitutiveModel> sim1_model() {
  static const auto model = std::make_shared<const ConstitutiveModel>(sim1_set());
  return model;
}

EffectiveParams params_for(SourceModel model, int dimension = 2) {
  EffectiveParams p;
  p.model = sim1_model();
  p.fracture_porosity = 0.01;
  p.k_star = EffectiveParams::k_star_from(1.0e-11, dimension);
  p.source = model == SourceModel::I
                 ? EffectiveSourceParams::model1(dimension, sim1_set().matrix, p.model->alpha_bar())
                 : EffectiveSourceParams::model2(dimension, sim1_set().matrix);
  return p;
}

std::vector<double> pack(const EffectiveState& st) {
  std::vector<double> x;
  for (std::size_t c = 0; c < st.saturation.size(); ++c) {
    x.push_back(st.saturation[c]);
    x.push_back(st.nonwetting_pressure[c]);
  }
  return x;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST(StructuredGrid, Geometry) {
  const auto g = StructuredGrid::rectangle(4, 3, 8.0, 3.0);
  EXPECT_EQ(g.cell_count(), 12u);
  EXPECT_DOUBLE_EQ(g.volume(), 2.0);
  EXPECT_EQ(g.faces().size(), 3u * 3u + 4u * 2u);
  EXPECT_EQ(g.boundary_faces().size(), 2u * 3u + 2u * 4u);
  const auto c = g.center(5);
  EXPECT_DOUBLE_EQ(c[0], 3.0);
  EXPECT_DOUBLE_EQ(c[1], 1.5);
  for (const auto& f : g.faces()) {
    const bool along_x = f.b == f.a + 1;
    EXPECT_DOUBLE_EQ(f.transmissibility, along_x ? 1.0 / 2.0 : 2.0 / 1.0);
  }
  for (const auto& f : g.boundary_faces()) {
    const bool x_side = f.side == XMinus || f.side == XPlus;
    EXPECT_DOUBLE_EQ(f.transmissibility, x_side ? 1.0 / 1.0 : 2.0 / 0.5);
  }
}

TEST(EffectiveParams, KStar) {
  EXPECT_EQ(EffectiveParams::k_star_from(1.0e-11, 1), 0.0);
  EXPECT_DOUBLE_EQ(EffectiveParams::k_star_from(1.0e-11, 2), 0.5e-11);
  EXPECT_DOUBLE_EQ(EffectiveParams::k_star_from(1.0e-11, 3), 2.0e-11 / 3.0);
  EXPECT_THROW(EffectiveParams::k_star_from(1.0e-11, 0), ParameterError);
}

TEST(Upwind, FourSignCases) {
  const auto g = StructuredGrid::line(2, 2.0);
  const auto& model = *sim1_model();
  const std::vector<double> s{0.3, 0.7};
  for (int w : {-1, 1}) {
    for (int n : {-1, 1}) {
      const std::vector<double> pw{1.0e5, 1.0e5 + w * 100.0};
      const std::vector<double> pn{2.0e5, 2.0e5 + n * 100.0};
      const auto m = upwind_mobilities(g, s, pw, pn, model);
      ASSERT_EQ(m.size(), 1u);
      const std::size_t wet_up = w > 0 ? 1 : 0;
      const std::size_t non_up = n > 0 ? 1 : 0;
      EXPECT_EQ(m[0].wetting_from, wet_up);
      EXPECT_EQ(m[0].nonwetting_from, non_up);
      const auto lam_w = mobilities(s[wet_up], model.set().fracture.vg, model.set().fluids);
      const auto lam_n = mobilities(s[non_up], model.set().fracture.vg, model.set().fluids);
      EXPECT_DOUBLE_EQ(m[0].wetting, lam_w.wetting);
      EXPECT_DOUBLE_EQ(m[0].nonwetting, lam_n.nonwetting);
    }
  }
}

TEST(Upwind, TieTakesLowerIndex) {
  const auto g = StructuredGrid::line(2, 2.0);
  const std::vector<double> s{0.3, 0.7};
  const std::vector<double> p{1.0e5, 1.0e5};
  const auto m = upwind_mobilities(g, s, p, p, *sim1_model());
  EXPECT_EQ(m[0].wetting_from, 0u);
  EXPECT_EQ(m[0].nonwetting_from, 0u);
}

TEST(StepSystem, WettingFluxFollowsPressureDifference) {
  auto params = params_for(SourceModel::I);
  params.source.c_m = 0.0;
  const auto g = StructuredGrid::rectangle(2, 1, 2.0, 1.0);
  auto st = initial_state(g, params, 0.5, 1.0e5);
  const std::array<BoundaryCondition, 4> none{};
  const EffectiveStepSystem system(g, params, none, st, 100.0);
  auto x = pack(st);
  x[1] += 50.0;  // raise P_n and so P_w in cell 0
  const auto r = system.residual(x);
  // cell 0 loses wetting fluid to cell 1
  EXPECT_GT(r[0], 0.0);
  EXPECT_LT(r[2], 0.0);
  EXPECT_NEAR(r[0], -r[2], 1.0e-15);
  const auto lam = mobilities(0.5, sim1_model()->set().fracture.vg, sim1_model()->set().fluids);
  const double flux = params.k_star * lam.wetting * 50.0;
  EXPECT_NEAR(r[0], 100.0 / (0.01 * 1.0) * flux, 1.0e-12 * std::abs(r[0]));
}

TEST(StepSystem, UniformStateWithoutHistoryIsStationary) {
  for (auto model : {SourceModel::I, SourceModel::II}) {
    const auto params = params_for(model);
    const auto g = StructuredGrid::rectangle(2, 1, 2.0, 1.0);
    const auto st = initial_state(g, params, 0.4, 1.0e5);
    const std::array<BoundaryCondition, 4> none{};
    const EffectiveStepSystem system(g, params, none, st, 3600.0);
    EXPECT_EQ(max_abs(system.residual(pack(st))), 0.0);
    EXPECT_EQ(max_abs(system.sources(pack(st))), 0.0);
    auto x = pack(st);
    const auto rep = newton_step(system, x, {});
    EXPECT_EQ(rep.iterations, 0);
    EXPECT_EQ(x, pack(st));
  }
}

TEST(StepSystem, SourcesAreAntisymmetric) {
  auto params = params_for(SourceModel::I);
  params.k_star = 0.0;
  const auto g = StructuredGrid::rectangle(3, 2, 3.0, 2.0);
  const auto st = initial_state(g, params, 0.4, 1.0e5);
  const std::array<BoundaryCondition, 4> none{};
  const EffectiveStepSystem system(g, params, none, st, 3600.0);
  auto x = pack(st);
  for (std::size_t c = 0; c < g.cell_count(); ++c) x[2 * c] = 0.4 + 0.05 * static_cast<double>(c);
  const auto r = system.residual(x);
  for (std::size_t c = 0; c < g.cell_count(); ++c) EXPECT_EQ(r[2 * c], -r[2 * c + 1]);
}

TEST(StepSystem, JacobianMatchesFiniteDifferences) {
  const auto params = params_for(SourceModel::I);
  const auto g = StructuredGrid::rectangle(3, 2, 3.0, 2.0);
  std::array<BoundaryCondition, 4> bc{};
  bc[XMinus] = BoundaryCondition::injection(1.0e-6);
  bc[XPlus] = BoundaryCondition::dirichlet(0.3, 1.0e5);
  const auto st = initial_state(g, params, 0.4, 1.0e5);
  const EffectiveStepSystem system(g, params, bc, st, 3600.0);
  auto x = pack(st);
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    x[2 * c] = 0.35 + 0.07 * static_cast<double>(c);
    x[2 * c + 1] = 1.0e5 + 40.0 * static_cast<double>(c % 3) - 25.0 * static_cast<double>(c / 3);
  }
  const auto r = system.assemble(x);
  // J e_j by finite differences against the factorized J via solve_last: J (J^{-1} v) = v
  for (std::size_t j = 0; j < x.size(); ++j) {
    auto xp = x, xm = x;
    const double h = j % 2 == 0 ? 1.0e-7 : 1.0e-3;
    xp[j] += h;
    xm[j] -= h;
    const auto rp = system.residual(xp);
    const auto rm = system.residual(xm);
    std::vector<double> column(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) column[i] = -(rp[i] - rm[i]) / (2.0 * h);
    const auto e = system.solve_last(column);
    for (std::size_t i = 0; i < x.size(); ++i) {
      EXPECT_NEAR(e[i], i == j ? 1.0 : 0.0, 1.0e-5) << "column " << j << " row " << i;
    }
  }
  EXPECT_EQ(r.size(), x.size());
}

TEST(Newton, SingleCellMatchesNestedBisection) {
  const auto params = params_for(SourceModel::I);
  const auto g = StructuredGrid::rectangle(1, 1, 1.0, 1.0);
  std::array<BoundaryCondition, 4> bc{};
  bc[XMinus] = BoundaryCondition::dirichlet(0.6, 1.2e5);
  auto st = initial_state(g, params, 0.3, 1.0e5);
  const double dt = units::days(0.01);
  const EffectiveStepSystem system(g, params, bc, st, dt);

  auto bisect = [](auto f, double lo, double hi) {
    double flo = f(lo);
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      const double fm = f(mid);
      if ((fm > 0.0) == (flo > 0.0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  };
  // inner: the nonwetting residual pins P_n for a given S
  auto pn_of = [&](double s) {
    return bisect([&](double p) { return system.residual({s, p})[1]; }, 0.5e5, 2.0e5);
  };
  const double s_ref = bisect([&](double s) { return system.residual({s, pn_of(s)})[0]; }, 0.05, 0.95);
  const double p_ref = pn_of(s_ref);

  std::vector<double> x{0.3, 1.0e5};
  NewtonControls controls;
  controls.tolerance = 1.0e-13;
  const auto rep = newton_step(system, x, controls);
  EXPECT_GT(rep.iterations, 0);
  EXPECT_EQ(rep.active_clamps, 0u);
  EXPECT_NEAR(x[0], s_ref, 1.0e-10);
  EXPECT_NEAR(x[1], p_ref, 1.0e-10 * p_ref);
}

TEST(RunEffective, ZeroKernelNoFlowIsConstant) {
  EffectiveRunConfig rc;
  rc.grid = StructuredGrid::rectangle(3, 3, 3.0, 3.0);
  rc.params = params_for(SourceModel::I);
  rc.params.source.c_m = 0.0;
  rc.initial_saturation = 0.45;
  rc.initial_nonwetting_pressure = 1.5e5;
  rc.horizon = units::days(1.0);
  rc.dt = units::days(0.1);
  const auto out = run_effective(rc);
  EXPECT_EQ(out.balance.size(), 10u);
  for (double s : out.state.saturation) EXPECT_EQ(s, 0.45);
  for (double p : out.state.nonwetting_pressure) EXPECT_EQ(p, 1.5e5);
  for (const auto& b : out.balance) EXPECT_EQ(b.newton_iterations, 0);
}

TEST(RunEffective, PrescribedCellRecordsModelOneSource) {
  EffectiveRunConfig rc;
  rc.grid = StructuredGrid::line(1, 1.0);
  rc.params = params_for(SourceModel::I, 1);
  rc.initial_saturation = 0.05;
  rc.horizon = units::days(10.0);
  rc.dt = units::days(0.1);
  const auto traj = BoundaryTrajectory::ramp(0.05, 0.1, 0.9);
  rc.prescribed_saturation = [traj](double t) { return traj(t); };
  const auto out = run_effective(rc);
  const auto grid = uniform_time_grid(rc.horizon, 100);
  std::vector<double> p;
  for (double t : grid) p.push_back(rc.params.model->transfer(traj(t)));
  const QuadratureTable table(grid, rc.params.source.c_m);
  ASSERT_EQ(out.cell0_source.size(), 100u);
  for (std::size_t n = 0; n < 100; ++n) {
    const double ref = q_model1(p, table, n);
    EXPECT_NEAR(out.cell0_source.values[n], ref, 1.0e-10 * std::abs(ref)) << n;
  }
}

TEST(RunEffective, ModelTwoWithFrozenRangeMatchesModelOne) {
  // constant fracture saturation after the first step keeps alpha_hat frozen
  EffectiveRunConfig rc;
  rc.grid = StructuredGrid::line(1, 1.0);
  auto set = sim1_set();
  set.fracture.vg = set.matrix.vg;
  auto model = std::make_shared<const ConstitutiveModel>(set);
  rc.params.model = model;
  rc.params.fracture_porosity = 0.01;
  rc.initial_saturation = 0.3;
  rc.horizon = units::days(2.0);
  rc.dt = units::days(0.1);
  rc.prescribed_saturation = [](double) { return 0.6; };
  rc.params.source = EffectiveSourceParams::model2(2, set.matrix);
  const auto two = run_effective(rc);
  rc.params.source = EffectiveSourceParams::model1(2, set.matrix, model->alpha_hat(0.3, 0.6));
  const auto one = run_effective(rc);
  for (std::size_t n = 0; n < one.cell0_source.size(); ++n) {
    EXPECT_NEAR(two.cell0_source.values[n], one.cell0_source.values[n],
                1.0e-10 * std::abs(one.cell0_source.values[n]));
  }
}

TEST(RunEffective, SmallWaterfloodBalances) {
  EffectiveRunConfig rc;
  rc.grid = StructuredGrid::rectangle(8, 8, 10.0, 10.0);
  rc.params = params_for(SourceModel::I);
  rc.boundary[XMinus] = BoundaryCondition::injection(5.0e-7);
  rc.boundary[XPlus] = BoundaryCondition::dirichlet(0.2, 1.0e5);
  rc.initial_saturation = 0.2;
  rc.initial_nonwetting_pressure = 1.0e5;
  rc.horizon = units::days(2.0);
  rc.dt = units::days(0.05);
  rc.snapshot_every = 20;
  const auto out = run_effective(rc);
  ASSERT_EQ(out.balance.size(), 40u);
  for (const auto& b : out.balance) {
    EXPECT_LT(b.residual, 1.0e-10);
    EXPECT_LT(b.wetting_imbalance, 1.0e-10);
    EXPECT_LT(b.nonwetting_imbalance, 1.0e-10);
    EXPECT_EQ(b.active_clamps, 0u);
    EXPECT_LT(b.max_capillary_defect, 1.0e-10);
    EXPECT_EQ(b.wetting_source, -b.nonwetting_source);
  }
  EXPECT_EQ(out.snapshots.size(), 3u);
  EXPECT_GT(out.state.saturation.front(), 0.2);
}

TEST(RunEffective, RejectsBadConfig) {
  EffectiveRunConfig rc;
  rc.params = params_for(SourceModel::I);
  rc.horizon = 0.0;
  rc.dt = 1.0;
  EXPECT_THROW(run_effective(rc), ParameterError);
  rc.horizon = 10.0;
  rc.initial_saturation = 1.0;
  EXPECT_THROW(run_effective(rc), ParameterError);
}

TEST(Writers, SnapshotAndBalanceHeaders) {
  const auto g = StructuredGrid::rectangle(2, 1, 2.0, 1.0);
  Snapshot snap{0.0, {0.2, 0.3}, {1.0, 2.0}, {3.0, 4.0}};
  std::ostringstream os;
  write_snapshot_csv(os, g, snap);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "cell,x,y,S,P_w,P_n");
  std::ostringstream mb;
  write_mass_balance_csv(mb, {MassBalance{}});
  EXPECT_EQ(mb.str().substr(0, 9), "time_days");
}
