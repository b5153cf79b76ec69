#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "dualpor/constitutive.hpp"
#include "dualpor/errors.hpp"
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

const oracle::Vg kMatrix{1.0e5, 2.0};

const ConstitutiveModel& sim1_model() {
  static const ConstitutiveModel model(sim1_set());
  return model;
}

}  // namespace

TEST(CapillaryPressure, VanishesAtFullSaturation) {
  EXPECT_EQ(capillary_pressure(1.0, {1.0e5, 2.0}), 0.0);
  EXPECT_EQ(capillary_pressure(1.0, {3.0e3, 3.5}), 0.0);
}

TEST(CapillaryPressure, HalfSaturationClosedForm) {
  EXPECT_NEAR(capillary_pressure(0.5, {1.0e5, 2.0}), std::sqrt(3.0) * 1.0e5, 1.0e-9);
  EXPECT_NEAR(capillary_pressure(0.5, {1.0e4, 2.0}), std::sqrt(3.0) * 1.0e4, 1.0e-10);
}

TEST(CapillaryPressure, RejectsSaturationOutsideDomain) {
  EXPECT_THROW(capillary_pressure(0.0, {1.0e5, 2.0}), DomainError);
  EXPECT_THROW(capillary_pressure(1.5, {1.0e5, 2.0}), DomainError);
  EXPECT_THROW(capillary_pressure(-0.1, {1.0e5, 2.0}), DomainError);
}

TEST(CapillaryPressure, DerivativeMatchesHandFormula) {
  for (double n : {1.5, 2.0, 3.0}) {
    const VanGenuchtenParams vg{2.0e4, n};
    for (double s : {0.01, 0.2, 0.5, 0.8, 0.99}) {
      EXPECT_LT(oracle::relative(capillary_pressure_derivative(s, vg),
                                 oracle::dpc(s, {vg.p_r, vg.n})),
                1.0e-12);
    }
  }
}

TEST(CapillaryInverse, Examples) {
  EXPECT_EQ(capillary_inverse(0.0, {1.0e5, 2.0}), 1.0);
  EXPECT_NEAR(capillary_inverse(std::sqrt(3.0) * 1.0e5, {1.0e5, 2.0}), 0.5, 1.0e-14);
  EXPECT_NEAR(capillary_inverse(1.0e5, {1.0e5, 2.0}), 0.70710678118654752, 1.0e-14);
  EXPECT_THROW(capillary_inverse(-1.0, {1.0e5, 2.0}), DomainError);
}

TEST(CapillaryInverse, RoundTripOnDenseGrid) {
  for (double n : {1.3, 2.0, 4.0}) {
    const VanGenuchtenParams vg{1.0e5, n};
    for (int i = 0; i <= 10000; ++i) {
      const double s = 1.0e-4 + (1.0 - 1.0e-4) * i / 10000.0;
      ASSERT_NEAR(capillary_inverse(capillary_pressure(s, vg), vg), s, 1.0e-10) << "s=" << s;
    }
  }
}

TEST(CapillaryPressure, StrictlyDecreasing) {
  const VanGenuchtenParams vg{1.0e5, 2.0};
  double previous = capillary_pressure(1.0e-4, vg);
  for (int i = 1; i <= 10000; ++i) {
    const double s = 1.0e-4 + (1.0 - 1.0e-4) * i / 10000.0;
    const double p = capillary_pressure(s, vg);
    ASSERT_LT(p, previous);
    previous = p;
  }
}

TEST(RelativePermeability, Endpoints) {
  const VanGenuchtenParams vg{1.0e5, 2.0};
  const auto at0 = relative_permeabilities(0.0, vg);
  const auto at1 = relative_permeabilities(1.0, vg);
  EXPECT_EQ(at0.k_rw, 0.0);
  EXPECT_EQ(at0.k_rn, 1.0);
  EXPECT_EQ(at1.k_rw, 1.0);
  EXPECT_EQ(at1.k_rn, 0.0);
  EXPECT_THROW(relative_permeabilities(1.01, vg), DomainError);
  EXPECT_THROW(relative_permeabilities(-0.01, vg), DomainError);
}

TEST(RelativePermeability, HalfSaturationValues) {
  const auto k = relative_permeabilities(0.5, {1.0e5, 2.0});
  EXPECT_NEAR(k.k_rw, std::sqrt(0.5) * std::pow(1.0 - std::sqrt(0.75), 2.0), 1.0e-15);
  EXPECT_NEAR(k.k_rw, 0.0126920, 5.0e-8);
  EXPECT_NEAR(k.k_rn, std::sqrt(0.5) * 0.75, 1.0e-15);
  EXPECT_NEAR(k.k_rn, 0.530330, 5.0e-7);
}

TEST(RelativePermeability, MonotoneAndBounded) {
  const VanGenuchtenParams vg{1.0e5, 2.0};
  auto previous = relative_permeabilities(0.0, vg);
  for (int i = 1; i <= 10000; ++i) {
    const auto k = relative_permeabilities(i / 10000.0, vg);
    ASSERT_GE(k.k_rw, previous.k_rw);
    ASSERT_LE(k.k_rn, previous.k_rn);
    ASSERT_GE(k.k_rw, 0.0);
    ASSERT_LE(k.k_rw, 1.0);
    ASSERT_GE(k.k_rn, 0.0);
    ASSERT_LE(k.k_rn, 1.0);
    previous = k;
  }
}

TEST(RelativePermeability, DerivativesMatchDifferenceQuotients) {
  const VanGenuchtenParams vg{1.0e5, 2.5};
  for (double s : {0.1, 0.4, 0.7, 0.9}) {
    const double h = 1.0e-6;
    const auto up = relative_permeabilities(s + h, vg);
    const auto dn = relative_permeabilities(s - h, vg);
    const auto d = relative_permeability_derivatives(s, vg);
    EXPECT_NEAR(d.k_rw, (up.k_rw - dn.k_rw) / (2.0 * h), 1.0e-7);
    EXPECT_NEAR(d.k_rn, (up.k_rn - dn.k_rn) / (2.0 * h), 1.0e-7);
  }
}

TEST(Mobilities, Examples) {
  const VanGenuchtenParams vg{1.0e5, 2.0};
  const FluidPair fluids{1.0e-3, 2.0e-3};
  const auto at0 = mobilities(0.0, vg, fluids);
  EXPECT_DOUBLE_EQ(at0.wetting, 0.0);
  EXPECT_DOUBLE_EQ(at0.nonwetting, 500.0);
  EXPECT_DOUBLE_EQ(at0.total, 500.0);
  const auto at1 = mobilities(1.0, vg, fluids);
  EXPECT_DOUBLE_EQ(at1.wetting, 1000.0);
  EXPECT_DOUBLE_EQ(at1.nonwetting, 0.0);
  EXPECT_DOUBLE_EQ(at1.total, 1000.0);
  const auto half = mobilities(0.5, vg, fluids);
  EXPECT_NEAR(half.wetting, 12.6920, 5.0e-5);
  EXPECT_NEAR(half.nonwetting, 265.165, 5.0e-4);
  EXPECT_NEAR(half.total, half.wetting + half.nonwetting, 1.0e-12);
}

TEST(AlphaM, VanishesAtBothEnds) {
  const auto set = sim1_set();
  double peak = 0.0;
  for (int i = 1; i < 1000; ++i) peak = std::max(peak, alpha_m(i / 1000.0, set.matrix, set.fluids));
  EXPECT_LT(alpha_m(1.0e-6, set.matrix, set.fluids), 1.0e-12 * peak);
  EXPECT_LT(alpha_m(1.0, set.matrix, set.fluids), 1.0e-3 * peak);
  EXPECT_GE(alpha_m(0.0, set.matrix, set.fluids), 0.0);
}

TEST(AlphaM, MatchesHandFormula) {
  const auto set = sim1_set();
  for (double s : {0.05, 0.3, 0.5, 0.75, 0.95}) {
    EXPECT_LT(oracle::relative(alpha_m(s, set.matrix, set.fluids), oracle::alpha(s, kMatrix, 1.0e-3, 2.0e-3)),
              1.0e-12)
        << "s=" << s;
  }
}

TEST(BetaM, EndpointsAndOracle) {
  const auto& model = sim1_model();
  EXPECT_EQ(model.beta(0.0), 0.0);
  EXPECT_LT(oracle::relative(model.beta(1.0), model.alpha_bar()), 1.0e-12);
  const double reference = oracle::beta(0.5, kMatrix, 1.0e-3, 2.0e-3);
  EXPECT_LT(oracle::relative(model.beta(0.5), reference), 1.0e-8);
  for (double s : {0.01, 0.1, 0.3, 0.7, 0.9, 0.999}) {
    EXPECT_LT(oracle::relative(model.beta(s), oracle::beta(s, kMatrix, 1.0e-3, 2.0e-3)), 1.0e-8)
        << "s=" << s;
  }
  EXPECT_THROW(model.beta(1.1), DomainError);
  EXPECT_THROW(model.beta(-0.1), DomainError);
}

TEST(BetaM, Nondecreasing) {
  const auto& model = sim1_model();
  double previous = 0.0;
  for (int i = 1; i <= 10000; ++i) {
    const double b = model.beta(i / 10000.0);
    ASSERT_GE(b, previous);
    previous = b;
  }
}

TEST(AlphaBar, MatchesQuadratureOracle) {
  const double reference = oracle::beta(1.0, kMatrix, 1.0e-3, 2.0e-3);
  EXPECT_GT(sim1_model().alpha_bar(), 0.0);
  EXPECT_LT(oracle::relative(sim1_model().alpha_bar(), reference), 1.0e-8);
}

TEST(AlphaBar, ConstantStub) {
  const auto model = ConstitutiveModel::with_constant_alpha(sim1_set(), 3.5);
  EXPECT_DOUBLE_EQ(model.alpha_bar(), 3.5);
  EXPECT_DOUBLE_EQ(model.beta(0.4), 3.5 * 0.4);
}

TEST(BetaTable, ConstantIntegrandIsExact) {
  const BetaTable table([](double) { return 2.0; }, 256);
  EXPECT_NEAR(table.total(), 2.0, 1.0e-13);
  for (double s : {0.0, 0.125, 0.3, 0.77, 1.0}) EXPECT_NEAR(table(s), 2.0 * s, 1.0e-13);
}

TEST(TransferSaturation, Examples) {
  const VanGenuchtenParams m1{1.0e5, 2.0};
  const VanGenuchtenParams m10{1.0e6, 2.0};
  const VanGenuchtenParams f{1.0e4, 2.0};
  EXPECT_NEAR(transfer_saturation(0.5, m1, f), 1.0 / std::sqrt(1.0 + 0.01 * 3.0), 1.0e-14);
  EXPECT_NEAR(transfer_saturation(0.5, m1, f), 0.98533, 5.0e-6);
  EXPECT_NEAR(transfer_saturation(0.5, m10, f), 1.0 / std::sqrt(1.0 + 1.0e-4 * 3.0), 1.0e-14);
  EXPECT_NEAR(transfer_saturation(0.5, m10, f), 0.99985, 5.0e-6);
  EXPECT_EQ(transfer_saturation(1.0, m1, f), 1.0);
  EXPECT_THROW(transfer_saturation(0.0, m1, f), DomainError);
}

TEST(TransferSaturation, IdentityForEqualMedia) {
  const VanGenuchtenParams vg{1.0e5, 2.0};
  for (double s : {0.01, 0.25, 0.5, 0.9, 1.0}) EXPECT_NEAR(transfer_saturation(s, vg, vg), s, 1.0e-13);
}

TEST(TransferSaturation, MonotoneAndDerivative) {
  const VanGenuchtenParams m{1.0e5, 2.0};
  const VanGenuchtenParams f{1.0e4, 2.0};
  double previous = 0.0;
  for (int i = 1; i <= 1000; ++i) {
    const double p = transfer_saturation(i / 1000.0, m, f);
    ASSERT_GE(p, previous);
    previous = p;
  }
  for (double s : {0.1, 0.5, 0.9}) {
    const double h = 1.0e-6;
    const double fd = (transfer_saturation(s + h, m, f) - transfer_saturation(s - h, m, f)) / (2.0 * h);
    EXPECT_NEAR(transfer_saturation_derivative(s, m, f), fd, 1.0e-6 * std::abs(fd) + 1.0e-9);
  }
}

TEST(AlphaHat, DegenerateRangeIsPointValue) {
  const auto& model = sim1_model();
  for (double s : {0.1, 0.5, 0.9}) {
    EXPECT_LT(oracle::relative(model.alpha_hat(s, s), model.alpha(model.transfer(s))), 1.0e-12);
  }
}

TEST(AlphaHat, ConstantStubGivesConstant) {
  const auto model = ConstitutiveModel::with_constant_alpha(sim1_set(), 7.0);
  EXPECT_NEAR(model.alpha_hat(0.05, 0.95), 7.0, 1.0e-12);
  EXPECT_NEAR(model.alpha_hat(0.3, 0.31), 7.0, 1.0e-12);
}

TEST(AlphaHat, QuotientOfBetaOracles) {
  const auto& model = sim1_model();
  const VanGenuchtenParams m{1.0e5, 2.0};
  const VanGenuchtenParams f{1.0e4, 2.0};
  const double lo = oracle::pc_inverse(oracle::pc(0.05, {f.p_r, f.n}), kMatrix);
  const double hi = oracle::pc_inverse(oracle::pc(0.95, {f.p_r, f.n}), kMatrix);
  const double reference = (oracle::beta(hi, kMatrix, 1.0e-3, 2.0e-3) -
                            oracle::beta(lo, kMatrix, 1.0e-3, 2.0e-3)) /
                           (hi - lo);
  EXPECT_NEAR(transfer_saturation(0.05, m, f), lo, 1.0e-14);
  EXPECT_LT(oracle::relative(model.alpha_hat(0.05, 0.95), reference), 1.0e-8);
}

TEST(AlphaHat, FullRangeWithEqualMediaIsAlphaBar) {
  auto set = sim1_set();
  set.fracture.vg = set.matrix.vg;
  const ConstitutiveModel model(set);
  EXPECT_LT(oracle::relative(model.alpha_hat(1.0e-9, 1.0), model.alpha_bar()), 1.0e-6);
}

TEST(ConstitutiveSet, ValidationRejectsBadParameters) {
  auto set = sim1_set();
  set.matrix.vg.n = 1.0;
  EXPECT_THROW(set.validate(), ParameterError);
  set = sim1_set();
  set.fluids.mu_w = 0.0;
  EXPECT_THROW(set.validate(), ParameterError);
  set = sim1_set();
  set.fracture.porosity = 1.5;
  EXPECT_THROW(set.validate(), ParameterError);
  set = sim1_set();
  set.matrix.permeability = -1.0;
  EXPECT_THROW(set.validate(), ParameterError);
}
