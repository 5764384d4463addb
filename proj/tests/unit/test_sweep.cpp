#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "oracles.hpp"
#include "penphase/errors.hpp"
#include "penphase/phases.hpp"
#include "penphase/sweep.hpp"

namespace penphase {
namespace {

const BindingPotential kLoop = PenningQuadrupole{4.0 / 3.0};

GridSpec square(int steps, double max = 3.0) {
  return {{0.0, max, steps}, {0.0, max, steps}};
}

const RegionMap& coarse_map() {
  static const RegionMap map = sweep_fig1(square(150));
  return map;
}

TEST(Grid, AxisSamples) {
  const GridAxis a{0.0, 3.0, 4};
  EXPECT_EQ(a.at(0), 0.0);
  EXPECT_EQ(a.at(3), 3.0);
  EXPECT_DOUBLE_EQ(a.at(1), 1.0);
  EXPECT_EQ((GridAxis{0.5, 2.0, 1}).at(0), 0.5);
}

TEST(Grid, Fig1ParamsFollowLoopConstraint) {
  const auto p = fig1_params(0.4, 0.9);
  EXPECT_EQ(p.omega(), 1.0);
  EXPECT_DOUBLE_EQ(p.b(), 0.4);
  EXPECT_DOUBLE_EQ(p.w0(), 1.2);
}

TEST(RegionMapTest, FourConfinedComponentsAndTwoUnconfinedRegions) {
  const auto& map = coarse_map();
  EXPECT_EQ(map.confined_components, 4);
  EXPECT_EQ(map.unconfined_regions, 2);
  EXPECT_EQ(map.extensions, 0);
}

TEST(RegionMapTest, ComponentIdsPartitionConfinedCells) {
  const auto& map = coarse_map();
  std::set<int> ids;
  for (const auto& c : map.cells) {
    if (c.cls == Classification::Confined) {
      EXPECT_GE(c.component, 0);
      EXPECT_LT(c.component, map.confined_components);
      EXPECT_NE(c.krein_code, 0xFF);
      ids.insert(c.component);
    } else {
      EXPECT_EQ(c.component, -1);
    }
  }
  EXPECT_EQ(static_cast<int>(ids.size()), map.confined_components);
}

TEST(RegionMapTest, ComponentsShareOneKreinPattern) {
  const auto& map = coarse_map();
  std::vector<int> code(static_cast<std::size_t>(map.confined_components), -1);
  for (const auto& c : map.cells) {
    if (c.component < 0) continue;
    auto& slot = code[static_cast<std::size_t>(c.component)];
    if (slot < 0) slot = c.krein_code;
    EXPECT_EQ(slot, c.krein_code);
  }
}

TEST(RegionMapTest, RefinementKeepsCounts) {
  const auto fine = sweep_fig1(square(300));
  EXPECT_EQ(fine.confined_components, coarse_map().confined_components);
  EXPECT_EQ(fine.unconfined_regions, coarse_map().unconfined_regions);
}

TEST(RegionMapTest, ThreadCountDoesNotChangeResult) {
  SweepOptions one;
  one.threads = 1;
  SweepOptions many;
  many.threads = 4;
  const auto a = sweep_fig1(square(60), one);
  const auto b = sweep_fig1(square(60), many);
  ASSERT_EQ(a.cells.size(), b.cells.size());
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    EXPECT_EQ(a.cells[i].cls, b.cells[i].cls);
    EXPECT_EQ(a.cells[i].component, b.cells[i].component);
  }
}

TEST(RegionMapTest, SmallWindowAutoExtends) {
  const auto map = sweep_fig1(square(40, 1.0));
  EXPECT_GT(map.extensions, 0);
  EXPECT_GT(map.grid.alpha.max, 1.0);
  SweepOptions fixed;
  fixed.auto_extend = false;
  EXPECT_EQ(sweep_fig1(square(40, 1.0), fixed).extensions, 0);
}

TEST(RegionMapTest, RejectsEmptyAxis) {
  EXPECT_THROW(sweep_fig1({{0.0, 3.0, 0}, {0.0, 3.0, 10}}), DomainError);
}

// At b = 0 the generator commutes with L3, so rotating-frame frequencies are the
// static Penning roots shifted by the rotation: {4a0/3, |4a0/3 − 1|, |2a0/3 − 1|}.
TEST(RegionMapTest, AxialEdgeMatchesClosedForm) {
  const auto& map = coarse_map();
  ASSERT_EQ(map.grid.alpha.at(0), 0.0);
  int checked = 0;
  for (int j = 1; j < map.grid.alpha0.steps; ++j) {
    const double a0 = map.grid.alpha0.at(j);
    std::vector<double> f{4 * a0 / 3, std::abs(4 * a0 / 3 - 1), std::abs(2 * a0 / 3 - 1)};
    std::sort(f.begin(), f.end());
    const double gap = std::min({f[0], f[1] - f[0], f[2] - f[1]});
    const auto& cell = map.at(0, j);
    if (gap < 1e-4) {
      EXPECT_NE(cell.cls, Classification::Unconfined) << a0;
      continue;
    }
    ASSERT_EQ(cell.cls, Classification::Confined) << a0;
    const auto s = classify(build_lambda(build_G(fig1_params(0.0, a0), PenningQuadrupole{4 * a0 / 3})));
    for (std::size_t m = 0; m < 3; ++m) EXPECT_NEAR(s.modes[m].freq, f[2 - m], 1e-9);
    ++checked;
  }
  EXPECT_GT(checked, 100);
  EXPECT_EQ(map.at(0, 0).cls, Classification::Boundary);
}

TEST(RegionMapTest, AlphaLineMatchesDirectComputation) {
  const auto& map = coarse_map();
  const auto line = classify_alpha_line(map.grid.alpha);
  ASSERT_EQ(static_cast<int>(line.size()), map.grid.alpha.steps);
  for (int i = 0; i < map.grid.alpha.steps; ++i) EXPECT_EQ(line[static_cast<std::size_t>(i)], map.at(i, 0).cls);
}

TEST(RegionMapTest, ProbeAgreesWithClassification) {
  const auto& map = coarse_map();
  auto rng = testing::make_rng(31);
  std::uniform_int_distribution<std::size_t> pick(0, map.cells.size() - 1);
  int checked = 0;
  while (checked < 50) {
    const std::size_t idx = pick(rng);
    const auto& cell = map.cells[idx];
    if (cell.cls == Classification::Boundary) continue;
    const int i = static_cast<int>(idx % static_cast<std::size_t>(map.grid.alpha.steps));
    const int j = static_cast<int>(idx / static_cast<std::size_t>(map.grid.alpha.steps));
    const double a = map.grid.alpha.at(i);
    const double a0 = map.grid.alpha0.at(j);
    const auto lambda = build_lambda(build_G(fig1_params(a, a0), PenningQuadrupole{4 * a0 / 3}));
    const auto probe = boundedness_probe(lambda, Vec6::Ones(), 1000);
    EXPECT_EQ(probe.bounded, cell.cls == Classification::Confined) << a << ", " << a0;
    ++checked;
  }
}

TEST(Bisection, HalvesExactly) {
  const auto r = bisect_transition([](double x) { return x > 0.3; }, 0.0, 1.0, 1e-6);
  EXPECT_EQ(r.iterations, static_cast<int>(std::ceil(std::log2(1.0 / 1e-6))));
  EXPECT_NEAR(r.hi - r.lo, std::ldexp(1.0, -r.iterations), 1e-18);
  EXPECT_LE(r.lo, 0.3);
  EXPECT_GT(r.hi, 0.3);
}

TEST(Bisection, Preconditions) {
  auto step = [](double x) { return x > 0.3; };
  EXPECT_THROW(bisect_transition(step, 0.5, 1.0, 1e-6), DomainError);
  EXPECT_THROW(bisect_transition(step, 0.0, 0.2, 1e-6), DomainError);
  EXPECT_THROW(bisect_transition(step, 0.0, 1.0, 0.0), DomainError);
  EXPECT_THROW(bisect_transition([](double x) { return x > 0.3 && x < 0.5 || x > 0.8; }, 0.0, 1.0, 1e-6),
               MultiCrossingError);
}

TEST(RefineBoundary, VerticalSegment) {
  const std::array<double, 2> c{0.6, 0.6};
  const std::array<double, 2> u{0.6, 0.95};
  const double len = 0.35;
  const auto p = refine_boundary(c, u, 1e-6);
  EXPECT_EQ(p.alpha, 0.6);
  EXPECT_NEAR(p.alpha0, 0.75, 1e-6);
  EXPECT_LE((p.segment.hi - p.segment.lo) * len, 1e-6);
  EXPECT_EQ(p.segment.iterations, static_cast<int>(std::ceil(std::log2(len / 1e-6))));

  auto spectrum_at = [](double a0) {
    return classify(build_lambda(build_G(fig1_params(0.6, a0), PenningQuadrupole{4 * a0 / 3})));
  };
  const auto inside = spectrum_at(0.6 + p.segment.lo * len);
  EXPECT_EQ(inside.classification, Classification::Confined);
  EXPECT_LE(inside.max_real_part, Tolerances{}.re(inside.lambda_norm));

  // Past the transition |Re λ| grows like the square root of the distance.
  const auto coarse = refine_boundary(c, u, 1e-4);
  const double re_fine = spectrum_at(0.6 + p.segment.hi * len).max_real_part;
  const double re_coarse = spectrum_at(0.6 + coarse.segment.hi * len).max_real_part;
  EXPECT_LT(re_fine, re_coarse);
  EXPECT_LT(re_fine, 1e-2);
}

TEST(RefineBoundary, Errors) {
  EXPECT_THROW(refine_boundary({0.6, 0.5}, {0.6, 0.6}), DomainError);
  EXPECT_THROW(refine_boundary({0.6, 0.9}, {0.6, 0.6}), DomainError);
  // Crosses the thin unconfined band near alpha0 = 0.35, then the wide one above 0.75.
  EXPECT_THROW(refine_boundary({0.3, 0.2}, {0.3, 0.8}), MultiCrossingError);
}

TEST(Kcr, AdiabaticBisection) {
  const auto r = bisect_transition(
      [](double k) { return classify_adiabatic(k, kLoop) == Classification::Unconfined; }, 0.25,
      0.27, 1e-7);
  EXPECT_NEAR(r.value, 0.25831, 5e-4);
}

TEST(Kcr, FindKcr) {
  const auto r = find_kcr(1e-7);
  EXPECT_NEAR(r.value, 0.25831, 5e-4);
  EXPECT_LE(r.hi - r.lo, 1e-7);
  EXPECT_EQ(r.iterations, static_cast<int>(std::ceil(std::log2(0.99 / 1e-7))));
  EXPECT_EQ(classify_adiabatic(r.value - 1e-3, kLoop), Classification::Confined);
  EXPECT_EQ(classify_adiabatic(r.value + 1e-3, kLoop), Classification::Unconfined);
  EXPECT_THROW(find_kcr(1e-10), DomainError);
}

TEST(Kcr, CollidingPairHasOppositeKreinSigns) {
  const double k = find_kcr(1e-7).value - 1e-3;
  const auto s = classify(build_lambda(build_G(make_params_adiabatic(k, 0.0), kLoop)));
  ASSERT_EQ(s.classification, Classification::Confined);
  EXPECT_LT(s.modes[1].freq - s.modes[2].freq, 0.1);
  EXPECT_EQ(s.modes[1].krein_sign, -s.modes[2].krein_sign);
}

class CurveTest : public ::testing::Test {
 protected:
  static const std::vector<CurveRow>& rows() {
    static const auto r = curve_fig2(default_k_grid(), kLoop);
    return r;
  }
  static const CurveRow& near(double k) {
    const auto& r = rows();
    return *std::min_element(r.begin(), r.end(), [k](const CurveRow& a, const CurveRow& b) {
      return std::abs(a.k - k) < std::abs(b.k - k);
    });
  }
};

TEST_F(CurveTest, DefaultGrid) {
  const auto g = default_k_grid();
  ASSERT_EQ(g.size(), 500u);
  EXPECT_EQ(g.front(), 0.01);
  EXPECT_EQ(g.back(), 1.0);
  EXPECT_THROW(default_k_grid(0.0, 1.0, 10), DomainError);
  EXPECT_THROW(curve_fig2({0.2, 0.1}, kLoop), DomainError);
}

TEST_F(CurveTest, StableWindow) {
  EXPECT_EQ(rows().size(), 500u);
  const auto& inside = near(0.2);
  EXPECT_TRUE(inside.dw[0] && inside.dw[1] && inside.dw[2]);
  const auto& outside = near(0.5);
  EXPECT_TRUE(outside.dw[0].has_value());
  EXPECT_FALSE(outside.stable23());
  const double kcr = find_kcr(1e-7).value;
  for (const auto& r : rows()) {
    EXPECT_TRUE(r.dw[0].has_value()) << r.k;
    EXPECT_EQ(r.stable23(), r.k < kcr) << r.k;
    EXPECT_EQ(r.cos_theta, cos_theta(r.k));
  }
}

TEST_F(CurveTest, MatchesDirectDerivatives) {
  const auto& row = near(0.2);
  auto direct = dmode_domega(make_params_adiabatic(row.k, 0.0), kLoop, DerivativeMethod::Implicit);
  std::vector<double> table{*row.dw[0], *row.dw[1], *row.dw[2]};
  std::sort(direct.begin(), direct.end());
  std::sort(table.begin(), table.end());
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(table[i], direct[i], 1e-6);
}

TEST_F(CurveTest, ColumnsAreContinuous) {
  const auto& r = rows();
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t i = 2; i + 1 < r.size(); ++i) {
      if (!r[i - 2].dw[c] || !r[i - 1].dw[c] || !r[i].dw[c] || !r[i + 1].dw[c]) continue;
      const double step = std::abs(*r[i].dw[c] - *r[i - 1].dw[c]);
      const double before = std::abs(*r[i - 1].dw[c] - *r[i - 2].dw[c]);
      const double after = std::abs(*r[i + 1].dw[c] - *r[i].dw[c]);
      EXPECT_LE(step, 10.0 * std::max(before, after) + 1e-9) << "column " << c << " k=" << r[i].k;
    }
  }
}

TEST_F(CurveTest, PenningRatiosVary) {
  bool varies = false;
  for (std::size_t c = 0; c < 3; ++c) {
    double lo = 1e300;
    double hi = -1e300;
    for (const auto& row : rows()) {
      if (row.k < 0.05 || row.k > 0.24 || !row.dw[c]) continue;
      const double ratio = *row.dw[c] / row.cos_theta;
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    if (hi - lo > 0.01 * std::max(std::abs(lo), std::abs(hi))) varies = true;
  }
  EXPECT_TRUE(varies);
}

TEST(CurveOscillator, RatiosAreConstant) {
  const auto rows = curve_fig2(default_k_grid(0.05, 3.0, 120), IsotropicOscillator{4.0 / 3.0});
  for (std::size_t c = 0; c < 3; ++c) {
    const double first = *rows.front().dw[c] / rows.front().cos_theta;
    for (const auto& row : rows) {
      ASSERT_TRUE(row.dw[c].has_value()) << row.k;
      EXPECT_NEAR(*row.dw[c] / row.cos_theta, first, 1e-8 * std::max(1.0, std::abs(first)));
    }
  }
}

}  // namespace
}  // namespace penphase
