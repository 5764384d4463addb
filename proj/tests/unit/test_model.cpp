#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "oracles.hpp"
#include "penphase/errors.hpp"
#include "penphase/model.hpp"

namespace penphase {
namespace {

using testing::fd_hessian;
using testing::make_rng;
using testing::scalar_G;

struct Case {
  SystemParams params;
  BindingPotential binding;
};

std::vector<Case> random_cases(int count, std::uint64_t salt) {
  auto rng = make_rng(salt);
  std::uniform_real_distribution<double> field(0.0, 2.0);
  std::uniform_real_distribution<double> freq(0.1, 2.0);
  std::vector<Case> out;
  for (int i = 0; i < count; ++i) {
    const double b = field(rng);
    const double b0 = field(rng);
    const double w0 = freq(rng);
    const double omega = field(rng);
    BindingPotential binding = PenningQuadrupole{w0};
    if (i % 3 == 1) binding = IsotropicOscillator{w0};
    if (i % 3 == 2) binding = DiagonalQuadratic{w0, freq(rng), freq(rng)};
    out.push_back({SystemParams(b, b0, w0, omega), binding});
  }
  return out;
}

std::function<double(const Vec6&)> scalar(const Case& c) {
  return [c](const Vec6& u) { return scalar_G(c.params, c.binding, u); };
}

TEST(SystemParams, DimensionlessOrigin) {
  const auto p = make_params_dimensionless(0.0, 0.0, 0.0);
  EXPECT_EQ(p.b(), 0.0);
  EXPECT_EQ(p.b0(), 0.0);
  EXPECT_EQ(p.w0(), 0.0);
  EXPECT_EQ(p.omega(), 1.0);
}

TEST(SystemParams, DimensionlessPenningLoop) {
  const auto p = make_params_dimensionless(0.1, 0.5, 2.0 / 3.0);
  EXPECT_NEAR(p.k(), 0.2, 1e-15);
  EXPECT_TRUE(p.is_penning_loop());
  EXPECT_NEAR(p.alpha(), 0.1, 1e-15);
  EXPECT_NEAR(p.alpha0(), 0.5, 1e-15);
  EXPECT_NEAR(p.w(), 2.0 / 3.0, 1e-15);
}

TEST(SystemParams, RejectsNegativeDimensionless) {
  EXPECT_THROW(make_params_dimensionless(-0.1, 0.5, 1.0), DomainError);
  EXPECT_THROW(make_params_dimensionless(0.1, -0.5, 1.0), DomainError);
  EXPECT_THROW(make_params_dimensionless(0.1, 0.5, -1.0), DomainError);
}

TEST(SystemParams, Adiabatic) {
  const auto p = make_params_adiabatic(1.0, 0.0);
  EXPECT_EQ(p.b(), 1.0);
  EXPECT_EQ(p.b0(), 1.0);
  EXPECT_NEAR(p.w0(), 4.0 / 3.0, 1e-15);
  EXPECT_EQ(p.omega(), 0.0);
  EXPECT_THROW(make_params_adiabatic(0.0, 0.0), DomainError);
  EXPECT_THROW(make_params_adiabatic(-1.0, 0.0), DomainError);
  EXPECT_THROW(make_params_adiabatic(0.1, -1.0), DomainError);
}

TEST(SystemParams, FoldsFieldSignsAndRejectsBadFrequencies) {
  const SystemParams p(-0.3, -1.2, 1.0, 0.5);
  EXPECT_EQ(p.b(), 0.3);
  EXPECT_EQ(p.b0(), 1.2);
  EXPECT_THROW(SystemParams(0.0, 1.0, -1.0, 0.0), DomainError);
  EXPECT_THROW(SystemParams(0.0, 1.0, 1.0, -0.1), DomainError);
  EXPECT_THROW(SystemParams(std::nan(""), 1.0, 1.0, 0.0), DomainError);
  EXPECT_THROW(SystemParams(0.0, 1.0, 1.0, 0.0).alpha(), DomainError);
  EXPECT_THROW(SystemParams(1.0, 0.0, 1.0, 1.0).k(), DomainError);
}

TEST(Binding, ByName) {
  EXPECT_EQ(make_binding("penning", 2.0), BindingPotential(PenningQuadrupole{2.0}));
  EXPECT_EQ(make_binding("oscillator", 2.0), BindingPotential(IsotropicOscillator{2.0}));
  EXPECT_THROW(make_binding("box", 1.0), DomainError);
  EXPECT_THROW(make_binding("penning", -1.0), DomainError);
  EXPECT_EQ(binding_name(DiagonalQuadratic{1, 2, 3}), "diagonal");
}

TEST(QuadraticForm, RejectsAsymmetric) {
  Mat6 s = Mat6::Zero();
  s(0, 1) = 1.0;
  EXPECT_THROW(QuadraticForm{s}, DomainError);
}

TEST(BuildG, HessianMatchesScalarDefinition) {
  for (const auto& c : random_cases(30, 1)) {
    const Mat6 expected = fd_hessian(scalar(c));
    const Mat6 actual = build_G(c.params, c.binding).matrix();
    EXPECT_LE((expected - actual).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(BuildG, ScalarConsistency) {
  auto rng = make_rng(2);
  std::normal_distribution<double> normal;
  const auto cases = random_cases(10, 3);
  for (int i = 0; i < 100; ++i) {
    const auto& c = cases[static_cast<std::size_t>(i) % cases.size()];
    Vec6 u;
    for (int a = 0; a < 6; ++a) u(a) = normal(rng);
    const double expected = scalar_G(c.params, c.binding, u);
    const double actual = build_G(c.params, c.binding)(u);
    EXPECT_LE(std::abs(expected - actual), 1e-12 * std::max(1.0, std::abs(expected)));
  }
}

TEST(BuildG, FreeOscillatorIsDiagonal) {
  const auto g = build_G(SystemParams(0.0, 0.0, 1.5, 0.0), IsotropicOscillator{1.5});
  Mat6 expected = Mat6::Zero();
  expected.diagonal() << 2.25, 2.25, 2.25, 1, 1, 1;
  EXPECT_EQ(g.matrix(), expected);
}

TEST(BuildG, AxialFieldOnlyDecouplesAxis) {
  const auto g = build_G(SystemParams(0.0, 0.7, 0.9, 0.0), PenningQuadrupole{0.9});
  EXPECT_EQ(g.matrix()(0, 2), 0.0);
  EXPECT_EQ(g.matrix()(1, 5), 0.0);
  EXPECT_EQ(g.matrix()(2, 4), 0.0);
  EXPECT_NEAR(g.matrix()(2, 2), 0.81, 1e-15);
}

TEST(L3Form, Examples) {
  const auto l3 = build_L3_form();
  Vec6 u;
  u << 1, 0, 0, 0, 1, 0;
  EXPECT_DOUBLE_EQ(l3(u), 1.0);
  u << 0, 1, 0, 1, 0, 0;
  EXPECT_DOUBLE_EQ(l3(u), -1.0);
  u << 0, 0, 1, 0, 0, 1;
  EXPECT_DOUBLE_EQ(l3(u), 0.0);
}

TEST(Lambda, IsotropicOscillatorSpectrum) {
  const double w0 = 1.7;
  const auto lambda = build_lambda(build_G(SystemParams(0, 0, w0, 0), IsotropicOscillator{w0}));
  Eigen::EigenSolver<Mat6> es(lambda.matrix());
  for (int i = 0; i < 6; ++i) {
    EXPECT_NEAR(es.eigenvalues()(i).real(), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(es.eigenvalues()(i).imag()), w0, 1e-12);
  }
}

TEST(Lambda, FreeParticleIsNilpotent) {
  Mat6 s = Mat6::Zero();
  s.diagonal() << 0, 0, 0, 1, 1, 1;
  const auto lambda = build_lambda(QuadraticForm(s));
  EXPECT_EQ((lambda.matrix() * lambda.matrix()).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Lambda, MatchesHamiltonEquations) {
  auto rng = make_rng(4);
  std::normal_distribution<double> normal;
  for (const auto& c : random_cases(12, 5)) {
    Vec6 u;
    for (int a = 0; a < 6; ++a) u(a) = normal(rng);
    const Vec6 expected = testing::hamilton_rhs(scalar(c), u);
    const Vec6 actual = build_lambda(build_G(c.params, c.binding)).matrix() * u;
    EXPECT_LE((expected - actual).norm(), 1e-12 * (1.0 + expected.norm()));
  }
}

TEST(Lambda, JLambdaIsSymmetric) {
  for (const auto& c : random_cases(20, 6)) {
    const Mat6 jl = symplectic_unit() * build_lambda(build_G(c.params, c.binding)).matrix();
    EXPECT_LE((jl - jl.transpose()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Lambda, EigenvaluesComeInQuadruples) {
  for (const auto& c : random_cases(20, 7)) {
    const Mat6 l = build_lambda(build_G(c.params, c.binding)).matrix();
    Eigen::EigenSolver<Mat6> es(l);
    const auto ev = es.eigenvalues();
    const double scale = 1e-7 * (1.0 + l.norm());
    for (int i = 0; i < 6; ++i) {
      for (const auto target : {std::conj(ev(i)), -ev(i)}) {
        double best = 1e300;
        for (int j = 0; j < 6; ++j) best = std::min(best, std::abs(ev(j) - target));
        EXPECT_LE(best, scale);
      }
    }
  }
}

TEST(Lambda, DerivativeIsMinusJTimesL3) {
  const Mat6 expected = -symplectic_unit() * build_L3_form().matrix();
  EXPECT_EQ(dlambda_domega(), expected);
  const auto p = SystemParams(0.3, 0.8, 1.1, 0.4);
  const Mat6 diff = build_lambda(build_G(p.with_omega(0.9), PenningQuadrupole{1.1})).matrix() -
                    build_lambda(build_G(p, PenningQuadrupole{1.1})).matrix();
  EXPECT_LE((diff - 0.5 * expected).cwiseAbs().maxCoeff(), 1e-14);
}

// Static axial-field Penning roots: w0 and b0 ± sqrt(b0² − w0²/2).
TEST(Lambda, AxialPenningClosedForm) {
  for (const auto [b0, w0] : {std::pair{1.0, 4.0 / 3.0}, std::pair{1.3, 0.9}, std::pair{2.0, 1.5}}) {
    const auto l = build_lambda(build_G(SystemParams(0.0, b0, w0, 0.0), PenningQuadrupole{w0}));
    Eigen::EigenSolver<Mat6> es(l.matrix());
    std::vector<double> freqs;
    for (int i = 0; i < 6; ++i) {
      EXPECT_NEAR(es.eigenvalues()(i).real(), 0.0, 1e-10);
      if (es.eigenvalues()(i).imag() > 0) freqs.push_back(es.eigenvalues()(i).imag());
    }
    const double root = std::sqrt(b0 * b0 - 0.5 * w0 * w0);
    std::vector<double> expected{w0, b0 + root, b0 - root};
    std::sort(freqs.begin(), freqs.end());
    std::sort(expected.begin(), expected.end());
    ASSERT_EQ(freqs.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(freqs[i], expected[i], 1e-7);
  }
}

TEST(KeyValues, RoundTrip) {
  for (const auto& c : random_cases(9, 8)) {
    const auto [params, binding] = parse_key_values(to_key_values(c.params, c.binding));
    EXPECT_EQ(params, c.params);
    EXPECT_EQ(binding, c.binding);
  }
}

TEST(KeyValues, CommentsAndErrors) {
  const auto [p, bnd] =
      parse_key_values("# header\n\nb = 0.1\nb0=1\nw0=1.25\nomega=0.5\nbinding=oscillator\n");
  EXPECT_EQ(p, SystemParams(0.1, 1.0, 1.25, 0.5));
  EXPECT_EQ(bnd, BindingPotential(IsotropicOscillator{1.25}));
  EXPECT_THROW(parse_key_values("b=0\nb0=1\nw0=1\nomega=0\nbinding=penning\nextra=1\n"), DomainError);
  EXPECT_THROW(parse_key_values("b=0\nb=1\nb0=1\nw0=1\nomega=0\nbinding=penning\n"), DomainError);
  EXPECT_THROW(parse_key_values("b=0\nb0=1\nw0=1\nbinding=penning\n"), DomainError);
  EXPECT_THROW(parse_key_values("b=x\nb0=1\nw0=1\nomega=0\nbinding=penning\n"), DomainError);
}

}  // namespace
}  // namespace penphase
