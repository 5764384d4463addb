#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "penphase/model.hpp"

namespace penphase {

enum class Classification { Confined, Unconfined, Boundary };

/// "Confined", "Unconfined", "Boundary".
std::string to_string(Classification c);

/// Stability thresholds, relative to (1 + ‖Λ‖).
struct Tolerances {
  double re_rel = 1e-9;
  double gap_rel = 1e-7;

  double re(double lambda_norm) const noexcept { return re_rel * (1.0 + lambda_norm); }
  double gap(double lambda_norm) const noexcept { return gap_rel * (1.0 + lambda_norm); }
};

/// One stable oscillation of Λ: eigenvalue +i·freq with its Krein sign.
struct Mode {
  double freq = 0.0;
  int krein_sign = 0;
  std::complex<double> eigenvalue;
  /// Right eigenvector, unit norm, largest component real positive.
  CVec6 eigvec;
  /// Left eigenvector scaled so that left.transpose() * eigvec == 1.
  CVec6 left;
};

struct ModeSpectrum {
  Classification classification = Classification::Boundary;
  /// Exactly three entries (descending freq) when Confined, empty otherwise.
  std::vector<Mode> modes;
  /// All six eigenvalues, ordered by descending imaginary then real part.
  std::array<std::complex<double>, 6> raw_eigenvalues{};
  double max_real_part = 0.0;
  double lambda_norm = 0.0;

  /// Krein signs in mode order, e.g. "++-"; empty unless Confined.
  std::string krein_pattern() const;
  /// Pattern packed into bits (bit i set when mode i has ε = −1); 0xFF unless Confined.
  std::uint8_t krein_code() const noexcept;
};

/// Eigenanalysis of Λ with the confined / unconfined / boundary split.
/// Throws NumericalError if the eigensolver fails or an eigenvector residual is off.
ModeSpectrum classify(const DynamicalMatrix& lambda, const Tolerances& tol = {});

/// Simple eigenvalues on the positive imaginary axis, even when the point as a
/// whole is Unconfined. Ordered by descending frequency.
std::vector<Mode> imaginary_axis_modes(const DynamicalMatrix& lambda, const Tolerances& tol = {});

/// sign(Re(v^H S v)) for an eigenvector of J·S with eigenvalue +iω.
/// Throws DegeneracyError when the energy form is numerically zero.
int krein_sign(const CVec6& v, const QuadraticForm& s);

/// Ladder operator A_i = c_iᵀ·u for one mode.
struct LadderMode {
  CVec6 coeffs;
  double freq = 0.0;
  int krein_sign = 0;
};

/// Normal-mode (ladder-operator) coordinates of a confined quadratic generator,
/// normalized so that [A_i, A_j†] = ε_j·δ_ij and [A_i, A_j] = 0.
class NormalModeBasis {
 public:
  NormalModeBasis(std::array<LadderMode, 3> modes);

  const std::array<LadderMode, 3>& modes() const noexcept { return modes_; }
  const LadderMode& operator[](std::size_t i) const { return modes_[i]; }

  /// Rows c_1..c_3, conj(c_1)..conj(c_3): (A, A†) = T·u.
  const CMat6& transform() const noexcept { return transform_; }
  const CMat6& inverse_transform() const noexcept { return inverse_; }

  /// [A_i, A_j†] evaluated through [u_a, u_b] = i·J_ab.
  std::complex<double> commutator_dagger(int i, int j) const;
  /// [A_i, A_j].
  std::complex<double> commutator(int i, int j) const;

 private:
  std::array<LadderMode, 3> modes_;
  CMat6 transform_;
  CMat6 inverse_;
};

/// Requires a Confined spectrum; throws DegeneracyError if a normalization pivot
/// vanishes and DomainError if the spectrum is not Confined.
NormalModeBasis normal_mode_basis(const ModeSpectrum& spectrum, const QuadraticForm& s);

struct ModeTracking {
  /// permutation[i] = index in `next` of the mode continuing mode i of `prev`.
  std::array<int, 3> permutation{0, 1, 2};
  /// Best and runner-up pairings are within 1e-3 of total overlap.
  bool needs_refinement = false;
  double best_overlap = 0.0;
};

/// Pairing of modes between two nearby Confined spectra by eigenvector overlap.
ModeTracking track_modes(const ModeSpectrum& prev, const ModeSpectrum& next);

/// e^{Λt}, scaling-and-squaring.
Mat6 propagator(const DynamicalMatrix& lambda, double t);

/// e^{Λt}·u0. Throws SaturationError if the result overflows.
Vec6 propagate(const DynamicalMatrix& lambda, const Vec6& u0, double t);

/// e^{Λt}·u0 rebuilt from the Confined eigenpairs: V·diag(e^{λt})·V⁻¹·u0.
Vec6 propagate_spectral(const ModeSpectrum& spectrum, const Vec6& u0, double t);

struct ProbeResult {
  bool bounded = true;
  /// Least-squares slope of log‖u(t)‖ over the second half of the samples.
  double growth_exponent = 0.0;
  /// sup‖u‖ over the horizon divided by sup‖u‖ over the first period.
  double sup_ratio = 1.0;
  /// Period used as time unit: 2π over the slowest nonzero |λ|.
  double period = 0.0;
};

/// Integrates u(t) for `horizon` periods and reports whether it stays bounded
/// (sup ratio ≤ 10). Integration stops early once growth is unambiguous.
ProbeResult boundedness_probe(const DynamicalMatrix& lambda, const Vec6& u0, int horizon = 1000);

}  // namespace penphase
