#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <variant>

#include <Eigen/Dense>

namespace penphase {

using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using CVec6 = Eigen::Matrix<std::complex<double>, 6, 1>;
using CMat6 = Eigen::Matrix<std::complex<double>, 6, 6>;

/// Physical frequencies of the problem in units with hbar = m = 1.
///
/// Magnetic fields enter only through their Larmor frequencies b = |e|B/(2mc)
/// (transverse, rotating) and b0 = |e|B0/(2mc) (axial). Frequencies are stored
/// rather than the dimensionless ratios because derivatives with respect to the
/// rotation frequency are taken at fixed fields.
class SystemParams {
 public:
  /// Negative field magnitudes are folded onto |b|, |b0|. Negative or non-finite
  /// w0 / omega throw DomainError.
  SystemParams(double b, double b0, double w0, double omega);

  /// Penning loop: w0 = (4/3)·b0.
  static SystemParams penning_loop(double b, double b0, double omega);

  double b() const noexcept { return b_; }
  double b0() const noexcept { return b0_; }
  double w0() const noexcept { return w0_; }
  double omega() const noexcept { return omega_; }

  // Dimensionless views; alpha/alpha0/w need omega > 0, k needs b0 > 0.
  double alpha() const;
  double alpha0() const;
  double w() const;
  double k() const;

  bool is_penning_loop(double rel_tol = 1e-12) const noexcept;

  SystemParams with_omega(double omega) const { return {b_, b0_, w0_, omega}; }

  friend bool operator==(const SystemParams&, const SystemParams&) = default;

 private:
  double b_;
  double b0_;
  double w0_;
  double omega_;
};

/// Dimensionless parameterization: omega is the time unit.
SystemParams make_params_dimensionless(double alpha, double alpha0, double w);

/// Adiabatic sweep parameterization: b0 is the field unit, b = k, Penning loop.
SystemParams make_params_adiabatic(double k, double omega);

/// V = ½·w0²·(x3² − (x1²+x2²)/2).
struct PenningQuadrupole {
  double w0;
  friend bool operator==(const PenningQuadrupole&, const PenningQuadrupole&) = default;
};

/// V = ½·w0²·|x|².
struct IsotropicOscillator {
  double w0;
  friend bool operator==(const IsotropicOscillator&, const IsotropicOscillator&) = default;
};

/// V = ½·(w1²x1² + w2²x2² + w3²x3²). Extension for symmetry experiments.
struct DiagonalQuadratic {
  double w1;
  double w2;
  double w3;
  friend bool operator==(const DiagonalQuadratic&, const DiagonalQuadratic&) = default;
};

using BindingPotential = std::variant<PenningQuadrupole, IsotropicOscillator, DiagonalQuadratic>;

/// "penning", "oscillator" or "diagonal".
std::string binding_name(const BindingPotential& binding);

/// PenningQuadrupole or IsotropicOscillator by name ("penning", "oscillator").
BindingPotential make_binding(std::string_view name, double w0);

/// Scalar quadratic form G(u) = ½·uᵀSu over u = (x1, x2, x3, p1, p2, p3).
class QuadraticForm {
 public:
  QuadraticForm() : s_(Mat6::Zero()) {}

  /// Throws DomainError unless `s` is exactly symmetric.
  explicit QuadraticForm(const Mat6& s);

  /// Adds `value` to S(i,j) and mirrors it to S(j,i).
  QuadraticForm& add(int i, int j, double value);

  double operator()(const Vec6& u) const { return 0.5 * u.dot(s_ * u); }
  const Mat6& matrix() const noexcept { return s_; }

  QuadraticForm operator-(const QuadraticForm& other) const;
  QuadraticForm operator+(const QuadraticForm& other) const;
  QuadraticForm operator*(double scale) const;

 private:
  Mat6 s_;
};

/// Block symplectic unit [[0, I3], [−I3, 0]].
const Mat6& symplectic_unit();

/// Time-independent lab Hamiltonian H(0) with B(0) = (B, 0, B0).
QuadraticForm build_lab_hamiltonian(const SystemParams& params, const BindingPotential& binding);

/// L3 = x1·p2 − x2·p1 in the ½·uᵀSu convention (entries ±1).
QuadraticForm build_L3_form();

/// Rotating-frame generator G = H(0) − omega·L3.
QuadraticForm build_G(const SystemParams& params, const BindingPotential& binding);

/// Λ = J·S: the generator of u(t) = e^{Λt}u.
class DynamicalMatrix {
 public:
  explicit DynamicalMatrix(const QuadraticForm& generator);

  const Mat6& matrix() const noexcept { return lambda_; }
  const QuadraticForm& generator() const noexcept { return generator_; }
  /// Frobenius norm, used to scale stability tolerances.
  double norm() const noexcept { return norm_; }

 private:
  QuadraticForm generator_;
  Mat6 lambda_;
  double norm_;
};

DynamicalMatrix build_lambda(const QuadraticForm& generator);

/// dΛ/dω at fixed fields: −J·S_L3 (independent of every parameter).
const Mat6& dlambda_domega();

/// key=value lines with keys b, b0, w0, omega, binding.
std::string to_key_values(const SystemParams& params, const BindingPotential& binding);

/// Inverse of to_key_values. Blank lines and '#' comments are skipped; unknown
/// or duplicate keys throw DomainError.
std::pair<SystemParams, BindingPotential> parse_key_values(std::string_view text);

}  // namespace penphase
