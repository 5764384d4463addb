#pragma once

#include <array>
#include <optional>

#include "penphase/model.hpp"
#include "penphase/spectral.hpp"

namespace penphase {

/// Quanta per mode |n1, n2, n3⟩, in the mode order of the spectrum (descending frequency).
struct FockLabel {
  std::array<unsigned, 3> n{0, 0, 0};

  unsigned operator[](std::size_t i) const { return n[i]; }
  friend bool operator==(const FockLabel&, const FockLabel&) = default;
};

struct PhaseReport {
  double quasienergy = 0.0;
  /// 2π⟨L3⟩; absent at omega = 0 (no cyclic motion without rotation).
  std::optional<double> aa_phase_eq7;
  /// −2π·Σ ε_i (n_i + ½)·∂ω_i/∂ω.
  double aa_phase_eq8 = 0.0;
  std::array<double, 3> dfreq_domega{};
  /// Largest pairwise disagreement among the three derivative methods,
  /// |a − b| / max(1, |a|, |b|).
  double method_spread = 0.0;
  std::array<double, 3> freqs{};
  std::array<int, 3> krein_signs{};
};

/// E = Σ ε_i ω_i (n_i + ½).
double quasienergy(const NormalModeBasis& basis, const FockLabel& n);

/// ⟨n|Q|n⟩ for any quadratic form Q, through its ladder-basis components.
double expectation_quadratic(const QuadraticForm& q, const NormalModeBasis& basis,
                             const FockLabel& n);

enum class DerivativeMethod { Implicit, Perturbative, FiniteDifference };

/// ∂ω_i/∂ω at fixed b, b0, w0 (mode order as in classify()).
///
/// Throws NoCyclicStatesError when the point is Unconfined and DegeneracyError
/// when it is a Boundary point; offset k or omega to move off the degeneracy.
std::array<double, 3> dmode_domega(const SystemParams& params, const BindingPotential& binding,
                                   DerivativeMethod method);

/// Perturbative ∂ω/∂ω for arbitrary stable modes: Im(wᵀ·(dΛ/dω)·v).
double perturbative_dfreq(const Mode& mode);

/// Aharonov–Anandan phase of |n⟩ for omega > 0, by both the ⟨L3⟩ and the
/// −2π ∂E/∂ω routes. Throws NumericalError if the two disagree.
PhaseReport aa_phase(const SystemParams& params, const BindingPotential& binding,
                     const FockLabel& n);

/// Phase at omega = 0 (Berry limit) for arbitrary static parameters.
PhaseReport berry_phase_static(const SystemParams& params, const BindingPotential& binding,
                               const FockLabel& n);

/// Berry phase on the adiabatic sweep: b0 = 1, b = k, w0 = 4/3, omega = 0.
PhaseReport berry_phase_adiabatic(double k, const BindingPotential& binding, const FockLabel& n);

/// cos θ = (1 + k²)^{-1/2}.
double cos_theta(double k);

struct ResonanceShift {
  /// E_n − E_n' at omega.
  double omega_p = 0.0;
  /// First-order prediction ω_p − (β_n − β_n')·δω / 2π.
  double predicted = 0.0;
  /// E_n − E_n' recomputed at omega + δω.
  double exact = 0.0;
  double linearization_error = 0.0;
};

ResonanceShift resonance_shift(const SystemParams& params, const BindingPotential& binding,
                               const FockLabel& n, const FockLabel& n_prime, double delta_omega);

}  // namespace penphase
