#include "penphase/phases.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "penphase/errors.hpp"

namespace penphase {

namespace {

using cd = std::complex<double>;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

ModeSpectrum spectrum_at(const QuadraticForm& lab, double omega) {
  return classify(build_lambda(lab - build_L3_form() * omega));
}

std::string describe(const SystemParams& p) {
  std::ostringstream out;
  out << "(b=" << p.b() << ", b0=" << p.b0() << ", w0=" << p.w0() << ", omega=" << p.omega()
      << ")";
  return out.str();
}

// Phase routines report a degenerate point as having no cyclic states; the
// derivative routines report it as a degeneracy.
const ModeSpectrum& require_confined(const ModeSpectrum& spectrum, const SystemParams& params,
                                     bool for_phase = false) {
  switch (spectrum.classification) {
    case Classification::Confined:
      return spectrum;
    case Classification::Unconfined:
      throw NoCyclicStatesError("no cyclic motions: spectrum is unconfined at " + describe(params));
    case Classification::Boundary:
      break;
  }
  if (for_phase) {
    throw NoCyclicStatesError("no cyclic motions: degenerate spectrum at " + describe(params) +
                              "; evaluate at a k > 0 or omega > 0 offset");
  }
  throw DegeneracyError("degenerate spectrum at " + describe(params) +
                        "; evaluate at a k > 0 or omega > 0 offset");
}

CMat6 adjugate(const CMat6& a) {
  CMat6 adj;
  Eigen::Matrix<cd, 5, 5> minor;
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      for (int r = 0, mr = 0; r < 6; ++r) {
        if (r == i) continue;
        for (int c = 0, mc = 0; c < 6; ++c) {
          if (c == j) continue;
          minor(mr, mc++) = a(r, c);
        }
        ++mr;
      }
      const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
      adj(j, i) = sign * minor.determinant();
    }
  }
  return adj;
}

// dλ/dω = −(∂D/∂ω)/(∂D/∂λ) with D(λ, ω) = det(λI − Λ(ω)), both partials from
// Jacobi's formula ∂det(A) = tr(adj(A)·∂A).
double implicit_dfreq(const Mat6& lambda, cd eigenvalue) {
  const CMat6 a = eigenvalue * CMat6::Identity() - lambda.cast<cd>();
  const CMat6 adj = adjugate(a);
  const cd d_dlambda = adj.trace();
  const cd d_domega = (adj * (-dlambda_domega()).cast<cd>()).trace();
  if (std::abs(d_dlambda) == 0.0) throw DegeneracyError("characteristic polynomial has a multiple root");
  return (-d_domega / d_dlambda).imag();
}

std::array<double, 3> tracked_freqs(const QuadraticForm& lab, double omega,
                                    const ModeSpectrum& base) {
  const auto spectrum = spectrum_at(lab, omega);
  if (spectrum.classification != Classification::Confined) {
    throw NumericalError("finite-difference stencil leaves the confined domain");
  }
  const auto tracking = track_modes(base, spectrum);
  if (tracking.needs_refinement) {
    throw NumericalError("ambiguous mode tracking inside finite-difference stencil");
  }
  std::array<double, 3> out{};
  for (std::size_t i = 0; i < 3; ++i) {
    out[i] = spectrum.modes[static_cast<std::size_t>(tracking.permutation[i])].freq;
  }
  return out;
}

std::array<double, 3> finite_difference(const QuadraticForm& lab, double omega,
                                        const ModeSpectrum& base) {
  const double h = 1e-5 * std::max(1.0, omega);
  auto central = [&](double step) {
    const auto plus = tracked_freqs(lab, omega + step, base);
    const auto minus = tracked_freqs(lab, omega - step, base);
    std::array<double, 3> d{};
    for (std::size_t i = 0; i < 3; ++i) d[i] = (plus[i] - minus[i]) / (2.0 * step);
    return d;
  };
  const auto coarse = central(h);
  const auto fine = central(0.5 * h);
  std::array<double, 3> out{};
  for (std::size_t i = 0; i < 3; ++i) out[i] = (4.0 * fine[i] - coarse[i]) / 3.0;
  return out;
}

std::array<double, 3> derivatives(const QuadraticForm& lab, double omega,
                                  const ModeSpectrum& spectrum, DerivativeMethod method) {
  std::array<double, 3> out{};
  switch (method) {
    case DerivativeMethod::Perturbative:
      for (std::size_t i = 0; i < 3; ++i) out[i] = perturbative_dfreq(spectrum.modes[i]);
      return out;
    case DerivativeMethod::Implicit: {
      const Mat6 lambda = build_lambda(lab - build_L3_form() * omega).matrix();
      for (std::size_t i = 0; i < 3; ++i) {
        out[i] = implicit_dfreq(lambda, spectrum.modes[i].eigenvalue);
      }
      return out;
    }
    case DerivativeMethod::FiniteDifference:
      return finite_difference(lab, omega, spectrum);
  }
  return out;
}

double relative_gap(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

PhaseReport assemble(const QuadraticForm& lab, double omega, const ModeSpectrum& spectrum,
                     const FockLabel& n) {
  PhaseReport report;
  const auto pert = derivatives(lab, omega, spectrum, DerivativeMethod::Perturbative);
  const auto impl = derivatives(lab, omega, spectrum, DerivativeMethod::Implicit);
  const auto fd = derivatives(lab, omega, spectrum, DerivativeMethod::FiniteDifference);

  report.dfreq_domega = pert;
  double beta = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& mode = spectrum.modes[i];
    report.freqs[i] = mode.freq;
    report.krein_signs[i] = mode.krein_sign;
    report.quasienergy += mode.krein_sign * mode.freq * (n[i] + 0.5);
    beta += mode.krein_sign * (n[i] + 0.5) * pert[i];
    report.method_spread = std::max({report.method_spread, relative_gap(pert[i], impl[i]),
                                     relative_gap(pert[i], fd[i]), relative_gap(impl[i], fd[i])});
  }
  report.aa_phase_eq8 = -kTwoPi * beta;
  return report;
}

}  // namespace

double quasienergy(const NormalModeBasis& basis, const FockLabel& n) {
  double e = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    e += basis[i].krein_sign * basis[i].freq * (n[i] + 0.5);
  }
  return e;
}

double expectation_quadratic(const QuadraticForm& q, const NormalModeBasis& basis,
                             const FockLabel& n) {
  // u = T⁻¹·(A, A†), so ½uᵀQu = ½(A, A†)ᵀ K (A, A†) with K = T⁻ᵀ Q T⁻¹. In a Fock
  // state only the A_i A_i† and A_i† A_i terms survive and
  // ⟨A_i A_i†⟩ + ⟨A_i† A_i⟩ = 2n_i + 1 for either commutator sign.
  const CMat6& inv = basis.inverse_transform();
  const CMat6 k = inv.transpose() * q.matrix().cast<cd>() * inv;
  double value = 0.0;
  for (int i = 0; i < 3; ++i) {
    value += k(i, i + 3).real() * (n[static_cast<std::size_t>(i)] + 0.5);
  }
  return value;
}

double perturbative_dfreq(const Mode& mode) {
  const cd dlambda =
      (mode.left.transpose() * dlambda_domega().cast<cd>() * mode.eigvec)(0, 0);
  return dlambda.imag();
}

std::array<double, 3> dmode_domega(const SystemParams& params, const BindingPotential& binding,
                                   DerivativeMethod method) {
  const auto lab = build_lab_hamiltonian(params, binding);
  const auto spectrum = spectrum_at(lab, params.omega());
  require_confined(spectrum, params);
  return derivatives(lab, params.omega(), spectrum, method);
}

PhaseReport aa_phase(const SystemParams& params, const BindingPotential& binding,
                     const FockLabel& n) {
  if (!(params.omega() > 0.0)) {
    throw DomainError("AA phase needs omega > 0; use the Berry-phase routine at omega = 0");
  }
  const auto lab = build_lab_hamiltonian(params, binding);
  const auto g = lab - build_L3_form() * params.omega();
  const auto spectrum = classify(build_lambda(g));
  require_confined(spectrum, params, true);

  auto report = assemble(lab, params.omega(), spectrum, n);
  const auto basis = normal_mode_basis(spectrum, g);
  report.aa_phase_eq7 = kTwoPi * expectation_quadratic(build_L3_form(), basis, n);

  const double mismatch = std::abs(*report.aa_phase_eq7 - report.aa_phase_eq8);
  if (mismatch > 1e-6 * (1.0 + std::abs(report.aa_phase_eq8))) {
    std::ostringstream msg;
    msg << "AA phase routes disagree by " << mismatch << " at " << describe(params);
    throw NumericalError(msg.str());
  }
  return report;
}

PhaseReport berry_phase_static(const SystemParams& params, const BindingPotential& binding,
                               const FockLabel& n) {
  if (params.omega() != 0.0) throw DomainError("Berry phase is evaluated at omega = 0");
  const auto lab = build_lab_hamiltonian(params, binding);
  const auto spectrum = spectrum_at(lab, 0.0);
  require_confined(spectrum, params, true);
  return assemble(lab, 0.0, spectrum, n);
}

PhaseReport berry_phase_adiabatic(double k, const BindingPotential& binding, const FockLabel& n) {
  return berry_phase_static(make_params_adiabatic(k, 0.0), binding, n);
}

double cos_theta(double k) {
  if (!(k >= 0.0)) throw DomainError("cos_theta needs k >= 0");
  return 1.0 / std::hypot(1.0, k);
}

ResonanceShift resonance_shift(const SystemParams& params, const BindingPotential& binding,
                               const FockLabel& n, const FockLabel& n_prime, double delta_omega) {
  if (!std::isfinite(delta_omega)) throw DomainError("delta_omega must be finite");
  auto phases = [&](const FockLabel& label) {
    return params.omega() > 0.0 ? aa_phase(params, binding, label)
                                : berry_phase_static(params, binding, label);
  };
  const auto pn = phases(n);
  const auto pm = phases(n_prime);

  ResonanceShift out;
  out.omega_p = pn.quasienergy - pm.quasienergy;
  out.predicted = out.omega_p - (pn.aa_phase_eq8 - pm.aa_phase_eq8) * delta_omega / kTwoPi;

  const auto lab = build_lab_hamiltonian(params, binding);
  const auto base = spectrum_at(lab, params.omega());
  const auto shifted = spectrum_at(lab, params.omega() + delta_omega);
  if (shifted.classification != Classification::Confined) {
    throw NoCyclicStatesError("shifted rotation frequency leaves the confined domain");
  }
  const auto tracking = track_modes(base, shifted);
  double e_n = 0.0;
  double e_m = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& mode = shifted.modes[static_cast<std::size_t>(tracking.permutation[i])];
    if (mode.krein_sign != base.modes[i].krein_sign) {
      throw NumericalError("Krein sign changed under the rotation-frequency shift");
    }
    e_n += mode.krein_sign * mode.freq * (n[i] + 0.5);
    e_m += mode.krein_sign * mode.freq * (n_prime[i] + 0.5);
  }
  out.exact = e_n - e_m;
  out.linearization_error = std::abs(out.predicted - out.exact);
  return out;
}

}  // namespace penphase
