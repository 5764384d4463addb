#include "penphase/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "penphase/errors.hpp"

namespace penphase {

namespace {

using cd = std::complex<double>;
using CVals6 = Eigen::Matrix<cd, 6, 1>;

struct Eigensystem {
  CVals6 values;
  CMat6 vectors;
};

Eigensystem solve(const DynamicalMatrix& lambda) {
  Eigen::EigenSolver<Mat6> es(lambda.matrix(), true);
  if (es.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "eigensolver failed for Lambda =\n" << lambda.matrix();
    throw NumericalError(msg.str());
  }
  return {es.eigenvalues(), es.eigenvectors()};
}

std::array<cd, 6> sorted_eigenvalues(const CVals6& values) {
  std::array<cd, 6> out;
  for (int i = 0; i < 6; ++i) out[static_cast<std::size_t>(i)] = values(i);
  std::sort(out.begin(), out.end(), [](cd a, cd b) {
    if (a.imag() != b.imag()) return a.imag() > b.imag();
    return a.real() > b.real();
  });
  return out;
}

/// Unit norm, largest-magnitude component real and positive. Returns the scale applied.
cd normalize_phase(CVec6& v) {
  int pivot = 0;
  for (int i = 1; i < 6; ++i) {
    if (std::abs(v(i)) > std::abs(v(pivot))) pivot = i;
  }
  const cd scale = std::conj(v(pivot)) / (std::abs(v(pivot)) * v.norm());
  v *= scale;
  return scale;
}

Mode make_mode(const DynamicalMatrix& lambda, const Eigensystem& sys, const CMat6& inverse, int idx) {
  Mode mode;
  mode.eigenvalue = sys.values(idx);
  mode.freq = mode.eigenvalue.imag();
  mode.eigvec = sys.vectors.col(idx);
  const cd scale = normalize_phase(mode.eigvec);
  mode.left = inverse.row(idx).transpose() / scale;

  const cd i_freq(0.0, mode.freq);
  const double residual = (lambda.matrix().cast<cd>() * mode.eigvec - i_freq * mode.eigvec).norm();
  if (residual > 1e-9 * (1.0 + lambda.norm())) {
    std::ostringstream msg;
    msg << "eigenvector residual " << residual << " too large at frequency " << mode.freq;
    throw NumericalError(msg.str());
  }
  mode.krein_sign = krein_sign(mode.eigvec, lambda.generator());
  return mode;
}

void sort_modes(std::vector<Mode>& modes) {
  std::sort(modes.begin(), modes.end(), [](const Mode& a, const Mode& b) {
    if (a.freq != b.freq) return a.freq > b.freq;
    return a.krein_sign > b.krein_sign;
  });
}

}  // namespace

std::string to_string(Classification c) {
  switch (c) {
    case Classification::Confined:
      return "Confined";
    case Classification::Unconfined:
      return "Unconfined";
    case Classification::Boundary:
      return "Boundary";
  }
  return "?";
}

std::string ModeSpectrum::krein_pattern() const {
  std::string out;
  for (const auto& m : modes) out += m.krein_sign > 0 ? '+' : '-';
  return out;
}

std::uint8_t ModeSpectrum::krein_code() const noexcept {
  if (classification != Classification::Confined) return 0xFF;
  std::uint8_t code = 0;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    if (modes[i].krein_sign < 0) code |= static_cast<std::uint8_t>(1u << i);
  }
  return code;
}

ModeSpectrum classify(const DynamicalMatrix& lambda, const Tolerances& tol) {
  ModeSpectrum out;
  out.lambda_norm = lambda.norm();
  const auto sys = solve(lambda);
  out.raw_eigenvalues = sorted_eigenvalues(sys.values);
  for (const auto& ev : out.raw_eigenvalues) {
    out.max_real_part = std::max(out.max_real_part, std::abs(ev.real()));
  }

  if (out.max_real_part > tol.re(out.lambda_norm)) {
    out.classification = Classification::Unconfined;
    return out;
  }

  const double gap = tol.gap(out.lambda_norm);
  bool degenerate = false;
  for (std::size_t i = 0; i < 6; ++i) {
    if (std::abs(out.raw_eigenvalues[i].imag()) <= gap) degenerate = true;
    if (i > 0 && out.raw_eigenvalues[i - 1].imag() - out.raw_eigenvalues[i].imag() <= gap) {
      degenerate = true;
    }
  }
  if (degenerate) {
    out.classification = Classification::Boundary;
    return out;
  }

  const CMat6 inverse = sys.vectors.partialPivLu().inverse();
  try {
    for (int i = 0; i < 6; ++i) {
      if (sys.values(i).imag() > 0.0) out.modes.push_back(make_mode(lambda, sys, inverse, i));
    }
  } catch (const DegeneracyError&) {
    out.modes.clear();
    out.classification = Classification::Boundary;
    return out;
  }
  if (out.modes.size() != 3) {
    throw NumericalError("confined spectrum without three positive frequencies");
  }
  sort_modes(out.modes);
  out.classification = Classification::Confined;
  return out;
}

std::vector<Mode> imaginary_axis_modes(const DynamicalMatrix& lambda, const Tolerances& tol) {
  const auto sys = solve(lambda);
  const double re_tol = tol.re(lambda.norm());
  const double gap = tol.gap(lambda.norm());

  std::vector<int> picked;
  for (int i = 0; i < 6; ++i) {
    const cd ev = sys.values(i);
    if (ev.imag() <= gap || std::abs(ev.real()) > re_tol) continue;
    bool simple = true;
    for (int j = 0; j < 6; ++j) {
      if (j != i && std::abs(sys.values(j) - ev) <= gap) simple = false;
    }
    if (simple) picked.push_back(i);
  }

  std::vector<Mode> modes;
  if (picked.empty()) return modes;
  const CMat6 inverse = sys.vectors.partialPivLu().inverse();
  for (int idx : picked) modes.push_back(make_mode(lambda, sys, inverse, idx));
  sort_modes(modes);
  return modes;
}

int krein_sign(const CVec6& v, const QuadraticForm& s) {
  const cd energy = v.dot(s.matrix().cast<cd>() * v);
  const double floor = 1e-10 * s.matrix().norm() * v.squaredNorm();
  if (std::abs(energy) < floor) {
    throw DegeneracyError("Krein sign undefined: mode energy form vanishes");
  }
  return energy.real() > 0.0 ? 1 : -1;
}

NormalModeBasis::NormalModeBasis(std::array<LadderMode, 3> modes) : modes_(std::move(modes)) {
  for (int i = 0; i < 3; ++i) {
    const auto& c = modes_[static_cast<std::size_t>(i)].coeffs;
    transform_.row(i) = c.transpose();
    transform_.row(i + 3) = c.conjugate().transpose();
  }
  inverse_ = transform_.partialPivLu().inverse();
}

std::complex<double> NormalModeBasis::commutator_dagger(int i, int j) const {
  const CMat6 ij = cd(0.0, 1.0) * symplectic_unit().cast<cd>();
  return (modes_[static_cast<std::size_t>(i)].coeffs.transpose() * ij *
          modes_[static_cast<std::size_t>(j)].coeffs.conjugate())(0, 0);
}

std::complex<double> NormalModeBasis::commutator(int i, int j) const {
  const CMat6 ij = cd(0.0, 1.0) * symplectic_unit().cast<cd>();
  return (modes_[static_cast<std::size_t>(i)].coeffs.transpose() * ij *
          modes_[static_cast<std::size_t>(j)].coeffs)(0, 0);
}

NormalModeBasis normal_mode_basis(const ModeSpectrum& spectrum, const QuadraticForm& s) {
  if (spectrum.classification != Classification::Confined) {
    throw DomainError("normal-mode basis requires a Confined spectrum");
  }
  const CMat6 j = symplectic_unit().cast<cd>();
  std::array<LadderMode, 3> ladder;
  for (std::size_t i = 0; i < 3; ++i) {
    const Mode& mode = spectrum.modes[i];
    // A = (J·v)ᵀu satisfies [G, A] = −ω·A when Λv = iωv.
    CVec6 c = j * mode.eigvec;
    const double norm_form = (cd(0.0, 1.0) * (c.transpose() * j * c.conjugate())(0, 0)).real();
    if (std::abs(norm_form) < 1e-12 * c.squaredNorm()) {
      throw DegeneracyError("ladder normalization pivot vanishes");
    }
    const int sign = norm_form > 0.0 ? 1 : -1;
    if (sign != mode.krein_sign) {
      throw NumericalError("commutator sign disagrees with mode energy sign");
    }
    c /= std::sqrt(std::abs(norm_form));
    int pivot = 0;
    for (int a = 1; a < 6; ++a) {
      if (std::abs(c(a)) > std::abs(c(pivot))) pivot = a;
    }
    c *= std::conj(c(pivot)) / std::abs(c(pivot));
    ladder[i] = LadderMode{c, mode.freq, mode.krein_sign};
  }
  NormalModeBasis basis(ladder);

  // In ladder coordinates S must reduce to ε_i·ω_i on the (A_i, A_i†) pairs.
  const CMat6 k = basis.inverse_transform().transpose() * s.matrix().cast<cd>() *
                  basis.inverse_transform();
  for (int i = 0; i < 3; ++i) {
    const auto& m = ladder[static_cast<std::size_t>(i)];
    if (std::abs(k(i, i + 3) - m.krein_sign * m.freq) > 1e-8 * (1.0 + s.matrix().norm())) {
      throw NumericalError("ladder basis does not diagonalize the generator");
    }
  }
  return basis;
}

ModeTracking track_modes(const ModeSpectrum& prev, const ModeSpectrum& next) {
  if (prev.classification != Classification::Confined ||
      next.classification != Classification::Confined) {
    throw DomainError("mode tracking requires two Confined spectra");
  }
  Eigen::Matrix3d overlap;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      overlap(i, j) = std::abs(prev.modes[static_cast<std::size_t>(i)].eigvec.dot(
          next.modes[static_cast<std::size_t>(j)].eigvec));
    }
  }

  std::array<int, 3> perm{0, 1, 2};
  ModeTracking out;
  double best = -1.0;
  double runner_up = -1.0;
  do {
    const double total = overlap(0, perm[0]) + overlap(1, perm[1]) + overlap(2, perm[2]);
    if (total > best) {
      runner_up = best;
      best = total;
      out.permutation = perm;
    } else if (total > runner_up) {
      runner_up = total;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  out.best_overlap = best;
  out.needs_refinement = best - runner_up < 1e-3;
  return out;
}

Mat6 propagator(const DynamicalMatrix& lambda, double t) {
  const Mat6 scaled = lambda.matrix() * t;
  return scaled.exp();
}

Vec6 propagate(const DynamicalMatrix& lambda, const Vec6& u0, double t) {
  if (!u0.allFinite() || !std::isfinite(t)) throw DomainError("propagate: non-finite input");
  const Vec6 out = propagator(lambda, t) * u0;
  if (!out.allFinite() || out.norm() > 1e300) {
    const auto sys = solve(lambda);
    double growth = 0.0;
    for (int i = 0; i < 6; ++i) growth = std::max(growth, std::abs(sys.values(i).real()));
    std::ostringstream msg;
    msg << "propagation saturated at t = " << t << " (growth exponent " << growth << ")";
    throw SaturationError(msg.str(), growth);
  }
  return out;
}

Vec6 propagate_spectral(const ModeSpectrum& spectrum, const Vec6& u0, double t) {
  if (spectrum.classification != Classification::Confined) {
    throw DomainError("spectral propagation requires a Confined spectrum");
  }
  const CVec6 u = u0.cast<cd>();
  CVec6 acc = CVec6::Zero();
  for (const auto& mode : spectrum.modes) {
    const cd amplitude = mode.left.transpose() * u;
    acc += std::exp(cd(0.0, mode.freq * t)) * amplitude * mode.eigvec;
  }
  // The −iω partners are the complex conjugates, so the sum is 2·Re.
  return 2.0 * acc.real();
}

ProbeResult boundedness_probe(const DynamicalMatrix& lambda, const Vec6& u0, int horizon) {
  if (horizon < 1) throw DomainError("probe horizon must be >= 1 period");
  const double n0 = u0.norm();
  if (!(n0 > 0.0)) throw DomainError("probe needs a nonzero initial vector");

  const auto sys = solve(lambda);
  const double cutoff = 1e-8 * (1.0 + lambda.norm());
  double slowest = 0.0;
  for (int i = 0; i < 6; ++i) {
    const double mag = std::abs(sys.values(i));
    if (mag > cutoff && (slowest == 0.0 || mag < slowest)) slowest = mag;
  }
  if (slowest == 0.0) slowest = 1.0;

  constexpr int kStepsPerPeriod = 32;
  constexpr double kGiveUpRatio = 1e30;
  ProbeResult out;
  out.period = 2.0 * std::numbers::pi / slowest;
  const double dt = out.period / kStepsPerPeriod;
  const Mat6 step = propagator(lambda, dt);

  Vec6 u = u0;
  double first_sup = n0;
  double sup = n0;
  std::vector<std::pair<double, double>> samples{{0.0, std::log(n0)}};
  for (int period = 1; period <= horizon; ++period) {
    for (int s = 0; s < kStepsPerPeriod; ++s) {
      u = step * u;
      const double n = u.norm();
      sup = std::max(sup, n);
      if (period == 1) first_sup = std::max(first_sup, n);
    }
    const double n = u.norm();
    samples.emplace_back(period * out.period, std::log(n));
    if (!std::isfinite(n) || sup > kGiveUpRatio * first_sup) break;
  }

  out.sup_ratio = sup / first_sup;
  out.bounded = out.sup_ratio <= 10.0;

  // Least-squares slope over the second half (all samples if too few).
  std::size_t begin = samples.size() / 2;
  if (samples.size() - begin < 2) begin = 0;
  double st = 0.0, sl = 0.0, stt = 0.0, stl = 0.0;
  const double count = static_cast<double>(samples.size() - begin);
  for (std::size_t i = begin; i < samples.size(); ++i) {
    st += samples[i].first;
    sl += samples[i].second;
    stt += samples[i].first * samples[i].first;
    stl += samples[i].first * samples[i].second;
  }
  const double denom = count * stt - st * st;
  out.growth_exponent = denom > 0.0 ? (count * stl - st * sl) / denom : 0.0;
  return out;
}

}  // namespace penphase
