#include "penphase/model.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "penphase/errors.hpp"
#include "penphase/format.hpp"

namespace penphase {

namespace {

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) {
    throw DomainError(std::string(name) + " must be finite");
  }
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

double parse_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(value, &used);
  } catch (const std::exception&) {
    throw DomainError("cannot parse value for '" + key + "': " + value);
  }
  if (used != value.size()) {
    throw DomainError("trailing characters in value for '" + key + "': " + value);
  }
  return out;
}

}  // namespace

SystemParams::SystemParams(double b, double b0, double w0, double omega)
    : b_(std::abs(b)), b0_(std::abs(b0)), w0_(w0), omega_(omega) {
  require_finite(b, "b");
  require_finite(b0, "b0");
  require_finite(w0, "w0");
  require_finite(omega, "omega");
  if (w0 < 0.0) throw DomainError("w0 must be >= 0");
  if (omega < 0.0) throw DomainError("omega must be >= 0");
}

SystemParams SystemParams::penning_loop(double b, double b0, double omega) {
  return {b, b0, 4.0 / 3.0 * std::abs(b0), omega};
}

double SystemParams::alpha() const {
  if (omega_ <= 0.0) throw DomainError("alpha is undefined at omega = 0");
  return b_ / omega_;
}

double SystemParams::alpha0() const {
  if (omega_ <= 0.0) throw DomainError("alpha0 is undefined at omega = 0");
  return b0_ / omega_;
}

double SystemParams::w() const {
  if (omega_ <= 0.0) throw DomainError("w is undefined at omega = 0");
  return w0_ / omega_;
}

double SystemParams::k() const {
  if (b0_ <= 0.0) throw DomainError("k is undefined at b0 = 0");
  return b_ / b0_;
}

bool SystemParams::is_penning_loop(double rel_tol) const noexcept {
  return std::abs(w0_ - 4.0 / 3.0 * b0_) <= rel_tol * std::max(1.0, b0_);
}

SystemParams make_params_dimensionless(double alpha, double alpha0, double w) {
  if (alpha < 0.0 || alpha0 < 0.0 || w < 0.0) {
    throw DomainError("dimensionless parameters must be non-negative");
  }
  return {alpha, alpha0, w, 1.0};
}

SystemParams make_params_adiabatic(double k, double omega) {
  if (!(k > 0.0)) throw DomainError("k must be > 0");
  if (omega < 0.0) throw DomainError("omega must be >= 0");
  return SystemParams::penning_loop(k, 1.0, omega);
}

std::string binding_name(const BindingPotential& binding) {
  struct Visitor {
    std::string operator()(const PenningQuadrupole&) const { return "penning"; }
    std::string operator()(const IsotropicOscillator&) const { return "oscillator"; }
    std::string operator()(const DiagonalQuadratic&) const { return "diagonal"; }
  };
  return std::visit(Visitor{}, binding);
}

BindingPotential make_binding(std::string_view name, double w0) {
  if (!(w0 >= 0.0) || !std::isfinite(w0)) throw DomainError("w0 must be finite and >= 0");
  if (name == "penning") return PenningQuadrupole{w0};
  if (name == "oscillator") return IsotropicOscillator{w0};
  throw DomainError("unknown binding '" + std::string(name) + "' (expected penning or oscillator)");
}

QuadraticForm::QuadraticForm(const Mat6& s) : s_(s) {
  if (s != s.transpose()) throw DomainError("quadratic form matrix must be symmetric");
}

QuadraticForm& QuadraticForm::add(int i, int j, double value) {
  s_(i, j) += value;
  if (i != j) s_(j, i) += value;
  return *this;
}

QuadraticForm QuadraticForm::operator-(const QuadraticForm& other) const {
  QuadraticForm out;
  out.s_ = s_ - other.s_;
  return out;
}

QuadraticForm QuadraticForm::operator+(const QuadraticForm& other) const {
  QuadraticForm out;
  out.s_ = s_ + other.s_;
  return out;
}

QuadraticForm QuadraticForm::operator*(double scale) const {
  QuadraticForm out;
  out.s_ = s_ * scale;
  return out;
}

const Mat6& symplectic_unit() {
  static const Mat6 j = [] {
    Mat6 m = Mat6::Zero();
    m.topRightCorner<3, 3>() = Eigen::Matrix3d::Identity();
    m.bottomLeftCorner<3, 3>() = -Eigen::Matrix3d::Identity();
    return m;
  }();
  return j;
}

QuadraticForm build_lab_hamiltonian(const SystemParams& params, const BindingPotential& binding) {
  const double b = params.b();
  const double b0 = params.b0();

  // ½[(p1 − b0·x2)² + (p2 + b0·x1 − b·x3)² + (p3 + b·x2)²]
  QuadraticForm h;
  h.add(0, 0, b0 * b0);
  h.add(1, 1, b0 * b0 + b * b);
  h.add(2, 2, b * b);
  h.add(0, 2, -b * b0);
  h.add(0, 4, b0);
  h.add(1, 3, -b0);
  h.add(1, 5, b);
  h.add(2, 4, -b);
  for (int i = 3; i < 6; ++i) h.add(i, i, 1.0);

  struct Visitor {
    QuadraticForm& h;
    void operator()(const PenningQuadrupole& p) const {
      const double w2 = p.w0 * p.w0;
      h.add(0, 0, -0.5 * w2);
      h.add(1, 1, -0.5 * w2);
      h.add(2, 2, w2);
    }
    void operator()(const IsotropicOscillator& p) const {
      const double w2 = p.w0 * p.w0;
      for (int i = 0; i < 3; ++i) h.add(i, i, w2);
    }
    void operator()(const DiagonalQuadratic& p) const {
      h.add(0, 0, p.w1 * p.w1);
      h.add(1, 1, p.w2 * p.w2);
      h.add(2, 2, p.w3 * p.w3);
    }
  };
  std::visit(Visitor{h}, binding);
  return h;
}

QuadraticForm build_L3_form() {
  QuadraticForm l3;
  l3.add(0, 4, 1.0);
  l3.add(1, 3, -1.0);
  return l3;
}

QuadraticForm build_G(const SystemParams& params, const BindingPotential& binding) {
  return build_lab_hamiltonian(params, binding) - build_L3_form() * params.omega();
}

DynamicalMatrix::DynamicalMatrix(const QuadraticForm& generator)
    : generator_(generator),
      lambda_(symplectic_unit() * generator.matrix()),
      norm_(lambda_.norm()) {}

DynamicalMatrix build_lambda(const QuadraticForm& generator) { return DynamicalMatrix(generator); }

const Mat6& dlambda_domega() {
  static const Mat6 d = -symplectic_unit() * build_L3_form().matrix();
  return d;
}

std::string to_key_values(const SystemParams& params, const BindingPotential& binding) {
  std::ostringstream out;
  out << "b=" << format_real(params.b()) << '\n'
      << "b0=" << format_real(params.b0()) << '\n'
      << "w0=" << format_real(params.w0()) << '\n'
      << "omega=" << format_real(params.omega()) << '\n';
  if (const auto* d = std::get_if<DiagonalQuadratic>(&binding)) {
    out << "binding=diagonal:" << format_real(d->w1) << ',' << format_real(d->w2) << ','
        << format_real(d->w3) << '\n';
  } else {
    out << "binding=" << binding_name(binding) << '\n';
  }
  return out.str();
}

std::pair<SystemParams, BindingPotential> parse_key_values(std::string_view text) {
  std::map<std::string, std::string> kv;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line.substr(0, line.find('#')));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw DomainError("line " + std::to_string(line_no) + ": expected key=value");
    }
    auto key = trim(std::string_view(body).substr(0, eq));
    auto value = trim(std::string_view(body).substr(eq + 1));
    if (key != "b" && key != "b0" && key != "w0" && key != "omega" && key != "binding") {
      throw DomainError("unknown key '" + key + "'");
    }
    if (!kv.emplace(key, value).second) throw DomainError("duplicate key '" + key + "'");
  }
  for (const char* required : {"b", "b0", "w0", "omega"}) {
    if (!kv.count(required)) throw DomainError(std::string("missing key '") + required + "'");
  }

  const SystemParams params(parse_double("b", kv["b"]), parse_double("b0", kv["b0"]),
                            parse_double("w0", kv["w0"]), parse_double("omega", kv["omega"]));

  const std::string binding = kv.count("binding") ? kv["binding"] : "penning";
  if (binding == "penning" || binding == "oscillator") return {params, make_binding(binding, params.w0())};
  if (binding.rfind("diagonal:", 0) == 0) {
    std::istringstream freqs(binding.substr(9));
    std::string w1, w2, w3, extra;
    if (!std::getline(freqs, w1, ',') || !std::getline(freqs, w2, ',') ||
        !std::getline(freqs, w3, ',') || std::getline(freqs, extra, ',')) {
      throw DomainError("diagonal binding needs exactly three frequencies");
    }
    return {params, DiagonalQuadratic{parse_double("w1", trim(w1)), parse_double("w2", trim(w2)),
                                      parse_double("w3", trim(w3))}};
  }
  throw DomainError("unknown binding '" + binding + "'");
}

}  // namespace penphase
