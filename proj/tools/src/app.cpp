#include "penphase/cli/app.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "penphase/cli/output.hpp"
#include "penphase/errors.hpp"
#include "penphase/format.hpp"
#include "penphase/phases.hpp"
#include "penphase/spectral.hpp"
#include "penphase/sweep.hpp"
#include "penphase/version.hpp"

namespace penphase::cli {

namespace {

using nlohmann::json;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ParamArgs {
  std::optional<double> alpha;
  std::optional<double> alpha0;
  std::optional<double> w;
  std::optional<double> k;
  std::optional<double> omega;
  std::optional<std::string> params_file;
  std::optional<std::string> binding;
};

struct Resolved {
  SystemParams params;
  BindingPotential binding;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  out.close();
  if (!out) throw IoError("write to '" + path + "' failed");
}

void add_param_options(CLI::App& app, ParamArgs& a) {
  app.add_option("--alpha", a.alpha, "b/omega");
  app.add_option("--alpha0", a.alpha0, "b0/omega");
  app.add_option("--w", a.w, "w0/omega");
  app.add_option("--k", a.k, "b/b0 on the Penning loop, b0 = 1");
  app.add_option("--omega", a.omega, "rotation frequency in units of b0");
  app.add_option("--params", a.params_file, "key=value file with b, b0, w0, omega, binding");
  app.add_option("--binding", a.binding, "penning or oscillator (default penning)");
}

Resolved resolve(const ParamArgs& a) {
  const bool dimless = a.alpha || a.alpha0 || a.w;
  const bool adiabatic = a.k || a.omega;
  const bool file = a.params_file.has_value();
  if (dimless + adiabatic + file != 1) {
    throw DomainError("give exactly one parameter style: --alpha/--alpha0/--w, --k/--omega, or --params");
  }
  const std::string binding = a.binding.value_or("penning");
  if (dimless) {
    if (!(a.alpha && a.alpha0 && a.w)) throw DomainError("--alpha, --alpha0 and --w go together");
    return {make_params_dimensionless(*a.alpha, *a.alpha0, *a.w), make_binding(binding, *a.w)};
  }
  if (adiabatic) {
    if (!(a.k && a.omega)) throw DomainError("--k and --omega go together");
    const auto params = make_params_adiabatic(*a.k, *a.omega);
    return {params, make_binding(binding, params.w0())};
  }
  if (a.binding) throw DomainError("--binding cannot be combined with --params; set binding in the file");
  auto [params, bind] = parse_key_values(read_file(*a.params_file));
  return {params, bind};
}

void add_label(CLI::App& app, std::array<unsigned, 3>& n, const std::string& prefix) {
  for (std::size_t i = 0; i < 3; ++i) {
    app.add_option("--" + prefix + std::to_string(i + 1), n[i], "quanta in mode " + std::to_string(i + 1))
        ->check(CLI::NonNegativeNumber);
  }
}

unsigned threads_from_env() {
  const char* v = std::getenv("PENPHASE_THREADS");
  if (v == nullptr || *v == '\0') return 0;
  unsigned n = 0;
  const std::string s(v);
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
  if (ec != std::errc() || end != s.data() + s.size()) {
    throw DomainError("PENPHASE_THREADS must be a non-negative integer");
  }
  return n;
}

std::string quote_if_needed(const std::string& v) {
  const bool plain = !v.empty() && std::all_of(v.begin(), v.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '+' || c == '_';
  });
  return plain ? v : "\"" + v + "\"";
}

// Resolved options in config syntax; loading it with --config reproduces the run.
std::string manifest(const CLI::App& app, const std::vector<std::string>& comments) {
  std::ostringstream out;
  out << "# penphase " << kVersion << ' ' << app.get_name() << '\n';
  const Tolerances tol;
  out << "# tolerances re_rel=" << format_real(tol.re_rel) << " gap_rel=" << format_real(tol.gap_rel)
      << '\n';
  for (const auto& c : comments) out << "# " << c << '\n';
  for (const CLI::Option* opt : app.get_options([](const CLI::Option* o) {
         return !o->get_lnames().empty();
       })) {
    const std::string name = opt->get_lnames().front();
    if (name == "help" || name == "config") continue;
    if (opt->get_type_size() == 0) {
      if (opt->count() > 0) out << name << "=true\n";
      continue;
    }
    if (opt->count() > 0) {
      out << name << '=' << quote_if_needed(opt->results().back()) << '\n';
    } else if (!opt->get_default_str().empty()) {
      out << name << '=' << quote_if_needed(opt->get_default_str()) << '\n';
    }
  }
  return out.str();
}

void emit(const CLI::App& app, std::ostream& out, const std::string& path, const std::string& content,
          const std::vector<std::string>& comments = {}) {
  if (path.empty()) {
    out << content;
    return;
  }
  write_file(path, content);
  write_file(path + ".manifest", manifest(app, comments));
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void setup(CLI::App& app) {
  app.option_defaults()->always_capture_default();
  app.set_config("--config", "", "key=value file (one per line, # comments); unknown keys are errors");
  app.allow_config_extras(CLI::config_extras_mode::error);
}

std::vector<std::string> params_comments(const Resolved& r) {
  std::ostringstream s;
  s << "resolved b=" << format_real(r.params.b()) << " b0=" << format_real(r.params.b0())
    << " w0=" << format_real(r.params.w0()) << " omega=" << format_real(r.params.omega())
    << " binding=" << binding_name(r.binding);
  return {s.str()};
}

using Body = std::function<void(CLI::App&, std::ostream&)>;

struct Command {
  std::string name;
  std::string description;
  std::function<Body(CLI::App&)> configure;
};

Body classify_cmd(CLI::App& app) {
  auto a = std::make_shared<ParamArgs>();
  auto output = std::make_shared<std::string>();
  add_param_options(app, *a);
  app.add_option("--output", *output, "JSON report path (stdout when omitted)");
  return [a, output](CLI::App& self, std::ostream& out) {
    const auto r = resolve(*a);
    const auto spectrum = classify(build_lambda(build_G(r.params, r.binding)));
    json j = classification_json(spectrum);
    j["params"] = params_json(r.params, r.binding);
    emit(self, out, *output, dump(j), params_comments(r));
  };
}

Body phases_cmd(CLI::App& app) {
  auto a = std::make_shared<ParamArgs>();
  auto n = std::make_shared<std::array<unsigned, 3>>();
  auto output = std::make_shared<std::string>();
  add_param_options(app, *a);
  add_label(app, *n, "n");
  app.add_option("--output", *output, "JSON report path (stdout when omitted)");
  return [a, n, output](CLI::App& self, std::ostream& out) {
    const auto r = resolve(*a);
    const FockLabel label{*n};
    const bool rotating = r.params.omega() > 0.0;
    const auto report = rotating ? aa_phase(r.params, r.binding, label)
                                 : berry_phase_static(r.params, r.binding, label);
    json j = phase_json(report, label);
    j["route"] = rotating ? "aharonov-anandan" : "berry";
    j["params"] = params_json(r.params, r.binding);
    emit(self, out, *output, dump(j), params_comments(r));
  };
}

Body resonance_cmd(CLI::App& app) {
  auto a = std::make_shared<ParamArgs>();
  auto n = std::make_shared<std::array<unsigned, 3>>();
  auto m = std::make_shared<std::array<unsigned, 3>>();
  auto delta = std::make_shared<double>(0.0);
  auto output = std::make_shared<std::string>();
  add_param_options(app, *a);
  add_label(app, *n, "n");
  add_label(app, *m, "m");
  app.add_option("--delta-omega", *delta, "shift of the rotation frequency")->required();
  app.add_option("--output", *output, "JSON report path (stdout when omitted)");
  return [a, n, m, delta, output](CLI::App& self, std::ostream& out) {
    const auto r = resolve(*a);
    const auto shift = resonance_shift(r.params, r.binding, FockLabel{*n}, FockLabel{*m}, *delta);
    json j = resonance_json(shift);
    j["params"] = params_json(r.params, r.binding);
    j["delta_omega"] = *delta;
    emit(self, out, *output, dump(j), params_comments(r));
  };
}

void add_format(CLI::App& app, std::string& format) {
  app.add_option("--format", format, "csv or svg")->check(CLI::IsMember({"csv", "svg"}));
}

Body fig1_cmd(CLI::App& app) {
  auto grid = std::make_shared<GridSpec>();
  auto no_extend = std::make_shared<bool>(false);
  auto format = std::make_shared<std::string>("csv");
  auto output = std::make_shared<std::string>();
  app.add_option("--alpha-min", grid->alpha.min);
  app.add_option("--alpha-max", grid->alpha.max);
  app.add_option("--alpha-steps", grid->alpha.steps);
  app.add_option("--alpha0-min", grid->alpha0.min);
  app.add_option("--alpha0-max", grid->alpha0.max);
  app.add_option("--alpha0-steps", grid->alpha0.steps);
  app.add_flag("--no-extend", *no_extend, "keep the window even if fewer than 4 components appear");
  add_format(app, *format);
  app.add_option("--output", *output, "output path")->required();
  return [grid, no_extend, format, output](CLI::App& self, std::ostream& out) {
    SweepOptions options;
    options.threads = threads_from_env();
    options.auto_extend = !*no_extend;
    const auto map = sweep_fig1(*grid, options);
    std::ostringstream body;
    if (*format == "svg") {
      write_fig1_svg(map, body);
    } else {
      write_fig1_csv(map, body);
    }
    const json summary = region_summary_json(map);
    emit(self, out, *output, body.str(), {"result " + summary.dump()});
    out << dump(summary);
  };
}

Body fig2_cmd(CLI::App& app) {
  auto k_min = std::make_shared<double>(0.01);
  auto k_max = std::make_shared<double>(1.0);
  auto steps = std::make_shared<int>(500);
  auto binding = std::make_shared<std::string>("penning");
  auto format = std::make_shared<std::string>("csv");
  auto output = std::make_shared<std::string>();
  app.add_option("--k-min", *k_min);
  app.add_option("--k-max", *k_max);
  app.add_option("--steps", *steps);
  app.add_option("--binding", *binding, "penning or oscillator");
  add_format(app, *format);
  app.add_option("--output", *output, "output path")->required();
  return [=](CLI::App& self, std::ostream& out) {
    const auto rows =
        curve_fig2(default_k_grid(*k_min, *k_max, *steps), make_binding(*binding, 4.0 / 3.0));
    std::ostringstream body;
    if (*format == "svg") {
      write_fig2_svg(rows, body);
    } else {
      write_fig2_csv(rows, body);
    }
    emit(self, out, *output, body.str());
  };
}

Body kcr_cmd(CLI::App& app) {
  auto tol = std::make_shared<double>(1e-7);
  auto output = std::make_shared<std::string>();
  app.add_option("--tol", *tol, "bracket width, >= 1e-9");
  app.add_option("--output", *output, "JSON path (stdout when omitted)");
  return [tol, output](CLI::App& self, std::ostream& out) {
    emit(self, out, *output, dump(kcr_json(find_kcr(*tol))));
  };
}

const std::vector<Command>& commands() {
  static const std::vector<Command> list{
      {"classify", "stability class, eigenvalues and normal modes", classify_cmd},
      {"phases", "quasienergy and geometric phase of a Fock state", phases_cmd},
      {"fig1", "confined-region map over (alpha, alpha0)", fig1_cmd},
      {"fig2", "d omega_i / d omega along the adiabatic family", fig2_cmd},
      {"kcr", "critical field ratio of the static Penning loop", kcr_cmd},
      {"resonance", "first-order shift of a resonance under a rotation change", resonance_cmd},
  };
  return list;
}

void usage(std::ostream& out) {
  out << "penphase " << kVersion << "\nusage: penphase <command> [options]\n\ncommands:\n";
  for (const auto& c : commands()) {
    out << "  " << c.name << std::string(12 - c.name.size(), ' ') << c.description << '\n';
  }
  out << "\nRun 'penphase <command> --help' for options.\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  if (args.empty()) {
    usage(err);
    return kDomainError;
  }
  if (args[0] == "--help" || args[0] == "-h") {
    usage(out);
    return kOk;
  }
  if (args[0] == "--version") {
    out << kVersion << '\n';
    return kOk;
  }
  const auto& list = commands();
  const auto it = std::find_if(list.begin(), list.end(), [&](const Command& c) { return c.name == args[0]; });
  if (it == list.end()) {
    err << "error: unknown command '" << args[0] << "'\n";
    usage(err);
    return kDomainError;
  }

  CLI::App app(it->description, it->name);
  setup(app);
  const Body body = it->configure(app);
  std::vector<std::string> rest(args.rbegin(), args.rend() - 1);
  try {
    app.parse(rest);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kDomainError;
  }

  try {
    body(app, out);
    return kOk;
  } catch (const NoCyclicStatesError& e) {
    err << "error: " << e.what() << '\n';
    return kNoCyclicStates;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kDomainError;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kDomainError;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalError;
  }
}

}  // namespace penphase::cli
