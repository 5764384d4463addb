#include "penphase/cli/output.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <limits>

#include "penphase/format.hpp"

namespace penphase::cli {

namespace {

using nlohmann::json;

constexpr double kPlotW = 600.0;
constexpr double kPlotH = 600.0;
constexpr double kMargin = 60.0;

std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

void svg_open(std::ostream& out, double w, double h) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << px(w) << "\" height=\"" << px(h)
      << "\" viewBox=\"0 0 " << px(w) << ' ' << px(h) << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

void svg_axes(std::ostream& out, double xmin, double xmax, double ymin, double ymax,
              const std::string& xlabel, const std::string& ylabel) {
  const double x0 = kMargin;
  const double y0 = kMargin + kPlotH;
  out << "<g stroke=\"black\" fill=\"none\">\n"
      << "<rect x=\"" << px(x0) << "\" y=\"" << px(kMargin) << "\" width=\"" << px(kPlotW)
      << "\" height=\"" << px(kPlotH) << "\"/>\n</g>\n";
  out << "<text x=\"" << px(x0) << "\" y=\"" << px(y0 + 16) << "\" text-anchor=\"middle\">"
      << tick(xmin) << "</text>\n"
      << "<text x=\"" << px(x0 + kPlotW) << "\" y=\"" << px(y0 + 16) << "\" text-anchor=\"middle\">"
      << tick(xmax) << "</text>\n"
      << "<text x=\"" << px(x0 - 6) << "\" y=\"" << px(y0) << "\" text-anchor=\"end\">" << tick(ymin)
      << "</text>\n"
      << "<text x=\"" << px(x0 - 6) << "\" y=\"" << px(kMargin + 4) << "\" text-anchor=\"end\">"
      << tick(ymax) << "</text>\n"
      << "<text x=\"" << px(x0 + kPlotW / 2) << "\" y=\"" << px(y0 + 36) << "\" text-anchor=\"middle\">"
      << xlabel << "</text>\n"
      << "<text x=\"" << px(x0 - 40) << "\" y=\"" << px(kMargin + kPlotH / 2)
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 " << px(x0 - 40) << ' '
      << px(kMargin + kPlotH / 2) << ")\">" << ylabel << "</text>\n";
}

const std::array<const char*, 8> kPalette{"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                          "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string cell_color(const RegionCell& c) {
  switch (c.cls) {
    case Classification::Confined:
      return kPalette[static_cast<std::size_t>(c.component) % kPalette.size()];
    case Classification::Unconfined:
      return "#c8c8c8";
    case Classification::Boundary:
      break;
  }
  return "#000000";
}

json optional_real(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

char class_letter(Classification c) {
  switch (c) {
    case Classification::Confined:
      return 'C';
    case Classification::Unconfined:
      return 'U';
    case Classification::Boundary:
      break;
  }
  return 'B';
}

void write_fig1_csv(const RegionMap& map, std::ostream& out) {
  out << "alpha,alpha0,class,component\n";
  for (int j = 0; j < map.grid.alpha0.steps; ++j) {
    const std::string a0 = format_real(map.grid.alpha0.at(j));
    for (int i = 0; i < map.grid.alpha.steps; ++i) {
      const auto& c = map.at(i, j);
      out << format_real(map.grid.alpha.at(i)) << ',' << a0 << ',' << class_letter(c.cls) << ','
          << c.component << '\n';
    }
  }
}

void write_fig2_csv(const std::vector<CurveRow>& rows, std::ostream& out) {
  out << "k,cos_theta,dw1,dw2,dw3,stable23\n";
  for (const auto& r : rows) {
    out << format_real(r.k) << ',' << format_real(r.cos_theta);
    for (const auto& d : r.dw) {
      out << ',';
      if (d) out << format_real(*d);
    }
    out << ',' << (r.stable23() ? 1 : 0) << '\n';
  }
}

void write_fig1_svg(const RegionMap& map, std::ostream& out) {
  const int na = map.grid.alpha.steps;
  const int n0 = map.grid.alpha0.steps;
  svg_open(out, kPlotW + 2 * kMargin, kPlotH + 2 * kMargin);
  const double cw = kPlotW / na;
  const double ch = kPlotH / n0;
  out << "<g stroke=\"none\">\n";
  for (int j = 0; j < n0; ++j) {
    const double y = kMargin + kPlotH - (j + 1) * ch;
    int start = 0;
    for (int i = 1; i <= na; ++i) {
      const bool same = i < na && map.at(i, j).cls == map.at(start, j).cls &&
                        map.at(i, j).component == map.at(start, j).component;
      if (same) continue;
      out << "<rect x=\"" << px(kMargin + start * cw) << "\" y=\"" << px(y) << "\" width=\""
          << px((i - start) * cw) << "\" height=\"" << px(ch) << "\" fill=\""
          << cell_color(map.at(start, j)) << "\"/>\n";
      start = i;
    }
  }
  out << "</g>\n";
  svg_axes(out, map.grid.alpha.min, map.grid.alpha.max, map.grid.alpha0.min, map.grid.alpha0.max,
           "alpha", "alpha0");
  out << "</svg>\n";
}

void write_fig2_svg(const std::vector<CurveRow>& rows, std::ostream& out) {
  svg_open(out, kPlotW + 2 * kMargin, kPlotH + 2 * kMargin);
  double kmin = rows.empty() ? 0.0 : rows.front().k;
  double kmax = rows.empty() ? 1.0 : rows.back().k;
  double ymin = std::numeric_limits<double>::infinity();
  double ymax = -ymin;
  for (const auto& r : rows) {
    for (const auto& d : r.dw) {
      if (!d) continue;
      ymin = std::min(ymin, *d);
      ymax = std::max(ymax, *d);
    }
  }
  if (!(ymin <= ymax)) {
    ymin = -1.0;
    ymax = 1.0;
  }
  if (ymax - ymin < 1e-12) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  if (kmax <= kmin) kmax = kmin + 1.0;
  auto sx = [&](double k) { return kMargin + (k - kmin) / (kmax - kmin) * kPlotW; };
  auto sy = [&](double v) { return kMargin + kPlotH - (v - ymin) / (ymax - ymin) * kPlotH; };

  for (std::size_t c = 0; c < 3; ++c) {
    std::string points;
    auto flush = [&] {
      if (!points.empty()) {
        out << "<polyline fill=\"none\" stroke=\"" << kPalette[c] << "\" stroke-width=\"1.5\" points=\""
            << points << "\"/>\n";
      }
      points.clear();
    };
    for (const auto& r : rows) {
      if (!r.dw[c]) {
        flush();
        continue;
      }
      if (!points.empty()) points += ' ';
      points += px(sx(r.k)) + ',' + px(sy(*r.dw[c]));
    }
    flush();
    out << "<text x=\"" << px(kMargin + kPlotW - 60) << "\" y=\"" << px(kMargin + 18 + 16.0 * c)
        << "\" fill=\"" << kPalette[c] << "\">dw" << c + 1 << "</text>\n";
  }
  svg_axes(out, kmin, kmax, ymin, ymax, "k", "d omega_i / d omega");
  out << "</svg>\n";
}

json params_json(const SystemParams& params, const BindingPotential& binding) {
  json j = {{"b", params.b()},
            {"b0", params.b0()},
            {"w0", params.w0()},
            {"omega", params.omega()},
            {"binding", binding_name(binding)}};
  return j;
}

json classification_json(const ModeSpectrum& spectrum) {
  json eig = json::array();
  for (const auto& ev : spectrum.raw_eigenvalues) eig.push_back({ev.real(), ev.imag()});
  json modes = json::array();
  for (const auto& m : spectrum.modes) {
    modes.push_back({{"freq", m.freq}, {"krein_sign", m.krein_sign}});
  }
  return {{"classification", to_string(spectrum.classification)},
          {"eigenvalues", eig},
          {"max_real_part", spectrum.max_real_part},
          {"lambda_norm", spectrum.lambda_norm},
          {"modes", modes}};
}

json phase_json(const PhaseReport& report, const FockLabel& n) {
  return {{"label", n.n},
          {"quasienergy", report.quasienergy},
          {"aa_phase_eq7", optional_real(report.aa_phase_eq7)},
          {"aa_phase_eq8", report.aa_phase_eq8},
          {"dfreq_domega", report.dfreq_domega},
          {"method_spread", report.method_spread},
          {"freqs", report.freqs},
          {"krein_signs", report.krein_signs}};
}

json resonance_json(const ResonanceShift& shift) {
  return {{"omega_p", shift.omega_p},
          {"predicted", shift.predicted},
          {"exact", shift.exact},
          {"linearization_error", shift.linearization_error}};
}

json kcr_json(const BisectionResult& r) {
  return {{"k_cr", r.value}, {"bracket", {r.lo, r.hi}}, {"tol", r.tol}, {"iterations", r.iterations}};
}

json region_summary_json(const RegionMap& map) {
  auto axis = [](const GridAxis& a) { return json{{"min", a.min}, {"max", a.max}, {"steps", a.steps}}; };
  return {{"confined_components", map.confined_components},
          {"unconfined_regions", map.unconfined_regions},
          {"unconfined_walls", map.unconfined_walls},
          {"extensions", map.extensions},
          {"alpha", axis(map.grid.alpha)},
          {"alpha0", axis(map.grid.alpha0)}};
}

}  // namespace penphase::cli
