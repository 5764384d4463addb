#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "penphase/phases.hpp"
#include "penphase/spectral.hpp"
#include "penphase/sweep.hpp"

namespace penphase::cli {

/// "C", "U" or "B".
char class_letter(Classification c);

void write_fig1_csv(const RegionMap& map, std::ostream& out);
void write_fig2_csv(const std::vector<CurveRow>& rows, std::ostream& out);

void write_fig1_svg(const RegionMap& map, std::ostream& out);
void write_fig2_svg(const std::vector<CurveRow>& rows, std::ostream& out);

nlohmann::json params_json(const SystemParams& params, const BindingPotential& binding);
nlohmann::json classification_json(const ModeSpectrum& spectrum);
nlohmann::json phase_json(const PhaseReport& report, const FockLabel& n);
nlohmann::json resonance_json(const ResonanceShift& shift);
nlohmann::json kcr_json(const BisectionResult& r);
nlohmann::json region_summary_json(const RegionMap& map);

}  // namespace penphase::cli
