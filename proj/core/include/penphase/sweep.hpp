#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "penphase/model.hpp"
#include "penphase/spectral.hpp"

namespace penphase {

/// Uniform samples min + (max − min)·i/(steps − 1); a single step samples min only.
struct GridAxis {
  double min = 0.0;
  double max = 3.0;
  int steps = 600;

  double at(int i) const;
};

struct GridSpec {
  GridAxis alpha;
  GridAxis alpha0;
};

/// Parameters of one point of the (α, α0) plane: w = 4α0/3, omega = 1.
SystemParams fig1_params(double alpha, double alpha0);

struct RegionCell {
  Classification cls = Classification::Boundary;
  /// ModeSpectrum::krein_code(); 0xFF unless Confined.
  std::uint8_t krein_code = 0xFF;
  /// Confined component id, −1 otherwise.
  int component = -1;
};

struct RegionMap {
  GridSpec grid;
  /// alpha0-major: cells[j * alpha.steps + i] is (alpha.at(i), alpha0.at(j)).
  std::vector<RegionCell> cells;
  int confined_components = 0;
  int unconfined_regions = 0;
  /// Interfaces between differently signed confined cells found to contain an
  /// unconfined point.
  int unconfined_walls = 0;
  /// Number of 50% window extensions applied.
  int extensions = 0;

  const RegionCell& at(int i_alpha, int j_alpha0) const;
};

struct SweepOptions {
  /// 0 picks std::thread::hardware_concurrency().
  unsigned threads = 0;
  bool auto_extend = true;
  int target_components = 4;
  double max_extent = 10.0;
};

/// Classification of every grid cell plus connected-component labeling.
///
/// Confined cells join across shared edges when their ordered Krein patterns
/// agree; unconfined cells join across shared edges or corners. Component ids
/// are assigned in scan order. If fewer than `target_components` confined
/// components appear, both axis maxima grow by 50% (steps scaled to keep the
/// spacing) until the target is met or `max_extent` is reached.
RegionMap sweep_fig1(const GridSpec& grid, const SweepOptions& options = {});

/// Classification at α0 = 0 (w = 0) along an α axis, evaluated directly.
std::vector<Classification> classify_alpha_line(const GridAxis& alpha);

struct BisectionResult {
  /// Midpoint of the final bracket.
  double value = 0.0;
  /// Final bracket: `lo` on the stable side, `hi` on the unstable side.
  double lo = 0.0;
  double hi = 0.0;
  double tol = 0.0;
  int iterations = 0;
};

/// Bisection on a monotone predicate with unstable(lo) false and unstable(hi) true.
/// Runs exactly ceil(log2(|hi − lo| / tol)) halvings. Throws DomainError if the
/// endpoints do not straddle the transition and MultiCrossingError if a
/// 65-point pre-scan sees the predicate flip back.
BisectionResult bisect_transition(const std::function<bool(double)>& unstable, double lo,
                                  double hi, double tol);

struct BoundaryPoint {
  double alpha = 0.0;
  double alpha0 = 0.0;
  /// Segment parameter in [0, 1] from the confined endpoint.
  BisectionResult segment;
};

/// Confined/unconfined boundary on the segment between two (α, α0) points,
/// to within `tol` in parameter distance.
BoundaryPoint refine_boundary(std::array<double, 2> p_confined, std::array<double, 2> p_unconfined,
                              double tol = 1e-6);

/// Static (omega = 0) Penning-loop classification at field ratio k.
Classification classify_adiabatic(double k, const BindingPotential& binding);

/// Smallest k in [0.01, 1] where the static Penning loop turns unconfined.
/// Requires tol ≥ 1e-9.
BisectionResult find_kcr(double tol);

struct CurveRow {
  double k = 0.0;
  double cos_theta = 0.0;
  /// Tracked ∂ω_i/∂ω at omega = 0; absent where mode i is not a stable simple mode.
  std::array<std::optional<double>, 3> dw{};

  bool stable23() const noexcept { return dw[1].has_value() && dw[2].has_value(); }
};

/// Uniform k grid; steps ≥ 1 and 0 < k_min ≤ k_max.
std::vector<double> default_k_grid(double k_min = 0.01, double k_max = 1.0, int steps = 500);

/// Fig. 2 derivative curves on the static adiabatic family (b0 = 1, b = k,
/// w0 = 4/3). Columns start in descending frequency order and then follow
/// their modes by eigenvector overlap. k_grid must be strictly increasing and
/// positive.
std::vector<CurveRow> curve_fig2(const std::vector<double>& k_grid,
                                 const BindingPotential& binding);

}  // namespace penphase
