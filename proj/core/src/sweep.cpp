#include "penphase/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

#include "penphase/errors.hpp"
#include "penphase/phases.hpp"

namespace penphase {

namespace {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<std::size_t> parent_;
};

RegionCell evaluate_cell(double alpha, double alpha0) {
  const auto params = fig1_params(alpha, alpha0);
  try {
    const auto spectrum = classify(build_lambda(build_G(params, PenningQuadrupole{params.w0()})));
    return {spectrum.classification, spectrum.krein_code(), -1};
  } catch (const NumericalError&) {
    return {};
  }
}

void validate_axis(const GridAxis& axis, const char* name) {
  if (axis.steps < 1) throw DomainError(std::string(name) + " steps must be positive");
  if (!std::isfinite(axis.min) || !std::isfinite(axis.max) || axis.min < 0.0 ||
      axis.max < axis.min) {
    throw DomainError(std::string(name) + " range must satisfy 0 <= min <= max");
  }
}

std::vector<RegionCell> classify_grid(const GridSpec& grid, unsigned threads) {
  const int na = grid.alpha.steps;
  const int n0 = grid.alpha0.steps;
  std::vector<RegionCell> cells(static_cast<std::size_t>(na) * static_cast<std::size_t>(n0));
  std::atomic<int> next_row{0};
  auto worker = [&] {
    for (int j = next_row++; j < n0; j = next_row++) {
      const double a0 = grid.alpha0.at(j);
      for (int i = 0; i < na; ++i) {
        cells[static_cast<std::size_t>(j) * static_cast<std::size_t>(na) + static_cast<std::size_t>(i)] =
            evaluate_cell(grid.alpha.at(i), a0);
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(n0));
  if (threads <= 1) {
    worker();
    return cells;
  }
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  return cells;
}

// True when the straight segment between two confined points of different Krein
// patterns passes through an unconfined point. Bisects on the pattern until it
// lands in the unconfined gap, hits something else, or runs out of precision.
bool unconfined_between(std::array<double, 2> p, std::array<double, 2> q, std::uint8_t code_p,
                        std::uint8_t code_q) {
  for (int it = 0; it < 60; ++it) {
    const std::array<double, 2> m{0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])};
    const auto cell = evaluate_cell(m[0], m[1]);
    if (cell.cls == Classification::Unconfined) return true;
    if (cell.cls != Classification::Confined) return false;
    if (cell.krein_code == code_p) {
      p = m;
    } else if (cell.krein_code == code_q) {
      q = m;
    } else {
      return false;
    }
  }
  return false;
}

void label(RegionMap& map) {
  const int na = map.grid.alpha.steps;
  const int n0 = map.grid.alpha0.steps;
  auto index = [na](int i, int j) {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(na) + static_cast<std::size_t>(i);
  };
  auto confined = [&](int i, int j) { return map.cells[index(i, j)].cls == Classification::Confined; };

  UnionFind cells(map.cells.size());
  // Corners of the dual lattice: cell (i, j) spans corners (i..i+1, j..j+1).
  const auto corner_stride = static_cast<std::size_t>(na + 1);
  UnionFind corners(corner_stride * static_cast<std::size_t>(n0 + 1));
  auto corner = [&](int i, int j) {
    return static_cast<std::size_t>(j) * corner_stride + static_cast<std::size_t>(i);
  };

  map.unconfined_walls = 0;
  for (int j = 0; j < n0; ++j) {
    for (int i = 0; i < na; ++i) {
      const auto& c = map.cells[index(i, j)];
      if (c.cls == Classification::Unconfined) {
        corners.unite(corner(i, j), corner(i + 1, j));
        corners.unite(corner(i, j), corner(i, j + 1));
        corners.unite(corner(i, j), corner(i + 1, j + 1));
        continue;
      }
      if (c.cls != Classification::Confined) continue;
      const std::array<std::array<int, 2>, 2> steps{{{1, 0}, {0, 1}}};
      for (const auto& [di, dj] : steps) {
        const int ni = i + di;
        const int nj = j + dj;
        if (ni >= na || nj >= n0 || !confined(ni, nj)) continue;
        const auto& n = map.cells[index(ni, nj)];
        if (n.krein_code == c.krein_code) {
          cells.unite(index(i, j), index(ni, nj));
        } else if (unconfined_between({map.grid.alpha.at(i), map.grid.alpha0.at(j)},
                                      {map.grid.alpha.at(ni), map.grid.alpha0.at(nj)},
                                      c.krein_code, n.krein_code)) {
          ++map.unconfined_walls;
          corners.unite(corner(i + 1, j + 1), corner(i + di, j + dj));
        }
      }
    }
  }

  std::vector<int> ids(map.cells.size(), -1);
  int next_id = 0;
  std::vector<char> seen_corner(corner_stride * static_cast<std::size_t>(n0 + 1), 0);
  map.unconfined_regions = 0;
  for (int j = 0; j < n0; ++j) {
    for (int i = 0; i < na; ++i) {
      auto& c = map.cells[index(i, j)];
      if (c.cls == Classification::Confined) {
        auto& id = ids[cells.find(index(i, j))];
        if (id < 0) id = next_id++;
        c.component = id;
      } else if (c.cls == Classification::Unconfined) {
        auto& seen = seen_corner[corners.find(corner(i, j))];
        if (!seen) ++map.unconfined_regions;
        seen = 1;
      }
    }
  }
  map.confined_components = next_id;
}

GridAxis extend(const GridAxis& axis, double max_extent) {
  GridAxis out = axis;
  out.max = std::min(axis.max * 1.5, max_extent);
  if (axis.steps > 1 && axis.max > axis.min) {
    const double spacing = (axis.max - axis.min) / (axis.steps - 1);
    out.steps = static_cast<int>(std::lround((out.max - out.min) / spacing)) + 1;
  }
  return out;
}

void check_tol(double tol) {
  if (!(tol > 0.0) || !std::isfinite(tol)) throw DomainError("tol must be positive and finite");
}

}  // namespace

double GridAxis::at(int i) const {
  if (steps <= 1) return min;
  if (i == steps - 1) return max;
  return min + (max - min) * static_cast<double>(i) / static_cast<double>(steps - 1);
}

SystemParams fig1_params(double alpha, double alpha0) {
  return make_params_dimensionless(alpha, alpha0, 4.0 * alpha0 / 3.0);
}

const RegionCell& RegionMap::at(int i_alpha, int j_alpha0) const {
  if (i_alpha < 0 || i_alpha >= grid.alpha.steps || j_alpha0 < 0 || j_alpha0 >= grid.alpha0.steps) {
    throw DomainError("cell index outside the grid");
  }
  return cells[static_cast<std::size_t>(j_alpha0) * static_cast<std::size_t>(grid.alpha.steps) +
               static_cast<std::size_t>(i_alpha)];
}

RegionMap sweep_fig1(const GridSpec& grid, const SweepOptions& options) {
  validate_axis(grid.alpha, "alpha");
  validate_axis(grid.alpha0, "alpha0");

  RegionMap map;
  map.grid = grid;
  for (;;) {
    map.cells = classify_grid(map.grid, options.threads);
    label(map);
    const bool can_grow = map.grid.alpha.max < options.max_extent ||
                          map.grid.alpha0.max < options.max_extent;
    if (!options.auto_extend || map.confined_components >= options.target_components || !can_grow) {
      return map;
    }
    map.grid.alpha = extend(map.grid.alpha, options.max_extent);
    map.grid.alpha0 = extend(map.grid.alpha0, options.max_extent);
    ++map.extensions;
  }
}

std::vector<Classification> classify_alpha_line(const GridAxis& alpha) {
  validate_axis(alpha, "alpha");
  std::vector<Classification> out;
  out.reserve(static_cast<std::size_t>(alpha.steps));
  for (int i = 0; i < alpha.steps; ++i) {
    const SystemParams params(alpha.at(i), 0.0, 0.0, 1.0);
    try {
      out.push_back(classify(build_lambda(build_G(params, PenningQuadrupole{0.0}))).classification);
    } catch (const NumericalError&) {
      out.push_back(Classification::Boundary);
    }
  }
  return out;
}

BisectionResult bisect_transition(const std::function<bool(double)>& unstable, double lo,
                                  double hi, double tol) {
  check_tol(tol);
  if (!std::isfinite(lo) || !std::isfinite(hi) || lo == hi) {
    throw DomainError("bisection needs two distinct finite endpoints");
  }
  if (unstable(lo) || !unstable(hi)) {
    throw DomainError("bisection endpoints must be stable and unstable respectively");
  }
  constexpr int kScan = 65;
  bool flipped = false;
  for (int s = 1; s < kScan - 1; ++s) {
    const bool u = unstable(lo + (hi - lo) * s / (kScan - 1));
    if (flipped && !u) throw MultiCrossingError("stability flips more than once along the bracket");
    flipped = flipped || u;
  }

  BisectionResult r;
  r.lo = lo;
  r.hi = hi;
  r.tol = tol;
  const double width = std::abs(hi - lo);
  r.iterations = width > tol ? static_cast<int>(std::ceil(std::log2(width / tol))) : 0;
  for (int it = 0; it < r.iterations; ++it) {
    const double mid = 0.5 * (r.lo + r.hi);
    (unstable(mid) ? r.hi : r.lo) = mid;
  }
  r.value = 0.5 * (r.lo + r.hi);
  return r;
}

BoundaryPoint refine_boundary(std::array<double, 2> p_confined, std::array<double, 2> p_unconfined,
                              double tol) {
  check_tol(tol);
  if (evaluate_cell(p_confined[0], p_confined[1]).cls != Classification::Confined) {
    throw DomainError("refine_boundary: first endpoint is not confined");
  }
  if (evaluate_cell(p_unconfined[0], p_unconfined[1]).cls != Classification::Unconfined) {
    throw DomainError("refine_boundary: second endpoint is not unconfined");
  }
  const double da = p_unconfined[0] - p_confined[0];
  const double d0 = p_unconfined[1] - p_confined[1];
  const double dist = std::hypot(da, d0);
  auto unstable = [&](double t) {
    return evaluate_cell(p_confined[0] + t * da, p_confined[1] + t * d0).cls ==
           Classification::Unconfined;
  };
  BoundaryPoint out;
  out.segment = bisect_transition(unstable, 0.0, 1.0, tol / dist);
  out.alpha = p_confined[0] + out.segment.value * da;
  out.alpha0 = p_confined[1] + out.segment.value * d0;
  return out;
}

Classification classify_adiabatic(double k, const BindingPotential& binding) {
  const auto params = make_params_adiabatic(k, 0.0);
  try {
    return classify(build_lambda(build_lab_hamiltonian(params, binding))).classification;
  } catch (const NumericalError&) {
    return Classification::Boundary;
  }
}

BisectionResult find_kcr(double tol) {
  if (!(tol >= 1e-9)) throw DomainError("find_kcr needs tol >= 1e-9");
  const BindingPotential binding = PenningQuadrupole{4.0 / 3.0};
  return bisect_transition(
      [&](double k) { return classify_adiabatic(k, binding) == Classification::Unconfined; }, 0.01,
      1.0, tol);
}

std::vector<double> default_k_grid(double k_min, double k_max, int steps) {
  if (steps < 1 || !(k_min > 0.0) || !(k_max >= k_min) || !std::isfinite(k_max)) {
    throw DomainError("k grid needs steps >= 1 and 0 < k_min <= k_max");
  }
  const GridAxis axis{k_min, k_max, steps};
  std::vector<double> out(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) out[static_cast<std::size_t>(i)] = axis.at(i);
  return out;
}

std::vector<CurveRow> curve_fig2(const std::vector<double>& k_grid,
                                 const BindingPotential& binding) {
  for (std::size_t i = 0; i < k_grid.size(); ++i) {
    if (!(k_grid[i] > 0.0) || !std::isfinite(k_grid[i])) throw DomainError("k values must be positive");
    if (i > 0 && !(k_grid[i] > k_grid[i - 1])) throw DomainError("k grid must be strictly increasing");
  }

  constexpr double kMinOverlap = 0.5;
  std::array<std::optional<CVec6>, 3> last;
  bool started = false;
  std::vector<CurveRow> rows;
  rows.reserve(k_grid.size());

  for (double k : k_grid) {
    CurveRow row;
    row.k = k;
    row.cos_theta = cos_theta(k);

    std::vector<Mode> modes;
    try {
      const auto params = make_params_adiabatic(k, 0.0);
      modes = imaginary_axis_modes(build_lambda(build_lab_hamiltonian(params, binding)));
    } catch (const NumericalError&) {
      modes.clear();
    }

    std::array<int, 3> pick{-1, -1, -1};
    if (!started) {
      for (std::size_t c = 0; c < 3 && c < modes.size(); ++c) pick[c] = static_cast<int>(c);
      started = !modes.empty();
    } else {
      // Injective column -> mode assignment maximizing the summed overlap.
      const int m = static_cast<int>(modes.size());
      double best = -1.0;
      std::array<int, 3> trial{};
      for (int a = -1; a < m; ++a) {
        for (int b = -1; b < m; ++b) {
          for (int c = -1; c < m; ++c) {
            trial = {a, b, c};
            double total = 0.0;
            bool valid = true;
            for (int x = 0; x < 3 && valid; ++x) {
              if (trial[x] < 0) continue;
              if (!last[x]) valid = false;
              for (int y = 0; y < x && valid; ++y) valid = trial[y] != trial[x];
              if (valid) total += std::abs(last[x]->dot(modes[static_cast<std::size_t>(trial[x])].eigvec));
            }
            if (valid && total > best) {
              best = total;
              pick = trial;
            }
          }
        }
      }
    }

    for (std::size_t c = 0; c < 3; ++c) {
      if (pick[c] >= 0) {
        const auto& mode = modes[static_cast<std::size_t>(pick[c])];
        if (!last[c] || std::abs(last[c]->dot(mode.eigvec)) >= kMinOverlap) {
          row.dw[c] = perturbative_dfreq(mode);
          last[c] = mode.eigvec;
          continue;
        }
      }
      last[c].reset();
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace penphase
