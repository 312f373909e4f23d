#include "hrisk/sample_space.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "hrisk/errors.hpp"

namespace hrisk {
namespace {

constexpr std::size_t kMaxCells = std::size_t{1} << 24;

std::size_t checked_cell_count(int edges, int dimension) {
  if (edges < 1) throw ConfigError("edges_per_side must be >= 1");
  std::size_t count = 1;
  for (int d = 0; d < dimension; ++d) {
    count *= static_cast<std::size_t>(edges);
    if (count > kMaxCells) throw ConfigError("grid has too many cells (edges_per_side^dimension)");
  }
  return count;
}

double grid_edge(const Interval& iv, int edges, int i) {
  if (i >= edges) return iv.hi;
  return iv.lo + iv.width() * static_cast<double>(i) / static_cast<double>(edges);
}

void validate_bounds(std::span<const Interval> bounds) {
  if (bounds.empty()) throw ConfigError("sample space needs at least one dimension");
  for (const auto& iv : bounds) {
    if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || !(iv.hi > iv.lo)) {
      throw ConfigError("sample space bounds must be finite with hi > lo");
    }
  }
}

}  // namespace

SampleSpace::SampleSpace(std::vector<Interval> bounds) : bounds_(std::move(bounds)) {
  validate_bounds(bounds_);
  volume_ = 1.0;
  for (const auto& iv : bounds_) volume_ *= iv.width();
}

SampleSpace::SampleSpace(std::vector<Interval> bounds, int mass_edges_per_side,
                         std::vector<double> cell_mass)
    : SampleSpace(std::move(bounds)) {
  const std::size_t cells = checked_cell_count(mass_edges_per_side, dimension());
  if (cell_mass.size() != cells) {
    throw ConfigError("mass table has " + std::to_string(cell_mass.size()) + " entries, expected " +
                      std::to_string(cells));
  }
  double total = 0.0;
  for (double m : cell_mass) {
    if (!(m >= 0.0) || !std::isfinite(m)) throw ConfigError("mass table entries must be >= 0");
    total += m;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("mass table must sum to 1");
  mass_edges_ = mass_edges_per_side;
  cell_mass_ = std::move(cell_mass);
  cumulative_mass_.resize(cell_mass_.size());
  std::partial_sum(cell_mass_.begin(), cell_mass_.end(), cumulative_mass_.begin());
}

void SampleSpace::sample(RandomStream& stream, std::span<double> point) const {
  if (!has_mass_table()) {
    for (std::size_t d = 0; d < bounds_.size(); ++d) {
      point[d] = bounds_[d].lo + bounds_[d].width() * stream.uniform();
    }
    return;
  }
  const double u = stream.uniform() * cumulative_mass_.back();
  auto it = std::upper_bound(cumulative_mass_.begin(), cumulative_mass_.end(), u);
  std::size_t cell = std::min<std::size_t>(it - cumulative_mass_.begin(), cumulative_mass_.size() - 1);
  // Never land in a zero-mass cell through rounding at the top end.
  while (cell_mass_[cell] == 0.0 && cell > 0) --cell;
  std::size_t rest = cell;
  for (std::size_t d = 0; d < bounds_.size(); ++d) {
    const int i = static_cast<int>(rest % static_cast<std::size_t>(mass_edges_));
    rest /= static_cast<std::size_t>(mass_edges_);
    const double lo = grid_edge(bounds_[d], mass_edges_, i);
    const double hi = grid_edge(bounds_[d], mass_edges_, i + 1);
    point[d] = lo + (hi - lo) * stream.uniform();
  }
}

GridPartition::GridPartition(SampleSpace space, int edges_per_side)
    : space_(std::move(space)),
      edges_(edges_per_side),
      cell_count_(checked_cell_count(edges_per_side, space_.dimension())),
      density_(cell_count_, 1.0 / static_cast<double>(cell_count_)) {
  if (space_.has_mass_table() && space_.mass_edges_per_side() != edges_) {
    throw ConfigError("mass table resolution (" + std::to_string(space_.mass_edges_per_side()) +
                      " per side) does not match the grid (" + std::to_string(edges_) + ")");
  }
}

double GridPartition::edge(int dim, int i) const {
  return grid_edge(space_.bounds()[dim], edges_, i);
}

int GridPartition::axis_index(int dim, double x) const {
  const Interval& iv = space_.bounds()[dim];
  int i = static_cast<int>(std::ceil((x - iv.lo) / iv.width() * edges_)) - 1;
  i = std::clamp(i, 0, edges_ - 1);
  while (i > 0 && x <= edge(dim, i)) --i;
  while (i < edges_ - 1 && x > edge(dim, i + 1)) ++i;
  return i;
}

std::size_t GridPartition::cell_index(std::span<const double> point) const {
  std::size_t index = 0;
  std::size_t stride = 1;
  for (int d = 0; d < space_.dimension(); ++d) {
    index += static_cast<std::size_t>(axis_index(d, point[d])) * stride;
    stride *= static_cast<std::size_t>(edges_);
  }
  return index;
}

std::vector<Interval> GridPartition::cell_box(std::size_t cell) const {
  std::vector<Interval> box(static_cast<std::size_t>(space_.dimension()));
  for (int d = 0; d < space_.dimension(); ++d) {
    const int i = static_cast<int>(cell % static_cast<std::size_t>(edges_));
    cell /= static_cast<std::size_t>(edges_);
    box[d] = {edge(d, i), edge(d, i + 1)};
  }
  return box;
}

double GridPartition::cell_area(std::size_t cell) const {
  double area = 1.0;
  for (const auto& iv : cell_box(cell)) area *= iv.width();
  return area;
}

double GridPartition::cell_base_mass(std::size_t cell) const {
  if (space_.has_mass_table()) return space_.cell_mass()[cell];
  return cell_area(cell) / space_.volume();
}

void GridPartition::set_densities(std::vector<double> densities) {
  if (densities.size() != cell_count_) {
    throw DiagnosticError("density vector size does not match the cell count");
  }
  double total = 0.0;
  for (double g : densities) {
    if (!(g > 0.0) || !std::isfinite(g)) throw DiagnosticError("every cell density must be > 0");
    total += g;
  }
  if (std::abs(total - 1.0) > 1e-9) throw DiagnosticError("cell densities must sum to 1");
  density_ = std::move(densities);
}

void GridPartition::sample_in_cell(std::size_t cell, RandomStream& stream,
                                   std::span<double> point) const {
  for (int d = 0; d < space_.dimension(); ++d) {
    const int i = static_cast<int>(cell % static_cast<std::size_t>(edges_));
    cell /= static_cast<std::size_t>(edges_);
    const double lo = edge(d, i);
    const double hi = edge(d, i + 1);
    point[d] = lo + (hi - lo) * stream.uniform();
  }
}

void GridPartition::lattice_point_in_cell(std::size_t cell, std::uint64_t j, std::uint64_t n,
                                          std::span<double> point) const {
  if (space_.dimension() != 1) throw ConfigError("lattice in-cell sampling needs a 1-D space");
  const double lo = edge(0, static_cast<int>(cell));
  const double hi = edge(0, static_cast<int>(cell) + 1);
  point[0] = lo + (hi - lo) * (static_cast<double>(j) + 0.5) / static_cast<double>(n);
}

std::vector<std::uint64_t> allocate_samples(std::uint64_t r, std::span<const double> densities) {
  const std::size_t cells = densities.size();
  std::vector<std::uint64_t> counts(cells, 0);
  if (cells == 0 || r == 0) return counts;

  std::vector<double> remainder(cells);
  std::uint64_t assigned = 0;
  for (std::size_t g = 0; g < cells; ++g) {
    const double share = static_cast<double>(r) * densities[g];
    const double whole = std::floor(share);
    counts[g] = static_cast<std::uint64_t>(whole);
    remainder[g] = share - whole;
    assigned += counts[g];
  }
  // Largest remainder; ties go to the lower cell index.
  std::vector<std::size_t> order(cells);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t i = 0; assigned < r; i = (i + 1) % cells, ++assigned) {
    ++counts[order[i]];
  }
  // Densities summing slightly above 1 can overshoot.
  for (std::size_t i = cells; assigned > r;) {
    i = (i == 0 ? cells : i) - 1;
    if (counts[order[i]] > 0) {
      --counts[order[i]];
      --assigned;
    }
  }

  if (r >= cells) {
    for (std::size_t g = 0; g < cells; ++g) {
      if (counts[g] != 0) continue;
      const auto donor = std::max_element(counts.begin(), counts.end());
      --*donor;
      counts[g] = 1;
    }
  }
  return counts;
}

}  // namespace hrisk
