#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hrisk/random_stream.hpp"

namespace hrisk {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  [[nodiscard]] double width() const { return hi - lo; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Axis-aligned box of finite, non-degenerate intervals with a base density
/// that is either uniform or given as a per-cell mass table over an
/// e-per-side grid of the box.
class SampleSpace {
 public:
  explicit SampleSpace(std::vector<Interval> bounds);
  SampleSpace(std::vector<Interval> bounds, int mass_edges_per_side, std::vector<double> cell_mass);

  [[nodiscard]] int dimension() const { return static_cast<int>(bounds_.size()); }
  [[nodiscard]] std::span<const Interval> bounds() const { return bounds_; }
  [[nodiscard]] double volume() const { return volume_; }

  [[nodiscard]] bool has_mass_table() const { return !cell_mass_.empty(); }
  [[nodiscard]] int mass_edges_per_side() const { return mass_edges_; }
  [[nodiscard]] std::span<const double> cell_mass() const { return cell_mass_; }

  /// One draw from the base density. Uniform: dimension() draws.
  /// Mass table: one draw to pick the cell, then dimension() draws inside it.
  void sample(RandomStream& stream, std::span<double> point) const;

 private:
  std::vector<Interval> bounds_;
  double volume_ = 0.0;
  int mass_edges_ = 0;
  std::vector<double> cell_mass_;
  std::vector<double> cumulative_mass_;
};

/// How the importance phase places its points inside a cell.
/// kLattice puts draw j of n at the centre of the j-th of n equal slices
/// (one-dimensional spaces only); it makes per-cell evaluation exhaustive
/// on a discretized space.
enum class InCellSampling { kUniform, kLattice };

/// e^d equal axis-aligned cells tiling a SampleSpace, each carrying a
/// density g. Cell index is row-major with dimension 0 varying fastest.
/// Points on an interior cell boundary belong to the lower-index cell.
class GridPartition {
 public:
  GridPartition(SampleSpace space, int edges_per_side);

  [[nodiscard]] const SampleSpace& space() const { return space_; }
  [[nodiscard]] int edges_per_side() const { return edges_; }
  [[nodiscard]] std::size_t cell_count() const { return cell_count_; }

  [[nodiscard]] std::size_t cell_index(std::span<const double> point) const;
  [[nodiscard]] std::vector<Interval> cell_box(std::size_t cell) const;
  /// Geometric hypervolume A_g.
  [[nodiscard]] double cell_area(std::size_t cell) const;
  /// Base-density mass of the cell: A_g / area(space), or the mass table entry.
  [[nodiscard]] double cell_base_mass(std::size_t cell) const;

  [[nodiscard]] std::span<const double> densities() const { return density_; }
  /// Installs learned densities. Requires one positive value per cell summing to 1 within 1e-9.
  void set_densities(std::vector<double> densities);

  void sample_in_cell(std::size_t cell, RandomStream& stream, std::span<double> point) const;
  /// Lattice placement of draw j of n inside the cell (1-D only).
  void lattice_point_in_cell(std::size_t cell, std::uint64_t j, std::uint64_t n,
                             std::span<double> point) const;

 private:
  [[nodiscard]] double edge(int dim, int i) const;
  [[nodiscard]] int axis_index(int dim, double x) const;

  SampleSpace space_;
  int edges_;
  std::size_t cell_count_;
  std::vector<double> density_;
};

/// Largest-remainder rounding of r * g with a floor of one sample per cell
/// whenever r >= number of cells. The counts always sum to r.
std::vector<std::uint64_t> allocate_samples(std::uint64_t r, std::span<const double> densities);

}  // namespace hrisk
