#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace chradial {

/// Uniform node-centred mesh on [0, r_max] with r_i = i*h.
class RadialGrid {
 public:
  RadialGrid(double r_max, std::size_t n_nodes);

  double r_max() const noexcept { return r_max_; }
  std::size_t size() const noexcept { return n_nodes_; }
  double spacing() const noexcept { return h_; }

  /// Node coordinate; the last node is exactly r_max.
  double node(std::size_t i) const noexcept {
    return i + 1 == n_nodes_ ? r_max_ : static_cast<double>(i) * h_;
  }
  std::vector<double> nodes() const;

  bool operator==(const RadialGrid&) const = default;

 private:
  double r_max_;
  std::size_t n_nodes_;
  double h_;
};

enum class BoundaryCondition { neumann_both };

/// Nodal values of a radial density on a grid.
struct DensityField {
  RadialGrid grid;
  std::vector<double> values;
  BoundaryCondition bc = BoundaryCondition::neumann_both;

  DensityField(RadialGrid g, std::vector<double> v);
  static DensityField constant(const RadialGrid& g, double c);

  std::size_t size() const noexcept { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }

  bool all_finite() const noexcept;
};

RadialGrid build_grid(double r_max, std::size_t n_nodes);

/// Composite trapezoid of (r + eps) f(r) over the grid.
double radial_integral(const RadialGrid& grid, std::span<const double> f, double eps);
double radial_integral(const DensityField& f, double eps);

/// Exact measure of each control volume, A_i = int_{cell_i} (r + eps) dr, with
/// half cells at both ends.  Sums to r_max^2/2 + eps*r_max.
std::vector<double> control_volumes(const RadialGrid& grid, double eps);

/// sum_i A_i f_i: the mass functional conserved by the flux-form evolution.
double control_volume_integral(const RadialGrid& grid, std::span<const double> f, double eps);

/// Conservative central discretization of (1/(r+eps)) d/dr((r+eps) df/dr)
/// with zero flux through r = 0 and r = r_max.  At r = 0 with eps = 0 this
/// reduces to the symmetry limit 4 (f_1 - f_0)/h^2 = 2 f''(0).
DensityField radial_laplacian(const DensityField& f, double eps);
void radial_laplacian(const RadialGrid& grid, std::span<const double> f, double eps,
                      std::span<double> out);

/// Forward differences (f_{i+1} - f_i)/h on the n-1 faces.
std::vector<double> face_gradient(const RadialGrid& grid, std::span<const double> f);
std::vector<double> face_gradient(const DensityField& f);

}  // namespace chradial
