#include "chradial/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "chradial/errors.hpp"

namespace chradial {

RadialGrid::RadialGrid(double r_max, std::size_t n_nodes)
    : r_max_(r_max), n_nodes_(n_nodes), h_(0.0) {
  if (!(r_max > 0.0) || !std::isfinite(r_max)) {
    throw InvalidArgument("grid: r_max must be positive and finite, got " + std::to_string(r_max));
  }
  if (n_nodes < 8) {
    throw InvalidArgument("grid: need at least 8 nodes, got " + std::to_string(n_nodes));
  }
  h_ = r_max / static_cast<double>(n_nodes - 1);
}

std::vector<double> RadialGrid::nodes() const {
  std::vector<double> r(n_nodes_);
  for (std::size_t i = 0; i < n_nodes_; ++i) r[i] = node(i);
  return r;
}

DensityField::DensityField(RadialGrid g, std::vector<double> v)
    : grid(std::move(g)), values(std::move(v)) {
  if (values.size() != grid.size()) {
    throw InvalidArgument("density field: " + std::to_string(values.size()) +
                          " values for a grid of " + std::to_string(grid.size()) + " nodes");
  }
}

DensityField DensityField::constant(const RadialGrid& g, double c) {
  return DensityField(g, std::vector<double>(g.size(), c));
}

bool DensityField::all_finite() const noexcept {
  return std::all_of(values.begin(), values.end(), [](double x) { return std::isfinite(x); });
}

RadialGrid build_grid(double r_max, std::size_t n_nodes) { return RadialGrid(r_max, n_nodes); }

namespace {

void require_shape(const RadialGrid& grid, std::size_t n, const char* who) {
  if (n != grid.size()) {
    throw InvalidArgument(std::string(who) + ": field has " + std::to_string(n) +
                          " values, grid has " + std::to_string(grid.size()));
  }
}

}  // namespace

double radial_integral(const RadialGrid& grid, std::span<const double> f, double eps) {
  require_shape(grid, f.size(), "radial_integral");
  const std::size_t n = grid.size();
  double interior = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) interior += (grid.node(i) + eps) * f[i];
  const double ends = 0.5 * ((grid.node(0) + eps) * f[0] + (grid.node(n - 1) + eps) * f[n - 1]);
  return grid.spacing() * (interior + ends);
}

double radial_integral(const DensityField& f, double eps) {
  return radial_integral(f.grid, f.values, eps);
}

std::vector<double> control_volumes(const RadialGrid& grid, double eps) {
  const std::size_t n = grid.size();
  const double h = grid.spacing();
  std::vector<double> a(n);
  a[0] = 0.5 * h * (0.25 * h + eps);
  for (std::size_t i = 1; i + 1 < n; ++i) a[i] = h * (grid.node(i) + eps);
  a[n - 1] = 0.5 * h * (grid.r_max() - 0.25 * h + eps);
  return a;
}

double control_volume_integral(const RadialGrid& grid, std::span<const double> f, double eps) {
  require_shape(grid, f.size(), "control_volume_integral");
  const auto a = control_volumes(grid, eps);
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * f[i];
  return sum;
}

void radial_laplacian(const RadialGrid& grid, std::span<const double> f, double eps,
                      std::span<double> out) {
  require_shape(grid, f.size(), "radial_laplacian");
  require_shape(grid, out.size(), "radial_laplacian");
  const std::size_t n = grid.size();
  const double h = grid.spacing();
  const auto a = control_volumes(grid, eps);
  // flux through face i+1/2, weighted by the face radius
  auto flux = [&](std::size_t i) { return (grid.node(i) + 0.5 * h + eps) * (f[i + 1] - f[i]) / h; };
  double left = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double right = i + 1 < n ? flux(i) : 0.0;
    out[i] = (right - left) / a[i];
    left = right;
  }
}

DensityField radial_laplacian(const DensityField& f, double eps) {
  DensityField out(f.grid, std::vector<double>(f.size()));
  radial_laplacian(f.grid, f.values, eps, out.values);
  return out;
}

std::vector<double> face_gradient(const RadialGrid& grid, std::span<const double> f) {
  require_shape(grid, f.size(), "face_gradient");
  std::vector<double> g(f.size() - 1);
  const double h = grid.spacing();
  for (std::size_t i = 0; i + 1 < f.size(); ++i) g[i] = (f[i + 1] - f[i]) / h;
  return g;
}

std::vector<double> face_gradient(const DensityField& f) { return face_gradient(f.grid, f.values); }

}  // namespace chradial
