#include "sqzmode/field.hpp"

#include <cmath>
#include <string>

#include "sqzmode/error.hpp"

namespace sqzmode {

GridSpec GridSpec::square(std::size_t n, double spacing, Vec2 center) {
  return GridSpec{n, n, spacing, spacing, center};
}

void GridSpec::validate() const {
  if (nx < 2 || ny < 2) {
    throw InvalidArgument("grid needs at least 2 samples per axis, got " + std::to_string(nx) + "x" +
                          std::to_string(ny));
  }
  if (!(dx > 0.0) || !(dy > 0.0) || !std::isfinite(dx) || !std::isfinite(dy)) {
    throw InvalidArgument("grid spacing must be finite and positive");
  }
  if (!std::isfinite(center.x) || !std::isfinite(center.y)) {
    throw InvalidArgument("grid centre must be finite");
  }
}

ComplexField::ComplexField(GridSpec grid, double wavelength)
    : ComplexField(grid, wavelength, std::vector<Complex>(grid.size())) {}

ComplexField::ComplexField(GridSpec grid, double wavelength, std::vector<Complex> samples)
    : grid_(grid), wavelength_(wavelength), samples_(std::move(samples)) {
  grid_.validate();
  if (!(wavelength_ > 0.0) || !std::isfinite(wavelength_)) {
    throw InvalidArgument("wavelength must be finite and positive");
  }
  if (samples_.size() != grid_.size()) {
    throw InvalidArgument("sample count does not match grid shape");
  }
}

bool ComplexField::co_registered(const ComplexField& other) const noexcept {
  return grid_ == other.grid_ && wavelength_ == other.wavelength_;
}

RealImage::RealImage(GridSpec g) : RealImage(g, std::vector<double>(g.size())) {}

RealImage::RealImage(GridSpec g, std::vector<double> v) : grid(g), values(std::move(v)) {
  grid.validate();
  if (values.size() != grid.size()) {
    throw InvalidArgument("image value count does not match grid shape");
  }
}

double RealImage::sample(double x, double y) const noexcept {
  const double fi = (x - grid.center.x) / grid.dx + static_cast<double>(grid.nx / 2);
  const double fj = (y - grid.center.y) / grid.dy + static_cast<double>(grid.ny / 2);
  if (!(fi >= 0.0) || !(fj >= 0.0)) return 0.0;
  const double max_i = static_cast<double>(grid.nx - 1);
  const double max_j = static_cast<double>(grid.ny - 1);
  if (fi > max_i || fj > max_j) return 0.0;
  auto i0 = static_cast<std::size_t>(fi);
  auto j0 = static_cast<std::size_t>(fj);
  if (i0 == grid.nx - 1) --i0;
  if (j0 == grid.ny - 1) --j0;
  const double tx = fi - static_cast<double>(i0);
  const double ty = fj - static_cast<double>(j0);
  const double v00 = at(i0, j0);
  const double v10 = at(i0 + 1, j0);
  const double v01 = at(i0, j0 + 1);
  const double v11 = at(i0 + 1, j0 + 1);
  return (1 - ty) * ((1 - tx) * v00 + tx * v10) + ty * ((1 - tx) * v01 + tx * v11);
}

double power(const ComplexField& field) {
  double sum = 0.0;
  for (const auto& s : field.samples()) sum += std::norm(s);
  return sum * field.grid().cell_area();
}

void require_co_registered(const ComplexField& a, const ComplexField& b) {
  if (!(a.grid() == b.grid())) throw GridMismatch("fields are sampled on different grids");
  if (a.wavelength() != b.wavelength()) throw GridMismatch("fields carry different wavelengths");
}

}  // namespace sqzmode
