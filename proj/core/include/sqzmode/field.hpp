#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace sqzmode {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

/// Uniform sampling of a transverse plane. Sample (i, j) sits at
/// center + ((i - nx/2) dx, (j - ny/2) dy), so index nx/2 is the grid centre
/// for both even and odd counts. Storage is row-major with j as the row.
struct GridSpec {
  std::size_t nx = 0;
  std::size_t ny = 0;
  double dx = 0.0;
  double dy = 0.0;
  Vec2 center{};

  static GridSpec square(std::size_t n, double spacing, Vec2 center = {});

  /// Throws InvalidArgument unless nx, ny >= 2 and dx, dy are finite and > 0.
  void validate() const;

  double x(std::size_t i) const noexcept {
    return center.x + (static_cast<double>(i) - static_cast<double>(nx / 2)) * dx;
  }
  double y(std::size_t j) const noexcept {
    return center.y + (static_cast<double>(j) - static_cast<double>(ny / 2)) * dy;
  }
  std::size_t size() const noexcept { return nx * ny; }
  double extent_x() const noexcept { return static_cast<double>(nx) * dx; }
  double extent_y() const noexcept { return static_cast<double>(ny) * dy; }
  double cell_area() const noexcept { return dx * dy; }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Sampled complex scalar field. Value type; operations return new fields.
class ComplexField {
 public:
  ComplexField(GridSpec grid, double wavelength);
  ComplexField(GridSpec grid, double wavelength, std::vector<Complex> samples);

  const GridSpec& grid() const noexcept { return grid_; }
  double wavelength() const noexcept { return wavelength_; }

  std::span<const Complex> samples() const noexcept { return samples_; }
  std::span<Complex> samples() noexcept { return samples_; }

  const Complex& at(std::size_t i, std::size_t j) const noexcept { return samples_[j * grid_.nx + i]; }
  Complex& at(std::size_t i, std::size_t j) noexcept { return samples_[j * grid_.nx + i]; }

  // Same grid and wavelength.
  bool co_registered(const ComplexField& other) const noexcept;

 private:
  GridSpec grid_;
  double wavelength_;
  std::vector<Complex> samples_;
};

/// Real-valued map on a grid (intensity images, amplitude targets).
struct RealImage {
  GridSpec grid;
  std::vector<double> values;

  RealImage() = default;
  explicit RealImage(GridSpec g);
  RealImage(GridSpec g, std::vector<double> v);

  double at(std::size_t i, std::size_t j) const noexcept { return values[j * grid.nx + i]; }
  double& at(std::size_t i, std::size_t j) noexcept { return values[j * grid.nx + i]; }

  /// Bilinear sample at physical coordinates; zero outside the sampled area.
  double sample(double x, double y) const noexcept;
};

/// Sum |u|^2 dx dy.
double power(const ComplexField& field);

/// Throws GridMismatch when grids or wavelengths differ.
void require_co_registered(const ComplexField& a, const ComplexField& b);

}  // namespace sqzmode
