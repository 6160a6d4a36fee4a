#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "sqzmode/field.hpp"
#include "sqzmode/modes.hpp"

namespace sqzmode::holo {

/// Phase-only panel. Pixel (u, v) sits at ((u - W/2) p, (v - H/2) p)
/// relative to the panel centre, matching GridSpec's convention.
struct SlmGeometry {
  std::size_t width_px = 1920;
  std::size_t height_px = 1080;
  double pixel_pitch = 8e-6;
  int phase_levels = 256;
  double design_wavelength = 1558e-9;

  void validate() const;
  std::size_t size() const noexcept { return width_px * height_px; }
  GridSpec grid() const;
  double x(std::size_t u) const noexcept {
    return (static_cast<double>(u) - static_cast<double>(width_px / 2)) * pixel_pitch;
  }
  double y(std::size_t v) const noexcept {
    return (static_cast<double>(v) - static_cast<double>(height_px / 2)) * pixel_pitch;
  }

  friend bool operator==(const SlmGeometry&, const SlmGeometry&) = default;
};

/// Phase values in [0, 2 pi), row-major (v is the row).
struct PhaseMap {
  SlmGeometry geometry;
  std::vector<double> phase;

  static PhaseMap zeros(const SlmGeometry& geometry);
  double at(std::size_t u, std::size_t v) const noexcept { return phase[v * geometry.width_px + u]; }
  double& at(std::size_t u, std::size_t v) noexcept { return phase[v * geometry.width_px + u]; }
};

struct ApertureMask {
  SlmGeometry geometry;
  std::vector<std::uint8_t> inside;

  static ApertureMask all_ones(const SlmGeometry& geometry);
  bool at(std::size_t u, std::size_t v) const noexcept { return inside[v * geometry.width_px + u] != 0; }
  std::size_t count() const noexcept;
};

struct QuantizedPattern {
  SlmGeometry geometry;
  std::vector<std::uint16_t> levels;  // each in [0, phase_levels)

  /// Displayed phase of each pixel, level * 2 pi / phase_levels.
  std::vector<double> phase() const;
  friend bool operator==(const QuantizedPattern&, const QuantizedPattern&) = default;
};

struct HologramLayers {
  PhaseMap mode_phase;
  PhaseMap grating;
  PhaseMap lens;
  ApertureMask aperture;
};

/// Layers plus the composed and quantized pattern. Phase-only holograms obey
/// composed = (mode + grating + lens) mod 2 pi inside the aperture and 0
/// outside. Amplitude-encoded holograms replace the sum with the depth
/// modulated grating and keep the layers for reference.
struct Hologram {
  HologramLayers layers;
  PhaseMap composed;
  QuantizedPattern quantized;
  bool amplitude_encoded = false;

  const SlmGeometry& geometry() const noexcept { return composed.geometry; }
};

enum class TargetPlane { direct, fourier };

/// Phase pattern for a target mode. `direct` displays the mode's own phase on
/// the panel (mode sampled with the panel at its waist plane). `fourier`
/// displays the phase of the inverse Fourier transform of the mode, where the
/// mode is the desired field in the back focal plane of a lens of focal
/// length `focal_length` at the design wavelength.
PhaseMap mode_phase_pattern(const ModeSpec& spec, const SlmGeometry& geometry, TargetPlane plane,
                            double focal_length = 0.45);

/// Complex field the phase pattern is taken from, one value per pixel:
/// the mode itself (direct) or its inverse Fourier transform (fourier).
std::vector<Complex> slm_plane_target(const ModeSpec& spec, const SlmGeometry& geometry, TargetPlane plane,
                                      double focal_length = 0.45);

/// Sawtooth 2 pi (u mod period) / period along the panel columns.
PhaseMap blazed_grating(int period_px, const SlmGeometry& geometry);

/// Kinoform lens, -pi r^2 / (lambda f) wrapped into [0, 2 pi). An infinite
/// focal length gives a flat map; zero is rejected.
PhaseMap lens_phase(double focal_length, const SlmGeometry& geometry);

/// Pixels with (u - cu)^2 + (v - cv)^2 <= radius^2.
ApertureMask circular_aperture(double radius_px, Vec2 center_px, const SlmGeometry& geometry);
/// Centred at (W/2, H/2).
ApertureMask circular_aperture(double radius_px, const SlmGeometry& geometry);

/// Wraps into [0, 2 pi); exact multiples of 2 pi map to 0.
double wrap_phase(double phase) noexcept;
std::uint16_t quantize_phase(double phase, int levels) noexcept;

/// Per pixel, the three layer values are summed in ascending order, so any
/// permutation of the layers gives bit-identical results.
Hologram compose(const PhaseMap& mode, const PhaseMap& grating, const PhaseMap& lens, const ApertureMask& mask);

/// Inverse of sinc(x) = sin(x)/x on [-pi, 0]: returns x with sinc(x) = a.
double inverse_sinc(double a);

/// Grating-depth modulation. The displayed phase is M * mod(F + theta, 2 pi)
/// with M = 1 + inverse_sinc(A) / pi and F = Phi - pi (M - 1). The first
/// Fourier coefficient of that sawtooth is A e^{i Phi}.
Hologram amplitude_phase_encode(const std::vector<double>& target_amplitude, const PhaseMap& target_phase,
                                const PhaseMap& grating);

/// Level k is written as gray floor(k * 256 / levels); import inverts the map
/// exactly for any levels <= 256.
GrayImage to_gray_image(const QuantizedPattern& pattern);
QuantizedPattern from_gray_image(const GrayImage& image, const SlmGeometry& geometry);

void export_pgm(const Hologram& hologram, const std::filesystem::path& path);
void export_png(const Hologram& hologram, const std::filesystem::path& path);
QuantizedPattern import_pattern(const std::filesystem::path& path, const SlmGeometry& geometry);

}  // namespace sqzmode::holo
