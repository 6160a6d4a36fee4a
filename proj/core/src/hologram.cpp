#include "sqzmode/hologram.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "sqzmode/error.hpp"
#include "sqzmode/fft.hpp"

namespace sqzmode::holo {
namespace {

void require_same_geometry(const SlmGeometry& a, const SlmGeometry& b, const char* what) {
  if (!(a == b)) throw GridMismatch(std::string(what) + ": layers have different SLM geometry");
}

void check_phase_map(const PhaseMap& map) {
  map.geometry.validate();
  if (map.phase.size() != map.geometry.size()) throw InvalidArgument("phase map size does not match geometry");
}

std::size_t fourier_transform_size(const SlmGeometry& g) {
  std::size_t m = 2048;
  while (m < g.width_px || m < g.height_px) m *= 2;
  return m;
}

// Inverse Fourier transform of the focal-plane target, cropped to the panel.
std::vector<Complex> fourier_target(const ModeSpec& spec, const SlmGeometry& g, double focal_length) {
  if (!std::isfinite(focal_length) || !(focal_length > 0.0)) {
    throw InvalidArgument("fourier target plane needs a finite positive focal length");
  }
  const std::size_t m = fourier_transform_size(g);
  // Focal-plane sampling conjugate to the panel pitch over an m-point transform.
  const double dxi = g.design_wavelength * focal_length / (static_cast<double>(m) * g.pixel_pitch);
  std::vector<Complex> buf(m * m);
  for (std::size_t k = 0; k < m; ++k) {
    const double eta = (static_cast<double>(k) - static_cast<double>(m / 2)) * dxi;
    for (std::size_t i = 0; i < m; ++i) {
      const double xi = (static_cast<double>(i) - static_cast<double>(m / 2)) * dxi;
      buf[k * m + i] = sample_mode(spec, xi, eta);
    }
  }
  ifftshift2d(buf, m, m);
  fft2d(buf, m, m, FftDirection::inverse);
  fftshift2d(buf, m, m);

  std::vector<Complex> out(g.size());
  const std::size_t off_u = m / 2 - g.width_px / 2;
  const std::size_t off_v = m / 2 - g.height_px / 2;
  for (std::size_t v = 0; v < g.height_px; ++v) {
    for (std::size_t u = 0; u < g.width_px; ++u) out[v * g.width_px + u] = buf[(v + off_v) * m + (u + off_u)];
  }
  return out;
}

}  // namespace

void SlmGeometry::validate() const {
  if (width_px == 0 || height_px == 0) throw InvalidArgument("SLM needs a positive pixel count");
  if (!(pixel_pitch > 0.0) || !std::isfinite(pixel_pitch)) throw InvalidArgument("SLM pixel pitch must be > 0");
  if (phase_levels < 2 || phase_levels > 65536) throw InvalidArgument("SLM phase levels must be in [2, 65536]");
  if (!(design_wavelength > 0.0) || !std::isfinite(design_wavelength)) {
    throw InvalidArgument("SLM design wavelength must be > 0");
  }
}

GridSpec SlmGeometry::grid() const { return GridSpec{width_px, height_px, pixel_pitch, pixel_pitch, {}}; }

PhaseMap PhaseMap::zeros(const SlmGeometry& geometry) {
  geometry.validate();
  return PhaseMap{geometry, std::vector<double>(geometry.size(), 0.0)};
}

ApertureMask ApertureMask::all_ones(const SlmGeometry& geometry) {
  geometry.validate();
  return ApertureMask{geometry, std::vector<std::uint8_t>(geometry.size(), 1)};
}

std::size_t ApertureMask::count() const noexcept {
  return static_cast<std::size_t>(std::count(inside.begin(), inside.end(), std::uint8_t{1}));
}

std::vector<double> QuantizedPattern::phase() const {
  std::vector<double> out(levels.size());
  const double step = kTwoPi / geometry.phase_levels;
  for (std::size_t k = 0; k < levels.size(); ++k) out[k] = levels[k] * step;
  return out;
}

double wrap_phase(double phase) noexcept {
  double w = std::fmod(phase, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0;
  return w;
}

std::uint16_t quantize_phase(double phase, int levels) noexcept {
  const double k = std::round(phase * levels / kTwoPi);
  long q = static_cast<long>(k) % levels;
  if (q < 0) q += levels;
  return static_cast<std::uint16_t>(q);
}

std::vector<Complex> slm_plane_target(const ModeSpec& spec, const SlmGeometry& geometry, TargetPlane plane,
                                      double focal_length) {
  validate(spec);
  geometry.validate();
  if (plane == TargetPlane::fourier) return fourier_target(spec, geometry, focal_length);
  std::vector<Complex> out(geometry.size());
  for (std::size_t v = 0; v < geometry.height_px; ++v) {
    const double y = geometry.y(v);
    for (std::size_t u = 0; u < geometry.width_px; ++u) out[v * geometry.width_px + u] = sample_mode(spec, geometry.x(u), y);
  }
  return out;
}

PhaseMap mode_phase_pattern(const ModeSpec& spec, const SlmGeometry& geometry, TargetPlane plane,
                            double focal_length) {
  validate(spec);
  geometry.validate();
  PhaseMap out = PhaseMap::zeros(geometry);
  if (plane == TargetPlane::fourier) {
    const auto target = fourier_target(spec, geometry, focal_length);
    double peak = 0.0;
    for (const auto& s : target) peak = std::max(peak, std::abs(s));
    // Phase is meaningless where the transform is at round-off level.
    const double floor = 1e-9 * peak;
    for (std::size_t k = 0; k < target.size(); ++k) {
      out.phase[k] = std::abs(target[k]) < floor ? 0.0 : wrap_phase(std::arg(target[k]));
    }
    return out;
  }
  for (std::size_t v = 0; v < geometry.height_px; ++v) {
    const double y = geometry.y(v);
    for (std::size_t u = 0; u < geometry.width_px; ++u) out.at(u, v) = direct_phase(spec, geometry.x(u), y);
  }
  return out;
}

PhaseMap blazed_grating(int period_px, const SlmGeometry& geometry) {
  if (period_px < 2) throw InvalidArgument("grating period must be at least 2 px, got " + std::to_string(period_px));
  PhaseMap out = PhaseMap::zeros(geometry);
  for (std::size_t v = 0; v < geometry.height_px; ++v) {
    for (std::size_t u = 0; u < geometry.width_px; ++u) {
      const auto step = static_cast<double>(u % static_cast<std::size_t>(period_px));
      out.at(u, v) = kTwoPi * step / period_px;
    }
  }
  return out;
}

PhaseMap lens_phase(double focal_length, const SlmGeometry& geometry) {
  if (focal_length == 0.0 || std::isnan(focal_length)) throw InvalidArgument("lens focal length must be non-zero");
  PhaseMap out = PhaseMap::zeros(geometry);
  if (std::isinf(focal_length)) return out;
  const double c = -kPi / (geometry.design_wavelength * focal_length);
  for (std::size_t v = 0; v < geometry.height_px; ++v) {
    const double y = geometry.y(v);
    for (std::size_t u = 0; u < geometry.width_px; ++u) {
      const double x = geometry.x(u);
      out.at(u, v) = wrap_phase(c * (x * x + y * y));
    }
  }
  return out;
}

ApertureMask circular_aperture(double radius_px, Vec2 center_px, const SlmGeometry& geometry) {
  if (!(radius_px > 0.0)) throw InvalidArgument("aperture radius must be > 0");
  ApertureMask out{geometry, std::vector<std::uint8_t>(geometry.size(), 0)};
  geometry.validate();
  const double r2 = radius_px * radius_px;
  for (std::size_t v = 0; v < geometry.height_px; ++v) {
    const double dv = static_cast<double>(v) - center_px.y;
    for (std::size_t u = 0; u < geometry.width_px; ++u) {
      const double du = static_cast<double>(u) - center_px.x;
      out.inside[v * geometry.width_px + u] = du * du + dv * dv <= r2 ? 1 : 0;
    }
  }
  return out;
}

ApertureMask circular_aperture(double radius_px, const SlmGeometry& geometry) {
  return circular_aperture(
      radius_px, Vec2{static_cast<double>(geometry.width_px / 2), static_cast<double>(geometry.height_px / 2)},
      geometry);
}

Hologram compose(const PhaseMap& mode, const PhaseMap& grating, const PhaseMap& lens, const ApertureMask& mask) {
  check_phase_map(mode);
  check_phase_map(grating);
  check_phase_map(lens);
  require_same_geometry(mode.geometry, grating.geometry, "compose");
  require_same_geometry(mode.geometry, lens.geometry, "compose");
  require_same_geometry(mode.geometry, mask.geometry, "compose");
  if (mask.inside.size() != mode.geometry.size()) throw InvalidArgument("aperture size does not match geometry");

  const SlmGeometry& g = mode.geometry;
  Hologram h{HologramLayers{mode, grating, lens, mask}, PhaseMap::zeros(g), QuantizedPattern{g, {}}, false};
  h.quantized.levels.assign(g.size(), 0);
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!mask.inside[k]) continue;
    std::array<double, 3> terms{mode.phase[k], grating.phase[k], lens.phase[k]};
    std::sort(terms.begin(), terms.end());
    const double phi = wrap_phase((terms[0] + terms[1]) + terms[2]);
    h.composed.phase[k] = phi;
    h.quantized.levels[k] = quantize_phase(phi, g.phase_levels);
  }
  return h;
}

double inverse_sinc(double a) {
  if (!(a >= 0.0) || a > 1.0) throw InvalidArgument("inverse_sinc argument must lie in [0, 1]");
  if (a == 1.0) return 0.0;
  if (a == 0.0) return -kPi;
  // sinc is strictly decreasing on [0, pi]; bisect there and mirror.
  double lo = 0.0;
  double hi = kPi;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (std::sin(mid) / mid > a ? lo : hi) = mid;
  }
  return -0.5 * (lo + hi);
}

Hologram amplitude_phase_encode(const std::vector<double>& target_amplitude, const PhaseMap& target_phase,
                                const PhaseMap& grating) {
  check_phase_map(target_phase);
  check_phase_map(grating);
  require_same_geometry(target_phase.geometry, grating.geometry, "amplitude_phase_encode");
  const SlmGeometry& g = target_phase.geometry;
  if (target_amplitude.size() != g.size()) throw InvalidArgument("amplitude map size does not match geometry");
  for (double a : target_amplitude) {
    if (!(a >= 0.0) || a > 1.0) throw InvalidArgument("target amplitude must lie in [0, 1]");
  }

  Hologram h{HologramLayers{target_phase, grating, PhaseMap::zeros(g), ApertureMask::all_ones(g)}, PhaseMap::zeros(g),
             QuantizedPattern{g, std::vector<std::uint16_t>(g.size(), 0)}, true};
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double depth = 1.0 + inverse_sinc(target_amplitude[k]) / kPi;
    const double carrier = target_phase.phase[k] - kPi * (depth - 1.0);
    const double phi = wrap_phase(depth * wrap_phase(carrier + grating.phase[k]));
    h.composed.phase[k] = phi;
    h.quantized.levels[k] = quantize_phase(phi, g.phase_levels);
  }
  return h;
}

GrayImage to_gray_image(const QuantizedPattern& pattern) {
  const auto& g = pattern.geometry;
  if (g.phase_levels > 256) throw InvalidArgument("8-bit export supports at most 256 phase levels");
  GrayImage image{g.width_px, g.height_px, 255, std::vector<std::uint16_t>(pattern.levels.size())};
  for (std::size_t k = 0; k < pattern.levels.size(); ++k) {
    image.pixels[k] = static_cast<std::uint16_t>(pattern.levels[k] * 256 / g.phase_levels);
  }
  return image;
}

QuantizedPattern from_gray_image(const GrayImage& image, const SlmGeometry& geometry) {
  geometry.validate();
  if (geometry.phase_levels > 256) throw InvalidArgument("8-bit import supports at most 256 phase levels");
  if (image.width != geometry.width_px || image.height != geometry.height_px) {
    throw GridMismatch("hologram image size does not match the SLM geometry");
  }
  if (image.maxval != 255) throw IoError("hologram images must be 8-bit");
  QuantizedPattern out{geometry, std::vector<std::uint16_t>(image.pixels.size())};
  const unsigned levels = static_cast<unsigned>(geometry.phase_levels);
  for (std::size_t k = 0; k < image.pixels.size(); ++k) {
    out.levels[k] = static_cast<std::uint16_t>((image.pixels[k] * levels + 255u) / 256u);
  }
  return out;
}

void export_pgm(const Hologram& hologram, const std::filesystem::path& path) {
  write_pgm(path, to_gray_image(hologram.quantized));
}

void export_png(const Hologram& hologram, const std::filesystem::path& path) {
  write_png(path, to_gray_image(hologram.quantized));
}

QuantizedPattern import_pattern(const std::filesystem::path& path, const SlmGeometry& geometry) {
  return from_gray_image(read_gray_image(path), geometry);
}

}  // namespace sqzmode::holo
