#include "sqzmode/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sqzmode/error.hpp"
#include "sqzmode/fft.hpp"

namespace sqzmode::optics {
namespace {

std::vector<double> gaussian_kernel(double sigma) {
  const int radius = static_cast<int>(std::ceil(4.0 * sigma));
  std::vector<double> k(2 * static_cast<std::size_t>(radius) + 1);
  double sum = 0.0;
  for (int t = -radius; t <= radius; ++t) {
    const double w = std::exp(-0.5 * t * t / (sigma * sigma));
    k[static_cast<std::size_t>(t + radius)] = w;
    sum += w;
  }
  for (double& w : k) w /= sum;
  return k;
}

// Separable blur with clamped edges.
std::vector<double> blur(const std::vector<double>& in, std::size_t w, std::size_t h, double sigma) {
  const auto kernel = gaussian_kernel(sigma);
  const auto radius = static_cast<long>(kernel.size() / 2);
  const auto clamp_index = [](long i, std::size_t n) {
    return static_cast<std::size_t>(std::clamp(i, 0L, static_cast<long>(n) - 1));
  };
  std::vector<double> tmp(in.size());
  for (std::size_t v = 0; v < h; ++v) {
    for (std::size_t u = 0; u < w; ++u) {
      double acc = 0.0;
      for (long t = -radius; t <= radius; ++t) {
        acc += kernel[static_cast<std::size_t>(t + radius)] * in[v * w + clamp_index(static_cast<long>(u) + t, w)];
      }
      tmp[v * w + u] = acc;
    }
  }
  std::vector<double> out(in.size());
  for (std::size_t v = 0; v < h; ++v) {
    for (std::size_t u = 0; u < w; ++u) {
      double acc = 0.0;
      for (long t = -radius; t <= radius; ++t) {
        acc += kernel[static_cast<std::size_t>(t + radius)] * tmp[clamp_index(static_cast<long>(v) + t, h) * w + u];
      }
      out[v * w + u] = acc;
    }
  }
  return out;
}

// Panel pixel index containing coordinate `c`, or -1 when off the panel.
long pixel_index(double c, double pitch, std::size_t count) {
  const double f = std::floor(c / pitch + static_cast<double>(count / 2) + 0.5);
  if (f < 0.0 || f >= static_cast<double>(count)) return -1;
  return static_cast<long>(f);
}

bool on_pixel_centres(const GridSpec& grid, const holo::SlmGeometry& g) {
  const double tol = 1e-9;
  if (std::abs(grid.dx - g.pixel_pitch) > tol * g.pixel_pitch) return false;
  if (std::abs(grid.dy - g.pixel_pitch) > tol * g.pixel_pitch) return false;
  const double su = grid.x(0) / g.pixel_pitch;
  const double sv = grid.y(0) / g.pixel_pitch;
  return std::abs(su - std::round(su)) < 1e-6 && std::abs(sv - std::round(sv)) < 1e-6;
}

}  // namespace

const holo::SlmGeometry& SlmModel::geometry() const {
  if (!hologram) throw InvalidArgument("SLM model has no hologram");
  return hologram->geometry();
}

void SlmModel::validate() const {
  if (!hologram) throw InvalidArgument("SLM model has no hologram");
  hologram->geometry().validate();
  if (hologram->quantized.levels.size() != hologram->geometry().size()) {
    throw InvalidArgument("hologram pattern does not match its geometry");
  }
  if (!(eta_d >= 0.0 && eta_d <= 1.0)) throw InvalidArgument("eta_d must lie in [0, 1]");
  if (!(eta_r >= 0.0 && eta_r <= 1.0)) throw InvalidArgument("eta_r must lie in [0, 1]");
  if (!(eta_d_uncertainty >= 0.0) || !(eta_r_uncertainty >= 0.0)) {
    throw InvalidArgument("efficiency uncertainties must be >= 0");
  }
  if (!(crosstalk_sigma_px >= 0.0) || !std::isfinite(crosstalk_sigma_px)) {
    throw InvalidArgument("crosstalk sigma must be finite and >= 0");
  }
}

void PropagationPlan::validate() const {
  if (!(distance >= 0.0) || !std::isfinite(distance)) throw InvalidArgument("propagation distance must be >= 0");
  if (!(wavelength >= 0.0) || !std::isfinite(wavelength)) throw InvalidArgument("plan wavelength must be >= 0");
  if (padding_factor < 1) throw InvalidArgument("padding factor must be >= 1");
}

ComplexField angular_spectrum(const ComplexField& field, const PropagationPlan& plan, PropagationReport* report) {
  plan.validate();
  if (plan.wavelength > 0.0 && plan.wavelength != field.wavelength()) {
    throw InvalidArgument("plan wavelength differs from the field's wavelength");
  }
  if (report != nullptr) *report = PropagationReport{};
  if (plan.distance == 0.0) return field;

  const GridSpec& g = field.grid();
  const double lambda = field.wavelength();
  const std::size_t pad = static_cast<std::size_t>(plan.padding_factor);
  const std::size_t mx = g.nx * pad;
  const std::size_t my = g.ny * pad;
  const std::size_t ox = (mx - g.nx) / 2;
  const std::size_t oy = (my - g.ny) / 2;

  std::vector<Complex> buf(mx * my);
  for (std::size_t j = 0; j < g.ny; ++j) {
    for (std::size_t i = 0; i < g.nx; ++i) buf[(j + oy) * mx + (i + ox)] = field.at(i, j);
  }
  fft2d(buf, mx, my, FftDirection::forward);

  std::vector<double> fx(mx);
  std::vector<double> fy(my);
  for (std::size_t k = 0; k < mx; ++k) fx[k] = fft_frequency(k, mx, g.dx);
  for (std::size_t k = 0; k < my; ++k) fy[k] = fft_frequency(k, my, g.dy);
  const double alias_x = 0.95 * 0.5 / g.dx;
  const double alias_y = 0.95 * 0.5 / g.dy;

  double total = 0.0;
  double aliased = 0.0;
  for (std::size_t ky = 0; ky < my; ++ky) {
    const bool edge_y = std::abs(fy[ky]) >= alias_y;
    for (std::size_t kx = 0; kx < mx; ++kx) {
      const double p = std::norm(buf[ky * mx + kx]);
      total += p;
      if (edge_y || std::abs(fx[kx]) >= alias_x) aliased += p;
    }
  }
  const double alias_fraction = total > 0.0 ? aliased / total : 0.0;
  if (alias_fraction > kAliasingErrorFraction) {
    std::ostringstream msg;
    msg << "angular_spectrum: " << alias_fraction * 100.0
        << "% of the power sits at the sampled spectrum's edge; the field is undersampled";
    throw PhysicsGuardError(msg.str());
  }

  const double inv_l2 = 1.0 / (lambda * lambda);
  const double z = plan.distance;
  const double half_x = 0.5 * static_cast<double>(mx) * g.dx;
  const double half_y = 0.5 * static_cast<double>(my) * g.dy;
  double absorbed = 0.0;
  double evanescent = 0.0;
  for (std::size_t ky = 0; ky < my; ++ky) {
    for (std::size_t kx = 0; kx < mx; ++kx) {
      Complex& s = buf[ky * mx + kx];
      const double arg = inv_l2 - fx[kx] * fx[kx] - fy[ky] * fy[ky];
      if (arg > 0.0) {
        const double kz = std::sqrt(arg);
        if (plan.band_limit && (z * std::abs(fx[kx]) > half_x * kz || z * std::abs(fy[ky]) > half_y * kz)) {
          absorbed += std::norm(s);
          s = 0.0;
          continue;
        }
        s *= std::polar(1.0, kTwoPi * z * kz);
      } else {
        evanescent += std::norm(s);
        s *= std::exp(-kTwoPi * z * std::sqrt(-arg));
      }
    }
  }
  fft2d(buf, mx, my, FftDirection::inverse);

  ComplexField out(g, lambda);
  const double scale = 1.0 / static_cast<double>(mx * my);
  for (std::size_t j = 0; j < g.ny; ++j) {
    for (std::size_t i = 0; i < g.nx; ++i) out.at(i, j) = buf[(j + oy) * mx + (i + ox)] * scale;
  }

  if (report != nullptr && total > 0.0) {
    report->aliased_fraction = alias_fraction;
    report->absorbed_fraction = absorbed / total;
    report->evanescent_fraction = evanescent / total;
    if (alias_fraction > kAliasingWarningFraction) {
      std::ostringstream msg;
      msg << "spectral power near Nyquist: " << alias_fraction;
      report->warnings.push_back(msg.str());
    }
  }
  return out;
}

std::vector<double> effective_phase(const SlmModel& slm) {
  slm.validate();
  const auto& g = slm.geometry();
  std::vector<double> phase = slm.hologram->quantized.phase();
  if (slm.crosstalk_sigma_px == 0.0) return phase;
  return blur(phase, g.width_px, g.height_px, slm.crosstalk_sigma_px);
}

ComplexField apply_slm(const ComplexField& incident, const SlmModel& slm) {
  return apply_slm(incident, slm, effective_phase(slm));
}

ComplexField apply_slm(const ComplexField& incident, const SlmModel& slm, const std::vector<double>& phase) {
  slm.validate();
  const auto& g = slm.geometry();
  if (phase.size() != g.size()) throw InvalidArgument("effective phase does not match the SLM geometry");
  const GridSpec& grid = incident.grid();
  if (!slm.allow_resampling && !on_pixel_centres(grid, g)) {
    throw GridMismatch("incident field is not sampled on the SLM pixel centres; enable resampling to accept it");
  }
  const double a_mod = std::sqrt(slm.eta_r * slm.eta_d);
  const double a_spec = std::sqrt(slm.eta_r * (1.0 - slm.eta_d));
  ComplexField out(grid, incident.wavelength());
  std::vector<long> col(grid.nx);
  for (std::size_t i = 0; i < grid.nx; ++i) col[i] = pixel_index(grid.x(i), g.pixel_pitch, g.width_px);
  for (std::size_t j = 0; j < grid.ny; ++j) {
    const long v = pixel_index(grid.y(j), g.pixel_pitch, g.height_px);
    if (v < 0) continue;
    for (std::size_t i = 0; i < grid.nx; ++i) {
      if (col[i] < 0) continue;
      const double phi = phase[static_cast<std::size_t>(v) * g.width_px + static_cast<std::size_t>(col[i])];
      const Complex e = incident.at(i, j);
      out.at(i, j) = a_mod * e * std::polar(1.0, phi) + a_spec * e;
    }
  }
  return out;
}

ComplexField select_order(const ComplexField& field, Vec2 center, double radius) {
  if (!(radius > 0.0)) throw InvalidArgument("iris radius must be > 0");
  ComplexField out = field;
  const GridSpec& g = field.grid();
  const double r2 = radius * radius;
  for (std::size_t j = 0; j < g.ny; ++j) {
    const double dy = g.y(j) - center.y;
    for (std::size_t i = 0; i < g.nx; ++i) {
      const double dx = g.x(i) - center.x;
      if (dx * dx + dy * dy > r2) out.at(i, j) = 0.0;
    }
  }
  return out;
}

RealImage intensity_image(const ComplexField& field, bool normalize_peak) {
  RealImage img(field.grid());
  const auto s = field.samples();
  double peak = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    img.values[k] = std::norm(s[k]);
    peak = std::max(peak, img.values[k]);
  }
  if (normalize_peak && peak > 0.0) {
    for (double& v : img.values) v /= peak;
  }
  return img;
}

double conversion_efficiency(double output_power, double input_power) {
  if (!(input_power > 0.0)) throw InvalidArgument("input power must be > 0");
  if (!(output_power >= 0.0)) throw InvalidArgument("output power must be >= 0");
  const double eta = output_power / input_power;
  if (eta > 1.0 + 1e-9) throw PhysicsGuardError("conversion efficiency exceeds unity: " + std::to_string(eta));
  return eta;
}

Vec2 centroid(const RealImage& image, std::optional<Vec2> disk_center, double disk_radius) {
  const GridSpec& g = image.grid;
  const double r2 = disk_radius * disk_radius;
  double sw = 0.0, sx = 0.0, sy = 0.0;
  for (std::size_t j = 0; j < g.ny; ++j) {
    const double y = g.y(j);
    for (std::size_t i = 0; i < g.nx; ++i) {
      const double x = g.x(i);
      if (disk_center) {
        const double dx = x - disk_center->x;
        const double dy = y - disk_center->y;
        if (dx * dx + dy * dy > r2) continue;
      }
      const double w = image.at(i, j);
      sw += w;
      sx += w * x;
      sy += w * y;
    }
  }
  if (!(sw > 0.0)) throw InvalidArgument("centroid of an image with no intensity");
  return Vec2{sx / sw, sy / sw};
}

double second_moment_radius(const RealImage& image, Vec2 center, double disk_radius) {
  const GridSpec& g = image.grid;
  const double r2max = disk_radius * disk_radius;
  double sw = 0.0, sr = 0.0;
  for (std::size_t j = 0; j < g.ny; ++j) {
    const double dy = g.y(j) - center.y;
    for (std::size_t i = 0; i < g.nx; ++i) {
      const double dx = g.x(i) - center.x;
      const double r2 = dx * dx + dy * dy;
      if (disk_radius > 0.0 && r2 > r2max) continue;
      sw += image.at(i, j);
      sr += image.at(i, j) * r2;
    }
  }
  if (!(sw > 0.0)) throw InvalidArgument("second moment of an image with no intensity");
  return std::sqrt(2.0 * sr / sw);
}

double second_moment_width_x(const RealImage& image) {
  const Vec2 c = centroid(image);
  const GridSpec& g = image.grid;
  double sw = 0.0, sx = 0.0;
  for (std::size_t j = 0; j < g.ny; ++j) {
    for (std::size_t i = 0; i < g.nx; ++i) {
      const double dx = g.x(i) - c.x;
      sw += image.at(i, j);
      sx += image.at(i, j) * dx * dx;
    }
  }
  return 2.0 * std::sqrt(sx / sw);
}

double power_in_disk(const ComplexField& field, Vec2 center, double radius) {
  return power(select_order(field, center, radius));
}

double power_in_band(const ComplexField& field, double x_center, double half_width) {
  const GridSpec& g = field.grid();
  double sum = 0.0;
  for (std::size_t j = 0; j < g.ny; ++j) {
    for (std::size_t i = 0; i < g.nx; ++i) {
      if (std::abs(g.x(i) - x_center) < half_width) sum += std::norm(field.at(i, j));
    }
  }
  return sum * g.cell_area();
}

double far_field_order_power(const ComplexField& field, double period, int order, int padding_factor) {
  if (!(period > 0.0)) throw InvalidArgument("grating period must be > 0");
  if (padding_factor < 1) throw InvalidArgument("padding factor must be >= 1");
  const GridSpec& g = field.grid();
  const std::size_t mx = g.nx * static_cast<std::size_t>(padding_factor);
  const std::size_t my = g.ny * static_cast<std::size_t>(padding_factor);
  std::vector<Complex> buf(mx * my);
  for (std::size_t j = 0; j < g.ny; ++j) {
    for (std::size_t i = 0; i < g.nx; ++i) buf[j * mx + i] = field.at(i, j);
  }
  fft2d(buf, mx, my, FftDirection::forward);
  double sum = 0.0;
  for (std::size_t kx = 0; kx < mx; ++kx) {
    // Each bin belongs to exactly one order, so the orders partition the power.
    if (std::floor(fft_frequency(kx, mx, g.dx) * period + 0.5) != order) continue;
    for (std::size_t ky = 0; ky < my; ++ky) sum += std::norm(buf[ky * mx + kx]);
  }
  // Parseval: sum |F|^2 = N sum |u|^2.
  return sum / static_cast<double>(mx * my) * g.cell_area();
}

}  // namespace sqzmode::optics
