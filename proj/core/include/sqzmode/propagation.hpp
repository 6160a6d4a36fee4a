#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sqzmode/diagnostics.hpp"
#include "sqzmode/field.hpp"
#include "sqzmode/hologram.hpp"

namespace sqzmode::optics {

/// Reflective phase-only SLM: a fraction eta_d of the light picks up the
/// displayed phase, the rest reflects specularly, and eta_r scales both.
///
/// The displayed phase is the quantized hologram blurred by a Gaussian of
/// width crosstalk_sigma_px (liquid-crystal fringing fields between pixels).
/// This is what pulls the blazed-grating efficiency below the ideal
/// staircase value; sigma = 0 displays the quantized levels exactly.
struct SlmModel {
  std::shared_ptr<const holo::Hologram> hologram;
  double eta_d = 0.90;
  double eta_r = 0.61;
  double eta_d_uncertainty = 0.03;
  double eta_r_uncertainty = 0.02;
  double crosstalk_sigma_px = 0.70;
  // Accept incident grids whose samples do not sit on pixel centres; each
  // sample then takes the phase of the pixel containing it.
  bool allow_resampling = false;

  const holo::SlmGeometry& geometry() const;
  void validate() const;
};

struct PropagationPlan {
  double distance = 0.45;
  double wavelength = 0.0;  // 0 means "use the field's wavelength"
  int padding_factor = 2;
  // Drop spectral components whose walk-off over `distance` exceeds half the
  // padded window. They would otherwise wrap around into the output window.
  bool band_limit = true;

  void validate() const;
};

/// Spectral bookkeeping of one propagation, as fractions of input power.
struct PropagationReport {
  double aliased_fraction = 0.0;     // power within 5% of Nyquist on either axis
  double absorbed_fraction = 0.0;    // removed by band limiting
  double evanescent_fraction = 0.0;  // in components with |f| > 1/lambda
  std::vector<std::string> warnings;
};

/// Power fraction above which angular_spectrum refuses to run.
inline constexpr double kAliasingErrorFraction = 0.01;
/// Power fraction above which a warning is recorded.
inline constexpr double kAliasingWarningFraction = 1e-6;

/// Scalar angular-spectrum propagation by plan.distance: zero-pad by
/// padding_factor, multiply the spectrum by exp(i 2 pi z sqrt(1/lambda^2 -
/// fx^2 - fy^2)) (exponentially decaying past 1/lambda), crop back to the
/// input window. Distance 0 returns the input unchanged. Throws
/// PhysicsGuardError when more than 1% of the power sits at the edge of the
/// sampled spectrum.
ComplexField angular_spectrum(const ComplexField& field, const PropagationPlan& plan,
                              PropagationReport* report = nullptr);

/// Displayed phase per panel pixel after quantization and crosstalk blur.
std::vector<double> effective_phase(const SlmModel& slm);

/// sqrt(eta_r) [sqrt(eta_d) E exp(i phi) + sqrt(1 - eta_d) E] for samples
/// on the panel, zero off the panel. The incident grid must put samples on
/// pixel centres at the panel pitch unless allow_resampling is set.
ComplexField apply_slm(const ComplexField& incident, const SlmModel& slm);
/// Same, reusing a precomputed effective_phase(slm).
ComplexField apply_slm(const ComplexField& incident, const SlmModel& slm, const std::vector<double>& phase);

/// Hard circular iris.
ComplexField select_order(const ComplexField& field, Vec2 center, double radius);

/// |u|^2 on the field's grid, optionally scaled to peak 1.
RealImage intensity_image(const ComplexField& field, bool normalize_peak = false);

/// Power ratio. Throws InvalidArgument for non-positive input power and
/// PhysicsGuardError if the ratio exceeds 1 + 1e-9.
double conversion_efficiency(double output_power, double input_power);

/// Intensity-weighted centroid, optionally restricted to a disk.
Vec2 centroid(const RealImage& image, std::optional<Vec2> disk_center = std::nullopt, double disk_radius = 0.0);
/// sqrt(2 <r^2>) about `center`: the 1/e^2 radius for a Gaussian.
double second_moment_radius(const RealImage& image, Vec2 center, double disk_radius = 0.0);
/// 2 sqrt(<(x - cx)^2>): the 1/e^2 radius of a Gaussian along x.
double second_moment_width_x(const RealImage& image);

/// Power of the field inside the disk.
double power_in_disk(const ComplexField& field, Vec2 center, double radius);
/// Power of the field with |x - x_center| < half_width.
double power_in_band(const ComplexField& field, double x_center, double half_width);

/// Far-field power of diffraction order m of a grating with the given period
/// along x: spectral power whose fx period rounds to m, from a
/// zero-padded FFT. Same units as power(field).
double far_field_order_power(const ComplexField& field, double period, int order, int padding_factor = 2);

}  // namespace sqzmode::optics
