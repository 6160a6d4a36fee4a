#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "sqzmode/field.hpp"
#include "sqzmode/modes.hpp"

namespace sqzmode::analysis {

struct LineSection {
  std::vector<double> coordinates;  // metres along the cut, 0 at its midpoint
  std::vector<double> samples;
  Vec2 start;
  Vec2 end;
};

/// Cut through the intensity centroid at `angle` (radians from +x), spanning
/// the image. An all-zero image is cut through the grid centre.
LineSection extract_cross_section(const RealImage& image, double angle = 0.0, std::size_t samples = 0);
/// Cut between explicit endpoints. Throws InvalidArgument for a zero-length cut.
LineSection extract_cross_section(const RealImage& image, Vec2 start, Vec2 end, std::size_t samples = 0);

/// sum |s_i - s_{n-1-i}| / sum s_i; 0 for a mirror-symmetric section.
double asymmetry(const LineSection& section);

struct FitOptions {
  // Starting widths, as multiples of the ModeSpec waist. Each start also seeds
  // the centre at the section's intensity centroid.
  std::vector<double> width_seeds{1.0, 0.5, 2.0, 0.71, 1.41};
  int max_iterations = 4000;  // per start
  double tolerance = 1e-8;    // simplex size in (log width, centre / w0), about sqrt(epsilon)
  double background = 0.0;    // constant offset removed before fitting
};

struct FitResult {
  double scale = 0.0;
  double width = 0.0;   // fitted waist, metres
  double center = 0.0;  // metres along the section
  double residual = 0.0;  // RMS error over the section peak
  int iterations = 0;
  bool converged = false;
};

/// Intensity of the mode along a line through its axis, |u(s, 0)|^2.
double profile_intensity(const ModeSpec& spec, double s);

/// Least squares of measured vs scale * I_spec((x - center) w0 / width).
/// The scale is solved in closed form for each (width, centre); those two
/// are searched with Nelder-Mead from every seed and the best fit is kept.
/// Non-convergence is reported through `converged`, never thrown.
FitResult fit_profile(const LineSection& section, const ModeSpec& spec, const FitOptions& options = {});

/// Fitted curve at the section's coordinates.
std::vector<double> fitted_curve(const LineSection& section, const ModeSpec& spec, const FitResult& fit);

/// CSV with columns coordinate_m, measured, fitted.
void write_fit_csv(const std::filesystem::path& path, const LineSection& section, const ModeSpec& spec,
                   const FitResult& fit);

/// |<a, b>|^2 / (|a|^2 |b|^2). Symmetric and global-phase invariant.
double fidelity(const ComplexField& a, const ComplexField& b);
/// Against the ideal mode sampled on the field's grid about the origin.
double fidelity(const ComplexField& field, const ModeSpec& spec);
/// Bhattacharyya overlap of two intensity maps, each normalized to unit sum.
double fidelity(const RealImage& a, const RealImage& b);
double fidelity(const RealImage& image, const ModeSpec& spec);

/// Azimuthal average in bins of one grid pixel, bin k covering
/// r in [k dx, (k+1) dx). Bins beyond `max_radius` (when > 0) are dropped.
std::vector<double> radial_profile(const RealImage& image, Vec2 center, double max_radius = 0.0);

struct RingCount {
  int rings = 0;
  bool low_confidence = false;
  std::vector<double> radii;  // metres
};

/// Dark rings of the azimuthally averaged profile about `center` (the
/// intensity centroid by default). A ring is a local minimum below 5% of the
/// peak that sits at least 2% of the peak below the profile maxima on both
/// sides. Minima between 2.5% and 10% of the peak flag the count as low
/// confidence.
RingCount count_rings(const RealImage& image, std::optional<Vec2> center = std::nullopt, double max_radius = 0.0);

/// True when the innermost profile bin is below `threshold` of the peak.
bool central_null(const RealImage& image, std::optional<Vec2> center = std::nullopt, double threshold = 0.05);

}  // namespace sqzmode::analysis
