#pragma once

#include <memory>
#include <string>
#include <variant>

#include "sqzmode/diagnostics.hpp"
#include "sqzmode/field.hpp"
#include "sqzmode/image_io.hpp"

namespace sqzmode {

struct Gauss {
  double w0 = 0.0;
};

struct LaguerreGauss {
  int p = 0;  // radial index
  int l = 0;  // helical index
  double w0 = 0.0;
};

struct BesselGauss {
  int n = 0;
  double k_r = 0.0;  // radial wavenumber, 1/m
  double w0 = 0.0;   // Gaussian envelope waist
};

/// Intensity target taken from an image. The image width spans 4 w0 in the
/// sampled plane (aspect ratio kept), centred on the optical axis.
struct ArbitraryIntensity {
  std::shared_ptr<const IntensityImage> image;
  double w0 = 0.0;
  std::string source;  // where the image came from, for reports
};

using ModeSpec = std::variant<Gauss, LaguerreGauss, BesselGauss, ArbitraryIntensity>;

/// Bessel-Gauss with the default radial wavenumber: first J_0 zero at w0/2.
BesselGauss bessel_gauss(int n, double w0);
double default_radial_wavenumber(double w0);

double mode_waist(const ModeSpec& spec);
/// Short identifier: "Gauss", "LG(1,1)", "BG(1)", "Arbitrary(path)".
std::string describe(const ModeSpec& spec);
/// Same as describe() but with characters unsafe in file names replaced.
std::string file_stem(const ModeSpec& spec);

/// Throws InvalidArgument for a non-positive waist, negative p or n,
/// non-positive k_r, or an empty / negative arbitrary image.
void validate(const ModeSpec& spec);

/// Mode value at (x, y) relative to the optical axis, before numerical
/// normalization. LG carries its analytic normalization constant.
Complex sample_mode(const ModeSpec& spec, double x, double y);

/// Phase of the mode computed directly from the sign of its radial factor
/// and the azimuthal winding, in [0, 2 pi). Well defined on nodal lines,
/// where arg(sample_mode) is not.
double direct_phase(const ModeSpec& spec, double x, double y);

/// Samples the mode at its waist plane on `grid` (axis at x = y = 0) and
/// normalizes to unit power. A grid extent below 4 w0 on either axis is
/// recorded as a warning; below 2 w0 it is an InvalidArgument.
ComplexField evaluate_mode(const ModeSpec& spec, const GridSpec& grid, double wavelength,
                           Diagnostics* diagnostics = nullptr);

/// Copy scaled to unit power. Throws InvalidArgument for a zero field.
ComplexField normalize(const ComplexField& field);

/// Sum conj(a) b dx dy. Throws GridMismatch unless co-registered.
Complex mode_overlap(const ComplexField& a, const ComplexField& b);

}  // namespace sqzmode
