#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>

#include "oracles.hpp"
#include "sqzmode/error.hpp"
#include "sqzmode/fft.hpp"
#include "sqzmode/hologram.hpp"
#include "sqzmode/modes.hpp"
#include "sqzmode/propagation.hpp"

using namespace sqzmode;
using namespace sqzmode::optics;

namespace {

constexpr double kLambda = 1558e-9;
constexpr double kPitch = 8e-6;

GridSpec default_grid() { return GridSpec::square(1024, kPitch); }

ComplexField gaussian(double w0, const GridSpec& g = default_grid()) { return evaluate_mode(Gauss{w0}, g, kLambda); }

ComplexField with_tilt(ComplexField f, double period) {
  const GridSpec& g = f.grid();
  for (std::size_t j = 0; j < g.ny; ++j) {
    for (std::size_t i = 0; i < g.nx; ++i) f.at(i, j) *= std::polar(1.0, 2 * oracle::pi * g.x(i) / period);
  }
  return f;
}

// sqrt(2 <r^2>) about the intensity centroid, computed here rather than
// through the library's moment helpers.
double moment_radius(const ComplexField& f) {
  const GridSpec& g = f.grid();
  double s = 0, sx = 0, sy = 0;
  for (std::size_t j = 0; j < g.ny; ++j) {
    for (std::size_t i = 0; i < g.nx; ++i) {
      const double p = std::norm(f.at(i, j));
      s += p;
      sx += p * g.x(i);
      sy += p * g.y(j);
    }
  }
  const double cx = sx / s, cy = sy / s;
  double sr = 0;
  for (std::size_t j = 0; j < g.ny; ++j) {
    for (std::size_t i = 0; i < g.nx; ++i) {
      sr += std::norm(f.at(i, j)) * (std::pow(g.x(i) - cx, 2) + std::pow(g.y(j) - cy, 2));
    }
  }
  return std::sqrt(2 * sr / s);
}

std::shared_ptr<holo::Hologram> grating_hologram(const holo::SlmGeometry& geo, int period) {
  const auto z = holo::PhaseMap::zeros(geo);
  return std::make_shared<holo::Hologram>(
      holo::compose(z, holo::blazed_grating(period, geo), z, holo::ApertureMask::all_ones(geo)));
}

holo::SlmGeometry strip_geometry(std::size_t w, std::size_t h) {
  holo::SlmGeometry g;
  g.width_px = w;
  g.height_px = h;
  return g;
}

double relative_difference(const ComplexField& a, const ComplexField& b) {
  double num = 0, den = 0;
  for (std::size_t k = 0; k < a.samples().size(); ++k) {
    num += std::norm(a.samples()[k] - b.samples()[k]);
    den += std::norm(b.samples()[k]);
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST(AngularSpectrum, ZeroDistanceIsIdentity) {
  const ComplexField f = with_tilt(gaussian(0.7e-3), 300e-6);
  PropagationPlan plan;
  plan.distance = 0.0;
  const ComplexField out = angular_spectrum(f, plan);
  ASSERT_EQ(out.grid(), f.grid());
  for (std::size_t k = 0; k < f.samples().size(); ++k) EXPECT_EQ(out.samples()[k], f.samples()[k]);
}

TEST(AngularSpectrum, GaussianWaistFollowsBeamFormula) {
  const double w0 = 1.32e-3;
  const ComplexField f = gaussian(w0);
  const double zr = oracle::rayleigh_length(w0, kLambda);
  EXPECT_NEAR(zr, 3.51, 0.01);
  for (double frac : {0.0, 0.128, 0.25, 0.5, 0.75, 1.0}) {
    PropagationPlan plan;
    plan.distance = frac * zr;
    const double w = moment_radius(angular_spectrum(f, plan));
    EXPECT_NEAR(w / oracle::gaussian_waist(w0, kLambda, plan.distance), 1.0, 0.01) << "z/zR=" << frac;
  }
}

TEST(AngularSpectrum, TiltedBeamLandsAtGratingAngle) {
  const double period = 280e-6;
  const ComplexField f = with_tilt(gaussian(0.5e-3), period);
  PropagationPlan plan;
  plan.distance = 0.45;
  const RealImage img = intensity_image(angular_spectrum(f, plan));
  const Vec2 c = centroid(img);
  const double expected = oracle::order_offset(1, kLambda, period, 0.45);
  EXPECT_NEAR(expected, 2.504e-3, 1e-6);
  EXPECT_NEAR(c.x / expected, 1.0, 0.01);
  EXPECT_NEAR(c.y, 0.0, 1e-9);
}

TEST(AngularSpectrum, ConservesPowerOfBandLimitedField) {
  const ComplexField f = with_tilt(gaussian(0.5e-3), 400e-6);
  PropagationPlan plan;
  plan.distance = 0.45;
  PropagationReport report;
  const ComplexField out = angular_spectrum(f, plan, &report);
  EXPECT_LT(std::abs(power(out) / power(f) - 1.0), 1e-10);
  EXPECT_EQ(report.evanescent_fraction, 0.0);
  EXPECT_TRUE(report.warnings.empty());
}

TEST(AngularSpectrum, ComposesOverDistance) {
  const ComplexField f = with_tilt(gaussian(0.5e-3), 700e-6);
  PropagationPlan a, b, ab;
  a.distance = 0.1;
  b.distance = 0.2;
  ab.distance = 0.3;
  const ComplexField two_step = angular_spectrum(angular_spectrum(f, a), b);
  const ComplexField one_step = angular_spectrum(f, ab);
  EXPECT_LT(relative_difference(two_step, one_step), 1e-8);
}

TEST(AngularSpectrum, EvanescentComponentsDecay) {
  // Sub-wavelength sampling admits spatial frequencies beyond 1/lambda.
  const GridSpec g = GridSpec::square(128, 0.5e-6);
  ComplexField f(g, kLambda);
  for (std::size_t j = 0; j < g.ny; ++j) {
    for (std::size_t i = 0; i < g.nx; ++i) {
      // 0.35 cycles per sample is 7e5 / m, beyond 1 / lambda = 6.4e5 / m.
      const double env = std::exp(-(std::pow(g.x(i), 2) + std::pow(g.y(j), 2)) / std::pow(12e-6, 2));
      f.at(i, j) = env * (1.0 + std::cos(2 * oracle::pi * 0.35 * static_cast<double>(i)));
    }
  }
  PropagationPlan plan;
  plan.distance = 5e-6;
  plan.band_limit = false;
  PropagationReport report;
  const ComplexField out = angular_spectrum(f, plan, &report);
  EXPECT_GT(report.evanescent_fraction, 0.1);
  EXPECT_LT(power(out), power(f) * (1.0 - 0.9 * report.evanescent_fraction));
}

TEST(AngularSpectrum, AliasedFieldTripsGuard) {
  const GridSpec g = GridSpec::square(64, kPitch);
  std::vector<Complex> noise(g.size());
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  for (auto& s : noise) s = Complex{n(rng), n(rng)};
  PropagationPlan plan;
  EXPECT_THROW(angular_spectrum(ComplexField(g, kLambda, noise), plan), PhysicsGuardError);
}

TEST(AngularSpectrum, RejectsInvalidPlans) {
  const ComplexField f = gaussian(0.5e-3, GridSpec::square(64, 40e-6));
  PropagationPlan plan;
  plan.distance = -1.0;
  EXPECT_THROW(angular_spectrum(f, plan), InvalidArgument);
  plan.distance = 0.1;
  plan.padding_factor = 0;
  EXPECT_THROW(angular_spectrum(f, plan), InvalidArgument);
  plan.padding_factor = 2;
  plan.wavelength = 1064e-9;
  EXPECT_THROW(angular_spectrum(f, plan), InvalidArgument);
}

TEST(ApplySlm, LosslessFlatHologramIsIdentity) {
  const holo::SlmGeometry geo;
  const auto z = holo::PhaseMap::zeros(geo);
  SlmModel slm;
  slm.hologram = std::make_shared<holo::Hologram>(holo::compose(z, z, z, holo::ApertureMask::all_ones(geo)));
  slm.eta_d = 1.0;
  slm.eta_r = 1.0;
  const ComplexField f = gaussian(1.32e-3);
  const ComplexField out = apply_slm(f, slm);
  for (std::size_t k = 0; k < f.samples().size(); ++k) EXPECT_EQ(out.samples()[k], f.samples()[k]);
}

TEST(ApplySlm, SpecularOnlyKeepsReflectivity) {
  const holo::SlmGeometry geo;
  SlmModel slm;
  slm.hologram = grating_hologram(geo, 35);
  slm.eta_d = 0.0;
  const ComplexField f = gaussian(1.32e-3);
  EXPECT_NEAR(power(apply_slm(f, slm)) / power(f), slm.eta_r, 1e-12);
}

TEST(ApplySlm, PerPixelPowerMatchesClosedForm) {
  const holo::SlmGeometry geo;
  const auto mode = holo::mode_phase_pattern(LaguerreGauss{2, 1, 0.3e-3}, geo, holo::TargetPlane::fourier);
  SlmModel slm;
  slm.hologram = std::make_shared<holo::Hologram>(holo::compose(
      mode, holo::blazed_grating(35, geo), holo::lens_phase(0.45, geo), holo::circular_aperture(540.0, geo)));
  const auto phase = effective_phase(slm);
  const ComplexField f = gaussian(1.32e-3);
  const ComplexField out = apply_slm(f, slm, phase);
  const double ed = slm.eta_d, er = slm.eta_r;
  const GridSpec& g = f.grid();
  for (std::size_t j = 0; j < g.ny; j += 3) {
    for (std::size_t i = 0; i < g.nx; i += 3) {
      const double in = std::norm(f.at(i, j));
      if (in == 0.0) continue;
      const std::size_t u = i + geo.width_px / 2 - g.nx / 2;
      const std::size_t v = j + geo.height_px / 2 - g.ny / 2;
      const double phi = phase[v * geo.width_px + u];
      const double ratio = er * (ed + (1 - ed) + 2 * std::sqrt(ed * (1 - ed)) * std::cos(phi));
      EXPECT_NEAR(std::norm(out.at(i, j)) / in, ratio, 1e-12);
    }
  }
}

TEST(ApplySlm, GridMustSitOnPixelCentres) {
  const holo::SlmGeometry geo;
  SlmModel slm;
  slm.hologram = grating_hologram(geo, 35);
  const ComplexField off = gaussian(1.32e-3, GridSpec::square(512, 7e-6));
  EXPECT_THROW(apply_slm(off, slm), GridMismatch);
  slm.allow_resampling = true;
  EXPECT_NO_THROW(apply_slm(off, slm));
  slm.eta_d = 1.5;
  EXPECT_THROW(apply_slm(gaussian(1.32e-3), slm), InvalidArgument);
}

TEST(ApplySlm, FirstOrderPowerIsDeviceTimesGratingEfficiency) {
  // Plane wave over many whole periods; far-field power in the +1 order.
  const int period = 35;
  const holo::SlmGeometry geo = strip_geometry(35 * 64, 8);
  SlmModel slm;
  slm.hologram = grating_hologram(geo, period);
  const ComplexField in(geo.grid(), kLambda, std::vector<Complex>(geo.size(), 1.0));
  const ComplexField out = apply_slm(in, slm);
  std::vector<Complex> spectrum(out.samples().begin(), out.samples().end());
  fft2d(spectrum, geo.width_px, geo.height_px, FftDirection::forward);
  const double n = static_cast<double>(geo.size());
  const double first = std::norm(spectrum[geo.width_px / period]) / (n * n);

  const double eta_g = oracle::first_order_fraction(oracle::blurred_sawtooth(period, 256, 0.7));
  EXPECT_NEAR(eta_g, 0.91, 0.03);
  EXPECT_NEAR(first, slm.eta_d * slm.eta_r * eta_g, 2e-3);
  EXPECT_NEAR(first, 0.50, 0.03);
}

TEST(ApplySlm, FarFieldOrdersSitAtGratingFrequencies) {
  const int period = 35;
  const holo::SlmGeometry geo = strip_geometry(1024, 4);
  SlmModel slm;
  slm.hologram = grating_hologram(geo, period);
  const ComplexField in(geo.grid(), kLambda, std::vector<Complex>(geo.size(), 1.0));
  const ComplexField out = apply_slm(in, slm);
  std::vector<Complex> spectrum(out.samples().begin(), out.samples().end());
  fft2d(spectrum, geo.width_px, geo.height_px, FftDirection::forward);
  const double bins_per_order = static_cast<double>(geo.width_px) / period;
  for (int m : {-1, 0, 1, 2}) {
    const double expected = m * bins_per_order;
    long best = 0;
    double best_p = -1.0;
    for (long b = std::lround(expected - bins_per_order / 2); b <= std::lround(expected + bins_per_order / 2); ++b) {
      const auto idx = static_cast<std::size_t>((b + 4096) % 1024);
      if (std::norm(spectrum[idx]) > best_p) {
        best_p = std::norm(spectrum[idx]);
        best = b;
      }
    }
    EXPECT_LE(std::abs(static_cast<double>(best) - expected), 1.0) << "order " << m;
    // Frequency of the bin against the grating equation sin(theta) = m lambda / Lambda.
    const double fx = static_cast<double>(best) / (1024 * kPitch);
    EXPECT_NEAR(fx * kLambda, m * kLambda / (period * kPitch), kLambda / (1024 * kPitch));
  }
}

TEST(FarField, OrderPowerMatchesDirectSpectrum) {
  const int period = 35;
  const holo::SlmGeometry geo = strip_geometry(35 * 64, 8);
  SlmModel slm;
  slm.hologram = grating_hologram(geo, period);
  const ComplexField in(geo.grid(), kLambda, std::vector<Complex>(geo.size(), 1.0));
  const ComplexField out = apply_slm(in, slm);
  const double eta_g = oracle::first_order_fraction(oracle::blurred_sawtooth(period, 256, 0.7));
  // The oracle is periodic; the panel blur clamps at the strip ends.
  EXPECT_NEAR(far_field_order_power(out, period * kPitch, 1, 1) / power(in), slm.eta_d * slm.eta_r * eta_g, 2e-3);
  double orders = 0.0;
  for (int m = -17; m <= 17; ++m) orders += far_field_order_power(out, period * kPitch, m, 1);
  EXPECT_NEAR(orders / power(out), 1.0, 1e-12);
}

TEST(FarField, TiltedGaussianIsOneOrder) {
  const double period = 35 * kPitch;
  const ComplexField f = with_tilt(gaussian(1.32e-3), period);
  EXPECT_NEAR(far_field_order_power(f, period, 1) / power(f), 1.0, 1e-9);
  EXPECT_LT(far_field_order_power(f, period, 0) / power(f), 1e-9);
  EXPECT_THROW(far_field_order_power(f, 0.0, 1), InvalidArgument);
  EXPECT_THROW(far_field_order_power(f, period, 1, 0), InvalidArgument);
}

TEST(SelectOrder, FullMaskIsIdentityAndPowerNeverGrows) {
  const ComplexField f = gaussian(1.32e-3);
  const ComplexField all = select_order(f, Vec2{}, 1.0);
  for (std::size_t k = 0; k < f.samples().size(); ++k) EXPECT_EQ(all.samples()[k], f.samples()[k]);
  for (double r : {1e-4, 5e-4, 1e-3, 3e-3}) EXPECT_LE(power(select_order(f, Vec2{1e-3, -2e-4}, r)), power(f));
  EXPECT_THROW(select_order(f, Vec2{}, 0.0), InvalidArgument);
}

TEST(SelectOrder, IrisAtFirstOrderCapturesIt) {
  const holo::SlmGeometry geo;
  SlmModel slm;
  slm.hologram = grating_hologram(geo, 35);
  const double w0 = 1.32e-3;
  const ComplexField in = gaussian(w0);
  PropagationPlan plan;
  const ComplexField det = angular_spectrum(apply_slm(in, slm), plan);
  const double x1 = oracle::order_offset(1, kLambda, 35 * kPitch, 0.45);
  const double eta_g = oracle::first_order_fraction(oracle::blurred_sawtooth(35, 256, 0.7));
  const double w = oracle::gaussian_waist(w0, kLambda, 0.45);
  const double r = 1e-3;
  const double expected = slm.eta_d * slm.eta_r * eta_g * (1 - std::exp(-2 * r * r / (w * w)));
  const double captured = power_in_disk(det, Vec2{x1, 0.0}, r) / power(in);
  EXPECT_NEAR(captured / expected, 1.0, 0.05);
  // Specular light alone (the zeroth order) barely reaches the iris.
  slm.eta_d = 0.0;
  const ComplexField zeroth = angular_spectrum(apply_slm(in, slm), plan);
  EXPECT_LT(power_in_disk(zeroth, Vec2{x1, 0.0}, r) / power(in), 0.02 * captured);
}

TEST(Intensity, PhaseOnlyChangesDoNotMatter) {
  const ComplexField f = gaussian(1.32e-3);
  const RealImage a = intensity_image(f);
  const RealImage b = intensity_image(with_tilt(f, 123e-6));
  for (std::size_t k = 0; k < a.values.size(); ++k) EXPECT_NEAR(a.values[k], b.values[k], 1e-12 * a.values[k] + 1e-300);
  double sum = 0;
  for (double v : a.values) sum += v;
  EXPECT_NEAR(sum * a.grid.cell_area(), 1.0, 1e-12);
  const RealImage peak = intensity_image(f, true);
  EXPECT_DOUBLE_EQ(*std::max_element(peak.values.begin(), peak.values.end()), 1.0);
}

TEST(Intensity, LG11HasCentralNull) {
  const ComplexField f = evaluate_mode(LaguerreGauss{1, 1, 1.32e-3}, default_grid(), kLambda);
  const RealImage img = intensity_image(f, true);
  EXPECT_LE(img.at(512, 512), 1e-6);
}

TEST(Power, NormalizedAndScaled) {
  ComplexField f = gaussian(1.32e-3);
  EXPECT_NEAR(power(f), 1.0, 1e-12);
  for (auto& s : f.samples()) s *= 2.0;
  EXPECT_NEAR(power(f), 4.0, 4e-12);
}

TEST(ConversionEfficiency, RatioAndGuards) {
  EXPECT_EQ(conversion_efficiency(1.0, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(conversion_efficiency(0.25, 0.5), 0.5);
  EXPECT_NO_THROW(conversion_efficiency(1.0 + 5e-10, 1.0));
  EXPECT_THROW(conversion_efficiency(1.1, 1.0), PhysicsGuardError);
  EXPECT_THROW(conversion_efficiency(0.5, 0.0), InvalidArgument);
}
