#include "sqzmode/modes.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "sqzmode/error.hpp"
#include "sqzmode/special_functions.hpp"

namespace sqzmode {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double wrap_phase(double phi) {
  double w = std::fmod(phi, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0;
  return w;
}

double factorial_ratio(int p, int l_abs) {
  // p! / (p + |l|)!
  double r = 1.0;
  for (int k = p + 1; k <= p + l_abs; ++k) r /= k;
  return r;
}

double lg_radial(const LaguerreGauss& m, double r) {
  const int la = std::abs(m.l);
  const double s = r / m.w0;
  const double norm = std::sqrt(2.0 * factorial_ratio(m.p, la) / kPi) / m.w0;
  const double rho = std::sqrt(2.0) * s;
  return norm * std::pow(rho, la) * generalized_laguerre(m.p, la, 2.0 * s * s) * std::exp(-s * s);
}

// Image-plane pixel coordinates for an arbitrary target.
double arbitrary_intensity(const ArbitraryIntensity& a, double x, double y) {
  const auto& img = *a.image;
  const double pixel = 4.0 * a.w0 / static_cast<double>(img.width);
  const double fu = x / pixel + 0.5 * static_cast<double>(img.width) - 0.5;
  const double fv = y / pixel + 0.5 * static_cast<double>(img.height) - 0.5;
  if (fu < 0.0 || fv < 0.0 || fu > static_cast<double>(img.width - 1) || fv > static_cast<double>(img.height - 1)) {
    return 0.0;
  }
  auto u0 = static_cast<std::size_t>(fu);
  auto v0 = static_cast<std::size_t>(fv);
  const std::size_t u1 = std::min(u0 + 1, img.width - 1);
  const std::size_t v1 = std::min(v0 + 1, img.height - 1);
  const double tu = fu - static_cast<double>(u0);
  const double tv = fv - static_cast<double>(v0);
  return (1 - tv) * ((1 - tu) * img.at(u0, v0) + tu * img.at(u1, v0)) +
         tv * ((1 - tu) * img.at(u0, v1) + tu * img.at(u1, v1));
}

}  // namespace

double default_radial_wavenumber(double w0) { return 2.0 * kBesselJ0FirstZero / w0; }

BesselGauss bessel_gauss(int n, double w0) { return BesselGauss{n, default_radial_wavenumber(w0), w0}; }

double mode_waist(const ModeSpec& spec) {
  return std::visit([](const auto& m) { return m.w0; }, spec);
}

std::string describe(const ModeSpec& spec) {
  return std::visit(Overloaded{
                        [](const Gauss&) { return std::string("Gauss"); },
                        [](const LaguerreGauss& m) {
                          return "LG(" + std::to_string(m.p) + "," + std::to_string(m.l) + ")";
                        },
                        [](const BesselGauss& m) { return "BG(" + std::to_string(m.n) + ")"; },
                        [](const ArbitraryIntensity& m) { return "Arbitrary(" + m.source + ")"; },
                    },
                    spec);
}

std::string file_stem(const ModeSpec& spec) {
  if (const auto* a = std::get_if<ArbitraryIntensity>(&spec)) {
    std::string stem = std::filesystem::path(a->source).stem().string();
    if (stem.empty()) stem = "image";
    for (char& c : stem) {
      if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
    }
    return "arbitrary_" + stem;
  }
  std::string out;
  for (char c : describe(spec)) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '-') {
      out.push_back(c);
    } else if (c == ',') {
      out.push_back('_');
    }
  }
  return out;
}

void validate(const ModeSpec& spec) {
  const double w0 = mode_waist(spec);
  if (!(w0 > 0.0) || !std::isfinite(w0)) throw InvalidArgument(describe(spec) + ": waist must be positive");
  std::visit(Overloaded{
                 [](const Gauss&) {},
                 [](const LaguerreGauss& m) {
                   if (m.p < 0) throw InvalidArgument("LG radial index must be >= 0");
                   if (m.p > 60 || std::abs(m.l) > 60) throw InvalidArgument("LG indices above 60 are not supported");
                 },
                 [](const BesselGauss& m) {
                   if (m.n < 0) throw InvalidArgument("BG order must be >= 0");
                   if (!(m.k_r > 0.0) || !std::isfinite(m.k_r)) throw InvalidArgument("BG radial wavenumber must be > 0");
                 },
                 [](const ArbitraryIntensity& m) {
                   if (!m.image || m.image->width < 2 || m.image->height < 2 ||
                       m.image->values.size() != m.image->width * m.image->height) {
                     throw InvalidArgument("arbitrary mode needs a non-empty 2-D intensity image");
                   }
                   double total = 0.0;
                   for (double v : m.image->values) {
                     if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidArgument("arbitrary intensity must be >= 0");
                     total += v;
                   }
                   if (total <= 0.0) throw InvalidArgument("arbitrary intensity image is all zero");
                 },
             },
             spec);
}

Complex sample_mode(const ModeSpec& spec, double x, double y) {
  return std::visit(Overloaded{
                        [&](const Gauss& m) {
                          const double s2 = (x * x + y * y) / (m.w0 * m.w0);
                          return Complex(std::sqrt(2.0 / kPi) / m.w0 * std::exp(-s2), 0.0);
                        },
                        [&](const LaguerreGauss& m) {
                          const double r = std::hypot(x, y);
                          const double phi = std::atan2(y, x);
                          return lg_radial(m, r) * std::polar(1.0, m.l * phi);
                        },
                        [&](const BesselGauss& m) {
                          const double r = std::hypot(x, y);
                          const double phi = std::atan2(y, x);
                          const double s = r / m.w0;
                          return bessel_j(m.n, m.k_r * r) * std::exp(-s * s) * std::polar(1.0, m.n * phi);
                        },
                        [&](const ArbitraryIntensity& m) { return Complex(std::sqrt(arbitrary_intensity(m, x, y)), 0.0); },
                    },
                    spec);
}

double direct_phase(const ModeSpec& spec, double x, double y) {
  return std::visit(Overloaded{
                        [](const Gauss&) { return 0.0; },
                        [&](const LaguerreGauss& m) {
                          const double s = std::hypot(x, y) / m.w0;
                          const double lag = generalized_laguerre(m.p, std::abs(m.l), 2.0 * s * s);
                          return wrap_phase(m.l * std::atan2(y, x) + (lag < 0.0 ? kPi : 0.0));
                        },
                        [&](const BesselGauss& m) {
                          const double j = bessel_j(m.n, m.k_r * std::hypot(x, y));
                          return wrap_phase(m.n * std::atan2(y, x) + (j < 0.0 ? kPi : 0.0));
                        },
                        [](const ArbitraryIntensity&) { return 0.0; },
                    },
                    spec);
}

ComplexField evaluate_mode(const ModeSpec& spec, const GridSpec& grid, double wavelength, Diagnostics* diagnostics) {
  validate(spec);
  grid.validate();
  const double w0 = mode_waist(spec);
  const double extent = std::min(grid.extent_x(), grid.extent_y());
  if (extent < 2.0 * w0) {
    std::ostringstream msg;
    msg << describe(spec) << ": grid extent " << extent << " m is below 2 w0 = " << 2.0 * w0 << " m";
    throw InvalidArgument(msg.str());
  }
  if (extent < 4.0 * w0 && diagnostics != nullptr) {
    diagnostics->warn(describe(spec) + ": grid extent is below 4 w0; the mode is truncated");
  }
  ComplexField field(grid, wavelength);
  for (std::size_t j = 0; j < grid.ny; ++j) {
    const double y = grid.y(j);
    for (std::size_t i = 0; i < grid.nx; ++i) field.at(i, j) = sample_mode(spec, grid.x(i), y);
  }
  return normalize(field);
}

ComplexField normalize(const ComplexField& field) {
  const double p = power(field);
  if (!(p > 0.0) || !std::isfinite(p)) throw InvalidArgument("cannot normalize a field with zero power");
  ComplexField out = field;
  const double scale = 1.0 / std::sqrt(p);
  for (auto& s : out.samples()) s *= scale;
  return out;
}

Complex mode_overlap(const ComplexField& a, const ComplexField& b) {
  require_co_registered(a, b);
  Complex sum{};
  const auto sa = a.samples();
  const auto sb = b.samples();
  for (std::size_t k = 0; k < sa.size(); ++k) sum += std::conj(sa[k]) * sb[k];
  return sum * a.grid().cell_area();
}

}  // namespace sqzmode
