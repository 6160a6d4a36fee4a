#include "sqzmode/analysis.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>

#include "sqzmode/error.hpp"
#include "sqzmode/image_io.hpp"

namespace sqzmode::analysis {
namespace {

struct FitProblem {
  const std::vector<double>* x;
  const std::vector<double>* measured;
  const ModeSpec* spec;
  double w0;
};

// Sum of squared residuals with the scale solved exactly.
double projected_cost(const FitProblem& fp, double width, double center, double* scale_out) {
  const auto& x = *fp.x;
  const auto& m = *fp.measured;
  std::vector<double> g(x.size());
  double mg = 0.0, gg = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    g[k] = profile_intensity(*fp.spec, (x[k] - center) * fp.w0 / width);
    mg += m[k] * g[k];
    gg += g[k] * g[k];
  }
  const double scale = gg > 0.0 ? std::max(0.0, mg / gg) : 0.0;
  double ss = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double r = m[k] - scale * g[k];
    ss += r * r;
  }
  if (scale_out != nullptr) *scale_out = scale;
  return ss;
}

double gsl_cost(const gsl_vector* v, void* params) {
  const auto& fp = *static_cast<const FitProblem*>(params);
  const double log_w = gsl_vector_get(v, 0);
  if (std::abs(log_w) > 20.0) return 1e300;
  return projected_cost(fp, fp.w0 * std::exp(log_w), gsl_vector_get(v, 1) * fp.w0, nullptr);
}

struct MinimizerDeleter {
  void operator()(gsl_multimin_fminimizer* s) const noexcept { gsl_multimin_fminimizer_free(s); }
};
struct VectorDeleter {
  void operator()(gsl_vector* v) const noexcept { gsl_vector_free(v); }
};

void silence_gsl() {
  static std::once_flag once;
  std::call_once(once, [] { gsl_set_error_handler_off(); });
}

RealImage mode_intensity_on(const GridSpec& grid, const ModeSpec& spec) {
  RealImage img(grid);
  for (std::size_t j = 0; j < grid.ny; ++j) {
    for (std::size_t i = 0; i < grid.nx; ++i) img.at(i, j) = std::norm(sample_mode(spec, grid.x(i), grid.y(j)));
  }
  return img;
}

Vec2 image_centroid(const RealImage& image) {
  const GridSpec& g = image.grid;
  double sw = 0.0, sx = 0.0, sy = 0.0;
  for (std::size_t j = 0; j < g.ny; ++j) {
    for (std::size_t i = 0; i < g.nx; ++i) {
      const double w = image.at(i, j);
      sw += w;
      sx += w * g.x(i);
      sy += w * g.y(j);
    }
  }
  if (!(sw > 0.0)) return g.center;
  return Vec2{sx / sw, sy / sw};
}

}  // namespace

LineSection extract_cross_section(const RealImage& image, double angle, std::size_t samples) {
  if (image.values.empty()) throw InvalidArgument("cross section of an empty image");
  const Vec2 c = image_centroid(image);
  const double half = 0.5 * std::min(image.grid.extent_x(), image.grid.extent_y());
  const Vec2 d{std::cos(angle) * half, std::sin(angle) * half};
  return extract_cross_section(image, Vec2{c.x - d.x, c.y - d.y}, Vec2{c.x + d.x, c.y + d.y}, samples);
}

LineSection extract_cross_section(const RealImage& image, Vec2 start, Vec2 end, std::size_t samples) {
  if (image.values.empty()) throw InvalidArgument("cross section of an empty image");
  const double length = std::hypot(end.x - start.x, end.y - start.y);
  if (!(length > 0.0)) throw InvalidArgument("cross section endpoints coincide");
  if (samples == 0) {
    const double step = std::min(image.grid.dx, image.grid.dy);
    samples = static_cast<std::size_t>(std::ceil(length / step)) + 1;
  }
  samples = std::max<std::size_t>(samples, 8);
  LineSection s{std::vector<double>(samples), std::vector<double>(samples), start, end};
  for (std::size_t k = 0; k < samples; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(samples - 1);
    s.coordinates[k] = (t - 0.5) * length;
    s.samples[k] = std::max(0.0, image.sample(start.x + t * (end.x - start.x), start.y + t * (end.y - start.y)));
  }
  return s;
}

double asymmetry(const LineSection& section) {
  const auto& s = section.samples;
  double diff = 0.0, total = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    diff += std::abs(s[k] - s[s.size() - 1 - k]);
    total += s[k];
  }
  return total > 0.0 ? diff / total : 0.0;
}

double profile_intensity(const ModeSpec& spec, double s) { return std::norm(sample_mode(spec, s, 0.0)); }

FitResult fit_profile(const LineSection& section, const ModeSpec& spec, const FitOptions& options) {
  validate(spec);
  if (section.samples.size() != section.coordinates.size() || section.samples.size() < 8) {
    throw InvalidArgument("line section needs at least 8 samples with matching coordinates");
  }
  if (options.width_seeds.empty()) throw InvalidArgument("fit needs at least one width seed");
  silence_gsl();

  std::vector<double> measured(section.samples.size());
  double sw = 0.0, sx = 0.0, peak = 0.0;
  for (std::size_t k = 0; k < measured.size(); ++k) {
    measured[k] = section.samples[k] - options.background;
    peak = std::max(peak, std::abs(measured[k]));
    sw += std::max(0.0, measured[k]);
    sx += std::max(0.0, measured[k]) * section.coordinates[k];
  }
  const double w0 = mode_waist(spec);
  const double c0 = sw > 0.0 ? sx / sw : 0.0;
  FitProblem fp{&section.coordinates, &measured, &spec, w0};

  FitResult best;
  double best_cost = std::numeric_limits<double>::infinity();
  int total_iterations = 0;
  for (double seed : options.width_seeds) {
    if (!(seed > 0.0)) throw InvalidArgument("width seeds must be positive");
    std::unique_ptr<gsl_multimin_fminimizer, MinimizerDeleter> s(
        gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 2));
    std::unique_ptr<gsl_vector, VectorDeleter> x(gsl_vector_alloc(2));
    std::unique_ptr<gsl_vector, VectorDeleter> step(gsl_vector_alloc(2));
    gsl_vector_set(x.get(), 0, std::log(seed));
    gsl_vector_set(x.get(), 1, c0 / w0);
    gsl_vector_set_all(step.get(), 0.1);
    gsl_multimin_function fn{&gsl_cost, 2, &fp};
    bool converged = false;
    int it = 0;
    // One restart from the converged point guards against a collapsed simplex.
    for (int round = 0; round < 2; ++round) {
      gsl_multimin_fminimizer_set(s.get(), &fn, x.get(), step.get());
      converged = false;
      while (it < options.max_iterations) {
        ++it;
        if (gsl_multimin_fminimizer_iterate(s.get()) != GSL_SUCCESS) break;
        if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s.get()), options.tolerance) == GSL_SUCCESS) {
          converged = true;
          break;
        }
      }
      gsl_vector_memcpy(x.get(), gsl_multimin_fminimizer_x(s.get()));
      gsl_vector_set_all(step.get(), 1e-3);
    }
    total_iterations += it;
    const double cost = gsl_multimin_fminimizer_minimum(s.get());
    // Starts that reach the same minimum differ only by roundoff in cost.
    const double slack = std::isfinite(best_cost) ? 1e-12 * best_cost : 0.0;
    if (!std::isfinite(best_cost) || cost < best_cost - slack ||
        (cost <= best_cost + slack && converged && !best.converged)) {
      best_cost = cost;
      best.width = w0 * std::exp(gsl_vector_get(x.get(), 0));
      best.center = gsl_vector_get(x.get(), 1) * w0;
      best.converged = converged;
    }
  }
  projected_cost(fp, best.width, best.center, &best.scale);
  best.iterations = total_iterations;
  const double n = static_cast<double>(measured.size());
  best.residual = peak > 0.0 ? std::sqrt(best_cost / n) / peak : 0.0;
  return best;
}

std::vector<double> fitted_curve(const LineSection& section, const ModeSpec& spec, const FitResult& fit) {
  const double w0 = mode_waist(spec);
  std::vector<double> out(section.coordinates.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = fit.scale * profile_intensity(spec, (section.coordinates[k] - fit.center) * w0 / fit.width);
  }
  return out;
}

void write_fit_csv(const std::filesystem::path& path, const LineSection& section, const ModeSpec& spec,
                   const FitResult& fit) {
  const auto curve = fitted_curve(section, spec, fit);
  std::vector<CsvRow> rows;
  for (std::size_t k = 0; k < curve.size(); ++k) {
    rows.push_back({format_double(section.coordinates[k]), format_double(section.samples[k]), format_double(curve[k])});
  }
  write_csv(path, {"coordinate_m", "measured", "fitted"}, rows);
}

double fidelity(const ComplexField& a, const ComplexField& b) {
  const Complex ab = mode_overlap(a, b);
  const double pa = power(a);
  const double pb = power(b);
  if (!(pa > 0.0) || !(pb > 0.0)) throw InvalidArgument("fidelity of a zero field");
  return std::clamp(std::norm(ab) / (pa * pb), 0.0, 1.0);
}

double fidelity(const ComplexField& field, const ModeSpec& spec) {
  return fidelity(field, evaluate_mode(spec, field.grid(), field.wavelength()));
}

double fidelity(const RealImage& a, const RealImage& b) {
  if (!(a.grid == b.grid)) throw GridMismatch("intensity images are sampled on different grids");
  double sa = 0.0, sb = 0.0, cross = 0.0;
  for (std::size_t k = 0; k < a.values.size(); ++k) {
    if (a.values[k] < 0.0 || b.values[k] < 0.0) throw InvalidArgument("intensities must be >= 0");
    sa += a.values[k];
    sb += b.values[k];
    cross += std::sqrt(a.values[k] * b.values[k]);
  }
  if (!(sa > 0.0) || !(sb > 0.0)) throw InvalidArgument("fidelity of an all-zero image");
  return std::clamp(cross / std::sqrt(sa * sb), 0.0, 1.0);
}

double fidelity(const RealImage& image, const ModeSpec& spec) {
  validate(spec);
  return fidelity(image, mode_intensity_on(image.grid, spec));
}

std::vector<double> radial_profile(const RealImage& image, Vec2 center, double max_radius) {
  const GridSpec& g = image.grid;
  const double bin = g.dx;
  std::vector<double> sum;
  std::vector<double> count;
  for (std::size_t j = 0; j < g.ny; ++j) {
    const double dy = g.y(j) - center.y;
    for (std::size_t i = 0; i < g.nx; ++i) {
      const double r = std::hypot(g.x(i) - center.x, dy);
      if (max_radius > 0.0 && r >= max_radius) continue;
      const auto k = static_cast<std::size_t>(r / bin);
      if (k >= sum.size()) {
        sum.resize(k + 1, 0.0);
        count.resize(k + 1, 0.0);
      }
      sum[k] += image.at(i, j);
      count[k] += 1.0;
    }
  }
  std::vector<double> out;
  for (std::size_t k = 0; k < sum.size(); ++k) {
    if (count[k] == 0.0) break;  // past the largest fully sampled radius
    out.push_back(sum[k] / count[k]);
  }
  return out;
}

RingCount count_rings(const RealImage& image, std::optional<Vec2> center, double max_radius) {
  const Vec2 c = center.value_or(image_centroid(image));
  const auto profile = radial_profile(image, c, max_radius);
  RingCount out;
  if (profile.size() < 3) return out;
  const double peak = *std::max_element(profile.begin(), profile.end());
  if (!(peak > 0.0)) return out;
  std::vector<double> left_max(profile.size());
  std::vector<double> right_max(profile.size());
  left_max[0] = profile[0];
  for (std::size_t k = 1; k < profile.size(); ++k) left_max[k] = std::max(left_max[k - 1], profile[k]);
  right_max.back() = profile.back();
  for (std::size_t k = profile.size() - 1; k-- > 0;) right_max[k] = std::max(right_max[k + 1], profile[k]);

  for (std::size_t k = 1; k + 1 < profile.size(); ++k) {
    const double p = profile[k];
    if (!(p < profile[k - 1] && p <= profile[k + 1])) continue;
    const double rel = p / peak;
    if (left_max[k - 1] - p < 0.02 * peak || right_max[k + 1] - p < 0.02 * peak) continue;
    if (rel >= 0.025 && rel <= 0.10) out.low_confidence = true;
    if (rel < 0.05) {
      ++out.rings;
      out.radii.push_back((static_cast<double>(k) + 0.5) * image.grid.dx);
    }
  }
  return out;
}

bool central_null(const RealImage& image, std::optional<Vec2> center, double threshold) {
  const Vec2 c = center.value_or(image_centroid(image));
  const auto profile = radial_profile(image, c);
  if (profile.empty()) return false;
  const double peak = *std::max_element(profile.begin(), profile.end());
  return peak > 0.0 && profile.front() < threshold * peak;
}

}  // namespace sqzmode::analysis
