#include "sqzmode/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <string_view>

#include "sqzmode/error.hpp"
#include "sqzmode/image_io.hpp"
#include "sqzmode/special_functions.hpp"

namespace sqzmode::app {
namespace {

// SI value = number * scale, or number / scale for submultiples. Dividing by
// an exact power of ten rounds once, so "1558 nm" reads as the literal 1558e-9.
struct Unit {
  const char* name;
  double scale;
  bool submultiple;

  double to_si(double v) const noexcept { return submultiple ? v / scale : v * scale; }
  double from_si(double v) const noexcept { return submultiple ? v * scale : v / scale; }
};

constexpr Unit kLengthUnits[] = {{"m", 1.0, false},   {"cm", 1e2, true}, {"mm", 1e3, true},
                                 {"um", 1e6, true},   {"µm", 1e6, true}, {"nm", 1e9, true}};
constexpr Unit kWavenumberUnits[] = {{"1/m", 1.0, false}, {"1/mm", 1e3, false}, {"rad/m", 1.0, false}};

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

double parse_number(const std::string& text) {
  double v = 0.0;
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  if (begin != end && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc{} || ptr != end || !std::isfinite(v)) throw ConfigError("not a number: '" + text + "'");
  return v;
}

// Splits "1.32 mm" / "1.32mm" into number and unit text.
std::pair<double, std::string> split_quantity(const std::string& text) {
  const std::string t = trim(text);
  std::size_t k = 0;
  while (k < t.size() && (std::isdigit(static_cast<unsigned char>(t[k])) || t[k] == '.' || t[k] == '-' ||
                          t[k] == '+' || t[k] == 'e' || t[k] == 'E')) {
    // Stop at an exponent marker that is not followed by a digit or sign.
    if ((t[k] == 'e' || t[k] == 'E') &&
        (k + 1 >= t.size() || !(std::isdigit(static_cast<unsigned char>(t[k + 1])) || t[k + 1] == '-' || t[k + 1] == '+'))) {
      break;
    }
    ++k;
  }
  return {parse_number(t.substr(0, k)), trim(t.substr(k))};
}

template <std::size_t N>
double parse_with_units(const std::string& text, const Unit (&units)[N], const char* what) {
  const auto [value, unit] = split_quantity(text);
  if (unit.empty()) throw ConfigError(std::string(what) + " needs an explicit unit: '" + text + "'");
  for (const auto& u : units) {
    if (unit == u.name) return u.to_si(value);
  }
  throw ConfigError(std::string("unknown ") + what + " unit '" + unit + "'");
}

double parse_db(const std::string& text) {
  const auto [value, unit] = split_quantity(text);
  if (unit != "dB" && unit != "db") throw ConfigError("squeezing values need a dB unit: '" + text + "'");
  return value;
}

double parse_px(const std::string& text) {
  const auto [value, unit] = split_quantity(text);
  if (!unit.empty() && unit != "px") throw ConfigError("expected a pixel value: '" + text + "'");
  return value;
}

int parse_int(const std::string& text) {
  const double v = parse_px(text);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError("expected an integer: '" + text + "'");
  return static_cast<int>(v);
}

double parse_plain(const std::string& text) {
  const auto [value, unit] = split_quantity(text);
  if (!unit.empty()) throw ConfigError("expected a dimensionless number: '" + text + "'");
  return value;
}

bool parse_bool(const std::string& text) {
  const std::string t = lower(trim(text));
  if (t == "true" || t == "on" || t == "yes" || t == "1") return true;
  if (t == "false" || t == "off" || t == "no" || t == "0") return false;
  throw ConfigError("expected true or false: '" + text + "'");
}

bool is_keyword(const std::string& text, const char* word) { return lower(trim(text)) == word; }

// Preferred unit if the decimal text reads back exactly, metres otherwise.
std::string format_length(double value, const char* unit) {
  for (const auto& u : kLengthUnits) {
    if (std::string_view(u.name) != unit) continue;
    const double scaled = u.from_si(value);
    char rounded[32];
    std::snprintf(rounded, sizeof rounded, "%.12g", scaled);
    for (const std::string& text : {std::string(rounded), format_double(scaled)}) {
      if (u.to_si(parse_number(text)) == value) return text + " " + unit;
    }
  }
  return format_double(value) + " m";
}

std::string format_wavenumber(double value) { return format_double(value) + " 1/m"; }

std::vector<std::string> split_top_level(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : text) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if ((c == ',' || c == ';') && depth == 0) {
      if (!trim(cur).empty()) out.push_back(trim(cur));
      cur.clear();
      continue;
    }
    cur.push_back(c);
  }
  if (!trim(cur).empty()) out.push_back(trim(cur));
  return out;
}

std::string plane_text(PlaneChoice p) {
  switch (p) {
    case PlaneChoice::automatic:
      return "auto";
    case PlaneChoice::direct:
      return "direct";
    case PlaneChoice::fourier:
      return "fourier";
  }
  return "auto";
}

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"source.waist", [](ExperimentConfig& c, const std::string& v) { c.source_waist = parse_with_units(v, kLengthUnits, "length"); }},
      {"source.squeezing", [](ExperimentConfig& c, const std::string& v) { c.input_squeezing_db = parse_db(v); }},
      {"source.squeezing_uncertainty",
       [](ExperimentConfig& c, const std::string& v) { c.input_squeezing_uncertainty_db = parse_db(v); }},
      {"slm.width_px", [](ExperimentConfig& c, const std::string& v) { c.slm.width_px = static_cast<std::size_t>(parse_int(v)); }},
      {"slm.height_px", [](ExperimentConfig& c, const std::string& v) { c.slm.height_px = static_cast<std::size_t>(parse_int(v)); }},
      {"slm.pixel_pitch", [](ExperimentConfig& c, const std::string& v) { c.slm.pixel_pitch = parse_with_units(v, kLengthUnits, "length"); }},
      {"slm.phase_levels", [](ExperimentConfig& c, const std::string& v) { c.slm.phase_levels = parse_int(v); }},
      {"slm.wavelength",
       [](ExperimentConfig& c, const std::string& v) { c.slm.design_wavelength = parse_with_units(v, kLengthUnits, "length"); }},
      {"slm.eta_d", [](ExperimentConfig& c, const std::string& v) { c.eta_d = parse_plain(v); }},
      {"slm.eta_d_uncertainty", [](ExperimentConfig& c, const std::string& v) { c.eta_d_uncertainty = parse_plain(v); }},
      {"slm.eta_r", [](ExperimentConfig& c, const std::string& v) { c.eta_r = parse_plain(v); }},
      {"slm.eta_r_uncertainty", [](ExperimentConfig& c, const std::string& v) { c.eta_r_uncertainty = parse_plain(v); }},
      {"slm.crosstalk_sigma", [](ExperimentConfig& c, const std::string& v) { c.crosstalk_sigma_px = parse_px(v); }},
      {"hologram.grating_period",
       [](ExperimentConfig& c, const std::string& v) {
         if (is_keyword(v, "none")) {
           c.grating_period_px.reset();
         } else {
           c.grating_period_px = parse_int(v);
         }
       }},
      {"hologram.lens_focal_length",
       [](ExperimentConfig& c, const std::string& v) {
         c.lens_enabled = true;
         c.lens_focal_length.reset();
         if (is_keyword(v, "none")) {
           c.lens_enabled = false;
         } else if (!is_keyword(v, "auto")) {
           c.lens_focal_length = parse_with_units(v, kLengthUnits, "length");
         }
       }},
      {"hologram.aperture_radius",
       [](ExperimentConfig& c, const std::string& v) {
         if (is_keyword(v, "none")) {
           c.aperture_radius_px.reset();
         } else {
           c.aperture_radius_px = parse_px(v);
         }
       }},
      {"mode.spec", [](ExperimentConfig& c, const std::string& v) { c.mode = parse_mode_token(v); }},
      {"mode.target_plane",
       [](ExperimentConfig& c, const std::string& v) {
         const std::string t = lower(trim(v));
         if (t == "auto") {
           c.target_plane = PlaneChoice::automatic;
         } else if (t == "direct") {
           c.target_plane = PlaneChoice::direct;
         } else if (t == "fourier") {
           c.target_plane = PlaneChoice::fourier;
         } else {
           throw ConfigError("target_plane must be auto, direct or fourier");
         }
       }},
      {"mode.target_waist",
       [](ExperimentConfig& c, const std::string& v) {
         c.target_waist = is_keyword(v, "auto") ? std::nullopt
                                                : std::optional<double>(parse_with_units(v, kLengthUnits, "length"));
       }},
      {"mode.bessel_waist",
       [](ExperimentConfig& c, const std::string& v) {
         c.bessel_waist = is_keyword(v, "auto") ? std::nullopt
                                                : std::optional<double>(parse_with_units(v, kLengthUnits, "length"));
       }},
      {"mode.bessel_kr",
       [](ExperimentConfig& c, const std::string& v) {
         c.bessel_kr = is_keyword(v, "auto") ? std::nullopt
                                             : std::optional<double>(parse_with_units(v, kWavenumberUnits, "wavenumber"));
       }},
      {"propagation.distance",
       [](ExperimentConfig& c, const std::string& v) { c.distance = parse_with_units(v, kLengthUnits, "length"); }},
      {"propagation.padding", [](ExperimentConfig& c, const std::string& v) { c.padding_factor = parse_int(v); }},
      {"propagation.band_limit", [](ExperimentConfig& c, const std::string& v) { c.band_limit = parse_bool(v); }},
      {"grid.n", [](ExperimentConfig& c, const std::string& v) { c.grid_n = static_cast<std::size_t>(parse_int(v)); }},
      {"grid.spacing", [](ExperimentConfig& c, const std::string& v) { c.grid_spacing = parse_with_units(v, kLengthUnits, "length"); }},
      {"iris.radius",
       [](ExperimentConfig& c, const std::string& v) {
         c.iris_enabled = true;
         c.iris_radius.reset();
         if (is_keyword(v, "none")) {
           c.iris_enabled = false;
         } else if (!is_keyword(v, "auto")) {
           c.iris_radius = parse_with_units(v, kLengthUnits, "length");
         }
       }},
      {"pipeline.modes",
       [](ExperimentConfig& c, const std::string& v) {
         c.modes.clear();
         if (is_keyword(v, "default")) {
           c.modes = default_mode_set();
           return;
         }
         for (const auto& t : split_top_level(v)) c.modes.push_back(parse_mode_token(t));
         if (c.modes.empty()) throw ConfigError("pipeline.modes is empty");
       }},
      {"noise.grating_efficiency", [](ExperimentConfig& c, const std::string& v) { c.grating_efficiency = parse_plain(v); }},
      {"noise.grating_efficiency_uncertainty",
       [](ExperimentConfig& c, const std::string& v) { c.grating_efficiency_uncertainty = parse_plain(v); }},
      {"noise.efficiency",
       [](ExperimentConfig& c, const std::string& v) {
         c.noise_efficiency = is_keyword(v, "auto") ? std::nullopt : std::optional<double>(parse_plain(v));
       }},
      {"noise.efficiency_uncertainty",
       [](ExperimentConfig& c, const std::string& v) { c.noise_efficiency_uncertainty = parse_plain(v); }},
      {"pipeline.jobs", [](ExperimentConfig& c, const std::string& v) { c.jobs = parse_int(v); }},
      {"output.dir", [](ExperimentConfig& c, const std::string& v) { c.output_dir = trim(v); }},
  };
  return table;
}

}  // namespace

std::string ModeToken::text() const {
  switch (family) {
    case Family::gauss:
      return "Gauss";
    case Family::laguerre_gauss:
      return "LG(" + std::to_string(a) + "," + std::to_string(b) + ")";
    case Family::bessel_gauss:
      return "BG(" + std::to_string(a) + ")";
    case Family::arbitrary:
      return "Arbitrary(" + path + ")";
  }
  return {};
}

ModeToken parse_mode_token(const std::string& raw) {
  const std::string text = trim(raw);
  const auto open = text.find('(');
  const std::string name = lower(trim(text.substr(0, open)));
  std::string args;
  if (open != std::string::npos) {
    if (text.back() != ')') throw ConfigError("mode spec is missing ')': '" + text + "'");
    args = trim(text.substr(open + 1, text.size() - open - 2));
  }
  auto ints = [&](std::size_t count) {
    std::vector<int> v;
    for (const auto& part : split_top_level(args)) v.push_back(parse_int(part));
    if (v.size() != count) throw ConfigError("mode spec '" + text + "' needs " + std::to_string(count) + " indices");
    return v;
  };
  ModeToken t;
  if (name == "gauss") {
    if (!args.empty()) throw ConfigError("Gauss takes no indices");
    t.family = ModeToken::Family::gauss;
  } else if (name == "lg") {
    const auto v = ints(2);
    if (v[0] < 0) throw ConfigError("LG radial index must be >= 0");
    t = ModeToken{ModeToken::Family::laguerre_gauss, v[0], v[1], {}};
  } else if (name == "bg") {
    const auto v = ints(1);
    if (v[0] < 0) throw ConfigError("BG order must be >= 0");
    t = ModeToken{ModeToken::Family::bessel_gauss, v[0], 0, {}};
  } else if (name == "arbitrary") {
    if (args.empty()) throw ConfigError("Arbitrary needs an image path");
    t = ModeToken{ModeToken::Family::arbitrary, 0, 0, args};
  } else {
    throw ConfigError("unknown mode family in '" + text + "'");
  }
  return t;
}

std::vector<ModeToken> default_mode_set() {
  std::vector<ModeToken> out;
  for (int p = 1; p <= 3; ++p) {
    for (int l = 1; l <= 3; ++l) out.push_back(ModeToken{ModeToken::Family::laguerre_gauss, p, l, {}});
  }
  for (int n = 0; n <= 2; ++n) out.push_back(ModeToken{ModeToken::Family::bessel_gauss, n, 0, {}});
  return out;
}

ExperimentConfig default_config() {
  ExperimentConfig c;
  c.modes = default_mode_set();
  return c;
}

void ExperimentConfig::validate() const {
  auto positive = [](double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(what) + " must be finite and > 0");
  };
  auto fraction = [](double v, const char* what) {
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(std::string(what) + " must lie in [0, 1]");
  };
  positive(source_waist, "source.waist");
  if (!(input_squeezing_uncertainty_db >= 0.0)) throw ConfigError("source.squeezing_uncertainty must be >= 0");
  try {
    slm.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  fraction(eta_d, "slm.eta_d");
  fraction(eta_r, "slm.eta_r");
  if (!(eta_d_uncertainty >= 0.0) || !(eta_r_uncertainty >= 0.0)) throw ConfigError("efficiency uncertainties must be >= 0");
  if (!(crosstalk_sigma_px >= 0.0)) throw ConfigError("slm.crosstalk_sigma must be >= 0");
  if (grating_period_px && *grating_period_px < 2) throw ConfigError("hologram.grating_period must be at least 2 px");
  if (lens_focal_length && (*lens_focal_length == 0.0 || std::isnan(*lens_focal_length))) {
    throw ConfigError("hologram.lens_focal_length must be non-zero");
  }
  if (aperture_radius_px) positive(*aperture_radius_px, "hologram.aperture_radius");
  if (target_waist) positive(*target_waist, "mode.target_waist");
  if (bessel_waist) positive(*bessel_waist, "mode.bessel_waist");
  if (bessel_kr) positive(*bessel_kr, "mode.bessel_kr");
  if (!(distance >= 0.0) || !std::isfinite(distance)) throw ConfigError("propagation.distance must be >= 0");
  if (padding_factor < 1 || padding_factor > 8) throw ConfigError("propagation.padding must be in [1, 8]");
  if (grid_n < 16 || grid_n > 8192) throw ConfigError("grid.n must be in [16, 8192]");
  positive(grid_spacing, "grid.spacing");
  if (iris_radius) positive(*iris_radius, "iris.radius");
  fraction(grating_efficiency, "noise.grating_efficiency");
  if (noise_efficiency) fraction(*noise_efficiency, "noise.efficiency");
  if (!(grating_efficiency_uncertainty >= 0.0) || !(noise_efficiency_uncertainty >= 0.0)) {
    throw ConfigError("noise uncertainties must be >= 0");
  }
  if (jobs < 1) throw ConfigError("pipeline.jobs must be >= 1");
  if (modes.empty()) throw ConfigError("pipeline.modes is empty");
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c = default_config();
  std::istringstream in(text);
  std::string line;
  std::string section;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto where = "line " + std::to_string(number) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "malformed section header");
      section = lower(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    const std::string key = section + "." + lower(trim(line.substr(0, eq)));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError(where + "unknown key '" + key + "'");
    try {
      it->second(c, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream o;
  auto opt_length = [](const std::optional<double>& v, const char* unit) {
    return v ? format_length(*v, unit) : std::string("auto");
  };
  o << "[source]\n";
  o << "waist = " << format_length(c.source_waist, "mm") << '\n';
  o << "squeezing = " << format_double(c.input_squeezing_db) << " dB\n";
  o << "squeezing_uncertainty = " << format_double(c.input_squeezing_uncertainty_db) << " dB\n";
  o << "\n[slm]\n";
  o << "width_px = " << c.slm.width_px << '\n';
  o << "height_px = " << c.slm.height_px << '\n';
  o << "pixel_pitch = " << format_length(c.slm.pixel_pitch, "um") << '\n';
  o << "phase_levels = " << c.slm.phase_levels << '\n';
  o << "wavelength = " << format_length(c.slm.design_wavelength, "nm") << '\n';
  o << "eta_d = " << format_double(c.eta_d) << '\n';
  o << "eta_d_uncertainty = " << format_double(c.eta_d_uncertainty) << '\n';
  o << "eta_r = " << format_double(c.eta_r) << '\n';
  o << "eta_r_uncertainty = " << format_double(c.eta_r_uncertainty) << '\n';
  o << "crosstalk_sigma = " << format_double(c.crosstalk_sigma_px) << " px\n";
  o << "\n[hologram]\n";
  o << "grating_period = " << (c.grating_period_px ? std::to_string(*c.grating_period_px) + " px" : "none") << '\n';
  o << "lens_focal_length = " << (c.lens_enabled ? opt_length(c.lens_focal_length, "m") : "none") << '\n';
  o << "aperture_radius = " << (c.aperture_radius_px ? format_double(*c.aperture_radius_px) + " px" : "none") << '\n';
  o << "\n[mode]\n";
  o << "spec = " << c.mode.text() << '\n';
  o << "target_plane = " << plane_text(c.target_plane) << '\n';
  o << "target_waist = " << opt_length(c.target_waist, "mm") << '\n';
  o << "bessel_waist = " << opt_length(c.bessel_waist, "mm") << '\n';
  o << "bessel_kr = " << (c.bessel_kr ? format_wavenumber(*c.bessel_kr) : "auto") << '\n';
  o << "\n[propagation]\n";
  o << "distance = " << format_length(c.distance, "m") << '\n';
  o << "padding = " << c.padding_factor << '\n';
  o << "band_limit = " << (c.band_limit ? "true" : "false") << '\n';
  o << "\n[grid]\n";
  o << "n = " << c.grid_n << '\n';
  o << "spacing = " << format_length(c.grid_spacing, "um") << '\n';
  o << "\n[iris]\n";
  o << "radius = " << (c.iris_enabled ? opt_length(c.iris_radius, "mm") : "none") << '\n';
  o << "\n[noise]\n";
  o << "grating_efficiency = " << format_double(c.grating_efficiency) << '\n';
  o << "grating_efficiency_uncertainty = " << format_double(c.grating_efficiency_uncertainty) << '\n';
  o << "efficiency = " << (c.noise_efficiency ? format_double(*c.noise_efficiency) : "auto") << '\n';
  o << "efficiency_uncertainty = " << format_double(c.noise_efficiency_uncertainty) << '\n';
  o << "\n[pipeline]\n";
  o << "modes = ";
  for (std::size_t k = 0; k < c.modes.size(); ++k) o << (k ? "; " : "") << c.modes[k].text();
  o << '\n';
  o << "jobs = " << c.jobs << '\n';
  o << "\n[output]\n";
  o << "dir = " << c.output_dir.string() << '\n';
  return o.str();
}

std::string config_hash(const ExperimentConfig& config) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : serialize_config(config)) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ModeSetup resolve_mode(const ExperimentConfig& c, const ModeToken& token, const std::filesystem::path& base_dir) {
  using Family = ModeToken::Family;
  const bool is_bg = token.family == Family::bessel_gauss;
  holo::TargetPlane plane = holo::TargetPlane::fourier;
  if (c.target_plane == PlaneChoice::direct || (c.target_plane == PlaneChoice::automatic && is_bg)) {
    plane = holo::TargetPlane::direct;
  }
  const double focal = c.lens_focal_length.value_or(plane == holo::TargetPlane::fourier ? 0.45 : 1.0);
  const double lambda = c.slm.design_wavelength;
  // Fourier targets: waist conjugate to half the input waist.
  const double fourier_waist = lambda * focal / (kPi * 0.5 * c.source_waist);
  const double waist =
      c.target_waist.value_or(plane == holo::TargetPlane::fourier ? fourier_waist : 0.5 * c.source_waist);

  ModeSetup s{Gauss{waist}, plane, c.lens_enabled ? focal : std::numeric_limits<double>::infinity()};
  switch (token.family) {
    case Family::gauss:
      break;
    case Family::laguerre_gauss:
      s.spec = LaguerreGauss{token.a, token.b, waist};
      break;
    case Family::bessel_gauss: {
      const double w0 = c.bessel_waist.value_or(c.source_waist);
      s.spec = BesselGauss{token.a, c.bessel_kr.value_or(2.0 * kBesselJ0FirstZero / w0), w0};
      break;
    }
    case Family::arbitrary: {
      std::filesystem::path p = token.path;
      if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
      auto image = std::make_shared<IntensityImage>(to_intensity(read_gray_image(p)));
      s.spec = ArbitraryIntensity{std::move(image), waist, token.path};
      break;
    }
  }
  validate(s.spec);
  return s;
}

double parse_length(const std::string& text) { return parse_with_units(text, kLengthUnits, "length"); }

std::vector<MeasuredValue> load_measured(const std::filesystem::path& path) {
  const auto rows = read_csv(path);
  std::vector<MeasuredValue> out;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& r = rows[k];
    if (r.size() < 3 || r.size() > 4) {
      throw ConfigError(path.string() + ": row " + std::to_string(k + 1) + " needs 3 or 4 columns");
    }
    if (k == 0) {
      double probe = 0.0;
      const auto& f = r[1];
      if (std::from_chars(f.data(), f.data() + f.size(), probe).ec != std::errc{}) continue;  // header
    }
    try {
      MeasuredValue m;
      m.mode_id = parse_mode_token(r[0]).text();
      m.squeezing_db = parse_number(r[1]);
      m.uncertainty_db = parse_number(r[2]);
      if (!(m.uncertainty_db >= 0.0)) throw ConfigError("uncertainty must be >= 0");
      if (r.size() == 4 && !r[3].empty()) {
        m.eta = parse_number(r[3]);
        if (!(*m.eta >= 0.0 && *m.eta <= 1.0)) throw ConfigError("eta must lie in [0, 1]");
      }
      out.push_back(std::move(m));
    } catch (const ConfigError& e) {
      throw ConfigError(path.string() + ": row " + std::to_string(k + 1) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace sqzmode::app
