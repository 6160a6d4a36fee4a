#include <fmt/format.h>

#include "sqzmode/pipeline.hpp"

namespace sqzmode::app {
namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

std::string verdict_text(const std::optional<noise::Verdict>& v) {
  if (!v) return "";
  return v->consistent ? "consistent" : fmt::format("excess {:.3f} dB", v->excess_db);
}

std::string optional_int(const std::optional<int>& v) { return v ? std::to_string(*v) : ""; }

}  // namespace

std::string pipeline_csv(const PipelineReport& report) {
  std::string out = fmt::format("# config_hash={}\n", report.config_hash);
  out +=
      "mode,status,eta_order,eta_iris,eta_total,eta_far_field,eta_grating,predicted_db,predicted_uncertainty_db,measured_db,"
      "measured_uncertainty_db,verdict,excess_db,fidelity,rings,expected_rings,central_null,topology_ok,"
      "iris_x_m,iris_radius_m,fit_width_m,fit_residual,fit_converged,artifacts\n";
  for (const auto& r : report.rows) {
    if (!r.ok) {
      out += fmt::format("{},error: {}{}\n", csv_field(r.mode_id), csv_field(r.error), std::string(22, ','));
      continue;
    }
    std::string artifacts;
    for (std::size_t k = 0; k < r.artifacts.size(); ++k) artifacts += (k ? ";" : "") + r.artifacts[k].string();
    out += fmt::format(
        "{},ok,{:.5f},{:.5f},{:.5f},{:.5f},{:.5f},{:.4f},{:.4f},{},{},{},{},{:.5f},{},{},{},{},{:.6e},{:.6e},{:.6e},{:.3e},{},{}\n",
        csv_field(r.mode_id), r.eta_order, r.eta_iris, r.eta_total, r.eta_far_field, r.eta_grating, r.budget.predicted_output.variance_db,
        r.budget.predicted_output.uncertainty_db, r.measured ? fmt::format("{:.2f}", r.measured->squeezing_db) : "",
        r.measured ? fmt::format("{:.2f}", r.measured->uncertainty_db) : "", verdict_text(r.verdict),
        r.verdict ? fmt::format("{:.4f}", r.verdict->excess_db) : "", r.fidelity, r.rings,
        optional_int(r.expected_rings), r.central_null ? "yes" : "no", r.topology_ok ? "yes" : "no", r.iris_center.x,
        r.iris_radius, r.fit.width, r.fit.residual, r.fit.converged ? "yes" : "no", csv_field(artifacts));
  }
  return out;
}

std::string pipeline_markdown(const PipelineReport& report) {
  std::string out = "# Mode conversion report\n\n";
  out += fmt::format("Config hash: `{}`\n\n", report.config_hash);
  out +=
      "| Mode | η (%) | η iris (%) | Predicted (dB) | Measured (dB) | Verdict | Fidelity | Rings | Centre null |\n"
      "|---|---|---|---|---|---|---|---|---|\n";
  for (const auto& r : report.rows) {
    if (!r.ok) {
      out += fmt::format("| {} | error: {} | | | | | | | |\n", r.mode_id, r.error);
      continue;
    }
    const auto& p = r.budget.predicted_output;
    out += fmt::format("| {} | {:.1f} | {:.1f} | {:.2f} ± {:.2f} | {} | {} | {:.3f} | {}{} | {} |\n", r.mode_id,
                       100.0 * r.eta_order, 100.0 * r.eta_iris, p.variance_db, p.uncertainty_db,
                       r.measured ? fmt::format("{:.2f} ± {:.2f}", r.measured->squeezing_db, r.measured->uncertainty_db)
                                  : "",
                       verdict_text(r.verdict), r.fidelity, r.rings,
                       r.expected_rings ? fmt::format(" (expect {})", *r.expected_rings) : "",
                       r.central_null ? "yes" : "no");
  }
  return out;
}

std::string noise_csv(const std::vector<NoiseRow>& rows) {
  std::string out = "mode,eta,eta_uncertainty,predicted_db,predicted_uncertainty_db,measured_db,measured_uncertainty_db,verdict,excess_db\n";
  for (const auto& r : rows) {
    const auto& p = r.budget.predicted_output;
    out += fmt::format("{},{:.5f},{:.5f},{:.4f},{:.4f},{},{},{},{}\n", csv_field(r.mode_id), r.budget.total_eta,
                       r.budget.total_eta_uncertainty, p.variance_db, p.uncertainty_db,
                       r.measured ? fmt::format("{:.2f}", r.measured->squeezing_db) : "",
                       r.measured ? fmt::format("{:.2f}", r.measured->uncertainty_db) : "", verdict_text(r.verdict),
                       r.verdict ? fmt::format("{:.4f}", r.verdict->excess_db) : "");
  }
  return out;
}

std::string noise_markdown(const std::vector<NoiseRow>& rows, const std::string& config_hash) {
  std::string out = "# Squeezing budget\n\n";
  out += fmt::format("Config hash: `{}`\n\n", config_hash);
  out += "| Mode | η (%) | Predicted (dB) | Measured (dB) | Verdict |\n|---|---|---|---|---|\n";
  for (const auto& r : rows) {
    const auto& p = r.budget.predicted_output;
    out += fmt::format("| {} | {:.1f} | {:.2f} ± {:.2f} | {} | {} |\n", r.mode_id, 100.0 * r.budget.total_eta,
                       p.variance_db, p.uncertainty_db,
                       r.measured ? fmt::format("{:.2f} ± {:.2f}", r.measured->squeezing_db, r.measured->uncertainty_db)
                                  : "",
                       verdict_text(r.verdict));
  }
  return out;
}

}  // namespace sqzmode::app
