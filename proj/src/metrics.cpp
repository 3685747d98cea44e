// Copyright 2026 selfsteer authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "selfsteer/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

#include "selfsteer/angles.hpp"

namespace selfsteer::metrics {

namespace {

constexpr double kSisdrClampDb = 60.0;

double quantile_sorted(const std::vector<double>& sorted, double p) {
  const double h = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = h - std::floor(h);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

// Fixed presentation order: baselines first, then the weakly guided methods.
int pipeline_rank(const std::string& label) {
  if (label == "unprocessed") return 0;
  if (label == "strong") return 1;
  if (label == "concat") return 2;
  if (label == "ar") return 3;
  return 4;
}

}  // namespace

double angular_error(double theta_est_rad, double theta_true_rad) {
  if (!std::isfinite(theta_est_rad) || !std::isfinite(theta_true_rad))
    throw std::invalid_argument("angular_error: inputs must be finite");
  return std::abs(rad_to_deg(wrap_pi(theta_est_rad - theta_true_rad)));
}

double si_sdr(const dsp::Signal& estimate, const dsp::Signal& reference) {
  if (estimate.size() != reference.size() || reference.empty())
    throw std::invalid_argument("si_sdr: signals must have equal nonzero length");

  double dot = 0.0, ref_energy = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    dot += estimate[i] * reference[i];
    ref_energy += reference[i] * reference[i];
  }
  if (ref_energy <= 0.0) throw std::invalid_argument("si_sdr: zero reference");

  const double alpha = dot / ref_energy;
  double signal = 0.0, error = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const double s = alpha * reference[i];
    const double e = s - estimate[i];
    signal += s * s;
    error += e * e;
  }
  if (signal <= 0.0) return -kSisdrClampDb;
  if (error <= 0.0) return kSisdrClampDb;
  return std::clamp(10.0 * std::log10(signal / error), -kSisdrClampDb, kSisdrClampDb);
}

Quartiles quartiles(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("quartiles: empty input");
  std::sort(values.begin(), values.end());
  return {quantile_sorted(values, 0.25), quantile_sorted(values, 0.50),
          quantile_sorted(values, 0.75)};
}

LogLinearFit loglinear_fit(const std::vector<std::array<double, 2>>& points) {
  if (points.size() < 2)
    throw std::invalid_argument("loglinear_fit: need at least 2 points");

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& p : points) {
    if (p[0] <= 0.0)
      throw std::invalid_argument("loglinear_fit: abscissa must be positive");
    const double x = std::log10(p[0]);
    sx += x;
    sy += p[1];
    sxx += x * x;
    sxy += x * p[1];
  }
  const double n = static_cast<double>(points.size());
  const double denom = n * sxx - sx * sx;
  if (std::abs(denom) < 1e-12 * std::max(1.0, n * sxx))
    throw std::invalid_argument("loglinear_fit: degenerate design (equal x values)");

  LogLinearFit fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;

  const double mean_y = sy / n;
  double ss_res = 0.0, ss_tot = 0.0;
  for (const auto& p : points) {
    const double pred = fit.slope * std::log10(p[0]) + fit.intercept;
    ss_res += (p[1] - pred) * (p[1] - pred);
    ss_tot += (p[1] - mean_y) * (p[1] - mean_y);
  }
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

Report summarize(const std::vector<SceneResult>& batch) {
  if (batch.empty()) return {};

  std::map<std::pair<std::string, std::string>, std::vector<const SceneResult*>> groups;
  for (const auto& r : batch) groups[{r.pipeline_label, r.tracker_label}].push_back(&r);

  Report report;
  for (const auto& [key, members] : groups) {
    GroupSummary g;
    g.pipeline_label = key.first;
    g.tracker_label = key.second;
    g.scenes = members.size();

    std::vector<double> ae_pool, sisdr_pool;
    for (const auto* r : members) {
      ae_pool.insert(ae_pool.end(), r->ae_deg.begin(), r->ae_deg.end());
      sisdr_pool.push_back(r->sisdr_out_db);
    }
    g.frames = ae_pool.size();
    g.has_ae = !ae_pool.empty();
    if (g.has_ae) g.ae = quartiles(ae_pool);
    g.sisdr = quartiles(sisdr_pool);
    report.groups.push_back(std::move(g));
  }

  std::sort(report.groups.begin(), report.groups.end(),
            [](const GroupSummary& a, const GroupSummary& b) {
              const int ra = pipeline_rank(a.pipeline_label);
              const int rb = pipeline_rank(b.pipeline_label);
              if (ra != rb) return ra < rb;
              if (a.pipeline_label != b.pipeline_label)
                return a.pipeline_label < b.pipeline_label;
              return a.tracker_label < b.tracker_label;
            });
  return report;
}

std::string Report::to_text() const {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-24s %-26s %-26s %s\n", "method",
                "AE_deg [25|50|75]", "SI-SDR_dB [25|50|75]", "scenes");
  out += line;
  out += std::string(86, '-') + "\n";
  for (const auto& g : groups) {
    const std::string method = g.pipeline_label + (g.tracker_label.empty() || g.tracker_label == "-"
                                                       ? ""
                                                       : " pf-" + g.tracker_label);
    char ae[64];
    if (g.has_ae)
      std::snprintf(ae, sizeof(ae), "%6.2f|%6.2f|%6.2f", g.ae.q25, g.ae.q50, g.ae.q75);
    else
      std::snprintf(ae, sizeof(ae), "%20s", "-");
    std::snprintf(line, sizeof(line), "%-24s %-26s %6.2f|%6.2f|%6.2f %8zu\n",
                  method.c_str(), ae, g.sisdr.q25, g.sisdr.q50, g.sisdr.q75, g.scenes);
    out += line;
  }
  return out;
}

}  // namespace selfsteer::metrics
