#include "pulsebench/metrics.hpp"

#include "pulsebench/error.hpp"

#include <json.hpp>

#include <cmath>
#include <limits>
#include <sstream>

namespace pulsebench {

MetricSummary compute_metrics(std::span<const double> pred, std::span<const double> truth) {
  if (pred.size() != truth.size()) throw InputError("metrics: prediction and truth lengths differ");
  const std::size_t n = pred.size();
  if (n < 2) throw InputError("metrics: need at least 2 items");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(pred[i]) || !std::isfinite(truth[i])) throw InputError("metrics: non-finite value");
    if (!(truth[i] > 0.0)) throw InputError("metrics: true HR must be positive");
  }
  const double dn = static_cast<double>(n);

  MetricSummary s;
  s.n = n;
  double sum_e = 0.0, sum_abs = 0.0, sum_sq = 0.0, sum_rate = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = pred[i] - truth[i];
    sum_e += e;
    sum_abs += std::abs(e);
    sum_sq += e * e;
    sum_rate += std::abs(e) / truth[i];
  }
  s.me = sum_e / dn;
  s.mae = sum_abs / dn;
  s.rmse = std::sqrt(sum_sq / dn);
  s.mer = 100.0 * sum_rate / dn;
  double var = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = pred[i] - truth[i] - s.me;
    var += d * d;
  }
  s.sd = std::sqrt(var / (dn - 1.0));

  double mp = 0.0, mt = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mp += pred[i];
    mt += truth[i];
  }
  mp /= dn;
  mt /= dn;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (pred[i] - mp) * (truth[i] - mt);
    sxx += (pred[i] - mp) * (pred[i] - mp);
    syy += (truth[i] - mt) * (truth[i] - mt);
  }
  if (sxx > 0.0 && syy > 0.0) {
    s.pearson_r = sxy / std::sqrt(sxx * syy);
    s.pearson_defined = true;
  } else {
    s.pearson_r = std::numeric_limits<double>::quiet_NaN();
    s.pearson_defined = false;
  }
  return s;
}

HrReport make_report(std::vector<ReportRow> rows) {
  std::vector<double> pred, truth;
  for (const ReportRow& r : rows) {
    pred.push_back(r.hr_pred);
    truth.push_back(r.hr_true);
  }
  HrReport report{std::move(rows), {}};
  report.summary = compute_metrics(pred, truth);
  return report;
}

std::string report_rows_csv(const HrReport& report) {
  std::ostringstream os;
  os.precision(17);
  os << "video_id,hr_pred,hr_true\n";
  for (const ReportRow& r : report.rows) os << r.video_id << ',' << r.hr_pred << ',' << r.hr_true << '\n';
  return os.str();
}

std::string summary_json(const MetricSummary& s) {
  nlohmann::ordered_json j;
  j["n"] = s.n;
  j["me"] = s.me;
  j["sd"] = s.sd;
  j["mae"] = s.mae;
  j["rmse"] = s.rmse;
  j["mer_percent"] = s.mer;
  j["pearson_r"] = s.pearson_defined ? nlohmann::ordered_json(s.pearson_r) : nlohmann::ordered_json(nullptr);
  j["pearson_defined"] = s.pearson_defined;
  return j.dump(2) + "\n";
}

}  // namespace pulsebench
