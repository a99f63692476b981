#pragma once

#include <span>
#include <string>
#include <vector>

namespace pulsebench {

// Error statistics of HR predictions, all in bpm except mer (percent).
struct MetricSummary {
  std::size_t n{0};
  double me{0.0};    // mean error
  double sd{0.0};    // sample standard deviation of the error (n - 1)
  double mae{0.0};
  double rmse{0.0};
  double mer{0.0};   // mean of |e_i| / true_i, in percent
  double pearson_r{0.0};
  bool pearson_defined{false};  // false when pred or true is constant; r is NaN
};

// Throws InputError for length mismatch, fewer than 2 items or a
// non-positive true value.
MetricSummary compute_metrics(std::span<const double> pred, std::span<const double> truth);

struct ReportRow {
  std::string video_id;
  double hr_pred{0.0};
  double hr_true{0.0};
};

struct HrReport {
  std::vector<ReportRow> rows;
  MetricSummary summary;
};

HrReport make_report(std::vector<ReportRow> rows);

// video_id,hr_pred,hr_true
std::string report_rows_csv(const HrReport& report);
std::string summary_json(const MetricSummary& summary);

}  // namespace pulsebench
