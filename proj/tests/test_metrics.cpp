#include "pulsebench/error.hpp"
#include "pulsebench/metrics.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <random>

using namespace pulsebench;

TEST_CASE("hand-computed two-item example") {
  const std::vector<double> pred{72.0, 80.0};
  const std::vector<double> truth{70.0, 84.0};
  const MetricSummary s = compute_metrics(pred, truth);
  CHECK(s.n == 2);
  CHECK(std::abs(s.me - -1.0) <= 1e-9);
  CHECK(std::abs(s.mae - 3.0) <= 1e-9);
  CHECK(std::abs(s.rmse - std::sqrt(10.0)) <= 1e-9);
  CHECK(std::abs(s.mer - 100.0 * (2.0 / 70.0 + 4.0 / 84.0) / 2.0) <= 1e-9);
  CHECK(std::abs(s.mer - 3.8095238095) <= 1e-9);
  // errors 2 and -4: sample sd = sqrt(((3)^2 + (3)^2) / 1)
  CHECK(std::abs(s.sd - std::sqrt(18.0)) <= 1e-9);
  CHECK(s.pearson_defined);
  CHECK(s.pearson_r == doctest::Approx(1.0));
}

TEST_CASE("perfect and offset predictions") {
  const std::vector<double> truth{60.0, 75.0, 90.0, 110.0};
  const MetricSummary same = compute_metrics(truth, truth);
  CHECK(same.me == 0.0);
  CHECK(same.sd == 0.0);
  CHECK(same.mae == 0.0);
  CHECK(same.rmse == 0.0);
  CHECK(same.mer == 0.0);
  CHECK(same.pearson_r == doctest::Approx(1.0));

  std::vector<double> shifted = truth;
  for (double& v : shifted) v += 5.0;
  const MetricSummary off = compute_metrics(shifted, truth);
  CHECK(off.me == doctest::Approx(5.0));
  CHECK(off.mae == doctest::Approx(5.0));
  CHECK(off.rmse == doctest::Approx(5.0));
  CHECK(off.sd == doctest::Approx(0.0));
  CHECK(off.pearson_r == doctest::Approx(1.0));
}

TEST_CASE("constant inputs leave the correlation undefined") {
  const std::vector<double> flat{72.0, 72.0, 72.0};
  const std::vector<double> truth{70.0, 75.0, 80.0};
  const MetricSummary a = compute_metrics(flat, truth);
  CHECK_FALSE(a.pearson_defined);
  CHECK(std::isnan(a.pearson_r));
  const MetricSummary b = compute_metrics(truth, flat);
  CHECK_FALSE(b.pearson_defined);
  CHECK(b.mae == doctest::Approx(13.0 / 3.0));
}

TEST_CASE("metric preconditions") {
  const std::vector<double> one{70.0};
  CHECK_THROWS_AS(compute_metrics(one, one), InputError);
  CHECK_THROWS_AS(compute_metrics(std::vector<double>{1.0, 2.0}, std::vector<double>{1.0, 2.0, 3.0}), InputError);
  CHECK_THROWS_AS(compute_metrics(std::vector<double>{1.0, 2.0}, std::vector<double>{0.0, 2.0}), InputError);
}

TEST_CASE("metric identities on random vectors") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> hr(45.0, 150.0);
  std::normal_distribution<double> err(2.0, 8.0);
  std::uniform_int_distribution<int> len(2, 40);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = len(rng);
    std::vector<double> truth(n), pred(n);
    double mean_sq = 0.0;
    for (int i = 0; i < n; ++i) {
      truth[i] = hr(rng);
      pred[i] = truth[i] + err(rng);
      mean_sq += (pred[i] - truth[i]) * (pred[i] - truth[i]);
    }
    mean_sq /= n;
    const MetricSummary s = compute_metrics(pred, truth);
    CHECK(s.rmse >= s.mae);
    CHECK(s.mae >= 0.0);
    CHECK(s.rmse >= std::abs(s.me));
    CHECK(s.sd >= 0.0);
    CHECK(std::abs(s.rmse * s.rmse - mean_sq) <= 1e-9 * mean_sq);
    const double identity = s.me * s.me + (n - 1.0) / n * s.sd * s.sd;
    CHECK(std::abs(s.rmse * s.rmse - identity) <= 1e-9 * std::max(1.0, identity));

    std::vector<double> rescaled = pred;
    for (double& v : rescaled) v = 2.5 * v + 17.0;
    CHECK(compute_metrics(rescaled, truth).pearson_r == doctest::Approx(s.pearson_r).epsilon(1e-12));
  }
}

TEST_CASE("reports serialize rows and a recomputable summary") {
  HrReport r = make_report({{"v1", 72.0, 70.0}, {"v2", 80.0, 84.0}});
  CHECK(r.summary.mae == doctest::Approx(3.0));
  const std::string csv = report_rows_csv(r);
  CHECK(csv.rfind("video_id,hr_pred,hr_true\n", 0) == 0);
  CHECK(csv.find("v2,80") != std::string::npos);
  const auto j = nlohmann::json::parse(summary_json(r.summary));
  CHECK(j.at("n").get<int>() == 2);
  CHECK(std::abs(j.at("me").get<double>() + 1.0) <= 1e-9);
  CHECK(std::abs(j.at("rmse").get<double>() - std::sqrt(10.0)) <= 1e-9);
  CHECK(std::abs(j.at("mer_percent").get<double>() - 3.8095238095238) <= 1e-9);

  const auto flat = nlohmann::json::parse(summary_json(compute_metrics(std::vector<double>{1.0, 1.0},
                                                                       std::vector<double>{1.0, 2.0})));
  CHECK(flat.at("pearson_r").is_null());
  CHECK(flat.at("pearson_defined").get<bool>() == false);
}
