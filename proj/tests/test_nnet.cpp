#include "pulsebench/error.hpp"
#include "pulsebench/nnet/checkpoint.hpp"
#include "pulsebench/nnet/gradcheck.hpp"
#include "pulsebench/nnet/train.hpp"
#include "pulsebench/synth.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

using namespace pulsebench;
using namespace pulsebench::nnet;

namespace {

Tensor4 random_input(Shape shape, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Tensor4 t(shape);
  for (double& v : t.data) v = u(rng);
  return t;
}

std::vector<LabeledMap> synthetic_set(int count, std::uint64_t seed, double seconds, double noise) {
  SynthConfig base;
  base.duration_sec = seconds;
  base.noise_sigma = noise;
  std::vector<LabeledMap> out;
  for (auto& s : synth_map_dataset(count, seed, base)) out.push_back({std::move(s.map), s.hr_bpm});
  return out;
}

// Global average pool then FC(1 -> 1): output = w * mean(map) + b.
Regressor mean_regressor(double w, double b) {
  RegressorConfig cfg;
  cfg.architecture = {{LayerKind::global_avg_pool, 1, 1, 1}, {LayerKind::linear, 1, 1, 1}};
  cfg.target_offset = 0.0;
  cfg.target_scale = 1.0;
  Regressor r = make_regressor(cfg, Shape{1, 1, 2, 8});
  r.model.layers()[1].weights = {w};
  r.model.layers()[1].bias = {b};
  return r;
}

SpatialTemporalMap constant_map(double value, double fps = 30.0) {
  SpatialTemporalMap m(2, 8, 1, fps);
  for (double& v : m.values) v = value;
  return m;
}

Tensor4 shift_width(const Tensor4& t, int by) {
  Tensor4 out(t.shape);
  const int w = t.shape.width;
  for (int c = 0; c < t.shape.channels; ++c)
    for (int y = 0; y < t.shape.height; ++y)
      for (int x = 0; x < w; ++x) out.at(0, c, y, x) = t.at(0, c, y, (x + by) % w);
  return out;
}

}  // namespace

TEST_CASE("frame-rate target normalization") {
  CHECK(normalize_target(90.0, 30.0) == 90.0);
  CHECK(normalize_target(90.0, 25.0, 30.0) == doctest::Approx(108.0));
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> hr(40.0, 180.0), fs(10.0, 60.0);
  for (int i = 0; i < 100; ++i) {
    const double h = hr(rng), f = fs(rng);
    CHECK(std::abs(denormalize_target(normalize_target(h, f), f) - h) <= 1e-12);
  }
  CHECK_THROWS_AS(normalize_target(90.0, 0.0), ConfigError);
}

TEST_CASE("l1_loss examples") {
  const std::vector<double> a{1.0, 2.0, 3.0};
  CHECK(l1_loss(a, a) == 0.0);
  CHECK(l1_loss(std::vector<double>{3.0}, std::vector<double>{1.0}) == 2.0);
  CHECK(l1_loss(std::vector<double>{1.0, 5.0}, std::vector<double>{2.0, 2.0}) == 2.0);
  CHECK_THROWS_AS(l1_loss(std::vector<double>{}, std::vector<double>{}), InputError);
  CHECK_THROWS_AS(l1_loss(a, std::vector<double>{1.0}), InputError);
}

TEST_CASE("adam with zero gradient leaves parameters and advances time") {
  std::vector<double> p{0.5, -1.0};
  const std::vector<double> g{0.0, 0.0};
  AdamState state;
  adam_step(p, g, state);
  adam_step(p, g, state);
  CHECK(p == std::vector<double>{0.5, -1.0});
  CHECK(state.t == 2);
}

TEST_CASE("adam first step moves by the learning rate against the gradient") {
  for (double g : {1e-3, 0.5, 3.0, -250.0}) {
    std::vector<double> p{1.0};
    AdamState state;
    adam_step(p, std::vector<double>{g}, state, {0.01});
    const double delta = p[0] - 1.0;
    CHECK(delta * g < 0.0);
    CHECK(std::abs(delta) >= 0.99 * 0.01);
    CHECK(std::abs(delta) <= 0.01);
  }
}

TEST_CASE("adam with a constant gradient decreases monotonically") {
  std::vector<double> p{2.0};
  AdamState state;
  double prev = p[0];
  for (int i = 0; i < 100; ++i) {
    adam_step(p, std::vector<double>{0.7}, state);
    CHECK(p[0] < prev);
    prev = p[0];
  }
  // Bias-corrected moments of a constant gradient are exact, so every step is lr.
  CHECK(p[0] == doctest::Approx(2.0 - 100 * 0.001).epsilon(1e-6));
  std::vector<double> wrong{1.0, 2.0};
  CHECK_THROWS_AS(adam_step(wrong, std::vector<double>{1.0}, state), ConfigError);
}

TEST_CASE("frozen layers keep their parameters") {
  const Shape shape{1, 3, 5, 16};
  Model model(compact_cnn(3), shape);
  model.init(1);
  const auto before = model.layers();
  Gradients grads = model.make_gradients();
  ForwardTrace trace;
  model.forward_sample(random_input(shape, 2), &trace);
  model.backward(trace, 1.0, grads);
  Adam adam(model, {});
  adam.step(model, grads, {0});
  CHECK(model.layers()[0].weights == before[0].weights);
  CHECK(model.layers()[0].bias == before[0].bias);
  CHECK(model.layers()[3].weights != before[3].weights);
}

TEST_CASE("compact architecture and model construction") {
  const auto specs = compact_cnn(3);
  REQUIRE(specs.size() == 8);
  CHECK(specs[0].kind == LayerKind::conv);
  CHECK(specs[0].out_channels == 16);
  CHECK(specs[3].out_channels == 32);
  CHECK(specs[6].kind == LayerKind::global_avg_pool);
  CHECK(specs[7].kind == LayerKind::linear);
  Model model(specs, Shape{1, 3, 25, 300});
  CHECK(model.parameter_count() == (3 * 16 * 9 + 16) + (16 * 32 * 9 + 32) + 33);
  CHECK_THROWS_AS(Model({{LayerKind::conv, 3, 8, 3}}, Shape{1, 3, 5, 5}), ConfigError);
  CHECK_THROWS_AS(Model({{LayerKind::conv, 2, 8, 3}, {LayerKind::global_avg_pool}, {LayerKind::linear, 8, 1}},
                        Shape{1, 3, 5, 5}),
                  ConfigError);
  CHECK_THROWS_AS(Model({{LayerKind::conv, 3, 8, 4}, {LayerKind::global_avg_pool}, {LayerKind::linear, 8, 1}},
                        Shape{1, 3, 5, 5}),
                  ConfigError);
}

TEST_CASE("zero final layer outputs its bias for any input") {
  const Shape shape{1, 3, 5, 20};
  Model model(compact_cnn(3), shape);
  model.init(7);
  auto& fc = model.layers().back();
  std::fill(fc.weights.begin(), fc.weights.end(), 0.0);
  fc.bias = {0.375};
  for (std::uint64_t s = 0; s < 5; ++s) CHECK(model.forward_sample(random_input(shape, s)) == 0.375);
}

TEST_CASE("batch outputs are independent of batch composition") {
  const Shape one{1, 3, 5, 20};
  Model model(compact_cnn(3), one);
  model.init(3);
  const Tensor4 a = random_input(one, 1);
  const Tensor4 b = random_input(one, 2);
  Tensor4 batch(Shape{3, 3, 5, 20});
  std::copy(a.data.begin(), a.data.end(), batch.sample(0));
  std::copy(a.data.begin(), a.data.end(), batch.sample(1));
  std::copy(b.data.begin(), b.data.end(), batch.sample(2));
  const auto out = model.forward(batch);
  REQUIRE(out.size() == 3);
  CHECK(out[0] == out[1]);
  CHECK(out[0] == model.forward_sample(a));
  CHECK(out[2] == model.forward_sample(b));
}

TEST_CASE("forward is deterministic and rejects mismatched input") {
  const Shape shape{1, 3, 5, 20};
  Model m1(compact_cnn(3), shape), m2(compact_cnn(3), shape);
  m1.init(11);
  m2.init(11);
  const Tensor4 x = random_input(shape, 5);
  CHECK(m1.forward_sample(x) == m2.forward_sample(x));
  CHECK(m1.layers()[0].weights == m2.layers()[0].weights);
  m2.init(12);
  CHECK(m1.layers()[0].weights != m2.layers()[0].weights);
  CHECK_THROWS_AS(m1.forward_sample(random_input(Shape{1, 3, 5, 21}, 1)), MismatchError);
  CHECK_THROWS_AS(m1.forward_sample(random_input(Shape{1, 1, 5, 20}, 1)), MismatchError);
}

TEST_CASE("gradient check on random small networks") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    const int channels = 1 + static_cast<int>(rng() % 3);
    const int height = 4 + static_cast<int>(rng() % 4);
    const int width = 6 + static_cast<int>(rng() % 10);
    const int filters = 2 + static_cast<int>(rng() % 4);
    const int kernel = rng() % 2 == 0 ? 3 : 5;
    std::vector<LayerSpec> specs{{LayerKind::conv, channels, filters, kernel},
                                 {LayerKind::relu},
                                 {LayerKind::maxpool2},
                                 {LayerKind::conv, filters, 4, 3},
                                 {LayerKind::relu},
                                 {LayerKind::global_avg_pool},
                                 {LayerKind::linear, 4, 1}};
    const Shape shape{1, channels, height, width};
    Model model(specs, shape);
    model.init(seed + 100);
    // Nonzero biases keep ReLUs away from exact zeros.
    for (Layer& l : model.layers())
      for (double& b : l.bias) b = 0.05;
    const GradCheckResult r = gradient_check(model, random_input(shape, seed), 10.0);
    CAPTURE(seed);
    CHECK(r.checked > 0);
    CHECK(r.max_rel_error < 1e-4);
  }
}

TEST_CASE("gradient check on the compact network samples large layers") {
  const Shape shape{1, 3, 5, 24};
  Model model(compact_cnn(3), shape);
  model.init(5);
  const GradCheckResult r = gradient_check(model, random_input(shape, 9), -3.0);
  CHECK(r.checked == model.parameter_count() - r.skipped_kinks);
  CHECK(r.max_rel_error < 1e-4);
}

TEST_CASE("gradient check on a linear network is exact") {
  const std::vector<LayerSpec> specs{
      {LayerKind::conv, 2, 3, 3}, {LayerKind::global_avg_pool}, {LayerKind::linear, 3, 1}};
  const Shape shape{1, 2, 4, 7};
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Model model(specs, shape);
    model.init(seed);
    const GradCheckResult r = gradient_check(model, random_input(shape, seed), 100.0);
    CHECK(r.skipped_kinks == 0);
    CHECK(r.max_rel_error < 1e-7);
  }
}

TEST_CASE("zero input puts ReLUs on their kink and those parameters are skipped") {
  const Shape shape{1, 3, 5, 16};
  Model model(compact_cnn(3), shape);
  model.init(2);
  const GradCheckResult r = gradient_check(model, Tensor4(shape, 0.0), 1.0);
  CHECK(r.skipped_kinks > 0);
  CHECK(r.max_rel_error < 1e-4);
}

TEST_CASE("shifting by the pooling stride changes the output less than a one-frame shift") {
  const auto set = synthetic_set(5, 21, 4.0, 0.0);
  int holds = 0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const Tensor4 x = map_to_tensor(set[i].map);
    Model model(compact_cnn(3), x.shape);
    model.init(i);
    const double base = model.forward_sample(x);
    const double by_one = std::abs(model.forward_sample(shift_width(x, 1)) - base);
    const double by_stride = std::abs(model.forward_sample(shift_width(x, 4)) - base);
    holds += by_stride < 10.0 * by_one;
  }
  CHECK(holds == 5);
}

TEST_CASE("map_to_tensor lays channels over a blocks x frames image") {
  SpatialTemporalMap m(2, 3, 2, 30.0);
  for (std::size_t i = 0; i < m.values.size(); ++i) m.values[i] = static_cast<double>(i);
  const Tensor4 t = map_to_tensor(m);
  CHECK(t.shape == Shape{1, 2, 2, 3});
  for (int b = 0; b < 2; ++b)
    for (int f = 0; f < 3; ++f)
      for (int c = 0; c < 2; ++c) CHECK(t.at(0, c, b, f) == m.at(b, f, c));
}

TEST_CASE("predict_video averages clip predictions") {
  const Regressor r = mean_regressor(1.0, 0.0);
  CHECK(r.predict_bpm(constant_map(70.0)) == doctest::Approx(70.0));
  const VideoPrediction one = predict_video({constant_map(81.0)}, r);
  CHECK(one.video_bpm == one.clip_bpm[0]);
  const VideoPrediction two = predict_video({constant_map(70.0), constant_map(74.0)}, r);
  CHECK(two.clip_bpm.size() == 2);
  CHECK(two.video_bpm == doctest::Approx(72.0));
  // Output is in reference-rate units; a 25 fps clip maps back by 25/30.
  CHECK(r.predict_bpm(constant_map(108.0, 25.0)) == doctest::Approx(90.0));
  CHECK_THROWS_AS(predict_video({}, r), InputError);
}

TEST_CASE("training is deterministic per seed") {
  const auto data = synthetic_set(32, 1, 10.0, 0.5);
  RegressorConfig cfg;
  cfg.seed = 3;
  cfg.batch = 2;
  cfg.augment.p_mask = 0.0;
  TrainStagePlan plan;
  plan.stages.push_back({StageData::synthetic, 10, {}, 0.0});
  TrainData td;
  td.synthetic = &data;
  const TrainResult a = train(plan, td, cfg);
  const TrainResult b = train(plan, td, cfg);
  REQUIRE(a.log.size() == 10);
  for (std::size_t i = 0; i < a.log.size(); ++i) CHECK(a.log[i].train_loss_bpm == b.log[i].train_loss_bpm);
  CHECK(encode_checkpoint(a.regressor) == encode_checkpoint(b.regressor));
}

TEST_CASE("raw-target training loss falls monotonically over the first epochs") {
  // With standardized targets the untrained network already predicts the
  // label mean, so the early curve is a plateau. Regressing raw bpm starts
  // far from every label and exposes the descent.
  const auto data = synthetic_set(32, 1, 10.0, 0.5);
  RegressorConfig cfg;
  cfg.seed = 3;
  cfg.augment.p_mask = 0.0;
  cfg.target_offset = 0.0;
  cfg.target_scale = 1.0;
  TrainStagePlan plan;
  plan.stages.push_back({StageData::synthetic, 10, {}, 0.0});
  TrainData td;
  td.synthetic = &data;
  const TrainResult a = train(plan, td, cfg);
  REQUIRE(a.log.size() == 10);
  std::vector<double> smooth;
  for (std::size_t i = 1; i + 1 < a.log.size(); ++i) {
    smooth.push_back((a.log[i - 1].train_loss_bpm + a.log[i].train_loss_bpm + a.log[i + 1].train_loss_bpm) / 3.0);
  }
  for (std::size_t i = 1; i < smooth.size(); ++i) CHECK(smooth[i] < smooth[i - 1]);
}

TEST_CASE("training stages, freezing and validation logging") {
  const auto syn = synthetic_set(6, 2, 3.0, 0.5);
  const auto real = synthetic_set(4, 3, 3.0, 1.0);
  RegressorConfig cfg;
  cfg.seed = 1;
  cfg.batch = 3;
  cfg.augment = {0.5, 5, 10};
  TrainStagePlan plan;
  plan.stages.push_back({StageData::synthetic, 2, {}, 0.0});
  plan.stages.push_back({StageData::real, 3, {0, 3}, 0.0});
  TrainData td{&syn, &real, &real};
  const Regressor start = make_regressor(cfg, Shape{1, 3, 25, 90});
  const TrainResult r = train(plan, td, cfg, &start);
  REQUIRE(r.log.size() == 5);
  CHECK(r.log[1].stage == 0);
  CHECK(r.log[2].stage == 1);
  CHECK(r.log[2].epoch == 0);
  for (const EpochLog& l : r.log) CHECK(l.val_mae_bpm >= 0.0);
  CHECK(r.log[0].train_mae_bpm == -1.0);

  TrainData missing{&syn, nullptr, nullptr};
  CHECK_THROWS_AS(train(plan, missing, cfg), ConfigError);
  TrainStagePlan bad;
  bad.stages.push_back({StageData::synthetic, 1, {42}, 0.0});
  CHECK_THROWS_AS(train(bad, td, cfg), ConfigError);
  CHECK_THROWS_AS(train(TrainStagePlan{}, td, cfg), ConfigError);
  RegressorConfig zero_lr = cfg;
  zero_lr.lr = 0.0;
  CHECK_THROWS_AS(train(plan, td, zero_lr), ConfigError);
}

TEST_CASE("checkpoint round trip is lossless for f32 parameters") {
  RegressorConfig cfg;
  cfg.seed = 8;
  cfg.target_offset = 85.0;
  Regressor r = make_regressor(cfg, Shape{1, 3, 5, 40});
  for (Layer& l : r.model.layers())
    for (double& w : l.weights) w = static_cast<float>(w);
  const std::string bytes = encode_checkpoint(r);
  const Regressor back = decode_checkpoint(bytes);
  CHECK(back.model.input_shape() == r.model.input_shape());
  CHECK(back.target_offset == 85.0);
  CHECK(back.target_scale == r.target_scale);
  REQUIRE(back.model.layers().size() == r.model.layers().size());
  for (std::size_t i = 0; i < back.model.layers().size(); ++i) {
    CHECK(back.model.layers()[i].spec.kind == r.model.layers()[i].spec.kind);
    CHECK(back.model.layers()[i].weights == r.model.layers()[i].weights);
    CHECK(back.model.layers()[i].bias == r.model.layers()[i].bias);
  }
  CHECK(encode_checkpoint(back) == bytes);

  CHECK_THROWS_AS(decode_checkpoint(bytes.substr(0, bytes.size() / 2)), FormatError);
  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  CHECK_THROWS_AS(decode_checkpoint(bad_magic), FormatError);

  const auto dir = std::filesystem::temp_directory_path() / "pulsebench_test_nnet";
  std::filesystem::create_directories(dir);
  save_checkpoint(dir / "m.rnet", r, {8, {"synthetic:2"}});
  CHECK(std::filesystem::exists(dir / "m.rnet.json"));
  const Regressor loaded = load_checkpoint(dir / "m.rnet");
  CHECK(encode_checkpoint(loaded) == bytes);
  CHECK_THROWS_AS(load_checkpoint(dir / "absent.rnet"), InputError);
  std::filesystem::remove_all(dir);
}
