// pulsebench command-line front end.
//
// Exit codes: 0 ok, 1 other failure, 2 missing or unusable input,
// 3 model/data shape mismatch, 64 usage or configuration error.

#include "pulsebench/classic.hpp"
#include "pulsebench/config.hpp"
#include "pulsebench/degrade.hpp"
#include "pulsebench/error.hpp"
#include "pulsebench/formats.hpp"
#include "pulsebench/metrics.hpp"
#include "pulsebench/nnet/checkpoint.hpp"
#include "pulsebench/nnet/train.hpp"
#include "pulsebench/stmap.hpp"
#include "pulsebench/synth.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace pulsebench;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitMismatch = 3;
constexpr int kExitUsage = 64;

std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void require_file(const fs::path& p, const std::string& what) {
  if (!fs::exists(p)) throw InputError("missing " + what + " " + p.string());
}

void note(const std::string& msg) { std::cerr << "pulsebench: " << msg << '\n'; }

// Options shared by the commands that read a pipeline configuration.
struct ConfigArgs {
  std::string path;
  std::optional<std::uint64_t> seed;

  void add(CLI::App* cmd) {
    cmd->add_option("--config", path, "Pipeline config (.toml or .json)");
    cmd->add_option("--seed", seed, "Random seed (falls back to PULSEBENCH_SEED)");
  }
  PipelineConfig load() const {
    PipelineConfig c = path.empty() ? PipelineConfig{} : load_pipeline_config(path);
    c.seed = resolve_seed(seed, c.seed);
    return c;
  }
};

LandmarkTrack read_landmarks(const fs::path& p) {
  require_file(p, "landmark file");
  return decode_landmarks_csv(read_file(p));
}

FrameSequence to_gray(const FrameSequence& seq) {
  if (seq.color_space == ColorSpace::gray) return seq;
  FrameSequence out;
  out.frame_rate_hz = seq.frame_rate_hz;
  out.color_space = ColorSpace::gray;
  for (const Image& f : seq.frames) {
    Image g(f.width, f.height, 1);
    for (int y = 0; y < f.height; ++y) {
      for (int x = 0; x < f.width; ++x) {
        const double v = 0.299 * f.at(x, y, 0) + 0.587 * f.at(x, y, 1) + 0.114 * f.at(x, y, 2);
        g.at(x, y, 0) = static_cast<std::uint8_t>(std::lround(v));
      }
    }
    out.frames.push_back(std::move(g));
  }
  return out;
}

StmapOptions stmap_options(const PipelineConfig& c) {
  StmapOptions o;
  o.grid = c.grid;
  o.color = c.color == PipelineColor::rgb ? MapColor::rgb : MapColor::yuv;
  return o;
}

std::vector<ClipMap> video_clip_maps(const FrameSequence& video, const LandmarkTrack& track,
                                     const PipelineConfig& c) {
  const FrameSequence seq = c.color == PipelineColor::raw_gray ? to_gray(video) : video;
  return clip_maps(seq, track, stmap_options(c), c.window_frames, c.stride_frames);
}

// Map list CSV: file,hr_bpm plus optional columns. Paths are relative to the
// list's directory.
std::vector<nnet::LabeledMap> read_map_list(const fs::path& list) {
  require_file(list, "map list");
  const CsvTable t = parse_csv(read_file(list));
  const std::size_t file_col = t.column("file");
  const std::size_t hr_col = t.column("hr_bpm");
  std::vector<nnet::LabeledMap> out;
  for (const auto& row : t.rows) {
    const fs::path p = list.parent_path() / row[file_col];
    require_file(p, "map");
    double hr = 0.0;
    try {
      hr = std::stod(row[hr_col]);
    } catch (const std::exception&) {
      throw FormatError(list.string() + ": map " + row[file_col] + " has no hr_bpm label");
    }
    out.push_back({decode_stmp(read_file(p)), hr});
  }
  if (out.empty()) throw InputError("map list " + list.string() + " is empty");
  return out;
}

std::vector<SpatialTemporalMap> read_map_index(const fs::path& list) {
  require_file(list, "map index");
  const CsvTable t = parse_csv(read_file(list));
  const std::size_t file_col = t.column("file");
  std::vector<SpatialTemporalMap> out;
  for (const auto& row : t.rows) {
    const fs::path p = list.parent_path() / row[file_col];
    require_file(p, "map");
    out.push_back(decode_stmp(read_file(p)));
  }
  if (out.empty()) throw InputError("map index " + list.string() + " is empty");
  return out;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    if (item.empty()) continue;
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw ConfigError("bad integer '" + item + "' in list");
    }
  }
  return out;
}

// Writes rows under `header`; with `append` the rows of an existing file
// are kept (its header must match).
void write_csv(const fs::path& path, const std::string& header, const std::string& rows, bool append) {
  std::string body = header + "\n";
  if (append && fs::exists(path)) {
    const std::string old = read_file(path);
    if (old.rfind(header + "\n", 0) != 0) throw FormatError(path.string() + ": header differs, cannot append");
    body = old;
  }
  atomic_write(path, body + rows);
}

// ---- synth -----------------------------------------------------------------

struct SynthVideoArgs {
  ConfigArgs cfg;
  std::string out, landmarks, truth, bvp, id;
  SynthConfig synth;
  bool gray{false};
};

void run_synth_video(const SynthVideoArgs& a) {
  SynthConfig s = a.synth;
  s.seed = a.cfg.load().seed;
  if (a.gray) s.color = ColorSpace::gray;
  const SynthVideo sv = gen_video(s);
  const fs::path out(a.out);
  if (out.extension() == ".fseq") {
    atomic_write(out, encode_fseq(sv.video));
  } else {
    const fs::path tmp = out.string() + ".partial";
    fs::remove_all(tmp);
    write_frames_dir(tmp, sv.video);
    fs::remove_all(out);
    fs::rename(tmp, out);
  }
  atomic_write(a.landmarks, encode_landmarks_csv(sv.landmarks));
  const std::string id = a.id.empty() ? out.stem().string() : a.id;
  if (!a.truth.empty()) atomic_write(a.truth, "video_id,hr_true\n" + id + "," + fmt(s.hr_bpm) + "\n");
  if (!a.bvp.empty()) write_trace(a.bvp, sv.bvp);
  note("wrote " + std::to_string(sv.video.size()) + " frames at " + fmt(s.hr_bpm) + " bpm to " + out.string());
}

struct SynthMapArgs {
  ConfigArgs cfg;
  std::string out;
  int count{0};
  SynthConfig synth;
  bool gray{false};
};

void run_synth_map(const SynthMapArgs& a) {
  const PipelineConfig c = a.cfg.load();
  SynthConfig base = a.synth;
  if (a.gray || c.color == PipelineColor::raw_gray) base.color = ColorSpace::gray;
  if (a.count < 1) throw ConfigError("--count must be >= 1");
  const auto maps = synth_map_dataset(a.count, c.seed, base, {}, c.grid);
  const fs::path dir(a.out);
  fs::create_directories(dir);
  std::string rows;
  for (std::size_t i = 0; i < maps.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "map_%05zu.stmp", i);
    atomic_write(dir / name, encode_stmp(maps[i].map));
    rows += std::string(name) + "," + fmt(maps[i].hr_bpm) + "\n";
  }
  atomic_write(dir / "labels.csv", "file,hr_bpm\n" + rows);
  note("wrote " + std::to_string(maps.size()) + " maps to " + dir.string());
}

// ---- stmap -----------------------------------------------------------------

struct StmapArgs {
  ConfigArgs cfg;
  std::string frames, landmarks, out;
  double fps{30.0};
  std::optional<double> hr;
};

void run_stmap(const StmapArgs& a) {
  const PipelineConfig c = a.cfg.load();
  const FrameSequence video = read_video(a.frames, a.fps);
  const LandmarkTrack track = read_landmarks(a.landmarks);
  // Everything is computed before the first write so a failure leaves no output.
  std::vector<ClipMap> clips;
  try {
    clips = video_clip_maps(video, track, c);
  } catch (const InputError& e) {
    throw InputError(a.frames + ": " + e.what());
  }
  const fs::path dir(a.out);
  fs::create_directories(dir);
  std::string rows;
  for (std::size_t i = 0; i < clips.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "clip_%04zu.stmp", i);
    atomic_write(dir / name, encode_stmp(clips[i].map));
    rows += std::string(name) + "," + std::to_string(i) + "," + std::to_string(clips[i].clip.start) + "," +
            std::to_string(clips[i].clip.end) + "," + (a.hr ? fmt(*a.hr) : std::string("")) + "\n";
  }
  atomic_write(dir / "index.csv", "file,clip,start_frame,end_frame,hr_bpm\n" + rows);
  note("wrote " + std::to_string(clips.size()) + " clips (" + std::to_string(clips.front().map.channels) +
       " channels) to " + dir.string());
}

// ---- estimate ----------------------------------------------------------------

struct EstimateArgs {
  ConfigArgs cfg;
  std::string method, frames, landmarks, maps, checkpoint, out, id;
  double fps{30.0};
  bool append{false};
};

constexpr const char* kEstimateHeader = "video_id,clip,start_frame,end_frame,hr_bpm";

void run_estimate(const EstimateArgs& a) {
  const PipelineConfig c = a.cfg.load();
  const bool from_maps = !a.maps.empty();
  if (from_maps == !a.frames.empty()) throw ConfigError("give either --frames with --landmarks or --maps");
  if (from_maps && a.method != "cnn") throw ConfigError("--maps input requires --method cnn");
  if (!from_maps && a.landmarks.empty()) throw ConfigError("--frames requires --landmarks");
  if (a.method == "cnn" && a.checkpoint.empty()) throw ConfigError("--method cnn requires --checkpoint");

  std::string id = a.id;
  if (id.empty()) id = from_maps ? fs::path(a.maps).parent_path().filename().string() : fs::path(a.frames).stem().string();

  struct Row {
    int start, end;
    double bpm;
  };
  std::vector<Row> rows;
  double video_bpm = 0.0;
  int total = 0;
  if (a.method == "cnn") {
    const nnet::Regressor reg = nnet::load_checkpoint(a.checkpoint);
    std::vector<SpatialTemporalMap> maps;
    std::vector<Clip> spans;
    if (from_maps) {
      maps = read_map_index(a.maps);
      const CsvTable t = parse_csv(read_file(a.maps));
      const std::size_t s = t.column("start_frame"), e = t.column("end_frame");
      for (const auto& row : t.rows) spans.push_back({std::stoi(row[s]), std::stoi(row[e])});
    } else {
      const FrameSequence video = read_video(a.frames, a.fps);
      for (ClipMap& cm : video_clip_maps(video, read_landmarks(a.landmarks), c)) {
        spans.push_back(cm.clip);
        maps.push_back(std::move(cm.map));
      }
    }
    const nnet::VideoPrediction p = nnet::predict_video(maps, reg);
    for (std::size_t i = 0; i < maps.size(); ++i) rows.push_back({spans[i].start, spans[i].end, p.clip_bpm[i]});
    video_bpm = p.video_bpm;
    total = spans.back().end;
  } else {
    const ClassicMethod method = parse_classic_method(a.method);
    const FrameSequence video = read_video(a.frames, a.fps);
    const RgbTrace trace = extract_rgb_trace(video, smooth_landmarks(read_landmarks(a.landmarks)));
    const VideoHr v = estimate_video(trace, method, c.band, c.window_frames, c.stride_frames);
    for (const HrEstimate& e : v.clips) {
      const int end = std::min<int>(static_cast<int>(trace.size()), e.window_start_frame + c.window_frames);
      rows.push_back({e.window_start_frame, end, e.bpm});
    }
    video_bpm = v.mean_bpm;
    total = static_cast<int>(trace.size());
  }

  std::string text;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    text += id + "," + std::to_string(i) + "," + std::to_string(rows[i].start) + "," +
            std::to_string(rows[i].end) + "," + fmt(rows[i].bpm) + "\n";
  }
  text += id + ",video,0," + std::to_string(total) + "," + fmt(video_bpm) + "\n";
  if (a.out.empty()) {
    std::cout << kEstimateHeader << '\n' << text;
  } else {
    write_csv(a.out, kEstimateHeader, text, a.append);
  }
  note(id + ": " + a.method + " " + fmt(std::round(video_bpm * 100.0) / 100.0) + " bpm over " +
       std::to_string(rows.size()) + " clips");
}

// ---- train -------------------------------------------------------------------

struct TrainArgs {
  ConfigArgs cfg;
  std::string synthetic, real, validation, out, log, freeze;
  std::optional<int> synthetic_count, epochs, synthetic_epochs, real_epochs, batch;
  std::optional<double> lr, p_mask;
  double stop_mae{0.0};
  double synthetic_noise{0.5};
};

void run_train(const TrainArgs& a) {
  PipelineConfig c = a.cfg.load();
  TrainSettings& t = c.train;
  if (a.synthetic_count) t.synthetic_count = *a.synthetic_count;
  if (a.epochs) t.epochs = *a.epochs;
  if (a.synthetic_epochs) t.synthetic_epochs = *a.synthetic_epochs;
  if (a.real_epochs) t.real_epochs = *a.real_epochs;
  if (a.batch) t.batch = *a.batch;
  if (a.lr) t.lr = *a.lr;
  if (a.p_mask) t.p_mask = *a.p_mask;
  c.validate();
  if (a.out.empty()) throw ConfigError("--out is required");

  std::vector<nnet::LabeledMap> real, synthetic, validation;
  if (!a.real.empty()) real = read_map_list(a.real);
  if (!a.validation.empty()) validation = read_map_list(a.validation);
  if (!a.synthetic.empty()) {
    synthetic = read_map_list(a.synthetic);
  } else if (t.synthetic_count > 0 && (real.empty() || a.synthetic_count)) {
    // Generated maps take the real maps' length, channels and frame rate.
    SynthConfig base;
    base.noise_sigma = a.synthetic_noise;
    base.duration_sec = c.window_frames / base.fps;
    if (!real.empty()) {
      base.fps = real.front().map.frame_rate_hz;
      base.duration_sec = real.front().map.frames / base.fps;
      if (real.front().map.channels == 1) base.color = ColorSpace::gray;
    } else if (c.color == PipelineColor::raw_gray) {
      base.color = ColorSpace::gray;
    }
    for (auto& s : synth_map_dataset(t.synthetic_count, c.seed, base, {}, c.grid)) {
      synthetic.push_back({std::move(s.map), s.hr_bpm});
    }
  }
  if (synthetic.empty() && real.empty()) throw ConfigError("no training data: give --real, --synthetic or --synthetic-count");

  nnet::RegressorConfig rc;
  rc.lr = t.lr;
  rc.epochs = t.epochs;
  rc.batch = t.batch;
  rc.seed = c.seed;
  rc.augment = {t.p_mask, t.mask_min, t.mask_max};
  nnet::TrainStagePlan plan;
  nnet::CheckpointMeta meta{c.seed, {}};
  if (!synthetic.empty()) {
    const int e = t.synthetic_epochs > 0 ? t.synthetic_epochs : t.epochs;
    plan.stages.push_back({nnet::StageData::synthetic, e, {}, a.stop_mae});
    meta.stages.push_back("synthetic:" + std::to_string(e));
  }
  if (!real.empty()) {
    const int e = t.real_epochs > 0 ? t.real_epochs : t.epochs;
    plan.stages.push_back({nnet::StageData::real, e, parse_int_list(a.freeze), a.stop_mae});
    meta.stages.push_back("real:" + std::to_string(e));
  }
  nnet::TrainData data{synthetic.empty() ? nullptr : &synthetic, real.empty() ? nullptr : &real,
                       validation.empty() ? nullptr : &validation};

  std::string log = "stage,epoch,train_loss_bpm,train_mae_bpm,val_mae_bpm\n";
  const nnet::TrainResult result = nnet::train(plan, data, rc, nullptr, [&](const nnet::EpochLog& l) {
    log += std::to_string(l.stage) + "," + std::to_string(l.epoch) + "," + fmt(l.train_loss_bpm) + "," +
           fmt(l.train_mae_bpm) + "," + fmt(l.val_mae_bpm) + "\n";
  });
  nnet::save_checkpoint(a.out, result.regressor, meta);
  if (!a.log.empty()) atomic_write(a.log, log);
  const nnet::EpochLog& last = result.log.back();
  note("trained " + std::to_string(result.log.size()) + " epochs, final loss " + fmt(last.train_loss_bpm) +
       " bpm; checkpoint " + a.out);
}

// ---- eval --------------------------------------------------------------------

struct EvalArgs {
  std::string pred, truth, rows, summary;
  bool per_clip{false};
  std::optional<std::uint64_t> seed;
};

void run_eval(const EvalArgs& a) {
  require_file(a.pred, "prediction file");
  require_file(a.truth, "truth file");
  const CsvTable truth = parse_csv(read_file(a.truth));
  const std::size_t tid = truth.column("video_id");
  const std::size_t thr = truth.column("hr_true");
  std::map<std::string, double> truth_of;
  for (const auto& r : truth.rows) truth_of[r[tid]] = std::stod(r[thr]);

  const CsvTable pred = parse_csv(read_file(a.pred));
  const std::size_t pid = pred.column("video_id");
  const std::size_t phr = pred.column("hr_bpm");
  std::optional<std::size_t> pclip;
  for (std::size_t i = 0; i < pred.header.size(); ++i)
    if (pred.header[i] == "clip") pclip = i;

  std::vector<ReportRow> rows;
  for (const auto& r : pred.rows) {
    if (pclip) {
      const bool video_row = r[*pclip] == "video";
      if (video_row == a.per_clip) continue;
    }
    const auto it = truth_of.find(r[pid]);
    if (it == truth_of.end()) throw InputError("no ground truth for video '" + r[pid] + "'");
    const std::string id = pclip && a.per_clip ? r[pid] + "#" + r[*pclip] : r[pid];
    rows.push_back({id, std::stod(r[phr]), it->second});
  }
  const HrReport report = make_report(std::move(rows));
  const std::string json = summary_json(report.summary);
  if (!a.rows.empty()) atomic_write(a.rows, report_rows_csv(report));
  if (a.summary.empty()) {
    std::cout << json;
  } else {
    atomic_write(a.summary, json);
  }
}

// ---- study -------------------------------------------------------------------

struct StudyArgs {
  ConfigArgs cfg;
  std::string ops{"resize:2/3,quantize:90,quantize:5"};
  std::string method{"chrom"};
  std::string out;
  int count{10};
};

void run_study(const StudyArgs& a) {
  PipelineConfig c = a.cfg.load();
  const std::uint64_t seed = a.cfg.seed || std::getenv("PULSEBENCH_SEED") ? c.seed : 2019;
  std::vector<DegradeOp> ops;
  std::stringstream ss(a.ops);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) ops.push_back(parse_degrade_op(item));
  }
  const auto rows = compression_study(default_study_suite(seed, a.count), ops, parse_classic_method(a.method), c.band);
  const std::string csv = study_csv(rows);
  if (a.out.empty()) {
    std::cout << csv;
  } else {
    atomic_write(a.out, csv);
  }
}

void add_synth_options(CLI::App* cmd, SynthConfig& s, bool& gray) {
  cmd->add_option("--duration", s.duration_sec, "Length in seconds")->capture_default_str();
  cmd->add_option("--fps", s.fps, "Frame rate")->capture_default_str();
  cmd->add_option("--noise", s.noise_sigma, "Pixel noise sigma (gray levels)")->capture_default_str();
  cmd->add_flag("--gray", gray, "Single-channel output");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Remote pulse-rate benchmark: spatial-temporal maps, classic estimators and a compact CNN"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "pulsebench 1.0");

  SynthVideoArgs sv;
  SynthMapArgs sm;
  auto* synth = app.add_subcommand("synth", "Generate synthetic face videos or maps");
  synth->require_subcommand(1);
  auto* synth_video = synth->add_subcommand("video", "Render a synthetic face video with landmarks");
  sv.cfg.add(synth_video);
  synth_video->add_option("--out", sv.out, "Output .fseq file or frames directory")->required();
  synth_video->add_option("--landmarks", sv.landmarks, "Output landmark CSV")->required();
  synth_video->add_option("--truth", sv.truth, "Output ground-truth CSV (video_id,hr_true)");
  synth_video->add_option("--bvp", sv.bvp, "Output pulse trace (.ptrc or .csv)");
  synth_video->add_option("--id", sv.id, "Video id for the truth file (default: output stem)");
  synth_video->add_option("--hr", sv.synth.hr_bpm, "Pulse rate in bpm")->capture_default_str();
  synth_video->add_option("--motion", sv.synth.motion_amp_px, "Head motion amplitude in pixels");
  synth_video->add_option("--drift", sv.synth.drift_rel_amp, "Relative illumination drift amplitude");
  synth_video->add_option("--intensity", sv.synth.base_intensity, "Mean skin gray level")->capture_default_str();
  synth_video->add_option("--width", sv.synth.width)->capture_default_str();
  synth_video->add_option("--height", sv.synth.height)->capture_default_str();
  add_synth_options(synth_video, sv.synth, sv.gray);

  auto* synth_map = synth->add_subcommand("map", "Synthesize labeled spatial-temporal maps");
  sm.synth.duration_sec = 10.0;
  sm.cfg.add(synth_map);
  synth_map->add_option("--count", sm.count, "Number of maps")->required();
  synth_map->add_option("--out", sm.out, "Output directory (maps plus labels.csv)")->required();
  add_synth_options(synth_map, sm.synth, sm.gray);

  StmapArgs st;
  auto* stmap = app.add_subcommand("stmap", "Build per-clip spatial-temporal maps from a face video");
  st.cfg.add(stmap);
  stmap->add_option("--frames", st.frames, "Input .fseq file or frames directory")->required();
  stmap->add_option("--landmarks", st.landmarks, "Landmark CSV")->required();
  stmap->add_option("--out", st.out, "Output directory (clip_NNNN.stmp plus index.csv)")->required();
  stmap->add_option("--fps", st.fps, "Frame rate of a frames directory")->capture_default_str();
  stmap->add_option("--hr", st.hr, "Ground-truth bpm written into index.csv as the clip label");

  EstimateArgs es;
  auto* estimate = app.add_subcommand("estimate", "Estimate pulse rate per clip and per video");
  es.cfg.add(estimate);
  estimate->add_option("--method", es.method, "green, chrom, pos or cnn")
      ->required()
      ->check(CLI::IsMember({"green", "chrom", "pos", "cnn"}));
  estimate->add_option("--frames", es.frames, "Input .fseq file or frames directory");
  estimate->add_option("--landmarks", es.landmarks, "Landmark CSV");
  estimate->add_option("--maps", es.maps, "index.csv written by stmap (cnn only)");
  estimate->add_option("--checkpoint", es.checkpoint, "Trained model (cnn only)");
  estimate->add_option("--fps", es.fps, "Frame rate of a frames directory")->capture_default_str();
  estimate->add_option("--id", es.id, "Video id for the output rows");
  estimate->add_option("--out", es.out, "Output CSV (default: stdout)");
  estimate->add_flag("--append", es.append, "Append rows to an existing output CSV");

  TrainArgs tr;
  auto* train = app.add_subcommand("train", "Train the CNN regressor (synthetic then real stage)");
  tr.cfg.add(train);
  train->add_option("--synthetic", tr.synthetic, "Map list CSV (file,hr_bpm) for the synthetic stage");
  train->add_option("--synthetic-count", tr.synthetic_count, "Generate this many synthetic maps");
  train->add_option("--synthetic-noise", tr.synthetic_noise, "Noise of generated maps")->capture_default_str();
  train->add_option("--real", tr.real, "Map list CSV for the fine-tuning stage");
  train->add_option("--val", tr.validation, "Map list CSV for validation");
  train->add_option("--out", tr.out, "Output checkpoint (.rnet)")->required();
  train->add_option("--log", tr.log, "Per-epoch loss CSV");
  train->add_option("--epochs", tr.epochs, "Epochs per stage");
  train->add_option("--synthetic-epochs", tr.synthetic_epochs);
  train->add_option("--real-epochs", tr.real_epochs);
  train->add_option("--batch", tr.batch);
  train->add_option("--lr", tr.lr);
  train->add_option("--p-mask", tr.p_mask, "Probability of masking a run of columns");
  train->add_option("--freeze", tr.freeze, "Comma-separated layer indices frozen in the real stage");
  train->add_option("--stop-mae", tr.stop_mae, "End a stage once train MAE (bpm) falls below");

  EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "Error metrics of predictions against ground truth");
  eval->add_option("--pred", ev.pred, "Prediction CSV (video_id,hr_bpm[,clip])")->required();
  eval->add_option("--truth", ev.truth, "Truth CSV (video_id,hr_true)")->required();
  eval->add_option("--rows", ev.rows, "Output joined rows CSV");
  eval->add_option("--summary", ev.summary, "Output summary JSON (default: stdout)");
  eval->add_flag("--per-clip", ev.per_clip, "Score clip rows instead of video rows");
  eval->add_option("--seed", ev.seed, "Accepted for uniformity; evaluation is deterministic");

  StudyArgs sd;
  auto* study = app.add_subcommand("study", "Compression and resolution study on the synthetic suite");
  sd.cfg.add(study);
  study->add_option("--ops", sd.ops, "Comma-separated degrade ops")->capture_default_str();
  study->add_option("--method", sd.method)->check(CLI::IsMember({"green", "chrom", "pos"}))->capture_default_str();
  study->add_option("--count", sd.count, "Videos in the suite")->capture_default_str();
  study->add_option("--out", sd.out, "Output CSV (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*synth_video) run_synth_video(sv);
    else if (*synth_map) run_synth_map(sm);
    else if (*stmap) run_stmap(st);
    else if (*estimate) run_estimate(es);
    else if (*train) run_train(tr);
    else if (*eval) run_eval(ev);
    else if (*study) run_study(sd);
    return 0;
  } catch (const InputError& e) {
    note(std::string("error: ") + e.what());
    return kExitInput;
  } catch (const MismatchError& e) {
    note(std::string("model/data mismatch: ") + e.what());
    return kExitMismatch;
  } catch (const ConfigError& e) {
    note(std::string("usage: ") + e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    note(std::string("error: ") + e.what());
    return 1;
  }
}
