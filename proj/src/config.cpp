#include "pulsebench/config.hpp"

#include "pulsebench/error.hpp"
#include "pulsebench/formats.hpp"

#include <cctype>
#include <cstdlib>
#include <set>
#include <sstream>

namespace pulsebench {

using nlohmann::json;

namespace {

std::string color_name(PipelineColor c) {
  switch (c) {
    case PipelineColor::yuv: return "YUV";
    case PipelineColor::rgb: return "RGB";
    case PipelineColor::raw_gray: return "RAWGRAY";
  }
  return "YUV";
}

PipelineColor parse_color(const std::string& s) {
  if (s == "YUV") return PipelineColor::yuv;
  if (s == "RGB") return PipelineColor::rgb;
  if (s == "RAWGRAY") return PipelineColor::raw_gray;
  throw ConfigError("unknown color mode '" + s + "' (YUV, RGB or RAWGRAY)");
}

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.contains(it.key())) throw ConfigError("unknown config key '" + where + it.key() + "'");
  }
}

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

json parse_toml_scalar(const std::string& raw, std::size_t line_no) {
  const std::string v = trim(raw);
  if (v.empty()) throw ConfigError("TOML line " + std::to_string(line_no) + ": missing value");
  if (v.front() == '"') {
    if (v.size() < 2 || v.back() != '"') throw ConfigError("TOML line " + std::to_string(line_no) + ": bad string");
    return v.substr(1, v.size() - 2);
  }
  if (v == "true") return true;
  if (v == "false") return false;
  try {
    std::size_t used = 0;
    if (v.find_first_of(".eE") == std::string::npos) {
      const long long i = std::stoll(v, &used);
      if (used == v.size()) return i;
    } else {
      const double d = std::stod(v, &used);
      if (used == v.size()) return d;
    }
  } catch (const std::exception&) {
  }
  throw ConfigError("TOML line " + std::to_string(line_no) + ": cannot parse value '" + v + "'");
}

}  // namespace

void PipelineConfig::validate() const {
  if (window_frames < 1 || stride_frames < 1) throw ConfigError("window and stride must be >= 1");
  if (grid.rows < 1 || grid.cols < 1) throw ConfigError("grid must be at least 1x1");
  band.validate();
  if (!(train.lr > 0.0) || train.epochs < 1 || train.batch < 1) throw ConfigError("invalid training settings");
  if (!(train.p_mask >= 0.0 && train.p_mask <= 1.0)) throw ConfigError("p_mask must be in [0, 1]");
  if (train.mask_min < 1 || train.mask_min > train.mask_max) throw ConfigError("invalid mask length range");
}

json to_json(const PipelineConfig& c) {
  json j;
  j["window_frames"] = c.window_frames;
  j["stride_frames"] = c.stride_frames;
  j["grid"] = {c.grid.rows, c.grid.cols};
  j["band"] = {c.band.lo_bpm, c.band.hi_bpm};
  j["color"] = color_name(c.color);
  j["method"] = c.method;
  j["seed"] = c.seed;
  j["paths"] = c.paths;
  j["train"] = {{"lr", c.train.lr},
                {"epochs", c.train.epochs},
                {"batch", c.train.batch},
                {"p_mask", c.train.p_mask},
                {"mask_min", c.train.mask_min},
                {"mask_max", c.train.mask_max},
                {"synthetic_count", c.train.synthetic_count},
                {"synthetic_epochs", c.train.synthetic_epochs},
                {"real_epochs", c.train.real_epochs}};
  return j;
}

PipelineConfig pipeline_config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config root must be an object");
  reject_unknown(j, {"window_frames", "stride_frames", "grid", "band", "color", "method", "seed", "paths", "train"}, "");
  PipelineConfig c;
  try {
    if (j.contains("window_frames")) c.window_frames = j.at("window_frames").get<int>();
    if (j.contains("stride_frames")) c.stride_frames = j.at("stride_frames").get<int>();
    if (j.contains("grid")) {
      const auto g = j.at("grid").get<std::vector<int>>();
      if (g.size() != 2) throw ConfigError("grid must be [rows, cols]");
      c.grid = {g[0], g[1]};
    }
    if (j.contains("band")) {
      const auto b = j.at("band").get<std::vector<double>>();
      if (b.size() != 2) throw ConfigError("band must be [lo_bpm, hi_bpm]");
      c.band = {b[0], b[1]};
    }
    if (j.contains("color")) c.color = parse_color(j.at("color").get<std::string>());
    if (j.contains("method")) c.method = j.at("method").get<std::string>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("paths")) c.paths = j.at("paths").get<std::map<std::string, std::string>>();
    if (j.contains("train")) {
      const json& t = j.at("train");
      reject_unknown(t, {"lr", "epochs", "batch", "p_mask", "mask_min", "mask_max", "synthetic_count",
                         "synthetic_epochs", "real_epochs"}, "train.");
      if (t.contains("lr")) c.train.lr = t.at("lr").get<double>();
      if (t.contains("epochs")) c.train.epochs = t.at("epochs").get<int>();
      if (t.contains("batch")) c.train.batch = t.at("batch").get<int>();
      if (t.contains("p_mask")) c.train.p_mask = t.at("p_mask").get<double>();
      if (t.contains("mask_min")) c.train.mask_min = t.at("mask_min").get<int>();
      if (t.contains("mask_max")) c.train.mask_max = t.at("mask_max").get<int>();
      if (t.contains("synthetic_count")) c.train.synthetic_count = t.at("synthetic_count").get<int>();
      if (t.contains("synthetic_epochs")) c.train.synthetic_epochs = t.at("synthetic_epochs").get<int>();
      if (t.contains("real_epochs")) c.train.real_epochs = t.at("real_epochs").get<int>();
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config type error: ") + e.what());
  }
  c.validate();
  return c;
}

json parse_toml(std::string_view text) {
  json root = json::object();
  json* table = &root;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    // strip comments outside strings
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') in_string = !in_string;
      if (line[i] == '#' && !in_string) {
        line.resize(i);
        break;
      }
    }
    const std::string s = trim(line);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError("TOML line " + std::to_string(line_no) + ": bad table header");
      table = &root;
      std::stringstream path(trim(std::string_view(s).substr(1, s.size() - 2)));
      for (std::string part; std::getline(path, part, '.');) {
        json& next = (*table)[trim(part)];
        if (next.is_null()) next = json::object();
        table = &next;
      }
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("TOML line " + std::to_string(line_no) + ": expected key = value");
    std::string key = trim(std::string_view(s).substr(0, eq));
    if (key.size() >= 2 && key.front() == '"' && key.back() == '"') key = key.substr(1, key.size() - 2);
    const std::string value = trim(std::string_view(s).substr(eq + 1));
    if (!value.empty() && value.front() == '[') {
      if (value.back() != ']') throw ConfigError("TOML line " + std::to_string(line_no) + ": unterminated array");
      json arr = json::array();
      std::stringstream items(value.substr(1, value.size() - 2));
      for (std::string item; std::getline(items, item, ',');) {
        if (!trim(item).empty()) arr.push_back(parse_toml_scalar(item, line_no));
      }
      (*table)[key] = arr;
    } else {
      (*table)[key] = parse_toml_scalar(value, line_no);
    }
  }
  return root;
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw InputError("missing config file " + path.string());
  const std::string text = read_file(path);
  if (path.extension() == ".toml") return pipeline_config_from_json(parse_toml(text));
  try {
    return pipeline_config_from_json(json::parse(text));
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("cannot parse JSON config: ") + e.what());
  }
}

std::uint64_t resolve_seed(std::optional<std::uint64_t> explicit_seed, std::uint64_t fallback) {
  if (explicit_seed) return *explicit_seed;
  if (const char* env = std::getenv("PULSEBENCH_SEED"); env && *env) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw ConfigError("PULSEBENCH_SEED is not an unsigned integer");
    }
  }
  return fallback;
}

}  // namespace pulsebench
