#include "pulsebench/formats.hpp"

#include "binary_io.hpp"
#include "pulsebench/error.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace pulsebench {

namespace fs = std::filesystem;
using detail::ByteReader;
using detail::ByteWriter;

namespace {

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s, std::string_view what) {
  double v = 0.0;
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw FormatError(std::string(what) + ": cannot parse number '" + std::string(s) + "'");
  }
  return v;
}

bool is_image_file(const fs::path& p) {
  auto ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".pgm" || ext == ".ppm";
}

}  // namespace

void atomic_write(const fs::path& path, std::string_view bytes) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---- PTRC / trace CSV ------------------------------------------------------

std::string encode_ptrc(const PulseTrace& trace) {
  ByteWriter w;
  w.magic("PTRC");
  w.put<std::uint32_t>(kFormatVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(trace.size()));
  w.put<double>(trace.sample_rate_hz());
  w.bytes(trace.samples().data(), trace.size() * sizeof(double));
  return w.take();
}

PulseTrace decode_ptrc(std::string_view bytes) {
  ByteReader r(bytes, "PTRC");
  r.expect_header("PTRC", kFormatVersion);
  const auto n = r.get<std::uint32_t>();
  const auto fs_hz = r.get<double>();
  if (r.remaining() != static_cast<std::size_t>(n) * sizeof(double)) {
    throw FormatError("PTRC: sample count does not match file size");
  }
  std::vector<double> samples(n);
  for (auto& s : samples) s = r.get<double>();
  r.expect_end();
  return PulseTrace(std::move(samples), fs_hz);
}

std::string encode_trace_csv(const PulseTrace& trace) {
  std::string out = "t_sec,value\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out += format_double(static_cast<double>(i) / trace.sample_rate_hz());
    out += ',';
    out += format_double(trace.samples()[i]);
    out += '\n';
  }
  return out;
}

PulseTrace decode_trace_csv(std::string_view text) {
  const CsvTable table = parse_csv(text);
  const std::size_t tc = table.column("t_sec");
  const std::size_t vc = table.column("value");
  if (table.rows.size() < 2) throw FormatError("trace CSV: need at least 2 rows");
  std::vector<double> t, v;
  for (const auto& row : table.rows) {
    t.push_back(parse_double(row.at(tc), "trace CSV"));
    v.push_back(parse_double(row.at(vc), "trace CSV"));
  }
  const double span = t.back() - t.front();
  if (!(span > 0.0)) throw FormatError("trace CSV: time column must increase");
  return PulseTrace(std::move(v), static_cast<double>(t.size() - 1) / span);
}

PulseTrace read_trace(const fs::path& path) {
  if (!fs::exists(path)) throw InputError("missing trace file " + path.string());
  const std::string bytes = read_file(path);
  return path.extension() == ".csv" ? decode_trace_csv(bytes) : decode_ptrc(bytes);
}

void write_trace(const fs::path& path, const PulseTrace& trace) {
  atomic_write(path, path.extension() == ".csv" ? encode_trace_csv(trace) : encode_ptrc(trace));
}

// ---- FSEQ / frame directories ---------------------------------------------

std::string encode_fseq(const FrameSequence& seq) {
  seq.validate();
  ByteWriter w;
  w.magic("FSEQ");
  w.put<std::uint32_t>(kFormatVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(seq.width()));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(seq.height()));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(seq.channels()));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(seq.size()));
  w.put<double>(seq.frame_rate_hz);
  for (const Image& f : seq.frames) w.bytes(f.data.data(), f.data.size());
  return w.take();
}

FrameSequence decode_fseq(std::string_view bytes) {
  ByteReader r(bytes, "FSEQ");
  r.expect_header("FSEQ", kFormatVersion);
  const auto w = r.get<std::uint32_t>();
  const auto h = r.get<std::uint32_t>();
  const auto c = r.get<std::uint32_t>();
  const auto n = r.get<std::uint32_t>();
  FrameSequence seq;
  seq.frame_rate_hz = r.get<double>();
  if (c != 1 && c != 3) throw FormatError("FSEQ: channel count must be 1 or 3");
  seq.color_space = c == 1 ? ColorSpace::gray : ColorSpace::rgb;
  const std::size_t frame_bytes = static_cast<std::size_t>(w) * h * c;
  if (r.remaining() != frame_bytes * n) throw FormatError("FSEQ: pixel data does not match header");
  for (std::uint32_t i = 0; i < n; ++i) {
    Image img(static_cast<int>(w), static_cast<int>(h), static_cast<int>(c));
    const auto px = r.take(frame_bytes);
    std::copy(px.begin(), px.end(), reinterpret_cast<char*>(img.data.data()));
    seq.frames.push_back(std::move(img));
  }
  seq.validate();
  return seq;
}

void write_frames_dir(const fs::path& dir, const FrameSequence& seq, const std::string& extension) {
  seq.validate();
  fs::create_directories(dir);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const Image& f = seq.frames[i];
    cv::Mat mat(f.height, f.width, f.channels == 1 ? CV_8UC1 : CV_8UC3,
                const_cast<std::uint8_t*>(f.data.data()));
    cv::Mat to_write = mat;
    if (f.channels == 3) {
      // OpenCV stores BGR
      to_write = mat.clone();
      for (int y = 0; y < f.height; ++y) {
        auto* row = to_write.ptr<cv::Vec3b>(y);
        for (int x = 0; x < f.width; ++x) std::swap(row[x][0], row[x][2]);
      }
    }
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%06zu", i);
    const fs::path file = dir / (std::string(name) + extension);
    if (!cv::imwrite(file.string(), to_write)) throw std::runtime_error("cannot write " + file.string());
  }
}

FrameSequence read_frames_dir(const fs::path& dir, double fps) {
  if (!fs::is_directory(dir)) throw InputError("missing frames directory " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && is_image_file(entry.path())) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw InputError("no image files in " + dir.string());
  FrameSequence seq;
  seq.frame_rate_hz = fps;
  for (const fs::path& file : files) {
    cv::Mat mat = cv::imread(file.string(), cv::IMREAD_UNCHANGED);
    if (mat.empty()) throw FormatError("cannot decode image " + file.string());
    if (mat.depth() != CV_8U || (mat.channels() != 1 && mat.channels() != 3)) {
      throw FormatError("unsupported pixel format in " + file.string());
    }
    if (seq.frames.empty()) seq.color_space = mat.channels() == 1 ? ColorSpace::gray : ColorSpace::rgb;
    Image img(mat.cols, mat.rows, mat.channels());
    for (int y = 0; y < mat.rows; ++y) {
      const auto* row = mat.ptr<std::uint8_t>(y);
      for (int x = 0; x < mat.cols; ++x) {
        if (img.channels == 1) {
          img.at(x, y, 0) = row[x];
        } else {
          img.at(x, y, 0) = row[3 * x + 2];
          img.at(x, y, 1) = row[3 * x + 1];
          img.at(x, y, 2) = row[3 * x + 0];
        }
      }
    }
    seq.frames.push_back(std::move(img));
  }
  seq.validate();
  return seq;
}

FrameSequence read_video(const fs::path& path, double fps_for_dirs) {
  if (fs::is_directory(path)) return read_frames_dir(path, fps_for_dirs);
  if (!fs::exists(path)) throw InputError("missing video " + path.string());
  return decode_fseq(read_file(path));
}

// ---- landmarks ---------------------------------------------------------------

std::string encode_landmarks_csv(const LandmarkTrack& track) {
  std::string out = "frame_idx,valid";
  for (std::size_t k = 0; k < kLandmarkCount; ++k) {
    out += ",x" + std::to_string(k) + ",y" + std::to_string(k);
  }
  out += '\n';
  for (std::size_t i = 0; i < track.size(); ++i) {
    out += std::to_string(i);
    out += track.valid[i] ? ",1" : ",0";
    for (const Point2& p : track.points[i]) {
      out += ',' + format_double(p.x) + ',' + format_double(p.y);
    }
    out += '\n';
  }
  return out;
}

LandmarkTrack decode_landmarks_csv(std::string_view text) {
  LandmarkTrack track;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.rfind("frame_idx", 0) == 0) continue;
    std::vector<std::string_view> fields;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      fields.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (fields.size() != 2 + 2 * kLandmarkCount) {
      throw FormatError("landmarks CSV line " + std::to_string(line_no) + ": expected " +
                        std::to_string(2 + 2 * kLandmarkCount) + " fields");
    }
    const auto idx = static_cast<std::size_t>(parse_double(fields[0], "landmarks CSV"));
    if (idx != track.size()) {
      throw FormatError("landmarks CSV line " + std::to_string(line_no) + ": frames must be consecutive from 0");
    }
    LandmarkFrame frame{};
    for (std::size_t k = 0; k < kLandmarkCount; ++k) {
      frame[k] = {parse_double(fields[2 + 2 * k], "landmarks CSV"),
                  parse_double(fields[3 + 2 * k], "landmarks CSV")};
    }
    track.points.push_back(frame);
    track.valid.push_back(parse_double(fields[1], "landmarks CSV") != 0.0);
  }
  return track;
}

// ---- STMP ------------------------------------------------------------------

std::string encode_stmp(const SpatialTemporalMap& map) {
  ByteWriter w;
  w.magic("STMP");
  w.put<std::uint32_t>(kFormatVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(map.blocks));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(map.frames));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(map.channels));
  w.put<double>(map.frame_rate_hz);
  for (bool m : map.mask) w.put<std::uint8_t>(m ? 1 : 0);
  for (double v : map.values) w.put<float>(static_cast<float>(v));
  return w.take();
}

SpatialTemporalMap decode_stmp(std::string_view bytes) {
  ByteReader r(bytes, "STMP");
  r.expect_header("STMP", kFormatVersion);
  const auto n = r.get<std::uint32_t>();
  const auto t = r.get<std::uint32_t>();
  const auto c = r.get<std::uint32_t>();
  const auto fps = r.get<double>();
  if (c != 1 && c != 3) throw FormatError("STMP: channel count must be 1 or 3");
  const std::size_t count = static_cast<std::size_t>(n) * t * c;
  if (r.remaining() != t + count * sizeof(float)) throw FormatError("STMP: payload does not match header");
  SpatialTemporalMap map(static_cast<int>(n), static_cast<int>(t), static_cast<int>(c), fps);
  for (std::uint32_t i = 0; i < t; ++i) map.mask[i] = r.get<std::uint8_t>() != 0;
  for (auto& v : map.values) v = r.get<float>();
  r.expect_end();
  return map;
}

// ---- RGB trace CSV ---------------------------------------------------------

std::string encode_rgb_csv(const RgbTrace& trace) {
  std::string out = "frame,r,g,b\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out += std::to_string(i) + ',' + format_double(trace.r[i]) + ',' + format_double(trace.g[i]) + ',' +
           format_double(trace.b[i]) + '\n';
  }
  return out;
}

RgbTrace decode_rgb_csv(std::string_view text, double fps) {
  const CsvTable table = parse_csv(text);
  const std::size_t rc = table.column("r"), gc = table.column("g"), bc = table.column("b");
  RgbTrace trace;
  trace.sample_rate_hz = fps;
  for (const auto& row : table.rows) {
    trace.r.push_back(parse_double(row.at(rc), "rgb CSV"));
    trace.g.push_back(parse_double(row.at(gc), "rgb CSV"));
    trace.b.push_back(parse_double(row.at(bc), "rgb CSV"));
  }
  trace.validate();
  return trace;
}

// ---- CSV -------------------------------------------------------------------

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw FormatError("CSV: missing column '" + std::string(name) + "'");
}

CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
    if (line.back() == ',') fields.emplace_back();
    if (table.header.empty()) {
      table.header = std::move(fields);
    } else {
      if (fields.size() != table.header.size()) throw FormatError("CSV: ragged row: " + line);
      table.rows.push_back(std::move(fields));
    }
  }
  if (table.header.empty()) throw FormatError("CSV: empty file");
  return table;
}

}  // namespace pulsebench
