#pragma once

#include "pulsebench/classic.hpp"
#include "pulsebench/frames.hpp"
#include "pulsebench/landmarks.hpp"
#include "pulsebench/signal.hpp"
#include "pulsebench/stmap.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace pulsebench {

// Binary layouts are little-endian and start with a 4-byte magic followed by
// a u32 format version. See FORMATS.md for the byte-level description.
constexpr std::uint32_t kFormatVersion = 1;

// Writes to a sibling temporary file, then renames over `path`.
void atomic_write(const std::filesystem::path& path, std::string_view bytes);
std::string read_file(const std::filesystem::path& path);

// PTRC: magic, u32 version, u32 count, f64 fs, f64 samples[count].
std::string encode_ptrc(const PulseTrace& trace);
PulseTrace decode_ptrc(std::string_view bytes);
// CSV with header t_sec,value. The rate is recovered from the time column.
std::string encode_trace_csv(const PulseTrace& trace);
PulseTrace decode_trace_csv(std::string_view text);
// Picks the codec from the extension (.ptrc or .csv).
PulseTrace read_trace(const std::filesystem::path& path);
void write_trace(const std::filesystem::path& path, const PulseTrace& trace);

// FSEQ: magic, u32 version, u32 W, u32 H, u32 C, u32 frame count, f64 fps,
// u8 pixels frame-major (row-major, channel-interleaved within a frame).
std::string encode_fseq(const FrameSequence& seq);
FrameSequence decode_fseq(std::string_view bytes);

// Directory of numbered images (frame_000000.png, ...). PNG and PGM/PPM are
// read; `extension` selects the written format.
void write_frames_dir(const std::filesystem::path& dir, const FrameSequence& seq,
                      const std::string& extension = ".png");
FrameSequence read_frames_dir(const std::filesystem::path& dir, double fps);

// Loads an .fseq file or a frames directory.
FrameSequence read_video(const std::filesystem::path& path, double fps_for_dirs = 30.0);

// frame_idx,valid,x0,y0,...,x80,y80 (header optional on read).
std::string encode_landmarks_csv(const LandmarkTrack& track);
LandmarkTrack decode_landmarks_csv(std::string_view text);

// STMP: magic, u32 version, u32 n, u32 T, u32 C, f64 fps, u8 mask[T],
// f32 values block-major.
std::string encode_stmp(const SpatialTemporalMap& map);
SpatialTemporalMap decode_stmp(std::string_view bytes);

// frame,r,g,b
std::string encode_rgb_csv(const RgbTrace& trace);
RgbTrace decode_rgb_csv(std::string_view text, double fps);

// Minimal CSV reader: header row plus rows of comma-separated fields.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  // Column index; throws FormatError if missing.
  std::size_t column(std::string_view name) const;
};
CsvTable parse_csv(std::string_view text);

}  // namespace pulsebench
