#pragma once

// WAV decoding, EMO-DB file-name metadata, corpus loading and the CSV
// feature-matrix format.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <regex>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "emorec/audio_clip.hpp"
#include "emorec/dataset.hpp"
#include "emorec/error.hpp"
#include "emorec/labels.hpp"
#include "emorec/schema.hpp"

namespace emorec {

namespace fs = std::filesystem;

namespace detail {

inline std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}
inline std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}
inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}
inline void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

inline double parse_double(std::string_view s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    fail(ErrorCode::IoError, "not a number: '" + std::string(s) + "'");
  return v;
}

inline std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace detail

/// Decode a RIFF/WAVE PCM 16-bit file. Multi-channel input is averaged to mono.
inline AudioClip decode_wav(std::string_view bytes, std::string source_id = {}) {
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::size_t n = bytes.size();
  if (n < 12 || std::memcmp(p, "RIFF", 4) != 0 || std::memcmp(p + 8, "WAVE", 4) != 0)
    fail(ErrorCode::MalformedWav, "missing RIFF/WAVE header in " + source_id);

  bool have_fmt = false;
  std::uint16_t channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const unsigned char* data = nullptr;
  std::size_t data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= n) {
    const unsigned char* id = p + pos;
    const std::uint32_t size = detail::read_u32(p + pos + 4);
    const std::size_t body = pos + 8;
    if (size > n - body) fail(ErrorCode::MalformedWav, "chunk overruns file in " + source_id);
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (size < 16) fail(ErrorCode::MalformedWav, "fmt chunk too small in " + source_id);
      std::uint16_t format = detail::read_u16(p + body);
      channels = detail::read_u16(p + body + 2);
      rate = detail::read_u32(p + body + 4);
      bits = detail::read_u16(p + body + 14);
      if (format == 0xFFFE && size >= 26) format = detail::read_u16(p + body + 24);
      if (format != 1) fail(ErrorCode::UnsupportedEncoding, "non-PCM WAV in " + source_id);
      if (bits != 16)
        fail(ErrorCode::UnsupportedEncoding,
             std::to_string(bits) + "-bit samples in " + source_id + " (only 16-bit PCM)");
      if (channels == 0 || rate == 0)
        fail(ErrorCode::MalformedWav, "zero channels or sample rate in " + source_id);
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      if (!have_fmt) fail(ErrorCode::MalformedWav, "data chunk before fmt in " + source_id);
      data = p + body;
      data_size = size;
      break;
    }
    pos = body + size + (size & 1u);
  }
  if (!have_fmt || data == nullptr)
    fail(ErrorCode::MalformedWav, "missing fmt or data chunk in " + source_id);

  const std::size_t frame_bytes = 2u * channels;
  const std::size_t frames = data_size / frame_bytes;
  if (frames == 0) fail(ErrorCode::MalformedWav, "no samples in " + source_id);

  AudioClip clip;
  clip.sample_rate = static_cast<int>(rate);
  clip.source_id = std::move(source_id);
  clip.samples.resize(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    double acc = 0.0;
    for (std::size_t c = 0; c < channels; ++c) {
      const auto raw = static_cast<std::int16_t>(detail::read_u16(data + i * frame_bytes + 2 * c));
      acc += static_cast<double>(raw) / 32768.0;
    }
    clip.samples[i] = acc / channels;
  }
  return clip;
}

inline AudioClip load_wav(const fs::path& path) {
  return decode_wav(detail::read_file(path), path.filename().string());
}

/// Mono PCM16 encoding; samples are scaled by 32768, rounded and clamped.
inline std::string encode_wav(const AudioClip& clip) {
  std::string out;
  const auto data_bytes = static_cast<std::uint32_t>(clip.samples.size() * 2);
  out.reserve(44 + data_bytes);
  out += "RIFF";
  detail::put_u32(out, 36 + data_bytes);
  out += "WAVEfmt ";
  detail::put_u32(out, 16);
  detail::put_u16(out, 1);
  detail::put_u16(out, 1);
  detail::put_u32(out, static_cast<std::uint32_t>(clip.sample_rate));
  detail::put_u32(out, static_cast<std::uint32_t>(clip.sample_rate) * 2);
  detail::put_u16(out, 2);
  detail::put_u16(out, 16);
  out += "data";
  detail::put_u32(out, data_bytes);
  for (double s : clip.samples) {
    const long v = std::clamp(std::lround(s * 32768.0), -32768L, 32767L);
    detail::put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(v)));
  }
  return out;
}

inline void save_wav(const AudioClip& clip, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  const std::string bytes = encode_wav(clip);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::IoError, "write failed for " + path.string());
}

// ---------------------------------------------------------------------------
// EMO-DB naming: <speaker:2 digits><text:letter+2 digits><emotion letter><variant>.wav

inline constexpr std::array<int, 10> kEmodbSpeakers = {3, 8, 9, 10, 11, 12, 13, 14, 15, 16};

struct UtteranceMeta {
  int speaker_id = 0;
  std::string text_id;
  Label emotion = Label::Neutral;
  std::string variant;

  bool operator==(const UtteranceMeta&) const = default;
};

inline UtteranceMeta parse_emodb_filename(std::string_view name) {
  static const std::regex pattern(R"(^(\d{2})([a-z]\d{2})([A-Za-z])([a-z])\.wav$)");
  std::match_results<std::string_view::const_iterator> m;
  if (!std::regex_match(name.begin(), name.end(), m, pattern))
    fail(ErrorCode::UnrecognizedName, "'" + std::string(name) + "' is not an EMO-DB file name");
  UtteranceMeta meta;
  meta.speaker_id = std::stoi(m[1].str());
  if (std::find(kEmodbSpeakers.begin(), kEmodbSpeakers.end(), meta.speaker_id) ==
      kEmodbSpeakers.end())
    fail(ErrorCode::UnrecognizedName, "speaker " + m[1].str() + " is not an EMO-DB actor");
  meta.text_id = m[2].str();
  const auto emotion = emotion_from_code(m[3].str()[0]);
  if (!emotion) fail(ErrorCode::UnknownEmotionCode, "emotion code '" + m[3].str() + "' in " +
                                                       std::string(name));
  meta.emotion = *emotion;
  meta.variant = m[4].str();
  return meta;
}

inline std::string emodb_filename(const UtteranceMeta& meta) {
  char speaker[3];
  std::snprintf(speaker, sizeof speaker, "%02d", meta.speaker_id);
  return std::string(speaker) + meta.text_id + emodb_code(meta.emotion) + meta.variant + ".wav";
}

struct CorpusEntry {
  AudioClip clip;
  UtteranceMeta meta;
};

struct CorpusLoad {
  std::vector<CorpusEntry> entries;
  std::vector<std::string> warnings;
  std::size_t skipped = 0;
};

/// WAV files (by extension, case-insensitive) in a directory, sorted by file name.
inline std::vector<fs::path> list_wav_files(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) fail(ErrorCode::IoError, "not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) {
      return static_cast<char>(std::tolower(c));
    });
    if (ext == ".wav") files.push_back(entry.path());
  }
  if (ec) fail(ErrorCode::IoError, "cannot list " + dir.string() + ": " + ec.message());
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
  return files;
}

/// Every parseable WAV in `dir`. Per-file failures become warnings.
inline CorpusLoad load_corpus(const fs::path& dir) {
  CorpusLoad out;
  for (const auto& path : list_wav_files(dir)) {
    try {
      CorpusEntry e;
      e.meta = parse_emodb_filename(path.filename().string());
      e.clip = load_wav(path);
      out.entries.push_back(std::move(e));
    } catch (const Error& err) {
      out.warnings.push_back(path.filename().string() + ": " + err.what());
      ++out.skipped;
    }
  }
  if (out.entries.empty()) fail(ErrorCode::EmptyCorpus, "no usable WAV files in " + dir.string());
  return out;
}

// ---------------------------------------------------------------------------
// Feature matrix CSV: optional "# provenance=" line, header of feature names
// followed by label,speaker,source_id, then one row per utterance.

inline void write_feature_matrix(const LabeledDataset& d, std::ostream& out) {
  validate(d);
  out << "# provenance=" << d.provenance << '\n';
  for (const auto& name : d.feature_names) out << name << ',';
  out << "label,speaker,source_id\n";
  for (std::size_t r = 0; r < d.size(); ++r) {
    if (d.source_ids[r].find_first_of(",\n\r") != std::string::npos)
      fail(ErrorCode::InvalidDataset, "source id contains a separator: " + d.source_ids[r]);
    for (double v : d.values.row(r)) out << detail::format_double(v) << ',';
    out << label_name(d.labels[r]) << ',' << d.speakers[r] << ',' << d.source_ids[r] << '\n';
  }
}

inline void save_feature_matrix(const LabeledDataset& d, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  write_feature_matrix(d, out);
  if (!out) fail(ErrorCode::IoError, "write failed for " + path.string());
}

inline LabeledDataset read_feature_matrix(std::istream& in,
                                          const std::vector<std::string>& expected_names) {
  LabeledDataset d;
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::IoError, "empty feature matrix");
  constexpr std::string_view kProv = "# provenance=";
  if (line.rfind(kProv, 0) == 0) {
    d.provenance = line.substr(kProv.size());
    if (!std::getline(in, line)) fail(ErrorCode::IoError, "feature matrix has no header");
  }
  const auto header = detail::split(line, ',');
  const std::size_t width = expected_names.size();
  bool ok = header.size() == width + 3 && header[width] == "label" &&
            header[width + 1] == "speaker" && header[width + 2] == "source_id";
  for (std::size_t i = 0; ok && i < width; ++i) ok = header[i] == expected_names[i];
  if (!ok)
    fail(ErrorCode::SchemaMismatch, "header has " + std::to_string(header.size()) +
                                        " columns or differs from the expected " +
                                        std::to_string(width) + " feature names");
  d.feature_names = expected_names;
  d.values = Matrix(0, width);
  std::vector<double> row(width);
  std::size_t line_no = 2;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = detail::split(line, ',');
    if (cells.size() != width + 3)
      fail(ErrorCode::IoError, "line " + std::to_string(line_no) + " has " +
                                   std::to_string(cells.size()) + " cells");
    for (std::size_t i = 0; i < width; ++i) row[i] = detail::parse_double(cells[i]);
    d.add_row(row, label_from_name(cells[width]),
              static_cast<int>(detail::parse_double(cells[width + 1])),
              std::string(cells[width + 2]));
  }
  validate(d);
  return d;
}

inline LabeledDataset load_feature_matrix(
    const fs::path& path, const std::vector<std::string>& expected_names = feature_schema().names()) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
  return read_feature_matrix(in, expected_names);
}

}  // namespace emorec
