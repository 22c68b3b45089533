#include <catch_amalgamated.hpp>

#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "emorec/corpus_io.hpp"
#include "emorec/schema.hpp"
#include "support/error_code.hpp"
#include "support/fixtures.hpp"

using namespace emorec;
using Catch::Matchers::WithinAbs;

namespace {

std::string pcm16_wav(const std::vector<std::int16_t>& samples, int rate, int channels = 1,
                      int format = 1, int bits = 16) {
  std::string out;
  const auto u32 = [&](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  };
  const auto u16 = [&](std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>(v >> 8));
  };
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(samples.size() * 2);
  out += "RIFF";
  u32(36 + data_bytes);
  out += "WAVEfmt ";
  u32(16);
  u16(static_cast<std::uint16_t>(format));
  u16(static_cast<std::uint16_t>(channels));
  u32(static_cast<std::uint32_t>(rate));
  u32(static_cast<std::uint32_t>(rate * channels * bits / 8));
  u16(static_cast<std::uint16_t>(channels * bits / 8));
  u16(static_cast<std::uint16_t>(bits));
  out += "data";
  u32(data_bytes);
  for (auto s : samples) u16(static_cast<std::uint16_t>(s));
  return out;
}

LabeledDataset small_dataset(std::size_t rows) {
  LabeledDataset d;
  d.feature_names = feature_schema().names();
  Rng rng(11);
  for (std::size_t r = 0; r < rows; ++r) {
    std::vector<double> v(d.feature_names.size());
    for (auto& x : v) x = rng.uniform(-1e3, 1e3) * std::pow(10.0, rng.uniform(-8, 8));
    d.add_row(v, kEmotions[r % kEmotions.size()], kEmodbSpeakers[r % 10],
              "0" + std::to_string(r) + "a01Wa");
  }
  return d;
}

void write_file(const std::filesystem::path& p, const std::string& bytes) {
  std::ofstream(p, std::ios::binary) << bytes;
}

}  // namespace

TEST_CASE("wav decode of silence and full-scale samples") {
  auto clip = decode_wav(pcm16_wav(std::vector<std::int16_t>(1600, 0), 16000));
  CHECK(clip.samples.size() == 1600);
  CHECK(clip.sample_rate == 16000);
  for (double s : clip.samples) CHECK(s == 0.0);

  clip = decode_wav(pcm16_wav({32767, -32768, 0}, 16000));
  CHECK(clip.samples[0] == 32767.0 / 32768.0);
  CHECK(clip.samples[1] == -1.0);
}

TEST_CASE("stereo wav is downmixed by channel mean") {
  auto clip = decode_wav(pcm16_wav({1000, 3000, -2000, 0}, 8000, 2));
  REQUIRE(clip.samples.size() == 2);
  CHECK(clip.samples[0] == 2000.0 / 32768.0);
  CHECK(clip.samples[1] == -1000.0 / 32768.0);
}

TEST_CASE("wav errors") {
  CHECK(code_of([] { decode_wav("RIFF"); }) == ErrorCode::MalformedWav);
  CHECK(code_of([] { decode_wav(std::string(64, 'x')); }) == ErrorCode::MalformedWav);
  CHECK(code_of([] { decode_wav(pcm16_wav({1, 2}, 16000, 1, 3)); }) ==
        ErrorCode::UnsupportedEncoding);
  CHECK(code_of([] { decode_wav(pcm16_wav({1, 2}, 16000, 1, 1, 8)); }) ==
        ErrorCode::UnsupportedEncoding);
  auto truncated = pcm16_wav({1, 2, 3, 4}, 16000);
  truncated.resize(truncated.size() - 3);
  CHECK(code_of([&] { decode_wav(truncated); }) == ErrorCode::MalformedWav);
  CHECK(code_of([] { load_wav("/nonexistent/file.wav"); }) == ErrorCode::IoError);
}

TEST_CASE("wav write-read-write is bit exact") {
  std::vector<std::int16_t> pcm(4000);
  Rng rng(5);
  for (auto& s : pcm) s = static_cast<std::int16_t>(static_cast<int>(rng.below(65536)) - 32768);
  const std::string bytes = pcm16_wav(pcm, 16000);
  const auto clip = decode_wav(bytes);
  CHECK(encode_wav(clip) == bytes);
  CHECK(encode_wav(decode_wav(encode_wav(clip))) == bytes);
}

TEST_CASE("emodb file names") {
  auto m = parse_emodb_filename("03a01Wa.wav");
  CHECK(m.speaker_id == 3);
  CHECK(m.text_id == "a01");
  CHECK(m.emotion == Label::Anger);
  CHECK(m.variant == "a");
  CHECK(emodb_filename(m) == "03a01Wa.wav");

  m = parse_emodb_filename("16b10Tb.wav");
  CHECK(m.speaker_id == 16);
  CHECK(m.emotion == Label::Sadness);

  CHECK(code_of([] { parse_emodb_filename("03a01Xa.wav"); }) == ErrorCode::UnknownEmotionCode);
  CHECK(code_of([] { parse_emodb_filename("readme.txt"); }) == ErrorCode::UnrecognizedName);
  CHECK(code_of([] { parse_emodb_filename("3a01Wa.wav"); }) == ErrorCode::UnrecognizedName);
}

TEST_CASE("emotion code mapping is a bijection") {
  std::set<char> codes;
  for (Label l : kEmotions) {
    const char c = emodb_code(l);
    codes.insert(c);
    REQUIRE(emotion_from_code(c).has_value());
    CHECK(*emotion_from_code(c) == l);
  }
  CHECK(codes == std::set<char>{'W', 'L', 'E', 'A', 'F', 'T', 'N'});
}

TEST_CASE("corpus loading") {
  const auto dir = fixtures::temp_dir("corpus");
  CHECK(code_of([&] { load_corpus(dir); }) == ErrorCode::EmptyCorpus);
  CHECK(code_of([&] { load_corpus(dir / "missing"); }) == ErrorCode::IoError);

  const auto tone = fixtures::clip(fixtures::sine(200, 8000, 0.5));
  save_wav(tone, dir / "08b02Fa.wav");
  save_wav(tone, dir / "03a01Wa.wav");
  write_file(dir / "10a05Ta.wav", "not a wav file at all");
  write_file(dir / "notes.txt", "ignored");

  const auto load = load_corpus(dir);
  REQUIRE(load.entries.size() == 2);
  CHECK(load.skipped == 1);
  CHECK(load.warnings.size() == 1);
  CHECK(load.entries[0].meta.speaker_id == 3);
  CHECK(load.entries[1].meta.emotion == Label::Happiness);

  const auto again = load_corpus(dir);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(again.entries[i].clip.source_id == load.entries[i].clip.source_id);
    CHECK(again.entries[i].clip.samples == load.entries[i].clip.samples);
  }
}

TEST_CASE("feature matrix round trip") {
  const auto d = small_dataset(3);
  std::stringstream ss;
  write_feature_matrix(d, ss);
  const auto back = read_feature_matrix(ss, feature_schema().names());
  CHECK(back.labels == d.labels);
  CHECK(back.speakers == d.speakers);
  CHECK(back.source_ids == d.source_ids);
  REQUIRE(back.values.rows() == 3);
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < d.num_features(); ++c)
      CHECK_THAT(back.values(r, c), WithinAbs(d.values(r, c), 1e-12 * std::max(1.0, std::abs(d.values(r, c)))));
  // shortest round-trip formatting makes this exact
  CHECK(back.values == d.values);

  const auto dir = fixtures::temp_dir("matrix");
  save_feature_matrix(d, dir / "f.csv");
  CHECK(load_feature_matrix(dir / "f.csv").values == d.values);
}

TEST_CASE("feature matrix schema checks") {
  auto d = small_dataset(2);
  auto short_d = d.select_columns(std::vector<std::size_t>([] {
    std::vector<std::size_t> c(486);
    std::iota(c.begin(), c.end(), 0);
    return c;
  }()));
  std::stringstream ss;
  write_feature_matrix(short_d, ss);
  CHECK(code_of([&] { read_feature_matrix(ss, feature_schema().names()); }) ==
        ErrorCode::SchemaMismatch);

  std::swap(d.feature_names[0], d.feature_names[1]);
  std::stringstream permuted;
  write_feature_matrix(d, permuted);
  CHECK(code_of([&] { read_feature_matrix(permuted, feature_schema().names()); }) ==
        ErrorCode::SchemaMismatch);

  CHECK(code_of([] { load_feature_matrix("/nonexistent/features.csv"); }) == ErrorCode::IoError);
}

TEST_CASE("dataset validation") {
  auto d = small_dataset(2);
  CHECK_NOTHROW(validate(d));
  d.source_ids[1] = d.source_ids[0];
  CHECK(code_of([&] { validate(d); }) == ErrorCode::InvalidDataset);
  d = small_dataset(2);
  d.values(0, 3) = std::numeric_limits<double>::quiet_NaN();
  CHECK(code_of([&] { validate(d); }) == ErrorCode::InvalidDataset);
}
