#pragma once

// Classifier-agnostic training, prediction and text persistence.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "emorec/corpus_io.hpp"
#include "emorec/dataset.hpp"
#include "emorec/error.hpp"
#include "emorec/mlp.hpp"
#include "emorec/svm.hpp"

namespace emorec {

using ClassifierConfig = std::variant<SvmConfig, MlpConfig>;

inline std::string classifier_name(const ClassifierConfig& c) {
  return std::holds_alternative<SvmConfig>(c) ? "svm" : "mlp";
}

inline constexpr std::string_view kModelMagic = "emorec-model";
inline constexpr int kModelVersion = 1;

class Model {
 public:
  Model() = default;
  explicit Model(SvmModel m) : impl_(std::move(m)) {}
  explicit Model(MlpModel m) : impl_(std::move(m)) {}

  bool is_svm() const { return std::holds_alternative<SvmModel>(impl_); }
  const SvmModel& svm() const { return std::get<SvmModel>(impl_); }
  const MlpModel& mlp() const { return std::get<MlpModel>(impl_); }

  const std::vector<int>& classes() const {
    return std::visit([](const auto& m) -> const std::vector<int>& { return m.classes; }, impl_);
  }
  std::size_t dims() const {
    return std::visit([](const auto& m) { return m.scaler.dims(); }, impl_);
  }

  int predict(std::span<const double> x) const {
    return std::visit([&](const auto& m) { return m.predict(x); }, impl_);
  }

  std::vector<int> predict(const Matrix& x) const {
    std::vector<int> out(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) out[r] = predict(x.row(r));
    return out;
  }

  bool operator==(const Model&) const = default;

 private:
  std::variant<SvmModel, MlpModel> impl_;
};

/// `seed` drives the SMO loop starts or the MLP init and shuffles (it
/// replaces MlpConfig::seed).
inline Model train(const Matrix& x, std::span<const int> labels, const ClassifierConfig& cfg,
                   std::uint64_t seed) {
  if (const auto* s = std::get_if<SvmConfig>(&cfg)) return Model(train_svm(x, labels, *s, seed));
  MlpConfig m = std::get<MlpConfig>(cfg);
  m.seed = seed;
  return Model(train_mlp(x, labels, m));
}

namespace detail {

inline void write_values(std::ostream& out, std::span<const double> v) {
  for (std::size_t i = 0; i < v.size(); ++i) out << (i ? " " : "") << detail::format_double(v[i]);
  out << '\n';
}

inline void write_ints(std::ostream& out, std::span<const int> v) {
  for (std::size_t i = 0; i < v.size(); ++i) out << (i ? " " : "") << v[i];
  out << '\n';
}

class ModelReader {
 public:
  explicit ModelReader(std::istream& in) : in_(in) {}

  std::string word() {
    std::string w;
    if (!(in_ >> w)) fail(ErrorCode::IoError, "model file truncated");
    return w;
  }
  void expect(std::string_view key) {
    const auto w = word();
    if (w != key) fail(ErrorCode::IoError, "model file: expected '" + std::string(key) + "', got '" + w + "'");
  }
  double number() { return detail::parse_double(word()); }
  long long integer() {
    const auto w = word();
    long long v = 0;
    auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
    if (ec != std::errc() || ptr != w.data() + w.size())
      fail(ErrorCode::IoError, "model file: not an integer: '" + w + "'");
    return v;
  }
  std::uint64_t unsigned_integer() {
    const auto w = word();
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
    if (ec != std::errc() || ptr != w.data() + w.size())
      fail(ErrorCode::IoError, "model file: not an unsigned integer: '" + w + "'");
    return v;
  }
  std::size_t count() {
    const auto v = integer();
    if (v < 0) fail(ErrorCode::IoError, "model file: negative count");
    return static_cast<std::size_t>(v);
  }
  std::vector<double> numbers(std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = number();
    return v;
  }

 private:
  std::istream& in_;
};

inline void write_scaler(std::ostream& out, const MinMaxScaler& s) {
  out << "scaler " << s.dims() << '\n';
  write_values(out, s.lo);
  write_values(out, s.hi);
}

inline MinMaxScaler read_scaler(ModelReader& r) {
  r.expect("scaler");
  const std::size_t d = r.count();
  MinMaxScaler s;
  s.lo = r.numbers(d);
  s.hi = r.numbers(d);
  return s;
}

}  // namespace detail

/// Versioned plain-text format; numbers round-trip exactly.
inline void write_model(std::ostream& out, const Model& model) {
  using detail::write_ints;
  using detail::write_values;
  out << kModelMagic << ' ' << kModelVersion << '\n';
  if (model.is_svm()) {
    const auto& m = model.svm();
    out << "type svm\n";
    out << "c " << detail::format_double(m.config.c) << "\nkernel_degree " << m.config.kernel_degree
        << "\ntolerance " << detail::format_double(m.config.tolerance) << "\nmax_passes "
        << m.config.max_passes << "\nmax_iterations " << m.config.max_iterations << '\n';
    out << "classes " << m.classes.size() << '\n';
    write_ints(out, m.classes);
    detail::write_scaler(out, m.scaler);
    out << "machines " << m.machines.size() << '\n';
    for (const auto& b : m.machines) {
      out << "machine " << b.positive << ' ' << b.negative << ' ' << detail::format_double(b.b) << ' '
          << b.coef.size() << '\n';
      write_values(out, b.coef);
      for (std::size_t s = 0; s < b.support.rows(); ++s) write_values(out, b.support.row(s));
    }
  } else {
    const auto& m = model.mlp();
    out << "type mlp\n";
    out << "hidden_units " << m.config.hidden_units << "\nlearning_rate "
        << detail::format_double(m.config.learning_rate) << "\nmomentum " << detail::format_double(m.config.momentum)
        << "\nepochs " << m.config.epochs << "\nseed " << m.config.seed << "\ninit_range "
        << detail::format_double(m.config.init_range) << '\n';
    out << "classes " << m.classes.size() << '\n';
    write_ints(out, m.classes);
    detail::write_scaler(out, m.scaler);
    out << "network " << m.net.inputs() << ' ' << m.net.hidden() << ' ' << m.net.outputs() << '\n';
    write_values(out, m.net.params());
  }
  out << "end\n";
}

inline Model read_model(std::istream& in) {
  detail::ModelReader r(in);
  if (r.word() != kModelMagic) fail(ErrorCode::IoError, "not a model file");
  const auto version = r.integer();
  if (version != kModelVersion)
    fail(ErrorCode::UnsupportedVersion, "model format version " + std::to_string(version) +
                                            " is not supported (expected " +
                                            std::to_string(kModelVersion) + ")");
  r.expect("type");
  const auto type = r.word();
  const auto read_classes = [&] {
    r.expect("classes");
    std::vector<int> c(r.count());
    for (auto& v : c) v = static_cast<int>(r.integer());
    return c;
  };
  if (type == "svm") {
    SvmModel m;
    r.expect("c");
    m.config.c = r.number();
    r.expect("kernel_degree");
    m.config.kernel_degree = static_cast<int>(r.integer());
    r.expect("tolerance");
    m.config.tolerance = r.number();
    r.expect("max_passes");
    m.config.max_passes = static_cast<int>(r.integer());
    r.expect("max_iterations");
    m.config.max_iterations = static_cast<int>(r.integer());
    validate(m.config);
    m.classes = read_classes();
    m.scaler = detail::read_scaler(r);
    r.expect("machines");
    const std::size_t nm = r.count();
    if (nm != m.classes.size() * (m.classes.size() - 1) / 2)
      fail(ErrorCode::IoError, "model file: machine count does not match the class count");
    for (std::size_t i = 0; i < nm; ++i) {
      BinaryMachine b;
      r.expect("machine");
      b.positive = static_cast<int>(r.integer());
      b.negative = static_cast<int>(r.integer());
      b.b = r.number();
      const std::size_t nsv = r.count();
      b.coef = r.numbers(nsv);
      b.support = Matrix(0, m.scaler.dims());
      for (std::size_t s = 0; s < nsv; ++s) b.support.append_row(r.numbers(m.scaler.dims()));
      b.finalize(m.config.kernel_degree);
      m.machines.push_back(std::move(b));
    }
    r.expect("end");
    return Model(std::move(m));
  }
  if (type == "mlp") {
    MlpModel m;
    r.expect("hidden_units");
    m.config.hidden_units = r.count();
    r.expect("learning_rate");
    m.config.learning_rate = r.number();
    r.expect("momentum");
    m.config.momentum = r.number();
    r.expect("epochs");
    m.config.epochs = static_cast<int>(r.integer());
    r.expect("seed");
    m.config.seed = r.unsigned_integer();
    r.expect("init_range");
    m.config.init_range = r.number();
    validate(m.config);
    m.classes = read_classes();
    m.scaler = detail::read_scaler(r);
    r.expect("network");
    const std::size_t d = r.count(), h = r.count(), k = r.count();
    if (d != m.scaler.dims() || k != m.classes.size())
      fail(ErrorCode::IoError, "model file: network shape does not match classes or scaler");
    m.net = MlpNetwork(d, h, k);
    m.net.params() = r.numbers(m.net.params().size());
    r.expect("end");
    return Model(std::move(m));
  }
  fail(ErrorCode::IoError, "unknown model type '" + type + "'");
}

inline void save_model(const std::filesystem::path& path, const Model& model) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  write_model(out, model);
  if (!out) fail(ErrorCode::IoError, "write failed for " + path.string());
}

inline Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
  return read_model(in);
}

}  // namespace emorec
