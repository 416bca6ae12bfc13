#include "mlpinit/model_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "mlpinit/errors.hpp"

namespace mlpinit {

namespace {

template <typename T>
T to_little_endian(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  }
  return v;
}

class Writer {
 public:
  void u32(std::uint32_t v) { raw(to_little_endian(v)); }
  void f64(double v) { raw(to_little_endian(std::bit_cast<std::uint64_t>(v))); }
  void bytes(std::string_view b) { out_.append(b); }
  std::string take() { return std::move(out_); }

 private:
  template <typename T>
  void raw(T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out_.append(buf, sizeof(T));
  }
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}

  std::uint32_t u32(const char* what) { return to_little_endian(raw<std::uint32_t>(what)); }
  double f64(const char* what) {
    return std::bit_cast<double>(to_little_endian(raw<std::uint64_t>(what)));
  }
  std::string_view bytes(std::size_t n, const char* what) {
    need(n, what);
    auto out = in_.substr(pos_, n);
    pos_ += n;
    return out;
  }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  void need(std::size_t n, const char* what) {
    if (in_.size() - pos_ < n) {
      throw FormatError(std::string("model file truncated while reading ") + what);
    }
  }
  template <typename T>
  T raw(const char* what) {
    need(sizeof(T), what);
    T v;
    std::memcpy(&v, in_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string_view in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string serialize_model(const MlpModel& model) {
  Writer w;
  w.bytes(kModelMagic);
  w.u32(kModelFormatVersion);
  w.u32(static_cast<std::uint32_t>(model.topology()));
  w.u32(static_cast<std::uint32_t>(model.layers().size()));
  for (const auto& layer : model.layers()) {
    w.u32(static_cast<std::uint32_t>(layer.weights.rows()));
    w.u32(static_cast<std::uint32_t>(layer.weights.cols()));
    for (double v : layer.weights.data()) w.f64(v);
    for (double v : layer.bias) w.f64(v);
  }
  return w.take();
}

MlpModel deserialize_model(std::string_view bytes) {
  Reader r(bytes);
  if (r.bytes(kModelMagic.size(), "magic") != kModelMagic) {
    throw FormatError("not a model file (bad magic bytes)");
  }
  const auto version = r.u32("version");
  if (version != kModelFormatVersion) {
    throw UnsupportedVersionError("model format version " + std::to_string(version) +
                                  " is not supported (this build reads version " +
                                  std::to_string(kModelFormatVersion) + ")");
  }
  const auto depth = r.u32("topology");
  if (depth < 1 || depth > 3) {
    throw FormatError("invalid topology depth " + std::to_string(depth));
  }
  const auto topology = static_cast<Topology>(depth);
  const auto dims = layer_dims(topology);
  const auto count = r.u32("layer count");
  if (count + 1 != dims.size()) {
    throw FormatError("layer count " + std::to_string(count) + " does not match " +
                      std::string(to_string(topology)));
  }
  std::vector<Layer> layers;
  for (std::uint32_t k = 0; k < count; ++k) {
    const auto rows = r.u32("layer rows");
    const auto cols = r.u32("layer cols");
    if (rows != dims[k + 1] || cols != dims[k]) {
      throw FormatError("layer " + std::to_string(k) + " is " + std::to_string(rows) + "x" +
                        std::to_string(cols) + ", expected " + std::to_string(dims[k + 1]) +
                        "x" + std::to_string(dims[k]));
    }
    std::vector<double> w(static_cast<std::size_t>(rows) * cols);
    for (double& v : w) v = r.f64("weights");
    std::vector<double> b(rows);
    for (double& v : b) v = r.f64("bias");
    layers.push_back({Matrix(rows, cols, std::move(w)), std::move(b)});
  }
  if (r.remaining() != 0) {
    throw FormatError("trailing bytes after model payload");
  }
  return MlpModel(topology, std::move(layers));
}

void save_model(const MlpModel& model, const std::filesystem::path& path) {
  const auto bytes = serialize_model(model);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

MlpModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_model(bytes);
}

}  // namespace mlpinit
