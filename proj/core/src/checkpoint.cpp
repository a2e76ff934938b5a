#include "helmnet/checkpoint.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>

namespace helmnet {

namespace {

const char kMagic[4] = {'H', 'N', 'E', 'T'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(v & 0xff);
  out.push_back((v >> 8) & 0xff);
  out.push_back((v >> 16) & 0xff);
  out.push_back((v >> 24) & 0xff);
}

void put_f32(std::vector<std::uint8_t>& out, float f) {
  std::uint32_t v;
  std::memcpy(&v, &f, 4);
  put_u32(out, v);
}

class Reader {
 public:
  Reader(const std::vector<std::uint8_t>& b) : b_(b) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = b_[pos_] | (b_[pos_ + 1] << 8) | (b_[pos_ + 2] << 16) |
                      (std::uint32_t(b_[pos_ + 3]) << 24);
    pos_ += 4;
    return v;
  }
  float f32() {
    std::uint32_t v = u32();
    float f;
    std::memcpy(&f, &v, 4);
    return f;
  }
  std::string str(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(b_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return b_.size() - pos_; }

 private:
  void need(std::size_t n) {
    if (b_.size() - pos_ < n)
      throw CheckpointError("checkpoint truncated at offset " +
                            std::to_string(pos_));
  }
  const std::vector<std::uint8_t>& b_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_checkpoint(const std::string& path, const CheckpointData& data) {
  std::vector<std::uint8_t> buf;
  buf.insert(buf.end(), kMagic, kMagic + 4);
  put_u32(buf, kCheckpointVersion);

  std::string cfg;
  for (const auto& [k, v] : data.config) cfg += k + "=" + v + "\n";
  put_u32(buf, static_cast<std::uint32_t>(cfg.size()));
  buf.insert(buf.end(), cfg.begin(), cfg.end());

  put_u32(buf, static_cast<std::uint32_t>(data.tensors.size()));
  for (const auto& [name, t] : data.tensors) {
    put_u32(buf, static_cast<std::uint32_t>(name.size()));
    buf.insert(buf.end(), name.begin(), name.end());
    put_u32(buf, static_cast<std::uint32_t>(t.rank()));
    for (std::size_t d : t.shape()) put_u32(buf, static_cast<std::uint32_t>(d));
    for (std::size_t i = 0; i < t.size(); ++i) put_f32(buf, t[i]);
  }

  std::uint32_t crc =
      static_cast<std::uint32_t>(crc32(0L, buf.data(), static_cast<uInt>(buf.size())));
  put_u32(buf, crc);

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot write checkpoint " + path);
  f.write(reinterpret_cast<const char*>(buf.data()),
          static_cast<std::streamsize>(buf.size()));
  if (!f) throw DataError("checkpoint write failed: " + path);
}

CheckpointData load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw CheckpointError("cannot open checkpoint " + path);
  std::vector<std::uint8_t> buf((std::istreambuf_iterator<char>(f)),
                                std::istreambuf_iterator<char>());
  if (buf.size() < 12 || std::memcmp(buf.data(), kMagic, 4) != 0)
    throw CheckpointError(path + ": bad checkpoint magic");

  std::uint32_t stored_crc = buf[buf.size() - 4] | (buf[buf.size() - 3] << 8) |
                             (buf[buf.size() - 2] << 16) |
                             (std::uint32_t(buf[buf.size() - 1]) << 24);
  std::uint32_t crc = static_cast<std::uint32_t>(
      crc32(0L, buf.data(), static_cast<uInt>(buf.size() - 4)));
  if (crc != stored_crc)
    throw CheckpointError(path + ": CRC mismatch (corrupt or truncated)");

  buf.resize(buf.size() - 4);
  Reader r(buf);
  r.str(4);  // magic
  std::uint32_t version = r.u32();
  if (version != kCheckpointVersion)
    throw CheckpointError(path + ": unsupported checkpoint version " +
                          std::to_string(version));

  CheckpointData data;
  std::uint32_t cfg_len = r.u32();
  std::string cfg = r.str(cfg_len);
  std::size_t start = 0;
  while (start < cfg.size()) {
    std::size_t nl = cfg.find('\n', start);
    if (nl == std::string::npos) nl = cfg.size();
    std::string line = cfg.substr(start, nl - start);
    start = nl + 1;
    std::size_t eq = line.find('=');
    if (eq != std::string::npos)
      data.config.emplace_back(line.substr(0, eq), line.substr(eq + 1));
  }

  std::uint32_t count = r.u32();
  for (std::uint32_t i = 0; i < count; ++i) {
    std::uint32_t name_len = r.u32();
    std::string name = r.str(name_len);
    std::uint32_t rank = r.u32();
    if (rank == 0 || rank > 8)
      throw CheckpointError(path + ": tensor '" + name + "' has bad rank");
    std::vector<std::size_t> shape(rank);
    std::size_t n = 1;
    for (auto& d : shape) {
      d = r.u32();
      if (d == 0) throw CheckpointError(path + ": zero dim in '" + name + "'");
      n *= d;
    }
    if (r.remaining() < n * 4)
      throw CheckpointError(path + ": tensor payload truncated in '" + name + "'");
    std::vector<float> values(n);
    for (auto& v : values) v = r.f32();
    data.tensors.emplace_back(name, Tensor::from(std::move(shape), std::move(values)));
  }
  return data;
}

}  // namespace helmnet
