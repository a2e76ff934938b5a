#include "helmnet/image.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace helmnet {

namespace {

inline std::uint8_t clamp_u8(long v) {
  return static_cast<std::uint8_t>(v < 0 ? 0 : (v > 255 ? 255 : v));
}

inline bool is_space(std::uint8_t c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n';
}

}  // namespace

Image decode_ppm(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '6')
    throw PpmParseError("bad PPM magic (expected P6)", 0);
  std::size_t pos = 2;

  auto skip = [&]() {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (is_space(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto read_int = [&](const char* what) -> long {
    skip();
    std::size_t start = pos;
    long v = 0;
    while (pos < bytes.size() && bytes[pos] >= '0' && bytes[pos] <= '9') {
      v = v * 10 + (bytes[pos] - '0');
      if (v > 1000000000L)
        throw PpmParseError(std::string("PPM ") + what + " out of range", start);
      ++pos;
    }
    if (pos == start)
      throw PpmParseError(std::string("expected PPM ") + what, pos);
    return v;
  };

  long w = read_int("width");
  long h = read_int("height");
  long maxval = read_int("maxval");
  if (w < 1 || h < 1)
    throw PpmParseError("PPM dimensions must be positive", pos);
  if (maxval != 255)
    throw PpmParseError("unsupported PPM maxval " + std::to_string(maxval) +
                            " (only 8-bit, maxval 255)",
                        pos);
  if (pos >= bytes.size() || !is_space(bytes[pos]))
    throw PpmParseError("expected single whitespace after maxval", pos);
  ++pos;

  std::size_t need = static_cast<std::size_t>(w) * h * 3;
  if (bytes.size() - pos < need)
    throw PpmParseError("truncated PPM payload: need " + std::to_string(need) +
                            " bytes, have " + std::to_string(bytes.size() - pos),
                        pos);
  Image img;
  img.width = static_cast<int>(w);
  img.height = static_cast<int>(h);
  img.pixels.assign(bytes.begin() + pos, bytes.begin() + pos + need);
  return img;
}

std::vector<std::uint8_t> encode_ppm(const Image& image) {
  if (image.width < 1 || image.height < 1 ||
      image.pixels.size() !=
          static_cast<std::size_t>(image.width) * image.height * 3)
    throw ContractError("encode_ppm: inconsistent image");
  char header[64];
  int n = std::snprintf(header, sizeof header, "P6\n%d %d\n255\n", image.width,
                        image.height);
  std::vector<std::uint8_t> out(header, header + n);
  out.insert(out.end(), image.pixels.begin(), image.pixels.end());
  return out;
}

Image read_ppm_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                  std::istreambuf_iterator<char>());
  try {
    return decode_ppm(bytes);
  } catch (const PpmParseError& e) {
    throw DataError(path + ": " + e.what());
  }
}

void write_ppm_file(const std::string& path, const Image& image) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot write " + path);
  auto bytes = encode_ppm(image);
  f.write(reinterpret_cast<const char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
  if (!f) throw DataError("write failed: " + path);
}

Image resize_bilinear(const Image& image, int target_w, int target_h) {
  if (target_w < 1 || target_h < 1)
    throw ContractError("resize targets must be >= 1");
  if (image.width == target_w && image.height == target_h) return image;
  Image out;
  out.width = target_w;
  out.height = target_h;
  out.pixels.resize(static_cast<std::size_t>(target_w) * target_h * 3);
  double sx = static_cast<double>(image.width) / target_w;
  double sy = static_cast<double>(image.height) / target_h;
  for (int y = 0; y < target_h; ++y) {
    double fy = (y + 0.5) * sy - 0.5;
    int y0 = static_cast<int>(std::floor(fy));
    double ty = fy - y0;
    int y0c = std::min(std::max(y0, 0), image.height - 1);
    int y1c = std::min(std::max(y0 + 1, 0), image.height - 1);
    for (int x = 0; x < target_w; ++x) {
      double fx = (x + 0.5) * sx - 0.5;
      int x0 = static_cast<int>(std::floor(fx));
      double tx = fx - x0;
      int x0c = std::min(std::max(x0, 0), image.width - 1);
      int x1c = std::min(std::max(x0 + 1, 0), image.width - 1);
      for (int c = 0; c < 3; ++c) {
        double top = (1.0 - tx) * image.at(x0c, y0c, c) + tx * image.at(x1c, y0c, c);
        double bot = (1.0 - tx) * image.at(x0c, y1c, c) + tx * image.at(x1c, y1c, c);
        double v = (1.0 - ty) * top + ty * bot;
        out.at(x, y, c) = clamp_u8(std::lround(v));
      }
    }
  }
  return out;
}

}  // namespace helmnet
