#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "helmnet/common.hpp"

namespace helmnet {

// 8-bit RGB image, row-major, interleaved channels.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // 3 * width * height

  std::uint8_t& at(int x, int y, int c) {
    return pixels[(static_cast<std::size_t>(y) * width + x) * 3 + c];
  }
  std::uint8_t at(int x, int y, int c) const {
    return pixels[(static_cast<std::size_t>(y) * width + x) * 3 + c];
  }
};

// Malformed input reports the byte offset where parsing stopped.
class PpmParseError : public DataError {
 public:
  PpmParseError(const std::string& msg, std::size_t offset)
      : DataError(msg + " (byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// Binary P6 with maxval 255 only; '#' comments in the header are skipped.
Image decode_ppm(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> encode_ppm(const Image& image);

Image read_ppm_file(const std::string& path);
void write_ppm_file(const std::string& path, const Image& image);

// Bilinear, half-pixel centers, edge-clamped.
Image resize_bilinear(const Image& image, int target_w, int target_h);

}  // namespace helmnet
