#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace wepadim {

/// Binary greymap (P5). maxval <= 255 stores one byte per sample, larger
/// maxvals two bytes, most significant first.
struct Greymap {
  std::size_t height = 0;
  std::size_t width = 0;
  std::uint16_t maxval = 255;
  std::vector<std::uint16_t> pixels;  // row-major

  friend bool operator==(const Greymap&, const Greymap&) = default;
};

Greymap read_pgm(const std::filesystem::path& path);
void write_pgm(const Greymap& image, const std::filesystem::path& path);

}  // namespace wepadim
