#include "wepadim/pgm.hpp"

#include <cctype>
#include <fstream>
#include <iterator>
#include <string>

#include "wepadim/error.hpp"

namespace wepadim {
namespace {

class PgmHeaderReader {
 public:
  PgmHeaderReader(const std::vector<char>& bytes, std::string origin)
      : b_(bytes), origin_(std::move(origin)) {}

  std::size_t next_number() {
    skip_ws_and_comments();
    if (pos_ >= b_.size() || !std::isdigit(static_cast<unsigned char>(b_[pos_]))) {
      fail(ErrorKind::format, origin_ + ": malformed PGM header");
    }
    std::size_t v = 0;
    while (pos_ < b_.size() && std::isdigit(static_cast<unsigned char>(b_[pos_]))) {
      v = v * 10 + static_cast<std::size_t>(b_[pos_++] - '0');
    }
    return v;
  }
  // Exactly one whitespace byte separates maxval from the raster.
  std::size_t raster_offset() {
    if (pos_ >= b_.size() || !std::isspace(static_cast<unsigned char>(b_[pos_]))) {
      fail(ErrorKind::format, origin_ + ": malformed PGM header");
    }
    return pos_ + 1;
  }
  std::size_t pos_ = 2;

 private:
  void skip_ws_and_comments() {
    while (pos_ < b_.size()) {
      if (b_[pos_] == '#') {
        while (pos_ < b_.size() && b_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(b_[pos_]))) {
        ++pos_;
      } else {
        break;
      }
    }
  }
  const std::vector<char>& b_;
  std::string origin_;
};

}  // namespace

Greymap read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot open " + path.string());
  const std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
    fail(ErrorKind::format, path.string() + ": not a binary PGM (P5)");
  }
  PgmHeaderReader reader(bytes, path.string());
  Greymap img;
  img.width = reader.next_number();
  img.height = reader.next_number();
  const std::size_t maxval = reader.next_number();
  if (maxval == 0 || maxval > 65535) fail(ErrorKind::format, path.string() + ": invalid PGM maxval");
  img.maxval = static_cast<std::uint16_t>(maxval);
  const std::size_t offset = reader.raster_offset();
  const std::size_t bpp = maxval > 255 ? 2 : 1;
  const std::size_t n = img.width * img.height;
  if (bytes.size() < offset + n * bpp) fail(ErrorKind::io, path.string() + ": truncated PGM raster");
  img.pixels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + offset + i * bpp);
    img.pixels[i] = bpp == 2 ? static_cast<std::uint16_t>((p[0] << 8) | p[1]) : p[0];
  }
  return img;
}

void write_pgm(const Greymap& image, const std::filesystem::path& path) {
  if (image.pixels.size() != image.width * image.height) {
    fail(ErrorKind::shape, "greymap pixel count does not match its dimensions");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::io, "cannot open " + path.string() + " for writing");
  out << "P5\n" << image.width << ' ' << image.height << '\n' << image.maxval << '\n';
  const bool wide = image.maxval > 255;
  std::vector<unsigned char> raster;
  raster.reserve(image.pixels.size() * (wide ? 2 : 1));
  for (const auto v : image.pixels) {
    if (wide) raster.push_back(static_cast<unsigned char>(v >> 8));
    raster.push_back(static_cast<unsigned char>(v & 0xFF));
  }
  out.write(reinterpret_cast<const char*>(raster.data()), static_cast<std::streamsize>(raster.size()));
  if (!out) fail(ErrorKind::io, "failed writing " + path.string());
}

}  // namespace wepadim
