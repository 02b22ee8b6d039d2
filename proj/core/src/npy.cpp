#include "wepadim/npy.hpp"

#include <bit>
#include <cctype>
#include <cstring>
#include <fstream>
#include <optional>
#include <string_view>

#include "wepadim/error.hpp"

namespace wepadim {
namespace {

static_assert(std::endian::native == std::endian::little,
              "NPY payloads are read and written in host order; big-endian hosts are unsupported");

constexpr char kMagic[] = "\x93NUMPY";
constexpr std::size_t kMagicLen = 6;
constexpr std::size_t kAlign = 64;
constexpr std::size_t kGrowthAxisMaxDigits = 21;

struct Header {
  std::optional<DType> dtype;
  std::string descr;
  std::optional<bool> fortran_order;
  std::optional<Shape> shape;
};

// Parser for the python-literal dict numpy writes. Accepts keys in any order.
class HeaderParser {
 public:
  HeaderParser(std::string_view text, const std::string& origin) : s_(text), origin_(origin) {}

  Header parse() {
    Header h;
    skip_ws();
    expect('{');
    while (true) {
      skip_ws();
      if (peek() == '}') { ++pos_; break; }
      const std::string key = parse_string();
      skip_ws();
      expect(':');
      skip_ws();
      if (key == "descr") {
        h.descr = parse_string();
      } else if (key == "fortran_order") {
        h.fortran_order = parse_bool();
      } else if (key == "shape") {
        h.shape = parse_tuple();
      } else {
        bad("unexpected header key '" + key + "'");
      }
      skip_ws();
      if (peek() == ',') { ++pos_; continue; }
      skip_ws();
      expect('}');
      break;
    }
    if (h.descr.empty() || !h.fortran_order || !h.shape) bad("header is missing a required key");
    if (h.descr == "<f4") h.dtype = DType::f32;
    else if (h.descr == "<f8") h.dtype = DType::f64;
    return h;
  }

 private:
  [[noreturn]] void bad(const std::string& what) const {
    fail(ErrorKind::format, origin_ + ": malformed NPY header: " + what);
  }
  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  void expect(char c) {
    if (peek() != c) bad(std::string("expected '") + c + "'");
    ++pos_;
  }
  std::string parse_string() {
    const char quote = peek();
    if (quote != '\'' && quote != '"') bad("expected quoted string");
    ++pos_;
    const auto end = s_.find(quote, pos_);
    if (end == std::string_view::npos) bad("unterminated string");
    std::string out(s_.substr(pos_, end - pos_));
    pos_ = end + 1;
    return out;
  }
  bool parse_bool() {
    if (s_.substr(pos_, 4) == "True") { pos_ += 4; return true; }
    if (s_.substr(pos_, 5) == "False") { pos_ += 5; return false; }
    bad("expected True or False");
  }
  Shape parse_tuple() {
    expect('(');
    Shape shape;
    while (true) {
      skip_ws();
      if (peek() == ')') { ++pos_; break; }
      if (!std::isdigit(static_cast<unsigned char>(peek()))) bad("expected shape extent");
      std::size_t v = 0;
      while (std::isdigit(static_cast<unsigned char>(peek()))) {
        v = v * 10 + static_cast<std::size_t>(s_[pos_] - '0');
        ++pos_;
      }
      // numpy may append an 'L' suffix on python 2 era files.
      if (peek() == 'L') ++pos_;
      shape.push_back(v);
      skip_ws();
      if (peek() == ',') { ++pos_; continue; }
      skip_ws();
      expect(')');
      break;
    }
    return shape;
  }

  std::string_view s_;
  const std::string& origin_;
  std::size_t pos_ = 0;
};

std::string shape_repr(const Shape& shape) {
  std::string out = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(shape[i]);
  }
  if (shape.size() == 1) out += ",";
  out += ")";
  return out;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot open " + path.string());
  in.seekg(0, std::ios::end);
  const auto size = static_cast<std::size_t>(in.tellg());
  in.seekg(0, std::ios::beg);
  std::vector<std::uint8_t> bytes(size);
  if (size && !in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(size))) {
    fail(ErrorKind::io, "failed reading " + path.string());
  }
  return bytes;
}

void append_payload(const Tensor& tensor, std::vector<std::uint8_t>& out) {
  const auto values = tensor.values();
  if (tensor.dtype() == DType::f64) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(values.data());
    out.insert(out.end(), p, p + values.size() * sizeof(double));
  } else {
    const std::size_t start = out.size();
    out.resize(start + values.size() * sizeof(float));
    for (std::size_t i = 0; i < values.size(); ++i) {
      const float f = static_cast<float>(values[i]);
      std::memcpy(out.data() + start + i * sizeof(float), &f, sizeof(float));
    }
  }
}

}  // namespace

std::string npy_header(const Shape& shape, DType dtype) {
  std::string dict = "{'descr': '" + std::string(to_string(dtype)) +
                     "', 'fortran_order': False, 'shape': " + shape_repr(shape) + ", }";
  if (!shape.empty()) {
    const std::size_t digits = std::to_string(shape.front()).size();
    dict.append(kGrowthAxisMaxDigits - digits, ' ');
  }
  const std::size_t prefix = kMagicLen + 2 + 2;
  const std::size_t unpadded = prefix + dict.size() + 1;
  const std::size_t pad = (kAlign - unpadded % kAlign) % kAlign;
  dict.append(pad, ' ');
  dict.push_back('\n');
  return dict;
}

std::vector<std::uint8_t> encode_npy(const Tensor& tensor) {
  const std::string header = npy_header(tensor.shape(), tensor.dtype());
  if (header.size() > 0xFFFF) fail(ErrorKind::format, "NPY v1.0 header too long");
  std::vector<std::uint8_t> out;
  out.reserve(10 + header.size() + tensor.size() * itemsize(tensor.dtype()));
  out.insert(out.end(), kMagic, kMagic + kMagicLen);
  out.push_back(1);
  out.push_back(0);
  out.push_back(static_cast<std::uint8_t>(header.size() & 0xFF));
  out.push_back(static_cast<std::uint8_t>(header.size() >> 8));
  out.insert(out.end(), header.begin(), header.end());
  append_payload(tensor, out);
  return out;
}

Tensor decode_npy(const std::vector<std::uint8_t>& bytes, const std::string& origin) {
  if (bytes.size() < 10 || std::memcmp(bytes.data(), kMagic, kMagicLen) != 0) {
    fail(ErrorKind::format, origin + ": missing NPY magic");
  }
  const std::uint8_t major = bytes[6];
  std::size_t header_len = 0;
  std::size_t offset = 0;
  if (major == 1) {
    header_len = static_cast<std::size_t>(bytes[8]) | (static_cast<std::size_t>(bytes[9]) << 8);
    offset = 10;
  } else if (major == 2 || major == 3) {
    if (bytes.size() < 12) fail(ErrorKind::format, origin + ": truncated NPY preamble");
    for (int i = 3; i >= 0; --i) header_len = (header_len << 8) | bytes[8 + i];
    offset = 12;
  } else {
    fail(ErrorKind::format, origin + ": unsupported NPY version " + std::to_string(major));
  }
  if (bytes.size() < offset + header_len) fail(ErrorKind::format, origin + ": truncated NPY header");
  const std::string_view text(reinterpret_cast<const char*>(bytes.data() + offset), header_len);
  const Header h = HeaderParser(text, origin).parse();
  if (!h.dtype) fail(ErrorKind::unsupported_dtype, origin + ": unsupported dtype '" + h.descr + "'");
  if (*h.fortran_order) fail(ErrorKind::format, origin + ": fortran_order arrays are not supported");

  const std::size_t count = element_count(*h.shape);
  const std::size_t width = itemsize(*h.dtype);
  const std::size_t payload = offset + header_len;
  if (bytes.size() - payload < count * width) {
    fail(ErrorKind::io, origin + ": truncated payload (expected " + std::to_string(count * width) +
                            " bytes, found " + std::to_string(bytes.size() - payload) + ")");
  }
  std::vector<double> data(count);
  const std::uint8_t* src = bytes.data() + payload;
  if (*h.dtype == DType::f64) {
    std::memcpy(data.data(), src, count * sizeof(double));
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      float f;
      std::memcpy(&f, src + i * sizeof(float), sizeof(float));
      data[i] = static_cast<double>(f);
    }
  }
  return Tensor(*h.shape, std::move(data), *h.dtype);
}

Tensor read_tensor(const std::filesystem::path& path) {
  return decode_npy(read_file(path), path.string());
}

void write_tensor(const Tensor& tensor, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::io, "cannot open " + path.string() + " for writing");
  const std::string header = npy_header(tensor.shape(), tensor.dtype());
  const std::uint8_t preamble[10] = {0x93, 'N', 'U', 'M', 'P', 'Y', 1, 0,
                                     static_cast<std::uint8_t>(header.size() & 0xFF),
                                     static_cast<std::uint8_t>(header.size() >> 8)};
  out.write(reinterpret_cast<const char*>(preamble), sizeof preamble);
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  if (tensor.dtype() == DType::f64) {
    out.write(reinterpret_cast<const char*>(tensor.data()),
              static_cast<std::streamsize>(tensor.size() * sizeof(double)));
  } else {
    std::vector<std::uint8_t> payload;
    append_payload(tensor, payload);
    out.write(reinterpret_cast<const char*>(payload.data()),
              static_cast<std::streamsize>(payload.size()));
  }
  if (!out) fail(ErrorKind::io, "failed writing " + path.string());
}

}  // namespace wepadim
