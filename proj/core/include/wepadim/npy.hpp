#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "wepadim/tensor.hpp"

namespace wepadim {

/// NPY v1.0 reader/writer limited to little-endian, C-order "<f4" and "<f8".
///
/// The writer emits the header byte-for-byte the way numpy does (including
/// the trailing growth padding numpy reserves after the shape tuple), so a
/// numpy-written file read and re-written here is byte-identical.
Tensor read_tensor(const std::filesystem::path& path);
void write_tensor(const Tensor& tensor, const std::filesystem::path& path);

Tensor decode_npy(const std::vector<std::uint8_t>& bytes, const std::string& origin = "<memory>");
std::vector<std::uint8_t> encode_npy(const Tensor& tensor);

/// The header text (dict + padding + newline) written for `shape`/`dtype`.
std::string npy_header(const Shape& shape, DType dtype);

}  // namespace wepadim
