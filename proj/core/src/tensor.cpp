#include "wepadim/tensor.hpp"

#include <functional>
#include <numeric>
#include <string>

#include "wepadim/error.hpp"

namespace wepadim {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::format: return "format error";
    case ErrorKind::unsupported_dtype: return "unsupported dtype";
    case ErrorKind::io: return "I/O error";
    case ErrorKind::manifest: return "manifest error";
    case ErrorKind::size: return "size error";
    case ErrorKind::config: return "config error";
    case ErrorKind::shape: return "shape error";
    case ErrorKind::insufficient_data: return "insufficient data";
    case ErrorKind::numerical: return "numerical error";
    case ErrorKind::model_compatibility: return "model compatibility error";
    case ErrorKind::undefined_metric: return "undefined metric";
  }
  return "error";
}

std::string_view to_string(DType dtype) noexcept {
  return dtype == DType::f32 ? "<f4" : "<f8";
}

std::size_t itemsize(DType dtype) noexcept { return dtype == DType::f32 ? 4 : 8; }

std::size_t element_count(const Shape& shape) noexcept {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

Tensor::Tensor(Shape shape, std::vector<double> data, DType dtype)
    : dtype_(dtype), shape_(std::move(shape)), data_(std::move(data)) {
  if (data_.size() != element_count(shape_)) {
    fail(ErrorKind::shape, "tensor data length " + std::to_string(data_.size()) +
                               " does not match shape element count " +
                               std::to_string(element_count(shape_)));
  }
}

Tensor Tensor::zeros(Shape shape, DType dtype) {
  const std::size_t n = element_count(shape);
  return Tensor(std::move(shape), std::vector<double>(n, 0.0), dtype);
}

std::span<const double> Tensor::plane(std::size_t c) const {
  const std::size_t hw = shape_.at(1) * shape_.at(2);
  return std::span<const double>(data_).subspan(c * hw, hw);
}

std::span<double> Tensor::plane(std::size_t c) {
  const std::size_t hw = shape_.at(1) * shape_.at(2);
  return std::span<double>(data_).subspan(c * hw, hw);
}

void require_rank(const Tensor& t, std::size_t rank, std::string_view what) {
  if (t.rank() != rank) {
    fail(ErrorKind::shape, std::string(what) + ": expected rank " + std::to_string(rank) +
                               ", got rank " + std::to_string(t.rank()));
  }
}

}  // namespace wepadim
