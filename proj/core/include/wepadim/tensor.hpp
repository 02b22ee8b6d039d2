#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace wepadim {

/// Storage dtype recorded for interchange. Values are always held as
/// double in memory; f32 tensors are widened on load and narrowed on write.
enum class DType { f32, f64 };

std::string_view to_string(DType dtype) noexcept;
std::size_t itemsize(DType dtype) noexcept;

using Shape = std::vector<std::size_t>;

std::size_t element_count(const Shape& shape) noexcept;

/// Dense row-major tensor. Rank-3 tensors are channel-major (C x H x W),
/// rank-2 tensors are single maps (H x W).
class Tensor {
 public:
  Tensor() = default;
  Tensor(Shape shape, std::vector<double> data, DType dtype = DType::f64);

  static Tensor zeros(Shape shape, DType dtype = DType::f64);

  DType dtype() const noexcept { return dtype_; }
  const Shape& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t size() const noexcept { return data_.size(); }
  std::size_t extent(std::size_t axis) const { return shape_.at(axis); }

  std::span<const double> values() const noexcept { return data_; }
  std::span<double> values() noexcept { return data_; }
  const double* data() const noexcept { return data_.data(); }
  double* data() noexcept { return data_.data(); }

  /// Contiguous H*W plane of channel `c` of a rank-3 tensor.
  std::span<const double> plane(std::size_t c) const;
  std::span<double> plane(std::size_t c);

  double& operator()(std::size_t y, std::size_t x) { return data_[y * shape_[1] + x]; }
  double operator()(std::size_t y, std::size_t x) const { return data_[y * shape_[1] + x]; }
  double& operator()(std::size_t c, std::size_t y, std::size_t x) {
    return data_[(c * shape_[1] + y) * shape_[2] + x];
  }
  double operator()(std::size_t c, std::size_t y, std::size_t x) const {
    return data_[(c * shape_[1] + y) * shape_[2] + x];
  }

  void set_dtype(DType dtype) noexcept { dtype_ = dtype; }

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  DType dtype_ = DType::f64;
  Shape shape_;
  std::vector<double> data_;
};

/// Throws a shape error unless `t` has the given rank.
void require_rank(const Tensor& t, std::size_t rank, std::string_view what);

}  // namespace wepadim
