#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "opg/errors.hpp"

namespace opg {

/// Dense row-major tensor. Kept deliberately thin: layers know their own
/// shapes, this only owns the buffer.
template <class T>
struct Tensor {
  std::vector<int> dims;
  std::vector<T> data;

  Tensor() = default;
  explicit Tensor(std::vector<int> d) : dims(std::move(d)) {
    data.assign(static_cast<size_t>(numel_of(dims)), T(0));
  }

  static long numel_of(const std::vector<int>& d) {
    long n = 1;
    for (int x : d) n *= x;
    return n;
  }
  long numel() const { return static_cast<long>(data.size()); }

  T* ptr() { return data.data(); }
  const T* ptr() const { return data.data(); }

  T& operator[](size_t i) { return data[i]; }
  const T& operator[](size_t i) const { return data[i]; }

  void fill(T v) { std::fill(data.begin(), data.end(), v); }
  void zero() { fill(T(0)); }

  bool all_finite() const {
    for (T v : data)
      if (!std::isfinite(static_cast<double>(v))) return false;
    return true;
  }
};

template <class To, class From>
Tensor<To> tensor_cast(const Tensor<From>& src) {
  Tensor<To> out(src.dims);
  for (size_t i = 0; i < src.data.size(); ++i) out.data[i] = static_cast<To>(src.data[i]);
  return out;
}

}  // namespace opg
