#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace embtk {

using real = double;

// Row-major dense parameter matrix.
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::int32_t rows, std::int32_t cols)
        : rows_(rows), cols_(cols),
          data_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0.0) {}

    std::int32_t rows() const { return rows_; }
    std::int32_t cols() const { return cols_; }
    std::int64_t size() const { return static_cast<std::int64_t>(data_.size()); }

    std::span<real> row(std::int32_t i) {
        return {data_.data() + static_cast<std::size_t>(i) * cols_,
                static_cast<std::size_t>(cols_)};
    }
    std::span<const real> row(std::int32_t i) const {
        return {data_.data() + static_cast<std::size_t>(i) * cols_,
                static_cast<std::size_t>(cols_)};
    }

    real& at(std::int32_t i, std::int32_t j) {
        return data_[static_cast<std::size_t>(i) * cols_ + j];
    }
    real at(std::int32_t i, std::int32_t j) const {
        return data_[static_cast<std::size_t>(i) * cols_ + j];
    }

    real* data() { return data_.data(); }
    const real* data() const { return data_.data(); }

    void fill(real v) { std::fill(data_.begin(), data_.end(), v); }

    bool all_finite() const {
        for (real v : data_)
            if (!std::isfinite(v)) return false;
        return true;
    }

    bool operator==(const Matrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }

  private:
    std::int32_t rows_ = 0;
    std::int32_t cols_ = 0;
    std::vector<real> data_;
};

inline real dot(std::span<const real> a, std::span<const real> b) {
    real s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// y += a * x
inline void axpy(real a, std::span<const real> x, std::span<real> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

inline real norm(std::span<const real> v) { return std::sqrt(dot(v, v)); }

}  // namespace embtk
