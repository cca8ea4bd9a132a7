#pragma once

#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <vector>

namespace netdyn {

/// Dense row-major square matrix of doubles. Used for rate matrices and
/// block-model edge probabilities.
class SquareMatrix {
public:
    SquareMatrix() = default;
    explicit SquareMatrix(std::size_t dim, double fill = 0.0) : dim_(dim), data_(dim * dim, fill) {}

    SquareMatrix(std::initializer_list<std::initializer_list<double>> rows) : dim_(rows.size()) {
        data_.reserve(dim_ * dim_);
        for (const auto& row : rows) {
            if (row.size() != dim_) throw std::invalid_argument("SquareMatrix: ragged initializer");
            data_.insert(data_.end(), row.begin(), row.end());
        }
    }

    std::size_t dim() const noexcept { return dim_; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * dim_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * dim_ + j]; }

    bool is_symmetric(double tol = 0.0) const {
        for (std::size_t i = 0; i < dim_; ++i)
            for (std::size_t j = i + 1; j < dim_; ++j) {
                const double a = (*this)(i, j), b = (*this)(j, i);
                if (a - b > tol || b - a > tol) return false;
            }
        return true;
    }

    friend bool operator==(const SquareMatrix&, const SquareMatrix&) = default;

private:
    std::size_t dim_ = 0;
    std::vector<double> data_;
};

}  // namespace netdyn
