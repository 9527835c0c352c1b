#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <vector>

namespace wzlab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Rank-3 array of partial derivatives of an m x d matrix field:
/// entry (i, j, k) is d/dx_k of the (i, j) entry.
class GradientTensor {
public:
    GradientTensor() = default;
    GradientTensor(int rows, int cols) : rows_(rows), cols_(cols), data_(std::size_t(rows) * cols * rows, 0.0) {}

    [[nodiscard]] int rows() const noexcept { return rows_; }
    [[nodiscard]] int cols() const noexcept { return cols_; }

    double& operator()(int i, int j, int k) noexcept { return data_[index(i, j, k)]; }
    double operator()(int i, int j, int k) const noexcept { return data_[index(i, j, k)]; }

    /// (T[A])_i = sum_{k,j} T(i,j,k) A(k,j) for an m x d matrix A.
    [[nodiscard]] Vector contract(const Matrix& a) const {
        Vector out = Vector::Zero(rows_);
        for (int i = 0; i < rows_; ++i) {
            double acc = 0.0;
            for (int k = 0; k < rows_; ++k)
                for (int j = 0; j < cols_; ++j) acc += (*this)(i, j, k) * a(k, j);
            out[i] = acc;
        }
        return out;
    }

    [[nodiscard]] GradientTensor scaled(double c) const {
        GradientTensor out = *this;
        for (double& v : out.data_) v *= c;
        return out;
    }

    [[nodiscard]] double max_abs_difference(const GradientTensor& other) const;

private:
    [[nodiscard]] std::size_t index(int i, int j, int k) const noexcept {
        return (std::size_t(i) * cols_ + j) * rows_ + k;
    }

    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

inline double GradientTensor::max_abs_difference(const GradientTensor& other) const {
    double worst = 0.0;
    for (std::size_t i = 0; i < data_.size(); ++i) {
        const double diff = std::abs(data_[i] - other.data_[i]);
        worst = diff > worst ? diff : worst;
    }
    return worst;
}

}  // namespace wzlab
