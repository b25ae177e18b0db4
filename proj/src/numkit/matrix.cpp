#include "forl/numkit/matrix.hpp"

#include <Eigen/Core>
#include <cmath>
#include <stdexcept>
#include <string>

namespace forl::num {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(data.begin(), data.end()) {
    if (data_.size() != rows * cols) {
        throw std::invalid_argument("Matrix: data length " + std::to_string(data_.size()) +
                                    " != " + std::to_string(rows) + "x" + std::to_string(cols));
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

bool Matrix::all_finite() const {
    for (double x : data_) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw std::invalid_argument("matmul: inner dimensions differ (" + std::to_string(a.cols()) +
                                    " vs " + std::to_string(b.rows()) + ")");
    }
    Matrix out(a.rows(), b.cols());
    if (out.empty() || a.cols() == 0) return out;
    Eigen::Map<const RowMajor> ea(a.data().data(), a.rows(), a.cols());
    Eigen::Map<const RowMajor> eb(b.data().data(), b.rows(), b.cols());
    Eigen::Map<RowMajor> eo(out.data().data(), out.rows(), out.cols());
    eo.noalias() = ea * eb;
    return out;
}

}  // namespace forl::num
