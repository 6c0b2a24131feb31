#pragma once

#include <cstddef>
#include <vector>

namespace coldgan {

// Row-major dense matrix of doubles. Small nets only; no BLAS.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    std::vector<double>& raw() { return data_; }
    const std::vector<double>& raw() const { return data_; }

    bool operator==(const Matrix& o) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// y = W x
inline std::vector<double> matvec(const Matrix& w, const std::vector<double>& x) {
    std::vector<double> y(w.rows(), 0.0);
    for (std::size_t r = 0; r < w.rows(); ++r) {
        double acc = 0.0;
        const double* row = w.data() + r * w.cols();
        for (std::size_t c = 0; c < w.cols(); ++c) acc += row[c] * x[c];
        y[r] = acc;
    }
    return y;
}

// y = W^T x
inline std::vector<double> matvec_t(const Matrix& w, const std::vector<double>& x) {
    std::vector<double> y(w.cols(), 0.0);
    for (std::size_t r = 0; r < w.rows(); ++r) {
        const double* row = w.data() + r * w.cols();
        for (std::size_t c = 0; c < w.cols(); ++c) y[c] += row[c] * x[r];
    }
    return y;
}

}  // namespace coldgan
