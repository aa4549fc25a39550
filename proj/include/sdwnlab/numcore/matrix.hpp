#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace sdwnlab::num {

// Dense row-major matrix of doubles. Small sizes only (network-scale tensors),
// so plain loops are fine; no BLAS dependency keeps results bit-reproducible.
class matrix {
public:
    matrix() = default;
    matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    matrix(std::initializer_list<std::initializer_list<double>> rows);

    static matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    double& at(std::size_t r, std::size_t c);
    double at(std::size_t r, std::size_t c) const;

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    double* row(std::size_t r) { return data_.data() + r * cols_; }
    const double* row(std::size_t r) const { return data_.data() + r * cols_; }

    bool same_shape(const matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }
    bool all_finite() const;
    void fill(double v);

    matrix& operator+=(const matrix& o);
    matrix& operator-=(const matrix& o);
    matrix& operator*=(double s);

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

matrix operator+(matrix a, const matrix& b);
matrix operator-(matrix a, const matrix& b);
matrix operator*(matrix a, double s);

matrix matmul(const matrix& a, const matrix& b);    // a * b
matrix matmul_tn(const matrix& a, const matrix& b); // a^T * b
matrix matmul_nt(const matrix& a, const matrix& b); // a * b^T
matrix hadamard(const matrix& a, const matrix& b);  // elementwise product
matrix transpose(const matrix& a);

// broadcast ops used by layers: bias add over rows, column reductions for bias grads
void add_row_broadcast(matrix& m, const std::vector<double>& row_vec);
std::vector<double> column_sums(const matrix& m);

double squared_sum(const matrix& m);

// numerically stable softmax of one logit vector
std::vector<double> softmax(const std::vector<double>& logits);

} // namespace sdwnlab::num
