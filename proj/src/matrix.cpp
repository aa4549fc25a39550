#include "sdwnlab/numcore/matrix.hpp"

#include <algorithm>
#include <cmath>

#include "sdwnlab/common/error.hpp"

namespace sdwnlab::num {

matrix::matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

matrix::matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw dimension_error("ragged initializer for matrix");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

matrix matrix::identity(std::size_t n) {
    matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

double& matrix::at(std::size_t r, std::size_t c) {
    if (r >= rows_ || c >= cols_) throw dimension_error("matrix index out of range");
    return data_[r * cols_ + c];
}

double matrix::at(std::size_t r, std::size_t c) const {
    if (r >= rows_ || c >= cols_) throw dimension_error("matrix index out of range");
    return data_[r * cols_ + c];
}

bool matrix::all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

void matrix::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

matrix& matrix::operator+=(const matrix& o) {
    if (!same_shape(o)) throw dimension_error("matrix += shape mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
}

matrix& matrix::operator-=(const matrix& o) {
    if (!same_shape(o)) throw dimension_error("matrix -= shape mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
}

matrix& matrix::operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
}

matrix operator+(matrix a, const matrix& b) { return a += b; }
matrix operator-(matrix a, const matrix& b) { return a -= b; }
matrix operator*(matrix a, double s) { return a *= s; }

matrix matmul(const matrix& a, const matrix& b) {
    if (a.cols() != b.rows()) throw dimension_error("matmul inner dimension mismatch");
    matrix out(a.rows(), b.cols());
    const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
    for (std::size_t i = 0; i < n; ++i) {
        double* out_row = out.row(i);
        const double* a_row = a.row(i);
        for (std::size_t p = 0; p < k; ++p) {
            const double av = a_row[p];
            if (av == 0.0) continue; // frequent with relu outputs / sparse adjacency
            const double* b_row = b.row(p);
            for (std::size_t j = 0; j < m; ++j) out_row[j] += av * b_row[j];
        }
    }
    return out;
}

matrix matmul_tn(const matrix& a, const matrix& b) {
    if (a.rows() != b.rows()) throw dimension_error("matmul_tn leading dimension mismatch");
    matrix out(a.cols(), b.cols());
    const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
    for (std::size_t i = 0; i < n; ++i) {
        const double* a_row = a.row(i);
        const double* b_row = b.row(i);
        for (std::size_t p = 0; p < k; ++p) {
            const double av = a_row[p];
            if (av == 0.0) continue;
            double* out_row = out.row(p);
            for (std::size_t j = 0; j < m; ++j) out_row[j] += av * b_row[j];
        }
    }
    return out;
}

matrix matmul_nt(const matrix& a, const matrix& b) {
    if (a.cols() != b.cols()) throw dimension_error("matmul_nt trailing dimension mismatch");
    matrix out(a.rows(), b.rows());
    const std::size_t n = a.rows(), k = a.cols(), m = b.rows();
    for (std::size_t i = 0; i < n; ++i) {
        const double* a_row = a.row(i);
        double* out_row = out.row(i);
        for (std::size_t j = 0; j < m; ++j) {
            const double* b_row = b.row(j);
            double acc = 0.0;
            for (std::size_t p = 0; p < k; ++p) acc += a_row[p] * b_row[p];
            out_row[j] = acc;
        }
    }
    return out;
}

matrix hadamard(const matrix& a, const matrix& b) {
    if (!a.same_shape(b)) throw dimension_error("hadamard shape mismatch");
    matrix out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.size(); ++i) out.data()[i] = a.data()[i] * b.data()[i];
    return out;
}

matrix transpose(const matrix& a) {
    matrix out(a.cols(), a.rows());
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) out(c, r) = a(r, c);
    return out;
}

void add_row_broadcast(matrix& m, const std::vector<double>& row_vec) {
    if (row_vec.size() != m.cols()) throw dimension_error("broadcast width mismatch");
    for (std::size_t r = 0; r < m.rows(); ++r) {
        double* row = m.row(r);
        for (std::size_t c = 0; c < m.cols(); ++c) row[c] += row_vec[c];
    }
}

std::vector<double> column_sums(const matrix& m) {
    std::vector<double> out(m.cols(), 0.0);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const double* row = m.row(r);
        for (std::size_t c = 0; c < m.cols(); ++c) out[c] += row[c];
    }
    return out;
}

double squared_sum(const matrix& m) {
    double acc = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) acc += m.data()[i] * m.data()[i];
    return acc;
}

std::vector<double> softmax(const std::vector<double>& logits) {
    if (logits.empty()) throw dimension_error("softmax of empty vector");
    const double mx = *std::max_element(logits.begin(), logits.end());
    std::vector<double> out(logits.size());
    double denom = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        out[i] = std::exp(logits[i] - mx);
        denom += out[i];
    }
    for (double& v : out) v /= denom;
    return out;
}

} // namespace sdwnlab::num
