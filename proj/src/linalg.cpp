#include "recfact/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "recfact/error.hpp"

namespace recfact {

namespace {

std::string shape_of(const DenseMatrix& m)
{
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_same_shape(const DenseMatrix& a, const DenseMatrix& b, const char* op)
{
    if (a.rows() != b.rows() || a.cols() != b.cols())
        fail(ErrorCode::kShape, std::string(op) + ": shape mismatch " + shape_of(a) + " vs " + shape_of(b));
}

} // namespace

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols)
{
    require(rows >= 1 && cols >= 1, ErrorCode::kShape, "matrix must be at least 1x1");
    data_.assign(rows * cols, fill);
}

DenseMatrix::DenseMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0)
{
    require(rows_ >= 1 && cols_ >= 1, ErrorCode::kShape, "matrix must be at least 1x1");
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        require(r.size() == cols_, ErrorCode::kShape, "ragged matrix literal");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

DenseMatrix DenseMatrix::identity(std::size_t n)
{
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        m(i, i) = 1.0;
    return m;
}

DenseMatrix DenseMatrix::from_rows(std::size_t rows, std::size_t cols, std::vector<double> data)
{
    require(data.size() == rows * cols, ErrorCode::kShape,
            "data length " + std::to_string(data.size()) + " != " + std::to_string(rows) + "x" +
                std::to_string(cols));
    DenseMatrix m(rows, cols);
    m.data_ = std::move(data);
    return m;
}

std::vector<double> DenseMatrix::column(std::size_t c) const
{
    std::vector<double> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        out[r] = (*this)(r, c);
    return out;
}

DenseMatrix DenseMatrix::transpose() const
{
    DenseMatrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c)
            t(c, r) = (*this)(r, c);
    return t;
}

double DenseMatrix::frobenius_norm() const { return norm(data_); }

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b)
{
    if (a.cols() != b.rows())
        fail(ErrorCode::kShape, "multiply: inner dimensions differ " + shape_of(a) + " * " + shape_of(b));
    DenseMatrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            for (std::size_t j = 0; j < b.cols(); ++j)
                out(i, j) += aik * b(k, j);
        }
    return out;
}

DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b)
{
    require_same_shape(a, b, "subtract");
    DenseMatrix out = a;
    auto dst = out.data();
    auto src = b.data();
    for (std::size_t i = 0; i < dst.size(); ++i)
        dst[i] -= src[i];
    return out;
}

DenseMatrix hadamard(const DenseMatrix& a, const DenseMatrix& b)
{
    require_same_shape(a, b, "hadamard");
    DenseMatrix out = a;
    auto dst = out.data();
    auto src = b.data();
    for (std::size_t i = 0; i < dst.size(); ++i)
        dst[i] *= src[i];
    return out;
}

double dot(std::span<const double> u, std::span<const double> v)
{
    if (u.size() != v.size())
        fail(ErrorCode::kShape,
             "dot: length mismatch " + std::to_string(u.size()) + " vs " + std::to_string(v.size()));
    double sum = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        sum += u[i] * v[i];
    return sum;
}

double norm(std::span<const double> v)
{
    double sum = 0.0;
    for (double x : v)
        sum += x * x;
    return std::sqrt(sum);
}

double cosine(std::span<const double> u, std::span<const double> v)
{
    const double d = dot(u, v);
    const double nu = norm(u);
    const double nv = norm(v);
    if (nu == 0.0 || nv == 0.0)
        fail(ErrorCode::kUndefinedSimilarity, "cosine: zero-norm vector");
    // Rounding can push |d| a hair past nu*nv.
    return std::clamp(d / (nu * nv), -1.0, 1.0);
}

} // namespace recfact
