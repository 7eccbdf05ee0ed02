#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace recfact {

// Row-major dense real matrix. Always at least 1x1.
class DenseMatrix {
public:
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

    static DenseMatrix identity(std::size_t n);
    static DenseMatrix from_rows(std::size_t rows, std::size_t cols, std::vector<double> data);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const noexcept { return {data_.data() + r * cols_, cols_}; }
    std::vector<double> column(std::size_t c) const;

    std::span<const double> data() const noexcept { return data_; }
    std::span<double> data() noexcept { return data_; }

    DenseMatrix transpose() const;
    double frobenius_norm() const;

    bool operator==(const DenseMatrix&) const = default;

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> data_;
};

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b);

// Entrywise product; throws kShape when dimensions differ.
DenseMatrix hadamard(const DenseMatrix& a, const DenseMatrix& b);

double dot(std::span<const double> u, std::span<const double> v);
double norm(std::span<const double> v);

// Throws kUndefinedSimilarity when either vector has zero norm.
double cosine(std::span<const double> u, std::span<const double> v);

// Thin SVD: a (m x n) = U diag(s) V^T with r = min(m, n) columns in U and V.
struct SvdResult {
    DenseMatrix u;                      // m x r
    std::vector<double> singular_values; // descending, >= 0
    DenseMatrix v;                      // n x r

    std::size_t rank_capacity() const noexcept { return singular_values.size(); }
};

struct SvdOptions {
    int max_sweeps = 100;
    double tolerance = 1e-12;
};

// One-sided Jacobi (Hestenes). Columns of U whose singular value vanishes are
// completed to an orthonormal set. Each U column has its largest-magnitude
// entry made nonnegative, with the paired V column flipped to match.
SvdResult svd(const DenseMatrix& a, const SvdOptions& options = {});

// Smallest f whose leading squared singular values carry at least `threshold`
// of the total energy.
std::size_t rank_by_energy(std::span<const double> singular_values, double threshold = 0.95);

// Fraction of total squared energy carried by the leading f values.
double energy_fraction(std::span<const double> singular_values, std::size_t f);

// Smallest f with sum(s[0..f)) >= c * sum(s[f..r)); r when no shorter prefix qualifies.
std::size_t rank_by_ratio(std::span<const double> singular_values, double c = 10.0);

struct TruncatedSvd {
    DenseMatrix u;                       // m x f
    std::vector<double> singular_values; // f
    DenseMatrix v;                       // n x f

    DenseMatrix reconstruct() const;
};

TruncatedSvd truncate(const SvdResult& svd, std::size_t f);

} // namespace recfact
