#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "recfact/error.hpp"
#include "recfact/linalg.hpp"

namespace recfact {

namespace {

using Column = std::vector<double>;

double column_dot(const Column& a, const Column& b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

void rotate(Column& p, Column& q, double c, double s)
{
    for (std::size_t k = 0; k < p.size(); ++k) {
        const double a = p[k];
        const double b = q[k];
        p[k] = c * a - s * b;
        q[k] = s * a + c * b;
    }
}

// Extends `basis` (orthonormal columns of length m) with unit vectors taken
// from the canonical basis, Gram-Schmidt'd twice, until it has `target` columns.
void complete_orthonormal(std::vector<Column>& basis, std::vector<bool>& valid, std::size_t m)
{
    std::size_t candidate = 0;
    for (std::size_t j = 0; j < basis.size(); ++j) {
        if (valid[j])
            continue;
        while (candidate < m) {
            Column e(m, 0.0);
            e[candidate++] = 1.0;
            for (int pass = 0; pass < 2; ++pass)
                for (std::size_t o = 0; o < basis.size(); ++o) {
                    if (!valid[o])
                        continue;
                    const double proj = column_dot(e, basis[o]);
                    for (std::size_t k = 0; k < m; ++k)
                        e[k] -= proj * basis[o][k];
                }
            const double n = std::sqrt(column_dot(e, e));
            if (n > 1e-3) {
                for (double& x : e)
                    x /= n;
                basis[j] = std::move(e);
                valid[j] = true;
                break;
            }
        }
        require(valid[j], ErrorCode::kConvergence, "svd: failed to complete orthonormal basis");
    }
}

// Requires m >= n.
SvdResult jacobi_tall(const DenseMatrix& a, const SvdOptions& options)
{
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();

    std::vector<Column> w(n, Column(m));
    std::vector<Column> v(n, Column(n, 0.0));
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < m; ++i)
            w[j][i] = a(i, j);
        v[j][j] = 1.0;
    }

    const double fro = a.frobenius_norm();
    const double eps = std::numeric_limits<double>::epsilon();
    const double negligible = (eps * fro) * (eps * fro);

    bool converged = (n < 2);
    double worst = 0.0;
    for (int sweep = 0; sweep < options.max_sweeps && !converged; ++sweep) {
        converged = true;
        worst = 0.0;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                const double alpha = column_dot(w[p], w[p]);
                const double beta = column_dot(w[q], w[q]);
                if (alpha <= negligible || beta <= negligible)
                    continue;
                const double gamma = column_dot(w[p], w[q]);
                const double off = std::abs(gamma) / std::sqrt(alpha * beta);
                worst = std::max(worst, off);
                if (off <= options.tolerance)
                    continue;
                converged = false;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::hypot(1.0, zeta));
                const double c = 1.0 / std::hypot(1.0, t);
                const double s = c * t;
                rotate(w[p], w[q], c, s);
                rotate(v[p], v[q], c, s);
            }
    }
    if (!converged)
        fail(ErrorCode::kConvergence, "svd: no convergence after " + std::to_string(options.max_sweeps) +
                                          " sweeps; largest normalized off-diagonal " + std::to_string(worst));

    std::vector<double> sigma(n);
    for (std::size_t j = 0; j < n; ++j)
        sigma[j] = std::sqrt(column_dot(w[j], w[j]));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

    const double cutoff = eps * std::max(fro, std::numeric_limits<double>::min()) * static_cast<double>(m);
    std::vector<Column> ucols(n);
    std::vector<Column> vcols(n);
    std::vector<bool> valid(n, false);
    std::vector<double> s(n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t j = order[k];
        vcols[k] = std::move(v[j]);
        if (sigma[j] > cutoff) {
            s[k] = sigma[j];
            ucols[k] = std::move(w[j]);
            for (double& x : ucols[k])
                x /= s[k];
            valid[k] = true;
        } else {
            s[k] = 0.0;
        }
    }
    complete_orthonormal(ucols, valid, m);

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t arg = 0;
        for (std::size_t i = 1; i < m; ++i)
            if (std::abs(ucols[k][i]) > std::abs(ucols[k][arg]))
                arg = i;
        if (ucols[k][arg] < 0.0) {
            for (double& x : ucols[k])
                x = -x;
            for (double& x : vcols[k])
                x = -x;
        }
    }

    SvdResult out{DenseMatrix(m, n), std::move(s), DenseMatrix(n, n)};
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < m; ++i)
            out.u(i, k) = ucols[k][i];
        for (std::size_t i = 0; i < n; ++i)
            out.v(i, k) = vcols[k][i];
    }
    return out;
}

void check_spectrum(std::span<const double> s)
{
    require(!s.empty(), ErrorCode::kDegenerateSpectrum, "empty singular value list");
    double total = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        require(std::isfinite(s[i]) && s[i] >= 0.0, ErrorCode::kInput, "singular values must be finite and >= 0");
        require(i == 0 || s[i] <= s[i - 1], ErrorCode::kInput, "singular values must be sorted descending");
        total += s[i];
    }
    require(total > 0.0, ErrorCode::kDegenerateSpectrum, "all singular values are zero");
}

} // namespace

SvdResult svd(const DenseMatrix& a, const SvdOptions& options)
{
    for (double x : a.data())
        require(std::isfinite(x), ErrorCode::kInput, "svd: input contains non-finite entries");
    if (a.rows() >= a.cols())
        return jacobi_tall(a, options);

    SvdResult t = jacobi_tall(a.transpose(), options);
    SvdResult out{std::move(t.v), std::move(t.singular_values), std::move(t.u)};
    // Re-apply the sign rule to the new U (the old V).
    for (std::size_t k = 0; k < out.singular_values.size(); ++k) {
        std::size_t arg = 0;
        for (std::size_t i = 1; i < out.u.rows(); ++i)
            if (std::abs(out.u(i, k)) > std::abs(out.u(arg, k)))
                arg = i;
        if (out.u(arg, k) < 0.0) {
            for (std::size_t i = 0; i < out.u.rows(); ++i)
                out.u(i, k) = -out.u(i, k);
            for (std::size_t i = 0; i < out.v.rows(); ++i)
                out.v(i, k) = -out.v(i, k);
        }
    }
    return out;
}

double energy_fraction(std::span<const double> s, std::size_t f)
{
    check_spectrum(s);
    require(f >= 1 && f <= s.size(), ErrorCode::kRange, "energy_fraction: f out of range");
    double total = 0.0;
    double head = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        total += s[i] * s[i];
        if (i < f)
            head += s[i] * s[i];
    }
    return head / total;
}

std::size_t rank_by_energy(std::span<const double> s, double threshold)
{
    require(threshold > 0.0 && threshold <= 1.0, ErrorCode::kRange, "rank_by_energy: threshold must be in (0, 1]");
    check_spectrum(s);
    double total = 0.0;
    for (double x : s)
        total += x * x;
    double head = 0.0;
    for (std::size_t f = 1; f <= s.size(); ++f) {
        head += s[f - 1] * s[f - 1];
        if (head / total >= threshold)
            return f;
    }
    return s.size();
}

std::size_t rank_by_ratio(std::span<const double> s, double c)
{
    require(c > 0.0, ErrorCode::kRange, "rank_by_ratio: c must be positive");
    check_spectrum(s);
    const std::size_t r = s.size();
    for (std::size_t f = 1; f < r; ++f) {
        double head = 0.0;
        double tail = 0.0;
        for (std::size_t k = 0; k < r; ++k)
            (k < f ? head : tail) += s[k];
        if (head >= c * tail)
            return f;
    }
    return r;
}

TruncatedSvd truncate(const SvdResult& full, std::size_t f)
{
    const std::size_t r = full.rank_capacity();
    require(f >= 1 && f <= r, ErrorCode::kRange,
            "truncate: f=" + std::to_string(f) + " outside [1, " + std::to_string(r) + "]");
    TruncatedSvd out{DenseMatrix(full.u.rows(), f),
                     std::vector<double>(full.singular_values.begin(), full.singular_values.begin() + f),
                     DenseMatrix(full.v.rows(), f)};
    for (std::size_t i = 0; i < full.u.rows(); ++i)
        for (std::size_t k = 0; k < f; ++k)
            out.u(i, k) = full.u(i, k);
    for (std::size_t i = 0; i < full.v.rows(); ++i)
        for (std::size_t k = 0; k < f; ++k)
            out.v(i, k) = full.v(i, k);
    return out;
}

DenseMatrix TruncatedSvd::reconstruct() const
{
    DenseMatrix out(u.rows(), v.rows());
    for (std::size_t i = 0; i < u.rows(); ++i)
        for (std::size_t j = 0; j < v.rows(); ++j) {
            double sum = 0.0;
            for (std::size_t k = 0; k < singular_values.size(); ++k)
                sum += u(i, k) * singular_values[k] * v(j, k);
            out(i, j) = sum;
        }
    return out;
}

} // namespace recfact
