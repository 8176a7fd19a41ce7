#pragma once

// One-sided (Hestenes) Jacobi SVD. The matrices here are short and wide
// (l x l^(K-1) unfoldings with l <= 16), where Jacobi is accurate to a few
// ulps in the small singular values and needs no bidiagonalization.

#include "errors.hpp"
#include "tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace ltcn {

/// A = u * diag(s) * v^T with r = min(rows, cols), u: rows x r, v: cols x r,
/// s non-increasing. Each column of u has its largest-magnitude entry >= 0.
struct SvdResult
{
    Matrix u;
    std::vector<double> s;
    Matrix v;

    Matrix reconstruct() const
    {
        Matrix us = u;
        for (std::size_t i = 0; i < us.rows(); ++i)
            for (std::size_t j = 0; j < us.cols(); ++j)
                us(i, j) *= s[j];
        return us * v.transposed();
    }
};

namespace detail {

    using Columns = std::vector<std::vector<double>>;

    inline double dot(const std::vector<double>& a, const std::vector<double>& b)
    {
        double acc = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i)
            acc += a[i] * b[i];
        return acc;
    }

    inline Columns columns_of(const Matrix& a)
    {
        Columns out(a.cols(), std::vector<double>(a.rows()));
        for (std::size_t i = 0; i < a.rows(); ++i)
            for (std::size_t j = 0; j < a.cols(); ++j)
                out[j][i] = a(i, j);
        return out;
    }

    inline Matrix matrix_of(const Columns& cols, std::size_t rows)
    {
        Matrix out(rows, cols.size());
        for (std::size_t j = 0; j < cols.size(); ++j)
            for (std::size_t i = 0; i < rows; ++i)
                out(i, j) = cols[j][i];
        return out;
    }

    inline void check_finite(const Matrix& a)
    {
        for (double x : a.data())
            if (!std::isfinite(x))
                throw InvalidArgument("svd: non-finite input");
    }

    /// Rotates the columns of w until they are mutually orthogonal and returns
    /// the accumulated orthogonal m x m rotation (as columns), so that
    /// w_in * rot == w_out.
    inline Columns jacobi_orthogonalize(Columns& w)
    {
        const std::size_t m = w.size();
        Columns rot(m, std::vector<double>(m, 0.0));
        for (std::size_t i = 0; i < m; ++i)
            rot[i][i] = 1.0;

        constexpr double tol = 1e-15;
        constexpr int max_sweeps = 100;
        for (int sweep = 0; sweep < max_sweeps; ++sweep) {
            bool rotated = false;
            for (std::size_t p = 0; p + 1 < m; ++p) {
                for (std::size_t q = p + 1; q < m; ++q) {
                    const double alpha = dot(w[p], w[p]);
                    const double beta = dot(w[q], w[q]);
                    const double gamma = dot(w[p], w[q]);
                    if (gamma == 0.0 || std::abs(gamma) <= tol * std::sqrt(alpha * beta))
                        continue;
                    rotated = true;
                    const double zeta = (beta - alpha) / (2.0 * gamma);
                    const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                    const double c = 1.0 / std::sqrt(1.0 + t * t);
                    const double s = c * t;
                    auto rotate = [c, s](std::vector<double>& x, std::vector<double>& y) {
                        for (std::size_t i = 0; i < x.size(); ++i) {
                            const double xi = x[i];
                            const double yi = y[i];
                            x[i] = c * xi - s * yi;
                            y[i] = s * xi + c * yi;
                        }
                    };
                    rotate(w[p], w[q]);
                    rotate(rot[p], rot[q]);
                }
            }
            if (!rotated)
                break;
        }
        return rot;
    }

    /// Indices sorting norms descending; ties keep the original order.
    inline std::vector<std::size_t> descending_order(const std::vector<double>& norms)
    {
        std::vector<std::size_t> order(norms.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return norms[a] > norms[b]; });
        return order;
    }

    /// Normalizes the columns with positive norm and replaces the rest by an
    /// orthonormal completion (Gram-Schmidt over canonical basis vectors).
    inline void normalize_and_complete(Columns& cols, const std::vector<double>& norms)
    {
        const std::size_t n = cols.empty() ? 0 : cols.front().size();
        std::vector<bool> done(cols.size(), false);
        for (std::size_t j = 0; j < cols.size(); ++j) {
            if (norms[j] > 0.0) {
                for (double& x : cols[j])
                    x /= norms[j];
                done[j] = true;
            }
        }
        std::size_t candidate = 0;
        for (std::size_t j = 0; j < cols.size(); ++j) {
            if (done[j])
                continue;
            while (candidate < n) {
                std::vector<double> e(n, 0.0);
                e[candidate++] = 1.0;
                // two passes of classical Gram-Schmidt
                for (int pass = 0; pass < 2; ++pass)
                    for (std::size_t k = 0; k < cols.size(); ++k) {
                        if (!done[k])
                            continue;
                        const double proj = dot(cols[k], e);
                        for (std::size_t i = 0; i < n; ++i)
                            e[i] -= proj * cols[k][i];
                    }
                const double en = std::sqrt(dot(e, e));
                if (en > 0.5) {
                    for (double& x : e)
                        x /= en;
                    cols[j] = std::move(e);
                    done[j] = true;
                    break;
                }
            }
            if (!done[j])
                throw InvalidArgument("svd: cannot complete orthonormal basis");
        }
    }

    /// Flips column pairs so the largest-magnitude entry of each left vector is
    /// nonnegative (first such entry on ties).
    inline void fix_signs(Columns& left, Columns& right)
    {
        for (std::size_t j = 0; j < left.size(); ++j) {
            std::size_t arg = 0;
            for (std::size_t i = 1; i < left[j].size(); ++i)
                if (std::abs(left[j][i]) > std::abs(left[j][arg]))
                    arg = i;
            if (!left[j].empty() && left[j][arg] < 0.0) {
                for (double& x : left[j])
                    x = -x;
                if (j < right.size())
                    for (double& x : right[j])
                        x = -x;
            }
        }
    }

    template<typename T>
    std::vector<T> permuted(const std::vector<T>& xs, const std::vector<std::size_t>& order)
    {
        std::vector<T> out;
        out.reserve(order.size());
        for (std::size_t i : order)
            out.push_back(xs[i]);
        return out;
    }

} // namespace detail

/// Thin SVD of an arbitrary finite matrix.
inline SvdResult svd(const Matrix& a)
{
    detail::check_finite(a);
    const bool wide = a.rows() <= a.cols();
    // Orthogonalize the columns of the tall orientation; the rotation gives the
    // singular vectors of the short side directly.
    detail::Columns w = detail::columns_of(wide ? a.transposed() : a);
    detail::Columns rot = detail::jacobi_orthogonalize(w);

    std::vector<double> norms(w.size());
    for (std::size_t j = 0; j < w.size(); ++j)
        norms[j] = std::sqrt(detail::dot(w[j], w[j]));
    const auto order = detail::descending_order(norms);
    norms = detail::permuted(norms, order);
    w = detail::permuted(w, order);
    rot = detail::permuted(rot, order);
    detail::normalize_and_complete(w, norms);

    detail::Columns& left = wide ? rot : w;
    detail::Columns& right = wide ? w : rot;
    detail::fix_signs(left, right);

    return SvdResult{detail::matrix_of(left, a.rows()), norms, detail::matrix_of(right, a.cols())};
}

/// Full square orthogonal basis of left singular vectors (rows x rows),
/// ordered by singular value descending; directions beyond the rank complete
/// the basis. Also returns the rows singular values (zero-padded).
struct LeftBasis
{
    Matrix u;
    std::vector<double> s;
};

inline LeftBasis left_singular_basis(const Matrix& a)
{
    detail::check_finite(a);
    detail::Columns w = detail::columns_of(a.transposed());
    detail::Columns rot = detail::jacobi_orthogonalize(w);
    std::vector<double> norms(w.size());
    for (std::size_t j = 0; j < w.size(); ++j)
        norms[j] = std::sqrt(detail::dot(w[j], w[j]));
    const auto order = detail::descending_order(norms);
    norms = detail::permuted(norms, order);
    rot = detail::permuted(rot, order);
    detail::Columns none;
    detail::fix_signs(rot, none);
    return LeftBasis{detail::matrix_of(rot, a.rows()), norms};
}

} // namespace ltcn
