#pragma once

// Dense K-way tensors with every mode of size l, and the tensorization map
// between length-l^K filters and such tensors.
//
// Layout: a multi-index (a_1, ..., a_K) lives at flat position
// sum_j a_j l^(j-1), i.e. a_1 varies fastest. With this layout the base-l
// digit expansion of a time index t is exactly its flat position.

#include "errors.hpp"

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace ltcn {

/// l^k with overflow detection.
inline std::size_t ipow(std::size_t base, std::size_t exp)
{
    std::size_t out = 1;
    for (std::size_t i = 0; i < exp; ++i) {
        if (base != 0 && out > std::numeric_limits<std::size_t>::max() / base)
            throw InvalidArgument("ipow: overflow");
        out *= base;
    }
    return out;
}

/// Row-major dense matrix.
class Matrix
{
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
        : rows_(rows), cols_(cols), data_(std::move(data))
    {
        if (data_.size() != rows_ * cols_)
            throw InvalidArgument("Matrix: data length != rows * cols");
    }

    static Matrix identity(std::size_t n)
    {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    const std::vector<double>& data() const { return data_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::vector<double> column(std::size_t j) const
    {
        std::vector<double> out(rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            out[i] = (*this)(i, j);
        return out;
    }

    Matrix transposed() const
    {
        Matrix out(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                out(j, i) = (*this)(i, j);
        return out;
    }

    double frobenius() const
    {
        double acc = 0.0;
        for (double v : data_)
            acc += v * v;
        return std::sqrt(acc);
    }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

inline Matrix operator*(const Matrix& a, const Matrix& b)
{
    if (a.cols() != b.rows())
        throw InvalidArgument("Matrix product: inner dimensions differ");
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            for (std::size_t j = 0; j < b.cols(); ++j)
                out(i, j) += aik * b(k, j);
        }
    return out;
}

inline Matrix operator-(const Matrix& a, const Matrix& b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw InvalidArgument("Matrix difference: shapes differ");
    std::vector<double> out(a.data());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] -= b.data()[i];
    return Matrix(a.rows(), a.cols(), std::move(out));
}

/// K-way tensor with all modes of size l.
class DenseTensor
{
public:
    DenseTensor() = default;

    DenseTensor(std::size_t l, std::size_t order) : l_(l), order_(order), data_(ipow(l, order), 0.0)
    {
        check_shape(l, order);
    }

    DenseTensor(std::size_t l, std::size_t order, std::vector<double> data)
        : l_(l), order_(order), data_(std::move(data))
    {
        check_shape(l, order);
        if (data_.size() != ipow(l, order))
            throw InvalidArgument("DenseTensor: data length != l^K");
    }

    std::size_t l() const { return l_; }
    std::size_t order() const { return order_; }
    std::size_t size() const { return data_.size(); }
    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    double operator[](std::size_t flat) const { return data_[flat]; }
    double& operator[](std::size_t flat) { return data_[flat]; }

    /// Multi-index (a_1..a_K), zero-based digits, a_1 least significant.
    std::size_t flat_index(std::span<const std::size_t> digits) const
    {
        if (digits.size() != order_)
            throw InvalidArgument("DenseTensor: multi-index has wrong length");
        std::size_t flat = 0;
        std::size_t stride = 1;
        for (std::size_t j = 0; j < order_; ++j) {
            if (digits[j] >= l_)
                throw InvalidArgument("DenseTensor: digit out of range");
            flat += digits[j] * stride;
            stride *= l_;
        }
        return flat;
    }

    std::vector<std::size_t> digits(std::size_t flat) const
    {
        std::vector<std::size_t> out(order_);
        for (std::size_t j = 0; j < order_; ++j) {
            out[j] = flat % l_;
            flat /= l_;
        }
        return out;
    }

    double at(std::span<const std::size_t> digits) const { return data_[flat_index(digits)]; }

    friend bool operator==(const DenseTensor&, const DenseTensor&) = default;

private:
    static void check_shape(std::size_t l, std::size_t order)
    {
        if (l < 2)
            throw InvalidArgument("DenseTensor: mode size l must be >= 2");
        if (order < 1)
            throw InvalidArgument("DenseTensor: order K must be >= 1");
    }

    std::size_t l_ = 2;
    std::size_t order_ = 1;
    std::vector<double> data_;
};

/// [T(rho)]_{a_1..a_K} = rho(sum_j a_j l^(j-1)); rho is zero-padded to l^K.
inline DenseTensor tensorize(std::span<const double> rho, std::size_t l, std::size_t order)
{
    DenseTensor out(l, order);
    if (rho.size() > out.size())
        throw InvalidArgument("tensorize: sequence longer than l^K");
    for (std::size_t t = 0; t < rho.size(); ++t)
        out[t] = rho[t];
    return out;
}

inline std::vector<double> detensorize(const DenseTensor& a) { return a.data(); }

inline void check_mode(const DenseTensor& a, std::size_t mode)
{
    if (mode < 1 || mode > a.order())
        throw InvalidArgument("tensor mode out of range");
}

/// Mode-n matricization (mode is 1-based). Rows are indexed by a_mode; the
/// column index packs the remaining digits in ascending mode order, the lowest
/// remaining mode fastest.
inline Matrix unfold(const DenseTensor& a, std::size_t mode)
{
    check_mode(a, mode);
    const std::size_t l = a.l();
    const std::size_t stride = ipow(l, mode - 1); // stride of a_mode in flat layout
    const std::size_t cols = a.size() / l;
    Matrix out(l, cols);
    for (std::size_t flat = 0; flat < a.size(); ++flat) {
        const std::size_t low = flat % stride;
        const std::size_t row = (flat / stride) % l;
        const std::size_t high = flat / (stride * l);
        out(row, low + high * stride) = a[flat];
    }
    return out;
}

/// Inverse of unfold.
inline DenseTensor fold(const Matrix& m, std::size_t mode, std::size_t l, std::size_t order)
{
    DenseTensor out(l, order);
    check_mode(out, mode);
    if (m.rows() != l || m.cols() != out.size() / l)
        throw InvalidArgument("fold: matrix shape does not match (l, K)");
    const std::size_t stride = ipow(l, mode - 1);
    for (std::size_t flat = 0; flat < out.size(); ++flat) {
        const std::size_t low = flat % stride;
        const std::size_t row = (flat / stride) % l;
        const std::size_t high = flat / (stride * l);
        out[flat] = m(row, low + high * stride);
    }
    return out;
}

/// A x_mode U = fold(U * unfold(A, mode)); U must be l x l.
inline DenseTensor mode_product(const DenseTensor& a, const Matrix& u, std::size_t mode)
{
    if (u.cols() != a.l() || u.rows() != a.l())
        throw InvalidArgument("mode_product: factor must be l x l");
    return fold(u * unfold(a, mode), mode, a.l(), a.order());
}

/// Outer product of K vectors listed outermost layer first:
/// vectors = [v_K, ..., v_1], entry (a_1..a_K) = prod_j v_j(a_j).
/// With this order outer_product([w_{K-1}, ..., w_0]) is the tensorized
/// effective filter of a single-channel network.
inline DenseTensor outer_product(const std::vector<std::vector<double>>& vectors)
{
    if (vectors.empty())
        throw InvalidArgument("outer_product: need at least one vector");
    const std::size_t l = vectors.front().size();
    for (const auto& v : vectors)
        if (v.size() != l)
            throw InvalidArgument("outer_product: vectors differ in length");
    const std::size_t order = vectors.size();
    DenseTensor out(l, order);
    for (std::size_t flat = 0; flat < out.size(); ++flat) {
        std::size_t rest = flat;
        double prod = 1.0;
        for (std::size_t j = 0; j < order; ++j) {
            prod *= vectors[order - 1 - j][rest % l];
            rest /= l;
        }
        out[flat] = prod;
    }
    return out;
}

inline double frobenius(const DenseTensor& a)
{
    double acc = 0.0;
    for (double v : a.data())
        acc += v * v;
    return std::sqrt(acc);
}

inline DenseTensor operator-(const DenseTensor& a, const DenseTensor& b)
{
    if (a.l() != b.l() || a.order() != b.order())
        throw InvalidArgument("tensor difference: shapes differ");
    DenseTensor out = a;
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] -= b[i];
    return out;
}

/// a += scale * b
inline void add_scaled(DenseTensor& a, double scale, const DenseTensor& b)
{
    if (a.l() != b.l() || a.order() != b.order())
        throw InvalidArgument("add_scaled: shapes differ");
    for (std::size_t i = 0; i < a.size(); ++i)
        a[i] += scale * b[i];
}

inline double inner_product(const DenseTensor& a, const DenseTensor& b)
{
    if (a.l() != b.l() || a.order() != b.order())
        throw InvalidArgument("inner_product: shapes differ");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        acc += a[i] * b[i];
    return acc;
}

} // namespace ltcn
