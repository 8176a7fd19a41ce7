#pragma once

// Finite-support sequences, causal dilated convolution and linear functionals
// given by their convolution kernel.
//
// Every sum runs in ascending time index (then ascending channel) with
// double accumulation, so results are reproducible bit for bit.

#include "errors.hpp"
#include "rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace ltcn {

/// Scalar sequence supported on [start, start + values.size()); zero elsewhere.
struct ScalarSeq
{
    std::int64_t start = 0;
    std::vector<double> values;

    std::int64_t end() const { return start + static_cast<std::int64_t>(values.size()); }

    double at(std::int64_t t) const
    {
        if (t < start || t >= end())
            return 0.0;
        return values[static_cast<std::size_t>(t - start)];
    }
};

/// Sequence of d-dimensional vectors, stored time-major: values[i * d + j] is
/// component j at time start + i. Outside the stored window the sequence is 0.
class VectorSeq
{
public:
    VectorSeq() = default;

    VectorSeq(std::int64_t start, std::size_t d, std::vector<double> values)
        : start_(start), d_(d), values_(std::move(values))
    {
        if (d_ == 0)
            throw InvalidArgument("VectorSeq: d must be >= 1");
        if (values_.size() % d_ != 0)
            throw InvalidArgument("VectorSeq: value count is not a multiple of d");
    }

    /// Zero sequence of the given length.
    static VectorSeq zeros(std::int64_t start, std::size_t d, std::size_t length)
    {
        return VectorSeq(start, d, std::vector<double>(length * d, 0.0));
    }

    /// Lift a scalar sequence to d = 1.
    static VectorSeq from_scalar(const ScalarSeq& s) { return VectorSeq(s.start, 1, s.values); }

    std::int64_t start() const { return start_; }
    std::int64_t end() const { return start_ + static_cast<std::int64_t>(length()); }
    std::size_t d() const { return d_; }
    std::size_t length() const { return d_ == 0 ? 0 : values_.size() / d_; }
    const std::vector<double>& values() const { return values_; }

    double at(std::int64_t t, std::size_t j) const
    {
        if (t < start_ || t >= end())
            return 0.0;
        return values_[static_cast<std::size_t>(t - start_) * d_ + j];
    }

    void set(std::int64_t t, std::size_t j, double v)
    {
        values_.at(static_cast<std::size_t>(t - start_) * d_ + j) = v;
    }

    /// Scalar sequence of component j.
    ScalarSeq channel(std::size_t j) const
    {
        ScalarSeq out{start_, std::vector<double>(length())};
        for (std::size_t i = 0; i < length(); ++i)
            out.values[i] = values_[i * d_ + j];
        return out;
    }

    /// x(. - tau)
    VectorSeq shifted(std::int64_t tau) const { return VectorSeq(start_ + tau, d_, values_); }

    /// Euclidean (l2) norm over all times and components.
    double norm() const
    {
        double acc = 0.0;
        for (double v : values_)
            acc += v * v;
        return std::sqrt(acc);
    }

private:
    std::int64_t start_ = 0;
    std::size_t d_ = 1;
    std::vector<double> values_;
};

/// Convolution kernel of a causal time-homogeneous linear functional:
/// d scalar channels, all supported on [0, horizon).
class FunctionalKernel
{
public:
    FunctionalKernel() = default;

    explicit FunctionalKernel(std::vector<std::vector<double>> channels)
        : channels_(std::move(channels))
    {
        if (channels_.empty())
            throw InvalidArgument("FunctionalKernel: need at least one channel");
        const std::size_t horizon = channels_.front().size();
        if (horizon == 0)
            throw InvalidArgument("FunctionalKernel: horizon must be >= 1");
        for (const auto& c : channels_) {
            if (c.size() != horizon)
                throw InvalidArgument("FunctionalKernel: channels must share one horizon");
            for (double v : c)
                if (!std::isfinite(v))
                    throw InvalidArgument("FunctionalKernel: non-finite entry");
        }
    }

    static FunctionalKernel zeros(std::size_t d, std::size_t horizon)
    {
        return FunctionalKernel(std::vector<std::vector<double>>(d, std::vector<double>(horizon, 0.0)));
    }

    /// Single-channel kernel.
    static FunctionalKernel scalar(std::vector<double> values)
    {
        return FunctionalKernel(std::vector<std::vector<double>>{std::move(values)});
    }

    std::size_t d() const { return channels_.size(); }
    std::size_t horizon() const { return channels_.empty() ? 0 : channels_.front().size(); }
    const std::vector<std::vector<double>>& channels() const { return channels_; }
    const std::vector<double>& channel(std::size_t j) const { return channels_.at(j); }

    double at(std::size_t j, std::int64_t s) const
    {
        if (s < 0 || s >= static_cast<std::int64_t>(horizon()))
            return 0.0;
        return channels_[j][static_cast<std::size_t>(s)];
    }

    /// Channel j restricted to [0, length), zero-padded when length > horizon.
    std::vector<double> restricted(std::size_t j, std::size_t length) const
    {
        std::vector<double> out(length, 0.0);
        const auto& c = channels_.at(j);
        std::copy_n(c.begin(), std::min(length, c.size()), out.begin());
        return out;
    }

    /// Same kernel with every channel zero-padded or cut to `length`.
    FunctionalKernel resized(std::size_t length) const
    {
        std::vector<std::vector<double>> out;
        out.reserve(d());
        for (std::size_t j = 0; j < d(); ++j)
            out.push_back(restricted(j, length));
        return FunctionalKernel(std::move(out));
    }

    double squared_norm() const
    {
        double acc = 0.0;
        for (std::size_t s = 0; s < horizon(); ++s)
            for (std::size_t j = 0; j < d(); ++j)
                acc += channels_[j][s] * channels_[j][s];
        return acc;
    }

    double norm() const { return std::sqrt(squared_norm()); }

    FunctionalKernel scaled(double c) const
    {
        auto out = channels_;
        for (auto& ch : out)
            for (double& v : ch)
                v *= c;
        return FunctionalKernel(std::move(out));
    }

    friend bool operator==(const FunctionalKernel&, const FunctionalKernel&) = default;

private:
    std::vector<std::vector<double>> channels_;
};

/// (f (*)_r g)(t) = sum_{s>=0} f(s) g(t - r s) for a scalar filter f on [0, f.size()).
inline ScalarSeq dilated_convolve(std::span<const double> f, const ScalarSeq& g, std::int64_t r)
{
    if (r < 1)
        throw InvalidArgument("dilated_convolve: dilation must be >= 1");
    if (f.empty() || g.values.empty())
        return ScalarSeq{g.start, {}};
    const auto taps = static_cast<std::int64_t>(f.size());
    ScalarSeq out{g.start, std::vector<double>(g.values.size() + static_cast<std::size_t>(r * (taps - 1)), 0.0)};
    for (std::int64_t t = out.start; t < out.end(); ++t) {
        double acc = 0.0;
        for (std::int64_t s = 0; s < taps; ++s)
            acc += f[static_cast<std::size_t>(s)] * g.at(t - r * s);
        out.values[static_cast<std::size_t>(t - out.start)] = acc;
    }
    return out;
}

/// Vector-valued version: (f (*)_r g)(t) = sum_{s>=0} f(s)^T g(t - r s).
/// The filter f must start at time 0.
inline ScalarSeq dilated_convolve(const VectorSeq& f, const VectorSeq& g, std::int64_t r)
{
    if (r < 1)
        throw InvalidArgument("dilated_convolve: dilation must be >= 1");
    if (f.d() != g.d())
        throw DimensionMismatch(f.d(), g.d(), "dilated_convolve");
    if (f.start() != 0)
        throw InvalidArgument("dilated_convolve: filter must be supported from time 0");
    if (f.length() == 0 || g.length() == 0)
        return ScalarSeq{g.start(), {}};
    const auto taps = static_cast<std::int64_t>(f.length());
    ScalarSeq out{g.start(), std::vector<double>(g.length() + static_cast<std::size_t>(r * (taps - 1)), 0.0)};
    for (std::int64_t t = out.start; t < out.end(); ++t) {
        double acc = 0.0;
        for (std::int64_t s = 0; s < taps; ++s)
            for (std::size_t j = 0; j < f.d(); ++j)
                acc += f.at(s, j) * g.at(t - r * s, j);
        out.values[static_cast<std::size_t>(t - out.start)] = acc;
    }
    return out;
}

/// H_t(x) = sum_s rho(s)^T x(t - s).
inline double apply_functional(const FunctionalKernel& rho, const VectorSeq& x, std::int64_t t)
{
    if (rho.d() != x.d())
        throw DimensionMismatch(rho.d(), x.d(), "apply_functional");
    // Only lags with t - s inside x's window contribute.
    const std::int64_t s_lo = std::max<std::int64_t>(0, t - x.end() + 1);
    const std::int64_t s_hi = std::min<std::int64_t>(static_cast<std::int64_t>(rho.horizon()), t - x.start() + 1);
    double acc = 0.0;
    for (std::int64_t s = s_lo; s < s_hi; ++s)
        for (std::size_t j = 0; j < rho.d(); ++j)
            acc += rho.channels()[j][static_cast<std::size_t>(s)] * x.at(t - s, j);
    return acc;
}

/// Kernel difference a - b over the union of supports.
inline FunctionalKernel kernel_difference(const FunctionalKernel& a, const FunctionalKernel& b)
{
    if (a.d() != b.d())
        throw DimensionMismatch(a.d(), b.d(), "kernel_difference");
    const std::size_t horizon = std::max(a.horizon(), b.horizon());
    std::vector<std::vector<double>> out(a.d(), std::vector<double>(horizon, 0.0));
    for (std::size_t j = 0; j < a.d(); ++j)
        for (std::size_t s = 0; s < horizon; ++s)
            out[j][s] = a.at(j, static_cast<std::int64_t>(s)) - b.at(j, static_cast<std::int64_t>(s));
    return FunctionalKernel(std::move(out));
}

inline double kernel_l2_distance(const FunctionalKernel& a, const FunctionalKernel& b)
{
    if (a.d() != b.d())
        throw DimensionMismatch(a.d(), b.d(), "kernel_l2_distance");
    return kernel_difference(a, b).norm();
}

/// Operator distance sup_t sup_{|x| <= 1} |H_t(x) - Hhat_t(x)| between two
/// causal time-homogeneous functionals. By Cauchy-Schwarz the supremum is the
/// l2 distance of the kernels and is attained at worst_case_input().
inline double functional_error_norm(const FunctionalKernel& a, const FunctionalKernel& b)
{
    return kernel_l2_distance(a, b);
}

/// Unit-norm input x with x(t - s) = delta(s) / |delta|, which attains
/// |sum_s delta(s)^T x(t - s)| = |delta|.
inline VectorSeq worst_case_input(const FunctionalKernel& delta, std::int64_t t)
{
    const double n = delta.norm();
    if (n == 0.0)
        throw InvalidArgument("worst_case_input: zero kernel has no extremal input");
    const std::size_t horizon = delta.horizon();
    const std::int64_t start = t - static_cast<std::int64_t>(horizon) + 1;
    VectorSeq x = VectorSeq::zeros(start, delta.d(), horizon);
    for (std::size_t s = 0; s < horizon; ++s)
        for (std::size_t j = 0; j < delta.d(); ++j)
            x.set(t - static_cast<std::int64_t>(s), j, delta.channels()[j][s] / n);
    return x;
}

enum class ExpectationMode
{
    monte_carlo,
    exact,
};

/// E_{x ~ N(0, I) iid in time} |H_t(x) - Hhat_t(x)|^2.
///
/// Monte-Carlo mode draws n_samples independent windows of standard normals
/// covering the union support (lags ascending, then channels). Exact mode
/// returns the closed form sum_s |a(s) - b(s)|^2.
inline double gaussian_mse(const FunctionalKernel& a, const FunctionalKernel& b, std::size_t n_samples,
                           std::uint64_t seed, ExpectationMode mode = ExpectationMode::monte_carlo)
{
    if (n_samples == 0)
        throw InvalidArgument("gaussian_mse: n_samples must be >= 1");
    const FunctionalKernel delta = kernel_difference(a, b);
    if (mode == ExpectationMode::exact)
        return delta.squared_norm();

    CounterRng rng(seed);
    double acc = 0.0;
    for (std::size_t n = 0; n < n_samples; ++n) {
        double diff = 0.0;
        for (std::size_t s = 0; s < delta.horizon(); ++s)
            for (std::size_t j = 0; j < delta.d(); ++j)
                diff += delta.channels()[j][s] * rng.normal();
        acc += diff * diff;
    }
    return acc / static_cast<double>(n_samples);
}

} // namespace ltcn
