#pragma once

// Complexity measures of a target kernel rho:
//
//   C1(g) = sup_{K >= 1, s >= 1} sum_j sum_{i >= s} |s_i^{(j,K)}|^2 / g(s - 1)
//   C2(f) = sup_{s >= 0} sum_{i >= s} |rho(i)|^2 / f(s)
//
// where s_i^{(j,K)} is the i-th largest HOSVD core entry of the tensorized
// restriction of channel j to [0, l^K). The supremum over K is truncated at a
// caller-supplied K_max.

#include "errors.hpp"
#include "hosvd.hpp"
#include "sequence.hpp"
#include "tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace ltcn {

/// Non-increasing positive envelope: factor * base(s) with base one of
/// exp(-beta s), (1 + s)^-alpha, or a table (last value repeated past its end).
class DecayEnvelope
{
public:
    struct Exponential
    {
        double beta;
    };
    struct Power
    {
        double alpha;
    };
    struct Table
    {
        std::vector<double> values;
    };
    using Kind = std::variant<Exponential, Power, Table>;

    static DecayEnvelope exponential(double beta) { return DecayEnvelope(Exponential{beta}); }
    static DecayEnvelope power(double alpha) { return DecayEnvelope(Power{alpha}); }
    static DecayEnvelope table(std::vector<double> values) { return DecayEnvelope(Table{std::move(values)}); }

    double operator()(std::size_t s) const
    {
        const double x = static_cast<double>(s);
        return factor_ * std::visit(
                             [&](const auto& k) -> double {
                                 using T = std::decay_t<decltype(k)>;
                                 if constexpr (std::is_same_v<T, Exponential>)
                                     return std::exp(-k.beta * x);
                                 else if constexpr (std::is_same_v<T, Power>)
                                     return std::pow(1.0 + x, -k.alpha);
                                 else
                                     return k.values[std::min(s, k.values.size() - 1)];
                             },
                             kind_);
    }

    DecayEnvelope scaled(double c) const
    {
        if (!(c > 0.0) || !std::isfinite(c))
            throw InvalidArgument("DecayEnvelope: scale must be positive and finite");
        DecayEnvelope out = *this;
        out.factor_ *= c;
        return out;
    }

    const Kind& kind() const { return kind_; }
    double factor() const { return factor_; }

    std::string describe() const
    {
        std::string base = std::visit(
            [](const auto& k) -> std::string {
                using T = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<T, Exponential>)
                    return "exp:" + std::to_string(k.beta);
                else if constexpr (std::is_same_v<T, Power>)
                    return "pow:" + std::to_string(k.alpha);
                else
                    return "table[" + std::to_string(k.values.size()) + "]";
            },
            kind_);
        return factor_ == 1.0 ? base : std::to_string(factor_) + "*" + base;
    }

private:
    explicit DecayEnvelope(Kind kind) : kind_(std::move(kind))
    {
        std::visit(
            [](const auto& k) {
                using T = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<T, Exponential>) {
                    if (!(k.beta > 0.0) || !std::isfinite(k.beta))
                        throw InvalidArgument("exponential envelope: beta must be positive");
                } else if constexpr (std::is_same_v<T, Power>) {
                    if (!(k.alpha > 0.0) || !std::isfinite(k.alpha))
                        throw InvalidArgument("power envelope: alpha must be positive");
                } else {
                    if (k.values.empty())
                        throw InvalidArgument("table envelope: no values");
                    for (std::size_t i = 0; i < k.values.size(); ++i) {
                        if (!(k.values[i] > 0.0) || !std::isfinite(k.values[i]))
                            throw InvalidArgument("table envelope: values must be positive");
                        if (i > 0 && k.values[i] > k.values[i - 1])
                            throw InvalidArgument("table envelope: values must be non-increasing");
                    }
                }
            },
            kind_);
    }

    Kind kind_;
    double factor_ = 1.0;
};

/// tail[s] = sum_{i >= s} sum_j rho_j(i)^2 for s = 0..horizon (tail[horizon] = 0),
/// accumulated from the far end so the table is non-increasing.
inline std::vector<double> memory_tail_table(const FunctionalKernel& rho)
{
    std::vector<double> tail(rho.horizon() + 1, 0.0);
    for (std::size_t s = rho.horizon(); s-- > 0;) {
        double e = 0.0;
        for (std::size_t j = 0; j < rho.d(); ++j)
            e += rho.channels()[j][s] * rho.channels()[j][s];
        tail[s] = tail[s + 1] + e;
    }
    return tail;
}

inline double memory_tail(const FunctionalKernel& rho, std::size_t s)
{
    if (s >= rho.horizon())
        return 0.0;
    return memory_tail_table(rho)[s];
}

/// HOSVD spectrum of channel j restricted to [0, l^K).
inline Spectrum channel_spectrum(const FunctionalKernel& rho, std::size_t j, std::size_t l, std::size_t order)
{
    const std::size_t length = ipow(l, order);
    return spectrum(hosvd(tensorize(rho.restricted(j, length), l, order)));
}

/// table[s - 1] = sum_j sum_{rank >= s} |s_rank^{(j,K)}|^2 for s = 1..l^K + 1.
inline std::vector<double> spectral_tail_table(const FunctionalKernel& rho, std::size_t l, std::size_t order)
{
    if (l < 2 || order < 1)
        throw InvalidArgument("spectral_tail: need l >= 2 and K >= 1");
    std::vector<double> total(ipow(l, order) + 1, 0.0);
    for (std::size_t j = 0; j < rho.d(); ++j) {
        const auto tails = channel_spectrum(rho, j, l, order).tail_table();
        for (std::size_t i = 0; i < total.size(); ++i)
            total[i] += tails[i];
    }
    return total;
}

inline double spectral_tail(const FunctionalKernel& rho, std::size_t l, std::size_t order, std::size_t s)
{
    const auto table = spectral_tail_table(rho, l, order);
    if (s < 1 || s > table.size())
        throw InvalidArgument("spectral_tail: rank s must be in [1, l^K + 1]");
    return table[s - 1];
}

/// tail / envelope, +inf when the envelope underflows under a positive tail.
inline double tail_ratio(double tail, double envelope)
{
    if (tail == 0.0)
        return 0.0;
    if (!(envelope > 0.0))
        return std::numeric_limits<double>::infinity();
    return tail / envelope;
}

struct C2Estimate
{
    double value = 0.0;
    std::size_t witness_s = 0;
    std::size_t s_max = 0;
    bool infinite() const { return !std::isfinite(value); }
};

/// sup_{0 <= s <= s_max} memory_tail(s) / f(s); s_max defaults to the horizon.
inline C2Estimate c2_estimate(const FunctionalKernel& rho, const DecayEnvelope& f,
                              std::optional<std::size_t> s_max = std::nullopt)
{
    const std::size_t last = s_max.value_or(rho.horizon());
    if (last + 1 < rho.horizon())
        throw InvalidArgument("c2_estimate: s_max must reach the end of the support");
    const auto tails = memory_tail_table(rho);
    C2Estimate out;
    out.s_max = last;
    for (std::size_t s = 0; s <= last; ++s) {
        const double tail = s < tails.size() ? tails[s] : 0.0;
        const double r = tail_ratio(tail, f(s));
        if (r > out.value) {
            out.value = r;
            out.witness_s = s;
        }
    }
    return out;
}

struct C1Estimate
{
    double value = 0.0;
    std::size_t witness_s = 1;
    std::size_t witness_K = 1;
    std::size_t K_max = 1;
    std::vector<double> per_K_sup;                 ///< per_K_sup[K - 1]
    std::vector<std::vector<double>> tail_tables;  ///< tail_tables[K - 1][s - 1]
    bool converged = false; ///< last two per-K suprema within 1%
    bool infinite() const { return !std::isfinite(value); }
};

/// sup over K in [1, K_max], s in [1, l^K] of spectral_tail(s) / g(s - 1).
/// Ties keep the smaller K, then the smaller s, as witness.
inline C1Estimate c1_estimate(const FunctionalKernel& rho, const DecayEnvelope& g, std::size_t l, std::size_t K_max)
{
    if (K_max < 1)
        throw InvalidArgument("c1_estimate: K_max must be >= 1");
    C1Estimate out;
    out.K_max = K_max;
    for (std::size_t order = 1; order <= K_max; ++order) {
        auto tails = spectral_tail_table(rho, l, order);
        double best = 0.0;
        for (std::size_t s = 1; s < tails.size(); ++s) {
            const double r = tail_ratio(tails[s - 1], g(s - 1));
            best = std::max(best, r);
            if (r > out.value) {
                out.value = r;
                out.witness_s = s;
                out.witness_K = order;
            }
        }
        out.per_K_sup.push_back(best);
        out.tail_tables.push_back(std::move(tails));
    }
    if (out.per_K_sup.size() >= 2) {
        const double a = out.per_K_sup[out.per_K_sup.size() - 2];
        const double b = out.per_K_sup.back();
        out.converged = (a == b) || (std::isfinite(b) && std::abs(a - b) < 0.01 * std::max(a, b));
    }
    return out;
}

/// Smallest K with l^K >= horizon: past it, every tensorization sees the
/// whole support and the spectral tails stop changing.
inline std::size_t stabilization_K(const FunctionalKernel& rho, std::size_t l)
{
    std::size_t order = 1;
    while (ipow(l, order) < rho.horizon())
        ++order;
    return order;
}

struct ComplexityReport
{
    std::size_t l = 2;
    C1Estimate c1;
    C2Estimate c2;
    std::vector<double> memory_tails; ///< memory_tails[s], s = 0..horizon
    std::size_t stabilization_K = 1;

    bool finite() const { return !c1.infinite() && !c2.infinite(); }
};

inline ComplexityReport complexity_report(const FunctionalKernel& rho, const DecayEnvelope& g, const DecayEnvelope& f,
                                          std::size_t l, std::size_t K_max)
{
    ComplexityReport out;
    out.l = l;
    out.c1 = c1_estimate(rho, g, l, K_max);
    out.c2 = c2_estimate(rho, f);
    out.memory_tails = memory_tail_table(rho);
    out.stabilization_K = stabilization_K(rho, l);
    return out;
}

/// Squared quantities at or below this fraction of the target energy are
/// treated as rounding noise.
inline constexpr double numerical_zero_fraction = 1e-24;

namespace detail {
    inline double envelope_floor(const FunctionalKernel& rho)
    {
        const double e = rho.squared_norm();
        return e > 0.0 ? e * numerical_zero_fraction : 1.0;
    }
} // namespace detail

/// Tight spectral envelope: g(m) = max_{K <= K_max} spectral_tail(m + 1, K),
/// floored at the numerical-zero level so it stays positive.
inline DecayEnvelope fit_spectral_envelope(const FunctionalKernel& rho, std::size_t l, std::size_t K_max)
{
    if (K_max < 1)
        throw InvalidArgument("fit_spectral_envelope: K_max must be >= 1");
    std::vector<double> values(ipow(l, K_max) + 1, 0.0);
    for (std::size_t order = 1; order <= K_max; ++order) {
        const auto tails = spectral_tail_table(rho, l, order);
        for (std::size_t m = 0; m < tails.size(); ++m)
            values[m] = std::max(values[m], tails[m]);
    }
    const double floor = detail::envelope_floor(rho);
    for (double& v : values)
        v = std::max(v, floor);
    return DecayEnvelope::table(std::move(values));
}

/// Tight memory envelope: f(s) = memory_tail(s), floored like the spectral fit.
inline DecayEnvelope fit_memory_envelope(const FunctionalKernel& rho)
{
    auto values = memory_tail_table(rho);
    const double floor = detail::envelope_floor(rho);
    for (double& v : values)
        v = std::max(v, floor);
    return DecayEnvelope::table(std::move(values));
}

} // namespace ltcn
