#pragma once

// Synthetic targets with known structure.

#include "errors.hpp"
#include "hosvd.hpp"
#include "rng.hpp"
#include "sequence.hpp"
#include "tensor.hpp"

#include <cmath>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace ltcn {

struct ShiftTarget
{
    std::size_t lag = 0;
};

struct ExponentialTarget
{
    double lambda = 0.5;
    std::size_t horizon = 1;
};

struct PowerTarget
{
    double alpha = 1.0;
    std::size_t horizon = 1;
};

struct LowRankTarget
{
    std::size_t l = 2;
    std::size_t order = 2; ///< K
    std::size_t rank = 1;
    std::uint64_t seed = 0;
};

struct FileTarget
{
    std::string path;
};

using TargetKind = std::variant<ShiftTarget, ExponentialTarget, PowerTarget, LowRankTarget, FileTarget>;

struct TargetSpec
{
    TargetKind kind;
    std::size_t d = 1;
};

/// Largest rank for which planted scales are exactly the HOSVD magnitudes:
/// l^(K-1) for K >= 2 (single-parity code words), 1 for K = 1.
inline std::size_t max_planted_rank(std::size_t l, std::size_t order)
{
    return order == 1 ? 1 : ipow(l, order - 1);
}

inline void validate(const TargetSpec& spec)
{
    if (spec.d < 1)
        throw InvalidArgument("target: d must be >= 1");
    std::visit(
        [](const auto& t) {
            using T = std::decay_t<decltype(t)>;
            if constexpr (std::is_same_v<T, ExponentialTarget>) {
                if (!(t.lambda > 0.0 && t.lambda < 1.0))
                    throw InvalidArgument("exponential target: need 0 < lambda < 1");
                if (t.horizon < 1)
                    throw InvalidArgument("exponential target: horizon must be >= 1");
            } else if constexpr (std::is_same_v<T, PowerTarget>) {
                if (!(t.alpha > 0.5))
                    throw InvalidArgument("power target: need alpha > 0.5 for square summability");
                if (t.horizon < 1)
                    throw InvalidArgument("power target: horizon must be >= 1");
            } else if constexpr (std::is_same_v<T, LowRankTarget>) {
                if (t.l < 2 || t.order < 1)
                    throw InvalidArgument("low-rank target: need l >= 2 and K >= 1");
                if (t.rank < 1 || t.rank > max_planted_rank(t.l, t.order))
                    throw InvalidArgument("low-rank target: rank must be in [1, " +
                                          std::to_string(max_planted_rank(t.l, t.order)) + "]");
            } else if constexpr (std::is_same_v<T, FileTarget>) {
                if (t.path.empty())
                    throw InvalidArgument("file target: empty path");
            }
        },
        spec.kind);
}

namespace detail {

    /// Random l x l orthogonal matrix by Gram-Schmidt on Gaussian columns.
    inline Matrix random_orthogonal(std::size_t l, CounterRng& rng)
    {
        std::vector<std::vector<double>> cols;
        while (cols.size() < l) {
            std::vector<double> v(l);
            for (double& x : v)
                x = rng.normal();
            for (int pass = 0; pass < 2; ++pass)
                for (const auto& c : cols) {
                    double proj = 0.0;
                    for (std::size_t i = 0; i < l; ++i)
                        proj += c[i] * v[i];
                    for (std::size_t i = 0; i < l; ++i)
                        v[i] -= proj * c[i];
                }
            double n = 0.0;
            for (double x : v)
                n += x * x;
            n = std::sqrt(n);
            if (n < 1e-8)
                continue;
            for (double& x : v)
                x /= n;
            cols.push_back(std::move(v));
        }
        Matrix q(l, l);
        for (std::size_t j = 0; j < l; ++j)
            for (std::size_t i = 0; i < l; ++i)
                q(i, j) = cols[j][i];
        return q;
    }

} // namespace detail

/// Multi-index of planted term r (0-based): the first K-1 digits are the
/// base-l digits of r, the last makes the digit sum 0 mod l. Distinct code
/// words differ in at least two digits, which keeps the planted core
/// all-orthogonal.
inline std::vector<std::size_t> planted_index(std::size_t r, std::size_t l, std::size_t order)
{
    std::vector<std::size_t> idx(order, 0);
    if (order == 1)
        return idx;
    std::size_t sum = 0;
    for (std::size_t j = 0; j + 1 < order; ++j) {
        idx[j] = r % l;
        sum += idx[j];
        r /= l;
    }
    idx[order - 1] = (l - sum % l) % l;
    return idx;
}

/// Planted scale of term r (1-based): 2^-r.
inline double planted_scale(std::size_t r) { return std::ldexp(1.0, -static_cast<int>(r)); }

/// sum_{r=1}^{rank} 2^-r q_{1,i_1(r)} (x) ... (x) q_{K,i_K(r)} with random
/// orthogonal Q_k, detensorized to a length-l^K sequence.
inline std::vector<double> planted_low_rank_sequence(const LowRankTarget& t)
{
    CounterRng rng(t.seed);
    std::vector<Matrix> q;
    for (std::size_t k = 0; k < t.order; ++k)
        q.push_back(detail::random_orthogonal(t.l, rng));
    DenseTensor acc(t.l, t.order);
    for (std::size_t r = 1; r <= t.rank; ++r) {
        const auto idx = planted_index(r - 1, t.l, t.order);
        RankOneTerm term{planted_scale(r), {}};
        for (std::size_t k = 0; k < t.order; ++k)
            term.factors.push_back(q[k].column(idx[k]));
        add_scaled(acc, 1.0, term_tensor(term));
    }
    return detensorize(acc);
}

/// Kernel of the target. Every input dimension gets the same channel, except
/// low-rank targets which draw dimension j from seed + j. File targets must be
/// resolved by the caller (see io.hpp).
inline FunctionalKernel generate(const TargetSpec& spec)
{
    validate(spec);
    std::vector<std::vector<double>> channels;
    for (std::size_t j = 0; j < spec.d; ++j) {
        std::vector<double> ch = std::visit(
            [j](const auto& t) -> std::vector<double> {
                using T = std::decay_t<decltype(t)>;
                if constexpr (std::is_same_v<T, ShiftTarget>) {
                    std::vector<double> out(t.lag + 1, 0.0);
                    out[t.lag] = 1.0;
                    return out;
                } else if constexpr (std::is_same_v<T, ExponentialTarget>) {
                    std::vector<double> out(t.horizon);
                    for (std::size_t s = 0; s < t.horizon; ++s)
                        out[s] = std::pow(t.lambda, static_cast<double>(s));
                    return out;
                } else if constexpr (std::is_same_v<T, PowerTarget>) {
                    std::vector<double> out(t.horizon);
                    for (std::size_t s = 0; s < t.horizon; ++s)
                        out[s] = std::pow(1.0 + static_cast<double>(s), -t.alpha);
                    return out;
                } else if constexpr (std::is_same_v<T, LowRankTarget>) {
                    LowRankTarget per_dim = t;
                    per_dim.seed = t.seed + j;
                    return planted_low_rank_sequence(per_dim);
                } else {
                    throw InvalidArgument("generate: file targets are loaded by the io layer");
                }
            },
            spec.kind);
        channels.push_back(std::move(ch));
    }
    return FunctionalKernel(std::move(channels));
}

/// Energy the horizon cut drops, relative to the full (untruncated) energy.
/// Zero for targets that are finite by construction.
inline double truncated_energy_fraction(const TargetSpec& spec)
{
    return std::visit(
        [](const auto& t) -> double {
            using T = std::decay_t<decltype(t)>;
            if constexpr (std::is_same_v<T, ExponentialTarget>) {
                // tail / total = lambda^(2T)
                return std::pow(t.lambda, 2.0 * static_cast<double>(t.horizon));
            } else if constexpr (std::is_same_v<T, PowerTarget>) {
                // sum_{n > T} n^(-2a) bounded by the integral from T
                const double p = 2.0 * t.alpha;
                const double tail = std::pow(static_cast<double>(t.horizon), 1.0 - p) / (p - 1.0);
                double head = 0.0;
                for (std::size_t s = t.horizon; s >= 1; --s)
                    head += std::pow(static_cast<double>(s), -p);
                return tail / (head + tail);
            } else {
                return 0.0;
            }
        },
        spec.kind);
}

/// Energy fraction above which a horizon cut is reported.
inline constexpr double truncation_warning_threshold = 1e-14;

} // namespace ltcn
