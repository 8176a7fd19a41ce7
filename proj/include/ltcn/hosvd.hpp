#pragma once

// Higher-order SVD (De Lathauwer et al.): one orthogonal factor per mode from
// the left singular vectors of the mode unfolding, and the all-orthogonal
// core S = A x_1 U_1^T ... x_K U_K^T.
//
// With square orthogonal factors the rank-one tensors
// u_{1,i_1} (x) ... (x) u_{K,i_K} form an orthonormal basis of the tensor
// space, and the core entries are the coordinates of A in that basis. Keeping
// any subset of core entries therefore leaves a squared Frobenius error equal
// to the sum of the squared dropped entries.

#include "svd.hpp"
#include "tensor.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace ltcn {

struct HosvdResult
{
    std::vector<Matrix> factors; ///< factors[k] is U_{k+1}, l x l orthogonal
    DenseTensor core;
};

/// One separable term scale * f_K (x) ... (x) f_1.
/// factors[k] is the mode-(k+1) vector, which is also the layer-k filter when
/// the term is realized as a network.
struct RankOneTerm
{
    double scale = 0.0;
    std::vector<std::vector<double>> factors;
};

/// scale * outer product of the factors, laid out like DenseTensor.
inline DenseTensor term_tensor(const RankOneTerm& term)
{
    std::vector<std::vector<double>> outermost_first(term.factors.rbegin(), term.factors.rend());
    DenseTensor out = outer_product(outermost_first);
    for (double& v : out.data())
        v *= term.scale;
    return out;
}

inline HosvdResult hosvd(const DenseTensor& a)
{
    HosvdResult out;
    out.factors.reserve(a.order());
    for (std::size_t mode = 1; mode <= a.order(); ++mode)
        out.factors.push_back(left_singular_basis(unfold(a, mode)).u);
    out.core = a;
    for (std::size_t mode = 1; mode <= a.order(); ++mode)
        out.core = mode_product(out.core, out.factors[mode - 1].transposed(), mode);
    return out;
}

/// A = S x_1 U_1 ... x_K U_K
inline DenseTensor reconstruct(const HosvdResult& h)
{
    DenseTensor out = h.core;
    for (std::size_t mode = 1; mode <= h.core.order(); ++mode)
        out = mode_product(out, h.factors[mode - 1], mode);
    return out;
}

struct SpectrumEntry
{
    double magnitude = 0.0;
    double value = 0.0;
    std::vector<std::size_t> index; ///< zero-based (i_1..i_K)
};

/// Core entries by decreasing magnitude; equal magnitudes are ordered by
/// lexicographic multi-index (i_1 most significant).
struct Spectrum
{
    std::vector<SpectrumEntry> entries;

    double squared_sum(std::size_t from_rank = 1) const
    {
        // smallest entries first
        double acc = 0.0;
        for (std::size_t r = entries.size(); r >= std::max<std::size_t>(from_rank, 1); --r)
            acc += entries[r - 1].magnitude * entries[r - 1].magnitude;
        return acc;
    }

    /// tails[s - 1] = sum_{rank >= s} |s_rank|^2 for s = 1..size+1, accumulated
    /// from the smallest entry upward so the table is non-increasing.
    std::vector<double> tail_table() const
    {
        std::vector<double> tails(entries.size() + 1, 0.0);
        for (std::size_t r = entries.size(); r >= 1; --r)
            tails[r - 1] = tails[r] + entries[r - 1].magnitude * entries[r - 1].magnitude;
        return tails;
    }
};

inline Spectrum spectrum(const HosvdResult& h)
{
    Spectrum out;
    out.entries.reserve(h.core.size());
    for (std::size_t flat = 0; flat < h.core.size(); ++flat) {
        const double v = h.core[flat];
        out.entries.push_back(SpectrumEntry{std::abs(v), v, h.core.digits(flat)});
    }
    std::sort(out.entries.begin(), out.entries.end(), [](const SpectrumEntry& a, const SpectrumEntry& b) {
        if (a.magnitude != b.magnitude)
            return a.magnitude > b.magnitude;
        return a.index < b.index;
    });
    return out;
}

struct Truncation
{
    std::vector<RankOneTerm> terms;
    DenseTensor approx;
};

/// Keeps the M largest-magnitude core entries as rank-one terms with the
/// matching HOSVD basis vectors. The zero tensor yields no terms.
inline Truncation truncate(const HosvdResult& h, std::size_t max_terms)
{
    if (max_terms < 1)
        throw InvalidArgument("truncate: M must be >= 1");
    const Spectrum spec = spectrum(h);
    Truncation out{{}, DenseTensor(h.core.l(), h.core.order())};
    if (spec.entries.empty() || spec.entries.front().magnitude == 0.0)
        return out;
    const std::size_t kept = std::min(max_terms, spec.entries.size());
    for (std::size_t m = 0; m < kept; ++m) {
        const auto& e = spec.entries[m];
        RankOneTerm term{e.value, {}};
        for (std::size_t k = 0; k < h.factors.size(); ++k)
            term.factors.push_back(h.factors[k].column(e.index[k]));
        add_scaled(out.approx, 1.0, term_tensor(term));
        out.terms.push_back(std::move(term));
    }
    return out;
}

} // namespace ltcn
