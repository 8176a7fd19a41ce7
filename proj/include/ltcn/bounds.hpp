#pragma once

// Constructive upper bound (best M-term HOSVD truncation realized as a network)
// and the inverse estimate that recovers complexity constants from a grid of
// achieved errors.
//
// For a network with K layers, M terms per input dimension and kernel rho_hat:
//
//   |rho - rho_hat|^2 = sum_j sum_{rank > M} |s_rank^{(j,K)}|^2   (spectral part)
//                     + sum_{s >= l^K} |rho(s)|^2                  (memory part)
//
// and each part is bounded through C1 * g(M) and C2 * f(l^K).

#include "complexity.hpp"
#include "errors.hpp"
#include "hosvd.hpp"
#include "network.hpp"
#include "parallel.hpp"
#include "sequence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace ltcn {

/// Relative tolerance for exact identities.
inline constexpr double identity_rtol = 1e-9;
/// Relative slack for bound inequalities.
inline constexpr double inequality_rtol = 1e-6;

struct GridPoint
{
    std::size_t M = 1;
    std::size_t K = 1;
    friend auto operator<=>(const GridPoint& a, const GridPoint& b)
    {
        // (K, M) order
        if (auto c = a.K <=> b.K; c != 0)
            return c;
        return a.M <=> b.M;
    }
    friend bool operator==(const GridPoint&, const GridPoint&) = default;
};

struct JacksonPoint
{
    std::size_t M = 1;
    std::size_t K = 1;
    double error_sq = 0.0;          ///< |rho - effective_filter(net)|^2
    double error_sq_split = 0.0;    ///< spectral_tail_val + memory_tail_val
    double spectral_tail_val = 0.0; ///< spectral_tail(M + 1, K)
    double memory_tail_val = 0.0;   ///< memory_tail(l^K)
    std::optional<double> bound;    ///< C1 g(M) + C2 f(l^K), when constants are known
    std::size_t network_channels = 0;
    double energy = 0.0; ///< |rho|^2, scale for the numerical-zero floor

    bool identity_holds() const
    {
        const double tol = identity_rtol * std::max(error_sq, error_sq_split) + numerical_zero_fraction * energy;
        return std::abs(error_sq - error_sq_split) <= tol;
    }

    bool bound_holds() const
    {
        if (!bound)
            return false;
        return error_sq <= *bound + identity_rtol * *bound + numerical_zero_fraction * energy;
    }

    double ratio() const
    {
        if (!bound || *bound == 0.0)
            return error_sq == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
        return error_sq / *bound;
    }
};

struct JacksonResult
{
    ConvNetParams net;
    JacksonPoint point;
};

/// Truncates the HOSVD of every tensorized channel to its top-M terms and
/// realizes all kept terms in one network (one channel per kept term).
inline JacksonResult jackson_approximate(const FunctionalKernel& rho, std::size_t l, std::size_t order, std::size_t M)
{
    if (l < 2 || order < 1)
        throw InvalidArgument("jackson_approximate: need l >= 2 and K >= 1");
    if (M < 1)
        throw InvalidArgument("jackson_approximate: need M >= 1");
    const std::size_t length = ipow(l, order);

    std::vector<RankOneTerm> terms;
    std::vector<std::size_t> dims;
    double spectral = 0.0;
    for (std::size_t j = 0; j < rho.d(); ++j) {
        const HosvdResult h = hosvd(tensorize(rho.restricted(j, length), l, order));
        const auto tails = spectrum(h).tail_table();
        spectral += tails[std::min(M, tails.size() - 1)];
        for (auto& term : truncate(h, M).terms) {
            terms.push_back(std::move(term));
            dims.push_back(j);
        }
    }

    ConvNetParams net = terms.empty() ? ConvNetParams(l, order, 1, rho.d())
                                      : from_rank_one_terms(terms, l, order, rho.d(), dims);
    JacksonPoint p;
    p.M = M;
    p.K = order;
    const double dist = kernel_l2_distance(rho, effective_filter(net));
    p.error_sq = dist * dist;
    p.spectral_tail_val = spectral;
    p.memory_tail_val = memory_tail(rho, length);
    p.error_sq_split = p.spectral_tail_val + p.memory_tail_val;
    p.network_channels = net.channels();
    p.energy = rho.squared_norm();
    return JacksonResult{std::move(net), p};
}

/// Infinite C1 or C2: the envelope cannot dominate the measured tails.
class InfiniteComplexity : public InvalidArgument
{
public:
    using InvalidArgument::InvalidArgument;
};

struct JacksonSweep
{
    ComplexityReport complexity;
    std::vector<JacksonPoint> points; ///< sorted by (K, M)
    bool pass = true;
};

inline std::size_t max_K(const std::vector<GridPoint>& grid)
{
    std::size_t out = 0;
    for (const auto& p : grid)
        out = std::max(out, p.K);
    return out;
}

inline void check_finite_constants(const ComplexityReport& c)
{
    if (c.c1.infinite())
        throw InfiniteComplexity("C1 is infinite: spectral envelope g underflows below a positive tail at s = " +
                                 std::to_string(c.c1.witness_s) + ", K = " + std::to_string(c.c1.witness_K));
    if (c.c2.infinite())
        throw InfiniteComplexity("C2 is infinite: memory envelope f underflows below a positive tail at s = " +
                                 std::to_string(c.c2.witness_s));
}

/// Builds the approximant at every grid point and checks
/// error_sq == spectral + memory tails and error_sq <= C1 g(M) + C2 f(l^K),
/// with C1 taken up to the largest K of the grid.
inline JacksonSweep verify_jackson(const FunctionalKernel& rho, const DecayEnvelope& g, const DecayEnvelope& f,
                                   std::size_t l, std::vector<GridPoint> grid, std::size_t threads = 1)
{
    if (grid.empty())
        throw InvalidArgument("verify_jackson: empty grid");
    std::sort(grid.begin(), grid.end());
    JacksonSweep out;
    out.complexity = complexity_report(rho, g, f, l, max_K(grid));
    check_finite_constants(out.complexity);
    const double c1 = out.complexity.c1.value;
    const double c2 = out.complexity.c2.value;

    out.points.resize(grid.size());
    parallel_for(grid.size(), threads, [&](std::size_t i) {
        JacksonPoint p = jackson_approximate(rho, l, grid[i].K, grid[i].M).point;
        p.bound = c1 * g(p.M) + c2 * f(ipow(l, p.K));
        out.points[i] = p;
    });
    for (const auto& p : out.points)
        out.pass = out.pass && p.identity_holds() && p.bound_holds();
    return out;
}

using ErrorGrid = std::map<GridPoint, double>;

struct BernsteinEstimate
{
    double A_est = 0.0;
    double B_est = 0.0;
    std::size_t witness_M = 0; ///< M attaining A_est
    std::size_t witness_K = 0; ///< K attaining B_est
    std::size_t M_max = 0;
    std::size_t K_max = 0;
    double memory_floor = 0.0; ///< error_sq(M_max, K_max), removed from A_est
    double C1 = 0.0;
    double C2 = 0.0;
    bool C1_check = false;
    bool C2_check = false;

    bool pass() const { return C1_check && C2_check; }
};

/// Reads complexity constants back off achieved errors:
///   B_est = sup_K error_sq(M_max, K) / f(l^K)
///   A_est = sup_M (error_sq(M, K_max) - error_sq(M_max, K_max)) / g(M)
/// The largest M and K of the grid stand in for the limits M, K -> infinity.
inline BernsteinEstimate bernstein_estimate(const ErrorGrid& errors, const DecayEnvelope& g, const DecayEnvelope& f,
                                            std::size_t l)
{
    if (errors.size() < 2)
        throw InvalidArgument("bernstein_estimate: grid needs at least two points");
    BernsteinEstimate out;
    for (const auto& [pt, e] : errors) {
        out.M_max = std::max(out.M_max, pt.M);
        out.K_max = std::max(out.K_max, pt.K);
    }
    const auto corner = errors.find(GridPoint{out.M_max, out.K_max});
    if (corner == errors.end())
        throw InvalidArgument("bernstein_estimate: grid lacks the (M_max, K_max) corner");
    out.memory_floor = corner->second;

    bool first_b = true;
    bool first_a = true;
    for (const auto& [pt, e] : errors) {
        if (pt.M == out.M_max) {
            const double r = tail_ratio(e, f(ipow(l, pt.K)));
            if (first_b || r > out.B_est) {
                out.B_est = r;
                out.witness_K = pt.K;
                first_b = false;
            }
        }
    }
    // errors is ordered by (K, M), so M ascends within the K_max row
    for (const auto& [pt, e] : errors) {
        if (pt.K == out.K_max) {
            const double r = tail_ratio(std::max(0.0, e - out.memory_floor), g(pt.M));
            if (first_a || r > out.A_est) {
                out.A_est = r;
                out.witness_M = pt.M;
                first_a = false;
            }
        }
    }
    return out;
}

inline bool within_slack(double constant, double estimate)
{
    return constant <= estimate * (1.0 + inequality_rtol);
}

struct BernsteinSweep
{
    JacksonSweep jackson;
    BernsteinEstimate estimate;
};

/// Runs the optimal approximants over the grid, estimates A and B from the
/// achieved errors and checks C1 <= A_est, C2 <= B_est.
///
/// The zero network (M = 0, error |rho|^2 at every K) is added to the grid:
/// it is available at every budget, and it is the only approximant that
/// probes the s = 1 term of C1, i.e. tail(1) <= C1 g(0).
inline BernsteinSweep verify_bernstein(const FunctionalKernel& rho, const DecayEnvelope& g, const DecayEnvelope& f,
                                       std::size_t l, const std::vector<GridPoint>& grid, std::size_t threads = 1)
{
    BernsteinSweep out;
    out.jackson = verify_jackson(rho, g, f, l, grid, threads);
    ErrorGrid errors;
    const double energy = rho.squared_norm();
    for (const auto& p : out.jackson.points) {
        errors[GridPoint{p.M, p.K}] = p.error_sq;
        errors[GridPoint{0, p.K}] = energy;
    }
    out.estimate = bernstein_estimate(errors, g, f, l);
    out.estimate.C1 = out.jackson.complexity.c1.value;
    out.estimate.C2 = out.jackson.complexity.c2.value;
    out.estimate.C1_check = within_slack(out.estimate.C1, out.estimate.A_est);
    out.estimate.C2_check = within_slack(out.estimate.C2, out.estimate.B_est);
    return out;
}

} // namespace ltcn
