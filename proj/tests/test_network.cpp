#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace ltcn;
using namespace ltcn::test;

namespace {

ConvNetParams single_channel(const std::vector<std::vector<double>>& layer_filters)
{
    const std::size_t l = layer_filters.front().size();
    ConvNetParams net(l, layer_filters.size(), 1, 1);
    for (std::size_t k = 0; k < layer_filters.size(); ++k)
        net.filter(k, 0, 0) = layer_filters[k];
    return net;
}

} // namespace

TEST(Forward, IdentityNetwork)
{
    CounterRng rng(50);
    const ConvNetParams net = single_channel({{1.0, 0.0}});
    const VectorSeq x = random_input(-2, 1, 9, rng);
    const ScalarSeq y = forward(net, x);
    for (std::int64_t t = -4; t < 12; ++t)
        EXPECT_EQ(y.at(t), x.at(t, 0));
}

TEST(Forward, TwoLayerImpulseResponseIsKroneckerPattern)
{
    const std::vector<double> w0{2.0, 3.0}, w1{5.0, 7.0};
    const ConvNetParams net = single_channel({w0, w1});
    const ScalarSeq y = forward(net, VectorSeq(0, 1, {1.0}));
    const std::vector<double> expect{w1[0] * w0[0], w1[0] * w0[1], w1[1] * w0[0], w1[1] * w0[1]};
    ASSERT_EQ(y.values.size(), 4u);
    EXPECT_EQ(y.values, expect);
    EXPECT_EQ(impulse_response(net, 0), expect);
    EXPECT_EQ(effective_filter(net).channel(0), expect);
}

TEST(Forward, DimensionMismatch)
{
    const ConvNetParams net(2, 2, 2, 3);
    EXPECT_THROW(forward(net, VectorSeq(0, 2, {1, 2})), DimensionMismatch);
}

TEST(Forward, MatchesEffectiveFilterFunctional)
{
    CounterRng rng(51);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t l = 2 + trial % 2, K = 1 + trial % 3, M = 1 + trial % 3, d = 1 + trial % 2;
        const ConvNetParams net = random_net(l, K, M, d, rng);
        const FunctionalKernel rho = effective_filter(net);
        const VectorSeq x = random_input(-5, d, 30, rng);
        const ScalarSeq y = forward(net, x);
        for (std::int64_t t = y.start - 3; t < y.end() + 3; ++t) {
            const double ref = apply_functional(rho, x, t);
            EXPECT_LE(std::abs(y.at(t) - ref), 1e-12 * std::max(1.0, std::abs(ref)));
        }
    }
}

TEST(EffectiveFilter, SingleLayerSumsChannels)
{
    CounterRng rng(52);
    const ConvNetParams net = random_net(3, 1, 4, 2, rng);
    const FunctionalKernel rho = effective_filter(net);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t s = 0; s < 3; ++s) {
            double sum = 0.0;
            for (std::size_t c = 0; c < 4; ++c)
                sum += net.filter(0, i, c)[s];
            EXPECT_EQ(rho.channel(i)[s], sum);
        }
}

TEST(EffectiveFilter, MatchesImpulseResponses)
{
    CounterRng rng(53);
    for (int trial = 0; trial < 5; ++trial) {
        const ConvNetParams net = random_net(2, 3, 3, 2, rng);
        const FunctionalKernel rho = effective_filter(net);
        EXPECT_EQ(rho.horizon(), 8u);
        for (std::size_t dim = 0; dim < 2; ++dim)
            EXPECT_LE(max_abs_diff(rho.channel(dim), impulse_response(net, dim)), 1e-12);
    }
}

TEST(EffectiveFilter, TensorProductProposition)
{
    CounterRng rng(54);
    for (std::size_t l : {2u, 3u})
        for (std::size_t K = 1; K <= 4; ++K) {
            std::vector<std::vector<double>> filters;
            for (std::size_t k = 0; k < K; ++k)
                filters.push_back(random_vector(l, rng));
            const ConvNetParams net = single_channel(filters);
            std::vector<std::vector<double>> outermost_first(filters.rbegin(), filters.rend());
            const DenseTensor expect = outer_product(outermost_first);
            const DenseTensor got = tensorize(effective_filter(net).channel(0), l, K);
            EXPECT_LE(max_abs_diff(got.data(), expect.data()), 1e-12);
        }
}

TEST(EffectiveFilter, ParameterCountVersusReceptiveField)
{
    CounterRng rng(55);
    for (std::size_t l : {2u, 3u})
        for (std::size_t K = 1; K <= 5; ++K) {
            const ConvNetParams net = random_net(l, K, 1, 1, rng);
            EXPECT_EQ(net.parameter_count(), l * K);
            EXPECT_EQ(effective_filter(net).horizon(), ipow(l, K));
        }
}

TEST(ImpulseResponse, EdgeCases)
{
    const ConvNetParams identity = single_channel({{1.0, 0.0}, {1.0, 0.0}});
    EXPECT_EQ(impulse_response(identity, 0), (std::vector<double>{1, 0, 0, 0}));
    const ConvNetParams zero(3, 2, 2, 2);
    EXPECT_EQ(impulse_response(zero, 1), std::vector<double>(9, 0.0));
    EXPECT_THROW(impulse_response(zero, 2), InvalidArgument);
}

TEST(ConvNetParams, ConstructionInvariants)
{
    EXPECT_THROW(ConvNetParams(1, 2, 2, 1), InvalidArgument);
    EXPECT_THROW(ConvNetParams(2, 0, 2, 1), InvalidArgument);
    EXPECT_THROW(ConvNetParams(2, 2, 0, 1), InvalidArgument);
    EXPECT_THROW(ConvNetParams(2, 2, 1, 0), InvalidArgument);
    std::vector<ConvNetParams::Layer> bad{ConvNetParams::Layer(1, std::vector<ConvNetParams::Filter>(1, {1.0}))};
    EXPECT_THROW(ConvNetParams(2, 1, 1, 1, bad), InvalidArgument);
}

TEST(FromRankOneTerms, DeltaFactorsGiveIdentity)
{
    const RankOneTerm term{1.0, {{1, 0}, {1, 0}, {1, 0}}};
    const ConvNetParams net = from_rank_one_terms({term}, 2, 3, 1, {0});
    std::vector<double> delta(8, 0.0);
    delta[0] = 1.0;
    EXPECT_EQ(effective_filter(net).channel(0), delta);
}

TEST(FromRankOneTerms, TwoFactorExpansion)
{
    const double s = -1.5;
    const std::vector<double> u{2, 3}, v{5, 7};
    // factors[0] = u is the layer-0 filter
    const ConvNetParams net = from_rank_one_terms({RankOneTerm{s, {u, v}}}, 2, 2, 1, {0});
    const std::vector<double> expect{s * v[0] * u[0], s * v[0] * u[1], s * v[1] * u[0], s * v[1] * u[1]};
    EXPECT_EQ(effective_filter(net).channel(0), expect);
    // scale lives on the last layer only
    EXPECT_EQ(net.filter(0, 0, 0), u);
}

TEST(FromRankOneTerms, SumOfTermsRoundTrip)
{
    CounterRng rng(56);
    for (int trial = 0; trial < 5; ++trial) {
        const std::size_t l = 2 + trial % 2, K = 1 + trial % 4, d = 1 + trial % 3, M = 3 + trial;
        std::vector<RankOneTerm> terms;
        std::vector<std::size_t> dims;
        std::vector<DenseTensor> expect(d, DenseTensor(l, K));
        for (std::size_t m = 0; m < M; ++m) {
            RankOneTerm t{rng.uniform(-2, 2), {}};
            for (std::size_t k = 0; k < K; ++k)
                t.factors.push_back(random_vector(l, rng));
            dims.push_back(m % d);
            add_scaled(expect[m % d], 1.0, term_tensor(t));
            terms.push_back(std::move(t));
        }
        const ConvNetParams net = from_rank_one_terms(terms, l, K, d, dims);
        EXPECT_EQ(net.channels(), M);
        const FunctionalKernel rho = effective_filter(net);
        for (std::size_t j = 0; j < d; ++j)
            EXPECT_LE(max_abs_diff(tensorize(rho.channel(j), l, K).data(), expect[j].data()), 1e-12);
    }
}

TEST(FromRankOneTerms, Errors)
{
    EXPECT_THROW(from_rank_one_terms({}, 2, 2, 1, {}), InvalidArgument);
    EXPECT_THROW(from_rank_one_terms({RankOneTerm{1.0, {{1, 0, 0}, {1, 0}}}}, 2, 2, 1, {0}), InvalidArgument);
    EXPECT_THROW(from_rank_one_terms({RankOneTerm{1.0, {{1, 0}}}}, 2, 2, 1, {0}), InvalidArgument);
    EXPECT_THROW(from_rank_one_terms({RankOneTerm{1.0, {{1, 0}, {1, 0}}}}, 2, 2, 1, {1}), InvalidArgument);
}
