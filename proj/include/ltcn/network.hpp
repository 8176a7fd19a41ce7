#pragma once

// Linear dilated temporal CNN:
//
//   h_{1,i}   = sum_j w_{0,j,i} (*)_1 x_j
//   h_{k+1,i} = sum_j w_{k,j,i} (*)_{l^k} h_{k,j}
//   y         = sum_i h_{K,i}
//
// Layer k (0-based) has dilation l^k, so a stack of K layers with filters of
// length l sees exactly l^K lags. With no activation the whole network is one
// causal linear functional whose kernel is effective_filter().

#include "errors.hpp"
#include "hosvd.hpp"
#include "sequence.hpp"
#include "tensor.hpp"

#include <cstddef>
#include <vector>

namespace ltcn {

/// Filters w[k][from][to], each of length l. Layer 0 maps the d input
/// dimensions to M channels, layers 1..K-1 map M channels to M channels.
class ConvNetParams
{
public:
    using Filter = std::vector<double>;
    using Layer = std::vector<std::vector<Filter>>; // [from][to]

    ConvNetParams() = default;

    /// All-zero network.
    ConvNetParams(std::size_t l, std::size_t layers, std::size_t channels, std::size_t d)
        : l_(l), layers_(layers), channels_(channels), d_(d)
    {
        check_geometry();
        weights_.resize(layers_);
        for (std::size_t k = 0; k < layers_; ++k)
            weights_[k] = Layer(k == 0 ? d_ : channels_, std::vector<Filter>(channels_, Filter(l_, 0.0)));
    }

    ConvNetParams(std::size_t l, std::size_t layers, std::size_t channels, std::size_t d,
                  std::vector<Layer> weights)
        : l_(l), layers_(layers), channels_(channels), d_(d), weights_(std::move(weights))
    {
        check_geometry();
        if (weights_.size() != layers_)
            throw InvalidArgument("ConvNetParams: expected K layers of weights");
        for (std::size_t k = 0; k < layers_; ++k) {
            const std::size_t from = k == 0 ? d_ : channels_;
            if (weights_[k].size() != from)
                throw InvalidArgument("ConvNetParams: wrong number of source channels in layer " + std::to_string(k));
            for (const auto& row : weights_[k]) {
                if (row.size() != channels_)
                    throw InvalidArgument("ConvNetParams: wrong number of target channels in layer " + std::to_string(k));
                for (const auto& f : row)
                    if (f.size() != l_)
                        throw InvalidArgument("ConvNetParams: every filter must have exactly l taps");
            }
        }
    }

    std::size_t l() const { return l_; }
    std::size_t layers() const { return layers_; }
    std::size_t channels() const { return channels_; }
    std::size_t d() const { return d_; }
    const std::vector<Layer>& weights() const { return weights_; }

    const Filter& filter(std::size_t layer, std::size_t from, std::size_t to) const
    {
        return weights_.at(layer).at(from).at(to);
    }
    Filter& filter(std::size_t layer, std::size_t from, std::size_t to) { return weights_.at(layer).at(from).at(to); }

    /// Receptive field l^K.
    std::size_t receptive_field() const { return ipow(l_, layers_); }

    /// l * (d * M + (K - 1) * M^2)
    std::size_t parameter_count() const
    {
        return l_ * (d_ * channels_ + (layers_ - 1) * channels_ * channels_);
    }

    friend bool operator==(const ConvNetParams&, const ConvNetParams&) = default;

private:
    void check_geometry() const
    {
        if (l_ < 2)
            throw InvalidArgument("ConvNetParams: filter length l must be >= 2");
        if (layers_ < 1)
            throw InvalidArgument("ConvNetParams: need K >= 1 layers");
        if (channels_ < 1)
            throw InvalidArgument("ConvNetParams: need M >= 1 channels");
        if (d_ < 1)
            throw InvalidArgument("ConvNetParams: need d >= 1 input dimensions");
        ipow(l_, layers_);
    }

    std::size_t l_ = 2;
    std::size_t layers_ = 1;
    std::size_t channels_ = 1;
    std::size_t d_ = 1;
    std::vector<Layer> weights_;
};

namespace detail {

    /// acc += s, where both share the same start and length.
    inline void accumulate(ScalarSeq& acc, const ScalarSeq& s)
    {
        if (acc.values.empty()) {
            acc = s;
            return;
        }
        for (std::size_t i = 0; i < acc.values.size(); ++i)
            acc.values[i] += s.values[i];
    }

    /// One layer: out_i = sum_j w[j][i] (*)_r in_j, inputs ascending.
    inline std::vector<ScalarSeq> apply_layer(const ConvNetParams::Layer& w, const std::vector<ScalarSeq>& in,
                                              std::size_t out_channels, std::int64_t dilation)
    {
        std::vector<ScalarSeq> out(out_channels);
        for (std::size_t i = 0; i < out_channels; ++i)
            for (std::size_t j = 0; j < in.size(); ++j)
                accumulate(out[i], dilated_convolve(w[j][i], in[j], dilation));
        return out;
    }

} // namespace detail

/// Network output y(t) on [x.start, x.end + l^K - 1).
inline ScalarSeq forward(const ConvNetParams& net, const VectorSeq& x)
{
    if (x.d() != net.d())
        throw DimensionMismatch(net.d(), x.d(), "forward");
    std::vector<ScalarSeq> h;
    h.reserve(x.d());
    for (std::size_t j = 0; j < x.d(); ++j)
        h.push_back(x.channel(j));
    std::int64_t dilation = 1;
    for (std::size_t k = 0; k < net.layers(); ++k) {
        h = detail::apply_layer(net.weights()[k], h, net.channels(), dilation);
        dilation *= static_cast<std::int64_t>(net.l());
    }
    ScalarSeq y;
    for (const auto& hi : h)
        detail::accumulate(y, hi);
    return y;
}

/// Kernel rho of the network viewed as a linear functional, one channel per
/// input dimension, supported on [0, l^K).
inline FunctionalKernel effective_filter(const ConvNetParams& net)
{
    std::vector<std::vector<double>> rho;
    rho.reserve(net.d());
    for (std::size_t i = 0; i < net.d(); ++i) {
        std::vector<ScalarSeq> e(net.channels());
        for (std::size_t c = 0; c < net.channels(); ++c)
            e[c] = ScalarSeq{0, net.filter(0, i, c)};
        std::int64_t dilation = static_cast<std::int64_t>(net.l());
        for (std::size_t k = 1; k < net.layers(); ++k) {
            e = detail::apply_layer(net.weights()[k], e, net.channels(), dilation);
            dilation *= static_cast<std::int64_t>(net.l());
        }
        ScalarSeq sum;
        for (const auto& ec : e)
            detail::accumulate(sum, ec);
        sum.values.resize(net.receptive_field(), 0.0);
        rho.push_back(std::move(sum.values));
    }
    return FunctionalKernel(std::move(rho));
}

/// Response on [0, l^K) to the unit impulse in input dimension `dim` (0-based)
/// at time 0, computed by running forward().
inline std::vector<double> impulse_response(const ConvNetParams& net, std::size_t dim)
{
    if (dim >= net.d())
        throw InvalidArgument("impulse_response: input dimension out of range");
    VectorSeq impulse = VectorSeq::zeros(0, net.d(), 1);
    impulse.set(0, dim, 1.0);
    ScalarSeq y = forward(net, impulse);
    std::vector<double> out(net.receptive_field(), 0.0);
    for (std::size_t t = 0; t < out.size(); ++t)
        out[t] = y.at(static_cast<std::int64_t>(t));
    return out;
}

/// Network realizing sum_m [dim_of_term[m] == i] scale_m f_{m,K} (x) ... (x) f_{m,1}
/// as the tensorized kernel of input dimension i.
///
/// Term m gets its own channel m: layer 0 routes input dimension dim_of_term[m]
/// into channel m through factors[0], every higher layer k is the diagonal
/// filter factors[k] on channel m, and the scale multiplies the last layer only.
inline ConvNetParams from_rank_one_terms(const std::vector<RankOneTerm>& terms, std::size_t l, std::size_t layers,
                                         std::size_t d, const std::vector<std::size_t>& dim_of_term)
{
    if (terms.empty())
        throw InvalidArgument("from_rank_one_terms: empty term list");
    if (dim_of_term.size() != terms.size())
        throw InvalidArgument("from_rank_one_terms: need one input dimension per term");
    ConvNetParams net(l, layers, terms.size(), d);
    for (std::size_t m = 0; m < terms.size(); ++m) {
        const RankOneTerm& term = terms[m];
        if (term.factors.size() != layers)
            throw InvalidArgument("from_rank_one_terms: each term needs exactly K factors");
        for (const auto& f : term.factors)
            if (f.size() != l)
                throw InvalidArgument("from_rank_one_terms: factor length differs from l");
        if (dim_of_term[m] >= d)
            throw InvalidArgument("from_rank_one_terms: input dimension out of range");
        for (std::size_t k = 0; k < layers; ++k) {
            ConvNetParams::Filter f = term.factors[k];
            if (k + 1 == layers)
                for (double& v : f)
                    v *= term.scale;
            if (k == 0)
                net.filter(0, dim_of_term[m], m) = std::move(f);
            else
                net.filter(k, m, m) = std::move(f);
        }
    }
    return net;
}

} // namespace ltcn
