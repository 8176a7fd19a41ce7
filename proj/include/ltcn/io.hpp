#pragma once

// JSON and CSV formats, CLI spec strings, and atomic file output.

#include "bounds.hpp"
#include "complexity.hpp"
#include "errors.hpp"
#include "hosvd.hpp"
#include "network.hpp"
#include "sequence.hpp"
#include "targets.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ltcn {

using json = nlohmann::json;

inline constexpr const char* net_format_tag = "ltcn-net-v1";

/// Fixed 17-significant-digit formatting used in every CSV and printout.
inline std::string format_real(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------- files

inline std::string read_text_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InvalidArgument("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline json read_json_file(const std::string& path)
{
    try {
        return json::parse(read_text_file(path));
    } catch (const json::parse_error& e) {
        throw InvalidArgument("'" + path + "' is not valid JSON: " + e.what());
    }
}

/// Writes to a sibling temporary file and renames it over `path`, so readers
/// never observe a partial file.
inline void write_file_atomic(const std::string& path, const std::string& contents)
{
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("cannot write '" + tmp.string() + "'");
        out << contents;
        out.flush();
        if (!out)
            throw std::runtime_error("write failed for '" + tmp.string() + "'");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        throw std::runtime_error("cannot move output into place at '" + path + "': " + ec.message());
    }
}

// ---------------------------------------------------------------- kernels

inline json to_json(const FunctionalKernel& rho)
{
    return json{{"d", rho.d()}, {"channels", rho.channels()}};
}

inline FunctionalKernel kernel_from_json(const json& j)
{
    try {
        const auto channels = j.at("channels").get<std::vector<std::vector<double>>>();
        if (j.contains("d") && j.at("d").get<std::size_t>() != channels.size())
            throw InvalidArgument("kernel JSON: 'd' disagrees with the number of channels");
        return FunctionalKernel(channels);
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("kernel JSON: ") + e.what());
    }
}

// ---------------------------------------------------------------- networks

inline json to_json(const ConvNetParams& net)
{
    return json{{"fmt", net_format_tag}, {"l", net.l()},       {"K", net.layers()},
                {"M", net.channels()},   {"d", net.d()},       {"weights", net.weights()}};
}

inline ConvNetParams net_from_json(const json& j)
{
    try {
        if (j.value("fmt", std::string()) != net_format_tag)
            throw InvalidArgument(std::string("network JSON: expected \"fmt\": \"") + net_format_tag + "\"");
        return ConvNetParams(j.at("l").get<std::size_t>(), j.at("K").get<std::size_t>(), j.at("M").get<std::size_t>(),
                             j.at("d").get<std::size_t>(),
                             j.at("weights").get<std::vector<ConvNetParams::Layer>>());
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("network JSON: ") + e.what());
    }
}

// ---------------------------------------------------------------- inputs

/// {"start": t0, "d": d, "values": [[x_1, ..., x_d], ...]} (time-major)
inline json to_json(const VectorSeq& x)
{
    json values = json::array();
    for (std::size_t i = 0; i < x.length(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < x.d(); ++j)
            row.push_back(x.values()[i * x.d() + j]);
        values.push_back(std::move(row));
    }
    return json{{"start", x.start()}, {"d", x.d()}, {"values", std::move(values)}};
}

inline VectorSeq sequence_from_json(const json& j)
{
    try {
        const auto rows = j.at("values").get<std::vector<std::vector<double>>>();
        const std::size_t d = j.contains("d") ? j.at("d").get<std::size_t>() : (rows.empty() ? 1 : rows.front().size());
        std::vector<double> flat;
        for (const auto& r : rows) {
            if (r.size() != d)
                throw InvalidArgument("sequence JSON: every time step needs d values");
            flat.insert(flat.end(), r.begin(), r.end());
        }
        return VectorSeq(j.value("start", std::int64_t{0}), d, std::move(flat));
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("sequence JSON: ") + e.what());
    }
}

// ---------------------------------------------------------------- spec strings

inline std::vector<std::string> split(std::string_view s, char sep)
{
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        const std::size_t next = s.find(sep, pos);
        out.emplace_back(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
        if (next == std::string_view::npos)
            break;
        pos = next + 1;
    }
    return out;
}

inline double parse_real(const std::string& s, const std::string& what)
{
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size() || !std::isfinite(v))
            throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw InvalidArgument(what + ": '" + s + "' is not a finite number");
    }
}

inline std::size_t parse_count(const std::string& s, const std::string& what)
{
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        throw InvalidArgument(what + ": '" + s + "' is not a non-negative integer");
    try {
        return static_cast<std::size_t>(std::stoull(s));
    } catch (const std::exception&) {
        throw InvalidArgument(what + ": '" + s + "' is out of range");
    }
}

inline DecayEnvelope envelope_from_json(const json& j)
{
    try {
        if (j.is_array())
            return DecayEnvelope::table(j.get<std::vector<double>>());
        return DecayEnvelope::table(j.at("values").get<std::vector<double>>());
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("envelope table JSON: ") + e.what());
    }
}

/// "exp:<beta>", "pow:<alpha>" or "table:<path.json>".
inline DecayEnvelope parse_envelope(const std::string& spec)
{
    const auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw InvalidArgument("envelope '" + spec + "': expected exp:<beta>, pow:<alpha> or table:<path>");
    const std::string kind = spec.substr(0, colon);
    const std::string arg = spec.substr(colon + 1);
    if (arg.empty())
        throw InvalidArgument("envelope '" + spec + "': missing parameter");
    if (kind == "exp")
        return DecayEnvelope::exponential(parse_real(arg, "envelope beta"));
    if (kind == "pow")
        return DecayEnvelope::power(parse_real(arg, "envelope alpha"));
    if (kind == "table")
        return envelope_from_json(read_json_file(arg));
    throw InvalidArgument("envelope '" + spec + "': unknown kind '" + kind + "'");
}

inline TargetSpec target_spec_from_json(const json& j)
{
    try {
        const std::string kind = j.at("kind").get<std::string>();
        TargetSpec spec;
        spec.d = j.value("d", std::size_t{1});
        if (kind == "shift")
            spec.kind = ShiftTarget{j.at("k").get<std::size_t>()};
        else if (kind == "exp")
            spec.kind = ExponentialTarget{j.at("lambda").get<double>(), j.at("horizon").get<std::size_t>()};
        else if (kind == "pow")
            spec.kind = PowerTarget{j.at("alpha").get<double>(), j.at("horizon").get<std::size_t>()};
        else if (kind == "lowrank")
            spec.kind = LowRankTarget{j.at("l").get<std::size_t>(), j.at("K").get<std::size_t>(),
                                      j.at("rank").get<std::size_t>(), j.value("seed", std::uint64_t{0})};
        else if (kind == "file")
            spec.kind = FileTarget{j.at("path").get<std::string>()};
        else
            throw InvalidArgument("target JSON: unknown kind '" + kind + "'");
        validate(spec);
        return spec;
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("target JSON: ") + e.what());
    }
}

inline json to_json(const TargetSpec& spec)
{
    json j = std::visit(
        [](const auto& t) -> json {
            using T = std::decay_t<decltype(t)>;
            if constexpr (std::is_same_v<T, ShiftTarget>)
                return json{{"kind", "shift"}, {"k", t.lag}};
            else if constexpr (std::is_same_v<T, ExponentialTarget>)
                return json{{"kind", "exp"}, {"lambda", t.lambda}, {"horizon", t.horizon}};
            else if constexpr (std::is_same_v<T, PowerTarget>)
                return json{{"kind", "pow"}, {"alpha", t.alpha}, {"horizon", t.horizon}};
            else if constexpr (std::is_same_v<T, LowRankTarget>)
                return json{{"kind", "lowrank"}, {"l", t.l}, {"K", t.order}, {"rank", t.rank}, {"seed", t.seed}};
            else
                return json{{"kind", "file"}, {"path", t.path}};
        },
        spec.kind);
    j["d"] = spec.d;
    return j;
}

/// CLI target strings:
///   shift:<k>   exp:<lambda>:<horizon>   pow:<alpha>:<horizon>
///   lowrank:<l>:<K>:<rank>[:<seed>]   file:<path>   <path>.json
/// `default_seed` fills an omitted low-rank seed.
inline TargetSpec parse_target(const std::string& text, std::size_t d = 1, std::uint64_t default_seed = 0)
{
    TargetSpec spec;
    spec.d = d;
    const auto parts = split(text, ':');
    const std::string& kind = parts.front();
    auto need = [&](std::size_t lo, std::size_t hi) {
        if (parts.size() - 1 < lo || parts.size() - 1 > hi)
            throw InvalidArgument("target '" + text + "': wrong number of fields for '" + kind + "'");
    };
    if (kind == "shift") {
        need(1, 1);
        spec.kind = ShiftTarget{parse_count(parts[1], "shift lag")};
    } else if (kind == "exp") {
        need(2, 2);
        spec.kind = ExponentialTarget{parse_real(parts[1], "lambda"), parse_count(parts[2], "horizon")};
    } else if (kind == "pow") {
        need(2, 2);
        spec.kind = PowerTarget{parse_real(parts[1], "alpha"), parse_count(parts[2], "horizon")};
    } else if (kind == "lowrank") {
        need(3, 4);
        spec.kind = LowRankTarget{parse_count(parts[1], "l"), parse_count(parts[2], "K"), parse_count(parts[3], "rank"),
                                  parts.size() == 5 ? parse_count(parts[4], "seed") : default_seed};
    } else if (kind == "file") {
        if (parts.size() < 2)
            throw InvalidArgument("target '" + text + "': missing path");
        spec.kind = FileTarget{text.substr(5)};
    } else if (text.size() > 5 && text.ends_with(".json")) {
        spec.kind = FileTarget{text};
    } else {
        throw InvalidArgument("target '" + text + "': unknown kind '" + kind + "'");
    }
    validate(spec);
    return spec;
}

/// Kernel of a target; file targets hold either a kernel or a target spec.
inline FunctionalKernel load_target(const TargetSpec& spec)
{
    if (const auto* file = std::get_if<FileTarget>(&spec.kind)) {
        const json j = read_json_file(file->path);
        if (j.contains("channels"))
            return kernel_from_json(j);
        const TargetSpec inner = target_spec_from_json(j);
        if (std::holds_alternative<FileTarget>(inner.kind))
            throw InvalidArgument("target file '" + file->path + "' refers to another file");
        return generate(inner);
    }
    return generate(spec);
}

/// "aMin..aMaxXbMin..bMax" (x or X): M range by K range.
inline std::vector<GridPoint> parse_grid(const std::string& text)
{
    auto sep = text.find('x');
    if (sep == std::string::npos)
        sep = text.find('X');
    if (sep == std::string::npos)
        throw InvalidArgument("grid '" + text + "': expected M1..M2xK1..K2");
    auto range = [&](const std::string& r, const char* what) {
        const auto dots = r.find("..");
        std::size_t lo = 0;
        std::size_t hi = 0;
        if (dots == std::string::npos) {
            lo = hi = parse_count(r, what);
        } else {
            lo = parse_count(r.substr(0, dots), what);
            hi = parse_count(r.substr(dots + 2), what);
        }
        if (lo < 1 || hi < lo)
            throw InvalidArgument("grid '" + text + "': bad " + what + " range");
        return std::pair{lo, hi};
    };
    const auto [m_lo, m_hi] = range(text.substr(0, sep), "M");
    const auto [k_lo, k_hi] = range(text.substr(sep + 1), "K");
    std::vector<GridPoint> grid;
    for (std::size_t k = k_lo; k <= k_hi; ++k)
        for (std::size_t m = m_lo; m <= m_hi; ++m)
            grid.push_back(GridPoint{m, k});
    return grid;
}

// ---------------------------------------------------------------- reports

inline json to_json(const ComplexityReport& r)
{
    auto constant = [](double v) -> json {
        if (std::isfinite(v))
            return v;
        return "inf";
    };
    json c1{{"value", constant(r.c1.value)},
            {"infinite", r.c1.infinite()},
            {"witness", {{"s", r.c1.witness_s}, {"K", r.c1.witness_K}}},
            {"K_max", r.c1.K_max},
            {"converged", r.c1.converged},
            {"per_K_sup", json::array()},
            {"spectral_tails", json::array()}};
    for (double v : r.c1.per_K_sup)
        c1["per_K_sup"].push_back(constant(v));
    for (std::size_t k = 0; k < r.c1.tail_tables.size(); ++k)
        c1["spectral_tails"].push_back(json{{"K", k + 1}, {"tails", r.c1.tail_tables[k]}});
    json c2{{"value", constant(r.c2.value)},
            {"infinite", r.c2.infinite()},
            {"witness", {{"s", r.c2.witness_s}}},
            {"s_max", r.c2.s_max}};
    return json{{"l", r.l},
                {"C1", std::move(c1)},
                {"C2", std::move(c2)},
                {"memory_tails", r.memory_tails},
                {"stabilization_K", r.stabilization_K}};
}

inline json to_json(const JacksonPoint& p)
{
    json j{{"M", p.M},
           {"K", p.K},
           {"error_sq", p.error_sq},
           {"error_sq_split", p.error_sq_split},
           {"spectral_tail", p.spectral_tail_val},
           {"memory_tail", p.memory_tail_val},
           {"network_channels", p.network_channels},
           {"identity_holds", p.identity_holds()}};
    if (p.bound) {
        j["bound"] = *p.bound;
        j["bound_holds"] = p.bound_holds();
    }
    return j;
}

inline json to_json(const BernsteinEstimate& b)
{
    return json{{"A_est", b.A_est},           {"B_est", b.B_est},       {"witness_M", b.witness_M},
                {"witness_K", b.witness_K},   {"M_max", b.M_max},       {"K_max", b.K_max},
                {"memory_floor", b.memory_floor}, {"C1", b.C1},        {"C2", b.C2},
                {"C1_check", b.C1_check},     {"C2_check", b.C2_check}};
}

inline constexpr const char* sweep_csv_header = "M,K,error_sq,bound,spectral_tail,memory_tail,ratio";

inline std::string sweep_csv(const std::vector<JacksonPoint>& points)
{
    std::string out = std::string(sweep_csv_header) + "\n";
    for (const auto& p : points) {
        out += std::to_string(p.M) + "," + std::to_string(p.K) + "," + format_real(p.error_sq) + "," +
               format_real(p.bound.value_or(std::nan(""))) + "," + format_real(p.spectral_tail_val) + "," +
               format_real(p.memory_tail_val) + "," + format_real(p.ratio()) + "\n";
    }
    return out;
}

inline std::string spectrum_csv(const Spectrum& s)
{
    std::string out = "rank,magnitude,signed_value,multi_index\n";
    for (std::size_t r = 0; r < s.entries.size(); ++r) {
        const auto& e = s.entries[r];
        std::string idx;
        for (std::size_t k = 0; k < e.index.size(); ++k)
            idx += (k ? ";" : "") + std::to_string(e.index[k]);
        out += std::to_string(r + 1) + "," + format_real(e.magnitude) + "," + format_real(e.value) + "," + idx + "\n";
    }
    return out;
}

/// Parses a spectrum CSV back (used to check that outputs are readable).
inline Spectrum spectrum_from_csv(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "rank,magnitude,signed_value,multi_index")
        throw InvalidArgument("spectrum CSV: bad header");
    Spectrum out;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        const auto cols = split(line, ',');
        if (cols.size() != 4)
            throw InvalidArgument("spectrum CSV: expected 4 columns");
        SpectrumEntry e{parse_real(cols[1], "magnitude"), parse_real(cols[2], "signed_value"), {}};
        for (const auto& digit : split(cols[3], ';'))
            e.index.push_back(parse_count(digit, "multi_index"));
        out.entries.push_back(std::move(e));
    }
    return out;
}

} // namespace ltcn
