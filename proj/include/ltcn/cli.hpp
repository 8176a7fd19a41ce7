#pragma once

// Batch command-line front end. run_cli() is the whole program; tools/ltcn.cpp
// only forwards main() to it so the commands can be driven in-process by tests.
//
// Exit status: 0 ok / pass, 1 bound violation, 2 usage or input error.

#include "bounds.hpp"
#include "complexity.hpp"
#include "io.hpp"
#include "network.hpp"
#include "targets.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace ltcn {

enum ExitCode : int
{
    exit_ok = 0,
    exit_violation = 1,
    exit_input_error = 2,
};

namespace cli_detail {

    struct GlobalOptions
    {
        std::uint64_t seed = 0;
        std::size_t threads = 1;
        bool quiet = false;
        std::size_t dims = 1;
    };

    struct LoadedTarget
    {
        TargetSpec spec;
        FunctionalKernel rho;
    };

    inline LoadedTarget load(const std::string& text, const GlobalOptions& g, std::ostream& err)
    {
        LoadedTarget t{parse_target(text, g.dims, g.seed), {}};
        t.rho = load_target(t.spec);
        const double cut = truncated_energy_fraction(t.spec);
        if (cut > truncation_warning_threshold && !g.quiet)
            err << "warning: horizon cut drops " << format_real(cut)
                << " of the target energy; results describe the truncated target\n";
        return t;
    }

    /// "fit" builds the tight envelope from the target itself.
    inline DecayEnvelope spectral_envelope(const std::string& spec, const FunctionalKernel& rho, std::size_t l,
                                           std::size_t K_max)
    {
        return spec == "fit" ? fit_spectral_envelope(rho, l, K_max) : parse_envelope(spec);
    }

    inline DecayEnvelope memory_envelope(const std::string& spec, const FunctionalKernel& rho)
    {
        return spec == "fit" ? fit_memory_envelope(rho) : parse_envelope(spec);
    }

    inline std::string constant_text(double v) { return std::isfinite(v) ? format_real(v) : "inf"; }

    inline int cmd_analyze(const GlobalOptions& g, const std::string& target, const std::string& g_spec,
                           const std::string& f_spec, std::size_t l, std::size_t K_max, const std::string& out_path,
                           std::ostream& out, std::ostream& err)
    {
        const auto t = load(target, g, err);
        const auto report = complexity_report(t.rho, spectral_envelope(g_spec, t.rho, l, K_max),
                                              memory_envelope(f_spec, t.rho), l, K_max);
        json j = to_json(report);
        j["target"] = to_json(t.spec);
        j["g"] = g_spec;
        j["f"] = f_spec;
        if (!out_path.empty())
            write_file_atomic(out_path, j.dump(2) + "\n");
        if (!g.quiet) {
            out << "C1 = " << constant_text(report.c1.value) << " (witness s=" << report.c1.witness_s
                << ", K=" << report.c1.witness_K << (report.c1.converged ? ", converged" : ", not converged")
                << ")\n";
            out << "C2 = " << constant_text(report.c2.value) << " (witness s=" << report.c2.witness_s << ")\n";
            out << "stabilization K = " << report.stabilization_K << "\n";
        }
        return exit_ok;
    }

    inline int cmd_approximate(const GlobalOptions& g, const std::string& target, std::size_t l, std::size_t K,
                               std::size_t M, const std::string& out_net, const std::string& out_point,
                               const std::string& g_spec, const std::string& f_spec, std::ostream& out,
                               std::ostream& err)
    {
        if (l < 2 || K < 1 || M < 1)
            throw InvalidArgument("approximate: need l >= 2, K >= 1, M >= 1");
        if (M > ipow(l, K))
            throw InvalidArgument("approximate: M = " + std::to_string(M) + " exceeds the l^K = " +
                                  std::to_string(ipow(l, K)) + " available HOSVD terms");
        const auto t = load(target, g, err);
        auto result = jackson_approximate(t.rho, l, K, M);
        if (!g_spec.empty() && !f_spec.empty()) {
            const DecayEnvelope ge = spectral_envelope(g_spec, t.rho, l, K);
            const DecayEnvelope fe = memory_envelope(f_spec, t.rho);
            const auto report = complexity_report(t.rho, ge, fe, l, K);
            check_finite_constants(report);
            result.point.bound = report.c1.value * ge(M) + report.c2.value * fe(ipow(l, K));
        }
        if (!out_net.empty())
            write_file_atomic(out_net, to_json(result.net).dump(2) + "\n");
        if (!out_point.empty())
            write_file_atomic(out_point, to_json(result.point).dump(2) + "\n");
        if (!g.quiet) {
            out << "error_sq = " << format_real(result.point.error_sq) << "\n";
            out << "spectral_tail + memory_tail = " << format_real(result.point.spectral_tail_val) << " + "
                << format_real(result.point.memory_tail_val) << "\n";
            out << "network channels = " << result.point.network_channels << "\n";
        }
        if (!result.point.identity_holds())
            return exit_violation;
        if (result.point.bound && !result.point.bound_holds())
            return exit_violation;
        return exit_ok;
    }

    inline int cmd_verify(const GlobalOptions& g, const std::string& target, const std::string& mode,
                          const std::string& g_spec, const std::string& f_spec, std::size_t l,
                          const std::string& grid_text, const std::string& out_csv, std::ostream& out,
                          std::ostream& err)
    {
        const auto t = load(target, g, err);
        const auto grid = parse_grid(grid_text);
        const DecayEnvelope ge = spectral_envelope(g_spec, t.rho, l, max_K(grid));
        const DecayEnvelope fe = memory_envelope(f_spec, t.rho);
        const bool self_fitted = g_spec == "fit" && f_spec == "fit";

        if (mode == "jackson") {
            const auto sweep = verify_jackson(t.rho, ge, fe, l, grid, g.threads);
            if (!out_csv.empty())
                write_file_atomic(out_csv, sweep_csv(sweep.points));
            if (!g.quiet) {
                out << "C1 = " << constant_text(sweep.complexity.c1.value)
                    << ", C2 = " << constant_text(sweep.complexity.c2.value) << "\n";
                for (const auto& p : sweep.points)
                    if (!p.identity_holds() || !p.bound_holds())
                        out << "violation at M=" << p.M << ", K=" << p.K << ": error_sq=" << format_real(p.error_sq)
                            << ", bound=" << format_real(p.bound.value_or(0.0)) << "\n";
                out << "jackson: " << (sweep.pass ? "pass" : "FAIL") << " (" << sweep.points.size()
                    << " grid points)\n";
            }
            return sweep.pass ? exit_ok : exit_violation;
        }
        if (mode == "bernstein") {
            const auto sweep = verify_bernstein(t.rho, ge, fe, l, grid, g.threads);
            if (!out_csv.empty())
                write_file_atomic(out_csv, sweep_csv(sweep.jackson.points));
            const auto& b = sweep.estimate;
            if (!g.quiet) {
                out << "A_est = " << constant_text(b.A_est) << " (witness M=" << b.witness_M << ")"
                    << ", B_est = " << constant_text(b.B_est) << " (witness K=" << b.witness_K << ")\n";
                out << "memory floor error_sq(M_max, K_max) = " << format_real(b.memory_floor) << "\n";
                out << "C1 = " << constant_text(b.C1) << (b.C1_check ? " <= " : " > ") << "A_est, "
                    << "C2 = " << constant_text(b.C2) << (b.C2_check ? " <= " : " > ") << "B_est\n";
                if (b.pass())
                    out << "bernstein: " << (self_fitted ? "verified" : "consistent with the grid")
                        << " (finite grid; limits taken at M_max, K_max)\n";
                else
                    out << "bernstein: FAIL\n";
            }
            return b.pass() ? exit_ok : exit_violation;
        }
        throw InvalidArgument("verify: --mode must be jackson or bernstein");
    }

    inline int cmd_eval(const GlobalOptions& g, const std::string& net_path, const std::string& input_path,
                        const std::vector<std::int64_t>& times, std::ostream& out)
    {
        const ConvNetParams net = net_from_json(read_json_file(net_path));
        const VectorSeq x = sequence_from_json(read_json_file(input_path));
        const ScalarSeq y = forward(net, x);
        if (times.empty()) {
            for (std::int64_t t = y.start; t < y.end(); ++t)
                out << t << " " << format_real(y.at(t)) << "\n";
        } else {
            for (std::int64_t t : times)
                out << t << " " << format_real(y.at(t)) << "\n";
        }
        (void)g;
        return exit_ok;
    }

    inline std::string per_dim_path(const std::string& path, std::size_t j, std::size_t d)
    {
        if (d == 1)
            return path;
        std::filesystem::path p(path);
        const std::string stem = p.stem().string();
        const std::string ext = p.extension().string();
        return (p.parent_path() / (stem + ".dim" + std::to_string(j) + ext)).string();
    }

    inline int cmd_spectrum(const GlobalOptions& g, const std::string& target, std::size_t l, std::size_t K,
                            const std::string& out_csv, std::ostream& out, std::ostream& err)
    {
        const auto t = load(target, g, err);
        for (std::size_t j = 0; j < t.rho.d(); ++j) {
            const Spectrum s = channel_spectrum(t.rho, j, l, K);
            const std::string csv = spectrum_csv(s);
            if (!out_csv.empty())
                write_file_atomic(per_dim_path(out_csv, j, t.rho.d()), csv);
            else if (!g.quiet)
                out << csv;
            const auto restricted = t.rho.restricted(j, ipow(l, K));
            double norm_sq = 0.0;
            for (double v : restricted)
                norm_sq += v * v;
            if (!g.quiet)
                out << "# dim " << j << ": sum magnitude^2 = " << format_real(s.squared_sum())
                    << ", restricted norm^2 = " << format_real(norm_sq) << "\n";
        }
        return exit_ok;
    }

} // namespace cli_detail

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    using namespace cli_detail;
    CLI::App app{"Linear dilated temporal CNN approximation toolkit"};
    app.require_subcommand(1);
    GlobalOptions g;
    app.add_option("--seed", g.seed, "Seed for every random generator")->capture_default_str();
    app.add_option("--threads", g.threads, "Worker threads for grid sweeps")->capture_default_str();
    app.add_flag("--quiet", g.quiet, "Suppress summaries and warnings");
    app.add_option("--dims", g.dims, "Input dimension d for generated targets")->capture_default_str();

    std::string target, g_spec, f_spec, out_path, out_net, out_point, out_csv, mode, grid, net_path, input_path;
    std::size_t l = 2, K = 1, M = 1, K_max = 4;
    std::vector<std::int64_t> times;

    auto* analyze = app.add_subcommand("analyze", "Complexity constants C1, C2 of a target");
    analyze->add_option("target", target, "Target spec")->required();
    analyze->add_option("--g", g_spec, "Spectral envelope: exp:<b>, pow:<a>, table:<path>, fit")->required();
    analyze->add_option("--f", f_spec, "Memory envelope: exp:<b>, pow:<a>, table:<path>, fit")->required();
    analyze->add_option("-l", l, "Filter length")->capture_default_str();
    analyze->add_option("--Kmax", K_max, "Largest K in the C1 supremum")->capture_default_str();
    analyze->add_option("--out", out_path, "Report JSON path");

    auto* approximate = app.add_subcommand("approximate", "Build the truncated-HOSVD network");
    approximate->add_option("target", target, "Target spec")->required();
    approximate->add_option("-l", l, "Filter length")->capture_default_str();
    approximate->add_option("-K", K, "Layers")->required();
    approximate->add_option("-M", M, "Terms per input dimension")->required();
    approximate->add_option("--out-net", out_net, "Network JSON path");
    approximate->add_option("--out-point", out_point, "Error report JSON path");
    approximate->add_option("--g", g_spec, "Spectral envelope (optional, adds the bound)");
    approximate->add_option("--f", f_spec, "Memory envelope (optional, adds the bound)");

    auto* verify = app.add_subcommand("verify", "Check the approximation bounds over a grid");
    verify->add_option("target", target, "Target spec")->required();
    verify->add_option("--mode", mode, "jackson or bernstein")->required();
    verify->add_option("--g", g_spec, "Spectral envelope")->required();
    verify->add_option("--f", f_spec, "Memory envelope")->required();
    verify->add_option("-l", l, "Filter length")->capture_default_str();
    verify->add_option("--grid", grid, "M1..M2xK1..K2")->required();
    verify->add_option("--out-csv", out_csv, "Sweep CSV path");

    auto* eval = app.add_subcommand("eval", "Run a saved network on an input sequence");
    eval->add_option("net", net_path, "Network JSON")->required();
    eval->add_option("input", input_path, "Input sequence JSON")->required();
    eval->add_option("-t", times, "Output times to print (default: all)");

    auto* spec = app.add_subcommand("spectrum", "HOSVD spectrum of the tensorized target");
    spec->add_option("target", target, "Target spec")->required();
    spec->add_option("-l", l, "Filter length")->capture_default_str();
    spec->add_option("-K", K, "Order of the tensorization")->required();
    spec->add_option("--out-csv", out_csv, "Spectrum CSV path (one file per input dimension)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return exit_input_error;
    }

    try {
        if (*analyze)
            return cmd_analyze(g, target, g_spec, f_spec, l, K_max, out_path, out, err);
        if (*approximate) {
            if (g_spec.empty() != f_spec.empty())
                throw InvalidArgument("approximate: give both --g and --f, or neither");
            return cmd_approximate(g, target, l, K, M, out_net, out_point, g_spec, f_spec, out, err);
        }
        if (*verify)
            return cmd_verify(g, target, mode, g_spec, f_spec, l, grid, out_csv, out, err);
        if (*eval)
            return cmd_eval(g, net_path, input_path, times, out);
        if (*spec)
            return cmd_spectrum(g, target, l, K, out_csv, out, err);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_input_error;
    }
    return exit_input_error;
}

} // namespace ltcn
