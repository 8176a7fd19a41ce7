#include "test_support.hpp"

#include "ltcn/io.hpp"

#include <gtest/gtest.h>

using namespace ltcn;
using namespace ltcn::test;

TEST(FormatReal, RoundTripsExactly)
{
    CounterRng rng(80);
    for (int i = 0; i < 200; ++i) {
        const double v = rng.normal() * std::pow(10.0, rng.uniform(-30, 30));
        EXPECT_EQ(std::stod(format_real(v)), v);
    }
    EXPECT_EQ(format_real(0.5), "0.5");
}

TEST(Json, KernelRoundTrip)
{
    CounterRng rng(81);
    const auto rho = random_kernel(3, 7, rng);
    EXPECT_EQ(kernel_from_json(json::parse(to_json(rho).dump())), rho);
    EXPECT_THROW(kernel_from_json(json{{"d", 2}, {"channels", {{1.0, 2.0}}}}), InvalidArgument);
    EXPECT_THROW(kernel_from_json(json{{"channels", {{1.0, 2.0}, {1.0}}}}), InvalidArgument);
    EXPECT_THROW(kernel_from_json(json{{"chan", 1}}), InvalidArgument);
}

TEST(Json, NetRoundTrip)
{
    CounterRng rng(82);
    const auto net = random_net(3, 2, 2, 2, rng);
    const auto back = net_from_json(json::parse(to_json(net).dump()));
    EXPECT_EQ(back.weights(), net.weights());
    EXPECT_EQ(back.l(), 3u);
    EXPECT_EQ(back.layers(), 2u);
    json bad = to_json(net);
    bad["fmt"] = "other";
    EXPECT_THROW(net_from_json(bad), InvalidArgument);
    bad = to_json(net);
    bad["M"] = 5;
    EXPECT_THROW(net_from_json(bad), InvalidArgument);
}

TEST(Json, SequenceRoundTrip)
{
    CounterRng rng(83);
    const auto x = random_input(-4, 2, 9, rng);
    const auto back = sequence_from_json(json::parse(to_json(x).dump()));
    EXPECT_EQ(back.start(), -4);
    EXPECT_EQ(back.values(), x.values());
    EXPECT_THROW(sequence_from_json(json{{"d", 2}, {"values", {{1.0}}}}), InvalidArgument);
}

TEST(Json, TargetSpecRoundTrip)
{
    const std::vector<TargetSpec> specs{
        {ShiftTarget{4}, 2},
        {ExponentialTarget{0.5, 1024}, 1},
        {PowerTarget{1.25, 300}, 3},
        {LowRankTarget{3, 3, 5, 99}, 1},
        {FileTarget{"some/kernel.json"}, 1},
    };
    for (const auto& spec : specs) {
        const json j = to_json(spec);
        EXPECT_EQ(to_json(target_spec_from_json(json::parse(j.dump()))), j);
    }
    const auto parsed = target_spec_from_json(json::parse(R"({"kind":"exp","lambda":0.5,"horizon":1024,"d":1})"));
    EXPECT_EQ(std::get<ExponentialTarget>(parsed.kind).horizon, 1024u);
    EXPECT_THROW(target_spec_from_json(json{{"kind", "sine"}}), InvalidArgument);
    EXPECT_THROW(target_spec_from_json(json{{"kind", "exp"}, {"lambda", 2.0}, {"horizon", 3}}), InvalidArgument);
}

TEST(SpecStrings, Envelopes)
{
    EXPECT_DOUBLE_EQ(parse_envelope("exp:0.5")(2), std::exp(-1.0));
    EXPECT_DOUBLE_EQ(parse_envelope("pow:2")(1), 0.25);
    for (const char* bad : {"exp:", "exp", "exp:abc", "exp:-1", "pow:0", "sin:1", "exp:1x", "table:/no/such/file.json"})
        EXPECT_THROW(parse_envelope(bad), InvalidArgument) << bad;

    TempDir dir("io_env");
    write_file_atomic(dir.file("t.json"), "[3, 2, 1]");
    EXPECT_EQ(parse_envelope("table:" + dir.file("t.json"))(5), 1.0);
    write_file_atomic(dir.file("u.json"), R"({"values": [1, 2]})");
    EXPECT_THROW(parse_envelope("table:" + dir.file("u.json")), InvalidArgument);
}

TEST(SpecStrings, Targets)
{
    EXPECT_EQ(std::get<ShiftTarget>(parse_target("shift:3").kind).lag, 3u);
    const auto e = parse_target("exp:0.7:256", 2);
    EXPECT_EQ(e.d, 2u);
    EXPECT_EQ(std::get<ExponentialTarget>(e.kind).lambda, 0.7);
    EXPECT_EQ(std::get<LowRankTarget>(parse_target("lowrank:2:3:2", 1, 42).kind).seed, 42u);
    EXPECT_EQ(std::get<LowRankTarget>(parse_target("lowrank:2:3:2:7", 1, 42).kind).seed, 7u);
    EXPECT_EQ(std::get<FileTarget>(parse_target("file:a:b.json").kind).path, "a:b.json");
    EXPECT_EQ(std::get<FileTarget>(parse_target("dir/k.json").kind).path, "dir/k.json");
    for (const char* bad : {"shift", "shift:-1", "shift:1:2", "exp:0.5", "exp:1.5:10", "pow:0.4:10", "lowrank:2:3:9",
                            "wave:1", "", "file:"})
        EXPECT_THROW(parse_target(bad), InvalidArgument) << bad;
}

TEST(SpecStrings, LoadTargetFromFiles)
{
    TempDir dir("io_target");
    const auto rho = FunctionalKernel({{1.0, -2.0, 0.5}});
    write_file_atomic(dir.file("k.json"), to_json(rho).dump());
    EXPECT_EQ(load_target(parse_target(dir.file("k.json"))), rho);
    write_file_atomic(dir.file("s.json"), R"({"kind":"shift","k":2,"d":1})");
    EXPECT_EQ(load_target(parse_target("file:" + dir.file("s.json"))), generate(TargetSpec{ShiftTarget{2}, 1}));
    write_file_atomic(dir.file("loop.json"), R"({"kind":"file","path":"x.json"})");
    EXPECT_THROW(load_target(parse_target(dir.file("loop.json"))), InvalidArgument);
    EXPECT_THROW(load_target(parse_target(dir.file("missing.json"))), InvalidArgument);
    write_file_atomic(dir.file("broken.json"), "{not json");
    EXPECT_THROW(load_target(parse_target(dir.file("broken.json"))), InvalidArgument);
}

TEST(SpecStrings, Grid)
{
    const auto g = parse_grid("1..4x2..6");
    ASSERT_EQ(g.size(), 20u);
    EXPECT_EQ(g.front(), (GridPoint{1, 2}));
    EXPECT_EQ(g.back(), (GridPoint{4, 6}));
    EXPECT_EQ(parse_grid("3X5").size(), 1u);
    for (const char* bad : {"1..4", "0..2x1..2", "3..1x1..2", "1..2x", "a..bx1..2"})
        EXPECT_THROW(parse_grid(bad), InvalidArgument) << bad;
}

TEST(Csv, SweepFormat)
{
    JacksonPoint p;
    p.M = 2;
    p.K = 3;
    p.error_sq = 0.25;
    p.bound = 0.5;
    p.spectral_tail_val = 0.125;
    p.memory_tail_val = 0.125;
    EXPECT_EQ(sweep_csv({p}), "M,K,error_sq,bound,spectral_tail,memory_tail,ratio\n2,3,0.25,0.5,0.125,0.125,0.5\n");
}

TEST(Csv, SpectrumRoundTrip)
{
    CounterRng rng(84);
    const Spectrum s = spectrum(hosvd(random_tensor(3, 3, rng)));
    const Spectrum back = spectrum_from_csv(spectrum_csv(s));
    ASSERT_EQ(back.entries.size(), 27u);
    for (std::size_t i = 0; i < 27; ++i) {
        EXPECT_EQ(back.entries[i].magnitude, s.entries[i].magnitude);
        EXPECT_EQ(back.entries[i].value, s.entries[i].value);
        EXPECT_EQ(back.entries[i].index, s.entries[i].index);
    }
    EXPECT_THROW(spectrum_from_csv("rank,mag\n"), InvalidArgument);
}

TEST(Files, AtomicWriteReplaces)
{
    TempDir dir("io_write");
    const auto path = dir.file("out.txt");
    write_file_atomic(path, "first");
    write_file_atomic(path, "second");
    EXPECT_EQ(read_text_file(path), "second");
    EXPECT_FALSE(std::filesystem::exists(path + ".tmp"));
    EXPECT_THROW(write_file_atomic(dir.file("no/such/dir/x.txt"), "x"), std::exception);
    EXPECT_THROW(read_text_file(dir.file("absent.txt")), InvalidArgument);
}

TEST(Reports, ComplexityJsonMarksInfinity)
{
    CounterRng rng(85);
    const auto r = complexity_report(random_kernel(1, 8, rng), DecayEnvelope::exponential(800.0),
                                     DecayEnvelope::exponential(1.0), 2, 3);
    const json j = json::parse(to_json(r).dump());
    EXPECT_EQ(j.at("C1").at("value"), "inf");
    EXPECT_TRUE(j.at("C2").at("value").is_number());
}
