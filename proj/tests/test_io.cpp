#include "doctest.h"

#include <filesystem>
#include <functional>
#include <fstream>
#include <sstream>

#include "pairclone/archive.hpp"
#include "pairclone/io.hpp"
#include "pairclone/sampler.hpp"

using namespace pairclone;

namespace {

std::filesystem::path scratch_dir(const std::string& name)
{
    auto dir = std::filesystem::temp_directory_path() / ("pairclone_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

const char* kHeader = "sample_id\tpair_id\tn00\tn01\tn10\tn11\tnm0\tnm1\tn0m\tn1m\n";

std::string message_of(const std::function<void()>& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.what();
    }
    return {};
}

} // namespace

TEST_CASE("counts round trip")
{
    const auto sim = generate(builtin_spec("sim1"), 12);
    std::stringstream ss;
    write_counts(ss, sim.counts);
    const auto back = parse_counts(ss);
    CHECK(back == sim.counts);

    const auto sim3 = generate(builtin_spec("sim3"), 12);
    const auto dir = scratch_dir("counts");
    write_counts(dir / "c.tsv", sim3.counts);
    CHECK(parse_counts(dir / "c.tsv") == sim3.counts);
}

TEST_CASE("malformed counts are rejected")
{
    const auto parse = [](const std::string& text) {
        std::istringstream in {text};
        return message_of([&] { parse_counts(in); });
    };
    CHECK(parse(std::string {kHeader} + "a\tp1\t1\t2\t3\t4\t5\t6\t7\t8\na\tp1\t1\t1\t1\t1\t1\t1\t1\t1\n").find("duplicate cell")
          != std::string::npos);
    CHECK(parse(std::string {kHeader} + "a\tp1\t1\t2\t3\t-4\t5\t6\t7\t8\n").find("negative") != std::string::npos);
    CHECK(parse(std::string {kHeader} + "a\tp1\t1\t2\t3\tx\t5\t6\t7\t8\n").find("bad count") != std::string::npos);
    CHECK(parse(std::string {kHeader} + "a\tp1\t1\t2\t3\n").find("fields") != std::string::npos);
    CHECK(parse("sample\tpair\n").find("header") != std::string::npos);
    CHECK(parse(std::string {kHeader} + "a\tp1\t1\t2\t3\t4\t5\t6\t7\t8\nb\tp2\t1\t1\t1\t1\t1\t1\t1\t1\n").find("inconsistent")
          != std::string::npos);
    CHECK(parse("").find("empty") != std::string::npos);
}

TEST_CASE("SNV sidecar round trip")
{
    const auto sim = generate(builtin_spec("sim3_snv"), 4);
    std::stringstream ss;
    write_snvs(ss, sim.snvs, sim.counts.sample_ids);
    const auto back = parse_snvs(ss, sim.counts.sample_ids);
    CHECK(back.num_snvs == sim.snvs.num_snvs);
    CHECK(back.total == sim.snvs.total);
    CHECK(back.variant == sim.snvs.variant);
    CHECK(back.snv_ids == sim.snvs.snv_ids);

    std::istringstream bad {"sample_id\tsnv_id\ttotal\tvariant\ns1\tx\t5\t6\n"};
    CHECK_THROWS_AS(parse_snvs(bad), Error);
}

TEST_CASE("archive round trip is exact")
{
    const auto sim = generate(builtin_spec("sim1"), 1);
    Hyperparameters hp;
    hp.iterations = 120;
    hp.burn_in = 20;
    hp.thin = 4;
    for (bool purity : {false, true}) {
        const auto archive = run_chain(sim.counts, MissingnessRates::empirical(sim.counts), hp, 2, 5, 1, purity);
        const auto dir = scratch_dir(purity ? "archive_purity" : "archive");
        write_archive(archive, dir);
        const auto back = read_archive(dir);
        CHECK(back.manifest == archive.manifest);
        CHECK(back.initial == archive.initial);
        REQUIRE(back.samples.size() == archive.samples.size());
        CHECK(back.samples == archive.samples);

        const auto state = restore(back.samples.back(), back.manifest);
        REQUIRE(state.w.size() == archive.samples.back().w.size());
        for (std::size_t i = 0; i < state.w.size(); ++i) CHECK(state.w[i] == doctest::Approx(archive.samples.back().w[i]).epsilon(1e-12));
        CHECK(state.purity == purity);
    }
    const auto missing = message_of([] { read_archive(std::filesystem::temp_directory_path() / "pairclone_no_such_dir"); });
    CHECK(missing.find("missing archive") != std::string::npos);
}

TEST_CASE("hyperparameters")
{
    Hyperparameters hp;
    CHECK_NOTHROW(hp.validate());
    hp.set("alpha", "2.5");
    hp.set("cmax", "6");
    hp.set("ladder", "3, 2, 1");
    CHECK(hp.alpha == 2.5);
    CHECK(hp.c_max == 6);
    CHECK(hp.ladder == std::vector<double> {3.0, 2.0, 1.0});
    CHECK_THROWS_AS(hp.set("nonsense", "1"), Error);
    CHECK_THROWS_AS(hp.set("alpha", "abc"), Error);

    auto bad = Hyperparameters {};
    bad.r = 1.0;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = Hyperparameters {};
    bad.ladder = {2.0, 1.5};
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = Hyperparameters {};
    bad.burn_in = bad.iterations;
    CHECK_THROWS_AS(bad.validate(), Error);

    const auto dir = scratch_dir("config");
    {
        std::ofstream out {dir / "hp.cfg"};
        out << "# schedule\niterations = 500\nburn_in = 100 # short\n\nd0 = 0.05\n";
    }
    const auto loaded = load_hyperparameters(dir / "hp.cfg");
    CHECK(loaded.iterations == 500);
    CHECK(loaded.burn_in == 100);
    CHECK(loaded.d0 == 0.05);

    nlohmann::json j = loaded;
    CHECK(j.get<Hyperparameters>().d0 == 0.05);
    CHECK(config_hash(loaded, 1, 2, 3, 4, false) == config_hash(loaded, 1, 2, 3, 4, false));
    CHECK(config_hash(loaded, 1, 2, 3, 4, false) != config_hash(hp, 1, 2, 3, 4, false));
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("report json")
{
    const auto sim = generate(builtin_spec("sim1"), 3);
    const auto j = truth_json(sim);
    CHECK(j.contains("z"));
    CHECK(j.dump().find("sim1") != std::string::npos);
}
