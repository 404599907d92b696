#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "chimera/ensemble.hpp"
#include "chimera/presets.hpp"

using namespace chimera;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_config(std::uint64_t realizations = 6) {
    auto c = preset("fig1b-strong");
    c.network.n_sites = 6;
    c.schedule = {30, 1};
    c.ensemble = {realizations, 77, false};
    return c;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("chimera_test_" + name);
    fs::remove_all(dir);
    return dir;
}

}  // namespace

TEST(Seeds, DistinctForMillionRealizations) {
    std::vector<std::uint64_t> seeds;
    seeds.reserve(1'000'000);
    for (std::uint64_t r = 0; r < 1'000'000; ++r) seeds.push_back(derive_seed(20210601, r));
    std::sort(seeds.begin(), seeds.end());
    EXPECT_EQ(std::adjacent_find(seeds.begin(), seeds.end()), seeds.end());
    EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
}

TEST(Ensemble, MeanIsOrderedAverageOfRealizations) {
    const auto c = small_config(5);
    const auto result = run_ensemble(c, 1);
    std::vector<std::vector<double>> m_a;
    for (std::uint64_t r = 0; r < 5; ++r) m_a.push_back(run_realization(c, r).m_a);
    const auto expected = ensemble_mean(m_a);
    ASSERT_EQ(result.mean.m_a.size(), expected.size());
    for (std::size_t k = 0; k < expected.size(); ++k) EXPECT_NEAR(result.mean.m_a[k], expected[k], 1e-15);
    EXPECT_EQ(result.seeds.size(), 5u);
    EXPECT_EQ(result.seeds[3], derive_seed(77, 3));
    EXPECT_TRUE(result.realizations.empty());
}

TEST(Ensemble, RealizationDependsOnlyOnIndex) {
    const auto c = small_config();
    EXPECT_EQ(realization_inputs(c, 2).disorder, realization_inputs(c, 2).disorder);
    EXPECT_NE(realization_inputs(c, 2).disorder.values, realization_inputs(c, 3).disorder.values);
    EXPECT_THROW(realization_inputs(c, 6), std::out_of_range);
}

TEST(Ensemble, BitwiseIndependentOfJobCount) {
    auto c = small_config(9);
    c.ensemble.store_realizations = true;
    const auto one = run_ensemble(c, 1);
    for (unsigned jobs : {2u, 3u, 8u}) {
        const auto many = run_ensemble(c, jobs);
        EXPECT_EQ(many.mean, one.mean) << jobs;
        EXPECT_EQ(many.realizations, one.realizations) << jobs;
        EXPECT_EQ(trace_csv(many.mean), trace_csv(one.mean));
    }
}

TEST(Ensemble, InvalidConfigRejected) {
    auto c = small_config();
    c.ensemble.realizations = 0;
    EXPECT_THROW(run_ensemble(c, 1), ConfigError);
}

TEST(EnsembleFailure, ListsIndices) {
    const EnsembleFailure f({2, 5}, "boom");
    EXPECT_EQ(f.failed_indices(), (std::vector<std::uint64_t>{2, 5}));
    EXPECT_NE(std::string(f.what()).find("[2,5]"), std::string::npos);
}

TEST(Outputs, LayoutAndByteIdenticalRerun) {
    auto c = small_config(3);
    c.ensemble.store_realizations = true;
    const auto first = scratch("outputs_a");
    const auto second = scratch("outputs_b");
    emit_outputs(run_ensemble(c, 1), first);
    emit_outputs(run_ensemble(c, 2), second);

    EXPECT_TRUE(fs::exists(first / "manifest.json"));
    EXPECT_TRUE(fs::exists(first / "realizations" / "r0002.csv"));
    EXPECT_FALSE(fs::exists(first / "realizations" / "r0003.csv"));
    EXPECT_FALSE(fs::exists(first / "trace.csv.tmp"));
    EXPECT_EQ(slurp(first / "trace.csv"), slurp(second / "trace.csv"));
    EXPECT_EQ(slurp(first / "realizations" / "r0001.csv"), slurp(second / "realizations" / "r0001.csv"));

    const auto csv = slurp(first / "trace.csv");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 31);  // header + 30 records
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "n,site_0,site_1,site_2,site_3,site_4,site_5,M_A,M_B");

    const auto manifest = nlohmann::json::parse(slurp(first / "manifest.json"));
    EXPECT_EQ(manifest["seeds"].size(), 3u);
    EXPECT_EQ(manifest["records"]["count"], 30);
    EXPECT_EQ(parse_config_json(manifest["config"]), c);
    EXPECT_NEAR(manifest["reference_entropies"]["mbl"].get<double>(), std::log(2.0), 1e-15);
    EXPECT_TRUE(manifest.contains("code_version"));
    EXPECT_TRUE(manifest.contains("wall_time_seconds"));
}

TEST(Outputs, UnwritableDirectoryRaisesIoError) {
    const auto file = scratch("blocker");
    fs::create_directories(file.parent_path());
    std::ofstream(file) << "x";
    EXPECT_THROW(emit_outputs(run_ensemble(small_config(1), 1), file / "sub"), IoError);
    fs::remove(file);
}

TEST(PlotScript, ReferencesColumns) {
    auto c = small_config(1);
    c.observables = {true, true};
    const auto script = plot_script(run_ensemble(c, 1).mean, "demo");
    EXPECT_NE(script.find("using 1:8"), std::string::npos);   // M_A
    EXPECT_NE(script.find("using 1:10"), std::string::npos);  // S_B
    EXPECT_NE(script.find("'demo'"), std::string::npos);
}
