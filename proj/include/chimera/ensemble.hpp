#pragma once

// Disorder-ensemble execution and result emission.
//
// Realization r draws its disorder from derive_seed(master_seed, r), so each
// trace depends only on (config, r). Workers pull indices from a shared
// counter; the merge adds traces strictly in index order, which keeps the
// ensemble mean bitwise independent of the worker count.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "chimera/config.hpp"
#include "chimera/errors.hpp"
#include "chimera/evolution.hpp"
#include "chimera/observables.hpp"

#ifndef CHIMERA_VERSION
#define CHIMERA_VERSION "dev"
#endif

namespace chimera {

// splitmix64 finalizer: a bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Distinct r give distinct inputs to mix64 (odd stride), hence distinct seeds.
constexpr std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t r) noexcept {
    return mix64(master_seed + 0x9e3779b97f4a7c15ULL * (r + 1));
}

class EnsembleFailure : public NumericalError {
public:
    EnsembleFailure(std::vector<std::uint64_t> failed, const std::string& first_message)
        : NumericalError(describe(failed, first_message)), failed_(std::move(failed)) {}

    const std::vector<std::uint64_t>& failed_indices() const noexcept { return failed_; }

private:
    static std::string describe(const std::vector<std::uint64_t>& failed, const std::string& first) {
        std::string s = std::to_string(failed.size()) + " realization(s) failed [";
        for (std::size_t k = 0; k < failed.size(); ++k) s += (k ? "," : "") + std::to_string(failed[k]);
        return s + "]: " + first;
    }
    std::vector<std::uint64_t> failed_;
};

struct RealizationInputs {
    SpinNetwork network;
    RegionPartition partition;
    DriveProtocol protocol;
    DisorderField disorder;
    StateVector initial;
};

inline RealizationInputs realization_inputs(const ExperimentConfig& config, std::uint64_t r) {
    if (r >= config.ensemble.realizations) throw std::out_of_range("realization index beyond ensemble size");
    auto network = build_network(config.network);
    auto disorder = sample_disorder(network.n_sites(), config.disorder.wt / kDrivePeriod, config.disorder.bounds,
                                    derive_seed(config.ensemble.master_seed, r));
    return {std::move(network), build_partition(config), build_protocol(config.protocol), std::move(disorder),
            build_initial_state(config)};
}

inline StroboscopicTrace run_realization(const ExperimentConfig& config, std::uint64_t r) {
    auto in = realization_inputs(config, r);
    try {
        return evolve_record(in.initial, in.protocol, in.network, in.disorder, in.partition, config.schedule.n_periods,
                             config.schedule.record_stride, config.observables);
    } catch (const NumericalError& e) {
        throw NumericalError("realization " + std::to_string(r) + ": " + e.what());
    }
}

struct EnsembleResult {
    ExperimentConfig config;
    StroboscopicTrace mean;
    std::vector<StroboscopicTrace> realizations;  // only with store_realizations
    std::vector<std::uint64_t> seeds;
    double wall_seconds = 0.0;
    std::string label;  // preset name, when run from one

    nlohmann::json manifest() const;
};

namespace detail {

inline void accumulate(std::vector<double>& sum, const std::vector<double>& v) {
    if (sum.empty()) sum.assign(v.size(), 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) sum[i] += v[i];
}

class TraceAccumulator {
public:
    void add(const StroboscopicTrace& t) {
        if (count_ == 0) {
            sum_.n_sites = t.n_sites;
            sum_.record_times = t.record_times;
            sum_.local.assign(t.size(), std::vector<double>(t.n_sites, 0.0));
        } else if (t.record_times != sum_.record_times) {
            throw NumericalError("realizations recorded different time grids");
        }
        for (std::size_t k = 0; k < t.size(); ++k)
            for (std::size_t l = 0; l < t.n_sites; ++l) sum_.local[k][l] += t.local[k][l];
        accumulate(sum_.m_a, t.m_a);
        accumulate(sum_.m_b, t.m_b);
        accumulate(sum_.mean_a, t.mean_a);
        accumulate(sum_.mean_b, t.mean_b);
        accumulate(sum_.entropy_b, t.entropy_b);
        ++count_;
    }

    StroboscopicTrace mean() const {
        StroboscopicTrace m = sum_;
        const auto inv = static_cast<double>(count_);
        for (auto& row : m.local)
            for (double& v : row) v /= inv;
        for (auto* series : {&m.m_a, &m.m_b, &m.mean_a, &m.mean_b, &m.entropy_b})
            for (double& v : *series) v /= inv;
        return m;
    }

private:
    StroboscopicTrace sum_;
    std::uint64_t count_ = 0;
};

}  // namespace detail

inline unsigned default_jobs() { return std::max(1U, std::thread::hardware_concurrency()); }

// Runs every realization on `jobs` threads. Throws EnsembleFailure listing
// the failed indices; no mean is produced in that case.
inline EnsembleResult run_ensemble(const ExperimentConfig& config, unsigned jobs = default_jobs()) {
    validate(config);
    const auto start = std::chrono::steady_clock::now();
    const std::uint64_t total = config.ensemble.realizations;
    jobs = static_cast<unsigned>(std::clamp<std::uint64_t>(jobs, 1, total));

    EnsembleResult result;
    result.config = config;
    for (std::uint64_t r = 0; r < total; ++r) result.seeds.push_back(derive_seed(config.ensemble.master_seed, r));

    std::atomic<std::uint64_t> next{0};
    std::mutex lock;
    std::map<std::uint64_t, StroboscopicTrace> pending;
    std::uint64_t next_to_merge = 0;
    detail::TraceAccumulator accumulator;
    std::map<std::uint64_t, std::string> failures;
    std::string merge_error;

    auto worker = [&] {
        for (std::uint64_t r = next.fetch_add(1); r < total; r = next.fetch_add(1)) {
            std::optional<StroboscopicTrace> trace;
            std::string error;
            try {
                trace = run_realization(config, r);
            } catch (const std::exception& e) {
                error = e.what();
            }
            std::lock_guard guard(lock);
            if (!trace) {
                failures.emplace(r, error);
                continue;
            }
            pending.emplace(r, std::move(*trace));
            // Merge the contiguous prefix; out-of-order traces wait in `pending`.
            while (failures.empty() && merge_error.empty() && pending.count(next_to_merge)) {
                auto node = pending.extract(next_to_merge);
                try {
                    accumulator.add(node.mapped());
                } catch (const std::exception& e) {
                    merge_error = e.what();
                    break;
                }
                if (config.ensemble.store_realizations) result.realizations.push_back(std::move(node.mapped()));
                ++next_to_merge;
            }
        }
    };

    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(jobs);
        for (unsigned k = 0; k < jobs; ++k) pool.emplace_back(worker);
    }

    if (!failures.empty()) {
        std::vector<std::uint64_t> failed;
        for (const auto& [r, msg] : failures) failed.push_back(r);
        throw EnsembleFailure(std::move(failed), failures.begin()->second);
    }
    if (!merge_error.empty()) throw NumericalError(merge_error);

    result.mean = accumulator.mean();
    result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

inline nlohmann::json EnsembleResult::manifest() const {
    nlohmann::json m;
    m["code_version"] = CHIMERA_VERSION;
    if (!label.empty()) m["preset"] = label;
    m["config"] = to_json(config);
    m["seeds"] = seeds;
    m["wall_time_seconds"] = wall_seconds;
    m["records"] = {
        {"count", mean.size()},
        {"first", mean.size() ? mean.record_times.front() : 0},
        {"last", mean.size() ? mean.record_times.back() : 0},
        {"stride", config.schedule.record_stride},
    };
    m["n_periods"] = config.schedule.n_periods;
    if (config.network.n_sites >= 2) {
        const auto ref = reference_entropies(config.network.n_sites);
        m["reference_entropies"] = {{"thermal", ref.thermal}, {"mbl", ref.mbl}};
    }
    m["magnetization_normalization"] = mean.has_region_means() ? "M_A,M_B use 2/N; mean_A,mean_B use 1/|R|" : "2/N";
    return m;
}

// Writes via a sibling temp file and rename so readers never see partial output.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out << content;
        out.flush();
        if (!out) throw IoError("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

inline std::string trace_csv(const StroboscopicTrace& trace) {
    std::ostringstream out;
    write_trace_csv(out, trace);
    return out.str();
}

inline std::string realization_file_name(std::uint64_t r) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "r%04llu.csv", static_cast<unsigned long long>(r));
    return buf;
}

// trace.csv, manifest.json and, when stored, realizations/r####.csv.
inline std::vector<std::filesystem::path> emit_outputs(const EnsembleResult& result, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    std::vector<std::filesystem::path> written;
    written.push_back(dir / "trace.csv");
    write_file_atomic(written.back(), trace_csv(result.mean));
    if (!result.realizations.empty()) {
        const auto sub = dir / "realizations";
        std::filesystem::create_directories(sub, ec);
        if (ec) throw IoError("cannot create " + sub.string() + ": " + ec.message());
        for (std::size_t r = 0; r < result.realizations.size(); ++r) {
            written.push_back(sub / realization_file_name(r));
            write_file_atomic(written.back(), trace_csv(result.realizations[r]));
        }
    }
    written.push_back(dir / "manifest.json");
    write_file_atomic(written.back(), result.manifest().dump(2) + "\n");
    return written;
}

// Gnuplot script for the regional magnetizations (and S_B when present).
inline std::string plot_script(const StroboscopicTrace& trace, const std::string& title) {
    std::ostringstream s;
    const std::size_t base = trace.n_sites + 2;
    s << "set datafile separator ','\nset key autotitle columnhead\nset xlabel 'n (periods)'\n";
    s << "set title '" << title << "'\n";
    s << "set multiplot layout " << (trace.has_entropy() ? 2 : 1) << ",1\n";
    if (trace.has_regional()) {
        s << "set ylabel 'M^z'\nset yrange [-1.05:1.05]\n";
        s << "plot 'trace.csv' using 1:" << base << " with lines, '' using 1:" << base + 1 << " with lines\n";
    } else {
        s << "set ylabel '<sigma^z_l>'\nplot for [c=2:" << base - 1 << "] 'trace.csv' using 1:c with lines\n";
    }
    if (trace.has_entropy()) {
        s << "set ylabel 'S_B'\nset autoscale y\nplot 'trace.csv' using 1:" << base + (trace.has_regional() ? 2 : 0) << " with lines\n";
    }
    s << "unset multiplot\n";
    return s.str();
}

}  // namespace chimera
