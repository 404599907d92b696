#pragma once

// Named experiments. Short-time runs use
// 200 periods at stride 1; long-time runs use 10^4 periods at stride 2 (the
// 2T-stroboscopic view). Both are overridable from the CLI.

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "chimera/config.hpp"

namespace chimera {

inline constexpr std::uint64_t kShortPeriods = 200;
inline constexpr std::uint64_t kLongPeriods = 10000;
inline constexpr std::uint64_t kPresetRealizations = 100;
inline constexpr std::uint64_t kPresetSeed = 20210601;

struct PresetInfo {
    std::string name;
    std::string description;
    ExperimentConfig config;
};

namespace detail {

inline ExperimentConfig chain_experiment(std::size_t n, double j0t, RangeExponent alpha, double eps_a, double eps_b, double wt,
                                         bool long_time) {
    ExperimentConfig c;
    c.network.builder = NetworkBuilder::power_law;
    c.network.n_sites = n;
    c.network.j0t = j0t;
    c.network.alpha = alpha;
    c.protocol.eps_a = eps_a;
    c.protocol.eps_b = eps_b;
    c.disorder = {wt, DisorderBounds::positive};
    c.schedule = long_time ? ScheduleConfig{kLongPeriods, 2} : ScheduleConfig{kShortPeriods, 1};
    c.ensemble = {kPresetRealizations, kPresetSeed, false};
    c.observables = {true, false};
    return c;
}

inline std::string format_eps(double e) { return e == 0.03 ? "0.03" : e == 0.1 ? "0.1" : std::to_string(e); }

inline std::vector<PresetInfo> build_presets() {
    const double two_pi = 2.0 * kPi;
    const auto a151 = RangeExponent::finite(1.51);
    std::vector<PresetInfo> out;
    auto add = [&](std::string name, std::string description, ExperimentConfig c) {
        c.output_path = "out/" + name;
        out.push_back({std::move(name), std::move(description), std::move(c)});
    };

    add("fig1b-weak", "local magnetization, weak coupling J0T=0.072, N=8, short time",
        chain_experiment(8, 0.072, a151, 0.03, 0.9, two_pi, false));
    add("fig1b-strong", "local magnetization, strong coupling J0T=0.2, N=8, short time",
        chain_experiment(8, 0.2, a151, 0.03, 0.9, two_pi, false));
    for (std::size_t n : {6, 8, 10}) {
        add("fig1b-weak-long-n" + std::to_string(n), "regional magnetization, weak coupling, long time",
            chain_experiment(n, 0.072, a151, 0.03, 0.9, two_pi, true));
        add("fig1b-strong-long-n" + std::to_string(n), "regional magnetization, strong coupling, long time",
            chain_experiment(n, 0.2, a151, 0.03, 0.9, two_pi, true));
    }

    for (double eps : {0.03, 0.1}) {
        for (double wt : {0.0, two_pi}) {
            const std::string tag = "-eps" + format_eps(eps) + (wt == 0.0 ? "-w0" : "-w2pi");
            add("fig2" + tag, "ensemble local magnetization, weak coupling, short time",
                chain_experiment(8, 0.072, a151, eps, 0.9, wt, false));
            add("fig2-long" + tag, "ensemble regional magnetization, weak coupling, long time",
                chain_experiment(8, 0.072, a151, eps, 0.9, wt, true));
            add("figs2" + tag, "weak coupling with region B undriven (eps_B=1), short time",
                chain_experiment(8, 0.072, a151, eps, 1.0, wt, false));
        }
    }

    const std::pair<const char*, RangeExponent> ranges[] = {
        {"0", RangeExponent::finite(0.0)}, {"1.51", a151}, {"inf", RangeExponent::infinite()}};
    for (const auto& [tag, alpha] : ranges) {
        auto c = chain_experiment(8, 0.2, alpha, 0.03, 0.9, two_pi, true);
        c.initial_state = {InitialStateKind::tilted, 0.2 * kPi};
        c.observables = {true, true};
        add(std::string("fig4-alpha") + tag, "tilted initial state, regional magnetization and S_B, long time", c);
    }

    for (std::size_t n : {6, 8, 10})
        add("figs1-n" + std::to_string(n), "strong coupling with region B undriven (eps_B=1), long time",
            chain_experiment(n, 0.2, a151, 0.03, 1.0, two_pi, true));

    add("figs3-c", "small non-uniform errors eps_A=0.03, eps_B=0.1, strong coupling, long time",
        chain_experiment(8, 0.2, a151, 0.03, 0.1, two_pi, true));
    add("figs3-d", "eps_A=0.03, eps_B=0.4, strong coupling, long time", chain_experiment(8, 0.2, a151, 0.03, 0.4, two_pi, true));

    // Ladder sites: rail 0 is 0..3, rail 1 is 4..7, rung r joins r and 4+r.
    const std::pair<const char*, const char*> bipartitions[] = {
        {"rails", "AAAABBBB"}, {"halves", "AABBAABB"}, {"checker", "ABABBABA"}, {"ends", "ABBAABBA"}};
    for (const auto& [tag, labels] : bipartitions) {
        ExperimentConfig c;
        c.network.builder = NetworkBuilder::ladder;
        c.network.n_rungs = 4;
        c.network.n_sites = 8;
        c.network.jt = 0.2;
        c.partition.labels = labels;
        c.protocol.eps_a = 0.03;
        c.protocol.eps_b = 0.9;
        c.disorder = {two_pi, DisorderBounds::positive};
        c.schedule = {kShortPeriods, 1};
        c.ensemble = {kPresetRealizations, kPresetSeed, false};
        c.observables = {true, false};
        add(std::string("s5-ladder-") + tag, std::string("ladder network, bipartition ") + labels, c);
    }
    return out;
}

}  // namespace detail

inline const std::vector<PresetInfo>& presets() {
    static const std::vector<PresetInfo> all = detail::build_presets();
    return all;
}

// Family names group presets sharing a prefix, e.g. "fig4" or "s5-ladder".
inline std::vector<PresetInfo> preset_family(const std::string& family) {
    std::vector<PresetInfo> out;
    for (const auto& p : presets())
        if (p.name == family || p.name.rfind(family + "-", 0) == 0) out.push_back(p);
    return out;
}

inline std::string preset_list() {
    std::string s;
    for (const auto& p : presets()) s += (s.empty() ? "" : ", ") + p.name;
    return s;
}

inline ExperimentConfig preset(const std::string& name) {
    for (const auto& p : presets())
        if (p.name == name) return p.config;
    throw ConfigError("preset", "unknown preset '" + name + "'; available: " + preset_list());
}

}  // namespace chimera
