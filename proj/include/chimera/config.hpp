#pragma once

// Declarative experiment description and its strict JSON schema.
//
// Top-level keys: network, partition, protocol, disorder, initial_state,
// schedule, ensemble, observables, output. Times are in units of the drive
// period (JT, WT, gT1); the engine fixes T = 1.

#include <cmath>
#include <cstdint>
#include <set>
#include <type_traits>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "chimera/errors.hpp"
#include "chimera/evolution.hpp"
#include "chimera/network.hpp"
#include "chimera/state.hpp"

namespace chimera {

enum class NetworkBuilder { power_law, ladder, explicit_edges };
enum class InitialStateKind { polarized, tilted };

struct NetworkConfig {
    NetworkBuilder builder = NetworkBuilder::power_law;
    std::size_t n_sites = 0;   // power_law, explicit_edges
    double j0t = 0.0;          // power_law
    RangeExponent alpha = RangeExponent::finite(0.0);
    std::size_t n_rungs = 0;   // ladder
    double jt = 0.0;           // ladder
    std::vector<Edge> edges;   // explicit_edges, couplings as JT

    friend bool operator==(const NetworkConfig&, const NetworkConfig&) = default;
};

struct PartitionConfig {
    std::string labels;  // empty means the half split
    bool allow_degenerate = false;

    friend bool operator==(const PartitionConfig&, const PartitionConfig&) = default;
};

inline constexpr double kHalfPi = kPi / 2.0;

struct ProtocolConfig {
    double g_t1 = kHalfPi;
    double t1_over_t = 0.5;
    double eps_a = 0.0;
    double eps_b = 0.0;
    bool allow_g_t1_override = false;

    friend bool operator==(const ProtocolConfig&, const ProtocolConfig&) = default;
};

struct DisorderConfig {
    double wt = 0.0;
    DisorderBounds bounds = DisorderBounds::positive;

    friend bool operator==(const DisorderConfig&, const DisorderConfig&) = default;
};

struct InitialStateConfig {
    InitialStateKind kind = InitialStateKind::polarized;
    double theta = 0.0;

    friend bool operator==(const InitialStateConfig&, const InitialStateConfig&) = default;
};

struct ScheduleConfig {
    std::uint64_t n_periods = 0;
    std::uint64_t record_stride = 1;

    friend bool operator==(const ScheduleConfig&, const ScheduleConfig&) = default;
};

struct EnsembleConfig {
    std::uint64_t realizations = 1;
    std::uint64_t master_seed = 0;
    bool store_realizations = false;

    friend bool operator==(const EnsembleConfig&, const EnsembleConfig&) = default;
};

struct ExperimentConfig {
    NetworkConfig network;
    PartitionConfig partition;
    ProtocolConfig protocol;
    DisorderConfig disorder;
    InitialStateConfig initial_state;
    ScheduleConfig schedule;
    EnsembleConfig ensemble;
    ObservableSet observables;
    std::string output_path = "out";

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

namespace detail {

// Strict object access: remembers consumed keys and rejects the rest.
class ObjectReader {
public:
    ObjectReader(const nlohmann::json& j, std::string path) : json_(j), path_(std::move(path)) {
        if (!j.is_object()) throw ConfigError(path_, "expected an object");
    }

    bool has(const std::string& key) const { return json_.contains(key); }

    const nlohmann::json& at(const std::string& key) {
        if (!json_.contains(key)) throw ConfigError(child(key), "missing required field");
        seen_.insert(key);
        return json_.at(key);
    }

    template <typename T>
    T require(const std::string& key) {
        return convert<T>(at(key), child(key));
    }

    template <typename T>
    T get(const std::string& key, T fallback) {
        if (!json_.contains(key)) return fallback;
        return require<T>(key);
    }

    std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    void finish() const {
        for (const auto& item : json_.items())
            if (!seen_.count(item.key())) throw ConfigError(child(item.key()), "unknown key");
    }

    template <typename T>
    static T convert(const nlohmann::json& v, const std::string& path) {
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) throw ConfigError(path, "expected a boolean");
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) throw ConfigError(path, "expected a string");
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!v.is_number()) throw ConfigError(path, "expected a number");
            if (!std::isfinite(v.get<double>())) throw ConfigError(path, "expected a finite number");
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
                throw ConfigError(path, "expected a non-negative integer");
        }
        return v.get<T>();
    }

private:
    const nlohmann::json& json_;
    std::string path_;
    std::set<std::string> seen_;
};

inline NetworkConfig parse_network(const nlohmann::json& j) {
    ObjectReader r(j, "network");
    NetworkConfig c;
    const auto builder = r.require<std::string>("builder");
    if (builder == "power_law") {
        c.builder = NetworkBuilder::power_law;
        c.n_sites = r.require<std::size_t>("n_sites");
        c.j0t = r.require<double>("J0T");
        const auto& alpha = r.at("alpha");
        if (alpha.is_string()) {
            if (alpha.get<std::string>() != "inf") throw ConfigError("network.alpha", "expected a number or \"inf\"");
            c.alpha = RangeExponent::infinite();
        } else {
            const auto a = ObjectReader::convert<double>(alpha, "network.alpha");
            if (a < 0.0) throw ConfigError("network.alpha", "must be >= 0");
            c.alpha = RangeExponent::finite(a);
        }
    } else if (builder == "ladder") {
        c.builder = NetworkBuilder::ladder;
        c.n_rungs = r.require<std::size_t>("n_rungs");
        c.jt = r.require<double>("JT");
        if (c.n_rungs < 2) throw ConfigError("network.n_rungs", "must be >= 2");
        c.n_sites = 2 * c.n_rungs;
    } else if (builder == "explicit") {
        c.builder = NetworkBuilder::explicit_edges;
        c.n_sites = r.require<std::size_t>("n_sites");
        const auto& edges = r.at("edges");
        if (!edges.is_array()) throw ConfigError("network.edges", "expected an array");
        for (std::size_t k = 0; k < edges.size(); ++k) {
            const std::string path = "network.edges[" + std::to_string(k) + "]";
            const auto& e = edges[k];
            if (!e.is_array() || e.size() != 3) throw ConfigError(path, "expected [l, m, JT]");
            c.edges.push_back({ObjectReader::convert<std::size_t>(e[0], path), ObjectReader::convert<std::size_t>(e[1], path),
                               ObjectReader::convert<double>(e[2], path)});
        }
    } else {
        throw ConfigError("network.builder", "unknown builder '" + builder + "' (expected power_law|ladder|explicit)");
    }
    r.finish();
    if (c.n_sites == 0 || c.n_sites > kMaxSites) throw ConfigError("network.n_sites", "must lie in [1, 30]");
    return c;
}

inline nlohmann::json network_to_json(const NetworkConfig& c) {
    switch (c.builder) {
        case NetworkBuilder::power_law: {
            nlohmann::json alpha = c.alpha.is_infinite() ? nlohmann::json("inf") : nlohmann::json(c.alpha.value());
            return {{"builder", "power_law"}, {"n_sites", c.n_sites}, {"J0T", c.j0t}, {"alpha", alpha}};
        }
        case NetworkBuilder::ladder:
            return {{"builder", "ladder"}, {"n_rungs", c.n_rungs}, {"JT", c.jt}};
        case NetworkBuilder::explicit_edges: {
            nlohmann::json edges = nlohmann::json::array();
            for (const Edge& e : c.edges) edges.push_back({e.l, e.m, e.coupling});
            return {{"builder", "explicit"}, {"n_sites", c.n_sites}, {"edges", edges}};
        }
    }
    return {};
}

}  // namespace detail

inline void validate(const ExperimentConfig& c) {
    const auto& p = c.protocol;
    if (!c.protocol.allow_g_t1_override && std::abs(p.g_t1 - kHalfPi) > 1e-12)
        throw ConfigError("protocol.gT1", "must equal pi/2 unless protocol.allow_gT1_override is set");
    if (!(p.t1_over_t > 0.0 && p.t1_over_t < 1.0)) throw ConfigError("protocol.T1_over_T", "must lie in (0, 1)");
    if (!(p.eps_a >= 0.0 && p.eps_a <= 1.0)) throw ConfigError("protocol.eps_A", "must lie in [0, 1]");
    if (!(p.eps_b >= 0.0 && p.eps_b <= 1.0)) throw ConfigError("protocol.eps_B", "must lie in [0, 1]");
    if (!(c.disorder.wt >= 0.0)) throw ConfigError("disorder.WT", "must be >= 0");
    if (c.schedule.n_periods < 1) throw ConfigError("schedule.n_periods", "must be >= 1");
    if (c.schedule.record_stride < 1) throw ConfigError("schedule.record_stride", "must be >= 1");
    if (c.ensemble.realizations < 1) throw ConfigError("ensemble.realizations", "must be >= 1");
    const std::size_t n = c.network.n_sites;
    if (c.partition.labels.empty()) {
        if (n % 2 != 0) throw ConfigError("partition", "half split needs an even site count; give explicit labels");
    } else {
        if (c.partition.labels.size() != n) throw ConfigError("partition.labels", "length must equal the site count");
        bool degenerate = false;
        try {
            degenerate = RegionPartition::from_labels(c.partition.labels, c.partition.allow_degenerate).is_degenerate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError("partition.labels", e.what());
        }
        if (degenerate && c.observables.entropy) throw ConfigError("observables", "entropy needs a non-degenerate partition");
    }
    if (c.network.builder == NetworkBuilder::explicit_edges) {
        try {
            (void)SpinNetwork(n, c.network.edges);
        } catch (const std::invalid_argument& e) {
            throw ConfigError("network.edges", e.what());
        }
    }
}

inline ExperimentConfig parse_config_json(const nlohmann::json& doc) {
    using detail::ObjectReader;
    ObjectReader top(doc, "");
    ExperimentConfig c;

    c.network = detail::parse_network(top.at("network"));

    if (top.has("partition")) {
        ObjectReader r(top.at("partition"), "partition");
        const auto kind = r.get<std::string>("kind", "half");
        if (kind == "explicit") c.partition.labels = r.require<std::string>("labels");
        else if (kind != "half") throw ConfigError("partition.kind", "expected half|explicit");
        c.partition.allow_degenerate = r.get<bool>("allow_degenerate", false);
        r.finish();
    }
    {
        ObjectReader r(top.at("protocol"), "protocol");
        c.protocol.g_t1 = r.get<double>("gT1", kHalfPi);
        c.protocol.t1_over_t = r.get<double>("T1_over_T", 0.5);
        c.protocol.eps_a = r.require<double>("eps_A");
        c.protocol.eps_b = r.require<double>("eps_B");
        c.protocol.allow_g_t1_override = r.get<bool>("allow_gT1_override", false);
        r.finish();
    }
    if (top.has("disorder")) {
        ObjectReader r(top.at("disorder"), "disorder");
        c.disorder.wt = r.get<double>("WT", 0.0);
        const auto bounds = r.get<std::string>("bounds", "positive");
        try {
            c.disorder.bounds = disorder_bounds_from_string(bounds);
        } catch (const std::invalid_argument& e) {
            throw ConfigError("disorder.bounds", e.what());
        }
        r.finish();
    }
    if (top.has("initial_state")) {
        ObjectReader r(top.at("initial_state"), "initial_state");
        const auto kind = r.get<std::string>("kind", "polarized");
        if (kind == "tilted") {
            c.initial_state.kind = InitialStateKind::tilted;
            c.initial_state.theta = r.require<double>("theta");
        } else if (kind != "polarized") {
            throw ConfigError("initial_state.kind", "expected polarized|tilted");
        }
        r.finish();
    }
    {
        ObjectReader r(top.at("schedule"), "schedule");
        c.schedule.n_periods = r.require<std::uint64_t>("n_periods");
        c.schedule.record_stride = r.get<std::uint64_t>("record_stride", 1);
        r.finish();
    }
    if (top.has("ensemble")) {
        ObjectReader r(top.at("ensemble"), "ensemble");
        c.ensemble.realizations = r.get<std::uint64_t>("realizations", 1);
        c.ensemble.master_seed = r.get<std::uint64_t>("master_seed", 0);
        c.ensemble.store_realizations = r.get<bool>("store_realizations", false);
        r.finish();
    }
    if (top.has("observables")) {
        const auto& obs = top.at("observables");
        if (!obs.is_array()) throw ConfigError("observables", "expected an array of names");
        c.observables = {false, false};
        for (const auto& name : obs) {
            const auto s = ObjectReader::convert<std::string>(name, "observables");
            if (s == "regional") c.observables.regional = true;
            else if (s == "entropy") c.observables.entropy = true;
            else if (s != "local") throw ConfigError("observables", "unknown observable '" + s + "' (local|regional|entropy)");
        }
    }
    if (top.has("output")) {
        ObjectReader r(top.at("output"), "output");
        c.output_path = r.get<std::string>("path", "out");
        r.finish();
    }
    top.finish();
    validate(c);
    return c;
}

inline ExperimentConfig parse_config(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("", std::string("malformed JSON: ") + e.what());
    }
    return parse_config_json(doc);
}

inline nlohmann::json to_json(const ExperimentConfig& c) {
    nlohmann::json partition = c.partition.labels.empty()
                                   ? nlohmann::json{{"kind", "half"}}
                                   : nlohmann::json{{"kind", "explicit"}, {"labels", c.partition.labels}};
    partition["allow_degenerate"] = c.partition.allow_degenerate;
    nlohmann::json initial = c.initial_state.kind == InitialStateKind::polarized
                                 ? nlohmann::json{{"kind", "polarized"}}
                                 : nlohmann::json{{"kind", "tilted"}, {"theta", c.initial_state.theta}};
    nlohmann::json observables = nlohmann::json::array({"local"});
    if (c.observables.regional) observables.push_back("regional");
    if (c.observables.entropy) observables.push_back("entropy");
    return {
        {"network", detail::network_to_json(c.network)},
        {"partition", partition},
        {"protocol",
         {{"gT1", c.protocol.g_t1},
          {"T1_over_T", c.protocol.t1_over_t},
          {"eps_A", c.protocol.eps_a},
          {"eps_B", c.protocol.eps_b},
          {"allow_gT1_override", c.protocol.allow_g_t1_override}}},
        {"disorder", {{"WT", c.disorder.wt}, {"bounds", to_string(c.disorder.bounds)}}},
        {"initial_state", initial},
        {"schedule", {{"n_periods", c.schedule.n_periods}, {"record_stride", c.schedule.record_stride}}},
        {"ensemble",
         {{"realizations", c.ensemble.realizations},
          {"master_seed", c.ensemble.master_seed},
          {"store_realizations", c.ensemble.store_realizations}}},
        {"observables", observables},
        {"output", {{"path", c.output_path}}},
    };
}

inline SpinNetwork build_network(const NetworkConfig& c) {
    switch (c.builder) {
        case NetworkBuilder::power_law: return build_power_law_chain(c.n_sites, c.j0t / kDrivePeriod, c.alpha);
        case NetworkBuilder::ladder: return build_ladder(c.n_rungs, c.jt / kDrivePeriod);
        case NetworkBuilder::explicit_edges: {
            auto edges = c.edges;
            for (Edge& e : edges) e.coupling /= kDrivePeriod;
            return SpinNetwork(c.n_sites, std::move(edges));
        }
    }
    throw std::logic_error("unreachable network builder");
}

inline RegionPartition build_partition(const ExperimentConfig& c) {
    return c.partition.labels.empty() ? half_partition(c.network.n_sites)
                                      : RegionPartition::from_labels(c.partition.labels, c.partition.allow_degenerate);
}

inline DriveProtocol build_protocol(const ProtocolConfig& p) {
    const double t1 = p.t1_over_t * kDrivePeriod;
    return DriveProtocol::custom(p.g_t1 / t1, t1, kDrivePeriod - t1, p.eps_a, p.eps_b);
}

inline StateVector build_initial_state(const ExperimentConfig& c) {
    return c.initial_state.kind == InitialStateKind::polarized ? prepare_polarized(c.network.n_sites)
                                                               : prepare_tilted(c.network.n_sites, c.initial_state.theta);
}

}  // namespace chimera
