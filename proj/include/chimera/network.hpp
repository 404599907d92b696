#pragma once

// Spin networks: weighted coupling graphs, A/B region partitions and
// quenched on-site disorder.
//
// Couplings and fields are stored in inverse-time units with the drive period
// fixed to T = 1, so a stored value J equals the dimensionless product JT.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace chimera {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kDrivePeriod = 1.0;
inline constexpr std::size_t kMaxSites = 30;

struct Edge {
    std::size_t l = 0;
    std::size_t m = 0;
    double coupling = 0.0;

    friend bool operator==(const Edge&, const Edge&) = default;
};

class SpinNetwork {
public:
    SpinNetwork() = default;

    // Validates l < m, bounds, uniqueness and finiteness; edges are kept sorted by (l, m).
    SpinNetwork(std::size_t n_sites, std::vector<Edge> edges) : n_sites_(n_sites), edges_(std::move(edges)) {
        if (n_sites_ == 0) throw std::invalid_argument("SpinNetwork: n_sites must be positive");
        if (n_sites_ > kMaxSites) throw std::invalid_argument("SpinNetwork: too many sites for a dense state vector");
        std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
            return a.l != b.l ? a.l < b.l : a.m < b.m;
        });
        couplings_.assign(n_sites_ * n_sites_, 0.0);
        for (std::size_t k = 0; k < edges_.size(); ++k) {
            const Edge& e = edges_[k];
            if (e.l >= e.m) throw std::invalid_argument("SpinNetwork: edge requires l < m");
            if (e.m >= n_sites_) throw std::invalid_argument("SpinNetwork: edge index out of range");
            if (!std::isfinite(e.coupling)) throw std::invalid_argument("SpinNetwork: non-finite coupling");
            if (k > 0 && edges_[k - 1].l == e.l && edges_[k - 1].m == e.m)
                throw std::invalid_argument("SpinNetwork: duplicate edge");
            couplings_[e.l * n_sites_ + e.m] = e.coupling;
            couplings_[e.m * n_sites_ + e.l] = e.coupling;
        }
    }

    std::size_t n_sites() const noexcept { return n_sites_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }

    // Symmetric lookup; zero for absent pairs and for l == m.
    double coupling(std::size_t l, std::size_t m) const {
        if (l >= n_sites_ || m >= n_sites_) throw std::out_of_range("SpinNetwork::coupling");
        return couplings_[l * n_sites_ + m];
    }

    friend bool operator==(const SpinNetwork& a, const SpinNetwork& b) {
        return a.n_sites_ == b.n_sites_ && a.edges_ == b.edges_;
    }

private:
    std::size_t n_sites_ = 0;
    std::vector<Edge> edges_;
    std::vector<double> couplings_;
};

// Power-law exponent. Infinity is its own state rather than a float sentinel.
class RangeExponent {
public:
    static RangeExponent finite(double alpha) {
        if (!(alpha >= 0.0) || !std::isfinite(alpha))
            throw std::invalid_argument("RangeExponent: alpha must be finite and >= 0");
        return RangeExponent(alpha, false);
    }
    static RangeExponent infinite() { return RangeExponent(0.0, true); }

    bool is_infinite() const noexcept { return infinite_; }
    double value() const noexcept { return infinite_ ? std::numeric_limits<double>::infinity() : alpha_; }

    friend bool operator==(const RangeExponent&, const RangeExponent&) = default;

private:
    RangeExponent(double a, bool inf) : alpha_(a), infinite_(inf) {}
    double alpha_ = 0.0;
    bool infinite_ = false;
};

// J(l, m) = J0 / |l - m|^alpha on an open chain.
inline SpinNetwork build_power_law_chain(std::size_t n, double j0, RangeExponent alpha) {
    if (n == 0) throw std::invalid_argument("build_power_law_chain: n must be >= 1");
    if (!std::isfinite(j0)) throw std::invalid_argument("build_power_law_chain: J0 must be finite");
    std::vector<Edge> edges;
    for (std::size_t l = 0; l < n; ++l) {
        for (std::size_t m = l + 1; m < n; ++m) {
            const auto distance = static_cast<double>(m - l);
            if (alpha.is_infinite()) {
                if (m == l + 1) edges.push_back({l, m, j0});
            } else {
                edges.push_back({l, m, j0 / std::pow(distance, alpha.value())});
            }
        }
    }
    return SpinNetwork(n, std::move(edges));
}

// Two rails of n_rungs sites. Rail 0 holds sites 0..n_rungs-1, rail 1 holds
// n_rungs..2*n_rungs-1, and rung r joins r with n_rungs + r.
inline SpinNetwork build_ladder(std::size_t n_rungs, double coupling) {
    if (n_rungs < 2) throw std::invalid_argument("build_ladder: need at least two rungs");
    if (!std::isfinite(coupling)) throw std::invalid_argument("build_ladder: coupling must be finite");
    std::vector<Edge> edges;
    for (std::size_t r = 0; r + 1 < n_rungs; ++r) {
        edges.push_back({r, r + 1, coupling});
        edges.push_back({n_rungs + r, n_rungs + r + 1, coupling});
    }
    for (std::size_t r = 0; r < n_rungs; ++r) edges.push_back({r, n_rungs + r, coupling});
    return SpinNetwork(2 * n_rungs, std::move(edges));
}

enum class Region : std::uint8_t { A, B };

class RegionPartition {
public:
    RegionPartition() = default;

    explicit RegionPartition(std::vector<Region> assignment, bool allow_degenerate = false)
        : assignment_(std::move(assignment)) {
        if (assignment_.empty()) throw std::invalid_argument("RegionPartition: empty assignment");
        if (assignment_.size() > kMaxSites) throw std::invalid_argument("RegionPartition: too many sites");
        if (!allow_degenerate && is_degenerate())
            throw std::invalid_argument("RegionPartition: each region needs at least one site");
    }

    // "AABB..." style labels.
    static RegionPartition from_labels(std::string_view labels, bool allow_degenerate = false) {
        std::vector<Region> assignment;
        for (char c : labels) {
            if (c == 'A' || c == 'a') assignment.push_back(Region::A);
            else if (c == 'B' || c == 'b') assignment.push_back(Region::B);
            else throw std::invalid_argument(std::string("RegionPartition: bad label '") + c + "'");
        }
        return RegionPartition(std::move(assignment), allow_degenerate);
    }

    std::size_t n_sites() const noexcept { return assignment_.size(); }
    Region operator[](std::size_t l) const { return assignment_.at(l); }
    const std::vector<Region>& assignment() const noexcept { return assignment_; }

    std::size_t count(Region r) const noexcept {
        return static_cast<std::size_t>(std::count(assignment_.begin(), assignment_.end(), r));
    }
    bool is_degenerate() const noexcept { return count(Region::A) == 0 || count(Region::B) == 0; }
    bool is_equal_halves() const noexcept { return 2 * count(Region::A) == assignment_.size(); }

    std::vector<std::size_t> sites(Region r) const {
        std::vector<std::size_t> out;
        for (std::size_t l = 0; l < assignment_.size(); ++l)
            if (assignment_[l] == r) out.push_back(l);
        return out;
    }

    // Bit l set iff site l belongs to r.
    std::uint64_t mask(Region r) const noexcept {
        std::uint64_t m = 0;
        for (std::size_t l = 0; l < assignment_.size(); ++l)
            if (assignment_[l] == r) m |= std::uint64_t{1} << l;
        return m;
    }

    std::string labels() const {
        std::string s;
        for (Region r : assignment_) s.push_back(r == Region::A ? 'A' : 'B');
        return s;
    }

    friend bool operator==(const RegionPartition&, const RegionPartition&) = default;

private:
    std::vector<Region> assignment_;
};

inline RegionPartition half_partition(std::size_t n) {
    if (n == 0 || n % 2 != 0)
        throw std::invalid_argument("half_partition: n must be even and positive; use an explicit assignment");
    std::vector<Region> assignment(n, Region::B);
    std::fill(assignment.begin(), assignment.begin() + static_cast<std::ptrdiff_t>(n / 2), Region::A);
    return RegionPartition(std::move(assignment));
}

enum class DisorderBounds { symmetric, positive };

inline std::string_view to_string(DisorderBounds b) { return b == DisorderBounds::symmetric ? "symmetric" : "positive"; }

inline DisorderBounds disorder_bounds_from_string(std::string_view s) {
    if (s == "symmetric") return DisorderBounds::symmetric;
    if (s == "positive") return DisorderBounds::positive;
    throw std::invalid_argument("unknown disorder bounds '" + std::string(s) + "' (expected symmetric|positive)");
}

struct DisorderField {
    std::vector<double> values;
    double strength = 0.0;
    DisorderBounds bounds = DisorderBounds::positive;
    std::uint64_t seed = 0;

    std::size_t n_sites() const noexcept { return values.size(); }
    friend bool operator==(const DisorderField&, const DisorderField&) = default;
};

inline DisorderField zero_disorder(std::size_t n) { return DisorderField{std::vector<double>(n, 0.0), 0.0, DisorderBounds::positive, 0}; }

// Uniform on [0, W] (positive) or [-W, W] (symmetric). Uses the raw 64-bit
// mt19937_64 stream rather than std::uniform_real_distribution so fields are
// bit-reproducible across standard libraries.
inline DisorderField sample_disorder(std::size_t n, double strength, DisorderBounds bounds, std::uint64_t seed) {
    if (!(strength >= 0.0) || !std::isfinite(strength))
        throw std::invalid_argument("sample_disorder: strength must be finite and >= 0");
    std::mt19937_64 engine(seed);
    DisorderField field{std::vector<double>(n), strength, bounds, seed};
    for (auto& w : field.values) {
        const double u = static_cast<double>(engine() >> 11) * 0x1.0p-53;
        w = bounds == DisorderBounds::positive ? strength * u : strength * (2.0 * u - 1.0);
    }
    return field;
}

// Serializable bundle {n_sites, edges:[[l,m,JT],...], partition:[...], disorder:{WT,bounds,seed}}.
// Disorder values are regenerated from the seed on load.
struct NetworkSpec {
    SpinNetwork network;
    RegionPartition partition;
    DisorderField disorder;
};

inline nlohmann::json to_json(const NetworkSpec& spec) {
    nlohmann::json edges = nlohmann::json::array();
    for (const Edge& e : spec.network.edges()) edges.push_back({e.l, e.m, e.coupling * kDrivePeriod});
    nlohmann::json partition = nlohmann::json::array();
    for (Region r : spec.partition.assignment()) partition.push_back(r == Region::A ? "A" : "B");
    return {
        {"n_sites", spec.network.n_sites()},
        {"edges", edges},
        {"partition", partition},
        {"disorder",
         {{"WT", spec.disorder.strength * kDrivePeriod},
          {"bounds", to_string(spec.disorder.bounds)},
          {"seed", spec.disorder.seed}}},
    };
}

inline NetworkSpec network_spec_from_json(const nlohmann::json& j) {
    const auto n = j.at("n_sites").get<std::size_t>();
    std::vector<Edge> edges;
    for (const auto& e : j.at("edges")) {
        if (!e.is_array() || e.size() != 3) throw std::invalid_argument("edges entries must be [l, m, JT]");
        edges.push_back({e[0].get<std::size_t>(), e[1].get<std::size_t>(), e[2].get<double>() / kDrivePeriod});
    }
    std::string labels;
    for (const auto& r : j.at("partition")) labels += r.get<std::string>();
    auto partition = RegionPartition::from_labels(labels, true);
    if (partition.n_sites() != n) throw std::invalid_argument("partition length must equal n_sites");
    const auto& d = j.at("disorder");
    auto disorder = sample_disorder(n, d.at("WT").get<double>() / kDrivePeriod,
                                    disorder_bounds_from_string(d.at("bounds").get<std::string>()),
                                    d.at("seed").get<std::uint64_t>());
    return {SpinNetwork(n, std::move(edges)), std::move(partition), std::move(disorder)};
}

}  // namespace chimera
