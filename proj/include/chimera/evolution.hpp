#pragma once

// Two-step Floquet drive: a region-dependent sigma^x rotation for T1 followed
// by the Ising + disorder phase for T2.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "chimera/errors.hpp"
#include "chimera/network.hpp"
#include "chimera/observables.hpp"
#include "chimera/state.hpp"

namespace chimera {

struct DriveProtocol {
    double g = 0.0;   // drive amplitude, inverse time
    double t1 = 0.0;  // rotation step duration
    double t2 = 0.0;  // Ising step duration
    double eps_a = 0.0;
    double eps_b = 0.0;

    // Validates durations and error ranges; any g is accepted.
    static DriveProtocol custom(double g, double t1, double t2, double eps_a, double eps_b) {
        if (!(t1 > 0.0) || !(t2 > 0.0) || !std::isfinite(t1) || !std::isfinite(t2))
            throw std::invalid_argument("DriveProtocol: T1 and T2 must be positive");
        if (!std::isfinite(g)) throw std::invalid_argument("DriveProtocol: g must be finite");
        for (double e : {eps_a, eps_b})
            if (!(e >= 0.0 && e <= 1.0)) throw std::invalid_argument("DriveProtocol: rotation errors must lie in [0, 1]");
        return {g, t1, t2, eps_a, eps_b};
    }

    // g T1 = pi/2 with T = 1 split as T1 = t1_fraction, T2 = 1 - t1_fraction.
    static DriveProtocol standard(double eps_a, double eps_b, double t1_fraction = 0.5) {
        if (!(t1_fraction > 0.0 && t1_fraction < 1.0)) throw std::invalid_argument("DriveProtocol: T1/T must lie in (0, 1)");
        const double t1 = t1_fraction * kDrivePeriod;
        return custom(kPi / (2.0 * t1), t1, kDrivePeriod - t1, eps_a, eps_b);
    }

    double period() const noexcept { return t1 + t2; }
    double eps(Region r) const noexcept { return r == Region::A ? eps_a : eps_b; }

    // phi = 2 g (1 - eps) T1; equals pi (1 - eps) when g T1 = pi/2.
    double rotation_angle(Region r) const noexcept { return 2.0 * g * (1.0 - eps(r)) * t1; }

    std::vector<double> rotation_angles(const RegionPartition& partition) const {
        std::vector<double> angles(partition.n_sites());
        for (std::size_t l = 0; l < angles.size(); ++l) angles[l] = rotation_angle(partition[l]);
        return angles;
    }
};

// One realization's Floquet operator with its phase table precomputed.
class FloquetStepper {
public:
    FloquetStepper(const DriveProtocol& protocol, const SpinNetwork& network, const DisorderField& disorder,
                   const RegionPartition& partition)
        : n_sites_(network.n_sites()) {
        if (partition.n_sites() != n_sites_ || disorder.n_sites() != n_sites_)
            throw std::invalid_argument("FloquetStepper: network, disorder and partition sizes differ");
        angles_ = protocol.rotation_angles(partition);
        phases_ = diagonal_phases(network, disorder, protocol.t2);
    }

    std::size_t n_sites() const noexcept { return n_sites_; }

    void operator()(StateVector& state) const {
        if (state.n_sites() != n_sites_) throw std::invalid_argument("FloquetStepper: state size mismatch");
        apply_x_rotation_layer(state, angles_);
        apply_phases(state, phases_);
    }

private:
    std::size_t n_sites_;
    std::vector<double> angles_;
    std::vector<Complex> phases_;
};

inline void floquet_step(StateVector& state, const DriveProtocol& protocol, const SpinNetwork& network,
                         const DisorderField& disorder, const RegionPartition& partition) {
    FloquetStepper(protocol, network, disorder, partition)(state);
}

struct ObservableSet {
    bool regional = true;
    bool entropy = false;

    friend bool operator==(const ObservableSet&, const ObservableSet&) = default;
};

struct StroboscopicTrace {
    std::size_t n_sites = 0;
    std::vector<std::uint64_t> record_times;
    std::vector<std::vector<double>> local;  // [record][site]
    std::vector<double> m_a, m_b;            // (2/N) normalization, when regional
    std::vector<double> mean_a, mean_b;      // per-region means, when regional and halves unequal
    std::vector<double> entropy_b;           // when entropy

    std::size_t size() const noexcept { return record_times.size(); }
    bool has_regional() const noexcept { return !m_a.empty(); }
    bool has_region_means() const noexcept { return !mean_a.empty(); }
    bool has_entropy() const noexcept { return !entropy_b.empty(); }

    friend bool operator==(const StroboscopicTrace&, const StroboscopicTrace&) = default;
};

inline constexpr double kNormTolerance = 1e-9;

// Applies the Floquet step n_periods times, recording at every multiple of
// record_stride. The initial state is not recorded.
inline StroboscopicTrace evolve_record(StateVector& state, const DriveProtocol& protocol, const SpinNetwork& network,
                                       const DisorderField& disorder, const RegionPartition& partition,
                                       std::uint64_t n_periods, std::uint64_t record_stride,
                                       const ObservableSet& observables = {}) {
    if (n_periods < 1) throw std::invalid_argument("evolve_record: n_periods must be >= 1");
    if (record_stride < 1) throw std::invalid_argument("evolve_record: record_stride must be >= 1");
    if (state.n_sites() != network.n_sites()) throw std::invalid_argument("evolve_record: state size mismatch");

    const FloquetStepper step(protocol, network, disorder, partition);
    std::optional<EntropyMeter> entropy;
    if (observables.entropy) entropy.emplace(partition);
    const bool region_means = observables.regional && !partition.is_equal_halves();

    StroboscopicTrace trace;
    trace.n_sites = state.n_sites();
    const std::size_t n_records = static_cast<std::size_t>(n_periods / record_stride);
    trace.record_times.reserve(n_records);
    trace.local.reserve(n_records);

    for (std::uint64_t n = 1; n <= n_periods; ++n) {
        step(state);
        if (n % record_stride != 0) continue;
        const double norm2 = state.norm_squared();
        if (!std::isfinite(norm2))
            throw NumericalError("non-finite amplitude after period " + std::to_string(n));
        auto local = local_magnetizations(state);
        trace.record_times.push_back(n);
        if (observables.regional) {
            const auto regional = regional_magnetization(local, partition);
            trace.m_a.push_back(regional.m_a);
            trace.m_b.push_back(regional.m_b);
            if (region_means) {
                trace.mean_a.push_back(regional.mean_a);
                trace.mean_b.push_back(regional.mean_b);
            }
        }
        if (entropy) trace.entropy_b.push_back((*entropy)(state));
        trace.local.push_back(std::move(local));
    }
    const double drift = std::abs(state.norm() - 1.0);
    if (!(drift <= kNormTolerance))
        throw NumericalError("norm drifted by " + std::to_string(drift) + " over " + std::to_string(n_periods) + " periods");
    return trace;
}

// 17 significant digits, locale independent.
inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

// Header: n,site_0,...,site_{N-1}[,M_A,M_B][,S_B][,mean_A,mean_B]
inline void write_trace_csv(std::ostream& out, const StroboscopicTrace& trace) {
    out << 'n';
    for (std::size_t l = 0; l < trace.n_sites; ++l) out << ",site_" << l;
    if (trace.has_regional()) out << ",M_A,M_B";
    if (trace.has_entropy()) out << ",S_B";
    if (trace.has_region_means()) out << ",mean_A,mean_B";
    out << '\n';
    for (std::size_t k = 0; k < trace.size(); ++k) {
        out << trace.record_times[k];
        for (double m : trace.local[k]) out << ',' << format_double(m);
        if (trace.has_regional()) out << ',' << format_double(trace.m_a[k]) << ',' << format_double(trace.m_b[k]);
        if (trace.has_entropy()) out << ',' << format_double(trace.entropy_b[k]);
        if (trace.has_region_means())
            out << ',' << format_double(trace.mean_a[k]) << ',' << format_double(trace.mean_b[k]);
        out << '\n';
    }
}

}  // namespace chimera
