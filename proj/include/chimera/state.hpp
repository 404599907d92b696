#pragma once

// Dense state vectors over the 2^N computational basis and the two in-place
// kernels that make up a drive period.
//
// Layout: basis index s carries site l in bit l (site 0 is the least
// significant bit). Bit value 1 means sigma^z = +1, bit value 0 means -1.

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "chimera/network.hpp"

namespace chimera {

using Complex = std::complex<double>;

// +1 if bit l of s is set, -1 otherwise.
constexpr int spin_z(std::uint64_t s, std::size_t l) noexcept { return ((s >> l) & 1U) ? 1 : -1; }

class StateVector {
public:
    StateVector() = default;

    explicit StateVector(std::size_t n_sites) : n_sites_(n_sites) {
        if (n_sites == 0 || n_sites > kMaxSites) throw std::invalid_argument("StateVector: bad site count");
        amplitudes_.assign(std::size_t{1} << n_sites, Complex{});
    }

    StateVector(std::size_t n_sites, std::vector<Complex> amplitudes) : n_sites_(n_sites), amplitudes_(std::move(amplitudes)) {
        if (n_sites == 0 || n_sites > kMaxSites) throw std::invalid_argument("StateVector: bad site count");
        if (amplitudes_.size() != (std::size_t{1} << n_sites))
            throw std::invalid_argument("StateVector: amplitude count must be 2^n_sites");
    }

    std::size_t n_sites() const noexcept { return n_sites_; }
    std::size_t dimension() const noexcept { return amplitudes_.size(); }

    std::span<Complex> amplitudes() noexcept { return amplitudes_; }
    std::span<const Complex> amplitudes() const noexcept { return amplitudes_; }
    Complex& operator[](std::size_t s) { return amplitudes_[s]; }
    const Complex& operator[](std::size_t s) const { return amplitudes_[s]; }

    double norm_squared() const noexcept {
        double sum = 0.0;
        for (const Complex& a : amplitudes_) sum += std::norm(a);
        return sum;
    }
    double norm() const noexcept { return std::sqrt(norm_squared()); }

    void normalize() {
        const double n = norm();
        if (!(n > 0.0) || !std::isfinite(n)) throw std::invalid_argument("StateVector::normalize: zero or non-finite norm");
        for (Complex& a : amplitudes_) a /= n;
    }

    bool all_finite() const noexcept {
        for (const Complex& a : amplitudes_)
            if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) return false;
        return true;
    }

    friend bool operator==(const StateVector&, const StateVector&) = default;

private:
    std::size_t n_sites_ = 0;
    std::vector<Complex> amplitudes_;
};

// Applies exp(-i (phi_l / 2) sigma^x_l) on every site l.
inline void apply_x_rotation_layer(StateVector& state, std::span<const double> angles) {
    if (angles.size() != state.n_sites())
        throw std::invalid_argument("apply_x_rotation_layer: one angle per site required");
    auto amps = state.amplitudes();
    const std::size_t dim = amps.size();
    for (std::size_t l = 0; l < angles.size(); ++l) {
        if (angles[l] == 0.0) continue;
        const double c = std::cos(0.5 * angles[l]);
        const double s = std::sin(0.5 * angles[l]);
        const std::size_t bit = std::size_t{1} << l;
        for (std::size_t block = 0; block < dim; block += 2 * bit) {
            for (std::size_t i = block; i < block + bit; ++i) {
                const Complex a0 = amps[i];
                const Complex a1 = amps[i + bit];
                // c*a - i*s*b, written out to avoid complex multiplies
                amps[i] = {c * a0.real() + s * a1.imag(), c * a0.imag() - s * a1.real()};
                amps[i + bit] = {c * a1.real() + s * a0.imag(), c * a1.imag() - s * a0.real()};
            }
        }
    }
}

// E(s) = sum_{l<m} J_lm z_l z_m + sum_l W_l z_l for every basis state.
inline std::vector<double> ising_energies(const SpinNetwork& network, const DisorderField& disorder) {
    const std::size_t n = network.n_sites();
    if (disorder.n_sites() != n) throw std::invalid_argument("ising_energies: disorder size mismatch");
    const std::size_t dim = std::size_t{1} << n;
    std::vector<double> energies(dim);
    for (std::uint64_t s = 0; s < dim; ++s) {
        double e = 0.0;
        for (const Edge& edge : network.edges()) e += edge.coupling * spin_z(s, edge.l) * spin_z(s, edge.m);
        for (std::size_t l = 0; l < n; ++l) e += disorder.values[l] * spin_z(s, l);
        energies[s] = e;
    }
    return energies;
}

// exp(-i t E(s)) for every basis state.
inline std::vector<Complex> diagonal_phases(const SpinNetwork& network, const DisorderField& disorder, double t) {
    auto energies = ising_energies(network, disorder);
    std::vector<Complex> phases(energies.size());
    for (std::size_t s = 0; s < energies.size(); ++s) phases[s] = std::polar(1.0, -t * energies[s]);
    return phases;
}

inline void apply_phases(StateVector& state, std::span<const Complex> phases) {
    if (phases.size() != state.dimension()) throw std::invalid_argument("apply_phases: dimension mismatch");
    auto amps = state.amplitudes();
    for (std::size_t s = 0; s < amps.size(); ++s) amps[s] *= phases[s];
}

inline void apply_diagonal_phase(StateVector& state, const SpinNetwork& network, const DisorderField& disorder, double t2) {
    if (network.n_sites() != state.n_sites()) throw std::invalid_argument("apply_diagonal_phase: site count mismatch");
    apply_phases(state, diagonal_phases(network, disorder, t2));
}

inline StateVector prepare_polarized(std::size_t n) {
    StateVector state(n);
    state[state.dimension() - 1] = 1.0;
    return state;
}

inline StateVector prepare_tilted(std::size_t n, double theta) {
    StateVector state = prepare_polarized(n);
    const std::vector<double> angles(n, theta);
    apply_x_rotation_layer(state, angles);
    return state;
}

inline double local_magnetization(const StateVector& state, std::size_t l) {
    if (l >= state.n_sites()) throw std::out_of_range("local_magnetization: site index out of range");
    double m = 0.0;
    const auto amps = state.amplitudes();
    for (std::uint64_t s = 0; s < amps.size(); ++s) m += spin_z(s, l) * std::norm(amps[s]);
    return m;
}

// All <sigma^z_l> in one sweep, fixed summation order.
inline std::vector<double> local_magnetizations(const StateVector& state) {
    const std::size_t n = state.n_sites();
    std::vector<double> m(n, 0.0);
    const auto amps = state.amplitudes();
    for (std::uint64_t s = 0; s < amps.size(); ++s) {
        const double p = std::norm(amps[s]);
        for (std::size_t l = 0; l < n; ++l) m[l] += ((s >> l) & 1U) ? p : -p;
    }
    return m;
}

}  // namespace chimera
