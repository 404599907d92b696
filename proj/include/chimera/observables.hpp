#pragma once

// Regional magnetizations, bipartite entanglement and period-doubling diagnostics.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "chimera/network.hpp"
#include "chimera/state.hpp"

namespace chimera {

struct RegionalMagnetization {
    double m_a = 0.0;     // (2/N) sum over A
    double m_b = 0.0;     // (2/N) sum over B
    double mean_a = 0.0;  // (1/|A|) sum over A
    double mean_b = 0.0;  // (1/|B|) sum over B
};

inline RegionalMagnetization regional_magnetization(std::span<const double> local, const RegionPartition& partition) {
    if (local.size() != partition.n_sites()) throw std::invalid_argument("regional_magnetization: size mismatch");
    double sum_a = 0.0;
    double sum_b = 0.0;
    for (std::size_t l = 0; l < local.size(); ++l) (partition[l] == Region::A ? sum_a : sum_b) += local[l];
    const auto n = static_cast<double>(local.size());
    const auto na = static_cast<double>(partition.count(Region::A));
    const auto nb = static_cast<double>(partition.count(Region::B));
    return {2.0 * sum_a / n, 2.0 * sum_b / n, na > 0 ? sum_a / na : 0.0, nb > 0 ? sum_b / nb : 0.0};
}

inline RegionalMagnetization regional_magnetization(const StateVector& state, const RegionPartition& partition) {
    if (state.n_sites() != partition.n_sites()) throw std::invalid_argument("regional_magnetization: size mismatch");
    const auto local = local_magnetizations(state);
    return regional_magnetization(local, partition);
}

// Maps each basis index to (kept index, traced index) by compressing the bits
// of each side. Built once per partition and reused for every record.
class BipartiteIndexer {
public:
    BipartiteIndexer(const RegionPartition& partition, Region keep) {
        if (partition.is_degenerate()) throw std::invalid_argument("reduced density matrix needs a non-degenerate partition");
        const std::size_t n = partition.n_sites();
        n_keep_ = partition.count(keep);
        const std::size_t dim = std::size_t{1} << n;
        kept_.resize(dim);
        traced_.resize(dim);
        for (std::uint64_t s = 0; s < dim; ++s) {
            std::uint32_t k = 0, t = 0;
            std::size_t kb = 0, tb = 0;
            for (std::size_t l = 0; l < n; ++l) {
                const std::uint32_t bit = (s >> l) & 1U;
                if (partition[l] == keep) k |= bit << kb++;
                else t |= bit << tb++;
            }
            kept_[s] = k;
            traced_[s] = t;
        }
        n_traced_ = n - n_keep_;
    }

    std::size_t kept_dimension() const noexcept { return std::size_t{1} << n_keep_; }
    std::size_t traced_dimension() const noexcept { return std::size_t{1} << n_traced_; }

    // Amplitudes reshaped to a kept x traced matrix.
    Eigen::MatrixXcd reshape(const StateVector& state) const {
        if (state.dimension() != kept_.size()) throw std::invalid_argument("BipartiteIndexer: state size mismatch");
        Eigen::MatrixXcd psi(static_cast<Eigen::Index>(kept_dimension()), static_cast<Eigen::Index>(traced_dimension()));
        const auto amps = state.amplitudes();
        for (std::size_t s = 0; s < amps.size(); ++s) psi(kept_[s], traced_[s]) = amps[s];
        return psi;
    }

private:
    std::size_t n_keep_ = 0;
    std::size_t n_traced_ = 0;
    std::vector<std::uint32_t> kept_;
    std::vector<std::uint32_t> traced_;
};

struct ReducedDensityMatrix {
    Eigen::MatrixXcd matrix;

    Eigen::VectorXd eigenvalues() const {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(matrix, Eigen::EigenvaluesOnly);
        return solver.eigenvalues();
    }
    Complex trace() const { return matrix.trace(); }
};

inline ReducedDensityMatrix reduced_density_matrix(const StateVector& state, const RegionPartition& partition, Region keep) {
    if (state.n_sites() != partition.n_sites()) throw std::invalid_argument("reduced_density_matrix: size mismatch");
    const BipartiteIndexer indexer(partition, keep);
    const Eigen::MatrixXcd psi = indexer.reshape(state);
    return {psi * psi.adjoint()};
}

inline constexpr double kEigenvalueCutoff = 1e-14;

inline double von_neumann_entropy(const Eigen::VectorXd& spectrum) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < spectrum.size(); ++i) {
        const double p = spectrum[i];
        if (p > kEigenvalueCutoff) s -= p * std::log(p);
    }
    return s;
}

// Reusable S_B evaluator. Diagonalizes whichever Gram matrix of the reshaped
// state is smaller; both share the nonzero spectrum of rho_B.
class EntropyMeter {
public:
    explicit EntropyMeter(const RegionPartition& partition) : indexer_(partition, Region::B) {}

    double operator()(const StateVector& state) const {
        const Eigen::MatrixXcd psi = indexer_.reshape(state);
        const Eigen::MatrixXcd gram = psi.rows() <= psi.cols() ? Eigen::MatrixXcd(psi * psi.adjoint())
                                                              : Eigen::MatrixXcd(psi.adjoint() * psi);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(gram, Eigen::EigenvaluesOnly);
        return von_neumann_entropy(solver.eigenvalues());
    }

private:
    BipartiteIndexer indexer_;
};

inline double entanglement_entropy(const StateVector& state, const RegionPartition& partition) {
    if (state.n_sites() != partition.n_sites()) throw std::invalid_argument("entanglement_entropy: size mismatch");
    return EntropyMeter(partition)(state);
}

struct ReferenceEntropies {
    double thermal = 0.0;  // (N ln2 - 1) / 2
    double mbl = 0.0;      // ln 2
};

inline ReferenceEntropies reference_entropies(std::size_t n) {
    if (n < 2) throw std::invalid_argument("reference_entropies: n must be >= 2");
    const double ln2 = std::log(2.0);
    return {(static_cast<double>(n) * ln2 - 1.0) / 2.0, ln2};
}

// |sum_{k<window} (-1)^k M(offset+k)| / window. One for perfect period-2
// alternation, zero for a constant series over an even window.
inline double subharmonic_weight(std::span<const double> series, std::size_t window, std::size_t offset = 0) {
    if (window == 0) throw std::invalid_argument("subharmonic_weight: empty window");
    if (offset + window > series.size()) throw std::invalid_argument("subharmonic_weight: window exceeds series");
    double sum = 0.0;
    for (std::size_t k = 0; k < window; ++k) sum += (k % 2 == 0 ? 1.0 : -1.0) * series[offset + k];
    return std::abs(sum) / static_cast<double>(window);
}

// Start index of the first non-overlapping window whose weight is below
// threshold, or nullopt if every full window stays at or above it.
inline std::optional<std::size_t> first_subharmonic_drop(std::span<const double> series, std::size_t window, double threshold) {
    if (window == 0) throw std::invalid_argument("first_subharmonic_drop: empty window");
    for (std::size_t offset = 0; offset + window <= series.size(); offset += window)
        if (subharmonic_weight(series, window, offset) < threshold) return offset;
    return std::nullopt;
}

// Pointwise arithmetic mean over realizations, summed in realization order.
inline std::vector<double> ensemble_mean(std::span<const std::vector<double>> realizations) {
    if (realizations.empty()) throw std::invalid_argument("ensemble_mean: no realizations");
    std::vector<double> mean(realizations.front().size(), 0.0);
    for (const auto& r : realizations) {
        if (r.size() != mean.size()) throw std::invalid_argument("ensemble_mean: ragged series");
        for (std::size_t i = 0; i < r.size(); ++i) mean[i] += r[i];
    }
    for (double& v : mean) v /= static_cast<double>(realizations.size());
    return mean;
}

}  // namespace chimera
