#include <gtest/gtest.h>

#include <random>

#include "chimera/observables.hpp"
#include "oracle.hpp"

using namespace chimera;

namespace {

StateVector random_state(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    StateVector s(n);
    for (auto& a : s.amplitudes()) a = {gauss(rng), gauss(rng)};
    s.normalize();
    return s;
}

// rho_B by brute-force partial trace: sum over basis states that agree on A.
Eigen::MatrixXcd brute_rho_b(const StateVector& s, const RegionPartition& p) {
    const auto b_sites = p.sites(Region::B);
    const std::uint64_t mask_a = p.mask(Region::A);
    const std::size_t db = std::size_t{1} << b_sites.size();
    auto b_index = [&](std::uint64_t state) {
        std::size_t k = 0;
        for (std::size_t i = 0; i < b_sites.size(); ++i) k |= ((state >> b_sites[i]) & 1U) << i;
        return k;
    };
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(db), static_cast<Eigen::Index>(db));
    for (std::uint64_t x = 0; x < s.dimension(); ++x)
        for (std::uint64_t y = 0; y < s.dimension(); ++y)
            if ((x & mask_a) == (y & mask_a))
                rho(static_cast<Eigen::Index>(b_index(x)), static_cast<Eigen::Index>(b_index(y))) += s[x] * std::conj(s[y]);
    return rho;
}

}  // namespace

TEST(LocalMagnetization, ExplicitSum) {
    const auto s = random_state(4, 1);
    for (std::size_t l = 0; l < 4; ++l) {
        double expected = 0.0;
        for (std::uint64_t x = 0; x < 16; ++x) expected += std::norm(s[x]) * spin_z(x, l);
        EXPECT_NEAR(local_magnetization(s, l), expected, 1e-15);
    }
}

TEST(RegionalMagnetization, Normalizations) {
    const std::vector<double> local{1.0, 0.5, -1.0, 0.0, 0.25, 0.25};
    const auto p = RegionPartition::from_labels("AABBBB");
    const auto r = regional_magnetization(local, p);
    EXPECT_DOUBLE_EQ(r.m_a, 2.0 * 1.5 / 6.0);
    EXPECT_DOUBLE_EQ(r.m_b, 2.0 * -0.5 / 6.0);
    EXPECT_DOUBLE_EQ(r.mean_a, 0.75);
    EXPECT_DOUBLE_EQ(r.mean_b, -0.125);
    const auto up = regional_magnetization(prepare_polarized(6), half_partition(6));
    EXPECT_DOUBLE_EQ(up.m_a, 1.0);
    EXPECT_DOUBLE_EQ(up.m_b, 1.0);
}

TEST(ReducedDensityMatrix, MatchesBrutePartialTrace) {
    for (const char* labels : {"AABB", "ABAB", "BAAB", "ABBBA"}) {
        const auto p = RegionPartition::from_labels(labels);
        const auto s = random_state(p.n_sites(), 7);
        const auto rho = reduced_density_matrix(s, p, Region::B);
        EXPECT_LT((rho.matrix - brute_rho_b(s, p)).cwiseAbs().maxCoeff(), 1e-14) << labels;
        EXPECT_NEAR(rho.trace().real(), 1.0, 1e-14);
        EXPECT_LT((rho.matrix - rho.matrix.adjoint()).cwiseAbs().maxCoeff(), 1e-15);
        EXPECT_GT(rho.eigenvalues().minCoeff(), -1e-14);
    }
}

TEST(Entropy, ProductAndBellStates) {
    const auto p = half_partition(2);
    EXPECT_NEAR(entanglement_entropy(prepare_tilted(2, 0.7), p), 0.0, 1e-14);
    StateVector bell(2);
    bell[0] = bell[3] = 1.0 / std::sqrt(2.0);
    EXPECT_NEAR(entanglement_entropy(bell, p), std::log(2.0), 1e-14);
}

TEST(Entropy, SymmetricForPureStates) {
    for (const char* labels : {"AAB", "ABBBB", "AABABB", "ABBBBBAB"}) {
        const auto p = RegionPartition::from_labels(labels);
        const auto s = random_state(p.n_sites(), 3);
        std::string flipped = labels;
        for (char& c : flipped) c = c == 'A' ? 'B' : 'A';
        const double sb = entanglement_entropy(s, p);
        EXPECT_NEAR(sb, entanglement_entropy(s, RegionPartition::from_labels(flipped)), 1e-12) << labels;
        const double bound = std::log(2.0) * static_cast<double>(std::min(p.count(Region::A), p.count(Region::B)));
        EXPECT_LE(sb, bound + 1e-12);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(brute_rho_b(s, p));
        EXPECT_NEAR(sb, von_neumann_entropy(solver.eigenvalues()), 1e-12);
    }
}

TEST(Entropy, DegeneratePartitionRejected) {
    const auto p = RegionPartition::from_labels("AAA", true);
    EXPECT_THROW(entanglement_entropy(prepare_polarized(3), p), std::invalid_argument);
}

TEST(ReferenceEntropies, Formula) {
    const auto r = reference_entropies(8);
    EXPECT_NEAR(r.thermal, 2.2725887222397811, 1e-12);  // (8 ln2 - 1)/2
    EXPECT_NEAR(r.mbl, 0.69314718055994531, 1e-15);
    EXPECT_THROW(reference_entropies(1), std::invalid_argument);
}

TEST(SubharmonicWeight, Cases) {
    const std::vector<double> alternating{-1, 1, -1, 1, -1, 1};
    EXPECT_DOUBLE_EQ(subharmonic_weight(alternating, 6), 1.0);
    const std::vector<double> constant(6, 0.8);
    EXPECT_DOUBLE_EQ(subharmonic_weight(constant, 6), 0.0);
    const std::vector<double> damped{-0.9, 0.8, -0.7, 0.6};
    EXPECT_DOUBLE_EQ(subharmonic_weight(damped, 4), 0.75);
    EXPECT_DOUBLE_EQ(subharmonic_weight(damped, 2, 2), 0.65);
    EXPECT_THROW(subharmonic_weight(damped, 0), std::invalid_argument);
    EXPECT_THROW(subharmonic_weight(damped, 3, 2), std::invalid_argument);
}

TEST(SubharmonicWeight, FirstDrop) {
    std::vector<double> series;
    for (int n = 0; n < 40; ++n) series.push_back((n % 2 ? 1.0 : -1.0) * (n < 20 ? 0.9 : 0.2));
    EXPECT_EQ(first_subharmonic_drop(series, 10, 0.5), std::optional<std::size_t>(20));
    EXPECT_EQ(first_subharmonic_drop(series, 10, 0.1), std::nullopt);
}

TEST(EnsembleMean, Pointwise) {
    const std::vector<std::vector<double>> r{{1, 2}, {3, 4}, {5, 9}};
    EXPECT_EQ(ensemble_mean(r), (std::vector<double>{3, 5}));
    const std::vector<std::vector<double>> ragged{{1}, {1, 2}};
    EXPECT_THROW(ensemble_mean(ragged), std::invalid_argument);
}
