#pragma once

// Dense-matrix oracles: the exact Floquet operator, the 2T effective
// Hamiltonians of the high-frequency expansion, and the comparisons between
// them. Every operator here is assembled from Pauli strings, independently of
// the in-place kernels in state.hpp.
//
// Matrices act on the same basis as StateVector: bit l of the index is site l,
// bit value 1 is sigma^z = +1.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "chimera/evolution.hpp"
#include "chimera/network.hpp"
#include "chimera/observables.hpp"
#include "chimera/state.hpp"

namespace chimera {

using DenseMatrix = Eigen::MatrixXcd;

inline constexpr double kHermiticityTolerance = 1e-12;

// Largest site count the dense path accepts unless the caller raises it.
struct DenseGuard {
    std::size_t max_sites = 12;

    void check(std::size_t n, const char* who) const {
        if (n > max_sites)
            throw std::invalid_argument(std::string(who) + ": " + std::to_string(n) + " sites exceeds the dense limit of " +
                                        std::to_string(max_sites));
    }
};

inline double max_abs(const DenseMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

class DenseHermitian {
public:
    DenseHermitian() = default;

    explicit DenseHermitian(DenseMatrix m) : matrix_(std::move(m)) {
        if (matrix_.rows() != matrix_.cols()) throw std::invalid_argument("DenseHermitian: matrix must be square");
        const double asym = max_abs(matrix_ - matrix_.adjoint());
        if (!(asym <= kHermiticityTolerance))
            throw std::invalid_argument("DenseHermitian: matrix is not Hermitian (deviation " + std::to_string(asym) + ")");
    }

    const DenseMatrix& matrix() const noexcept { return matrix_; }
    Eigen::Index dimension() const noexcept { return matrix_.rows(); }

private:
    DenseMatrix matrix_;
};

enum class Pauli : char { x = 'x', y = 'y', z = 'z' };

struct PauliFactor {
    std::size_t site;
    Pauli op;
};

// coefficient * prod_k sigma^{op_k}_{site_k}, added into `out`. Sites must be distinct.
inline void add_pauli_string(DenseMatrix& out, std::size_t n, std::initializer_list<PauliFactor> factors, Complex coefficient) {
    const std::size_t dim = std::size_t{1} << n;
    if (static_cast<std::size_t>(out.rows()) != dim || static_cast<std::size_t>(out.cols()) != dim)
        throw std::invalid_argument("add_pauli_string: matrix dimension mismatch");
    for (std::uint64_t s = 0; s < dim; ++s) {
        std::uint64_t target = s;
        Complex value = coefficient;
        for (const PauliFactor& f : factors) {
            if (f.site >= n) throw std::out_of_range("add_pauli_string: site out of range");
            const bool up = (s >> f.site) & 1U;
            switch (f.op) {
                case Pauli::z: value *= up ? 1.0 : -1.0; break;
                case Pauli::x: target ^= std::uint64_t{1} << f.site; break;
                case Pauli::y:
                    // sigma^y |up> = i |down>, sigma^y |down> = -i |up>
                    target ^= std::uint64_t{1} << f.site;
                    value *= up ? Complex(0.0, 1.0) : Complex(0.0, -1.0);
                    break;
            }
        }
        out(static_cast<Eigen::Index>(target), static_cast<Eigen::Index>(s)) += value;
    }
}

inline DenseMatrix zero_operator(std::size_t n) {
    const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n);
    return DenseMatrix::Zero(dim, dim);
}

inline DenseMatrix pauli_operator(std::size_t n, std::size_t site, Pauli op) {
    DenseMatrix m = zero_operator(n);
    add_pauli_string(m, n, {{site, op}}, 1.0);
    return m;
}

// Diagonal operator with entries f(s).
template <typename F>
DenseMatrix diagonal_operator(std::size_t n, F&& f) {
    DenseMatrix m = zero_operator(n);
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << n); ++s) m(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s)) = f(s);
    return m;
}

// Eigendecomposition of a Hermitian matrix, reused for exp(-i H t) at many t.
class HermitianPropagator {
public:
    explicit HermitianPropagator(const DenseHermitian& h) {
        Eigen::SelfAdjointEigenSolver<DenseMatrix> solver(h.matrix());
        if (solver.info() != Eigen::Success) throw std::runtime_error("HermitianPropagator: eigendecomposition failed");
        energies_ = solver.eigenvalues();
        vectors_ = solver.eigenvectors();
    }

    DenseMatrix unitary(double t) const {
        Eigen::VectorXcd phases(energies_.size());
        for (Eigen::Index k = 0; k < energies_.size(); ++k) phases[k] = std::polar(1.0, -energies_[k] * t);
        return vectors_ * phases.asDiagonal() * vectors_.adjoint();
    }

    StateVector apply(const StateVector& state, double t) const {
        if (static_cast<Eigen::Index>(state.dimension()) != vectors_.rows())
            throw std::invalid_argument("HermitianPropagator: state dimension mismatch");
        Eigen::VectorXcd coeffs = vectors_.adjoint() * as_vector(state);
        for (Eigen::Index k = 0; k < coeffs.size(); ++k) coeffs[k] *= std::polar(1.0, -energies_[k] * t);
        return from_vector(state.n_sites(), vectors_ * coeffs);
    }

    const Eigen::VectorXd& energies() const noexcept { return energies_; }

    static Eigen::VectorXcd as_vector(const StateVector& state) {
        const auto amps = state.amplitudes();
        return Eigen::Map<const Eigen::VectorXcd>(amps.data(), static_cast<Eigen::Index>(amps.size()));
    }
    static StateVector from_vector(std::size_t n, const Eigen::VectorXcd& v) {
        return StateVector(n, std::vector<Complex>(v.data(), v.data() + v.size()));
    }

private:
    Eigen::VectorXd energies_;
    DenseMatrix vectors_;
};

inline DenseMatrix exp_minus_i(const DenseHermitian& h, double t) { return HermitianPropagator(h).unitary(t); }

inline StateVector evolve_dense(const DenseHermitian& h, const StateVector& state, double t) {
    return HermitianPropagator(h).apply(state, t);
}

inline StateVector apply_dense(const DenseMatrix& u, const StateVector& state) {
    if (static_cast<Eigen::Index>(state.dimension()) != u.cols()) throw std::invalid_argument("apply_dense: dimension mismatch");
    return HermitianPropagator::from_vector(state.n_sites(), u * HermitianPropagator::as_vector(state));
}

inline double spectral_norm(const DenseMatrix& m) {
    if (m.size() == 0) return 0.0;
    Eigen::BDCSVD<DenseMatrix> svd(m);
    return svd.singularValues()[0];
}

// min over phi of || U - e^{i phi} V ||_2 for unitaries U, V.
//
// W = V^dagger U is unitary (normal), so ||U - e^{i phi} V|| = max_k |e^{i a_k} - e^{i phi}|
// over the eigenphases a_k of W. The optimum centres phi on the shortest arc that
// covers every eigenphase, giving 2 sin(arc / 4).
inline double global_phase_distance(const DenseMatrix& u, const DenseMatrix& v) {
    if (u.rows() != v.rows() || u.cols() != v.cols() || u.rows() != u.cols())
        throw std::invalid_argument("global_phase_distance: dimension mismatch");
    if (u.size() == 0) return 0.0;
    const DenseMatrix w = v.adjoint() * u;
    Eigen::ComplexEigenSolver<DenseMatrix> solver(w, false);
    std::vector<double> phases;
    phases.reserve(static_cast<std::size_t>(w.rows()));
    for (Eigen::Index k = 0; k < w.rows(); ++k) phases.push_back(std::arg(solver.eigenvalues()[k]));
    std::sort(phases.begin(), phases.end());
    double largest_gap = phases.front() + 2.0 * kPi - phases.back();
    for (std::size_t k = 1; k < phases.size(); ++k) largest_gap = std::max(largest_gap, phases[k] - phases[k - 1]);
    const double arc = std::max(0.0, 2.0 * kPi - largest_gap);
    return 2.0 * std::sin(arc / 4.0);
}

inline double commutator_norm(const DenseMatrix& x, const DenseMatrix& y) {
    if (x.rows() != y.rows() || x.cols() != y.cols() || x.rows() != x.cols())
        throw std::invalid_argument("commutator_norm: dimension mismatch");
    return spectral_norm(x * y - y * x);
}

namespace detail {

inline void check_sizes(const SpinNetwork& network, const DisorderField& disorder, const RegionPartition& partition) {
    if (disorder.n_sites() != network.n_sites() || partition.n_sites() != network.n_sites())
        throw std::invalid_argument("network, disorder and partition sizes differ");
}

// sum over edges with both ends in `region` of J sigma^z sigma^z, times scale.
inline void add_intra_region_ising(DenseMatrix& h, const SpinNetwork& network, const RegionPartition& partition, Region region,
                                   double scale) {
    for (const Edge& e : network.edges())
        if (partition[e.l] == region && partition[e.m] == region)
            add_pauli_string(h, network.n_sites(), {{e.l, Pauli::z}, {e.m, Pauli::z}}, scale * e.coupling);
}

inline void add_region_fields(DenseMatrix& h, const DisorderField& disorder, const RegionPartition& partition, Region region,
                              double scale) {
    for (std::size_t l = 0; l < disorder.n_sites(); ++l)
        if (partition[l] == region) add_pauli_string(h, disorder.n_sites(), {{l, Pauli::z}}, scale * disorder.values[l]);
}

}  // namespace detail

// theta_l(s) = 2 W_l T2 + 2 T2 sum_{m in B} J_lm z_m(s), the B-dependent
// precession angle seen by site l in A.
inline double theta_angle(const SpinNetwork& network, const DisorderField& disorder, const RegionPartition& partition,
                          double t2, std::size_t l, std::uint64_t s) {
    double theta = 2.0 * disorder.values[l] * t2;
    for (std::size_t m = 0; m < network.n_sites(); ++m)
        if (partition[m] == Region::B) theta += 2.0 * t2 * network.coupling(l, m) * spin_z(s, m);
    return theta;
}

// Exact single-period operator exp(-i H2 T2) exp(-i H1 T1).
inline DenseMatrix build_floquet_matrix(const SpinNetwork& network, const DisorderField& disorder, const DriveProtocol& protocol,
                                        const RegionPartition& partition, DenseGuard guard = {}) {
    detail::check_sizes(network, disorder, partition);
    const std::size_t n = network.n_sites();
    guard.check(n, "build_floquet_matrix");

    DenseMatrix h1 = zero_operator(n);
    for (std::size_t l = 0; l < n; ++l) add_pauli_string(h1, n, {{l, Pauli::x}}, protocol.g * (1.0 - protocol.eps(partition[l])));
    DenseMatrix h2 = zero_operator(n);
    for (const Edge& e : network.edges()) add_pauli_string(h2, n, {{e.l, Pauli::z}, {e.m, Pauli::z}}, e.coupling);
    for (std::size_t l = 0; l < n; ++l) add_pauli_string(h2, n, {{l, Pauli::z}}, disorder.values[l]);

    return exp_minus_i(DenseHermitian(std::move(h2)), protocol.t2) * exp_minus_i(DenseHermitian(std::move(h1)), protocol.t1);
}

// Which printed prefactors to use for the region-A terms of the full 2T
// effective Hamiltonian. `period_weighted` carries explicit T2/T factors;
// `equal_split` uses the fixed 1/2 and pi eps_A / 4 of the T1 = T2 shorthand.
enum class EffectiveForm { period_weighted, equal_split };

// H_B = (T2/T) [ sum_{B pairs} J sigma^z sigma^z + sum_{l in B} W_l sigma^z ].
inline DenseHermitian build_h_b(const SpinNetwork& network, const DisorderField& disorder, const DriveProtocol& protocol,
                                const RegionPartition& partition, EffectiveForm form = EffectiveForm::period_weighted) {
    detail::check_sizes(network, disorder, partition);
    const double scale = form == EffectiveForm::period_weighted ? protocol.t2 / protocol.period() : 0.5;
    DenseMatrix h = zero_operator(network.n_sites());
    detail::add_intra_region_ising(h, network, partition, Region::B, scale);
    detail::add_region_fields(h, disorder, partition, Region::B, scale);
    return DenseHermitian(std::move(h));
}

// Full 2T effective Hamiltonian for eps_B = 1:
//   (T2/T) sum_{A pairs} J zz  -  (pi eps_A T2 / 2T) sum_{l != m in A} J_lm z_l y_m
//   - (pi eps_A / 4T) sum_{l in A} [ (cos theta_l + 1) x_l + sin theta_l y_l ]  +  H_B
// with cos/sin of the diagonal operator theta_l evaluated entrywise.
inline DenseHermitian build_h_eff_full(const SpinNetwork& network, const DisorderField& disorder, const DriveProtocol& protocol,
                                       const RegionPartition& partition, EffectiveForm form = EffectiveForm::period_weighted,
                                       DenseGuard guard = {}) {
    detail::check_sizes(network, disorder, partition);
    if (std::abs(protocol.eps_b - 1.0) > 1e-12) throw std::invalid_argument("build_h_eff_full: requires eps_B = 1");
    const std::size_t n = network.n_sites();
    guard.check(n, "build_h_eff_full");
    const double period = protocol.period();
    const double eps = protocol.eps_a;
    const bool weighted = form == EffectiveForm::period_weighted;

    DenseMatrix h = build_h_b(network, disorder, protocol, partition, form).matrix();
    detail::add_intra_region_ising(h, network, partition, Region::A, weighted ? protocol.t2 / period : 0.5);

    if (eps != 0.0) {
        const double zy_scale = weighted ? kPi * eps * protocol.t2 / (2.0 * period) : kPi * eps / 4.0;
        for (const Edge& e : network.edges()) {
            if (partition[e.l] != Region::A || partition[e.m] != Region::A) continue;
            add_pauli_string(h, n, {{e.l, Pauli::z}, {e.m, Pauli::y}}, -zy_scale * e.coupling);
            add_pauli_string(h, n, {{e.m, Pauli::z}, {e.l, Pauli::y}}, -zy_scale * e.coupling);
        }

        // theta_l does not depend on bit l, so cos/sin(theta_l) commute with x_l, y_l.
        const double field = kPi * eps / (4.0 * period);
        const std::size_t dim = std::size_t{1} << n;
        for (std::size_t l = 0; l < n; ++l) {
            if (partition[l] != Region::A) continue;
            const std::uint64_t bit = std::uint64_t{1} << l;
            for (std::uint64_t s = 0; s < dim; ++s) {
                const double theta = theta_angle(network, disorder, partition, protocol.t2, l, s);
                const bool up = s & bit;
                const Complex y_factor = up ? Complex(0.0, 1.0) : Complex(0.0, -1.0);
                const Complex value = -field * ((std::cos(theta) + 1.0) + std::sin(theta) * y_factor);
                h(static_cast<Eigen::Index>(s ^ bit), static_cast<Eigen::Index>(s)) += value;
            }
        }
    }
    return DenseHermitian(std::move(h));
}

// Exact eps_A = 0, eps_B = 1 generator: (T2/T)(A-pair Ising + B-pair Ising + B fields).
// A-B couplings and A fields drop out.
inline DenseHermitian build_h_eff_decoupled(const SpinNetwork& network, const DisorderField& disorder, const DriveProtocol& protocol,
                                            const RegionPartition& partition, DenseGuard guard = {}) {
    detail::check_sizes(network, disorder, partition);
    guard.check(network.n_sites(), "build_h_eff_decoupled");
    const double scale = protocol.t2 / protocol.period();
    DenseMatrix h = zero_operator(network.n_sites());
    detail::add_intra_region_ising(h, network, partition, Region::A, scale);
    detail::add_intra_region_ising(h, network, partition, Region::B, scale);
    detail::add_region_fields(h, disorder, partition, Region::B, scale);
    return DenseHermitian(std::move(h));
}

inline constexpr double kSmallErrorLimit = 0.2;

// Effective Hamiltonian for eps_A, eps_B << 1:
//   (T2/T) sum_{pairs} J zz - sum_l (pi eps_{R(l)} / 4T) [ (1 + cos 2 W_l T2) x_l + sin(2 W_l T2) y_l ].
// Fields cancel over two periods because every site is flipped.
inline DenseHermitian build_h_eff_small_errors(const SpinNetwork& network, const DisorderField& disorder,
                                               const DriveProtocol& protocol, const RegionPartition& partition,
                                               DenseGuard guard = {}, bool* outside_validity = nullptr) {
    detail::check_sizes(network, disorder, partition);
    const std::size_t n = network.n_sites();
    guard.check(n, "build_h_eff_small_errors");
    if (outside_validity) *outside_validity = protocol.eps_a > kSmallErrorLimit || protocol.eps_b > kSmallErrorLimit;
    const double period = protocol.period();

    DenseMatrix h = zero_operator(n);
    for (const Edge& e : network.edges())
        add_pauli_string(h, n, {{e.l, Pauli::z}, {e.m, Pauli::z}}, protocol.t2 / period * e.coupling);
    for (std::size_t l = 0; l < n; ++l) {
        const double scale = kPi * protocol.eps(partition[l]) / (4.0 * period);
        if (scale == 0.0) continue;
        const double phase = 2.0 * disorder.values[l] * protocol.t2;
        add_pauli_string(h, n, {{l, Pauli::x}}, -scale * (1.0 + std::cos(phase)));
        add_pauli_string(h, n, {{l, Pauli::y}}, -scale * std::sin(phase));
    }
    return DenseHermitian(std::move(h));
}

// eps_A pi (1 + <cos theta>) / (2 J0 T), the region-A field-to-coupling ratio.
inline double delta_x(double eps_a, double j0t, double cos_theta_mean) {
    if (j0t == 0.0 || !std::isfinite(j0t)) throw std::invalid_argument("delta_x: coupling J0T must be non-zero");
    return eps_a * kPi * (1.0 + cos_theta_mean) / (2.0 * j0t);
}

// pi eps / (4 J0 T2), the per-region ratio of the small-error regime.
inline double delta_x_small_errors(double eps, double j0, double t2) {
    if (j0 == 0.0 || !std::isfinite(j0) || !(t2 > 0.0)) throw std::invalid_argument("delta_x_small_errors: need J0 != 0 and T2 > 0");
    return kPi * eps / (4.0 * j0 * t2);
}

// Average of cos theta_l over l in A and over B configurations weighted by
// |amplitude|^2 of `state`. Averaging this across realizations estimates the
// ensemble <cos theta> entering delta_x.
inline double mean_cos_theta(const SpinNetwork& network, const DisorderField& disorder, const RegionPartition& partition,
                             const DriveProtocol& protocol, const StateVector& state) {
    detail::check_sizes(network, disorder, partition);
    if (state.n_sites() != network.n_sites()) throw std::invalid_argument("mean_cos_theta: state size mismatch");
    const auto a_sites = partition.sites(Region::A);
    if (a_sites.empty()) throw std::invalid_argument("mean_cos_theta: region A is empty");
    double total = 0.0;
    const auto amps = state.amplitudes();
    for (std::size_t l : a_sites) {
        double site = 0.0;
        for (std::uint64_t s = 0; s < amps.size(); ++s) {
            const double p = std::norm(amps[s]);
            if (p != 0.0) site += p * std::cos(theta_angle(network, disorder, partition, protocol.t2, l, s));
        }
        total += site;
    }
    return total / static_cast<double>(a_sites.size());
}

struct EffectiveReport {
    double operator_distance = 0.0;
    double trajectory_deviation = 0.0;
    double commutator_h_b = 0.0;
    double commutator_sigma_z_b_max = 0.0;
    std::vector<double> commutator_norms;  // [H_B, H], then [sigma^z_l, H] for l in B
    nlohmann::json params;
};

inline nlohmann::json to_json(const EffectiveReport& r) {
    return {
        {"operator_distance", r.operator_distance},
        {"trajectory_deviation", r.trajectory_deviation},
        {"commutators", {{"h_b", r.commutator_h_b}, {"sigma_z_b_max", r.commutator_sigma_z_b_max}}},
        {"params", r.params},
    };
}

// Compares F^2 with exp(-2iT H_eff) as operators and along the 2T-stroboscopic
// magnetization trajectory of `initial` over `horizon` periods.
inline EffectiveReport validate_effective(const SpinNetwork& network, const DisorderField& disorder, const DriveProtocol& protocol,
                                          const RegionPartition& partition, const StateVector& initial,
                                          std::uint64_t horizon, DenseGuard guard = {}) {
    detail::check_sizes(network, disorder, partition);
    guard.check(network.n_sites(), "validate_effective");
    if (initial.n_sites() != network.n_sites()) throw std::invalid_argument("validate_effective: state size mismatch");

    const DenseMatrix floquet = build_floquet_matrix(network, disorder, protocol, partition, guard);
    const DenseMatrix floquet2 = floquet * floquet;
    const DenseHermitian h_eff = build_h_eff_full(network, disorder, protocol, partition, EffectiveForm::period_weighted, guard);
    const DenseMatrix u_eff = exp_minus_i(h_eff, 2.0 * protocol.period());

    EffectiveReport report;
    report.operator_distance = global_phase_distance(floquet2, u_eff);

    StateVector exact = initial;
    StateVector approx = initial;
    for (std::uint64_t k = 0; k < horizon / 2; ++k) {
        exact = apply_dense(floquet2, exact);
        approx = apply_dense(u_eff, approx);
        const auto m_exact = local_magnetizations(exact);
        const auto m_approx = local_magnetizations(approx);
        for (std::size_t l = 0; l < m_exact.size(); ++l)
            report.trajectory_deviation = std::max(report.trajectory_deviation, std::abs(m_exact[l] - m_approx[l]));
    }

    const std::size_t n = network.n_sites();
    report.commutator_h_b = commutator_norm(build_h_b(network, disorder, protocol, partition).matrix(), h_eff.matrix());
    report.commutator_norms.push_back(report.commutator_h_b);
    for (std::size_t l : partition.sites(Region::B)) {
        const double c = commutator_norm(pauli_operator(n, l, Pauli::z), h_eff.matrix());
        report.commutator_norms.push_back(c);
        report.commutator_sigma_z_b_max = std::max(report.commutator_sigma_z_b_max, c);
    }

    report.params = {
        {"n_sites", n},           {"eps_A", protocol.eps_a},  {"eps_B", protocol.eps_b}, {"gT1", protocol.g * protocol.t1},
        {"T1_over_T", protocol.t1 / protocol.period()},       {"horizon", horizon},
        {"partition", partition.labels()},                    {"disorder_seed", disorder.seed},
        {"WT", disorder.strength * kDrivePeriod},
    };
    return report;
}

}  // namespace chimera
