// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "chimera.hpp"

using namespace chimera;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances and thresholds.
constexpr double kDecouplingTol = 1e-10;
constexpr double kKernelTol = 1e-12;
constexpr double kConservationTol = 1e-12;
constexpr double kNormDriftTol = 1e-9;
constexpr double kSubharmonicMin = 0.8;
constexpr double kMagnetizationBMin = 0.8;
constexpr double kRabiMeltLevel = 0.5;
constexpr double kStableEnvelopeMin = 0.8;
constexpr double kEntropyTarget = 1.23;
constexpr double kEntropyHalfWidth = 0.25;
constexpr double kReferenceTol = 5e-5;
constexpr double kSubharmonicDrop = 0.5;
constexpr std::size_t kDropWindow = 100;
constexpr double kTrendFraction = 0.9;

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

std::mt19937_64& rng() {
    static std::mt19937_64 engine(0xC41A0);
    return engine;
}

double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }

Outcome decoupling_identity() {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
        const auto net = build_power_law_chain(6, uniform(0.05, 0.3), RangeExponent::finite(1.51));
        const auto dis = sample_disorder(6, uniform(0.0, 2.0 * kPi), DisorderBounds::positive, rng()());
        const auto part = half_partition(6);
        const auto proto = DriveProtocol::standard(0.0, 1.0);
        const DenseMatrix f = build_floquet_matrix(net, dis, proto, part);
        const auto h = build_h_eff_decoupled(net, dis, proto, part);
        worst = std::max(worst, global_phase_distance(f * f, exp_minus_i(h, 2.0 * proto.period())));
    }
    const double secs = seconds_since(t0);
    return {worst < kDecouplingTol && secs < 60.0, "max distance " + fmt(worst) + ", " + fmt(secs, 3) + " s"};
}

Outcome kernel_equivalence() {
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
        const std::size_t n = 1 + static_cast<std::size_t>(k % 4);
        const auto net = build_power_law_chain(n, uniform(0.05, 0.5), RangeExponent::finite(uniform(0.0, 3.0)));
        const auto dis = sample_disorder(n, uniform(0.0, 2.0 * kPi), DisorderBounds::symmetric, rng()());
        std::vector<Region> labels(n);
        for (auto& r : labels) r = uniform(0, 1) < 0.5 ? Region::A : Region::B;
        const RegionPartition part(labels, true);
        const auto proto = DriveProtocol::standard(uniform(0, 1), uniform(0, 1), uniform(0.2, 0.8));
        const DenseMatrix f = build_floquet_matrix(net, dis, proto, part);
        const FloquetStepper step(proto, net, dis, part);
        for (std::uint64_t b = 0; b < (std::uint64_t{1} << n); ++b) {
            StateVector s(n);
            s[b] = 1.0;
            step(s);
            for (std::size_t r = 0; r < s.dimension(); ++r)
                worst = std::max(worst, std::abs(s[r] - f(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(b))));
        }
    }
    return {worst < kKernelTol, "max deviation " + fmt(worst)};
}

Outcome conservation() {
    double drift = 0.0;
    const auto net = build_power_law_chain(8, 0.2, RangeExponent::finite(1.51));
    const auto part = half_partition(8);
    for (int k = 0; k < 3; ++k) {
        const auto dis = sample_disorder(8, 2.0 * kPi, DisorderBounds::positive, rng()());
        auto s = prepare_tilted(8, 0.2 * kPi);
        const auto before = local_magnetizations(s);
        const auto trace = evolve_record(s, DriveProtocol::standard(0.03, 1.0), net, dis, part, 1000, 1);
        for (const auto& row : trace.local)
            for (std::size_t l : part.sites(Region::B)) drift = std::max(drift, std::abs(row[l] - before[l]));
    }
    double comm = 0.0;
    for (int k = 0; k < 5; ++k) {
        const auto n6 = build_power_law_chain(6, uniform(0.05, 0.3), RangeExponent::finite(1.51));
        const auto dis = sample_disorder(6, uniform(0.0, 2.0 * kPi), DisorderBounds::positive, rng()());
        const auto p6 = half_partition(6);
        const auto proto = DriveProtocol::standard(uniform(0.01, 0.1), 1.0);
        const auto h = build_h_eff_full(n6, dis, proto, p6);
        comm = std::max(comm, commutator_norm(build_h_b(n6, dis, proto, p6).matrix(), h.matrix()));
        for (std::size_t l : p6.sites(Region::B)) comm = std::max(comm, commutator_norm(pauli_operator(6, l, Pauli::z), h.matrix()));
    }
    return {drift < kConservationTol && comm < kConservationTol,
            "max <z_B> drift " + fmt(drift) + ", max commutator " + fmt(comm)};
}

Outcome unitarity() {
    const auto net = build_power_law_chain(10, 0.2, RangeExponent::finite(1.51));
    const auto dis = sample_disorder(10, 2.0 * kPi, DisorderBounds::positive, rng()());
    const FloquetStepper step(DriveProtocol::standard(0.03, 0.9), net, dis, half_partition(10));
    auto s = prepare_tilted(10, 0.2 * kPi);
    double drift = 0.0;
    for (int n = 1; n <= 10000; ++n) {
        step(s);
        if (n % 100 == 0) drift = std::max(drift, std::abs(s.norm() - 1.0));
    }
    return {drift < kNormDriftTol, "max norm drift " + fmt(drift)};
}

Outcome chimera_phenomenology() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto mean = run_ensemble(preset("fig1b-strong")).mean;
    const std::span<const double> m_a(mean.m_a.data(), 100);
    bool alternates = true;
    for (std::size_t k = 1; k < 100; ++k) alternates &= m_a[k] * m_a[k - 1] < 0.0;
    const double weight = subharmonic_weight(m_a, 100);
    double min_b = 1.0;
    for (std::size_t k = 0; k < 100; ++k) min_b = std::min(min_b, mean.m_b[k]);
    const double secs = seconds_since(t0);
    return {alternates && weight > kSubharmonicMin && min_b > kMagnetizationBMin && secs < 300.0,
            std::string("sign alternation ") + (alternates ? "yes" : "no") + ", subharmonic weight " + fmt(weight) +
                ", min M_B " + fmt(min_b) + ", " + fmt(secs, 3) + " s"};
}

// |M_A(2nT)| for n = 1..200.
std::vector<double> two_period_envelope(const std::string& name) {
    auto c = preset(name);
    c.schedule = {400, 2};
    const auto mean = run_ensemble(c).mean;
    std::vector<double> env;
    for (double m : mean.m_a) env.push_back(std::abs(m));
    return env;
}

Outcome disorder_stabilization() {
    const auto clean = two_period_envelope("fig2-eps0.1-w0");
    std::optional<std::size_t> melt;
    for (std::size_t k = 0; k < clean.size() && !melt; ++k)
        if (clean[k] < kRabiMeltLevel) melt = k + 1;
    const auto disordered = two_period_envelope("fig2-eps0.03-w2pi");
    const double floor = *std::min_element(disordered.begin(), disordered.end());
    return {melt.has_value() && floor > kStableEnvelopeMin,
            "eps_A=0.1 WT=0 falls below 0.5 at 2T-step " + (melt ? std::to_string(*melt) : std::string("never")) +
                "; eps_A=0.03 WT=2pi envelope min " + fmt(floor)};
}

Outcome entropy_convergence() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto ref = reference_entropies(8);
    bool pass = std::abs(ref.thermal - 2.2726) < kReferenceTol && std::abs(ref.mbl - 0.6931) < kReferenceTol &&
                std::abs(ref.thermal - 2.3) < 0.05 && std::abs(ref.mbl - 0.69) < 0.005;
    std::string detail = "references (" + fmt(ref.thermal, 6) + ", " + fmt(ref.mbl, 6) + "); late S_B";
    for (const auto& p : preset_family("fig4")) {
        const auto mean = run_ensemble(p.config).mean;
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t k = 0; k < mean.size(); ++k)
            if (mean.record_times[k] > 9000) {
                sum += mean.entropy_b[k];
                ++count;
            }
        const double late = sum / static_cast<double>(count);
        pass &= std::abs(late - kEntropyTarget) <= kEntropyHalfWidth;
        detail += " " + p.name.substr(std::string("fig4-").size()) + "=" + fmt(late);
    }
    const double secs = seconds_since(t0);
    return {pass && secs <= 1800.0, detail + ", " + fmt(secs, 3) + " s"};
}

Outcome range_ordering() {
    std::vector<std::pair<std::string, std::size_t>> drops;
    for (const auto& p : preset_family("fig4")) {
        auto c = p.config;
        c.schedule.record_stride = 1;
        c.observables = {true, false};
        const auto mean = run_ensemble(c).mean;
        const auto drop = first_subharmonic_drop(mean.m_a, kDropWindow, kSubharmonicDrop);
        drops.emplace_back(p.name.substr(std::string("fig4-").size()), drop ? *drop + 1 : c.schedule.n_periods + 1);
    }
    bool pass = true;
    std::string detail = "first window below 0.5 starts at period";
    for (const auto& [name, n] : drops) {
        if (name != "alpha0") pass &= drops.front().second > n;
        detail += " " + name + "=" + std::to_string(n);
    }
    return {pass && drops.front().first == "alpha0", detail};
}

Outcome effective_trend() {
    int improved = 0;
    for (int k = 0; k < 20; ++k) {
        const double j0t = uniform(0.05, 0.3);
        const double eps = uniform(0.02, 0.1);
        const auto dis = sample_disorder(6, uniform(0.0, 2.0 * kPi), DisorderBounds::positive, rng()());
        const auto part = half_partition(6);
        const auto init = prepare_polarized(6);
        const auto full = validate_effective(build_power_law_chain(6, j0t, RangeExponent::finite(1.51)), dis,
                                             DriveProtocol::standard(eps, 1.0), part, init, 100);
        const auto half = validate_effective(build_power_law_chain(6, j0t / 2, RangeExponent::finite(1.51)), dis,
                                             DriveProtocol::standard(eps / 2, 1.0), part, init, 100);
        improved += half.operator_distance < full.operator_distance;
    }
    return {improved >= kTrendFraction * 20, std::to_string(improved) + "/20 instances improve"};
}

int cli(const std::string& args) {
    const std::string cmd = std::string(CHIMERA_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome determinism() {
    const auto root = fs::temp_directory_path() / "chimera_acceptance_determinism";
    fs::remove_all(root);
    bool pass = true;
    std::string detail;
    for (const std::string name : {"fig1b-strong", "s5-ladder-ends", "fig4-alpha1.51"}) {
        const std::string extra = name.rfind("fig4", 0) == 0 ? " --periods 400" : "";
        std::vector<std::string> traces;
        for (unsigned jobs : {1u, 2u, 4u}) {
            const auto dir = root / (name + "-j" + std::to_string(jobs));
            if (cli("run --preset " + name + extra + " --jobs " + std::to_string(jobs) + " --out " + dir.string()) != 0) {
                pass = false;
                continue;
            }
            traces.push_back(slurp(dir / "trace.csv"));
        }
        const bool same = traces.size() == 3 && !traces[0].empty() && traces[0] == traces[1] && traces[0] == traces[2];
        pass &= same;
        detail += name + (same ? " identical; " : " DIFFERS; ");
    }
    fs::remove_all(root);
    return {pass, detail + "jobs 1/2/4"};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"exact decoupling identity", decoupling_identity},
        {"kernel/dense equivalence", kernel_equivalence},
        {"conservation with undriven B", conservation},
        {"unitarity at N=10", unitarity},
        {"chimera DTC phenomenology", chimera_phenomenology},
        {"disorder stabilization", disorder_stabilization},
        {"entropy references and convergence", entropy_convergence},
        {"interaction-range ordering", range_ordering},
        {"effective-Hamiltonian accuracy trend", effective_trend},
        {"end-to-end determinism", determinism},
    };
    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << "  " << (k + 1) << ". " << criteria[k].first << ": " << o.detail << std::endl;
    }
    std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
