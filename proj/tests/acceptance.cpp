// Acceptance suite: every criterion is checked at its stated tolerance and
// reported as one PASS/FAIL line. Run with no arguments for the full suite
// or with --criterion N for a single criterion. Exit code is the number of
// failed criteria.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mmqi/mmqi.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

const std::string kCli = MMQI_CLI_PATH;

struct Outcome {
    bool pass;
    std::string detail;
};

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

struct Check {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& label) {
        pass = pass && ok;
        if (!detail.empty()) detail += "; ";
        detail += label + (ok ? " ok" : " FAILED");
    }
};

// ---------------------------------------------------------------------------
// 1. Fig. 3 reproduction through the CLI pattern command.

Outcome criterion1() {
    const fs::path dir =
        fs::temp_directory_path() / ("mmqi_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    const fs::path csv = dir / "pattern.csv";
    const fs::path summary = dir / "summary.json";

    const auto start = Clock::now();
    const std::string cmd = kCli + " pattern --z 0.91 --zeta 0.5 --k 10 --dk 0.5 --out " +
                            csv.string() + " --summary " + summary.string() + " > /dev/null";
    const int status = std::system(cmd.c_str());
    const double elapsed = seconds_since(start);
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0)
        return {false, "pattern command failed"};

    const json s = json::parse(read_file(summary));
    const double nu2 = s.at("nu2").get<double>();

    // First data row of the CSV is x = 0.
    std::istringstream lines(read_file(csv));
    std::string header, first;
    std::getline(lines, header);
    std::getline(lines, first);
    const double p0 = std::strtod(first.substr(first.find(',') + 1).c_str(), nullptr);
    const double closed_form = mmqi::pattern_closed_form_threemode(0.91, 0.5, 10.0, 0.5, 0.0);

    Check check;
    check.require(std::abs(nu2 - 0.326) <= 0.005, "nu2 = " + std::to_string(nu2) +
                                                      " within 0.326 +- 0.005");
    check.require(std::abs(p0 - closed_form) <= 1e-10,
                  "p(0) matches the closed form to 1e-10");
    check.require(elapsed < 5.0, "runtime " + std::to_string(elapsed) + " s < 5 s");
    fs::remove_all(dir);
    return {check.pass, check.detail};
}

// ---------------------------------------------------------------------------
// 2. Witness discordance on the same state.

Outcome criterion2() {
    const double z = 0.91, zeta = 0.5, k = 10.0, dk = 0.5;
    const int n = 4;
    const auto sample = mmqi::pattern_closed_form_threemode_sample(z, zeta, k, dk, 200000);
    const auto basis = mmqi::FockBasis::enumerate(n, 2);
    const auto psi = mmqi::three_mode_example(basis, z, zeta);
    const auto gens = mmqi::build_generators(*basis);

    const double eta2 = mmqi::eta_squared(psi);
    const double ratio = mmqi::operational_xi(eta2, sample.nu * sample.nu);
    const double xi2 = mmqi::xi_squared(psi, gens);
    const double qfi = mmqi::qfi_pure(psi, gens.jz);

    Check check;
    check.require(ratio >= 0.965 && ratio <= 1.005,
                  "eta2/nu2 = " + std::to_string(ratio) + " in [0.965, 1.005]");
    check.require(xi2 >= 1.0, "xi^2 = " + std::to_string(xi2) + " >= 1");
    check.require(qfi <= n + 1e-8, "QFI = " + std::to_string(qfi) + " <= N");
    check.require(ratio < 1.0, "operational witness misfires (< 1)");
    return {check.pass, check.detail};
}

// ---------------------------------------------------------------------------
// 3. Separable bound sweep, bosonic and distinguishable.

Outcome criterion3() {
    const auto start = Clock::now();
    const std::uint64_t seed = 20240901;
    double max_margin_bosonic = -1e300;

    const std::vector<int> n_list{2, 3, 4}, m_list{1, 2, 3};
    for (int draw = 0; draw < 1000; ++draw) {
        const int combo = draw % 9;
        const int n = n_list[combo % 3];
        const int m = m_list[combo / 3];
        const auto basis = mmqi::FockBasis::enumerate(n, m);
        const auto gens = mmqi::build_generators(*basis);
        const int components = 1 + draw % 8;
        const auto rho = mmqi::random_separable(basis, components, seed + draw);
        const mmqi::DensityEigensystem eigen(rho.matrix());
        mmqi::Philox dir_rng(seed + 1000000 + draw);
        for (int d = 0; d < 10; ++d) {
            Eigen::Vector3d v(dir_rng.next_normal(), dir_rng.next_normal(),
                              dir_rng.next_normal());
            v.normalize();
            const double f = eigen.qfi(mmqi::direction_generator(gens, mmqi::Axis(v)));
            max_margin_bosonic = std::max(max_margin_bosonic, f - n);
        }
    }

    double max_margin_dist = -1e300;
    mmqi::Philox meta(seed, 999);
    for (int draw = 0; draw < 200; ++draw) {
        const int n = 1 + static_cast<int>(meta.next_u32() % 4);
        const int m = 1 + static_cast<int>(meta.next_u32() % 2);
        const auto gens = mmqi::build_generators_distinguishable(n, m);
        mmqi::Philox rng(seed + 5000000 + draw);
        std::vector<mmqi::SingleParticleAmps> particles;
        for (int j = 0; j < n; ++j) particles.push_back(mmqi::random_amplitudes(m, rng));
        const auto psi = mmqi::product_state(particles);
        mmqi::Philox dir_rng(seed + 6000000 + draw);
        for (int d = 0; d < 10; ++d) {
            Eigen::Vector3d v(dir_rng.next_normal(), dir_rng.next_normal(),
                              dir_rng.next_normal());
            v.normalize();
            const double f = mmqi::qfi_pure(psi, mmqi::direction_generator(gens, mmqi::Axis(v)));
            max_margin_dist = std::max(max_margin_dist, f - n);
        }
    }
    const double elapsed = seconds_since(start);

    Check check;
    check.require(max_margin_bosonic <= 1e-8,
                  "bosonic max(F_q - N) = " + std::to_string(max_margin_bosonic));
    check.require(max_margin_dist <= 1e-8,
                  "distinguishable max(F_q - N) = " + std::to_string(max_margin_dist));
    check.require(elapsed < 120.0, "runtime " + std::to_string(elapsed) + " s < 120 s");
    return {check.pass, check.detail};
}

// ---------------------------------------------------------------------------
// 4. Heisenberg control: NOON states give F_q = N^2 in both backends.

Outcome criterion4() {
    Check check;
    for (int n = 1; n <= 4; ++n) {
        const auto basis = mmqi::FockBasis::enumerate(n, 1);
        const auto gens = mmqi::build_generators(*basis);
        const double f_bosonic = mmqi::qfi_pure(mmqi::noon_state(basis, 0), gens.jz);
        check.require(std::abs(f_bosonic - n * n) <= 1e-9,
                      "bosonic N=" + std::to_string(n));

        const auto dist_gens = mmqi::build_generators_distinguishable(n, 1);
        const double f_dist =
            mmqi::qfi_pure(mmqi::noon_distinguishable(n, 1, 0), dist_gens.jz);
        check.require(std::abs(f_dist - n * n) <= 1e-9,
                      "distinguishable N=" + std::to_string(n));
    }
    return {check.pass, check.detail};
}

// ---------------------------------------------------------------------------
// 5. Fluctuating N: Poisson-truncated separable unions stay below <N>.

Outcome criterion5() {
    const double lambda = 2.0;
    std::vector<std::pair<double, mmqi::DensityOperator>> sectors;
    double norm = 0.0;
    std::vector<double> weights;
    for (int n = 0; n <= 6; ++n) {
        const double w = std::exp(-lambda + n * std::log(lambda) - std::lgamma(n + 1.0));
        weights.push_back(w);
        norm += w;
    }
    for (int n = 0; n <= 6; ++n) {
        const auto basis = mmqi::FockBasis::enumerate(n, 2);
        sectors.emplace_back(weights[n] / norm,
                             mmqi::random_separable(basis, 1 + n % 5, 9000 + n));
    }
    const auto u = mmqi::sector_union(std::move(sectors));
    const double budget = u.mean_particles();

    Check check;
    mmqi::Philox rng(314159);
    const auto report_z = mmqi::qfi_blockwise(u, mmqi::Axis::z());
    check.require(report_z.value <= budget + 1e-8,
                  "F_q(z) = " + std::to_string(report_z.value) + " <= <N> = " +
                      std::to_string(budget));
    check.require(report_z.witness == mmqi::Witness::kSeparableConsistent, "witness verdict");
    for (int d = 0; d < 3; ++d) {
        Eigen::Vector3d v(rng.next_normal(), rng.next_normal(), rng.next_normal());
        v.normalize();
        const auto report = mmqi::qfi_blockwise(u, mmqi::Axis(v));
        check.require(report.value <= budget + 1e-8, "F_q(random direction " +
                                                         std::to_string(d) + ")");
    }
    return {check.pass, check.detail};
}

// ---------------------------------------------------------------------------
// 6. Algebraic identities, all residues below 1e-9.

Outcome criterion6() {
    double worst = 0.0;
    const std::complex<double> i(0.0, 1.0);

    // su(2) commutators across sectors.
    for (int n = 1; n <= 6; ++n) {
        for (int m = 1; m <= 3; ++m) {
            const auto basis = mmqi::FockBasis::enumerate(n, m);
            const auto gens = mmqi::build_generators(*basis);
            const Eigen::MatrixXcd jx = gens.jx.dense();
            const Eigen::MatrixXcd jy = gens.jy.dense();
            const Eigen::MatrixXcd jz = gens.jz.dense();
            worst = std::max(worst, (jx * jy - jy * jx - i * jz).cwiseAbs().maxCoeff());
            worst = std::max(worst, (jy * jz - jz * jy - i * jx).cwiseAbs().maxCoeff());
            worst = std::max(worst, (jz * jx - jx * jz - i * jy).cwiseAbs().maxCoeff());
        }
    }

    // Rotation unitarity and the Heisenberg conjugation identity.
    {
        const auto basis = mmqi::FockBasis::enumerate(3, 2);
        const auto gens = mmqi::build_generators(*basis);
        const auto eye = Eigen::MatrixXcd::Identity(basis->dim(), basis->dim());
        mmqi::Philox rng(606);
        for (int trial = 0; trial < 20; ++trial) {
            Eigen::Vector3d v(rng.next_normal(), rng.next_normal(), rng.next_normal());
            v.normalize();
            const double theta = 4.0 * M_PI * (rng.next_double() - 0.5);
            const Eigen::MatrixXcd u =
                mmqi::rotation(mmqi::direction_generator(gens, mmqi::Axis(v)), theta);
            worst = std::max(worst, (u.adjoint() * u - eye).cwiseAbs().maxCoeff());
        }
        for (double theta : {0.0, 0.3, M_PI / 2.0, 1.9, -0.8}) {
            const Eigen::MatrixXcd u = mmqi::rotation(gens.jy, theta);
            const Eigen::MatrixXcd conjugated = u * gens.jz.dense() * u.adjoint();
            worst = std::max(
                worst,
                (mmqi::heisenberg_jz(gens, theta) - conjugated).cwiseAbs().maxCoeff());
        }
    }

    // Rank/unrank round trips.
    bool rank_ok = true;
    for (int n = 0; n <= 6; ++n) {
        for (int m = 1; m <= 3; ++m) {
            const auto basis = mmqi::FockBasis::enumerate(n, m);
            for (std::size_t idx = 0; idx < basis->dim(); ++idx)
                rank_ok = rank_ok && (basis->rank(basis->state(idx)) == idx);
        }
    }

    // Coherent-state moments of Jz.
    mmqi::Philox rng(707);
    for (int n : {2, 4, 6}) {
        for (int m = 1; m <= 3; ++m) {
            const auto basis = mmqi::FockBasis::enumerate(n, m);
            const auto gens = mmqi::build_generators(*basis);
            for (int trial = 0; trial < 5; ++trial) {
                const auto amps = mmqi::random_amplitudes(m, rng);
                const auto psi = mmqi::coherent_state(basis, amps);
                const double d = amps.imbalance();
                const double mean = mmqi::expectation(gens.jz, psi);
                const double second = gens.jz.apply(psi.amps()).squaredNorm();
                worst = std::max(worst, std::abs(mean - 0.5 * n * d));
                worst = std::max(worst,
                                 std::abs(second - (0.25 * n + 0.25 * n * (n - 1) * d * d)));
            }
        }
    }

    Check check;
    check.require(worst < 1e-9, "max residue = " + std::to_string(worst));
    check.require(rank_ok, "rank/unrank round trips");
    return {check.pass, check.detail};
}

// ---------------------------------------------------------------------------
// 7. Estimation pipeline at the shot-noise limit.

Outcome criterion7() {
    const auto start = Clock::now();
    const int n = 8, m = 1000, repeats = 500;
    const auto basis = mmqi::FockBasis::enumerate(n, 1);
    const auto gens = mmqi::build_generators(*basis);
    const auto psi = mmqi::coherent_state(basis, mmqi::ArmAmplitudes::two_mode(0.5, 0.0));

    const auto analytic = mmqi::estimator_sensitivity(psi, 0.05, m, gens);
    const double snl_product = m * n * analytic.delta2_theta;

    const double expected = 1.0 / (static_cast<double>(m) * n);
    const double empirical = mmqi::empirical_sensitivity(psi, 0.05, m, repeats, gens, 777);
    const double se = expected * std::sqrt(2.0 / (repeats - 1));
    const double elapsed = seconds_since(start);

    Check check;
    check.require(std::abs(snl_product - 1.0) <= 1e-9,
                  "analytic m N delta2 = " + std::to_string(snl_product));
    check.require(std::abs(empirical - expected) <= 5.0 * se,
                  "empirical delta2 = " + std::to_string(empirical) + " vs 1/(mN) = " +
                      std::to_string(expected) + " within 5 SE");
    check.require(elapsed < 60.0, "runtime " + std::to_string(elapsed) + " s < 60 s");
    return {check.pass, check.detail};
}

// ---------------------------------------------------------------------------
// 8. QFI internal consistency: pure reduction and convexity.

Outcome criterion8() {
    const auto basis = mmqi::FockBasis::enumerate(3, 2);
    const auto gens = mmqi::build_generators(*basis);
    mmqi::Philox rng(808);

    double worst_reduction = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        Eigen::VectorXcd amps(basis->dim());
        for (Eigen::Index j = 0; j < amps.size(); ++j)
            amps[j] = mmqi::Complex(rng.next_normal(), rng.next_normal());
        amps /= amps.norm();
        const mmqi::StateVector psi(basis, amps);
        const auto rho = mmqi::DensityOperator::from_pure(psi);
        worst_reduction =
            std::max(worst_reduction, std::abs(mmqi::qfi_mixed(rho, gens.jz) -
                                               mmqi::qfi_pure(psi, gens.jz)));
    }

    bool convex_ok = true;
    for (int trial = 0; trial < 50; ++trial) {
        const auto rho1 = mmqi::random_separable(basis, 1 + trial % 6, 4000 + trial);
        const auto rho2 = mmqi::random_separable(basis, 1 + (trial + 3) % 6, 5000 + trial);
        const double lambda = rng.next_double();
        const mmqi::DensityOperator blend(
            basis, lambda * rho1.matrix() + (1.0 - lambda) * rho2.matrix());
        const double lhs = mmqi::qfi_mixed(blend, gens.jz);
        const double rhs = lambda * mmqi::qfi_mixed(rho1, gens.jz) +
                           (1.0 - lambda) * mmqi::qfi_mixed(rho2, gens.jz);
        convex_ok = convex_ok && (lhs <= rhs + 1e-8);
    }

    Check check;
    check.require(worst_reduction <= 1e-8,
                  "max |mixed - pure| = " + std::to_string(worst_reduction));
    check.require(convex_ok, "convexity over 50 random mixtures");
    return {check.pass, check.detail};
}

const std::map<int, std::pair<std::string, std::function<Outcome()>>> kCriteria = {
    {1, {"Fig. 3 reproduction (nu^2, closed-form p(0), runtime)", criterion1}},
    {2, {"witness discordance on the three-mode state", criterion2}},
    {3, {"separable bound sweep (1000 bosonic + 200 distinguishable)", criterion3}},
    {4, {"Heisenberg control: NOON F_q = N^2", criterion4}},
    {5, {"fluctuating-N bound F_q <= <N>", criterion5}},
    {6, {"algebraic suite residues < 1e-9", criterion6}},
    {7, {"estimation pipeline at the shot-noise limit", criterion7}},
    {8, {"QFI internal consistency", criterion8}},
};

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::string(argv[i]) == "--criterion" && i + 1 < argc) only = std::atoi(argv[i + 1]);
    }

    int failures = 0;
    for (const auto& [id, entry] : kCriteria) {
        if (only != 0 && id != only) continue;
        Outcome outcome{false, "unhandled exception"};
        try {
            outcome = entry.second();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        std::printf("[%s] criterion %d: %s (%s)\n", outcome.pass ? "PASS" : "FAIL", id,
                    entry.first.c_str(), outcome.detail.c_str());
        if (!outcome.pass) ++failures;
    }
    return failures;
}
