#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mmqi/collective.hpp"
#include "mmqi/distinguishable.hpp"
#include "mmqi/errors.hpp"
#include "mmqi/metrology.hpp"
#include "mmqi/rng.hpp"
#include "mmqi/state.hpp"

namespace mmqi {

/// Shot record of the imbalance measurement n_i = (n_a - n_b)/2.
struct MeasurementRecord {
    int m;
    std::vector<double> imbalances;
    double theta_true;
    std::uint64_t seed;

    double mean() const {
        return std::accumulate(imbalances.begin(), imbalances.end(), 0.0) /
               static_cast<double>(imbalances.size());
    }
};

namespace detail {

/// Projective outcome distribution over the Jz spectrum, eigenvalues
/// ascending. Degenerate eigenvalues are grouped with tolerance 1e-9.
struct ImbalanceDistribution {
    std::vector<double> values;
    std::vector<double> probs;
};

inline ImbalanceDistribution group_spectrum(const std::vector<double>& values,
                                            const std::vector<double>& weights) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&values](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    ImbalanceDistribution dist;
    for (std::size_t idx : order) {
        if (!dist.values.empty() && values[idx] - dist.values.back() <= 1e-9) {
            dist.probs.back() += weights[idx];
        } else {
            dist.values.push_back(values[idx]);
            dist.probs.push_back(weights[idx]);
        }
    }
    double total = std::accumulate(dist.probs.begin(), dist.probs.end(), 0.0);
    for (double& p : dist.probs) p /= total;
    return dist;
}

/// Diagonal of Jz in the stored basis, when the operator is diagonal there
/// (true for both the bosonic and the tensor-product backend).
inline bool diagonal_spectrum(const SparseHermitian& jz, std::vector<double>& diag) {
    diag.assign(jz.dim(), 0.0);
    for (const auto& e : jz.upper_entries()) {
        if (e.row != e.col) return false;
        diag[e.row] = e.value.real();
    }
    return true;
}

inline ImbalanceDistribution distribution_from_amps(const Eigen::VectorXcd& amps,
                                                    const SparseHermitian& jz) {
    std::vector<double> values;
    std::vector<double> weights(amps.size());
    if (diagonal_spectrum(jz, values)) {
        for (Eigen::Index i = 0; i < amps.size(); ++i) weights[i] = std::norm(amps[i]);
        return group_spectrum(values, weights);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(jz.dense());
    const Eigen::VectorXcd projected = solver.eigenvectors().adjoint() * amps;
    values.assign(solver.eigenvalues().data(),
                  solver.eigenvalues().data() + solver.eigenvalues().size());
    for (Eigen::Index i = 0; i < projected.size(); ++i) weights[i] = std::norm(projected[i]);
    return group_spectrum(values, weights);
}

inline ImbalanceDistribution distribution_from_density(const Eigen::MatrixXcd& rho,
                                                       const SparseHermitian& jz) {
    std::vector<double> values;
    std::vector<double> weights(rho.rows());
    if (diagonal_spectrum(jz, values)) {
        for (Eigen::Index i = 0; i < rho.rows(); ++i) weights[i] = rho(i, i).real();
        return group_spectrum(values, weights);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(jz.dense());
    const Eigen::MatrixXcd rotated =
        solver.eigenvectors().adjoint() * rho * solver.eigenvectors();
    values.assign(solver.eigenvalues().data(),
                  solver.eigenvalues().data() + solver.eigenvalues().size());
    for (Eigen::Index i = 0; i < rotated.rows(); ++i) weights[i] = rotated(i, i).real();
    return group_spectrum(values, weights);
}

/// Mach-Zehnder output distribution. The state evolves with the adjoint of
/// rotation(jy, theta) so that the outcome moments follow
/// Jz(theta) = Jz cos(theta) + Jx sin(theta).
inline ImbalanceDistribution output_distribution(const Eigen::VectorXcd& amps, double theta,
                                                 const GeneratorSet& gens) {
    const Eigen::MatrixXcd u = rotation(gens.jy, -theta);
    return distribution_from_amps(u * amps, gens.jz);
}

inline ImbalanceDistribution output_distribution(const DensityOperator& rho, double theta,
                                                 const GeneratorSet& gens) {
    const Eigen::MatrixXcd u = rotation(gens.jy, -theta);
    return distribution_from_density(u * rho.matrix() * u.adjoint(), gens.jz);
}

inline std::vector<double> draw_from(const ImbalanceDistribution& dist, int m, Philox& rng) {
    std::vector<double> cdf(dist.probs.size());
    std::partial_sum(dist.probs.begin(), dist.probs.end(), cdf.begin());
    cdf.back() = 1.0;
    std::vector<double> out;
    out.reserve(m);
    for (int i = 0; i < m; ++i) {
        const double u = rng.next_double();
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        const std::size_t idx = std::min<std::size_t>(it - cdf.begin(), cdf.size() - 1);
        out.push_back(dist.values[idx]);
    }
    return out;
}

template <typename State>
MeasurementRecord sample_impl(const State& state, double theta, int m,
                              const GeneratorSet& gens, std::uint64_t seed) {
    if (m < 1) throw InvalidArgs("sample_imbalance: m must be >= 1");
    const ImbalanceDistribution dist = [&] {
        if constexpr (std::is_same_v<State, DensityOperator>) {
            return output_distribution(state, theta, gens);
        } else {
            return output_distribution(state.amps(), theta, gens);
        }
    }();
    Philox rng(seed);
    return MeasurementRecord{m, draw_from(dist, m, rng), theta, seed};
}

}  // namespace detail

/// Exact projective sampling of the output arm imbalance after the
/// interferometer: m seeded draws by inverse CDF over the Jz spectrum.
inline MeasurementRecord sample_imbalance(const StateVector& psi, double theta, int m,
                                          const GeneratorSet& gens, std::uint64_t seed) {
    return detail::sample_impl(psi, theta, m, gens, seed);
}
inline MeasurementRecord sample_imbalance(const TensorState& psi, double theta, int m,
                                          const GeneratorSet& gens, std::uint64_t seed) {
    return detail::sample_impl(psi, theta, m, gens, seed);
}
inline MeasurementRecord sample_imbalance(const DensityOperator& rho, double theta, int m,
                                          const GeneratorSet& gens, std::uint64_t seed) {
    return detail::sample_impl(rho, theta, m, gens, seed);
}

namespace detail {

inline double golden_section_max(const std::function<double(double)>& f, double lo, double hi,
                                 double tol) {
    const double invphi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

template <typename State>
double mle_impl(const MeasurementRecord& record, const State& state, const GeneratorSet& gens,
                double lo, double hi) {
    if (!(hi > lo)) throw InvalidArgs("mle_phase: empty search interval");
    const SpinMoments mom = spin_moments(state, gens);

    // The working point must stay away from stationary points of the mean
    // signal; scan the interval for sign changes or near-zeros of the slope.
    const int probes = 129;
    double prev = mom.derivative(lo);
    for (int i = 1; i < probes; ++i) {
        const double theta = lo + (hi - lo) * i / (probes - 1);
        const double der = mom.derivative(theta);
        if (std::abs(der) < 1e-12 || std::abs(prev) < 1e-12 || der * prev < 0.0)
            throw NoMaximumInInterval(
                "mle_phase: <Jz(theta)> is stationary inside the search interval");
        prev = der;
    }

    const double n_mean = record.mean();
    const auto log_likelihood = [&](double theta) {
        const double mu = mom.mean(theta);
        const double var = std::max(mom.variance(theta), 1e-30);
        const double r = n_mean - mu;
        return -record.m * r * r / (2.0 * var);
    };
    const double tol = 1e-8;
    const double theta_hat = golden_section_max(log_likelihood, lo, hi, tol);
    if (theta_hat - lo < 4.0 * tol || hi - theta_hat < 4.0 * tol) {
        // A maximizer glued to the boundary means the likelihood keeps
        // rising outside the interval.
        const double inner = log_likelihood(theta_hat);
        if (log_likelihood(lo) > inner || log_likelihood(hi) > inner)
            throw NoMaximumInInterval("mle_phase: likelihood peaks at the interval boundary");
    }
    return theta_hat;
}

}  // namespace detail

/// Maximum-likelihood phase from the Gaussian likelihood of the mean
/// imbalance, maximized by golden section over the search interval.
inline double mle_phase(const MeasurementRecord& record, const StateVector& psi,
                        const GeneratorSet& gens, double lo, double hi) {
    return detail::mle_impl(record, psi, gens, lo, hi);
}
inline double mle_phase(const MeasurementRecord& record, const TensorState& psi,
                        const GeneratorSet& gens, double lo, double hi) {
    return detail::mle_impl(record, psi, gens, lo, hi);
}
inline double mle_phase(const MeasurementRecord& record, const DensityOperator& rho,
                        const GeneratorSet& gens, double lo, double hi) {
    return detail::mle_impl(record, rho, gens, lo, hi);
}

namespace detail {

template <typename State>
double empirical_sensitivity_impl(const State& state, double theta, int m, int repeats,
                                  const GeneratorSet& gens, std::uint64_t seed,
                                  double half_width) {
    if (repeats < 100)
        throw InvalidArgs("empirical_sensitivity: needs at least 100 repeats");
    if (half_width <= 0.0)
        throw InvalidArgs("empirical_sensitivity: search half-width must be positive");
    std::vector<double> estimates;
    estimates.reserve(repeats);
    for (int r = 0; r < repeats; ++r) {
        const MeasurementRecord record = sample_impl(state, theta, m, gens, seed + r);
        estimates.push_back(
            mle_impl(record, state, gens, theta - half_width, theta + half_width));
    }
    const double mean = std::accumulate(estimates.begin(), estimates.end(), 0.0) / repeats;
    double var = 0.0;
    for (double e : estimates) var += (e - mean) * (e - mean);
    return var / (repeats - 1);
}

}  // namespace detail

/// Sample variance of repeated maximum-likelihood estimates; each repeat
/// draws with the derived seed seed + repeat_index. The likelihood search
/// runs over theta +- half_width, which must stay clear of stationary
/// points of the mean signal.
inline double empirical_sensitivity(const StateVector& psi, double theta, int m, int repeats,
                                    const GeneratorSet& gens, std::uint64_t seed,
                                    double half_width = M_PI / 4.0) {
    return detail::empirical_sensitivity_impl(psi, theta, m, repeats, gens, seed, half_width);
}
inline double empirical_sensitivity(const TensorState& psi, double theta, int m, int repeats,
                                    const GeneratorSet& gens, std::uint64_t seed,
                                    double half_width = M_PI / 4.0) {
    return detail::empirical_sensitivity_impl(psi, theta, m, repeats, gens, seed, half_width);
}
inline double empirical_sensitivity(const DensityOperator& rho, double theta, int m,
                                    int repeats, const GeneratorSet& gens, std::uint64_t seed,
                                    double half_width = M_PI / 4.0) {
    return detail::empirical_sensitivity_impl(rho, theta, m, repeats, gens, seed, half_width);
}

}  // namespace mmqi
