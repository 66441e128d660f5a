#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mmqi/basis.hpp"
#include "mmqi/errors.hpp"
#include "mmqi/rng.hpp"
#include "mmqi/state.hpp"

namespace mmqi {

/// Complex arm amplitudes (alpha, beta) of a multi-mode spin-coherent state,
/// normalized jointly: |alpha|^2 + |beta|^2 = 1.
struct ArmAmplitudes {
    Eigen::VectorXcd alpha;
    Eigen::VectorXcd beta;

    ArmAmplitudes(Eigen::VectorXcd a, Eigen::VectorXcd b)
        : alpha(std::move(a)), beta(std::move(b)) {
        if (alpha.size() != beta.size() || alpha.size() == 0)
            throw InvalidArgs("ArmAmplitudes: alpha and beta must have equal nonzero length");
        const double norm2 = alpha.squaredNorm() + beta.squaredNorm();
        if (std::abs(norm2 - 1.0) > kNormTol)
            throw NormalizationError("ArmAmplitudes: |alpha|^2 + |beta|^2 must equal 1");
    }

    /// Two-mode amplitudes from population imbalance z and relative phase phi.
    static ArmAmplitudes two_mode(double z, double phi) {
        if (z < 0.0 || z > 1.0) throw RangeError("ArmAmplitudes: z must lie in [0, 1]");
        Eigen::VectorXcd a(1), b(1);
        a[0] = std::sqrt(z) * std::exp(Complex(0.0, phi));
        b[0] = std::sqrt(1.0 - z);
        return ArmAmplitudes(std::move(a), std::move(b));
    }

    int modes_per_arm() const { return static_cast<int>(alpha.size()); }

    /// Flat amplitude vector over the 2M modes, a-modes first.
    Eigen::VectorXcd concatenated() const {
        Eigen::VectorXcd c(2 * alpha.size());
        c << alpha, beta;
        return c;
    }

    /// |alpha|^2 - |beta|^2, the quantity entering every arm-imbalance moment.
    double imbalance() const { return alpha.squaredNorm() - beta.squaredNorm(); }
};

/// (alpha beta) |-> (alpha a^dag + beta b^dag)^N |0> / sqrt(N!).
///
/// Amplitude on occupation (n_1..n_2M) is sqrt(N!/prod n_k!) prod c_k^{n_k};
/// evaluated in log space so large sectors stay accurate.
inline StateVector coherent_state(std::shared_ptr<const FockBasis> basis,
                                  const ArmAmplitudes& amps) {
    if (amps.modes_per_arm() != basis->modes_per_arm())
        throw DimMismatch("coherent_state: amplitude length does not match basis modes");
    const int n_total = basis->particles();
    const Eigen::VectorXcd c = amps.concatenated();
    const int modes = basis->total_modes();

    std::vector<double> log_abs(modes), arg(modes);
    for (int k = 0; k < modes; ++k) {
        log_abs[k] = std::log(std::abs(c[k]));  // -inf for zero amplitude
        arg[k] = std::arg(c[k]);
    }
    const double log_n_fact = std::lgamma(n_total + 1.0);

    Eigen::VectorXcd out(basis->dim());
    for (std::size_t i = 0; i < basis->dim(); ++i) {
        const Occupation& occ = basis->state(i);
        double log_mag = 0.5 * log_n_fact;
        double phase = 0.0;
        bool zero = false;
        for (int k = 0; k < modes; ++k) {
            if (occ[k] == 0) continue;
            if (!std::isfinite(log_abs[k])) {
                zero = true;
                break;
            }
            log_mag += occ[k] * log_abs[k] - 0.5 * std::lgamma(occ[k] + 1.0);
            phase += occ[k] * arg[k];
        }
        out[i] = zero ? Complex(0.0, 0.0)
                      : std::exp(log_mag) * Complex(std::cos(phase), std::sin(phase));
    }

    const double norm = out.norm();
    if (std::abs(norm - 1.0) > 1e-9)
        throw NormalizationError("coherent_state: construction lost normalization");
    out /= norm;
    return StateVector(std::move(basis), std::move(out));
}

/// Finite mixture of coherent states: the discretized separable density matrix.
struct MixtureSpec {
    std::vector<std::pair<double, ArmAmplitudes>> components;
};

inline DensityOperator separable_mixture(std::shared_ptr<const FockBasis> basis,
                                         const MixtureSpec& spec) {
    if (spec.components.empty())
        throw InvalidArgs("separable_mixture: mixture needs at least one component");
    double total = 0.0;
    for (const auto& [w, amps] : spec.components) {
        if (w < 0.0) throw ProbabilityNormalization("separable_mixture: negative weight");
        total += w;
    }
    if (std::abs(total - 1.0) > kNormTol)
        throw ProbabilityNormalization("separable_mixture: weights must sum to 1");

    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(basis->dim(), basis->dim());
    for (const auto& [w, amps] : spec.components) {
        const StateVector psi = coherent_state(basis, amps);
        rho.noalias() += w * (psi.amps() * psi.amps().adjoint());
    }
    rho = 0.5 * (rho + rho.adjoint()).eval();
    rho /= rho.trace().real();
    return DensityOperator(std::move(basis), std::move(rho));
}

/// (|N,0> + |0,N>)/sqrt(2) on the pair (a_mode, b_mode).
inline StateVector noon_state(std::shared_ptr<const FockBasis> basis, int mode) {
    if (mode < 0 || mode >= basis->modes_per_arm())
        throw ModeOutOfRange("noon_state: mode out of range");
    if (basis->particles() < 1)
        throw InvalidArgs("noon_state: needs at least one particle");
    Occupation all_a(basis->total_modes(), 0), all_b(basis->total_modes(), 0);
    all_a[ModeId{Arm::A, mode}.flat(basis->modes_per_arm())] = basis->particles();
    all_b[ModeId{Arm::B, mode}.flat(basis->modes_per_arm())] = basis->particles();
    Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(basis->dim());
    amps[basis->rank(all_a)] = 1.0 / std::sqrt(2.0);
    amps[basis->rank(all_b)] = 1.0 / std::sqrt(2.0);
    return StateVector(std::move(basis), std::move(amps));
}

/// The three-mode counterexample: arm a coherently split between its first
/// two modes, arm b occupying a single mode.
/// alpha = sqrt(z)(sqrt(zeta), sqrt(1-zeta), 0, ...), beta = (sqrt(1-z), 0, ...).
inline StateVector three_mode_example(std::shared_ptr<const FockBasis> basis, double z,
                                      double zeta) {
    if (z < 0.0 || z > 1.0 || zeta < 0.0 || zeta > 1.0)
        throw RangeError("three_mode_example: z and zeta must lie in [0, 1]");
    if (basis->modes_per_arm() < 2)
        throw InvalidArgs("three_mode_example: needs at least two modes per arm");
    Eigen::VectorXcd alpha = Eigen::VectorXcd::Zero(basis->modes_per_arm());
    Eigen::VectorXcd beta = Eigen::VectorXcd::Zero(basis->modes_per_arm());
    alpha[0] = std::sqrt(z * zeta);
    alpha[1] = std::sqrt(z * (1.0 - zeta));
    beta[0] = std::sqrt(1.0 - z);
    return coherent_state(std::move(basis), ArmAmplitudes(std::move(alpha), std::move(beta)));
}

enum class WeightLaw { kUniform, kDirichlet };

/// Uniformly random amplitude vector on the unit sphere of C^{2M}.
inline ArmAmplitudes random_amplitudes(int modes_per_arm, Philox& rng) {
    Eigen::VectorXcd c(2 * modes_per_arm);
    for (Eigen::Index k = 0; k < c.size(); ++k) {
        const double re = rng.next_normal();
        const double im = rng.next_normal();
        c[k] = Complex(re, im);
    }
    c /= c.norm();
    return ArmAmplitudes(c.head(modes_per_arm), c.tail(modes_per_arm));
}

/// Reproducible sampler over the separable set: components are
/// complex-Gaussian directions on the amplitude sphere, weights equal or
/// flat-Dirichlet. The same seed reproduces the state bit for bit.
inline DensityOperator random_separable(std::shared_ptr<const FockBasis> basis,
                                        int n_components, std::uint64_t seed,
                                        WeightLaw law = WeightLaw::kUniform) {
    if (n_components < 1)
        throw InvalidArgs("random_separable: needs at least one component");
    Philox rng(seed);
    MixtureSpec spec;
    spec.components.reserve(n_components);
    for (int i = 0; i < n_components; ++i)
        spec.components.emplace_back(0.0, random_amplitudes(basis->modes_per_arm(), rng));

    std::vector<double> weights(n_components, 1.0 / n_components);
    if (law == WeightLaw::kDirichlet) {
        double total = 0.0;
        for (double& w : weights) {
            w = rng.next_exponential();
            total += w;
        }
        for (double& w : weights) w /= total;
    }
    for (int i = 0; i < n_components; ++i) spec.components[i].first = weights[i];
    return separable_mixture(std::move(basis), spec);
}

/// Incoherent union of fixed-N sectors; models shot-to-shot particle-number
/// fluctuations. Cross-sector coherences are not representable.
struct SectorUnion {
    std::vector<std::pair<double, DensityOperator>> sectors;

    double mean_particles() const {
        double mean = 0.0;
        for (const auto& [p, rho] : sectors) mean += p * rho.particles();
        return mean;
    }
};

inline SectorUnion sector_union(std::vector<std::pair<double, DensityOperator>> sectors) {
    if (sectors.empty()) throw InvalidArgs("sector_union: needs at least one sector");
    double total = 0.0;
    for (std::size_t i = 0; i < sectors.size(); ++i) {
        const auto& [p, rho] = sectors[i];
        if (p < 0.0) throw ProbabilityNormalization("sector_union: negative probability");
        total += p;
        for (std::size_t j = 0; j < i; ++j)
            if (sectors[j].second.particles() == rho.particles())
                throw InvalidArgs("sector_union: duplicate particle-number sector");
    }
    if (std::abs(total - 1.0) > kNormTol)
        throw ProbabilityNormalization("sector_union: probabilities must sum to 1");
    return SectorUnion{std::move(sectors)};
}

}  // namespace mmqi
