#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mmqi/collective.hpp"
#include "mmqi/distinguishable.hpp"
#include "mmqi/errors.hpp"
#include "mmqi/one_body.hpp"
#include "mmqi/sparse_hermitian.hpp"
#include "mmqi/state.hpp"
#include "mmqi/states.hpp"

namespace mmqi {

/// Tolerance for the entanglement-witness comparison F_q > budget.
inline constexpr double kWitnessTol = 1e-8;
/// Eigenvalue pairs with combined weight below this are outside the support.
inline constexpr double kSupportTol = 1e-12;
/// Eigenvalues of a density matrix more negative than this are rejected.
inline constexpr double kEigenClipTol = 1e-10;

enum class Witness { kSeparableConsistent, kEntangled };

inline const char* to_string(Witness w) {
    return w == Witness::kEntangled ? "ENTANGLED" : "SEPARABLE_CONSISTENT";
}

/// QFI value against the particle budget that defines the shot-noise limit
/// (N for a fixed sector, <N> for a sector union).
struct QfiReport {
    double value;
    double particle_budget;
    Witness witness;
};

inline QfiReport make_qfi_report(double value, double particle_budget) {
    return QfiReport{value, particle_budget,
                     value > particle_budget + kWitnessTol ? Witness::kEntangled
                                                           : Witness::kSeparableConsistent};
}

struct SensitivityReport {
    double theta;
    int m;
    double delta2_theta;
    double crlb;
};

// ---------------------------------------------------------------------------
// Quantum Fisher information

/// Pure-state QFI: 4 (<G^2> - <G>^2).
inline double qfi_pure(const Eigen::VectorXcd& amps, const SparseHermitian& gen) {
    const Eigen::VectorXcd w = gen.apply(amps);
    const double mean = expectation(gen, amps);
    const double second = w.squaredNorm();
    return 4.0 * (second - mean * mean);
}

inline double qfi_pure(const StateVector& psi, const SparseHermitian& gen) {
    return qfi_pure(psi.amps(), gen);
}

inline double qfi_pure(const TensorState& psi, const SparseHermitian& gen) {
    return qfi_pure(psi.amps(), gen);
}

/// Eigendecomposition of a density matrix, reusable across generators.
/// Eigenvalues in [-1e-10, 0) are clipped to zero and the spectrum is
/// renormalized; anything more negative is rejected as unphysical.
class DensityEigensystem {
public:
    explicit DensityEigensystem(const Eigen::MatrixXcd& rho) {
        if (static_cast<std::size_t>(rho.rows()) > kDenseCap)
            throw DimensionCap("qfi_mixed: dimension exceeds dense cap");
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho);
        probs_ = solver.eigenvalues();
        vectors_ = solver.eigenvectors();
        if (probs_.minCoeff() < -kEigenClipTol)
            throw NonPhysicalState("qfi_mixed: density matrix has eigenvalue " +
                                   std::to_string(probs_.minCoeff()));
        for (Eigen::Index i = 0; i < probs_.size(); ++i)
            if (probs_[i] < 0.0) probs_[i] = 0.0;
        probs_ /= probs_.sum();
    }

    /// F_q = 2 sum_{ij} (p_i - p_j)^2 / (p_i + p_j) |<i|G|j>|^2 over the support.
    double qfi(const SparseHermitian& gen) const {
        if (gen.dim() != static_cast<std::size_t>(vectors_.rows()))
            throw DimMismatch("qfi_mixed: generator does not match state dimension");
        const Eigen::MatrixXcd a = vectors_.adjoint() * gen.apply(vectors_);
        const Eigen::Index dim = probs_.size();
        double f = 0.0;
        for (Eigen::Index i = 0; i < dim; ++i) {
            for (Eigen::Index j = i + 1; j < dim; ++j) {
                const double sum = probs_[i] + probs_[j];
                if (sum <= kSupportTol) continue;
                const double diff = probs_[i] - probs_[j];
                f += 4.0 * diff * diff / sum * std::norm(a(i, j));
            }
        }
        return f;
    }

    const Eigen::VectorXd& probabilities() const { return probs_; }

private:
    Eigen::VectorXd probs_;
    Eigen::MatrixXcd vectors_;
};

inline double qfi_mixed(const DensityOperator& rho, const SparseHermitian& gen) {
    return DensityEigensystem(rho.matrix()).qfi(gen);
}

/// Mixed-state QFI of a weighted list of tensor-product projectors.
inline double qfi_mixed(const std::vector<std::pair<double, TensorState>>& mixture,
                        const SparseHermitian& gen) {
    if (mixture.empty()) throw InvalidArgs("qfi_mixed: empty mixture");
    const std::size_t dim = mixture.front().second.dim();
    if (dim > kDenseCap) throw DimensionCap("qfi_mixed: dimension exceeds dense cap");
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
    double total = 0.0;
    for (const auto& [w, psi] : mixture) {
        if (w < 0.0) throw ProbabilityNormalization("qfi_mixed: negative weight");
        if (psi.dim() != dim) throw DimMismatch("qfi_mixed: mixed tensor dimensions");
        rho.noalias() += w * (psi.amps() * psi.amps().adjoint());
        total += w;
    }
    if (std::abs(total - 1.0) > kNormTol)
        throw ProbabilityNormalization("qfi_mixed: weights must sum to 1");
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return DensityEigensystem(rho).qfi(gen);
}

/// Blockwise QFI of a sector union: generators do not couple sectors, so
/// F_q = sum_N P(N) F_q[rho_N] and the budget is <N>.
inline QfiReport qfi_blockwise(const SectorUnion& u, const Axis& axis) {
    double value = 0.0;
    for (const auto& [p, rho] : u.sectors) {
        if (p == 0.0) continue;
        const SparseHermitian gen = one_body_operator(
            rho.basis(), detail::collective_coeff(rho.basis().modes_per_arm(), axis.direction()));
        value += p * qfi_mixed(rho, gen);
    }
    return make_qfi_report(value, u.mean_particles());
}

/// Closed form of the coherent-state QFI along Jz: N (1 - (|a|^2-|b|^2)^2).
inline double separable_bound_analytic(const ArmAmplitudes& amps, int n_particles) {
    if (n_particles < 0) throw InvalidArgs("separable_bound_analytic: negative N");
    const double d = amps.imbalance();
    return n_particles * (1.0 - d * d);
}

/// Cramer-Rao lower bound on the phase variance: delta^2 theta >= 1/(m F_q).
inline double crlb(double fisher, int m) {
    if (m < 1) throw InvalidArgs("crlb: repetition count must be >= 1");
    if (fisher <= 0.0) throw NonPositiveFisher("crlb: Fisher information must be positive");
    return 1.0 / (m * fisher);
}

// ---------------------------------------------------------------------------
// Moment-based estimator sensitivity and squeezing witnesses

/// First and second moments of Jz and Jx, enough to evaluate every moment of
/// Jz(theta) = Jz cos(theta) + Jx sin(theta).
struct SpinMoments {
    double jz, jx, jy;
    double jzz, jxx;
    double sym_zx;  // <{Jz, Jx}>

    double mean(double theta) const { return jz * std::cos(theta) + jx * std::sin(theta); }
    double derivative(double theta) const {
        return -jz * std::sin(theta) + jx * std::cos(theta);
    }
    double second(double theta) const {
        const double c = std::cos(theta), s = std::sin(theta);
        return c * c * jzz + s * s * jxx + c * s * sym_zx;
    }
    double variance(double theta) const {
        const double mu = mean(theta);
        return second(theta) - mu * mu;
    }
};

inline SpinMoments spin_moments(const Eigen::VectorXcd& amps, const GeneratorSet& gens) {
    const Eigen::VectorXcd wz = gens.jz.apply(amps);
    const Eigen::VectorXcd wx = gens.jx.apply(amps);
    SpinMoments m{};
    m.jz = expectation(gens.jz, amps);
    m.jx = expectation(gens.jx, amps);
    m.jy = expectation(gens.jy, amps);
    m.jzz = wz.squaredNorm();
    m.jxx = wx.squaredNorm();
    m.sym_zx = 2.0 * wz.dot(wx).real();
    return m;
}

inline SpinMoments spin_moments(const StateVector& psi, const GeneratorSet& gens) {
    return spin_moments(psi.amps(), gens);
}

inline SpinMoments spin_moments(const TensorState& psi, const GeneratorSet& gens) {
    return spin_moments(psi.amps(), gens);
}

inline SpinMoments spin_moments(const DensityOperator& rho, const GeneratorSet& gens) {
    const Eigen::MatrixXcd z = gens.jz.apply(rho.matrix());
    const Eigen::MatrixXcd x = gens.jx.apply(rho.matrix());
    SpinMoments m{};
    m.jz = z.trace().real();
    m.jx = x.trace().real();
    m.jy = gens.jy.apply(rho.matrix()).trace().real();
    m.jzz = gens.jz.trace_product(z).real();
    m.jxx = gens.jx.trace_product(x).real();
    m.sym_zx = 2.0 * gens.jz.trace_product(x).real();
    return m;
}

namespace detail {

inline double signal_derivative_or_throw(const SpinMoments& m, double theta) {
    const double d = m.derivative(theta);
    if (std::abs(d) <= 1e-12)
        throw VanishingSignal(
            "estimator_sensitivity: d<Jz(theta)>/dtheta vanishes at this working point");
    return d;
}

template <typename State>
SensitivityReport sensitivity_impl(const State& state, double theta, int m,
                                   const GeneratorSet& gens, double fisher) {
    if (m < 1) throw InvalidArgs("estimator_sensitivity: m must be >= 1");
    const SpinMoments mom = spin_moments(state, gens);
    const double d = signal_derivative_or_throw(mom, theta);
    const double delta2 = mom.variance(theta) / (m * d * d);
    return SensitivityReport{theta, m, delta2, crlb(fisher, m)};
}

}  // namespace detail

/// Error-propagation variance of the imbalance estimator at working point
/// theta, plus the CRLB of the same state under the Jy generator.
inline SensitivityReport estimator_sensitivity(const StateVector& psi, double theta, int m,
                                               const GeneratorSet& gens) {
    return detail::sensitivity_impl(psi, theta, m, gens, qfi_pure(psi, gens.jy));
}

inline SensitivityReport estimator_sensitivity(const TensorState& psi, double theta, int m,
                                               const GeneratorSet& gens) {
    return detail::sensitivity_impl(psi, theta, m, gens, qfi_pure(psi, gens.jy));
}

inline SensitivityReport estimator_sensitivity(const DensityOperator& rho, double theta, int m,
                                               const GeneratorSet& gens) {
    return detail::sensitivity_impl(rho, theta, m, gens, qfi_mixed(rho, gens.jy));
}

namespace detail {

template <typename State>
double xi_squared_impl(const State& state, const GeneratorSet& gens, int n_particles) {
    const SpinMoments m = spin_moments(state, gens);
    if (std::abs(m.jx) <= 1e-12)
        throw VanishingSignal("xi_squared: <Jx> vanishes for this state");
    return n_particles * (m.jzz - m.jz * m.jz) / (m.jx * m.jx);
}

template <typename State>
double xi_s_squared_impl(const State& state, const GeneratorSet& gens, int n_particles) {
    const SpinMoments m = spin_moments(state, gens);
    const double denom = m.jx * m.jx + m.jy * m.jy;
    if (denom <= 1e-24)
        throw VanishingSignal("xi_s_squared: <Jx>^2 + <Jy>^2 vanishes for this state");
    return n_particles * (m.jzz - m.jz * m.jz) / denom;
}

}  // namespace detail

/// Spin-squeezing witness xi^2 = N Var(Jz) / <Jx>^2; values below 1 certify
/// particle entanglement.
inline double xi_squared(const StateVector& psi, const GeneratorSet& gens) {
    return detail::xi_squared_impl(psi, gens, psi.particles());
}
inline double xi_squared(const DensityOperator& rho, const GeneratorSet& gens) {
    return detail::xi_squared_impl(rho, gens, rho.particles());
}
inline double xi_squared(const TensorState& psi, const GeneratorSet& gens) {
    return detail::xi_squared_impl(psi, gens, psi.particles());
}

/// Two-direction variant xi_S^2 = N Var(Jz) / (<Jx>^2 + <Jy>^2).
inline double xi_s_squared(const StateVector& psi, const GeneratorSet& gens) {
    return detail::xi_s_squared_impl(psi, gens, psi.particles());
}
inline double xi_s_squared(const DensityOperator& rho, const GeneratorSet& gens) {
    return detail::xi_s_squared_impl(rho, gens, rho.particles());
}
inline double xi_s_squared(const TensorState& psi, const GeneratorSet& gens) {
    return detail::xi_s_squared_impl(psi, gens, psi.particles());
}

}  // namespace mmqi
