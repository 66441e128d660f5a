#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mmqi/basis.hpp"
#include "mmqi/collective.hpp"
#include "mmqi/errors.hpp"
#include "mmqi/sparse_hermitian.hpp"
#include "mmqi/states.hpp"

namespace mmqi {

/// Per-species amplitudes have the same shape as bosonic arm amplitudes:
/// one normalized (alpha, beta) pair per particle.
using SingleParticleAmps = ArmAmplitudes;

namespace detail {

inline std::size_t tensor_dim(int n_particles, int modes_per_arm, std::size_t cap) {
    if (n_particles < 1) throw InvalidArgs("tensor state: needs at least one particle");
    if (modes_per_arm < 1) throw InvalidArgs("tensor state: needs at least one mode per arm");
    const std::size_t local = 2 * static_cast<std::size_t>(modes_per_arm);
    std::size_t dim = 1;
    for (int j = 0; j < n_particles; ++j) {
        if (dim > cap / local)
            throw DimensionCap("tensor state: (2M)^N exceeds cap of " + std::to_string(cap));
        dim *= local;
    }
    return dim;
}

}  // namespace detail

/// State of N distinguishable particles, each living in the same 2M modes.
/// Amplitudes are stored row-major in particle order: particle 0 is the
/// most significant digit of the flat index.
class TensorState {
public:
    TensorState(int n_particles, int modes_per_arm, Eigen::VectorXcd amps,
                std::size_t cap = kDefaultDimCap)
        : n_particles_(n_particles), modes_per_arm_(modes_per_arm), amps_(std::move(amps)) {
        const std::size_t dim = detail::tensor_dim(n_particles, modes_per_arm, cap);
        if (static_cast<std::size_t>(amps_.size()) != dim)
            throw DimMismatch("TensorState: amplitude count does not match (2M)^N");
        if (std::abs(amps_.norm() - 1.0) > kNormTol)
            throw NormalizationError("TensorState: amplitudes are not normalized");
    }

    int particles() const { return n_particles_; }
    int modes_per_arm() const { return modes_per_arm_; }
    std::size_t dim() const { return amps_.size(); }
    const Eigen::VectorXcd& amps() const { return amps_; }

private:
    int n_particles_;
    int modes_per_arm_;
    Eigen::VectorXcd amps_;
};

/// Tensor product of single-particle states, one factor per species.
inline TensorState product_state(const std::vector<SingleParticleAmps>& particles,
                                 std::size_t cap = kDefaultDimCap) {
    if (particles.empty()) throw InvalidArgs("product_state: needs at least one particle");
    const int m = particles.front().modes_per_arm();
    for (const auto& p : particles)
        if (p.modes_per_arm() != m)
            throw DimMismatch("product_state: all particles must share the mode count");
    const int n = static_cast<int>(particles.size());
    const std::size_t dim = detail::tensor_dim(n, m, cap);
    const int local = 2 * m;

    std::vector<Eigen::VectorXcd> factors;
    factors.reserve(particles.size());
    for (const auto& p : particles) factors.push_back(p.concatenated());

    Eigen::VectorXcd amps(dim);
    for (std::size_t idx = 0; idx < dim; ++idx) {
        Complex a = 1.0;
        std::size_t rest = idx;
        for (int j = n - 1; j >= 0; --j) {
            a *= factors[j][rest % local];
            rest /= local;
        }
        amps[idx] = a;
    }
    return TensorState(n, m, std::move(amps), cap);
}

/// Collective generator sum_j J^{(j)} on the N-particle tensor space; each
/// slot uses the same (a_n, b_n) pairing as the bosonic generators.
inline SparseHermitian collective_j_dist(int n_particles, int modes_per_arm, const Axis& axis,
                                         std::size_t cap = kDefaultDimCap) {
    const std::size_t dim = detail::tensor_dim(n_particles, modes_per_arm, cap);
    const int local = 2 * modes_per_arm;
    const Eigen::MatrixXcd g = detail::collective_coeff(modes_per_arm, axis.direction());

    std::vector<std::size_t> stride(n_particles);
    stride[n_particles - 1] = 1;
    for (int j = n_particles - 2; j >= 0; --j) stride[j] = stride[j + 1] * local;

    SparseHermitian::Builder builder(dim);
    std::vector<int> digits(n_particles);
    for (std::size_t col = 0; col < dim; ++col) {
        std::size_t rest = col;
        for (int j = n_particles - 1; j >= 0; --j) {
            digits[j] = static_cast<int>(rest % local);
            rest /= local;
        }
        Complex diag = 0.0;
        for (int j = 0; j < n_particles; ++j) {
            const int d = digits[j];
            diag += g(d, d);
            for (int target = 0; target < local; ++target) {
                if (target == d || g(target, d) == Complex(0.0, 0.0)) continue;
                const std::size_t row = col + (target - d) * stride[j];
                if (row >= col) continue;
                builder.add(row, col, g(target, d));
            }
        }
        if (diag != Complex(0.0, 0.0)) builder.add(col, col, diag);
    }
    return builder.build();
}

inline GeneratorSet build_generators_distinguishable(int n_particles, int modes_per_arm,
                                                     std::size_t cap = kDefaultDimCap) {
    return GeneratorSet{
        collective_j_dist(n_particles, modes_per_arm, Axis::x(), cap),
        collective_j_dist(n_particles, modes_per_arm, Axis::y(), cap),
        collective_j_dist(n_particles, modes_per_arm, Axis::z(), cap),
    };
}

/// (|a...a> + |b...b>)/sqrt(2): every particle in mode pair `mode`.
inline TensorState noon_distinguishable(int n_particles, int modes_per_arm, int mode,
                                        std::size_t cap = kDefaultDimCap) {
    if (mode < 0 || mode >= modes_per_arm)
        throw ModeOutOfRange("noon_distinguishable: mode out of range");
    const std::size_t dim = detail::tensor_dim(n_particles, modes_per_arm, cap);
    const int local = 2 * modes_per_arm;
    std::size_t idx_a = 0, idx_b = 0;
    for (int j = 0; j < n_particles; ++j) {
        idx_a = idx_a * local + mode;
        idx_b = idx_b * local + (mode + modes_per_arm);
    }
    Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(dim);
    amps[idx_a] = 1.0 / std::sqrt(2.0);
    amps[idx_b] = 1.0 / std::sqrt(2.0);
    return TensorState(n_particles, modes_per_arm, std::move(amps), cap);
}

/// Closed-form single-particle QFI along Jz: 1 - (|alpha|^2 - |beta|^2)^2.
inline double qfi_single_particle(const SingleParticleAmps& amps) {
    const double d = amps.imbalance();
    return 1.0 - d * d;
}

}  // namespace mmqi
