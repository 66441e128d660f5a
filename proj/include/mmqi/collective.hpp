#pragma once

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "mmqi/basis.hpp"
#include "mmqi/errors.hpp"
#include "mmqi/one_body.hpp"
#include "mmqi/sparse_hermitian.hpp"

namespace mmqi {

/// A generator direction: one of the coordinate axes or a real unit 3-vector.
class Axis {
public:
    static Axis x() { return Axis(Eigen::Vector3d::UnitX(), 0); }
    static Axis y() { return Axis(Eigen::Vector3d::UnitY(), 0); }
    static Axis z() { return Axis(Eigen::Vector3d::UnitZ(), 0); }

    explicit Axis(const Eigen::Vector3d& n) : n_(n) {
        if (std::abs(n_.norm() - 1.0) > 1e-12)
            throw NonUnitDirection("Axis: direction vector must have unit norm");
    }

    const Eigen::Vector3d& direction() const { return n_; }

private:
    Axis(const Eigen::Vector3d& n, int) : n_(n) {}
    Eigen::Vector3d n_;
};

/// The three collective generators on a common sector.
/// Jx couples every pair (a_n, b_n) with 1/2, Jy with -i/2, Jz is the
/// half-difference of the arm populations; each is the sum of its per-mode
/// components.
struct GeneratorSet {
    SparseHermitian jx;
    SparseHermitian jy;
    SparseHermitian jz;
};

namespace detail {

/// Single-particle 2M x 2M coefficient matrix of J along n for one mode pair.
inline void add_pair_block(Eigen::MatrixXcd& coeff, int mode, int modes_per_arm,
                           const Eigen::Vector3d& n) {
    const int a = mode;
    const int b = mode + modes_per_arm;
    coeff(a, a) += 0.5 * n.z();
    coeff(b, b) += -0.5 * n.z();
    coeff(a, b) += 0.5 * Complex(n.x(), -n.y());
    coeff(b, a) += 0.5 * Complex(n.x(), n.y());
}

inline Eigen::MatrixXcd collective_coeff(int modes_per_arm, const Eigen::Vector3d& n) {
    Eigen::MatrixXcd coeff = Eigen::MatrixXcd::Zero(2 * modes_per_arm, 2 * modes_per_arm);
    for (int mode = 0; mode < modes_per_arm; ++mode)
        add_pair_block(coeff, mode, modes_per_arm, n);
    return coeff;
}

}  // namespace detail

inline GeneratorSet build_generators(const FockBasis& basis) {
    const int m = basis.modes_per_arm();
    return GeneratorSet{
        one_body_operator(basis, detail::collective_coeff(m, Eigen::Vector3d::UnitX())),
        one_body_operator(basis, detail::collective_coeff(m, Eigen::Vector3d::UnitY())),
        one_body_operator(basis, detail::collective_coeff(m, Eigen::Vector3d::UnitZ())),
    };
}

/// J_axis^{(n)}: the component acting on the single pair (a_n, b_n).
inline SparseHermitian per_mode_generator(const FockBasis& basis, int mode, const Axis& axis) {
    if (mode < 0 || mode >= basis.modes_per_arm())
        throw ModeOutOfRange("per_mode_generator: mode " + std::to_string(mode) +
                             " out of range for M=" + std::to_string(basis.modes_per_arm()));
    Eigen::MatrixXcd coeff =
        Eigen::MatrixXcd::Zero(basis.total_modes(), basis.total_modes());
    detail::add_pair_block(coeff, mode, basis.modes_per_arm(), axis.direction());
    return one_body_operator(basis, coeff);
}

inline SparseHermitian direction_generator(const GeneratorSet& gens, const Axis& axis) {
    const Eigen::Vector3d& n = axis.direction();
    return gens.jx.scaled(n.x()) + gens.jy.scaled(n.y()) + gens.jz.scaled(n.z());
}

/// U(theta) = exp(-i theta G) through the Hermitian eigendecomposition of G.
inline Eigen::MatrixXcd rotation(const SparseHermitian& gen, double theta,
                                 std::size_t dense_cap = kDenseCap) {
    if (gen.dim() > dense_cap)
        throw DimensionCap("rotation: dimension " + std::to_string(gen.dim()) +
                           " exceeds dense cap " + std::to_string(dense_cap));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(gen.dense());
    const Eigen::VectorXd& evals = solver.eigenvalues();
    Eigen::VectorXcd phases(evals.size());
    for (Eigen::Index i = 0; i < evals.size(); ++i)
        phases[i] = std::exp(Complex(0.0, -theta * evals[i]));
    return solver.eigenvectors() * phases.asDiagonal() * solver.eigenvectors().adjoint();
}

/// Heisenberg-picture Jz of the Mach-Zehnder transformation:
/// Jz(theta) = Jz cos(theta) + Jx sin(theta), which equals the conjugation
/// U(theta) Jz U(theta)^dag with U = rotation(jy, theta).
inline Eigen::MatrixXcd heisenberg_jz(const GeneratorSet& gens, double theta,
                                      std::size_t dense_cap = kDenseCap) {
    if (gens.jz.dim() > dense_cap)
        throw DimensionCap("heisenberg_jz: dimension exceeds dense cap");
    return std::cos(theta) * gens.jz.dense() + std::sin(theta) * gens.jx.dense();
}

}  // namespace mmqi
