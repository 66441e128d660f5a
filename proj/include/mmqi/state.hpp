#pragma once

#include <memory>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "mmqi/basis.hpp"
#include "mmqi/errors.hpp"
#include "mmqi/sparse_hermitian.hpp"

namespace mmqi {

inline constexpr double kNormTol = 1e-12;

/// Pure N-boson state on a fixed sector: complex amplitudes over the
/// basis ordering of its FockBasis.
class StateVector {
public:
    StateVector(std::shared_ptr<const FockBasis> basis, Eigen::VectorXcd amps)
        : basis_(std::move(basis)), amps_(std::move(amps)) {
        if (static_cast<std::size_t>(amps_.size()) != basis_->dim())
            throw DimMismatch("StateVector: amplitude count does not match basis dimension");
        if (std::abs(amps_.norm() - 1.0) > kNormTol)
            throw NormalizationError("StateVector: amplitudes are not normalized");
    }

    const FockBasis& basis() const { return *basis_; }
    const std::shared_ptr<const FockBasis>& basis_ptr() const { return basis_; }
    const Eigen::VectorXcd& amps() const { return amps_; }
    int particles() const { return basis_->particles(); }

private:
    std::shared_ptr<const FockBasis> basis_;
    Eigen::VectorXcd amps_;
};

/// Mixed state on a fixed sector. Hermiticity and unit trace are enforced
/// here; positivity is checked wherever the matrix is eigendecomposed.
class DensityOperator {
public:
    DensityOperator(std::shared_ptr<const FockBasis> basis, Eigen::MatrixXcd matrix)
        : basis_(std::move(basis)), matrix_(std::move(matrix)) {
        const auto dim = static_cast<std::size_t>(matrix_.rows());
        if (dim != basis_->dim() || matrix_.cols() != matrix_.rows())
            throw DimMismatch("DensityOperator: matrix does not match basis dimension");
        if (dim > kDenseCap)
            throw DimensionCap("DensityOperator: dimension " + std::to_string(dim) +
                               " exceeds dense cap " + std::to_string(kDenseCap));
        const double herm = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
        if (herm > kNormTol)
            throw NonPhysicalState("DensityOperator: matrix is not Hermitian");
        if (std::abs(matrix_.trace().real() - 1.0) > kNormTol ||
            std::abs(matrix_.trace().imag()) > kNormTol)
            throw NonPhysicalState("DensityOperator: trace is not one");
    }

    const FockBasis& basis() const { return *basis_; }
    const std::shared_ptr<const FockBasis>& basis_ptr() const { return basis_; }
    const Eigen::MatrixXcd& matrix() const { return matrix_; }
    int particles() const { return basis_->particles(); }

    double purity() const { return (matrix_ * matrix_).trace().real(); }

    static DensityOperator from_pure(const StateVector& psi) {
        Eigen::MatrixXcd m = psi.amps() * psi.amps().adjoint();
        m = 0.5 * (m + m.adjoint()).eval();
        return DensityOperator(psi.basis_ptr(), std::move(m));
    }

private:
    std::shared_ptr<const FockBasis> basis_;
    Eigen::MatrixXcd matrix_;
};

}  // namespace mmqi
