#pragma once

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "mmqi/basis.hpp"
#include "mmqi/errors.hpp"
#include "mmqi/sparse_hermitian.hpp"
#include "mmqi/state.hpp"

namespace mmqi {

inline constexpr double kHermTol = 1e-12;
inline constexpr double kExpectationImagTol = 1e-10;

/// Second-quantized one-body operator sum_{mn} c_{mn} c_m^dag c_n on a
/// fixed-N sector. Only the upper triangle is computed; Hermiticity of the
/// result is inherited from the Hermiticity of `coeff`.
inline SparseHermitian one_body_operator(const FockBasis& basis, const Eigen::MatrixXcd& coeff) {
    const int modes = basis.total_modes();
    if (coeff.rows() != modes || coeff.cols() != modes)
        throw DimMismatch("one_body_operator: coefficient matrix must be 2M x 2M");
    if ((coeff - coeff.adjoint()).cwiseAbs().maxCoeff() > kHermTol)
        throw NonHermitianCoeff("one_body_operator: coefficient matrix is not Hermitian");

    SparseHermitian::Builder builder(basis.dim());
    Occupation moved;
    for (std::size_t col = 0; col < basis.dim(); ++col) {
        const Occupation& occ = basis.state(col);
        Complex diag = 0.0;
        for (int n = 0; n < modes; ++n) {
            if (occ[n] == 0) continue;
            for (int m = 0; m < modes; ++m) {
                const Complex c = coeff(m, n);
                if (c == Complex(0.0, 0.0)) continue;
                if (m == n) {
                    diag += c * static_cast<double>(occ[n]);
                    continue;
                }
                moved = occ;
                moved[n] -= 1;
                moved[m] += 1;
                const std::size_t row = basis.rank(moved);
                if (row >= col) continue;  // mirror entry is built from the other column
                const double amp = std::sqrt(static_cast<double>(occ[n]) * (occ[m] + 1));
                builder.add(row, col, c * amp);
            }
        }
        if (diag != Complex(0.0, 0.0)) builder.add(col, col, diag);
    }
    return builder.build();
}

/// Total particle-number operator on the sector (N times the identity).
inline SparseHermitian number_operator(const FockBasis& basis) {
    return one_body_operator(basis, Eigen::MatrixXcd::Identity(basis.total_modes(),
                                                               basis.total_modes()));
}

inline double expectation(const SparseHermitian& op, const Eigen::VectorXcd& amps) {
    const Complex value = amps.dot(op.apply(amps));
    if (std::abs(value.imag()) > kExpectationImagTol)
        throw NonRealExpectation("expectation: imaginary residue " +
                                 std::to_string(value.imag()));
    return value.real();
}

inline double expectation(const SparseHermitian& op, const StateVector& psi) {
    return expectation(op, psi.amps());
}

inline double expectation(const SparseHermitian& op, const DensityOperator& rho) {
    const Complex value = op.trace_product(rho.matrix());
    if (std::abs(value.imag()) > kExpectationImagTol)
        throw NonRealExpectation("expectation: imaginary residue " +
                                 std::to_string(value.imag()));
    return value.real();
}

}  // namespace mmqi
