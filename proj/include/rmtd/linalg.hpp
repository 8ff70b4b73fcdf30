#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstddef>

// Dense complex linear algebra used by the simulator.
//
// Basis convention for composite qubit (x) environment spaces: qubit-major,
// i.e. the full index of |q>|n> is q * env_dim + n. kron() and
// partial_trace_env() both follow it, and every other module relies on it.

namespace rmtd {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Matrix2c = Eigen::Matrix2cd;

/// Relative tolerance for treating a matrix as Hermitian.
inline constexpr double kHermitianTolerance = 1e-12;
/// Reconstruction and orthonormality target for eigendecompositions.
inline constexpr double kEigenResidualTolerance = 1e-10;

struct HermitianEigen {
    RealVector values;     // ascending
    ComplexMatrix vectors; // orthonormal columns
};

double max_abs(const ComplexMatrix& a);

/// max_ij |A_ij - conj(A_ji)|.
double hermiticity_residual(const ComplexMatrix& a);

bool is_hermitian(const ComplexMatrix& a, double rel_tol = kHermitianTolerance);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Eigendecomposition of a Hermitian matrix (LAPACK zheevr). The result is
/// checked for reconstruction residual and orthonormality; a decomposition
/// that misses kEigenResidualTolerance raises ConvergenceFailure.
HermitianEigen hermitian_eigendecompose(const ComplexMatrix& a);

/// Eigenvalues only, ascending.
RealVector hermitian_eigenvalues(const ComplexMatrix& a);

/// Traces out the environment of a (2 * env_dim)^2 operator.
ComplexMatrix partial_trace_env(const ComplexMatrix& rho_full, std::size_t env_dim);

/// Reduced 2x2 density matrix of a pure full state |psi><psi| without forming
/// the full projector.
Matrix2c reduced_from_pure(const Eigen::Ref<const ComplexVector>& psi, std::size_t env_dim);

/// Sum of |eigenvalues| of a Hermitian 2x2 matrix.
double trace_norm_2x2(const Matrix2c& a);
double trace_norm_2x2(const ComplexMatrix& a);

}  // namespace rmtd
