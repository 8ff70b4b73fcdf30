#include "rmtd/linalg.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "rmtd/error.hpp"

extern "C" void openblas_set_num_threads(int num_threads);

namespace rmtd {

namespace {

// Ensemble workers provide the parallelism; BLAS threads would only make the
// results depend on scheduling.
struct SingleThreadedBlas {
    SingleThreadedBlas() { openblas_set_num_threads(1); }
};
const SingleThreadedBlas single_threaded_blas{};

}  // namespace

double max_abs(const ComplexMatrix& a) {
    return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

double hermiticity_residual(const ComplexMatrix& a) {
    if (a.rows() != a.cols()) {
        throw Error(ErrorKind::DimensionMismatch, "hermiticity check needs a square matrix");
    }
    if (a.size() == 0) return 0.0;
    return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

bool is_hermitian(const ComplexMatrix& a, double rel_tol) {
    if (a.rows() != a.cols()) return false;
    return hermiticity_residual(a) <= rel_tol * max_abs(a);
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

HermitianEigen hermitian_eigendecompose(const ComplexMatrix& a) {
    if (a.rows() != a.cols()) {
        throw Error(ErrorKind::DimensionMismatch, "eigendecomposition needs a square matrix");
    }
    const double scale = max_abs(a);
    const double herm = hermiticity_residual(a);
    if (herm > kHermitianTolerance * scale) {
        throw Error(ErrorKind::NotHermitian,
                    "hermiticity residual " + std::to_string(herm) + " exceeds tolerance");
    }

    const auto n = static_cast<lapack_int>(a.rows());
    HermitianEigen out;
    out.values.resize(n);
    // Symmetrize so LAPACK sees exactly the Hermitian part.
    out.vectors = (a + a.adjoint()) * 0.5;
    if (n == 0) return out;

    ComplexMatrix work = std::move(out.vectors);
    out.vectors.resize(n, n);
    lapack_int found = 0;
    std::vector<lapack_int> support(2 * static_cast<std::size_t>(n));
    const lapack_int info = LAPACKE_zheevr(
        LAPACK_ROW_MAJOR, 'V', 'A', 'U', n, reinterpret_cast<lapack_complex_double*>(work.data()), n, 0.0, 0.0, 0,
        0, 0.0, &found, out.values.data(), reinterpret_cast<lapack_complex_double*>(out.vectors.data()), n,
        support.data());
    if (info != 0 || found != n) {
        throw Error(ErrorKind::ConvergenceFailure, "zheevr returned info=" + std::to_string(info));
    }

    const ComplexMatrix& w = out.vectors;
    const double ortho = (w.adjoint() * w - ComplexMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
    const double recon = scale == 0.0
                             ? 0.0
                             : (a * w - w * out.values.asDiagonal()).cwiseAbs().maxCoeff() / scale;
    if (!(ortho <= kEigenResidualTolerance) || !(recon <= kEigenResidualTolerance)) {
        throw Error(ErrorKind::ConvergenceFailure,
                    "eigendecomposition residual too large (orthonormality " + std::to_string(ortho) +
                        ", reconstruction " + std::to_string(recon) + ")");
    }
    return out;
}

RealVector hermitian_eigenvalues(const ComplexMatrix& a) {
    if (!is_hermitian(a)) {
        throw Error(ErrorKind::NotHermitian, "eigenvalues requested for a non-Hermitian matrix");
    }
    const auto n = static_cast<lapack_int>(a.rows());
    RealVector values(n);
    ComplexMatrix work = (a + a.adjoint()) * 0.5;
    if (n == 0) return values;
    lapack_int found = 0;
    lapack_complex_double unused{};
    lapack_int unused_support[2] = {0, 0};
    const lapack_int info = LAPACKE_zheevr(LAPACK_ROW_MAJOR, 'N', 'A', 'U', n,
                                           reinterpret_cast<lapack_complex_double*>(work.data()), n, 0.0, 0.0,
                                           0, 0, 0.0, &found, values.data(), &unused, 1, unused_support);
    if (info != 0 || found != n) {
        throw Error(ErrorKind::ConvergenceFailure, "zheevr returned info=" + std::to_string(info));
    }
    return values;
}

ComplexMatrix partial_trace_env(const ComplexMatrix& rho_full, std::size_t env_dim) {
    const auto n = static_cast<Eigen::Index>(env_dim);
    if (env_dim == 0 || rho_full.rows() != 2 * n || rho_full.cols() != 2 * n) {
        throw Error(ErrorKind::DimensionMismatch,
                    "partial trace expects a " + std::to_string(2 * env_dim) + "-dimensional operator");
    }
    ComplexMatrix out(2, 2);
    for (Eigen::Index p = 0; p < 2; ++p) {
        for (Eigen::Index q = 0; q < 2; ++q) {
            out(p, q) = rho_full.block(p * n, q * n, n, n).trace();
        }
    }
    return out;
}

Matrix2c reduced_from_pure(const Eigen::Ref<const ComplexVector>& psi, std::size_t env_dim) {
    const auto n = static_cast<Eigen::Index>(env_dim);
    if (psi.size() != 2 * n) {
        throw Error(ErrorKind::DimensionMismatch, "state length does not match 2 * env_dim");
    }
    const auto up = psi.head(n);
    const auto down = psi.tail(n);
    Matrix2c rho;
    rho(0, 0) = up.squaredNorm();
    rho(1, 1) = down.squaredNorm();
    rho(1, 0) = up.dot(down);  // sum_n down_n conj(up_n)
    rho(0, 1) = std::conj(rho(1, 0));
    return rho;
}

double trace_norm_2x2(const Matrix2c& a) {
    const double herm = (a - a.adjoint()).cwiseAbs().maxCoeff();
    const double scale = a.cwiseAbs().maxCoeff();
    if (herm > kHermitianTolerance * scale) {
        throw Error(ErrorKind::NotHermitian, "trace norm needs a Hermitian 2x2 matrix");
    }
    // Eigenvalues m +- r with m = tr/2, r = sqrt(((a00 - a11)/2)^2 + |a10|^2).
    const double m = 0.5 * (a(0, 0).real() + a(1, 1).real());
    const double h = 0.5 * (a(0, 0).real() - a(1, 1).real());
    const double r = std::hypot(h, std::abs(a(1, 0)));
    return std::abs(m + r) + std::abs(m - r);
}

double trace_norm_2x2(const ComplexMatrix& a) {
    if (a.rows() != 2 || a.cols() != 2) {
        throw Error(ErrorKind::DimensionMismatch, "trace_norm_2x2 expects a 2x2 matrix");
    }
    return trace_norm_2x2(Matrix2c(a));
}

}  // namespace rmtd
