#include "rmtd/observables.hpp"

#include <algorithm>
#include <cmath>

#include "rmtd/error.hpp"

namespace rmtd {

namespace {
constexpr double kStateTolerance = 1e-9;

void require_state(const Matrix2c& rho) {
    const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    const Complex tr = rho.trace();
    if (herm > kStateTolerance || std::abs(tr - 1.0) > kStateTolerance) {
        throw Error(ErrorKind::NotAState, "matrix is not a unit-trace Hermitian 2x2 state");
    }
}

void require_same_grid(const TimeGrid& a, std::size_t na, const TimeGrid& b, std::size_t nb) {
    if (a.points != b.points || a.size() != na || b.size() != nb) {
        throw Error(ErrorKind::GridMismatch, "series are not sampled on the same grid");
    }
}
}  // namespace

Eigen::Vector3d bloch_vector(const Matrix2c& rho) {
    return {2.0 * rho(1, 0).real(), 2.0 * rho(1, 0).imag(), rho(0, 0).real() - rho(1, 1).real()};
}

Eigen::Vector3d bloch_stderr(const RhoStderr& err) {
    return {2.0 * err.re_rho21, 2.0 * err.im_rho21, 2.0 * err.rho11};
}

double purity(const Matrix2c& rho) {
    require_state(rho);
    const double p = (rho * rho).trace().real();
    if (p < 0.5 - kStateTolerance || p > 1.0 + kStateTolerance) {
        throw Error(ErrorKind::NotAState, "purity outside [1/2, 1]: not positive semidefinite");
    }
    return p;
}

double purity_diag(double r) {
    if (!(r >= 0.0 && r <= 1.0)) throw Error(ErrorKind::OutOfRange, "diagonal weight must lie in [0, 1]");
    return 1.0 - 2.0 * r * (1.0 - r);
}

double purity_stderr(const Matrix2c& rho, const RhoStderr& err) {
    // P = 1 - 2 r (1 - r) + 2 |rho_21|^2 with r = rho_11.
    const double r = rho(0, 0).real();
    const double d11 = 4.0 * r - 2.0;
    const double dre = 4.0 * rho(1, 0).real();
    const double dim = 4.0 * rho(1, 0).imag();
    return std::sqrt(std::pow(d11 * err.rho11, 2) + std::pow(dre * err.re_rho21, 2) +
                     std::pow(dim * err.im_rho21, 2));
}

double trace_distance(const Matrix2c& rho1, const Matrix2c& rho2) {
    return trace_norm_2x2(Matrix2c(rho1 - rho2));
}

std::vector<double> trace_distance_series(const TimeGrid& grid_a, std::span<const Matrix2c> a,
                                          const TimeGrid& grid_b, std::span<const Matrix2c> b) {
    require_same_grid(grid_a, a.size(), grid_b, b.size());
    std::vector<double> out(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) out[k] = trace_distance(a[k], b[k]);
    return out;
}

double max_trace_distance(const TimeGrid& grid_a, std::span<const Matrix2c> a, const TimeGrid& grid_b,
                          std::span<const Matrix2c> b) {
    const auto d = trace_distance_series(grid_a, a, grid_b, b);
    return d.empty() ? 0.0 : *std::max_element(d.begin(), d.end());
}

double max_trace_distance(const AveragedSeries& a, const AveragedSeries& b) {
    return max_trace_distance(a.grid, a.mean_rho, b.grid, b.mean_rho);
}

BlochTrajectory bloch_trajectory(const AveragedSeries& series) {
    BlochTrajectory traj;
    traj.grid = series.grid;
    traj.vectors.reserve(series.mean_rho.size());
    traj.stderr.reserve(series.mean_rho.size());
    for (std::size_t k = 0; k < series.mean_rho.size(); ++k) {
        traj.vectors.push_back(bloch_vector(series.mean_rho[k]));
        traj.stderr.push_back(bloch_stderr(series.stderr_rho[k]));
    }
    return traj;
}

EquilibriumEstimate equilibrium_estimate(const AveragedSeries& series, double tail_fraction) {
    if (!(tail_fraction > 0.0 && tail_fraction <= 0.5)) {
        throw Error(ErrorKind::OutOfRange, "tail_fraction must lie in (0, 1/2]");
    }
    const auto& t = series.grid.points;
    if (t.size() < 2 || series.mean_rho.size() != t.size()) {
        throw Error(ErrorKind::GridTooShort, "series too short for an equilibrium estimate");
    }
    const double t_start = t.back() - tail_fraction * (t.back() - t.front());
    std::vector<std::size_t> window;
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (t[k] >= t_start) window.push_back(k);
    }
    if (window.size() < 2) throw Error(ErrorKind::GridTooShort, "tail window holds fewer than two points");

    EquilibriumEstimate est;
    est.n_points = window.size();
    const double n = static_cast<double>(window.size());
    Eigen::Vector3d mean_err = Eigen::Vector3d::Zero();
    double purity_err = 0.0;
    for (std::size_t k : window) {
        est.bloch += bloch_vector(series.mean_rho[k]);
        mean_err += bloch_stderr(series.stderr_rho[k]);
        est.purity += purity(series.mean_rho[k]);
        purity_err += purity_stderr(series.mean_rho[k], series.stderr_rho[k]);
    }
    est.bloch /= n;
    mean_err /= n;
    est.purity /= n;
    purity_err /= n;

    Eigen::Vector3d scatter = Eigen::Vector3d::Zero();
    double purity_scatter = 0.0;
    for (std::size_t k : window) {
        scatter += (bloch_vector(series.mean_rho[k]) - est.bloch).cwiseAbs2();
        purity_scatter += std::pow(purity(series.mean_rho[k]) - est.purity, 2);
    }
    const Eigen::Vector3d time_err = (scatter / ((n - 1.0) * n)).cwiseSqrt();
    est.stderr = (mean_err.cwiseAbs2() + time_err.cwiseAbs2()).cwiseSqrt();
    est.purity_stderr = std::hypot(purity_err, std::sqrt(purity_scatter / ((n - 1.0) * n)));
    return est;
}

}  // namespace rmtd
