#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <vector>

#include "rmtd/linalg.hpp"
#include "rmtd/propagation.hpp"

namespace rmtd {

/// (x, y, z) with rho = (1 + x sigma_x + y sigma_y + z sigma_z) / 2, so that
/// rho_21 = (x + i y) / 2 and rho_11 = (1 + z) / 2.
Eigen::Vector3d bloch_vector(const Matrix2c& rho);
Eigen::Vector3d bloch_stderr(const RhoStderr& err);

/// tr(rho^2); rejects matrices that are not Hermitian with unit trace.
double purity(const Matrix2c& rho);
/// Purity of diag(r, 1 - r).
double purity_diag(double r);
/// First-order error propagation of the entrywise standard errors into tr(rho^2).
double purity_stderr(const Matrix2c& rho, const RhoStderr& err);

/// tr|rho1 - rho2|, equal to the Euclidean distance of the Bloch vectors.
double trace_distance(const Matrix2c& rho1, const Matrix2c& rho2);

std::vector<double> trace_distance_series(const TimeGrid& grid_a, std::span<const Matrix2c> a,
                                          const TimeGrid& grid_b, std::span<const Matrix2c> b);

/// D_max: largest trace distance over the common grid points.
double max_trace_distance(const TimeGrid& grid_a, std::span<const Matrix2c> a, const TimeGrid& grid_b,
                          std::span<const Matrix2c> b);
double max_trace_distance(const AveragedSeries& a, const AveragedSeries& b);

struct BlochTrajectory {
    TimeGrid grid;
    std::vector<Eigen::Vector3d> vectors;
    std::vector<Eigen::Vector3d> stderr;
};

BlochTrajectory bloch_trajectory(const AveragedSeries& series);

struct EquilibriumEstimate {
    Eigen::Vector3d bloch = Eigen::Vector3d::Zero();
    /// Per component: mean ensemble error over the window combined with the
    /// time scatter of the window.
    Eigen::Vector3d stderr = Eigen::Vector3d::Zero();
    double purity = 0.0;
    double purity_stderr = 0.0;
    std::size_t n_points = 0;
};

inline constexpr double kDefaultTailFraction = 0.25;

/// Time average over t >= t_end - tail_fraction (t_end - t_start).
EquilibriumEstimate equilibrium_estimate(const AveragedSeries& series,
                                         double tail_fraction = kDefaultTailFraction);

}  // namespace rmtd
