#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "rmtd/ensembles.hpp"
#include "rmtd/linalg.hpp"
#include "rmtd/model.hpp"

namespace rmtd {

/// Dimensionless times; the Heisenberg time of the environment is t = 2 pi.
struct TimeGrid {
    std::vector<double> points;

    /// n_points equally spaced times on [0, t_max].
    static TimeGrid uniform(double t_max, std::size_t n_points);
    /// 512 points on [0, 8 pi].
    static TimeGrid standard();

    std::size_t size() const { return points.size(); }
    void validate() const;
};

/// Standard errors of the independent entries of a qubit density matrix.
struct RhoStderr {
    double rho11 = 0.0;
    double re_rho21 = 0.0;
    double im_rho21 = 0.0;
};

/// Ensemble average of the reduced qubit state on a time grid.
struct AveragedSeries {
    TimeGrid grid;
    std::vector<Matrix2c> mean_rho;
    std::vector<RhoStderr> stderr_rho;
    /// Mean over realizations of tr(rho_k(t)^2); bounds purity(mean_rho) from above.
    std::vector<double> mean_realization_purity;
    std::size_t n_run = 0;
};

struct EnsembleOptions {
    std::size_t threads = 0;      // 0: hardware concurrency
    std::uint32_t max_attempts = 4;  // draws per realization before giving up
};

/// Reduced states of one realization, obtained by exact propagation in the
/// eigenbasis of h_mu. The qubit state must be pure.
std::vector<Matrix2c> evolve_realization(const ModelParams& params, const EnvironmentDraw& draw,
                                         const InitialState& init, const TimeGrid& grid);

/// Per-realization reduced states for an arbitrary (possibly mixed) qubit
/// state: the state is split into its two eigen-projectors, both evolved with
/// the same draw and recombined.
std::vector<Matrix2c> evolve_mixture(const ModelParams& params, const EnvironmentDraw& draw,
                                     const InitialState& init, const TimeGrid& grid);

/// Averages n_run realizations drawn from SeedPolicy{master_seed, k}. The
/// result is bitwise independent of the number of worker threads.
AveragedSeries run_ensemble(const ModelParams& params, const InitialState& init, const TimeGrid& grid,
                            std::size_t n_run, std::uint64_t master_seed,
                            const EnsembleOptions& options = {});

}  // namespace rmtd
