#include "rmtd/propagation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iostream>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <thread>

#include "rmtd/error.hpp"

namespace rmtd {

TimeGrid TimeGrid::uniform(double t_max, std::size_t n_points) {
    if (!(t_max > 0.0) || n_points < 2) {
        throw Error(ErrorKind::InvalidConfig, "time grid needs t_max > 0 and at least two points");
    }
    TimeGrid g;
    g.points.resize(n_points);
    const double step = t_max / static_cast<double>(n_points - 1);
    for (std::size_t k = 0; k < n_points; ++k) g.points[k] = step * static_cast<double>(k);
    g.points.back() = t_max;
    return g;
}

TimeGrid TimeGrid::standard() { return uniform(8.0 * std::numbers::pi, 512); }

void TimeGrid::validate() const {
    if (points.empty()) throw Error(ErrorKind::GridTooShort, "empty time grid");
    if (!(points.front() >= 0.0)) throw Error(ErrorKind::NegativeTime, "time grid starts below zero");
    for (std::size_t k = 1; k < points.size(); ++k) {
        if (!(points[k] > points[k - 1])) {
            throw Error(ErrorKind::InvalidConfig, "time grid must be strictly ascending");
        }
    }
}

namespace {

struct PureComponent {
    double weight;
    Eigen::Vector2cd qubit;
};

std::vector<PureComponent> split_into_pure(const InitialState& init) {
    if (init.is_pure()) return {{1.0, qubit_pure_state(init)}};
    const double r = init.bloch.norm();
    if (!(r <= 1.0)) throw Error(ErrorKind::BlochOutOfBall, "Bloch vector length exceeds 1");
    const Eigen::Vector3d axis = r > 0.0 ? Eigen::Vector3d(init.bloch / r) : Eigen::Vector3d::UnitZ();
    return {{0.5 * (1.0 + r), qubit_pure_state(InitialState{axis})},
            {0.5 * (1.0 - r), qubit_pure_state(InitialState{-axis})}};
}

// Evolves each component in the eigenbasis of h_mu and returns the weighted
// sum of reduced states.
std::vector<Matrix2c> propagate(const HermitianEigen& eig, const ComplexVector& env_state,
                                std::span<const PureComponent> components, const TimeGrid& grid) {
    const auto n_env = static_cast<Eigen::Index>(env_state.size());
    const Eigen::Index dim = 2 * n_env;
    const auto n_times = static_cast<Eigen::Index>(grid.size());
    constexpr Eigen::Index kChunk = 128;

    std::vector<Matrix2c> out(grid.size(), Matrix2c::Zero());
    for (const auto& comp : components) {
        ComplexVector psi0(dim);
        psi0.head(n_env) = comp.qubit[0] * env_state;
        psi0.tail(n_env) = comp.qubit[1] * env_state;
        const ComplexVector amplitudes = eig.vectors.adjoint() * psi0;

        for (Eigen::Index start = 0; start < n_times; start += kChunk) {
            const Eigen::Index len = std::min(kChunk, n_times - start);
            Eigen::MatrixXcd phased(dim, len);
            for (Eigen::Index k = 0; k < len; ++k) {
                const double t = grid.points[static_cast<std::size_t>(start + k)];
                for (Eigen::Index j = 0; j < dim; ++j) {
                    phased(j, k) = std::polar(1.0, -eig.values[j] * t) * amplitudes[j];
                }
            }
            const Eigen::MatrixXcd states = eig.vectors * phased;
            for (Eigen::Index k = 0; k < len; ++k) {
                out[static_cast<std::size_t>(start + k)] +=
                    comp.weight * reduced_from_pure(states.col(k), static_cast<std::size_t>(n_env));
            }
        }
    }
    return out;
}

std::vector<Matrix2c> evolve_with_draw(const ModelParams& params, const EnvironmentDraw& draw,
                                       std::span<const PureComponent> components, const TimeGrid& grid) {
    params.validate();
    grid.validate();
    if (draw.env_state.size() != static_cast<Eigen::Index>(params.env_dim)) {
        throw Error(ErrorKind::DimensionMismatch, "environment state does not match env_dim");
    }
    const HermitianEigen eig = hermitian_eigendecompose(build_hamiltonian(params, draw));
    return propagate(eig, draw.env_state, components, grid);
}

}  // namespace

std::vector<Matrix2c> evolve_realization(const ModelParams& params, const EnvironmentDraw& draw,
                                         const InitialState& init, const TimeGrid& grid) {
    if (!init.is_pure()) {
        throw Error(ErrorKind::NonPureInitial, "single-realization evolution needs a pure qubit state");
    }
    const PureComponent comp{1.0, qubit_pure_state(init)};
    return evolve_with_draw(params, draw, std::span(&comp, 1), grid);
}

std::vector<Matrix2c> evolve_mixture(const ModelParams& params, const EnvironmentDraw& draw,
                                     const InitialState& init, const TimeGrid& grid) {
    const auto components = split_into_pure(init);
    return evolve_with_draw(params, draw, components, grid);
}

AveragedSeries run_ensemble(const ModelParams& params, const InitialState& init, const TimeGrid& grid,
                            std::size_t n_run, std::uint64_t master_seed, const EnsembleOptions& options) {
    params.validate();
    grid.validate();
    if (n_run < 1) throw Error(ErrorKind::InvalidConfig, "n_run must be >= 1");
    const auto components = split_into_pure(init);

    std::vector<std::vector<Matrix2c>> results(n_run);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        for (std::size_t k = next.fetch_add(1); k < n_run; k = next.fetch_add(1)) {
            try {
                for (std::uint32_t attempt = 0;; ++attempt) {
                    const SeedPolicy seed{master_seed, k, attempt};
                    try {
                        const auto draw = draw_environment(params.env_dim, params.spectrum_kind, seed);
                        results[k] = evolve_with_draw(params, draw, components, grid);
                        break;
                    } catch (const Error& e) {
                        if (e.kind() != ErrorKind::ConvergenceFailure || attempt + 1 >= options.max_attempts) {
                            throw;
                        }
                        std::clog << "realization " << k << " attempt " << attempt
                                  << " discarded and resampled: " << e.what() << '\n';
                    }
                }
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(n_run);
            }
        }
    };

    std::size_t threads = options.threads == 0 ? std::thread::hardware_concurrency() : options.threads;
    threads = std::clamp<std::size_t>(threads, 1, n_run);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    // Reduction in realization order keeps the result independent of scheduling.
    AveragedSeries series;
    series.grid = grid;
    series.n_run = n_run;
    const std::size_t n_times = grid.size();
    series.mean_rho.assign(n_times, Matrix2c::Zero());
    series.stderr_rho.assign(n_times, RhoStderr{});
    series.mean_realization_purity.assign(n_times, 0.0);
    const double inv_n = 1.0 / static_cast<double>(n_run);

    for (std::size_t t = 0; t < n_times; ++t) {
        Matrix2c sum = Matrix2c::Zero();
        double purity_sum = 0.0;
        for (const auto& r : results) {
            sum += r[t];
            purity_sum += (r[t] * r[t]).trace().real();
        }
        Matrix2c mean = sum * inv_n;
        mean(0, 1) = std::conj(mean(1, 0));
        mean(0, 0) = mean(0, 0).real();
        mean(1, 1) = mean(1, 1).real();
        series.mean_rho[t] = mean;
        series.mean_realization_purity[t] = purity_sum * inv_n;

        if (n_run > 1) {
            double v11 = 0.0, vre = 0.0, vim = 0.0;
            for (const auto& r : results) {
                v11 += std::pow(r[t](0, 0).real() - mean(0, 0).real(), 2);
                vre += std::pow(r[t](1, 0).real() - mean(1, 0).real(), 2);
                vim += std::pow(r[t](1, 0).imag() - mean(1, 0).imag(), 2);
            }
            const double scale = 1.0 / (static_cast<double>(n_run - 1) * static_cast<double>(n_run));
            series.stderr_rho[t] = {std::sqrt(v11 * scale), std::sqrt(vre * scale), std::sqrt(vim * scale)};
        }
    }
    return series;
}

}  // namespace rmtd
