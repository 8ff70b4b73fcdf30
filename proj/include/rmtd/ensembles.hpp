#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "rmtd/linalg.hpp"

namespace rmtd {

enum class SpectrumKind {
    GueUnfolded,     // GUE eigenvalues unfolded with the semicircle law
    PoissonUniform,  // independent uniform levels, same mean density
};

std::string_view to_string(SpectrumKind kind);
SpectrumKind spectrum_kind_from_string(std::string_view name);

/// Identifies the random stream of one ensemble member. Every draw is a pure
/// function of these fields, so realizations can be generated in any order.
struct SeedPolicy {
    std::uint64_t master_seed = 0;
    std::uint64_t realization_index = 0;
    std::uint32_t attempt = 0;  // bumped when a realization is resampled
};

/// Independent sub-streams of one realization.
enum class StreamTag : std::uint32_t {
    Spectrum = 1,
    Coupling = 2,
    EnvState = 3,
};

std::mt19937_64 make_engine(const SeedPolicy& seed, StreamTag tag);

struct EnvironmentDraw {
    RealVector spectrum;     // ascending, unit mean spacing
    ComplexMatrix coupling;  // Hermitian V_e
    ComplexVector env_state; // unit norm
};

/// GUE matrix with E|V_jl|^2 = 1 off the diagonal and Var(V_jj) = 1.
ComplexMatrix sample_gue_matrix(std::size_t n, std::mt19937_64& engine);
ComplexMatrix sample_gue_coupling(std::size_t n, const SeedPolicy& seed);

/// x = n F(E) with F the semicircle distribution of the given radius.
RealVector unfold_semicircle(const RealVector& eigenvalues, double radius);

RealVector sample_spectrum(std::size_t n, SpectrumKind kind, const SeedPolicy& seed);

/// Haar-random pure state: normalized vector of standard complex Gaussians.
ComplexVector sample_env_state(std::size_t n, const SeedPolicy& seed);

/// Spectrum, coupling and initial environment state from separate streams.
EnvironmentDraw draw_environment(std::size_t n, SpectrumKind kind, const SeedPolicy& seed);

// Spacing statistics ------------------------------------------------------

std::vector<double> nearest_neighbor_spacings(std::span<const RealVector> spectra);

struct SpacingHistogram {
    std::vector<double> bin_centers;
    std::vector<double> density;  // integrates to the fraction of spacings inside the range
    double bin_width = 0.0;
    std::size_t n_spacings = 0;
};

/// Normalized histogram of nearest-neighbor spacings on [0, s_max).
SpacingHistogram spacing_histogram(std::span<const RealVector> spectra, std::size_t bins,
                                   double s_max = 4.0);

/// Cumulative Wigner surmise for beta = 2: P(s) = 32/pi^2 s^2 exp(-4 s^2 / pi).
double wigner_surmise_gue_cdf(double s);
double poisson_spacing_cdf(double s);

/// One-sample Kolmogorov-Smirnov distance sup |F_n - F|.
double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf);
/// Two-sample Kolmogorov-Smirnov distance.
double ks_distance_two_sample(std::vector<double> a, std::vector<double> b);

}  // namespace rmtd
