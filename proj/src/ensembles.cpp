#include "rmtd/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "rmtd/error.hpp"

namespace rmtd {

std::string_view to_string(SpectrumKind kind) {
    switch (kind) {
        case SpectrumKind::GueUnfolded: return "gue";
        case SpectrumKind::PoissonUniform: return "poisson";
    }
    return "gue";
}

SpectrumKind spectrum_kind_from_string(std::string_view name) {
    if (name == "gue") return SpectrumKind::GueUnfolded;
    if (name == "poisson") return SpectrumKind::PoissonUniform;
    throw Error(ErrorKind::InvalidConfig, "unknown spectrum kind '" + std::string(name) + "'");
}

std::mt19937_64 make_engine(const SeedPolicy& seed, StreamTag tag) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed.master_seed),
                      static_cast<std::uint32_t>(seed.master_seed >> 32),
                      static_cast<std::uint32_t>(seed.realization_index),
                      static_cast<std::uint32_t>(seed.realization_index >> 32),
                      static_cast<std::uint32_t>(tag), seed.attempt};
    return std::mt19937_64(seq);
}

ComplexMatrix sample_gue_matrix(std::size_t n, std::mt19937_64& engine) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double off = std::sqrt(0.5);
    const auto dim = static_cast<Eigen::Index>(n);
    ComplexMatrix h(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        h(i, i) = gauss(engine);
        for (Eigen::Index j = i + 1; j < dim; ++j) {
            const double re = off * gauss(engine);
            const double im = off * gauss(engine);
            h(i, j) = Complex(re, im);
            h(j, i) = Complex(re, -im);
        }
    }
    return h;
}

ComplexMatrix sample_gue_coupling(std::size_t n, const SeedPolicy& seed) {
    auto engine = make_engine(seed, StreamTag::Coupling);
    return sample_gue_matrix(n, engine);
}

RealVector unfold_semicircle(const RealVector& eigenvalues, double radius) {
    const double n = static_cast<double>(eigenvalues.size());
    RealVector out(eigenvalues.size());
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
        const double x = std::clamp(eigenvalues[i] / radius, -1.0, 1.0);
        const double cdf = 0.5 + (x * std::sqrt(1.0 - x * x) + std::asin(x)) / std::numbers::pi;
        out[i] = n * cdf;
    }
    return out;
}

RealVector sample_spectrum(std::size_t n, SpectrumKind kind, const SeedPolicy& seed) {
    if (n < 2) throw Error(ErrorKind::OutOfRange, "spectrum needs at least two levels");
    auto engine = make_engine(seed, StreamTag::Spectrum);
    if (kind == SpectrumKind::GueUnfolded) {
        const RealVector e = hermitian_eigenvalues(sample_gue_matrix(n, engine));
        // E|H_jl|^2 = 1 puts the semicircle edge at 2 sqrt(n).
        return unfold_semicircle(e, 2.0 * std::sqrt(static_cast<double>(n)));
    }
    std::uniform_real_distribution<double> uniform(0.0, static_cast<double>(n));
    std::vector<double> levels(n);
    for (auto& x : levels) x = uniform(engine);
    std::sort(levels.begin(), levels.end());
    return Eigen::Map<const RealVector>(levels.data(), static_cast<Eigen::Index>(n));
}

ComplexVector sample_env_state(std::size_t n, const SeedPolicy& seed) {
    if (n < 1) throw Error(ErrorKind::OutOfRange, "environment state needs n >= 1");
    auto engine = make_engine(seed, StreamTag::EnvState);
    std::normal_distribution<double> gauss(0.0, 1.0);
    ComplexVector v(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double re = gauss(engine);
        v[i] = Complex(re, gauss(engine));
    }
    return v / v.norm();
}

EnvironmentDraw draw_environment(std::size_t n, SpectrumKind kind, const SeedPolicy& seed) {
    return EnvironmentDraw{sample_spectrum(n, kind, seed), sample_gue_coupling(n, seed),
                           sample_env_state(n, seed)};
}

std::vector<double> nearest_neighbor_spacings(std::span<const RealVector> spectra) {
    std::vector<double> out;
    for (const auto& s : spectra) {
        for (Eigen::Index i = 1; i < s.size(); ++i) out.push_back(s[i] - s[i - 1]);
    }
    return out;
}

SpacingHistogram spacing_histogram(std::span<const RealVector> spectra, std::size_t bins,
                                   double s_max) {
    if (bins == 0 || !(s_max > 0.0)) {
        throw Error(ErrorKind::OutOfRange, "histogram needs bins > 0 and s_max > 0");
    }
    const auto spacings = nearest_neighbor_spacings(spectra);
    if (spacings.empty()) throw Error(ErrorKind::EmptyInput, "no spacings to histogram");

    SpacingHistogram h;
    h.bin_width = s_max / static_cast<double>(bins);
    h.n_spacings = spacings.size();
    h.bin_centers.resize(bins);
    h.density.assign(bins, 0.0);
    for (std::size_t b = 0; b < bins; ++b) h.bin_centers[b] = (static_cast<double>(b) + 0.5) * h.bin_width;
    for (double s : spacings) {
        if (s < 0.0 || s >= s_max) continue;
        const auto b = std::min(bins - 1, static_cast<std::size_t>(s / h.bin_width));
        h.density[b] += 1.0;
    }
    const double norm = 1.0 / (static_cast<double>(spacings.size()) * h.bin_width);
    for (auto& d : h.density) d *= norm;
    return h;
}

double wigner_surmise_gue_cdf(double s) {
    if (s <= 0.0) return 0.0;
    const double pi = std::numbers::pi;
    return std::erf(2.0 * s / std::sqrt(pi)) - 4.0 * s / pi * std::exp(-4.0 * s * s / pi);
}

double poisson_spacing_cdf(double s) { return s <= 0.0 ? 0.0 : -std::expm1(-s); }

double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) throw Error(ErrorKind::EmptyInput, "KS distance of an empty sample");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

double ks_distance_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw Error(ErrorKind::EmptyInput, "KS distance of an empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

}  // namespace rmtd
