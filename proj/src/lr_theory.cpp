#include "rmtd/lr_theory.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "rmtd/error.hpp"

namespace rmtd {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHeisenberg = 2.0 * kPi;
constexpr Complex kI{0.0, 1.0};

void require_nonnegative(double t) {
    if (!(t >= 0.0)) throw Error(ErrorKind::NegativeTime, "time must be >= 0");
}

void require_delta(double delta) {
    if (!(delta > 0.0)) throw Error(ErrorKind::OutOfRange, "delta must be > 0");
}

// phi(z) = (e^z - 1) / z and 1 - phi(z), both free of cancellation near 0.
Complex phi1(Complex z) {
    if (std::abs(z) < 0.5) {
        Complex term = 1.0, sum = 1.0;
        for (int k = 1; k < 30; ++k) {
            term *= z / static_cast<double>(k + 1);
            sum += term;
        }
        return sum;
    }
    return (std::exp(z) - 1.0) / z;
}

Complex one_minus_phi1(Complex z) {
    if (std::abs(z) < 0.5) {
        Complex term = 1.0, sum = 0.0;
        for (int k = 1; k < 30; ++k) {
            term *= z / static_cast<double>(k + 1);
            sum -= term;
        }
        return sum;
    }
    return 1.0 - phi1(z);
}

// For small delta * t the closed forms lose all digits to cancellation in
// their 1/delta^n prefactors. There the C integrals are evaluated as
//     pi K(0) + int_0^t (1 - b2) K(u) du
// with analytic, cancellation-free kernels K. The integrand is an entire
// function varying on the scale 1/delta > t, so fixed Gauss-Legendre on the two
// pieces of the form factor is exact to rounding.
template <class Kernel>
Complex small_delta_integral(double t, const Kernel& kernel) {
    using Rule = boost::math::quadrature::gauss<double, 30>;
    const double split = std::min(t, kHeisenberg);
    Complex total = kPi * kernel(0.0);
    if (split > 0.0) {
        total += Rule::integrate([&](double u) { return (u / kHeisenberg) * kernel(u); }, 0.0, split);
    }
    if (t > kHeisenberg) total += Rule::integrate([&](double u) { return kernel(u); }, kHeisenberg, t);
    return total;
}

Complex kernel_x(double u, double t, double delta) {
    // b_x(u) = (t-u)/2 e^{-i delta u} [1 - phi(-2 i delta (t-u))]
    const double w = t - u;
    return 0.5 * w * std::polar(1.0, -delta * u) * one_minus_phi1(Complex(0.0, -2.0 * delta * w));
}

Complex kernel_y(double u, double t, double delta) {
    const double w = t - u;
    return 0.5 * w * std::polar(1.0, -delta * u) * (1.0 + phi1(Complex(0.0, -2.0 * delta * w)));
}

bool small_delta(double t, double delta) { return delta * t < detail::kSmallDeltaT; }

}  // namespace

std::string_view to_string(LrCase c) {
    switch (c) {
        case LrCase::DephasingOffdiag: return "dephasing";
        case LrCase::XInit: return "x";
        case LrCase::YInit: return "y";
        case LrCase::ZInit: return "z";
    }
    return "x";
}

LrCase lr_case_from_string(std::string_view name) {
    if (name == "dephasing") return LrCase::DephasingOffdiag;
    if (name == "x") return LrCase::XInit;
    if (name == "y") return LrCase::YInit;
    if (name == "z") return LrCase::ZInit;
    throw Error(ErrorKind::UnknownCase, "unknown linear-response case '" + std::string(name) + "'");
}

std::optional<LrCase> lr_case_for(CouplingAxis axis, const InitialState& init) {
    constexpr double tol = 1e-12;
    const auto is = [&](PauliAxis a) {
        return (init.bloch - InitialState::eigenstate(a).bloch).norm() <= tol;
    };
    if (axis == CouplingAxis::Z) {
        if (is(PauliAxis::X)) return LrCase::DephasingOffdiag;
        return std::nullopt;
    }
    if (is(PauliAxis::X)) return LrCase::XInit;
    if (is(PauliAxis::Y)) return LrCase::YInit;
    if (is(PauliAxis::Z)) return LrCase::ZInit;
    return std::nullopt;
}

double form_factor_b2(double tau) {
    if (!(tau >= 0.0)) throw Error(ErrorKind::NegativeTime, "form factor needs tau >= 0");
    return tau < 1.0 ? 1.0 - tau : 0.0;
}

double correlation_regular(double u, CorrelationParams params, bool allow_approximate) {
    require_nonnegative(u);
    if (params.beta == 2) return 1.0 - form_factor_b2(u / kHeisenberg);
    if (params.beta == 1) {
        if (!allow_approximate) {
            throw Error(ErrorKind::UnsupportedEnsemble,
                        "GOE correlation needs the GOE form factor, which is not implemented");
        }
        return 2.0 - form_factor_b2(u / kHeisenberg);
    }
    throw Error(ErrorKind::UnsupportedEnsemble, "Dyson index must be 1 or 2");
}

namespace detail {

double c_fid_branch(double t, bool late) {
    return late ? 0.5 * t * t + 2.0 * kPi * kPi / 3.0 : kPi * t + t * t * t / (12.0 * kPi);
}

Complex c_x_branch(double t, double delta, bool late) {
    const double d = delta;
    const Complex e1 = std::polar(1.0, -d * t);
    const Complex e2 = std::polar(1.0, -2.0 * d * t);
    const Complex bar = (4.0 * (1.0 - e1) - (1.0 - kI * kPi * d) * (1.0 - e2) - 2.0 * d * t * (kI - kPi * d)) /
                        (4.0 * d * d);
    Complex bracket = (1.0 - 2.0 * kPi * kI * d) * d * t + 3.0 * kPi * d + 2.5 * kI + (kPi * d - 0.5 * kI) * e2;
    if (!late) {
        bracket += (2.0 * d * (t - kHeisenberg) - 2.0 * kI) * e1;
    } else {
        bracket += (d * (kHeisenberg - t) - 2.5 * kI) * std::polar(1.0, -kHeisenberg * d) +
                   0.5 * kI * std::polar(1.0, 2.0 * d * (kPi - t));
    }
    return bar - bracket / (4.0 * kPi * d * d * d);
}

Complex c_y_branch(double t, double delta, bool late) {
    const double d = delta;
    const Complex e1 = std::polar(1.0, -d * t);
    const Complex e2 = std::polar(1.0, -2.0 * d * t);
    const Complex bar = (2.0 * d * t * (kPi * d - kI) + (1.0 - kI * kPi * d) * (1.0 - e2)) / (4.0 * d * d);
    Complex bracket = (1.0 - 2.0 * kPi * kI * d) * d * t + kPi * d + 1.5 * kI + (0.5 * kI - kPi * d) * e2;
    // The piecewise term enters with a minus sign.
    if (!late) {
        bracket -= 2.0 * kI * e1;
    } else {
        bracket -= 0.5 * kI * std::polar(1.0, 2.0 * d * (kPi - t)) +
                   (1.5 * kI - (kHeisenberg - t) * d) * std::polar(1.0, -kHeisenberg * d);
    }
    return bar - bracket / (4.0 * kPi * d * d * d);
}

double c_z_branch(double t, double delta, bool late) {
    const double d = delta;
    const double bar = (1.0 - std::cos(d * t)) / (d * d) + kPi * t;
    const double tau = t / kHeisenberg;
    const double piece = late ? std::sin(kHeisenberg * d) / (kPi * d) - (1.0 - tau) * std::cos(kHeisenberg * d)
                              : std::sin(d * t) / (kPi * d) + (1.0 - tau) * std::cos(d * t);
    return bar - (1.0 + tau - piece) / (d * d);
}

}  // namespace detail

double c_fid(double t) {
    require_nonnegative(t);
    return detail::c_fid_branch(t, t > kHeisenberg);
}

Complex c_x(double t, double delta) {
    require_nonnegative(t);
    require_delta(delta);
    if (small_delta(t, delta)) {
        return small_delta_integral(t, [&](double u) { return kernel_x(u, t, delta); });
    }
    return detail::c_x_branch(t, delta, t > kHeisenberg);
}

Complex c_y(double t, double delta) {
    require_nonnegative(t);
    require_delta(delta);
    if (small_delta(t, delta)) {
        return small_delta_integral(t, [&](double u) { return kernel_y(u, t, delta); });
    }
    return detail::c_y_branch(t, delta, t > kHeisenberg);
}

double c_z(double t, double delta) {
    require_nonnegative(t);
    require_delta(delta);
    if (small_delta(t, delta)) {
        return small_delta_integral(t, [&](double u) { return Complex(std::cos(delta * u) * (t - u)); }).real();
    }
    return detail::c_z_branch(t, delta, t > kHeisenberg);
}

Complex correlation_integral(LrCase c, double t, double delta) {
    switch (c) {
        case LrCase::DephasingOffdiag: return c_fid(t);
        case LrCase::XInit: return c_x(t, delta);
        case LrCase::YInit: return c_y(t, delta);
        case LrCase::ZInit: return c_z(t, delta);
    }
    throw Error(ErrorKind::UnknownCase, "unknown linear-response case");
}

Complex lr_predict(LrCase c, double t, double delta, double mu) {
    const double mu2 = mu * mu;
    const Complex corr = correlation_integral(c, t, delta);
    switch (c) {
        case LrCase::DephasingOffdiag:
        case LrCase::XInit: return 0.5 * (1.0 - 4.0 * mu2 * corr);
        case LrCase::YInit: return 0.5 * kI * (1.0 - 4.0 * mu2 * corr);
        case LrCase::ZInit: return 1.0 - 2.0 * mu2 * corr;
    }
    throw Error(ErrorKind::UnknownCase, "unknown linear-response case");
}

Complex elr_predict(LrCase c, double t, double delta, double mu, std::optional<double> fit_b) {
    const double mu2 = mu * mu;
    if (c == LrCase::ZInit) {
        if (!fit_b) throw Error(ErrorKind::MissingFitParameter, "ZInit ELR needs the fitted offset b");
        const double b = *fit_b;
        if (!(b >= 0.0 && b < 1.0)) throw Error(ErrorKind::OutOfRange, "fit offset b must lie in [0, 1)");
        return b + (1.0 - b) * std::exp(-2.0 * mu2 / (1.0 - b) * c_z(t, delta));
    }
    const Complex decay = std::exp(-4.0 * mu2 * correlation_integral(c, t, delta));
    return c == LrCase::YInit ? 0.5 * kI * decay : 0.5 * decay;
}

Matrix2c interaction_to_lab(const Matrix2c& rho_tilde, double delta, double t) {
    Matrix2c rho = rho_tilde;
    const Complex phase = std::polar(1.0, delta * t);
    rho(1, 0) *= phase;
    rho(0, 1) *= std::conj(phase);
    return rho;
}

Matrix2c predicted_state(LrCase c, double t, double delta, double mu, bool elr, std::optional<double> fit_b) {
    const Complex value = elr ? elr_predict(c, t, delta, mu, fit_b) : lr_predict(c, t, delta, mu);
    Matrix2c rho;
    if (c == LrCase::ZInit) {
        rho << value.real(), 0.0, 0.0, 1.0 - value.real();
        return rho;
    }
    rho << 0.5, std::conj(value), value, 0.5;
    return interaction_to_lab(rho, delta, t);
}

LrCurve lr_curve(LrCase c, const TimeGrid& grid, double delta, double mu, bool elr,
                 std::optional<double> fit_b) {
    grid.validate();
    LrCurve curve{grid, {}, c, delta, mu, elr, fit_b};
    curve.values.reserve(grid.size());
    for (double t : grid.points) {
        curve.values.push_back(elr ? elr_predict(c, t, delta, mu, fit_b) : lr_predict(c, t, delta, mu));
    }
    return curve;
}

std::vector<Matrix2c> curve_states(const LrCurve& curve) {
    std::vector<Matrix2c> out;
    out.reserve(curve.values.size());
    for (std::size_t k = 0; k < curve.values.size(); ++k) {
        const double t = curve.grid.points[k];
        out.push_back(predicted_state(curve.lr_case, t, curve.delta, curve.mu, curve.elr, curve.fit_b));
    }
    return out;
}

ElrFit fit_elr_offset(const AveragedSeries& series, double delta, double mu) {
    const auto& t = series.grid.points;
    if (t.size() != series.mean_rho.size() || t.empty()) {
        throw Error(ErrorKind::GridMismatch, "series does not match its grid");
    }
    std::vector<double> c_values(t.size());
    for (std::size_t k = 0; k < t.size(); ++k) c_values[k] = c_z(t[k], delta);

    const auto residual = [&](double b) {
        double sum = 0.0;
        for (std::size_t k = 0; k < t.size(); ++k) {
            const double model = b + (1.0 - b) * std::exp(-2.0 * mu * mu / (1.0 - b) * c_values[k]);
            sum += std::pow(series.mean_rho[k](0, 0).real() - model, 2);
        }
        return sum;
    };

    constexpr int kScan = 100;  // b = 0, 0.01, ..., 0.99
    std::array<double, kScan> scan{};
    for (int i = 0; i < kScan; ++i) scan[i] = residual(0.01 * i);
    const auto [lo, hi] = std::minmax_element(scan.begin(), scan.end());
    if (*hi - *lo <= 1e-14 * (1.0 + *hi)) return ElrFit{0.0, *lo, true};

    const int best = static_cast<int>(lo - scan.begin());
    if (best == 0 || best == kScan - 1) {
        throw Error(ErrorKind::FitDiverged, "ELR offset residual has no interior minimum in [0, 0.99]");
    }
    const auto refined = boost::math::tools::brent_find_minima(residual, 0.01 * (best - 1), 0.01 * (best + 1),
                                                               std::numeric_limits<double>::digits / 2);
    return ElrFit{refined.first, refined.second, false};
}

}  // namespace rmtd
