#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "rmtd/linalg.hpp"
#include "rmtd/model.hpp"
#include "rmtd/propagation.hpp"

// Linear response (second order in mu) for the ensemble-averaged qubit state
// with a GUE environment, and its exponentiated (ELR) resummation.
//
// All C functions share the spectral correlation
//     c(u) = 1 + delta(u / 2 pi) - b2(u / 2 pi),
// where the delta function sits on the boundary u = 0 of the integration
// domain and contributes half its mass, i.e. weight pi. Predictions are
// returned in the interaction picture; interaction_to_lab() applies the free
// qubit rotation.

namespace rmtd {

enum class LrCase {
    DephasingOffdiag,  // v_c = sigma_z, sigma_x eigenstate: rho~_21
    XInit,             // v_c = sigma_x, sigma_x eigenstate: rho~_21
    YInit,             // v_c = sigma_x, sigma_y eigenstate: rho~_21
    ZInit,             // v_c = sigma_x, sigma_z eigenstate: rho~_11
};

std::string_view to_string(LrCase c);
LrCase lr_case_from_string(std::string_view name);

/// The case describing (coupling, initial state), if the state is one of the
/// +1 eigenstates the closed forms cover.
std::optional<LrCase> lr_case_for(CouplingAxis axis, const InitialState& init);

struct CorrelationParams {
    int beta = 2;  // Dyson index
};

/// GUE two-point form factor: 1 - tau for tau < 1, else 0.
double form_factor_b2(double tau);

/// Regular part of c(u): (3 - beta) - b2(u / 2 pi). Only beta = 2 is backed
/// by closed forms; beta = 1 raises UnsupportedEnsemble unless the caller opts
/// into the approximate (GUE form factor) variant.
double correlation_regular(double u, CorrelationParams params = {}, bool allow_approximate = false);

double c_fid(double t);
Complex c_x(double t, double delta);
Complex c_y(double t, double delta);
double c_z(double t, double delta);

namespace detail {
// Closed forms with an explicit branch (late: t > 2 pi form). Used to check
// continuity at the Heisenberg time.
double c_fid_branch(double t, bool late);
Complex c_x_branch(double t, double delta, bool late);
Complex c_y_branch(double t, double delta, bool late);
double c_z_branch(double t, double delta, bool late);
/// Product delta * t below which the 1/delta^n closed forms are replaced by
/// quadrature of the cancellation-free kernels.
inline constexpr double kSmallDeltaT = 1.0;
}  // namespace detail

/// C function of the given case (C_fid, C_x, C_y or C_z).
Complex correlation_integral(LrCase c, double t, double delta);

/// Interaction-picture matrix element to second order in mu:
/// rho~_21 for the off-diagonal cases, rho~_11 for ZInit.
Complex lr_predict(LrCase c, double t, double delta, double mu);

/// Exponentiated linear response. ZInit needs the fitted asymptote fit_b in
/// [0, 1): rho~_11 = b + (1 - b) exp(-2 mu^2 C_z / (1 - b)).
Complex elr_predict(LrCase c, double t, double delta, double mu, std::optional<double> fit_b = {});

/// Applies u_c = exp(-i delta t sigma_z / 2): rho_21 -> exp(i delta t) rho_21.
Matrix2c interaction_to_lab(const Matrix2c& rho_tilde, double delta, double t);

/// Full lab-frame qubit state predicted by LR or ELR.
Matrix2c predicted_state(LrCase c, double t, double delta, double mu, bool elr,
                         std::optional<double> fit_b = {});

struct LrCurve {
    TimeGrid grid;
    std::vector<Complex> values;  // interaction picture
    LrCase lr_case = LrCase::XInit;
    double delta = 1.0;
    double mu = 0.0;
    bool elr = false;
    std::optional<double> fit_b;
};

LrCurve lr_curve(LrCase c, const TimeGrid& grid, double delta, double mu, bool elr,
                 std::optional<double> fit_b = {});

/// Lab-frame states of a curve, for comparison with simulations.
std::vector<Matrix2c> curve_states(const LrCurve& curve);

struct ElrFit {
    double b = 0.0;
    double residual = 0.0;  // sum of squared deviations of rho_11
    bool degenerate = false;  // residual independent of b (e.g. mu = 0)
};

/// Least-squares fit of the ZInit ELR asymptote b in [0, 0.99].
ElrFit fit_elr_offset(const AveragedSeries& series, double delta, double mu);

/// Asymptotic polarization 2 rho_11 - 1 implied by a fitted b.
inline double asymptotic_polarization(double fit_b) { return 2.0 * fit_b - 1.0; }

}  // namespace rmtd
