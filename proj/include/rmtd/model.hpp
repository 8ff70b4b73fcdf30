#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <string_view>

#include "rmtd/ensembles.hpp"
#include "rmtd/linalg.hpp"

namespace rmtd {

enum class PauliAxis { X, Y, Z };

/// Qubit factor v_c of the separable coupling v_c (x) V_e.
enum class CouplingAxis { X, Z };

std::string_view to_string(CouplingAxis axis);
CouplingAxis coupling_axis_from_string(std::string_view name);

/// Dimensionless model h_mu = (delta/2) sigma_z (x) 1 + 1 (x) h_e + mu v_c (x) V_e,
/// energies in units of the mean environment level spacing.
struct ModelParams {
    double delta = 1.0;
    double mu = 0.1;
    std::size_t env_dim = 200;
    CouplingAxis coupling_axis = CouplingAxis::X;
    SpectrumKind spectrum_kind = SpectrumKind::GueUnfolded;

    void validate() const;
};

/// Qubit initial condition as a Bloch vector, |bloch| <= 1.
struct InitialState {
    Eigen::Vector3d bloch{1.0, 0.0, 0.0};

    static InitialState eigenstate(PauliAxis axis);
    static InitialState maximally_mixed() { return InitialState{Eigen::Vector3d::Zero()}; }

    bool is_pure() const;
};

ComplexMatrix pauli(PauliAxis axis);

/// rho = (1 + r . sigma) / 2.
ComplexMatrix qubit_density(const InitialState& init);

/// Unit vector with <psi| sigma |psi> = bloch; requires a pure state.
Eigen::Vector2cd qubit_pure_state(const InitialState& init);

ComplexMatrix build_hamiltonian(const ModelParams& params, const EnvironmentDraw& draw);

}  // namespace rmtd
