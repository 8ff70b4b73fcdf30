#include "rmtd/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rmtd/error.hpp"

namespace rmtd {

namespace {
constexpr double kBlochSlack = 1e-12;
}

std::string_view to_string(CouplingAxis axis) { return axis == CouplingAxis::X ? "x" : "z"; }

CouplingAxis coupling_axis_from_string(std::string_view name) {
    if (name == "x") return CouplingAxis::X;
    if (name == "z") return CouplingAxis::Z;
    throw Error(ErrorKind::InvalidConfig,
                "coupling axis must be 'x' or 'z', got '" + std::string(name) + "'");
}

void ModelParams::validate() const {
    if (!(delta > 0.0)) throw Error(ErrorKind::InvalidConfig, "delta must be > 0");
    if (!(mu >= 0.0)) throw Error(ErrorKind::InvalidConfig, "mu must be >= 0");
    if (env_dim < 2) throw Error(ErrorKind::InvalidConfig, "env_dim must be >= 2");
}

InitialState InitialState::eigenstate(PauliAxis axis) {
    switch (axis) {
        case PauliAxis::X: return InitialState{{1.0, 0.0, 0.0}};
        case PauliAxis::Y: return InitialState{{0.0, 1.0, 0.0}};
        case PauliAxis::Z: return InitialState{{0.0, 0.0, 1.0}};
    }
    return {};
}

bool InitialState::is_pure() const { return std::abs(bloch.norm() - 1.0) <= kBlochSlack; }

ComplexMatrix pauli(PauliAxis axis) {
    const Complex i(0.0, 1.0);
    ComplexMatrix s(2, 2);
    switch (axis) {
        case PauliAxis::X: s << 0.0, 1.0, 1.0, 0.0; break;
        case PauliAxis::Y: s << 0.0, -i, i, 0.0; break;
        case PauliAxis::Z: s << 1.0, 0.0, 0.0, -1.0; break;
    }
    return s;
}

ComplexMatrix qubit_density(const InitialState& init) {
    if (!(init.bloch.norm() <= 1.0 + kBlochSlack)) {
        throw Error(ErrorKind::BlochOutOfBall, "Bloch vector length exceeds 1");
    }
    const auto& r = init.bloch;
    ComplexMatrix rho = ComplexMatrix::Identity(2, 2);
    rho += r.x() * pauli(PauliAxis::X) + r.y() * pauli(PauliAxis::Y) + r.z() * pauli(PauliAxis::Z);
    return rho * 0.5;
}

Eigen::Vector2cd qubit_pure_state(const InitialState& init) {
    if (!(init.bloch.norm() <= 1.0 + kBlochSlack)) {
        throw Error(ErrorKind::BlochOutOfBall, "Bloch vector length exceeds 1");
    }
    if (!init.is_pure()) throw Error(ErrorKind::NonPureInitial, "qubit state is mixed");
    const Eigen::Vector3d n = init.bloch.normalized();
    const double theta = std::acos(std::clamp(n.z(), -1.0, 1.0));
    const double phi = std::atan2(n.y(), n.x());
    return {Complex(std::cos(0.5 * theta), 0.0), std::polar(std::sin(0.5 * theta), phi)};
}

ComplexMatrix build_hamiltonian(const ModelParams& params, const EnvironmentDraw& draw) {
    const auto n = static_cast<Eigen::Index>(params.env_dim);
    if (draw.spectrum.size() != n || draw.coupling.rows() != n || draw.coupling.cols() != n) {
        throw Error(ErrorKind::DimensionMismatch, "environment draw does not match env_dim");
    }
    const ComplexMatrix v_c = pauli(params.coupling_axis == CouplingAxis::X ? PauliAxis::X : PauliAxis::Z);

    ComplexMatrix h = params.mu * kron(v_c, draw.coupling);
    for (Eigen::Index q = 0; q < 2; ++q) {
        const double qubit_energy = (q == 0 ? 0.5 : -0.5) * params.delta;
        for (Eigen::Index k = 0; k < n; ++k) {
            h(q * n + k, q * n + k) += qubit_energy + draw.spectrum[k];
        }
    }
    return h;
}

}  // namespace rmtd
