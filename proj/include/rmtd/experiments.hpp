#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "rmtd/error.hpp"
#include "rmtd/lr_theory.hpp"
#include "rmtd/model.hpp"
#include "rmtd/propagation.hpp"

namespace rmtd {

inline constexpr std::string_view kArtifactName = "rmt-decohere";
inline constexpr std::string_view kArtifactVersion = "1.0.0";

enum class Experiment { Simulate, Theory, DmaxGrid, SpectraStats, Compare, SpectraCompare };

std::string_view to_string(Experiment e);
Experiment experiment_from_string(std::string_view name);

struct GridSpec {
    double t_max = 0.0;  // 0 selects 8 pi
    std::size_t n_points = 512;

    TimeGrid make() const;
};

/// Everything needed to reproduce one run. Serialized verbatim into meta.json,
/// which can itself be fed back as a config.
struct RunConfig {
    ModelParams model;
    InitialState init = InitialState::eigenstate(PauliAxis::X);
    GridSpec grid;
    std::size_t n_run = 300;
    std::uint64_t master_seed = 1;
    std::size_t threads = 0;
    std::filesystem::path output_dir = "out";

    // dmax-grid
    std::vector<double> dmax_deltas{0.25, 1.5};
    std::vector<double> dmax_mus{0.1, 0.25};
    // theory
    std::vector<LrCase> theory_cases{LrCase::DephasingOffdiag, LrCase::XInit, LrCase::YInit};
    std::optional<double> fit_b;
    // spectra-stats
    std::size_t hist_bins = 40;
    double hist_s_max = 4.0;
    std::size_t n_spectra = 100;

    std::string preset;  // informational

    void validate() const;
};

/// Record of a --scale reduction, kept in meta.json.
struct ScaleRecord {
    double factor = 1.0;
    std::size_t env_dim_before = 0;
    std::size_t n_run_before = 0;
};

nlohmann::json to_json(const RunConfig& config);

/// Parses a config document. source_text (the raw file) is used to attach
/// line numbers to error messages. A meta.json is accepted as well.
RunConfig config_from_json(const nlohmann::json& doc, std::string_view source_text = {});
RunConfig parse_config_text(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Named parameter sets for the published figures (fig1 ... fig7).
RunConfig preset_config(std::string_view name);
std::vector<std::string> preset_names();

/// Divides env_dim and n_run by factor (env_dim >= 2, n_run >= 1 kept).
ScaleRecord apply_scale(RunConfig& config, double factor);

/// Exit status for the CLI: 2 for configuration errors, 3 for numerical
/// failures, 1 for I/O.
int exit_code_for(ErrorKind kind);

struct CommandResult {
    std::vector<std::filesystem::path> files;
    nlohmann::json results;  // key numbers, also stored in meta.json
};

CommandResult cmd_simulate(const RunConfig& config, const ScaleRecord& scale = {});
CommandResult cmd_theory(const RunConfig& config, const ScaleRecord& scale = {});
CommandResult cmd_dmax_grid(const RunConfig& config, const ScaleRecord& scale = {});
CommandResult cmd_compare(const RunConfig& config, const ScaleRecord& scale = {});
CommandResult cmd_spectra_compare(const RunConfig& config, const ScaleRecord& scale = {});
CommandResult cmd_spectra_stats(const RunConfig& config, const ScaleRecord& scale = {});

CommandResult run_experiment(Experiment e, const RunConfig& config, const ScaleRecord& scale = {});

/// D_max between the simulation and the ELR prediction for one parameter
/// point; the qubit starts in the sigma_y eigenstate.
double dmax_point(const RunConfig& base, double delta, double mu);

}  // namespace rmtd
