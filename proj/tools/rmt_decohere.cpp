// rmt-decohere: qubit decoherence in a random-matrix environment.
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "rmtd/experiments.hpp"

namespace {

struct Flags {
    std::string config;
    std::string preset;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> threads;
    double scale = 1.0;
    std::string out;
    std::optional<double> delta, mu, t_max;
    std::optional<std::size_t> env_dim, n_run, n_points;
    std::string init;
    std::string coupling;
    std::string spectrum;
};

void add_common(CLI::App* sub, Flags& f) {
    sub->add_option("-c,--config", f.config, "JSON config file (a previous meta.json works too)");
    sub->add_option("-p,--preset", f.preset, "built-in parameter set: fig1 ... fig7");
    sub->add_option("--seed", f.seed, "master seed");
    sub->add_option("--threads", f.threads, "worker threads (0 = hardware concurrency)");
    sub->add_option("--scale", f.scale, "divide env_dim and n_run by this factor")->check(CLI::Range(1.0, 1e6));
    sub->add_option("-o,--out", f.out, "output directory");
    sub->add_option("--delta", f.delta, "qubit level splitting");
    sub->add_option("--mu", f.mu, "coupling strength");
    sub->add_option("--env-dim", f.env_dim, "environment dimension");
    sub->add_option("--n-run", f.n_run, "number of realizations");
    sub->add_option("--init", f.init, "initial state: x, y, z or mixed");
    sub->add_option("--coupling", f.coupling, "coupling axis: x or z");
    sub->add_option("--spectrum", f.spectrum, "environment spectrum: gue or poisson");
    sub->add_option("--t-max", f.t_max, "end of the time grid");
    sub->add_option("--n-points", f.n_points, "number of time points");
}

rmtd::RunConfig resolve(const Flags& f) {
    using namespace rmtd;
    RunConfig c;
    if (!f.config.empty()) {
        c = load_config(f.config);
    } else if (!f.preset.empty()) {
        c = preset_config(f.preset);
    }
    if (!f.config.empty() && !f.preset.empty()) {
        throw Error(ErrorKind::InvalidConfig, "--config and --preset are mutually exclusive");
    }
    if (f.seed) c.master_seed = *f.seed;
    if (f.threads) c.threads = *f.threads;
    if (!f.out.empty()) c.output_dir = f.out;
    if (f.delta) c.model.delta = *f.delta;
    if (f.mu) c.model.mu = *f.mu;
    if (f.env_dim) c.model.env_dim = *f.env_dim;
    if (f.n_run) c.n_run = *f.n_run;
    if (f.t_max) c.grid.t_max = *f.t_max;
    if (f.n_points) c.grid.n_points = *f.n_points;
    if (!f.coupling.empty()) c.model.coupling_axis = coupling_axis_from_string(f.coupling);
    if (!f.spectrum.empty()) c.model.spectrum_kind = spectrum_kind_from_string(f.spectrum);
    if (!f.init.empty()) {
        if (f.init == "x") c.init = InitialState::eigenstate(PauliAxis::X);
        else if (f.init == "y") c.init = InitialState::eigenstate(PauliAxis::Y);
        else if (f.init == "z") c.init = InitialState::eigenstate(PauliAxis::Z);
        else if (f.init == "mixed") c.init = InitialState::maximally_mixed();
        else throw Error(ErrorKind::InvalidConfig, "--init must be x, y, z or mixed");
    }
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Single-qubit decoherence in a random-matrix environment"};
    app.set_version_flag("--version", std::string(rmtd::kArtifactVersion));
    app.require_subcommand(1);

    Flags flags;
    std::optional<rmtd::Experiment> chosen;
    for (auto e : {rmtd::Experiment::Simulate, rmtd::Experiment::Theory, rmtd::Experiment::DmaxGrid,
                   rmtd::Experiment::SpectraStats, rmtd::Experiment::Compare, rmtd::Experiment::SpectraCompare}) {
        auto* sub = app.add_subcommand(std::string(rmtd::to_string(e)));
        add_common(sub, flags);
        sub->callback([&chosen, e] { chosen = e; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        rmtd::RunConfig config = resolve(flags);
        rmtd::ScaleRecord scale{1.0, config.model.env_dim, config.n_run};
        if (flags.scale != 1.0) scale = rmtd::apply_scale(config, flags.scale);
        config.validate();
        const auto result = rmtd::run_experiment(*chosen, config, scale);
        for (const auto& file : result.files) std::cout << file.string() << '\n';
        return 0;
    } catch (const rmtd::Error& e) {
        std::cerr << "rmt-decohere: " << e.what() << '\n';
        return rmtd::exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "rmt-decohere: " << e.what() << '\n';
        return 3;
    }
}
