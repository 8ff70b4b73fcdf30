#include "rmtd/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>

#include "rmtd/ensembles.hpp"
#include "rmtd/observables.hpp"

namespace rmtd {

using nlohmann::json;

namespace {

constexpr double kEightPi = 8.0 * std::numbers::pi;

// Line of the first occurrence of "key" in the raw config, 0 if unknown.
std::size_t line_of(std::string_view text, std::string_view key) {
    if (text.empty() || key.empty()) return 0;
    const std::string needle = "\"" + std::string(key) + "\"";
    const auto pos = text.find(needle);
    if (pos == std::string_view::npos) return 0;
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(pos), '\n'));
}

[[noreturn]] void config_error(std::string_view text, std::string_view key, const std::string& message) {
    const std::size_t line = line_of(text, key);
    std::string where = line > 0 ? "line " + std::to_string(line) + ": " : "";
    throw Error(ErrorKind::InvalidConfig, where + "'" + std::string(key) + "': " + message);
}

class Reader {
public:
    Reader(const json& node, std::string_view text, std::string scope)
        : node_(node), text_(text), scope_(std::move(scope)) {
        if (!node_.is_object()) config_error(text_, scope_, "expected an object");
    }

    void allow(std::initializer_list<std::string_view> keys) const {
        const std::set<std::string_view> known(keys);
        for (const auto& [key, _] : node_.items()) {
            if (!known.contains(key)) config_error(text_, key, "unknown key in '" + scope_ + "'");
        }
    }

    bool has(const char* key) const { return node_.contains(key); }
    const json& at(const char* key) const { return node_.at(key); }
    std::string_view text() const { return text_; }

    template <class T>
    void get(const char* key, T& out) const {
        if (!node_.contains(key)) return;
        try {
            out = node_.at(key).get<T>();
        } catch (const json::exception& e) {
            config_error(text_, key, std::string("wrong type: ") + e.what());
        }
    }

    double number(const char* key, double fallback) const {
        if (!node_.contains(key)) return fallback;
        if (!node_.at(key).is_number()) config_error(text_, key, "expected a number");
        return node_.at(key).get<double>();
    }

    std::size_t count(const char* key, std::size_t fallback) const {
        if (!node_.contains(key)) return fallback;
        const auto& v = node_.at(key);
        if (!v.is_number_integer() || v.get<long long>() < 0) {
            config_error(text_, key, "expected a non-negative integer");
        }
        return v.get<std::size_t>();
    }

private:
    const json& node_;
    std::string_view text_;
    std::string scope_;
};

InitialState init_from_json(const json& node, std::string_view text) {
    if (node.is_string()) {
        const auto name = node.get<std::string>();
        if (name == "x") return InitialState::eigenstate(PauliAxis::X);
        if (name == "y") return InitialState::eigenstate(PauliAxis::Y);
        if (name == "z") return InitialState::eigenstate(PauliAxis::Z);
        if (name == "mixed") return InitialState::maximally_mixed();
        config_error(text, "init", "expected x, y, z, mixed or a Bloch vector");
    }
    if (node.is_array() && node.size() == 3 && std::all_of(node.begin(), node.end(), [](const json& v) {
            return v.is_number();
        })) {
        InitialState s{{node[0].get<double>(), node[1].get<double>(), node[2].get<double>()}};
        if (!(s.bloch.norm() <= 1.0 + 1e-12)) config_error(text, "init", "Bloch vector longer than 1");
        return s;
    }
    config_error(text, "init", "expected x, y, z, mixed or a Bloch vector");
}

std::filesystem::path prepare_output(const RunConfig& config) {
    std::error_code ec;
    std::filesystem::create_directories(config.output_dir, ec);
    if (ec) {
        throw Error(ErrorKind::IoError,
                    "cannot create output directory " + config.output_dir.string() + ": " + ec.message());
    }
    return config.output_dir;
}

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, std::initializer_list<std::string_view> header)
        : path_(path), out_(path) {
        if (!out_) throw Error(ErrorKind::IoError, "cannot open " + path.string() + " for writing");
        out_ << std::setprecision(17);
        bool first = true;
        for (auto h : header) {
            out_ << (first ? "" : ",") << h;
            first = false;
        }
        out_ << '\n';
    }

    template <class... Ts>
    void row(const Ts&... values) {
        bool first = true;
        ((out_ << (first ? "" : ","), out_ << values, first = false), ...);
        out_ << '\n';
    }

    ~CsvWriter() = default;

    void close() {
        out_.close();
        if (!out_) throw Error(ErrorKind::IoError, "failed writing " + path_.string());
    }

private:
    std::filesystem::path path_;
    std::ofstream out_;
};

std::filesystem::path write_meta(const RunConfig& config, Experiment e, const ScaleRecord& scale,
                                 const json& results) {
    const auto path = config.output_dir / "meta.json";
    json meta;
    meta["artifact"] = kArtifactName;
    meta["version"] = kArtifactVersion;
    meta["command"] = to_string(e);
    meta["config"] = to_json(config);
    meta["scaling"] = {{"factor", scale.factor},
                       {"env_dim_before", scale.env_dim_before},
                       {"n_run_before", scale.n_run_before}};
    meta["results"] = results;
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::IoError, "cannot open " + path.string() + " for writing");
    out << meta.dump(2) << '\n';
    if (!out) throw Error(ErrorKind::IoError, "failed writing " + path.string());
    return path;
}

AveragedSeries simulate_series(const RunConfig& config) {
    return run_ensemble(config.model, config.init, config.grid.make(), config.n_run, config.master_seed,
                        EnsembleOptions{config.threads});
}

std::size_t nearest_index(const TimeGrid& grid, double t) {
    const auto& p = grid.points;
    std::size_t best = 0;
    for (std::size_t k = 1; k < p.size(); ++k) {
        if (std::abs(p[k] - t) < std::abs(p[best] - t)) best = k;
    }
    return best;
}

json bloch_json(const Eigen::Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }

}  // namespace

std::string_view to_string(Experiment e) {
    switch (e) {
        case Experiment::Simulate: return "simulate";
        case Experiment::Theory: return "theory";
        case Experiment::DmaxGrid: return "dmax-grid";
        case Experiment::SpectraStats: return "spectra-stats";
        case Experiment::Compare: return "compare";
        case Experiment::SpectraCompare: return "spectra-compare";
    }
    return "simulate";
}

Experiment experiment_from_string(std::string_view name) {
    for (auto e : {Experiment::Simulate, Experiment::Theory, Experiment::DmaxGrid, Experiment::SpectraStats,
                   Experiment::Compare, Experiment::SpectraCompare}) {
        if (to_string(e) == name) return e;
    }
    throw Error(ErrorKind::InvalidConfig, "unknown command '" + std::string(name) + "'");
}

TimeGrid GridSpec::make() const { return TimeGrid::uniform(t_max > 0.0 ? t_max : kEightPi, n_points); }

void RunConfig::validate() const {
    model.validate();
    if (!(grid.t_max >= 0.0)) throw Error(ErrorKind::InvalidConfig, "grid.t_max must be > 0");
    if (grid.n_points < 2) throw Error(ErrorKind::InvalidConfig, "grid.n_points must be >= 2");
    if (n_run < 1) throw Error(ErrorKind::InvalidConfig, "n_run must be >= 1");
    if (!(init.bloch.norm() <= 1.0 + 1e-12)) throw Error(ErrorKind::BlochOutOfBall, "init outside the Bloch ball");
    if (hist_bins < 1 || !(hist_s_max > 0.0) || n_spectra < 1) {
        throw Error(ErrorKind::InvalidConfig, "spectra_stats needs bins >= 1, s_max > 0, n_spectra >= 1");
    }
    if (fit_b && !(*fit_b >= 0.0 && *fit_b < 1.0)) throw Error(ErrorKind::InvalidConfig, "theory.fit_b must lie in [0, 1)");
    for (double d : dmax_deltas) {
        if (!(d > 0.0)) throw Error(ErrorKind::InvalidConfig, "dmax.deltas must be > 0");
    }
    for (double m : dmax_mus) {
        if (!(m >= 0.0)) throw Error(ErrorKind::InvalidConfig, "dmax.mus must be >= 0");
    }
}

json to_json(const RunConfig& c) {
    json cases = json::array();
    for (auto lc : c.theory_cases) cases.push_back(to_string(lc));
    json theory = {{"cases", cases}};
    if (c.fit_b) theory["fit_b"] = *c.fit_b;
    return {
        {"model",
         {{"delta", c.model.delta},
          {"mu", c.model.mu},
          {"env_dim", c.model.env_dim},
          {"coupling_axis", to_string(c.model.coupling_axis)},
          {"spectrum", to_string(c.model.spectrum_kind)}}},
        {"init", bloch_json(c.init.bloch)},
        {"grid", {{"t_max", c.grid.t_max > 0.0 ? c.grid.t_max : kEightPi}, {"n_points", c.grid.n_points}}},
        {"n_run", c.n_run},
        {"seed", c.master_seed},
        {"threads", c.threads},
        {"output", c.output_dir.string()},
        {"dmax", {{"deltas", c.dmax_deltas}, {"mus", c.dmax_mus}}},
        {"theory", theory},
        {"spectra_stats", {{"bins", c.hist_bins}, {"s_max", c.hist_s_max}, {"n_spectra", c.n_spectra}}},
        {"preset", c.preset},
    };
}

RunConfig config_from_json(const json& doc, std::string_view text) {
    if (doc.is_object() && doc.contains("config") && doc.contains("artifact")) {
        return config_from_json(doc.at("config"), text);
    }
    RunConfig c;
    const Reader root(doc, text, "config");
    root.allow({"preset", "model", "init", "grid", "n_run", "seed", "threads", "output", "dmax", "theory",
                "spectra_stats"});

    if (root.has("preset")) {
        std::string name;
        root.get("preset", name);
        if (!name.empty()) c = preset_config(name);
    }
    if (root.has("model")) {
        const Reader m(root.at("model"), text, "model");
        m.allow({"delta", "mu", "env_dim", "coupling_axis", "spectrum"});
        c.model.delta = m.number("delta", c.model.delta);
        c.model.mu = m.number("mu", c.model.mu);
        c.model.env_dim = m.count("env_dim", c.model.env_dim);
        if (m.has("coupling_axis")) {
            std::string axis;
            m.get("coupling_axis", axis);
            try {
                c.model.coupling_axis = coupling_axis_from_string(axis);
            } catch (const Error& e) {
                config_error(text, "coupling_axis", e.what());
            }
        }
        if (m.has("spectrum")) {
            std::string kind;
            m.get("spectrum", kind);
            try {
                c.model.spectrum_kind = spectrum_kind_from_string(kind);
            } catch (const Error& e) {
                config_error(text, "spectrum", e.what());
            }
        }
        if (!(c.model.delta > 0.0)) config_error(text, "delta", "must be > 0");
        if (!(c.model.mu >= 0.0)) config_error(text, "mu", "must be >= 0");
        if (c.model.env_dim < 2) config_error(text, "env_dim", "must be >= 2");
    }
    if (root.has("init")) c.init = init_from_json(root.at("init"), text);
    if (root.has("grid")) {
        const Reader g(root.at("grid"), text, "grid");
        g.allow({"t_max", "n_points"});
        c.grid.t_max = g.number("t_max", c.grid.t_max);
        c.grid.n_points = g.count("n_points", c.grid.n_points);
        if (!(c.grid.t_max > 0.0) && g.has("t_max")) config_error(text, "t_max", "must be > 0");
        if (c.grid.n_points < 2) config_error(text, "n_points", "must be >= 2");
    }
    c.n_run = root.count("n_run", c.n_run);
    if (c.n_run < 1) config_error(text, "n_run", "must be >= 1");
    if (root.has("seed")) {
        const auto& s = root.at("seed");
        if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
            config_error(text, "seed", "expected a non-negative integer");
        }
        c.master_seed = s.get<std::uint64_t>();
    }
    c.threads = root.count("threads", c.threads);
    if (root.has("output")) {
        std::string out;
        root.get("output", out);
        c.output_dir = out;
    }
    if (root.has("dmax")) {
        const Reader d(root.at("dmax"), text, "dmax");
        d.allow({"deltas", "mus"});
        d.get("deltas", c.dmax_deltas);
        d.get("mus", c.dmax_mus);
    }
    if (root.has("theory")) {
        const Reader t(root.at("theory"), text, "theory");
        t.allow({"cases", "fit_b"});
        if (t.has("cases")) {
            std::vector<std::string> names;
            t.get("cases", names);
            c.theory_cases.clear();
            for (const auto& n : names) {
                try {
                    c.theory_cases.push_back(lr_case_from_string(n));
                } catch (const Error& e) {
                    config_error(text, "cases", e.what());
                }
            }
        }
        if (t.has("fit_b")) c.fit_b = t.number("fit_b", 0.0);
    }
    if (root.has("spectra_stats")) {
        const Reader s(root.at("spectra_stats"), text, "spectra_stats");
        s.allow({"bins", "s_max", "n_spectra"});
        c.hist_bins = s.count("bins", c.hist_bins);
        c.hist_s_max = s.number("s_max", c.hist_s_max);
        c.n_spectra = s.count("n_spectra", c.n_spectra);
    }
    c.validate();
    return c;
}

RunConfig parse_config_text(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto byte = std::min<std::size_t>(e.byte, text.size());
        const auto line =
            1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(byte), '\n'));
        throw Error(ErrorKind::InvalidConfig, "line " + std::to_string(line) + ": malformed JSON (" + e.what() + ")");
    }
    return config_from_json(doc, text);
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::IoError, "cannot read config " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

std::vector<std::string> preset_names() { return {"fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7"}; }

RunConfig preset_config(std::string_view name) {
    RunConfig c;
    c.preset = std::string(name);
    c.model.env_dim = 200;
    c.n_run = 300;
    c.model.coupling_axis = CouplingAxis::X;
    if (name == "fig1" || name == "fig2" || name == "fig3") {
        c.model.delta = 1.0;
        c.model.mu = 0.1;
        c.init = InitialState::eigenstate(name == "fig1" ? PauliAxis::X : name == "fig2" ? PauliAxis::Y : PauliAxis::Z);
    } else if (name == "fig4") {
        c.model.delta = 0.25;
        c.model.mu = 0.1;
    } else if (name == "fig5") {
        c.model.delta = 1.0;
        c.model.mu = 0.25;
        c.model.env_dim = 300;
        c.init = InitialState::eigenstate(PauliAxis::Y);
    } else if (name == "fig6") {
        c.init = InitialState::eigenstate(PauliAxis::Y);
        c.dmax_deltas = {0.25, 0.5, 0.75, 1.0, 1.25, 1.5};
        c.dmax_mus = {0.05, 0.1, 0.15, 0.2, 0.25, 0.3};
    } else if (name == "fig7") {
        c.model.delta = 0.25;
        c.model.mu = 0.1;
        c.init = InitialState::eigenstate(PauliAxis::X);
        // four free-precession periods; the tail window spans the last one
        c.grid.t_max = 32.0 * std::numbers::pi;
        c.grid.n_points = 1024;
    } else {
        throw Error(ErrorKind::InvalidConfig, "unknown preset '" + std::string(name) + "'");
    }
    return c;
}

ScaleRecord apply_scale(RunConfig& config, double factor) {
    if (!(factor >= 1.0)) throw Error(ErrorKind::InvalidConfig, "--scale must be >= 1");
    ScaleRecord rec{factor, config.model.env_dim, config.n_run};
    config.model.env_dim = std::max<std::size_t>(
        2, static_cast<std::size_t>(std::llround(static_cast<double>(config.model.env_dim) / factor)));
    config.n_run =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(static_cast<double>(config.n_run) / factor)));
    return rec;
}

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidConfig:
        case ErrorKind::BlochOutOfBall:
        case ErrorKind::UnknownCase:
        case ErrorKind::MissingFitParameter:
        case ErrorKind::OutOfRange:
        case ErrorKind::GridTooShort:
        case ErrorKind::GridMismatch:
        case ErrorKind::NegativeTime:
        case ErrorKind::UnsupportedEnsemble:
        case ErrorKind::DimensionMismatch:
        case ErrorKind::EmptyInput: return 2;
        case ErrorKind::IoError: return 1;
        case ErrorKind::NotHermitian:
        case ErrorKind::ConvergenceFailure:
        case ErrorKind::NonPureInitial:
        case ErrorKind::NotAState:
        case ErrorKind::FitDiverged:
        case ErrorKind::QuadratureNonConvergence: return 3;
    }
    return 3;
}

CommandResult cmd_simulate(const RunConfig& config, const ScaleRecord& scale) {
    config.validate();
    const auto dir = prepare_output(config);
    const AveragedSeries series = simulate_series(config);

    CsvWriter csv(dir / "series.csv",
                  {"t", "re_rho11", "im_rho11", "re_rho21", "im_rho21", "purity", "stderr_purity", "x", "y", "z"});
    for (std::size_t k = 0; k < series.grid.size(); ++k) {
        const auto& rho = series.mean_rho[k];
        const auto r = bloch_vector(rho);
        csv.row(series.grid.points[k], rho(0, 0).real(), rho(0, 0).imag(), rho(1, 0).real(), rho(1, 0).imag(),
                purity(rho), purity_stderr(rho, series.stderr_rho[k]), r.x(), r.y(), r.z());
    }
    csv.close();

    const auto eq = equilibrium_estimate(series);
    json results = {{"final_purity", purity(series.mean_rho.back())},
                    {"tail_bloch", bloch_json(eq.bloch)},
                    {"tail_bloch_stderr", bloch_json(eq.stderr)},
                    {"tail_purity", eq.purity},
                    {"tail_polarization", eq.bloch.z()}};
    CommandResult out{{dir / "series.csv"}, results};
    out.files.push_back(write_meta(config, Experiment::Simulate, scale, results));
    return out;
}

CommandResult cmd_theory(const RunConfig& config, const ScaleRecord& scale) {
    config.validate();
    const auto dir = prepare_output(config);
    const TimeGrid grid = config.grid.make();
    const double delta = config.model.delta;
    const double mu = config.model.mu;

    CsvWriter csv(dir / "theory.csv", {"t", "case", "re_lr", "im_lr", "re_elr", "im_elr"});
    for (LrCase c : config.theory_cases) {
        if (c == LrCase::ZInit && !config.fit_b) {
            throw Error(ErrorKind::MissingFitParameter, "theory case z needs theory.fit_b");
        }
        for (double t : grid.points) {
            const Complex lr = lr_predict(c, t, delta, mu);
            const Complex elr = elr_predict(c, t, delta, mu, config.fit_b);
            csv.row(t, to_string(c), lr.real(), lr.imag(), elr.real(), elr.imag());
        }
    }
    csv.close();
    json results = {{"picture", "interaction"}, {"rows", grid.size() * config.theory_cases.size()}};
    CommandResult out{{dir / "theory.csv"}, results};
    out.files.push_back(write_meta(config, Experiment::Theory, scale, results));
    return out;
}

double dmax_point(const RunConfig& base, double delta, double mu) {
    RunConfig c = base;
    c.model.delta = delta;
    c.model.mu = mu;
    c.model.coupling_axis = CouplingAxis::X;
    c.init = InitialState::eigenstate(PauliAxis::Y);
    const AveragedSeries series = simulate_series(c);
    const auto elr = curve_states(lr_curve(LrCase::YInit, series.grid, delta, mu, true));
    return max_trace_distance(series.grid, series.mean_rho, series.grid, elr);
}

CommandResult cmd_dmax_grid(const RunConfig& config, const ScaleRecord& scale) {
    config.validate();
    if (config.dmax_deltas.empty() || config.dmax_mus.empty()) {
        throw Error(ErrorKind::InvalidConfig, "dmax.deltas and dmax.mus must be non-empty");
    }
    if (config.init.bloch != InitialState::eigenstate(PauliAxis::Y).bloch) {
        std::clog << "dmax-grid: initial state forced to the sigma_y eigenstate\n";
    }
    RunConfig effective = config;
    effective.init = InitialState::eigenstate(PauliAxis::Y);
    effective.model.coupling_axis = CouplingAxis::X;
    const auto dir = prepare_output(effective);

    CsvWriter csv(dir / "dmax.csv", {"delta", "mu", "dmax"});
    json cells = json::array();
    for (double d : effective.dmax_deltas) {
        for (double m : effective.dmax_mus) {
            const double value = dmax_point(effective, d, m);
            csv.row(d, m, value);
            cells.push_back({{"delta", d}, {"mu", m}, {"dmax", value}});
        }
    }
    csv.close();
    json results = {{"cells", cells}};
    CommandResult out{{dir / "dmax.csv"}, results};
    out.files.push_back(write_meta(effective, Experiment::DmaxGrid, scale, results));
    return out;
}

CommandResult cmd_compare(const RunConfig& config, const ScaleRecord& scale) {
    config.validate();
    const auto lr_case = lr_case_for(config.model.coupling_axis, config.init);
    if (!lr_case) {
        throw Error(ErrorKind::InvalidConfig, "compare needs a +1 Pauli eigenstate covered by the theory");
    }
    const auto dir = prepare_output(config);
    const AveragedSeries series = simulate_series(config);
    std::optional<double> fit_b = config.fit_b;
    if (*lr_case == LrCase::ZInit && !fit_b) {
        const auto fit = fit_elr_offset(series, config.model.delta, config.model.mu);
        fit_b = fit.b;
    }
    const auto elr = curve_states(lr_curve(*lr_case, series.grid, config.model.delta, config.model.mu, true, fit_b));
    const auto dist = trace_distance_series(series.grid, series.mean_rho, series.grid, elr);

    CsvWriter csv(dir / "compare.csv", {"t", "trace_distance", "abs_z2_sim", "abs_z2_elr"});
    for (std::size_t k = 0; k < dist.size(); ++k) {
        csv.row(series.grid.points[k], dist[k], 4.0 * std::norm(series.mean_rho[k](1, 0)),
                4.0 * std::norm(elr[k](1, 0)));
    }
    csv.close();
    const auto peak = std::max_element(dist.begin(), dist.end());
    json results = {{"case", to_string(*lr_case)},
                    {"dmax", *peak},
                    {"t_at_dmax", series.grid.points[static_cast<std::size_t>(peak - dist.begin())]}};
    if (fit_b) results["fit_b"] = *fit_b;
    CommandResult out{{dir / "compare.csv"}, results};
    out.files.push_back(write_meta(config, Experiment::Compare, scale, results));
    return out;
}

CommandResult cmd_spectra_compare(const RunConfig& config, const ScaleRecord& scale) {
    config.validate();
    const auto dir = prepare_output(config);
    const TimeGrid grid = config.grid.make();

    std::vector<AveragedSeries> runs;  // gue_x, poisson_x, gue_z, poisson_z
    for (PauliAxis axis : {PauliAxis::X, PauliAxis::Z}) {
        for (SpectrumKind kind : {SpectrumKind::GueUnfolded, SpectrumKind::PoissonUniform}) {
            ModelParams m = config.model;
            m.spectrum_kind = kind;
            runs.push_back(run_ensemble(m, InitialState::eigenstate(axis), grid, config.n_run, config.master_seed,
                                        EnsembleOptions{config.threads}));
        }
    }

    CsvWriter csv(dir / "spectra_compare.csv",
                  {"t", "purity_gue_x", "purity_poisson_x", "purity_gue_z", "purity_poisson_z", "stderr_gue_x",
                   "stderr_poisson_x", "stderr_gue_z", "stderr_poisson_z"});
    auto p = [&](std::size_t r, std::size_t k) { return purity(runs[r].mean_rho[k]); };
    auto e = [&](std::size_t r, std::size_t k) { return purity_stderr(runs[r].mean_rho[k], runs[r].stderr_rho[k]); };
    for (std::size_t k = 0; k < grid.size(); ++k) {
        csv.row(grid.points[k], p(0, k), p(1, k), p(2, k), p(3, k), e(0, k), e(1, k), e(2, k), e(3, k));
    }
    csv.close();

    const std::size_t k25 = nearest_index(grid, 25.0);
    json results = {{"t_probe", grid.points[k25]}};
    const char* names[] = {"x", "z"};
    for (std::size_t i = 0; i < 2; ++i) {
        const double gap = p(2 * i, k25) - p(2 * i + 1, k25);
        const double pooled = std::hypot(e(2 * i, k25), e(2 * i + 1, k25));
        results[names[i]] = {{"purity_gue", p(2 * i, k25)},
                             {"purity_poisson", p(2 * i + 1, k25)},
                             {"gap", gap},
                             {"pooled_stderr", pooled}};
    }
    CommandResult out{{dir / "spectra_compare.csv"}, results};
    out.files.push_back(write_meta(config, Experiment::SpectraCompare, scale, results));
    return out;
}

CommandResult cmd_spectra_stats(const RunConfig& config, const ScaleRecord& scale) {
    config.validate();
    const auto dir = prepare_output(config);
    CommandResult out;
    json results;
    for (SpectrumKind kind : {SpectrumKind::GueUnfolded, SpectrumKind::PoissonUniform}) {
        std::vector<RealVector> spectra;
        spectra.reserve(config.n_spectra);
        for (std::size_t k = 0; k < config.n_spectra; ++k) {
            spectra.push_back(sample_spectrum(config.model.env_dim, kind, SeedPolicy{config.master_seed, k}));
        }
        const auto hist = spacing_histogram(spectra, config.hist_bins, config.hist_s_max);
        const auto path = dir / ("spacing_" + std::string(to_string(kind)) + ".csv");
        CsvWriter csv(path, {"bin_center", "density"});
        for (std::size_t b = 0; b < hist.bin_centers.size(); ++b) csv.row(hist.bin_centers[b], hist.density[b]);
        csv.close();
        out.files.push_back(path);

        const auto spacings = nearest_neighbor_spacings(spectra);
        results[std::string(to_string(kind))] = {
            {"n_spacings", spacings.size()},
            {"ks_wigner_gue", ks_distance(spacings, wigner_surmise_gue_cdf)},
            {"ks_poisson", ks_distance(spacings, poisson_spacing_cdf)},
        };
    }
    out.results = results;
    out.files.push_back(write_meta(config, Experiment::SpectraStats, scale, results));
    return out;
}

CommandResult run_experiment(Experiment e, const RunConfig& config, const ScaleRecord& scale) {
    switch (e) {
        case Experiment::Simulate: return cmd_simulate(config, scale);
        case Experiment::Theory: return cmd_theory(config, scale);
        case Experiment::DmaxGrid: return cmd_dmax_grid(config, scale);
        case Experiment::SpectraStats: return cmd_spectra_stats(config, scale);
        case Experiment::Compare: return cmd_compare(config, scale);
        case Experiment::SpectraCompare: return cmd_spectra_compare(config, scale);
    }
    throw Error(ErrorKind::InvalidConfig, "unknown command");
}

}  // namespace rmtd
