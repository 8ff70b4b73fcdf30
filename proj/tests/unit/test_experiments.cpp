#include "doctest.h"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "rmtd/error.hpp"
#include "rmtd/experiments.hpp"

using namespace rmtd;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("rmtd_test_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<double>> read_csv(const fs::path& p, std::string* header = nullptr) {
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    if (header) *header = line;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                row.push_back(std::nan(""));
            }
        }
        rows.push_back(row);
    }
    return rows;
}

RunConfig tiny(const fs::path& out) {
    RunConfig c;
    c.model.env_dim = 12;
    c.n_run = 6;
    c.grid.t_max = 10.0;
    c.grid.n_points = 21;
    c.output_dir = out;
    c.master_seed = 4;
    return c;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(RMTD_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::IoError;
}

}  // namespace

TEST_CASE("config round trip through JSON") {
    RunConfig c = preset_config("fig5");
    c.fit_b = 0.3;
    c.init = InitialState{Eigen::Vector3d(0.1, 0.2, 0.3)};
    c.theory_cases = {LrCase::ZInit};
    const RunConfig back = config_from_json(to_json(c));
    CHECK(to_json(back) == to_json(c));
    CHECK(back.model.env_dim == 300);
    CHECK(back.init.bloch == c.init.bloch);
}

TEST_CASE("config parsing with defaults and named initial states") {
    const auto c = parse_config_text(R"({
  "model": {"delta": 0.25, "mu": 0.1, "env_dim": 50, "coupling_axis": "z", "spectrum": "poisson"},
  "init": "y",
  "grid": {"t_max": 12.5, "n_points": 100},
  "n_run": 7,
  "seed": 18446744073709551615
})");
    CHECK(c.model.delta == 0.25);
    CHECK(c.model.coupling_axis == CouplingAxis::Z);
    CHECK(c.model.spectrum_kind == SpectrumKind::PoissonUniform);
    CHECK(c.init.bloch == InitialState::eigenstate(PauliAxis::Y).bloch);
    CHECK(c.grid.make().size() == 100);
    CHECK(c.master_seed == 18446744073709551615ull);
    CHECK(parse_config_text("{}").grid.make().points.back() == doctest::Approx(8.0 * std::numbers::pi));
}

TEST_CASE("config errors carry the line of the offending key") {
    const std::string text = "{\n  \"n_run\": 3,\n  \"model\": {\n    \"delta\": 1.0,\n    \"mass\": 2\n  }\n}";
    try {
        parse_config_text(text);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InvalidConfig);
        CHECK(std::string(e.what()).find("line 5") != std::string::npos);
        CHECK(std::string(e.what()).find("mass") != std::string::npos);
    }
    try {
        parse_config_text("{\n  \"n_run\": 0\n}");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    try {
        parse_config_text("{\n  \"grid\": {\"n_points\": 1}\n}");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    try {
        parse_config_text("{\n \"n_run\": 3,\n oops\n}");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    CHECK(kind_of([] { parse_config_text(R"({"grid": {"t_max": -1}})"); }) == ErrorKind::InvalidConfig);
    CHECK(kind_of([] { parse_config_text(R"({"init": [1, 1, 0]})"); }) == ErrorKind::InvalidConfig);
    CHECK(kind_of([] { parse_config_text(R"({"model": {"delta": "big"}})"); }) == ErrorKind::InvalidConfig);
    CHECK(kind_of([] { parse_config_text(R"({"theory": {"cases": ["q"]}})"); }) == ErrorKind::InvalidConfig);
    CHECK(kind_of([] { load_config("/nonexistent/config.json"); }) == ErrorKind::IoError);
}

TEST_CASE("presets and scaling") {
    for (const auto& name : preset_names()) {
        const auto c = preset_config(name);
        CHECK_NOTHROW(c.validate());
        CHECK(c.grid.make().size() == (name == "fig7" ? 1024u : 512u));
        CHECK(c.n_run == 300);
    }
    CHECK(preset_config("fig7").grid.make().points.back() == doctest::Approx(32.0 * std::numbers::pi));
    CHECK(preset_config("fig3").init.bloch == InitialState::eigenstate(PauliAxis::Z).bloch);
    CHECK(preset_config("fig6").dmax_deltas.size() == 6);
    CHECK(kind_of([] { preset_config("fig9"); }) == ErrorKind::InvalidConfig);

    RunConfig c = preset_config("fig5");
    const auto rec = apply_scale(c, 2.0);
    CHECK(rec.env_dim_before == 300);
    CHECK(rec.n_run_before == 300);
    CHECK(c.model.env_dim == 150);
    CHECK(c.n_run == 150);
    CHECK(kind_of([&] { apply_scale(c, 0.5); }) == ErrorKind::InvalidConfig);
}

TEST_CASE("exit codes") {
    CHECK(exit_code_for(ErrorKind::InvalidConfig) == 2);
    CHECK(exit_code_for(ErrorKind::MissingFitParameter) == 2);
    CHECK(exit_code_for(ErrorKind::ConvergenceFailure) == 3);
    CHECK(exit_code_for(ErrorKind::FitDiverged) == 3);
    CHECK(exit_code_for(ErrorKind::IoError) == 1);
    CHECK(experiment_from_string("dmax-grid") == Experiment::DmaxGrid);
}

TEST_CASE("simulate writes series and meta, and meta reproduces the series bitwise") {
    const auto dir = scratch("simulate");
    auto c = tiny(dir);
    const auto result = cmd_simulate(c);
    CHECK(result.files.size() == 2);
    std::string header;
    const auto rows = read_csv(dir / "series.csv", &header);
    CHECK(header == "t,re_rho11,im_rho11,re_rho21,im_rho21,purity,stderr_purity,x,y,z");
    CHECK(rows.size() == 21);
    const auto first = slurp(dir / "series.csv");

    const auto meta = nlohmann::json::parse(slurp(dir / "meta.json"));
    CHECK(meta["artifact"] == "rmt-decohere");
    CHECK(meta["command"] == "simulate");
    CHECK(meta["config"]["seed"] == 4);

    const auto again_dir = scratch("simulate_again");
    auto reloaded = load_config(dir / "meta.json");
    reloaded.output_dir = again_dir;
    cmd_simulate(reloaded);
    CHECK(slurp(again_dir / "series.csv") == first);
}

TEST_CASE("uncoupled simulation keeps purity one") {
    const auto dir = scratch("mu0");
    auto c = tiny(dir);
    c.model.mu = 0.0;
    cmd_simulate(c);
    for (const auto& row : read_csv(dir / "series.csv")) CHECK(std::abs(row[5] - 1.0) <= 1e-12);
}

TEST_CASE("theory output") {
    const auto dir = scratch("theory");
    auto c = tiny(dir);
    c.theory_cases = {LrCase::XInit, LrCase::ZInit};
    CHECK(kind_of([&] { cmd_theory(c); }) == ErrorKind::MissingFitParameter);
    c.fit_b = 0.7;
    cmd_theory(c);
    std::string header;
    const auto rows = read_csv(dir / "theory.csv", &header);
    CHECK(header == "t,case,re_lr,im_lr,re_elr,im_elr");
    CHECK(rows.size() == 42);
    CHECK(rows[0][2] == 0.5);
    CHECK(rows[21][2] == 1.0);
}

TEST_CASE("compare with no coupling is at zero distance") {
    const auto dir = scratch("compare");
    auto c = tiny(dir);
    c.model.mu = 0.0;
    const auto result = cmd_compare(c);
    std::string header;
    const auto rows = read_csv(dir / "compare.csv", &header);
    CHECK(header == "t,trace_distance,abs_z2_sim,abs_z2_elr");
    for (const auto& row : rows) CHECK(row[1] <= 1e-12);
    CHECK(result.results["dmax"].get<double>() <= 1e-12);

    c.init = InitialState::maximally_mixed();
    CHECK(kind_of([&] { cmd_compare(c); }) == ErrorKind::InvalidConfig);
}

TEST_CASE("one-cell dmax grid equals a single compare run") {
    auto c = tiny(scratch("dmax"));
    c.init = InitialState::eigenstate(PauliAxis::Y);
    c.dmax_deltas = {1.5};
    c.dmax_mus = {0.25};
    cmd_dmax_grid(c);
    const auto rows = read_csv(c.output_dir / "dmax.csv");
    REQUIRE(rows.size() == 1);

    auto single = c;
    single.model.delta = 1.5;
    single.model.mu = 0.25;
    single.output_dir = scratch("dmax_compare");
    const auto compare = cmd_compare(single);
    CHECK(rows[0][2] == compare.results["dmax"].get<double>());
    CHECK(rows[0][2] == dmax_point(c, 1.5, 0.25));
}

TEST_CASE("spectra compare without coupling is flat") {
    auto c = tiny(scratch("spectra_compare"));
    c.model.mu = 0.0;
    cmd_spectra_compare(c);
    std::string header;
    const auto rows = read_csv(c.output_dir / "spectra_compare.csv", &header);
    CHECK(header.rfind("t,purity_gue_x,purity_poisson_x,purity_gue_z,purity_poisson_z", 0) == 0);
    for (const auto& row : rows)
        for (int j = 1; j <= 4; ++j) CHECK(std::abs(row[j] - 1.0) <= 1e-12);
}

TEST_CASE("spectra statistics histograms") {
    auto c = tiny(scratch("spectra_stats"));
    c.model.env_dim = 100;
    c.n_spectra = 20;
    const auto result = cmd_spectra_stats(c);
    std::string header;
    const auto gue = read_csv(c.output_dir / "spacing_gue.csv", &header);
    CHECK(header == "bin_center,density");
    CHECK(gue.size() == 40);
    CHECK(fs::exists(c.output_dir / "spacing_poisson.csv"));
    CHECK(result.results["gue"]["ks_wigner_gue"].get<double>() < result.results["gue"]["ks_poisson"].get<double>());
}

TEST_CASE("command line front end") {
    const auto dir = scratch("cli");
    CHECK(run_cli("simulate --preset fig1 --scale 20 --n-points 16 --out " + dir.string()) == 0);
    const auto meta = nlohmann::json::parse(slurp(dir / "meta.json"));
    CHECK(meta["config"]["model"]["env_dim"] == 10);
    CHECK(meta["scaling"]["factor"] == 20.0);
    CHECK(meta["scaling"]["env_dim_before"] == 200);

    // flags win over the config file
    const auto cfg = dir / "cfg.json";
    std::ofstream(cfg) << R"({"model": {"env_dim": 8, "mu": 0.2}, "n_run": 3, "grid": {"n_points": 5}})";
    CHECK(run_cli("simulate --config " + cfg.string() + " --mu 0.05 --seed 9 --out " + (dir / "b").string()) == 0);
    const auto meta_b = nlohmann::json::parse(slurp(dir / "b" / "meta.json"));
    CHECK(meta_b["config"]["model"]["mu"] == 0.05);
    CHECK(meta_b["config"]["seed"] == 9);
    CHECK(meta_b["config"]["n_run"] == 3);

    std::ofstream(dir / "bad.json") << "{\n \"n_rum\": 3\n}";
    CHECK(run_cli("simulate --config " + (dir / "bad.json").string()) == 2);
    CHECK(run_cli("theory --init z --out " + (dir / "c").string() + " --n-points 5") == 0);
    std::ofstream(dir / "z.json") << R"({"theory": {"cases": ["z"]}, "grid": {"n_points": 5}})";
    CHECK(run_cli("theory --config " + (dir / "z.json").string() + " --out " + (dir / "d").string()) == 2);
    CHECK(run_cli("bogus") == 2);
    CHECK(run_cli("simulate --delta -1") == 2);
}
