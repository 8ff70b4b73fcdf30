// Acceptance run: one PASS/FAIL line per criterion.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "quadrature_oracle.hpp"
#include "rmtd/ensembles.hpp"
#include "rmtd/experiments.hpp"
#include "rmtd/lr_theory.hpp"
#include "rmtd/observables.hpp"
#include "rmtd/propagation.hpp"

using namespace rmtd;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& title, double budget_s, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
        out = body();
    } catch (const std::exception& e) {
        out = {false, std::string("exception: ") + e.what()};
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = elapsed <= budget_s;
    const bool pass = out.pass && in_time;
    if (!pass) ++failures;
    std::printf("[%s] criterion %2d: %s -- %s; %.1f s (budget %.0f s%s)\n", pass ? "PASS" : "FAIL", id, title.c_str(),
                out.detail.c_str(), elapsed, budget_s, in_time ? "" : ", exceeded");
    std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

ModelParams model(double delta, double mu, std::size_t n) {
    ModelParams p;
    p.delta = delta;
    p.mu = mu;
    p.env_dim = n;
    return p;
}

std::size_t nearest(const TimeGrid& g, double t) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < g.size(); ++k)
        if (std::abs(g.points[k] - t) < std::abs(g.points[best] - t)) best = k;
    return best;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main() {
    const fs::path scratch = fs::temp_directory_path() / "rmtd_acceptance";
    fs::remove_all(scratch);
    const TimeGrid grid = TimeGrid::standard();
    const LrCase cases[] = {LrCase::DephasingOffdiag, LrCase::XInit, LrCase::YInit, LrCase::ZInit};

    criterion(1, "closed forms vs quadrature oracle (20 t x 3 delta x 4 cases)", 30, [&] {
        double worst = 0.0;
        for (double delta : {0.25, 1.0, 1.5}) {
            for (int i = 0; i < 20; ++i) {
                const double t = 0.1 + (4.0 * kPi - 0.1) * i / 19.0;
                for (auto c : cases) {
                    const Complex ref = oracle::c_integral(c, t, delta);
                    worst = std::max(worst, std::abs(correlation_integral(c, t, delta) - ref) / std::abs(ref));
                }
            }
        }
        return Outcome{worst <= 1e-8, fmt("max relative error %.2e (limit 1e-8)", worst)};
    });

    criterion(2, "C_fid(pi) = 13 pi^2/12, C_fid(2 pi) = 8 pi^2/3 from both branches", 1, [&] {
        const double e1 = std::abs(c_fid(kPi) - 13.0 * kPi * kPi / 12.0);
        const double e2 = std::abs(detail::c_fid_branch(2 * kPi, false) - 8.0 * kPi * kPi / 3.0);
        const double e3 = std::abs(detail::c_fid_branch(2 * kPi, true) - 8.0 * kPi * kPi / 3.0);
        const double worst = std::max({e1, e2, e3});
        return Outcome{worst <= 1e-12, fmt("max abs error %.2e (limit 1e-12)", worst)};
    });

    criterion(3, "continuity of C_fid, C_x, C_y, C_z at t = 2 pi", 1, [&] {
        const double t = 2 * kPi;
        double worst = std::abs(detail::c_fid_branch(t, false) - detail::c_fid_branch(t, true));
        for (double delta : {0.25, 1.0, 1.5}) {
            worst = std::max(worst, std::abs(detail::c_x_branch(t, delta, false) - detail::c_x_branch(t, delta, true)));
            worst = std::max(worst, std::abs(detail::c_y_branch(t, delta, false) - detail::c_y_branch(t, delta, true)));
            worst = std::max(worst, std::abs(detail::c_z_branch(t, delta, false) - detail::c_z_branch(t, delta, true)));
        }
        return Outcome{worst <= 1e-8, fmt("max branch jump %.2e (limit 1e-8)", worst)};
    });

    criterion(4, "delta -> 0: C_y -> C_fid, C_x -> 0 (20 t in [0.1, 4 pi], delta 1e-6)", 5, [&] {
        double worst_y = 0.0, worst_x = 0.0, t_x = 0.0, oracle_x = 0.0;
        for (int i = 0; i < 20; ++i) {
            const double t = 0.1 + (4.0 * kPi - 0.1) * i / 19.0;
            worst_y = std::max(worst_y, std::abs(c_y(t, 1e-6) - c_fid(t)) / (1.0 + c_fid(t)));
            if (std::abs(c_x(t, 1e-6)) > worst_x) {
                worst_x = std::abs(c_x(t, 1e-6));
                t_x = t;
                oracle_x = std::abs(oracle::c_integral(LrCase::XInit, t, 1e-6));
            }
        }
        return Outcome{worst_y <= 1e-4 && worst_x <= 1e-4,
                       fmt("max |C_y - C_fid|/(1+C_fid) %.2e; max |C_x| %.2e at t = %.3f, quadrature oracle %.2e "
                           "(limits 1e-4)",
                           worst_y, worst_x, t_x, oracle_x)};
    });

    criterion(5, "short-time LR agreement (delta 1, mu 0.1, x init, N 100, n_run 100)", 120, [&] {
        const auto s = run_ensemble(model(1.0, 0.1, 100), InitialState::eigenstate(PauliAxis::X), grid, 100, 501);
        double worst = 0.0;
        for (std::size_t k = 0; k < grid.size() && grid.points[k] <= kPi; ++k) {
            const Complex lr = predicted_state(LrCase::XInit, grid.points[k], 1.0, 0.1, false)(1, 0);
            worst = std::max(worst, std::abs(s.mean_rho[k](1, 0) - lr));
        }
        return Outcome{worst <= 0.02, fmt("max |rho21_sim - LR| for t <= pi: %.4f (limit 0.02)", worst)};
    });

    criterion(6, "residual polarization (delta 1, mu 0.1, z init, N 200, n_run 300)", 900, [&] {
        const auto s = run_ensemble(model(1.0, 0.1, 200), InitialState::eigenstate(PauliAxis::Z), grid, 300, 601);
        const auto eq = equilibrium_estimate(s, 0.25);  // t in [6 pi, 8 pi]
        const double pol = eq.bloch.z();
        return Outcome{pol >= 0.45 && pol <= 0.65,
                       fmt("tail polarization 2r-1 = %.4f +- %.4f (band [0.45, 0.65])", pol, eq.stderr.z())};
    });

    criterion(7, "Poisson spectra lose more purity at t = 25 (delta 0.25, mu 0.1, N 100, n_run 100)", 300, [&] {
        RunConfig c;
        c.model = model(0.25, 0.1, 100);
        c.n_run = 100;
        c.master_seed = 701;
        c.output_dir = scratch / "c7";
        const auto r = cmd_spectra_compare(c).results;
        bool ok = true;
        std::string detail = fmt("t = %.3f;", r["t_probe"].get<double>());
        for (const char* axis : {"x", "z"}) {
            const double gap = r[axis]["gap"].get<double>();
            const double err = r[axis]["pooled_stderr"].get<double>();
            ok = ok && gap > 3.0 * err;
            detail += fmt(" %s init: P_gue %.4f, P_poisson %.4f, gap %.4f vs 3 sigma %.4f;", axis,
                          r[axis]["purity_gue"].get<double>(), r[axis]["purity_poisson"].get<double>(), gap, 3 * err);
        }
        detail.pop_back();
        return Outcome{ok, detail};
    });

    criterion(8, "symmetry-breaking equilibrium (delta 0.25, mu 0.1, N 200, n_run 300, t <= 32 pi)", 900, [&] {
        const auto p = model(0.25, 0.1, 200);
        const auto long_grid = preset_config("fig7").grid.make();
        const auto sx = run_ensemble(p, InitialState::eigenstate(PauliAxis::X), long_grid, 300, 801);
        const auto sy = run_ensemble(p, InitialState::eigenstate(PauliAxis::Y), long_grid, 300, 802);
        const auto ex = equilibrium_estimate(sx);
        const auto ey = equilibrium_estimate(sy);
        const double x = ex.bloch.x();
        const double ry = ey.bloch.norm();
        const double ry_limit = 0.05 + 3.0 * ey.stderr.norm();
        const bool ok = x >= 0.2 && x <= 0.4 && ry <= ry_limit && ex.purity >= 0.5 && ex.purity <= 0.6;
        return Outcome{ok, fmt("x init: tail x %.4f (band [0.2, 0.4]), tail purity %.4f (band [0.50, 0.60]); "
                               "y init: tail |r| %.4f (limit %.4f)",
                               x, ex.purity, ry, ry_limit)};
    });

    criterion(9, "ELR accuracy spot checks (y init, N 150, n_run 150)", 600, [&] {
        RunConfig c;
        c.model = model(1.0, 0.1, 150);
        c.n_run = 150;
        c.master_seed = 901;
        const double good = dmax_point(c, 1.5, 0.25);
        const double bad = dmax_point(c, 0.25, 0.1);
        return Outcome{good <= 0.2 && bad > good,
                       fmt("D_max(1.5, 0.25) = %.4f (limit 0.2), D_max(0.25, 0.1) = %.4f", good, bad)};
    });

    criterion(10, "unital map: maximally mixed state stays at the origin (N 100, n_run 100)", 180, [&] {
        const auto s = run_ensemble(model(1.0, 0.1, 100), InitialState::maximally_mixed(), grid, 100, 1001);
        double worst = 0.0;
        bool ok = true;
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const double r = bloch_vector(s.mean_rho[k]).norm();
            const double limit = 3.0 * bloch_stderr(s.stderr_rho[k]).norm() + 1e-9;
            ok = ok && r <= limit;
            worst = std::max(worst, r / limit);
        }
        return Outcome{ok, fmt("max |r| / (3 stderr + 1e-9) = %.3f (limit 1)", worst)};
    });

    criterion(11, "spacing statistics of 100 spectra (N 200)", 60, [&] {
        std::vector<RealVector> gue, poisson;
        for (std::uint64_t k = 0; k < 100; ++k) {
            gue.push_back(sample_spectrum(200, SpectrumKind::GueUnfolded, SeedPolicy{1101, k}));
            poisson.push_back(sample_spectrum(200, SpectrumKind::PoissonUniform, SeedPolicy{1101, k}));
        }
        const double kg = ks_distance(nearest_neighbor_spacings(gue), wigner_surmise_gue_cdf);
        const double kp = ks_distance(nearest_neighbor_spacings(poisson), poisson_spacing_cdf);
        return Outcome{kg <= 0.05 && kp <= 0.05,
                       fmt("KS(GUE, Wigner) %.4f, KS(Poisson, exp) %.4f (limits 0.05)", kg, kp)};
    });

    criterion(12, "1 vs 8 workers give bitwise-identical series.csv", 120, [&] {
        const std::string base = std::string(RMTD_CLI_PATH) +
                                 " simulate --delta 1 --mu 0.1 --env-dim 100 --n-run 40 --init y --seed 1201";
        const auto a = scratch / "c12_1";
        const auto b = scratch / "c12_8";
        const int ra = std::system((base + " --threads 1 --out " + a.string() + " > /dev/null").c_str());
        const int rb = std::system((base + " --threads 8 --out " + b.string() + " > /dev/null").c_str());
        const std::string fa = slurp(a / "series.csv");
        const bool same = ra == 0 && rb == 0 && !fa.empty() && fa == slurp(b / "series.csv");
        return Outcome{same, fmt("exit codes %d/%d, %zu bytes, %s", ra, rb, fa.size(), same ? "identical" : "differ")};
    });

    std::printf("%d of 12 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
