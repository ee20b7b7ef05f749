// Command-line front end: parameter sweeps, figure-data reproduction,
// critical-point lookup, Wigner tomography and cache maintenance.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "rabilab/figures.hpp"
#include "rabilab/sweep.hpp"
#include "rabilab/tomography.hpp"

namespace fs = std::filesystem;
using namespace rabilab;

namespace {

int run_sweep_cmd(const std::string& config_path, int workers, bool no_cache,
                  const std::string& format, double tol_override, const std::string& out_path) {
    SweepSpec spec = sweep_spec_from_config(ConfigMap::parse_file(config_path));
    if (tol_override > 0) spec.solver_tol = tol_override;
    SweepResult res = run_sweep(spec, workers, no_cache);

    std::ofstream file;
    std::ostream* out = &std::cout;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) throw std::runtime_error("cannot write " + out_path);
        out = &file;
    }
    if (format == "json")
        write_json(res, *out);
    else
        write_csv(res, *out);
    if (res.failed_points > 0) {
        std::cerr << res.failed_points << " of " << res.records.size()
                  << " points failed; see the error column\n";
        return 2;
    }
    return 0;
}

int run_critical_cmd(double j_tilde, double d_tilde) {
    if (d_tilde == 0) {
        const double gc = critical_coupling_dimensionless(j_tilde);
        std::printf("g_tilde_c = %.4f (%.17g)\n", gc, gc);
        return 0;
    }
    SpWindow w = a2_sp_window(j_tilde, d_tilde);
    if (!w.lower && !w.upper) {
        std::printf("no superradiant window at j_tilde = %.17g, d_tilde = %.17g\n", j_tilde,
                    d_tilde);
        return 0;
    }
    if (w.lower) std::printf("g_tilde_c = %.4f (%.17g)  [NP -> SP]\n", *w.lower, *w.lower);
    if (w.upper) std::printf("g_tilde_c = %.4f (%.17g)  [SP -> NP]\n", *w.upper, *w.upper);
    if (j_tilde > 1)
        std::printf("unstable below g_tilde = %.17g\n",
                    std::sqrt((j_tilde * j_tilde - 1) / d_tilde));
    return 0;
}

int run_wigner_cmd(const std::string& config_path, const std::string& out_path) {
    ConfigMap cfg = ConfigMap::parse_file(config_path);
    const double omega_a = cfg.get_number("omega_a", 40.0);
    const double omega_b = cfg.get_number("omega_b", 1.0);
    const double omega_q = cfg.get_number("omega_q", 5.0);
    double g = cfg.get_number("g", -1.0), J = cfg.get_number("j", -1.0);
    if (cfg.has("g_tilde")) g = cfg.require_number("g_tilde") * std::sqrt(omega_a * omega_q) / 2;
    if (cfg.has("j_tilde")) J = cfg.require_number("j_tilde") * std::sqrt(omega_a * omega_b) / 2;
    if (g < 0 || J < 0)
        throw std::runtime_error("config: need couplings (g, j) or (g_tilde, j_tilde)");
    const int cutoff = static_cast<int>(cfg.get_number("cutoff", 160));
    const std::string frame = cfg.get_string("frame", "lab");
    const std::string projection = cfg.get_string("projection", "none");
    WignerSpec spec;
    spec.x_min = cfg.get_number("x_min", -9.0);
    spec.x_max = cfg.get_number("x_max", 9.0);
    spec.y_min = cfg.get_number("y_min", -9.0);
    spec.y_max = cfg.get_number("y_max", 9.0);
    spec.nx = spec.ny = static_cast<int>(cfg.get_number("points", 201));
    cfg.finish();
    if (frame != "lab" && frame != "squeezed")
        throw std::runtime_error("config: frame must be lab or squeezed");
    if (projection != "none" && projection != "down_cat")
        throw std::runtime_error("config: projection must be none or down_cat");

    ModelParams p(omega_a, omega_b, omega_q, g, J);
    Truncation t = Truncation::b_only(cutoff);
    SpectralResult sol = lowest_eigenpairs(build_effective(p, t), 2);
    Vec psi = sol.eigenvectors[0];
    if (frame == "squeezed") {
        const EffectiveParams e = effective_params(p);
        GaussianUnitary sq = GaussianUnitary::squeeze_family(cutoff);
        Vec up(cutoff + 1), down(cutoff + 1);
        for (int nb = 0; nb <= cutoff; ++nb) {
            up(nb) = psi(t.encode(0, nb, 0));
            down(nb) = psi(t.encode(0, nb, 1));
        }
        up = sq.apply(-e.r, up);
        down = sq.apply(-e.r, down);
        for (int nb = 0; nb <= cutoff; ++nb) {
            psi(t.encode(0, nb, 0)) = up(nb);
            psi(t.encode(0, nb, 1)) = down(nb);
        }
    }
    DensityMatrix rho{Factor::mode_b, Mat()};
    if (projection == "down_cat") {
        Eigen::Vector2cd spinor(0.0, 1.0);
        auto [phi, prob] = project_qubit(psi, t, spinor);
        rho.rho = phi * phi.adjoint();
        std::cerr << "projection probability " << prob << "\n";
    } else {
        rho = reduce(psi, t, Factor::mode_b);
    }
    WignerGrid w = wigner(rho, spec);

    std::ofstream file;
    std::ostream* out = &std::cout;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) throw std::runtime_error("cannot write " + out_path);
        out = &file;
    }
    *out << "x,y,w\n";
    for (size_t iy = 0; iy < w.y_values.size(); ++iy)
        for (size_t ix = 0; ix < w.x_values.size(); ++ix)
            *out << format_double(w.x_values[ix]) << "," << format_double(w.y_values[iy]) << ","
                 << format_double(w.values[iy][ix]) << "\n";
    if (w.tail_warning) std::cerr << "warning: top-10% Fock population exceeds 1e-4\n";
    return 0;
}

std::string cache_dir_or_throw(const std::string& flag_dir) {
    if (!flag_dir.empty()) return flag_dir;
    if (const char* env = std::getenv("RABI_LAB_CACHE"); env && *env) return env;
    throw std::runtime_error("no cache directory: set RABI_LAB_CACHE or pass --dir");
}

int run_cache_cmd(const std::string& action, const std::string& flag_dir) {
    const std::string dir = cache_dir_or_throw(flag_dir);
    if (!fs::exists(dir)) {
        std::printf("cache %s: empty (no directory)\n", dir.c_str());
        return 0;
    }
    size_t files = 0, bytes = 0;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.path().extension() != ".json") continue;
        ++files;
        bytes += e.file_size();
        if (action == "clear") fs::remove(e.path());
    }
    if (action == "clear")
        std::printf("cache %s: removed %zu entries (%zu bytes)\n", dir.c_str(), files, bytes);
    else
        std::printf("cache %s: %zu entries, %zu bytes\n", dir.c_str(), files, bytes);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Indirect-Rabi superradiant phase transition lab"};
    app.require_subcommand(1);

    int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    bool no_cache = false;
    std::string format = "csv", out_path, config_path, figure_name, cache_action, cache_dir;
    double tol_override = -1, j_tilde = 0, d_tilde = 0;

    auto* sweep = app.add_subcommand("sweep", "run a parameter sweep from a config file");
    sweep->add_option("config", config_path, "sweep config file")->required();
    sweep->add_option("--workers", workers, "worker threads");
    sweep->add_flag("--no-cache", no_cache, "bypass the result cache");
    sweep->add_option("--format", format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    sweep->add_option("--tol", tol_override, "override the solver tolerance");
    sweep->add_option("--out", out_path, "output file (default stdout)");

    auto* figure = app.add_subcommand("figure", "emit data files for a survey figure");
    figure->add_option("name", figure_name, "figure target")->required();
    figure->add_option("--out", out_path, "output directory")->default_val("figures");
    figure->add_option("--workers", workers, "worker threads");
    figure->add_flag("--no-cache", no_cache, "bypass the result cache");

    auto* critical = app.add_subcommand("critical", "print the critical coupling");
    critical->add_option("--j-tilde", j_tilde, "dimensionless hopping")->required();
    critical->add_option("--d-tilde", d_tilde, "dimensionless A^2 amplitude");

    auto* wig = app.add_subcommand("wigner", "Wigner grid of the ground state");
    wig->add_option("config", config_path, "wigner config file")->required();
    wig->add_option("--out", out_path, "output file (default stdout)");

    auto* cache = app.add_subcommand("cache", "cache maintenance");
    cache->add_option("action", cache_action, "stats or clear")
        ->required()
        ->check(CLI::IsMember({"stats", "clear"}));
    cache->add_option("--dir", cache_dir, "cache directory (default RABI_LAB_CACHE)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sweep->parsed())
            return run_sweep_cmd(config_path, workers, no_cache, format, tol_override, out_path);
        if (figure->parsed()) {
            FigureFiles files = figure_target(figure_name, out_path, workers, no_cache);
            for (const auto& f : files.written) std::cout << f << "\n";
            return 0;
        }
        if (critical->parsed()) return run_critical_cmd(j_tilde, d_tilde);
        if (wig->parsed()) return run_wigner_cmd(config_path, out_path);
        if (cache->parsed()) return run_cache_cmd(cache_action, cache_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
