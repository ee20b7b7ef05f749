#pragma once

#include <filesystem>
#include <fstream>

#include "rabilab/sweep.hpp"
#include "rabilab/tomography.hpp"

namespace rabilab {

// One-command reproduction targets for the data behind the survey figures.
// Each target writes CSV data, a params.json echo of every numeric choice,
// and a matplotlib stub. Grid ranges are repo defaults, recorded in the
// params file.

namespace detail {

inline void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << text;
}

inline void write_csv_file(const SweepResult& res, const std::filesystem::path& p) {
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    write_csv(res, out);
}

inline void write_wigner_csv(const WignerGrid& w, const std::filesystem::path& p) {
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << "x,y,w\n";
    for (size_t iy = 0; iy < w.y_values.size(); ++iy)
        for (size_t ix = 0; ix < w.x_values.size(); ++ix)
            out << format_double(w.x_values[ix]) << "," << format_double(w.y_values[iy]) << ","
                << format_double(w.values[iy][ix]) << "\n";
}

inline std::string grid_plot_stub(const std::string& csv, const std::string& xcol,
                                  const std::string& ycol, const std::string& zcol) {
    return "#!/usr/bin/env python3\n"
           "import csv, math\n"
           "import matplotlib\n"
           "matplotlib.use('Agg')\n"
           "import matplotlib.pyplot as plt\n\n"
           "xs, ys, zs = [], [], []\n"
           "with open('" + csv + "') as f:\n"
           "    for row in csv.DictReader(f):\n"
           "        xs.append(float(row['" + xcol + "']))\n"
           "        ys.append(float(row['" + ycol + "']))\n"
           "        zs.append(float(row['" + zcol + "']) if row['" + zcol + "'] else math.nan)\n"
           "nx = len(sorted(set(xs)))\n"
           "ny = len(sorted(set(ys)))\n"
           "fig, ax = plt.subplots()\n"
           "m = ax.imshow([[zs[i*ny+j] for i in range(nx)] for j in range(ny)],\n"
           "              origin='lower', aspect='auto',\n"
           "              extent=[min(xs), max(xs), min(ys), max(ys)])\n"
           "fig.colorbar(m, ax=ax, label='" + zcol + "')\n"
           "ax.set_xlabel('" + xcol + "')\n"
           "ax.set_ylabel('" + ycol + "')\n"
           "fig.savefig('" + csv + ".png', dpi=160)\n"
           "print('wrote " + csv + ".png')\n";
}

inline std::string line_plot_stub(const std::string& csv, const std::string& xcol,
                                  const std::vector<std::string>& ycols) {
    std::string cols;
    for (const auto& c : ycols) cols += "'" + c + "', ";
    return "#!/usr/bin/env python3\n"
           "import csv, math\n"
           "import matplotlib\n"
           "matplotlib.use('Agg')\n"
           "import matplotlib.pyplot as plt\n\n"
           "cols = [" + cols + "]\n"
           "xs, series = [], {c: [] for c in cols}\n"
           "with open('" + csv + "') as f:\n"
           "    for row in csv.DictReader(f):\n"
           "        xs.append(float(row['" + xcol + "']))\n"
           "        for c in cols:\n"
           "            series[c].append(float(row[c]) if row.get(c) else math.nan)\n"
           "fig, ax = plt.subplots()\n"
           "for c in cols:\n"
           "    ax.plot(xs, series[c], label=c)\n"
           "ax.set_xlabel('" + xcol + "')\n"
           "ax.legend()\n"
           "fig.savefig('" + csv + ".png', dpi=160)\n"
           "print('wrote " + csv + ".png')\n";
}

inline SweepSpec base_spec(SweepModel m) {
    SweepSpec s;
    s.model = m;
    s.omega_a = 40;
    s.omega_b = 1;
    s.omega_q = 5;
    return s;
}

}  // namespace detail

struct FigureFiles {
    std::vector<std::string> written;
};

inline const std::vector<std::string>& figure_names() {
    static const std::vector<std::string> names = {"fig2a", "fig2b", "fig3a", "fig3b",
                                                   "fig4a", "fig4b", "fig5a", "fig5b",
                                                   "fig6a", "fig6b", "fig7", "fig8"};
    return names;
}

inline FigureFiles figure_target(const std::string& name, const std::filesystem::path& out_dir,
                                 int workers, bool no_cache = false) {
    namespace fs = std::filesystem;
    FigureFiles files;
    fs::create_directories(out_dir);
    auto add = [&](const fs::path& p) { files.written.push_back(p.string()); };
    auto params_json = [&](nlohmann::json j) {
        j["target"] = name;
        fs::path p = out_dir / (name + "_params.json");
        detail::write_file(p, j.dump(1) + "\n");
        add(p);
    };

    const double jt_fig3 = 0.95;

    if (name == "fig2a" || name == "fig2b") {
        SweepSpec s = detail::base_spec(SweepModel::effective);
        s.axes = {{"j_tilde", 0.005, 0.995, name == "fig2a" ? 201 : 61},
                  {"g_tilde", 0.015, 3.0, name == "fig2a" ? 201 : 61}};
        s.observables = name == "fig2a" ? ObservableMode::analytic : ObservableMode::both;
        SweepResult res = run_sweep(s, workers, no_cache);
        fs::path csv = out_dir / (name + ".csv");
        detail::write_csv_file(res, csv);
        add(csv);
        // threshold curve: g_c(J~) from the dimensionless critical coupling
        std::ofstream bnd(out_dir / (name + "_boundary.csv"));
        bnd << "j_tilde,g_tilde_c\n";
        for (int i = 0; i < 201; ++i) {
            double jt = 0.005 + (0.995 - 0.005) * i / 200.0;
            bnd << format_double(jt) << "," << format_double(critical_coupling_dimensionless(jt))
                << "\n";
        }
        add(out_dir / (name + "_boundary.csv"));
        detail::write_file(out_dir / (name + "_plot.py"),
                           detail::grid_plot_stub(name + ".csv", "j_tilde", "g_tilde",
                                                  name == "fig2a" ? "n_b_analytic"
                                                                  : "n_b_numeric"));
        add(out_dir / (name + "_plot.py"));
        params_json(spec_to_json(s));
    } else if (name == "fig3a") {
        SweepSpec s = detail::base_spec(SweepModel::effective);
        s.j_tilde = jt_fig3;
        s.axes = {{"g_tilde", 0.0, 0.65, 66}};
        s.trunc_n_b = {90, 130};
        SweepResult res = run_sweep(s, workers, no_cache);
        fs::path csv = out_dir / "fig3a.csv";
        detail::write_csv_file(res, csv);
        add(csv);
        detail::write_file(out_dir / "fig3a_plot.py",
                           detail::line_plot_stub("fig3a.csv", "g_tilde",
                                                  {"n_b_analytic", "n_b_numeric"}));
        add(out_dir / "fig3a_plot.py");
        params_json(spec_to_json(s));
    } else if (name == "fig3b") {
        SweepSpec s_full = detail::base_spec(SweepModel::full);
        s_full.j_tilde = jt_fig3;
        s_full.axes = {{"g_tilde", 0.0, 0.65, 66}};
        s_full.trunc_n_b = {100, 130};
        s_full.trunc_n_a = {12, 16};
        SweepResult full = run_sweep(s_full, workers, no_cache);
        fs::path csv_full = out_dir / "fig3b_full.csv";
        detail::write_csv_file(full, csv_full);
        add(csv_full);

        SweepSpec s_eff = detail::base_spec(SweepModel::effective);
        s_eff.j_tilde = jt_fig3;
        s_eff.axes = {{"g_tilde", 0.0, 0.65, 66}};
        s_eff.trunc_n_b = {90, 130};
        SweepResult eff = run_sweep(s_eff, workers, no_cache);
        fs::path csv_eff = out_dir / "fig3b_effective.csv";
        detail::write_csv_file(eff, csv_eff);
        add(csv_eff);

        detail::write_file(out_dir / "fig3b_plot.py",
                           "#!/usr/bin/env python3\n"
                           "import csv, math\n"
                           "import matplotlib\n"
                           "matplotlib.use('Agg')\n"
                           "import matplotlib.pyplot as plt\n\n"
                           "def load(path, col):\n"
                           "    xs, ys = [], []\n"
                           "    with open(path) as f:\n"
                           "        for row in csv.DictReader(f):\n"
                           "            xs.append(float(row['g_tilde']))\n"
                           "            ys.append(float(row[col]) if row[col] else math.nan)\n"
                           "    return xs, ys\n\n"
                           "fig, ax = plt.subplots()\n"
                           "for path, col, lbl in [('fig3b_full.csv', 'n_b_numeric', 'full'),\n"
                           "                       ('fig3b_effective.csv', 'n_b_numeric', "
                           "'effective'),\n"
                           "                       ('fig3b_full.csv', 'n_a_numeric', 'n_a "
                           "(full)')]:\n"
                           "    xs, ys = load(path, col)\n"
                           "    ax.plot(xs, ys, label=lbl)\n"
                           "ax.set_xlabel('g_tilde')\n"
                           "ax.set_ylabel('rescaled occupation')\n"
                           "ax.legend()\n"
                           "fig.savefig('fig3b.png', dpi=160)\n"
                           "print('wrote fig3b.png')\n");
        add(out_dir / "fig3b_plot.py");
        nlohmann::json j;
        j["full"] = spec_to_json(s_full);
        j["effective"] = spec_to_json(s_eff);
        params_json(j);
    } else if (name == "fig4a" || name == "fig4b" || name == "fig5a") {
        SweepSpec s = detail::base_spec(SweepModel::effective_a2);
        const bool fig5 = name == "fig5a";
        double d_fixed = name == "fig4a" ? 0.5 : 1.0;
        if (fig5) {
            s.j_tilde = 1.03;
            s.axes = {{"d_tilde", 1.0, 2.0, 201}, {"g_tilde", 0.01, 1.5, 201}};
        } else {
            s.d_tilde = d_fixed;
            s.axes = {{"j_tilde", 0.85, 1.15, 201}, {"g_tilde", 0.01, 3.0, 201}};
        }
        s.observables = ObservableMode::analytic;
        SweepResult res = run_sweep(s, workers, no_cache);
        fs::path csv = out_dir / (name + ".csv");
        detail::write_csv_file(res, csv);
        add(csv);
        // phase boundaries per row value: B = 1 crossings and the UP bound
        std::ofstream bnd(out_dir / (name + "_boundaries.csv"));
        bnd << (fig5 ? "d_tilde" : "j_tilde") << ",g_lower,g_upper,g_up_bound\n";
        for (int i = 0; i < 201; ++i) {
            double row = s.axes[0].value(i);
            double jt = fig5 ? 1.03 : row;
            double dt = fig5 ? row : d_fixed;
            SpWindow w = a2_sp_window(jt, dt);
            bnd << format_double(row) << ",";
            if (w.lower) bnd << format_double(*w.lower);
            bnd << ",";
            if (w.upper) bnd << format_double(*w.upper);
            bnd << ",";
            if (jt > 1) bnd << format_double(std::sqrt((jt * jt - 1) / dt));
            bnd << "\n";
        }
        add(out_dir / (name + "_boundaries.csv"));
        detail::write_file(out_dir / (name + "_plot.py"),
                           detail::grid_plot_stub(name + ".csv", fig5 ? "d_tilde" : "j_tilde",
                                                  "g_tilde", "n_b_analytic"));
        add(out_dir / (name + "_plot.py"));
        params_json(spec_to_json(s));
    } else if (name == "fig5b") {
        SweepSpec s = detail::base_spec(SweepModel::effective_a2);
        s.j_tilde = 1.03;
        s.d_tilde = 1.5;
        s.axes = {{"g_tilde", 0.05, 1.5, 59}};
        s.trunc_n_b = {240, 320};
        SweepResult res = run_sweep(s, workers, no_cache);
        fs::path csv = out_dir / "fig5b.csv";
        detail::write_csv_file(res, csv);
        add(csv);
        detail::write_file(out_dir / "fig5b_plot.py",
                           detail::line_plot_stub("fig5b.csv", "g_tilde",
                                                  {"n_b_analytic", "n_b_numeric"}));
        add(out_dir / "fig5b_plot.py");
        params_json(spec_to_json(s));
    } else if (name == "fig6a" || name == "fig6b") {
        const bool sp_panel = name == "fig6b";
        const double g = sp_panel ? 3.4 : 2.0, J = 3.0;
        const int cutoff = 160;
        ModelParams p(40, 1, 5, g, J);
        Truncation t = Truncation::b_only(cutoff);
        SolverOptions opt;
        SpectralResult sol = lowest_eigenpairs(build_effective(p, t), 2, opt);
        WignerSpec spec;  // x, y in [-9, 9], 201 points
        nlohmann::json meta;
        meta["g"] = g;
        meta["J"] = J;
        meta["omega_a"] = 40;
        meta["omega_b"] = 1;
        meta["omega_q"] = 5;
        meta["cutoff"] = cutoff;
        meta["frame"] = "lab";
        meta["grid"] = {{"min", spec.x_min}, {"max", spec.x_max}, {"points", spec.nx}};
        WignerGrid w;
        if (sp_panel) {
            SpSolution sp = sp_solution(p, SpBranch::plus);
            Eigen::Vector2cd spinor(0.0, 1.0);  // (|down>_+ + |down>_-) normalized
            auto [phi, prob] = project_qubit(sol.eigenvectors[0], t, spinor);
            DensityMatrix rho{Factor::mode_b, phi * phi.adjoint()};
            w = wigner(rho, spec);
            EffectiveParams e = effective_params(p);
            meta["projection"] = "qubit (|down>_+ + |down>_-)/norm";
            meta["projection_probability"] = prob;
            meta["alpha"] = sp.alpha;
            meta["r"] = e.r;
            meta["r_sp"] = sp.r_sp;
            meta["predicted_lobe_x"] = std::sqrt(2.0) * std::exp(e.r) * sp.alpha;
        } else {
            DensityMatrix rho = reduce(sol.eigenvectors[0], t, Factor::mode_b);
            w = wigner(rho, spec);
            meta["projection"] = "none (reduced state)";
            meta["purity"] = reduce(sol.eigenvectors[0], t, Factor::mode_b).purity();
        }
        meta["min_w"] = w.min_value();
        meta["grid_integral"] = w.grid_integral();
        meta["tail_warning"] = w.tail_warning;
        fs::path csv = out_dir / (name + ".csv");
        detail::write_wigner_csv(w, csv);
        add(csv);
        detail::write_file(out_dir / (name + "_plot.py"),
                           detail::grid_plot_stub(name + ".csv", "x", "y", "w"));
        add(out_dir / (name + "_plot.py"));
        params_json(meta);
    } else if (name == "fig7") {
        ModelParams p(40, 1, 5, 2.5, 0.0);
        fs::path csv = out_dir / "fig7.csv";
        std::ofstream out(csv);
        out << "j1,j2,chi2r_over_chi1r,stable\n";
        const int n = 61;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double j1 = 1.0 + 3.0 * i / double(n - 1);
                double j2 = 1.0 + 3.0 * j / double(n - 1);
                out << format_double(j1) << "," << format_double(j2) << ",";
                try {
                    AnisotropicParams q = anisotropic_params(p, j1, j2);
                    out << format_double(q.chi2r / q.chi1r) << ",true\n";
                } catch (const std::runtime_error&) {
                    out << ",false\n";
                }
            }
        out.close();
        add(csv);
        detail::write_file(out_dir / "fig7_plot.py",
                           detail::grid_plot_stub("fig7.csv", "j1", "j2", "chi2r_over_chi1r"));
        add(out_dir / "fig7_plot.py");
        nlohmann::json j;
        j["g"] = 2.5;
        j["grid"] = {{"min", 1.0}, {"max", 4.0}, {"points", n}};
        params_json(j);
    } else if (name == "fig8") {
        fs::path csv = out_dir / "fig8.csv";
        std::ofstream out(csv);
        out << "j1,j2,g,phase,n_b_analytic,n_b_numeric,energy,gap01,converged,error\n";
        const std::vector<std::pair<double, double>> pairs = {{2.5, 3.5}, {3.5, 2.5},
                                                              {3.0, 3.0}};
        for (auto [j1, j2] : pairs) {
            SweepSpec s = detail::base_spec(SweepModel::anisotropic);
            s.j1 = j1;
            s.j2 = j2;
            s.axes = {{"g", 0.0, 4.0, 41}};
            s.trunc_n_b = {110, 150};
            SweepResult res = run_sweep(s, workers, no_cache);
            for (const auto& r : res.records) {
                out << format_double(j1) << "," << format_double(j2) << ","
                    << format_double(r.axis_values[0]) << "," << r.phase << ",";
                auto cell = [&](const std::optional<double>& v) {
                    if (v) out << format_double(*v);
                    out << ",";
                };
                cell(r.n_b_analytic);
                cell(r.n_b_numeric);
                cell(r.energy);
                cell(r.gap01);
                if (r.converged) out << (*r.converged ? "true" : "false");
                out << "," << r.error << "\n";
            }
        }
        out.close();
        add(csv);
        detail::write_file(out_dir / "fig8_plot.py",
                           "#!/usr/bin/env python3\n"
                           "import csv, math\n"
                           "import matplotlib\n"
                           "matplotlib.use('Agg')\n"
                           "import matplotlib.pyplot as plt\n\n"
                           "curves = {}\n"
                           "with open('fig8.csv') as f:\n"
                           "    for row in csv.DictReader(f):\n"
                           "        key = (row['j1'], row['j2'])\n"
                           "        curves.setdefault(key, ([], []))\n"
                           "        curves[key][0].append(float(row['g']))\n"
                           "        curves[key][1].append(float(row['n_b_numeric'])\n"
                           "                              if row['n_b_numeric'] else math.nan)\n"
                           "fig, ax = plt.subplots()\n"
                           "for (j1, j2), (xs, ys) in curves.items():\n"
                           "    ax.plot(xs, ys, label=f'J1={j1}, J2={j2}')\n"
                           "ax.set_xlabel('g / omega_b')\n"
                           "ax.set_ylabel('n_b')\n"
                           "ax.legend()\n"
                           "fig.savefig('fig8.png', dpi=160)\n"
                           "print('wrote fig8.png')\n");
        add(out_dir / "fig8_plot.py");
        nlohmann::json j;
        j["pairs"] = {{2.5, 3.5}, {3.5, 2.5}, {3.0, 3.0}};
        j["g_axis"] = {{"min", 0.0}, {"max", 4.0}, {"count", 41}};
        params_json(j);
    } else {
        std::string valid;
        for (const auto& n : figure_names()) valid += n + " ";
        throw std::runtime_error("unknown figure target `" + name + "`; valid: " + valid);
    }
    return files;
}

}  // namespace rabilab
