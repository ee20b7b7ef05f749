#pragma once

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <thread>
#include <unistd.h>

#include <json.hpp>

#include "rabilab/config.hpp"
#include "rabilab/criticality.hpp"
#include "rabilab/detail/sha256.hpp"
#include "rabilab/spectra.hpp"
#include "rabilab/version.hpp"

namespace rabilab {

enum class SweepModel { full, effective, effective_a2, anisotropic };

inline const char* model_name(SweepModel m) {
    switch (m) {
        case SweepModel::full: return "full";
        case SweepModel::effective: return "effective";
        case SweepModel::effective_a2: return "effective_a2";
        case SweepModel::anisotropic: return "anisotropic";
    }
    return "?";
}

inline SweepModel model_from_name(const std::string& s) {
    if (s == "full") return SweepModel::full;
    if (s == "effective") return SweepModel::effective;
    if (s == "effective_a2") return SweepModel::effective_a2;
    if (s == "anisotropic") return SweepModel::anisotropic;
    throw std::runtime_error("config: unknown model `" + s +
                             "` (full, effective, effective_a2, anisotropic)");
}

struct SweepAxis {
    std::string name;
    double min = 0, max = 0;
    int count = 0;

    double value(int i) const {
        return count == 1 ? min : min + (max - min) * i / double(count - 1);
    }
};

enum class ObservableMode { analytic, numeric, both };

struct SweepSpec {
    SweepModel model = SweepModel::effective;
    double omega_a = 40, omega_b = 1, omega_q = 5;
    double d_tilde = 0;      // effective_a2
    double j1 = 0, j2 = 0;   // anisotropic
    double g_tilde = 0, j_tilde = 0, g = 0;  // fixed values when not swept
    std::vector<SweepAxis> axes;             // one or two
    std::vector<int> trunc_n_b;
    std::vector<int> trunc_n_a;              // full model only
    double solver_tol = 1e-8;
    double convergence_tol = 1e-3;
    ObservableMode observables = ObservableMode::both;
    std::string cache_dir;

    int point_count() const {
        int n = 1;
        for (const auto& a : axes) n *= a.count;
        return n;
    }
};

struct SweepRecord {
    std::vector<double> axis_values;
    std::string phase;
    std::optional<double> n_b_analytic;
    std::optional<double> n_b_numeric;
    std::optional<double> n_a_numeric;
    std::optional<double> energy;
    std::optional<double> gap01;
    std::optional<bool> converged;
    std::string error;
    double wall_ms = 0;  // in-memory only; never serialized
};

struct SweepResult {
    SweepSpec spec;
    std::vector<SweepRecord> records;
    int failed_points = 0;
};

// ---------------------------------------------------------------------------
// config io

namespace detail {

inline const std::set<std::string>& valid_axes(SweepModel m) {
    static const std::set<std::string> tilde = {"g_tilde", "j_tilde"};
    static const std::set<std::string> a2 = {"g_tilde", "j_tilde", "d_tilde"};
    static const std::set<std::string> aniso = {"g", "j1", "j2"};
    switch (m) {
        case SweepModel::full:
        case SweepModel::effective: return tilde;
        case SweepModel::effective_a2: return a2;
        case SweepModel::anisotropic: return aniso;
    }
    return tilde;
}

inline std::vector<int> to_int_schedule(const std::vector<double>& xs, const char* key) {
    std::vector<int> out;
    for (double x : xs) {
        int i = static_cast<int>(x);
        if (i < 0 || double(i) != x)
            throw std::runtime_error(std::string("config: ") + key +
                                     " must hold nonnegative integers");
        out.push_back(i);
    }
    return out;
}

}  // namespace detail

inline SweepSpec sweep_spec_from_config(ConfigMap cfg) {
    SweepSpec s;
    s.model = model_from_name(cfg.require_string("model"));
    s.omega_a = cfg.get_number("omega_a", 40.0);
    s.omega_b = cfg.get_number("omega_b", 1.0);
    s.omega_q = cfg.get_number("omega_q", 5.0);
    s.d_tilde = cfg.get_number("d_tilde", 0.0);
    s.j1 = cfg.get_number("j1", 0.0);
    s.j2 = cfg.get_number("j2", 0.0);
    s.g_tilde = cfg.get_number("g_tilde", 0.0);
    s.j_tilde = cfg.get_number("j_tilde", 0.0);
    s.g = cfg.get_number("g", 0.0);
    for (int i = 1; i <= 2; ++i) {
        const std::string p = "axis" + std::to_string(i) + "_";
        if (!cfg.has(p + "name")) break;
        SweepAxis ax;
        ax.name = cfg.require_string(p + "name");
        ax.min = cfg.require_number(p + "min");
        ax.max = cfg.require_number(p + "max");
        ax.count = static_cast<int>(cfg.require_number(p + "count"));
        if (ax.count < 2) throw std::runtime_error("config: axis counts must be >= 2");
        if (!detail::valid_axes(s.model).count(ax.name))
            throw std::runtime_error("config: axis `" + ax.name + "` is not valid for model " +
                                     model_name(s.model));
        s.axes.push_back(ax);
    }
    if (s.axes.empty()) throw std::runtime_error("config: at least axis1_* must be given");
    s.trunc_n_b = detail::to_int_schedule(cfg.get_array("trunc_n_b", {60.0, 90.0, 130.0}),
                                          "trunc_n_b");
    s.trunc_n_a =
        detail::to_int_schedule(cfg.get_array("trunc_n_a", {8.0, 12.0, 16.0}), "trunc_n_a");
    s.solver_tol = cfg.get_number("solver_tol", 1e-8);
    s.convergence_tol = cfg.get_number("convergence_tol", 1e-3);
    const std::string obs = cfg.get_string("observables", "both");
    if (obs == "analytic")
        s.observables = ObservableMode::analytic;
    else if (obs == "numeric")
        s.observables = ObservableMode::numeric;
    else if (obs == "both")
        s.observables = ObservableMode::both;
    else
        throw std::runtime_error("config: observables must be analytic, numeric or both");
    s.cache_dir = cfg.get_string("cache_dir", "");
    cfg.finish();
    return s;
}

inline std::string sweep_spec_to_config(const SweepSpec& s) {
    std::string out;
    auto kv = [&](const std::string& k, const std::string& v) { out += k + " = " + v + "\n"; };
    kv("model", std::string("\"") + model_name(s.model) + "\"");
    kv("omega_a", format_double(s.omega_a));
    kv("omega_b", format_double(s.omega_b));
    kv("omega_q", format_double(s.omega_q));
    kv("d_tilde", format_double(s.d_tilde));
    kv("j1", format_double(s.j1));
    kv("j2", format_double(s.j2));
    kv("g_tilde", format_double(s.g_tilde));
    kv("j_tilde", format_double(s.j_tilde));
    kv("g", format_double(s.g));
    for (size_t i = 0; i < s.axes.size(); ++i) {
        const std::string p = "axis" + std::to_string(i + 1) + "_";
        kv(p + "name", "\"" + s.axes[i].name + "\"");
        kv(p + "min", format_double(s.axes[i].min));
        kv(p + "max", format_double(s.axes[i].max));
        kv(p + "count", std::to_string(s.axes[i].count));
    }
    auto arr = [&](const std::vector<int>& xs) {
        std::string a = "[";
        for (size_t i = 0; i < xs.size(); ++i) a += (i ? ", " : "") + std::to_string(xs[i]);
        return a + "]";
    };
    kv("trunc_n_b", arr(s.trunc_n_b));
    kv("trunc_n_a", arr(s.trunc_n_a));
    kv("solver_tol", format_double(s.solver_tol));
    kv("convergence_tol", format_double(s.convergence_tol));
    kv("observables", s.observables == ObservableMode::analytic  ? "\"analytic\""
                      : s.observables == ObservableMode::numeric ? "\"numeric\""
                                                                 : "\"both\"");
    if (!s.cache_dir.empty()) kv("cache_dir", "\"" + s.cache_dir + "\"");
    return out;
}

// ---------------------------------------------------------------------------
// point evaluation

namespace detail {

struct PointParams {
    double g_tilde, j_tilde, d_tilde;  // tilde models
    double g, j1, j2;                  // anisotropic
};

inline PointParams point_params(const SweepSpec& s, const std::vector<double>& axis_values) {
    PointParams p{s.g_tilde, s.j_tilde, s.d_tilde, s.g, s.j1, s.j2};
    for (size_t i = 0; i < s.axes.size(); ++i) {
        const std::string& n = s.axes[i].name;
        double v = axis_values[i];
        if (n == "g_tilde") p.g_tilde = v;
        else if (n == "j_tilde") p.j_tilde = v;
        else if (n == "d_tilde") p.d_tilde = v;
        else if (n == "g") p.g = v;
        else if (n == "j1") p.j1 = v;
        else if (n == "j2") p.j2 = v;
    }
    return p;
}

// Semiclassical order parameter for the anisotropic model (classical-
// oscillator limit): alpha^2 = S^2/(4 M^2) - omega_q^2/(4 S^2) rescaled like
// the isotropic form, with S = chi1 + chi2 and M = omega_b - 2 xi1 - 2 xi2.
inline double order_parameter_anisotropic(const ModelParams& p, double j1, double j2) {
    const AnisotropicParams q = anisotropic_params(p, j1, j2);
    const double S = q.chi1 + q.chi2;
    const double M = p.omega_b() - 2 * q.xi1 - 2 * q.xi2;
    if (S * S <= M * p.omega_q()) return 0.0;
    const double alpha2 = S * S / (4 * M * M) - p.omega_q() * p.omega_q() / (4 * S * S);
    return std::exp(-4 * q.r_prime) * p.omega_b() / p.omega_q() * alpha2;
}

inline PhaseLabel anisotropic_phase(const ModelParams& p, double j1, double j2,
                                    double tol = 1e-6) {
    AnisotropicParams q;
    try {
        q = anisotropic_params(p, j1, j2);
    } catch (const std::runtime_error&) {
        return PhaseLabel::UP;
    }
    const double S = q.chi1 + q.chi2;
    const double M = p.omega_b() - 2 * q.xi1 - 2 * q.xi2;
    const double crit = M * p.omega_q();
    if (std::abs(S * S - crit) <= tol * std::max(crit, 1.0)) return PhaseLabel::BOUNDARY;
    return S * S < crit ? PhaseLabel::NP : PhaseLabel::SP;
}

inline std::vector<Truncation> schedule_for(const SweepSpec& s) {
    std::vector<Truncation> out;
    for (size_t i = 0; i < s.trunc_n_b.size(); ++i) {
        if (s.model == SweepModel::full) {
            const int na = i < s.trunc_n_a.size() ? s.trunc_n_a[i] : s.trunc_n_a.back();
            out.push_back(Truncation::with_a(na, s.trunc_n_b[i]));
        } else {
            out.push_back(Truncation::b_only(s.trunc_n_b[i]));
        }
    }
    return out;
}

inline SweepRecord evaluate_point(const SweepSpec& s, const std::vector<double>& axis_values) {
    const auto t0 = std::chrono::steady_clock::now();
    SweepRecord rec;
    rec.axis_values = axis_values;
    const PointParams pt = point_params(s, axis_values);

    try {
        ModelParams params(1, 1, 1, 0, 0);
        PhaseLabel phase = PhaseLabel::NP;
        if (s.model == SweepModel::anisotropic) {
            params = ModelParams(s.omega_a, s.omega_b, s.omega_q, pt.g, 0.0);
            phase = anisotropic_phase(params, pt.j1, pt.j2);
            rec.phase = phase_name(phase);
            if (phase != PhaseLabel::UP)
                rec.n_b_analytic = order_parameter_anisotropic(params, pt.j1, pt.j2);
        } else {
            params = params_from_tilde(s.omega_a, s.omega_b, s.omega_q, pt.g_tilde, pt.j_tilde);
            const double dt = s.model == SweepModel::effective_a2 ? pt.d_tilde : 0.0;
            phase = classify_phase(pt.g_tilde, pt.j_tilde, dt);
            rec.phase = phase_name(phase);
            if (phase != PhaseLabel::UP)
                rec.n_b_analytic = s.model == SweepModel::effective_a2
                                       ? a2_order_parameter(pt.g_tilde, pt.j_tilde, dt)
                                       : order_parameter_dimensionless(pt.g_tilde, pt.j_tilde);
        }
        if (phase == PhaseLabel::UP || s.observables == ObservableMode::analytic) {
            rec.wall_ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - t0)
                              .count();
            return rec;
        }

        SolverOptions opt;
        opt.tol = s.solver_tol;
        auto builder = [&](const Truncation& t) -> std::pair<LinOp, ObservableFrame> {
            switch (s.model) {
                case SweepModel::full:
                    return {build_full(params, t),
                            ObservableFrame::effective(effective_params(params))};
                case SweepModel::effective:
                    return {build_effective(params, t),
                            ObservableFrame::effective(effective_params(params))};
                case SweepModel::effective_a2:
                    return {build_effective_a2(params, pt.d_tilde, t),
                            ObservableFrame::a2(a2_params(params, pt.d_tilde))};
                case SweepModel::anisotropic:
                    return {build_anisotropic_effective(params, pt.j1, pt.j2, t),
                            ObservableFrame::anisotropic(
                                anisotropic_params(params, pt.j1, pt.j2))};
            }
            throw std::logic_error("unreachable");
        };
        GroundStateResult g = converge_in_truncation(builder, params, schedule_for(s),
                                                     s.convergence_tol, opt);
        rec.n_b_numeric = g.n_b_rescaled;
        if (s.model == SweepModel::full) rec.n_a_numeric = g.n_a_rescaled;
        rec.energy = g.energy;
        rec.gap01 = g.gap_01;
        rec.converged = g.converged;
    } catch (const std::exception& e) {
        rec.error = e.what();
    }
    rec.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// cache

// Collision-resistant digest over canonicalized parameters, model,
// truncation, tolerance and library version; independent of axis order.
inline std::string cache_key(const SweepSpec& s, const std::vector<double>& axis_values) {
    const detail::PointParams pt = detail::point_params(s, axis_values);
    std::string canon;
    canon += std::string("version=") + kVersion;
    canon += "|model=" + std::string(model_name(s.model));
    canon += "|omega_a=" + format_double(s.omega_a);
    canon += "|omega_b=" + format_double(s.omega_b);
    canon += "|omega_q=" + format_double(s.omega_q);
    if (s.model == SweepModel::anisotropic) {
        canon += "|g=" + format_double(pt.g);
        canon += "|j1=" + format_double(pt.j1);
        canon += "|j2=" + format_double(pt.j2);
    } else {
        canon += "|g_tilde=" + format_double(pt.g_tilde);
        canon += "|j_tilde=" + format_double(pt.j_tilde);
        if (s.model == SweepModel::effective_a2) canon += "|d_tilde=" + format_double(pt.d_tilde);
    }
    canon += "|trunc_n_b=";
    for (int x : s.trunc_n_b) canon += std::to_string(x) + ",";
    if (s.model == SweepModel::full) {
        canon += "|trunc_n_a=";
        for (int x : s.trunc_n_a) canon += std::to_string(x) + ",";
    }
    canon += "|solver_tol=" + format_double(s.solver_tol);
    canon += "|convergence_tol=" + format_double(s.convergence_tol);
    canon += "|observables=" + std::to_string(static_cast<int>(s.observables));
    return detail::Sha256::hash_hex(canon);
}

namespace detail {

inline nlohmann::json record_to_json(const SweepRecord& r) {
    nlohmann::json j;
    j["axis_values"] = r.axis_values;
    j["phase"] = r.phase;
    auto put = [&](const char* k, const std::optional<double>& v) {
        if (v) j[k] = *v;
    };
    put("n_b_analytic", r.n_b_analytic);
    put("n_b_numeric", r.n_b_numeric);
    put("n_a_numeric", r.n_a_numeric);
    put("energy", r.energy);
    put("gap01", r.gap01);
    if (r.converged) j["converged"] = *r.converged;
    if (!r.error.empty()) j["error"] = r.error;
    return j;
}

inline SweepRecord record_from_json(const nlohmann::json& j) {
    SweepRecord r;
    r.axis_values = j.at("axis_values").get<std::vector<double>>();
    r.phase = j.at("phase").get<std::string>();
    auto get = [&](const char* k, std::optional<double>& v) {
        if (j.contains(k)) v = j.at(k).get<double>();
    };
    get("n_b_analytic", r.n_b_analytic);
    get("n_b_numeric", r.n_b_numeric);
    get("n_a_numeric", r.n_a_numeric);
    get("energy", r.energy);
    get("gap01", r.gap01);
    if (j.contains("converged")) r.converged = j.at("converged").get<bool>();
    if (j.contains("error")) r.error = j.at("error").get<std::string>();
    return r;
}

inline std::optional<SweepRecord> cache_load(const std::string& dir, const std::string& key) {
    if (dir.empty()) return std::nullopt;
    std::filesystem::path p = std::filesystem::path(dir) / (key + ".json");
    std::ifstream in(p);
    if (!in) return std::nullopt;
    try {
        nlohmann::json j;
        in >> j;
        return record_from_json(j);
    } catch (...) {
        return std::nullopt;  // corrupt entries are recomputed
    }
}

// write-temp-then-rename so concurrent readers never see partial files
inline void cache_store(const std::string& dir, const std::string& key, const SweepRecord& r) {
    if (dir.empty()) return;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    std::filesystem::path tmp =
        std::filesystem::path(dir) / (key + ".tmp." + std::to_string(::getpid()));
    std::filesystem::path dst = std::filesystem::path(dir) / (key + ".json");
    {
        std::ofstream out(tmp);
        out << record_to_json(r).dump();
    }
    std::filesystem::rename(tmp, dst, ec);
    if (ec) std::filesystem::remove(tmp, ec);
}

}  // namespace detail

// Resolved cache directory: the environment variable wins over the config.
inline std::string resolve_cache_dir(const SweepSpec& s, bool no_cache) {
    if (no_cache) return "";
    if (const char* env = std::getenv("RABI_LAB_CACHE"); env && *env) return env;
    return s.cache_dir;
}

// ---------------------------------------------------------------------------
// runner

// Every grid point is evaluated (analytics always, ED when requested); point
// failures are recorded and the run continues. Output is deterministic and
// independent of the worker count.
inline SweepResult run_sweep(const SweepSpec& spec, int workers, bool no_cache = false) {
    SweepResult result;
    result.spec = spec;
    const int n = spec.point_count();
    result.records.resize(n);
    const std::string cache_dir = resolve_cache_dir(spec, no_cache);

    const int count2 = spec.axes.size() == 2 ? spec.axes[1].count : 1;
    auto axis_values_of = [&](int idx) {
        std::vector<double> v;
        v.push_back(spec.axes[0].value(idx / count2));
        if (spec.axes.size() == 2) v.push_back(spec.axes[1].value(idx % count2));
        return v;
    };

    std::atomic<int> next{0};
    auto work = [&] {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
            const std::vector<double> vals = axis_values_of(i);
            const std::string key = cache_key(spec, vals);
            if (auto hit = detail::cache_load(cache_dir, key)) {
                result.records[i] = *hit;
                result.records[i].axis_values = vals;
                continue;
            }
            SweepRecord rec = detail::evaluate_point(spec, vals);
            detail::cache_store(cache_dir, key, rec);
            result.records[i] = std::move(rec);
        }
    };
    workers = std::max(1, workers);
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < workers; ++t) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    for (const auto& r : result.records)
        if (!r.error.empty()) ++result.failed_points;
    return result;
}

// ---------------------------------------------------------------------------
// emission

inline void write_csv(const SweepResult& res, std::ostream& out) {
    for (const auto& ax : res.spec.axes) out << ax.name << ",";
    out << "phase,n_b_analytic,n_b_numeric,n_a_numeric,energy,gap01,converged,error\n";
    auto cell = [&](const std::optional<double>& v) {
        if (v) out << format_double(*v);
        out << ",";
    };
    for (const auto& r : res.records) {
        for (double v : r.axis_values) out << format_double(v) << ",";
        out << r.phase << ",";
        cell(r.n_b_analytic);
        cell(r.n_b_numeric);
        cell(r.n_a_numeric);
        cell(r.energy);
        cell(r.gap01);
        if (r.converged) out << (*r.converged ? "true" : "false");
        out << "," << r.error << "\n";
    }
}

inline nlohmann::json spec_to_json(const SweepSpec& s) {
    nlohmann::json j;
    j["model"] = model_name(s.model);
    j["omega_a"] = s.omega_a;
    j["omega_b"] = s.omega_b;
    j["omega_q"] = s.omega_q;
    j["d_tilde"] = s.d_tilde;
    j["j1"] = s.j1;
    j["j2"] = s.j2;
    j["g_tilde"] = s.g_tilde;
    j["j_tilde"] = s.j_tilde;
    j["g"] = s.g;
    j["axes"] = nlohmann::json::array();
    for (const auto& a : s.axes)
        j["axes"].push_back({{"name", a.name}, {"min", a.min}, {"max", a.max},
                             {"count", a.count}});
    j["trunc_n_b"] = s.trunc_n_b;
    j["trunc_n_a"] = s.trunc_n_a;
    j["solver_tol"] = s.solver_tol;
    j["convergence_tol"] = s.convergence_tol;
    j["observables"] = s.observables == ObservableMode::analytic  ? "analytic"
                       : s.observables == ObservableMode::numeric ? "numeric"
                                                                  : "both";
    return j;
}

inline nlohmann::json to_json(const SweepResult& res) {
    nlohmann::json j;
    j["spec"] = spec_to_json(res.spec);
    j["records"] = nlohmann::json::array();
    for (const auto& r : res.records) j["records"].push_back(detail::record_to_json(r));
    return j;
}

inline void write_json(const SweepResult& res, std::ostream& out) {
    out << to_json(res).dump(1) << "\n";
}

}  // namespace rabilab
