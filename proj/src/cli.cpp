#include "nlsgraph/cli.hpp"

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "nlsgraph/functionals.hpp"
#include "nlsgraph/scattering.hpp"
#include "nlsgraph/stability.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace nlsg {

namespace {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct BlowUpSignal : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
    for (const auto& [k, v] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || k == a;
        if (!ok) throw ConfigError("unknown key '" + k + "' in " + where);
    }
}

double need_num(const json& obj, const std::string& where, const char* key) {
    if (!obj.contains(key) || !obj[key].is_number())
        throw ConfigError(where + ": missing numeric key '" + std::string(key) + "'");
    return obj[key].get<double>();
}

StarGrid parse_grid(const json& cfg) {
    if (!cfg.contains("graph")) throw ConfigError("config: missing 'graph' block");
    const json& g = cfg["graph"];
    check_keys(g, "graph", {"n_edges", "edge_length", "n_points"});
    return StarGrid(static_cast<int>(need_num(g, "graph", "n_edges")),
                    need_num(g, "graph", "edge_length"),
                    static_cast<int>(need_num(g, "graph", "n_points")));
}

std::pair<NLSParams, VertexCondition> parse_model(const json& cfg, int n_edges) {
    if (!cfg.contains("model")) throw ConfigError("config: missing 'model' block");
    const json& m = cfg["model"];
    check_keys(m, "model", {"mu", "alpha", "vertex", "beta"});
    const double mu = need_num(m, "model", "mu");
    const double alpha = m.value("alpha", 0.0);
    const std::string vertex = m.value("vertex", std::string("delta"));
    NLSParams params(n_edges, mu, alpha);
    if (vertex == "delta") return {params, Delta{alpha}};
    if (vertex == "kirchhoff") {
        if (alpha != 0.0) throw ConfigError("model: kirchhoff vertex requires alpha = 0");
        return {params, Kirchhoff{}};
    }
    if (vertex == "delta_prime_s") return {params, DeltaPrimeS{need_num(m, "model", "beta")}};
    throw ConfigError("model: unknown vertex type '" + vertex + "'");
}

struct Csv {
    std::ofstream out;
    explicit Csv(const fs::path& p) : out(p) {
        if (!out) throw std::runtime_error("cannot open " + p.string());
        out.setf(std::ios::scientific);
    }
    void row(const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
        out << "\n";
    }
};

std::string s(double x) { return csv_number(x); }

// ---------------------------------------------------------------- stationary

void cmd_stationary(const json& cfg, const fs::path& outdir) {
    const StarGrid grid = parse_grid(cfg);
    auto [params, cond] = parse_model(cfg, grid.n_edges);
    if (!is_delta_type(cond))
        throw ConfigError("stationary: catalog exists for delta/kirchhoff vertices only");
    if (!cfg.contains("stationary")) throw ConfigError("config: missing 'stationary' block");
    const json& blk = cfg["stationary"];
    check_keys(blk, "stationary", {"omega", "mass", "j"});
    if (blk.contains("omega") == blk.contains("mass"))
        throw ConfigError("stationary: give exactly one of 'omega' or 'mass'");

    std::vector<int> branches;
    if (blk.contains("j"))
        branches.push_back(static_cast<int>(need_num(blk, "stationary", "j")));
    else
        for (int j : admissible_bump_counts(params)) branches.push_back(j);

    std::vector<std::pair<int, StationaryState>> states;
    for (int j : branches) {
        try {
            double omega;
            if (blk.contains("omega")) {
                omega = need_num(blk, "stationary", "omega");
            } else {
                omega = solve_omega_for_mass(params, j, need_num(blk, "stationary", "mass"));
            }
            states.emplace_back(j, params.alpha == 0.0 ? kirchhoff_state(params, omega, 0.0)
                                                       : build_state(params, omega, j));
        } catch (const NoSolutionError&) {
            if (blk.contains("j")) throw;  // explicit branch request must succeed
        } catch (const std::domain_error&) {
            if (blk.contains("j")) throw;
        } catch (const std::invalid_argument&) {
            if (blk.contains("j")) throw;
        }
    }
    if (states.empty()) throw ConfigError("stationary: no admissible branch matches the request");

    Csv csv(outdir / "states.csv");
    csv.row({"j", "omega", "a", "mass_closed_form", "mass_quadrature", "energy", "action",
             "nehari_residual", "stationary_residual", "vertex_residual"});
    for (const auto& [j, state] : states) {
        const GraphFunction f = sample(state, grid);
        const StationaryResidual res = stationary_residual(f, state.omega, params);
        csv.row({std::to_string(j), s(state.omega),
                 s(state.kirchhoff_shift ? *state.kirchhoff_shift : state.shift),
                 s(mass_closed_form(state)), s(mass(f)), s(energy(f, params)),
                 s(action(f, state.omega, params)), s(nehari(f, state.omega, params)),
                 s(res.interior), s(res.vertex)});
    }
}

// ----------------------------------------------------------------- stability

void cmd_stability(const json& cfg, const fs::path& outdir) {
    const StarGrid grid = parse_grid(cfg);
    auto [params, cond] = parse_model(cfg, grid.n_edges);
    if (!is_delta_type(cond))
        throw ConfigError("stability: supported for delta/kirchhoff vertices only");
    if (!cfg.contains("stability")) throw ConfigError("config: missing 'stability' block");
    const json& blk = cfg["stability"];
    check_keys(blk, "stability", {"omega_sweep", "j", "jl_spectrum"});
    if (!blk.contains("omega_sweep") || !blk["omega_sweep"].is_array())
        throw ConfigError("stability: 'omega_sweep' array is required");
    const int j = blk.contains("j") ? static_cast<int>(need_num(blk, "stability", "j")) : 0;
    const bool want_jl = blk.value("jl_spectrum", false);

    Csv csv(outdir / "stability.csv");
    csv.row({"omega", "morse_index", "l2_kernel_residual", "l2_second_eigenvalue",
             "vk_derivative", "verdict"});
    std::unique_ptr<Csv> jl_csv;
    if (want_jl) {
        jl_csv = std::make_unique<Csv>(outdir / "jl_spectrum.csv");
        jl_csv->row({"omega", "re", "im"});
    }
    const double thr = branch_threshold(params, j);
    for (const json& w : blk["omega_sweep"]) {
        const double omega = w.get<double>();
        if (omega <= thr) {
            csv.row({s(omega), "", "", "", "", "skipped:below_threshold"});
            continue;
        }
        const StabilityReport rep = classify_stability(params, j, omega, grid);
        const char* verdict = rep.verdict == Verdict::Stable     ? "stable"
                              : rep.verdict == Verdict::Unstable ? "unstable"
                                                                 : "undecided";
        csv.row({s(omega), std::to_string(rep.morse_index), s(rep.l2_kernel_residual),
                 s(rep.l2_second_eigenvalue), s(rep.vk), verdict});
        if (want_jl) {
            const StationaryState state = params.alpha == 0.0
                                              ? kirchhoff_state(params, omega, 0.0)
                                              : build_state(params, omega, j);
            const Eigen::VectorXcd ev = jl_spectrum(assemble_JL(state, grid));
            for (int i = 0; i < ev.size(); ++i)
                jl_csv->row({s(omega), s(ev(i).real()), s(ev(i).imag())});
        }
    }
}

// -------------------------------------------------------------------- evolve

struct InitialData {
    GraphFunction psi0;
    std::optional<StationaryState> orbit_reference;
    // Analytic travelling-wave parameters for a time-dependent reference.
    std::optional<std::array<double, 4>> travelling;  // omega, a, v, theta
};

InitialData parse_initial(const json& blk, const NLSParams& params, const StarGrid& grid,
                          std::optional<unsigned> seed_override) {
    if (!blk.contains("initial") || !blk["initial"].is_object())
        throw ConfigError("evolve: 'initial' object is required");
    const json& ini = blk["initial"];
    const std::string type = ini.value("type", std::string());
    if (type == "standing_wave" || type == "perturbed_standing_wave") {
        check_keys(ini, "evolve.initial",
                   {"type", "omega", "j", "perturbation_size", "seed"});
        const double omega = need_num(ini, "evolve.initial", "omega");
        const int j = ini.value("j", 0);
        const StationaryState state = params.alpha == 0.0 ? kirchhoff_state(params, omega, 0.0)
                                                          : build_state(params, omega, j);
        InitialData d{sample(state, grid), state, std::nullopt};
        if (type == "perturbed_standing_wave") {
            const double eps = need_num(ini, "evolve.initial", "perturbation_size");
            unsigned seed;
            if (seed_override)
                seed = *seed_override;
            else if (ini.contains("seed"))
                seed = ini["seed"].get<unsigned>();
            else
                throw ConfigError("evolve.initial: 'seed' is mandatory for perturbed data");
            GraphFunction pert = random_energy_perturbation(grid, seed);
            pert *= eps;
            d.psi0 += pert;
        }
        return d;
    }
    if (type == "travelling_wave") {
        check_keys(ini, "evolve.initial", {"type", "omega", "a", "v", "theta"});
        const double omega = need_num(ini, "evolve.initial", "omega");
        const double a = ini.value("a", 0.0);
        const double v = need_num(ini, "evolve.initial", "v");
        const double theta = ini.value("theta", 0.0);
        InitialData d{travelling_wave_even_kirchhoff(params, omega, a, v, theta, 0.0, grid),
                      std::nullopt, std::array<double, 4>{omega, a, v, theta}};
        return d;
    }
    throw ConfigError("evolve.initial: unknown type '" + type + "'");
}

void dump_snapshot(const fs::path& outdir, double t, const GraphFunction& f) {
    char name[64];
    std::snprintf(name, sizeof(name), "snap_%.6f.csv", t);
    Csv csv(outdir / name);
    std::vector<std::string> header = {"x"};
    for (int j = 0; j < f.grid.n_edges; ++j) {
        header.push_back("re_psi" + std::to_string(j + 1));
        header.push_back("im_psi" + std::to_string(j + 1));
    }
    csv.row(header);
    for (int i = 0; i < f.grid.n_points; ++i) {
        std::vector<std::string> cells = {s(f.grid.x(i))};
        for (int j = 0; j < f.grid.n_edges; ++j) {
            cells.push_back(s(f(j, i).real()));
            cells.push_back(s(f(j, i).imag()));
        }
        csv.row(cells);
    }
}

void cmd_evolve(const json& cfg, const fs::path& outdir, std::optional<unsigned> seed_override) {
    const StarGrid grid = parse_grid(cfg);
    auto [params, cond] = parse_model(cfg, grid.n_edges);
    if (!cfg.contains("evolve")) throw ConfigError("config: missing 'evolve' block");
    const json& blk = cfg["evolve"];
    check_keys(blk, "evolve",
               {"dt", "t_end", "scheme", "initial", "record_every", "snapshot_stride",
                "blowup_threshold"});
    EvolutionConfig ec;
    ec.dt = need_num(blk, "evolve", "dt");
    ec.t_end = need_num(blk, "evolve", "t_end");
    const std::string scheme = blk.value("scheme", std::string("crank_nicolson"));
    if (scheme == "crank_nicolson")
        ec.scheme = Scheme::CrankNicolsonFixedPoint;
    else if (scheme == "strang")
        ec.scheme = Scheme::StrangSplit;
    else
        throw ConfigError("evolve: unknown scheme '" + scheme + "'");
    ec.record_every = blk.value("record_every", 1);
    ec.blowup_threshold = blk.value("blowup_threshold", 1e6);
    const int user_stride = blk.value("snapshot_stride", 0);

    const InitialData ini = parse_initial(blk, params, grid, seed_override);
    const bool with_reference = ini.orbit_reference || ini.travelling;
    ec.snapshot_stride = with_reference ? 1 : user_stride;

    const Trajectory traj = evolve(ini.psi0, params, cond, ec);

    Csv csv(outdir / "trace.csv");
    std::vector<std::string> header = {"t", "total_mass", "energy"};
    for (int j = 0; j < grid.n_edges; ++j) header.push_back("edge_mass" + std::to_string(j + 1));
    header.push_back("vertex_abs");
    header.push_back("h1_norm");
    if (with_reference) header.push_back("orbit_distance");
    csv.row(header);
    for (size_t k = 0; k < traj.observables.size(); ++k) {
        const Observables& o = traj.observables[k];
        std::vector<std::string> cells = {s(o.t), s(o.total_mass), s(o.energy)};
        for (double em : o.edge_mass) cells.push_back(s(em));
        cells.push_back(s(o.vertex_abs));
        cells.push_back(s(o.h1_norm));
        if (with_reference) {
            const GraphFunction& snap = traj.snapshots[k].second;
            double d;
            if (ini.orbit_reference) {
                d = orbit_distance(snap, *ini.orbit_reference, OrbitNorm::L2);
            } else {
                const auto& [om, a, v, th] = *ini.travelling;
                d = lp_norm(snap - travelling_wave_even_kirchhoff(params, om, a, v, th, o.t, grid),
                            2.0);
            }
            cells.push_back(s(d));
        }
        csv.row(cells);
    }
    if (user_stride > 0) {
        const int every = with_reference ? user_stride : 1;  // snapshots already strided otherwise
        for (size_t k = 0; k < traj.snapshots.size(); ++k)
            if (k % every == 0) dump_snapshot(outdir, traj.snapshots[k].first, traj.snapshots[k].second);
    }
    if (traj.blew_up)
        throw BlowUpSignal("blow-up signal at t = " + std::to_string(traj.blowup_time));
}

// ------------------------------------------------------------------- scatter

void cmd_scatter(const json& cfg, const fs::path& outdir) {
    const StarGrid grid = parse_grid(cfg);
    auto [params, cond] = parse_model(cfg, grid.n_edges);
    if (!cfg.contains("scatter")) throw ConfigError("config: missing 'scatter' block");
    const json& blk = cfg["scatter"];
    check_keys(blk, "scatter", {"v", "x0", "delta_exp", "T_log", "dt", "record_every"});
    ScatteringSetup setup{params,
                          cond,
                          need_num(blk, "scatter", "v"),
                          need_num(blk, "scatter", "x0"),
                          need_num(blk, "scatter", "delta_exp"),
                          blk.value("T_log", 1.0),
                          grid,
                          {}};
    setup.config.dt = blk.value("dt", grid.h() / (2.0 * setup.v));
    setup.config.t_end = setup.t3();
    setup.config.record_every = blk.value("record_every", 50);

    const ScatteringReport rep = run_scattering(setup);

    Csv csv(outdir / "scatter.csv");
    std::vector<std::string> header = {"t"};
    for (int j = 0; j < grid.n_edges; ++j) header.push_back("r" + std::to_string(j + 1));
    header.push_back("dist_pre");
    header.push_back("dist_S");
    header.push_back("dist_out");
    csv.row(header);
    for (size_t k = 0; k < rep.times.size(); ++k) {
        std::vector<std::string> cells = {s(rep.times[k])};
        for (double r : rep.ratios[k]) cells.push_back(s(r));
        cells.push_back(s(rep.dist_pre[k]));
        cells.push_back(s(rep.dist_S[k]));
        cells.push_back(s(rep.dist_out[k]));
        csv.row(cells);
    }
    csv.row({});
    std::vector<std::string> sh = {"v", "t1", "t2", "t3", "R_re", "R_im", "T_re", "T_im"};
    std::vector<std::string> sv = {s(setup.v), s(rep.t1),        s(rep.t2),
                                   s(rep.t3),  s(rep.R.real()),  s(rep.R.imag()),
                                   s(rep.T.real()), s(rep.T.imag())};
    for (int j = 0; j < grid.n_edges; ++j) {
        sh.push_back("r" + std::to_string(j + 1) + "_t3");
        sv.push_back(s(rep.r_final[j]));
    }
    sh.push_back("boundary_contaminated");
    sv.push_back(rep.boundary_contaminated ? "1" : "0");
    csv.row(sh);
    csv.row(sv);
    if (rep.blew_up) throw BlowUpSignal("blow-up signal during scattering run");
}

// -------------------------------------------------------------------- driver

json* locate(json& root, const std::string& dotted) {
    json* cur = &root;
    size_t pos = 0;
    while (true) {
        const size_t dot = dotted.find('.', pos);
        const std::string key = dotted.substr(pos, dot - pos);
        if (!cur->is_object()) return nullptr;
        cur = &(*cur)[key];
        if (dot == std::string::npos) return cur;
        pos = dot + 1;
    }
}

int dispatch(const std::string& cmd, const json& cfg, const fs::path& outdir,
             std::optional<unsigned> seed) {
    try {
        fs::create_directories(outdir);
        if (cmd == "stationary")
            cmd_stationary(cfg, outdir);
        else if (cmd == "stability")
            cmd_stability(cfg, outdir);
        else if (cmd == "evolve")
            cmd_evolve(cfg, outdir, seed);
        else
            cmd_scatter(cfg, outdir);
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const BlowUpSignal& e) {
        std::cerr << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 4;
    }
}

int max_threads() {
    if (const char* env = std::getenv("NLSGRAPH_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

std::string sanitize(std::string s) {
    for (char& c : s)
        if (c == '.' || c == '/' || c == ' ') c = '_';
    return s;
}

}  // namespace

std::string csv_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.16e", x);
    return buf;
}

int run_cli(int argc, char** argv) {
    CLI::App app{"NLS on metric star graphs: standing waves, stability, evolution, scattering"};
    app.require_subcommand(1);
    std::string config_path, out_dir, sweep;
    std::optional<unsigned> seed;
    for (const char* name : {"stationary", "stability", "evolve", "scatter"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON configuration file")->required();
        sub->add_option("--out", out_dir, "output directory")->required();
        sub->add_option("--sweep", sweep, "key=v1,v2,... fan-out over a config key");
        sub->add_option("--seed", seed, "seed override for randomized initial data");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    const std::string cmd = app.get_subcommands().front()->get_name();

    json cfg;
    try {
        std::ifstream in(config_path);
        if (!in) throw ConfigError("cannot open config file " + config_path);
        cfg = json::parse(in);
        if (!cfg.is_object()) throw ConfigError("config root must be a JSON object");
        check_keys(cfg, "config", {"graph", "model", cmd.c_str()});
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    if (sweep.empty()) return dispatch(cmd, cfg, out_dir, seed);

    const size_t eq = sweep.find('=');
    if (eq == std::string::npos) {
        std::cerr << "config error: --sweep expects key=v1,v2,...\n";
        return 2;
    }
    const std::string key = sweep.substr(0, eq);
    std::vector<json> values;
    {
        std::string rest = sweep.substr(eq + 1);
        size_t pos = 0;
        while (pos <= rest.size()) {
            const size_t comma = rest.find(',', pos);
            const std::string tok = rest.substr(pos, comma - pos);
            try {
                values.push_back(json::parse(tok));
            } catch (const json::exception&) {
                values.push_back(tok);
            }
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
    }
    if (values.empty()) {
        std::cerr << "config error: --sweep has no values\n";
        return 2;
    }

    std::vector<int> codes(values.size(), 0);
    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (size_t i = next.fetch_add(1); i < values.size(); i = next.fetch_add(1)) {
            json run_cfg = cfg;
            json* slot = locate(run_cfg, key);
            if (!slot) {
                codes[i] = 2;
                continue;
            }
            *slot = values[i];
            const fs::path sub = fs::path(out_dir) / (sanitize(key) + "=" + values[i].dump());
            codes[i] = dispatch(cmd, run_cfg, sub, seed);
        }
    };
    const int nthreads = std::min<int>(max_threads(), static_cast<int>(values.size()));
    std::vector<std::thread> pool;
    for (int i = 1; i < nthreads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    int rc = 0;
    for (int c : codes) rc = std::max(rc, c);
    return rc;
}

}  // namespace nlsg
