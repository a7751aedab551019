// vortexlab: simulate point vortices, classify ring relative equilibria,
// sweep parameter planes and run the verification suites.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 a verification
// suite failed, 3 the integration stopped on a vortex collision.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vortexlab/config_io.hpp"
#include "vortexlab/vortexlab.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace vortexlab;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_verify_failed = 2;
constexpr int exit_collision = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Everything written to a file goes through here, after the computation has
// finished, so parallel work never races on output.
std::ofstream open_output(const std::string& path) {
    const fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p);
    if (!out) throw UsageError("cannot write '" + path + "'");
    return out;
}

struct BuilderFlags {
    std::string config;
    std::string family;
    int n = 0;
    std::optional<double> radius, theta0, theta1, lambda, omega, kappa, epsilon;
    std::optional<int> pole_count;
    std::string model;
    bool degrees = false;

    void attach(CLI::App* cmd) {
        auto* cfg = cmd->add_option("--config", config, "JSON configuration file")->check(CLI::ExistingFile);
        auto* fam = cmd->add_option("--family", family, "ring builder: CNR CNRp CNvR CNvRp DNh2R DNdRRp D2NhRe");
        cfg->excludes(fam);
        cmd->add_option("--n", n, "vortices per ring");
        cmd->add_option("--R", radius, "planar ring radius");
        cmd->add_option("--theta0", theta0, "ring colatitude");
        cmd->add_option("--theta1", theta1, "second ring colatitude (DNdRRp)");
        cmd->add_option("--lambda", lambda, "central or polar strength");
        cmd->add_option("--kp", pole_count, "number of polar vortices");
        cmd->add_option("--omega", omega, "rotation rate");
        cmd->add_option("--kappa", kappa, "geostrophic screening parameter");
        cmd->add_option("--epsilon", epsilon, "ring phase");
        cmd->add_option("--model", model, "planar, plane-rotating, geostrophic, sphere, sphere-rotating");
        cmd->add_flag("--deg", degrees, "angles on the command line are in degrees");
    }

    VortexSystem system() const {
        if (!config.empty()) {
            if (!family.empty()) throw UsageError("--config and --family are mutually exclusive");
            return load_system(config);
        }
        if (family.empty()) throw UsageError("give either --config or --family");
        json j{{"family", family}, {"n", n}};
        if (degrees) j["unit"] = "deg";
        if (radius) j["R"] = *radius;
        if (theta0) j["theta0"] = *theta0;
        if (theta1) j["theta1"] = *theta1;
        if (lambda) j["lambda"] = *lambda;
        if (pole_count) j["k_p"] = *pole_count;
        if (omega) j["omega"] = *omega;
        if (kappa) j["kappa"] = *kappa;
        if (epsilon) j["epsilon"] = *epsilon;
        if (!model.empty()) j["model"] = model;
        return system_from_json(j);
    }
};

json table_json(const SuiteResult& r) {
    json rows = json::array();
    for (const auto& row : r.rows) {
        json o;
        for (std::size_t c = 0; c < r.columns.size(); ++c) o[r.columns[c]] = row[c];
        rows.push_back(o);
    }
    return rows;
}

void write_table_csv(std::ostream& os, const SuiteResult& r) {
    for (std::size_t c = 0; c < r.columns.size(); ++c) os << (c ? "," : "") << r.columns[c];
    os << '\n';
    for (const auto& row : r.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << row[c];
        os << '\n';
    }
}

// ------------------------------------------------------------------ simulate

struct SimulateOptions {
    BuilderFlags source;
    double t_end = 10.0;
    double dt = 0.1;
    std::string method = "rk45";
    double tolerance = 1e-12;
    std::string frame = "inertial";
    std::string output;
    std::string final_state;
};

int run_simulate(const SimulateOptions& o, bool as_json) {
    const VortexSystem sys = o.source.system();
    IntegrateOptions io;
    io.tolerance = o.tolerance;
    const Frame frame = o.frame == "rotating" ? Frame::Rotating : Frame::Inertial;
    Trajectory traj;
    try {
        traj = integrate(sys, o.t_end, o.dt, parse_method(o.method), io);
    } catch (const CollisionError& e) {
        json rec{{"error", "collision"}, {"i", e.first()}, {"j", e.second()}, {"time", e.time()}, {"distance", e.distance()}};
        std::cout << rec.dump(2) << '\n';
        return exit_collision;
    }
    if (o.output.empty()) {
        if (!as_json) write_trajectory_csv(std::cout, traj, frame);
    } else {
        auto out = open_output(o.output);
        write_trajectory_csv(out, traj, frame);
    }
    if (!o.final_state.empty()) {
        auto out = open_output(o.final_state);
        out << std::setprecision(17) << system_to_json(traj.states.back()).dump(2) << '\n';
    }
    const auto& d0 = traj.diagnostics.front();
    const auto& d1 = traj.diagnostics.back();
    const double raw = raw_energy_factor(sys.model());
    if (as_json) {
        json s{{"model", sys.model().label()},
               {"vortices", sys.size()},
               {"samples", traj.size()},
               {"t_end", traj.times.back()},
               {"H", d1.h},
               {"H_raw", d1.h * raw},
               {"J", d1.j_so2},
               {"H_drift", std::abs(d1.h - d0.h)},
               {"J_drift", std::abs(d1.j_so2 - d0.j_so2)}};
        if (!o.output.empty()) s["output"] = o.output;
        std::cout << s.dump(2) << '\n';
    } else if (!o.output.empty()) {
        std::cerr << "wrote " << traj.size() << " samples to " << o.output << "; H = " << d1.h << " (raw " << d1.h * raw
                  << "), H drift " << std::abs(d1.h - d0.h) << '\n';
    }
    return exit_ok;
}

// ----------------------------------------------------------------- stability

struct StabilityOptions {
    std::string family;
    std::string config;
    int n = 3;
    double kappa = 0.0, lambda = 1.0, omega = 0.0, radius = 1.0;
    std::optional<double> theta0;
    bool degrees = false;
    bool closed_form = false;
};

int run_stability(const StabilityOptions& o, bool as_json) {
    StabilityVerdict v;
    std::optional<StabilityVerdict> reference;
    json params;
    if (!o.config.empty()) {
        if (!o.family.empty()) throw UsageError("--config and --family are mutually exclusive");
        std::ifstream in(o.config);
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw ConfigError(std::string("config is not valid JSON: ") + e.what());
        }
        if (!j.contains("family")) throw ConfigError("stability needs a ring builder config (\"family\")");
        v = analyze(ring_config_from_json(j));
        params = j;
    } else {
        if (o.family.empty()) throw UsageError("give either --family or --config");
        const auto fam = parse_stability_family(o.family);
        FamilyPoint p;
        p.n = o.n;
        p.kappa = o.kappa;
        p.lambda = o.lambda;
        p.omega = o.omega;
        p.radius = o.radius;
        if (o.theta0) p.theta0 = *o.theta0 * (o.degrees ? pi / 180.0 : 1.0);
        v = evaluate(fam, p);
        params = {{"family", o.family}, {"n", p.n}};
        if (fam == StabilityFamily::GeostrophicRing || fam == StabilityFamily::GeostrophicRingCenter) params["kappa"] = p.kappa;
        if (family_has_lambda(fam)) params["lambda"] = p.lambda;
        if (fam == StabilityFamily::SphereRing || fam == StabilityFamily::SphereRingPole) {
            params["theta0"] = p.theta0;
            if (p.omega != 0.0) params["omega"] = p.omega;
        }
        if (o.closed_form && p.omega == 0.0) {
            switch (fam) {
                case StabilityFamily::PlanarRing: reference = closed_form_planar(p.n); break;
                case StabilityFamily::PlanarRingCenter: reference = closed_form_planar(p.n, p.lambda); break;
                case StabilityFamily::SphereRing: reference = closed_form_sphere_ring(p.n, p.theta0); break;
                case StabilityFamily::SphereRingPole:
                    reference = closed_form_sphere_ring_polar(p.n, p.theta0, p.lambda);
                    break;
                default: break;
            }
        }
    }
    if (as_json) {
        json out = verdict_to_json(v);
        out["parameters"] = params;
        if (reference) out["closed_form"] = std::string(1, reference->code());
        std::cout << out.dump(2) << '\n';
    } else {
        std::cout << "verdict: " << v.code() << " (" << verdict_name(v.kind) << ")\n";
        std::cout << "xi: " << v.xi << '\n';
        std::cout << "slice hessian eigenvalues:";
        for (double e : v.hessian_eigs) std::cout << ' ' << e;
        std::cout << '\n';
        if (reference) std::cout << "closed form: " << reference->code() << '\n';
        for (const auto& n : v.notes) std::cout << "note: " << n << '\n';
    }
    return exit_ok;
}

// --------------------------------------------------------------------- sweep

struct SweepOptions {
    std::string family;
    int n = 3;
    std::string kappa = "0:5:0.05";
    std::string lambda = "-2:2:0.1";
    std::string output;
    std::string frontier;
    double lo = 0.0, hi = 1.0, tol = 1e-6;
    double fixed_kappa = 0.0, fixed_lambda = 1.0, fixed_theta0 = pi / 4;
    unsigned threads = 0;
};

int run_sweep(const SweepOptions& o, bool as_json) {
    const auto fam = parse_stability_family(o.family);
    const unsigned threads = o.threads ? o.threads : default_threads();
    if (!o.frontier.empty()) {
        FamilyPoint p;
        p.n = o.n;
        p.kappa = o.fixed_kappa;
        p.lambda = o.fixed_lambda;
        p.theta0 = o.fixed_theta0;
        ScanParameter sp;
        if (o.frontier == "kappa")
            sp = ScanParameter::Kappa;
        else if (o.frontier == "lambda")
            sp = ScanParameter::Lambda;
        else if (o.frontier == "theta0")
            sp = ScanParameter::Theta0;
        else
            throw UsageError("--frontier must be kappa, lambda or theta0");
        const auto f = find_frontier(fam, p, sp, o.lo, o.hi, o.tol);
        json out{{"family", o.family},       {"n", o.n},           {"parameter", f.parameter},
                 {"threshold", f.threshold}, {"bracket", {f.lo, f.hi}}, {"verdict_lo", std::string(1, f.verdict_lo)},
                 {"verdict_hi", std::string(1, f.verdict_hi)}, {"iterations", f.iterations}};
        if (sp == ScanParameter::Theta0) out["cos2_threshold"] = std::pow(std::cos(f.threshold), 2);
        if (as_json)
            std::cout << out.dump(2) << '\n';
        else
            std::cout << f.parameter << "* = " << std::setprecision(10) << f.threshold << " (" << f.verdict_lo << " -> "
                      << f.verdict_hi << ")\n";
        return exit_ok;
    }
    const auto kr = Range::parse(o.kappa);
    const auto lr = Range::parse(o.lambda);
    const auto start = std::chrono::steady_clock::now();
    const auto cells = sweep_plane(fam, o.n, kr, lr, threads);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    std::size_t counts[4] = {0, 0, 0, 0};
    for (const auto& c : cells) counts[std::string("SEUD").find(c.verdict)]++;
    json meta{{"tool", "vortexlab"},
              {"version", vortexlab::version},
              {"family", o.family},
              {"n", o.n},
              {"kappa", {{"lo", kr.lo}, {"hi", kr.hi}, {"step", kr.step}}},
              {"cells", cells.size()},
              {"threads", threads},
              {"seconds", seconds},
              {"counts", {{"S", counts[0]}, {"E", counts[1]}, {"U", counts[2]}, {"D", counts[3]}}}};
    if (family_has_lambda(fam)) meta["lambda"] = {{"lo", lr.lo}, {"hi", lr.hi}, {"step", lr.step}};
    if (o.output.empty()) {
        if (!as_json) write_diagram_csv(std::cout, cells);
    } else {
        auto out = open_output(o.output);
        write_diagram_csv(out, cells);
        auto m = open_output(o.output + ".meta.json");
        m << meta.dump(2) << '\n';
    }
    if (as_json) std::cout << meta.dump(2) << '\n';
    return exit_ok;
}

// -------------------------------------------------------------------- verify

struct VerifyOptions {
    std::string suite;
    std::uint64_t seed = 1;
    std::vector<double> omegas;
    int samples = 100;
    std::string output;
};

int run_verify(const VerifyOptions& o, bool as_json) {
    SuiteResult r;
    if (o.suite == "specfun")
        r = verify_specfun();
    else if (o.suite == "appendix-a")
        r = verify_appendix_a(o.seed, o.samples);
    else if (o.suite == "persistence")
        r = verify_persistence_suite(o.omegas.empty() ? std::vector<double>{0.1, 0.3} : o.omegas);
    else if (o.suite == "trig")
        r = verify_trig();
    else if (o.suite == "conservation")
        r = verify_conservation(o.seed);
    else
        throw UsageError("unknown suite '" + o.suite + "'");

    if (!o.output.empty()) {
        auto out = open_output(o.output);
        write_table_csv(out, r);
    }
    if (as_json) {
        json s{{"suite", r.name}, {"passed", r.passed}, {"worst", r.worst}, {"tolerance", r.tolerance},
               {"summary", r.summary}, {"seed", o.seed}};
        if (r.rows.size() <= 20) s["rows"] = table_json(r);
        std::cout << s.dump(2) << '\n';
    } else {
        // The specfun suite prints its table; the others print a summary line.
        if (o.suite == "specfun" && o.output.empty()) write_table_csv(std::cout, r);
        std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.summary << " (tolerance " << r.tolerance
                  << ")\n";
    }
    return r.passed ? exit_ok : exit_verify_failed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"point-vortex dynamics and ring stability"};
    app.require_subcommand(1);
    app.fallthrough();  // --format and --seed may follow the subcommand
    app.set_version_flag("--version", std::string(vortexlab::version));
    std::string format = "csv";
    app.add_option("--format", format, "output format for the summary")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    std::uint64_t seed = 1;
    app.add_option("--seed", seed, "seed for randomized suites");

    SimulateOptions sim;
    auto* simulate = app.add_subcommand("simulate", "integrate a vortex system");
    sim.source.attach(simulate);
    simulate->add_option("--t-end", sim.t_end, "final time")->capture_default_str();
    simulate->add_option("--dt", sim.dt, "sampling interval")->capture_default_str();
    simulate->add_option("--method", sim.method, "rk45 or rk4")->check(CLI::IsMember({"rk4", "rk45"}));
    simulate->add_option("--tol", sim.tolerance, "rk45 error tolerance per unit time");
    simulate->add_option("--frame", sim.frame, "coordinates of the CSV output")
        ->check(CLI::IsMember({"inertial", "rotating"}));
    simulate->add_option("--output,--out,-o", sim.output, "trajectory CSV (stdout if omitted)");
    simulate->add_option("--final-state", sim.final_state, "write the final state as a reloadable JSON config");

    StabilityOptions st;
    auto* stability = app.add_subcommand("stability", "classify a ring relative equilibrium");
    auto* st_fam = stability->add_option("--family", st.family,
                                         "planar-ring, planar-ring-center, geostrophic-ring, geostrophic-ring-center, "
                                         "sphere-ring, sphere-ring-pole");
    auto* st_cfg = stability->add_option("--config", st.config, "builder config file")->check(CLI::ExistingFile);
    st_cfg->excludes(st_fam);
    stability->add_option("--n", st.n, "vortices in the ring");
    stability->add_option("--kappa", st.kappa, "screening parameter (geostrophic families)");
    stability->add_option("--lambda", st.lambda, "central or polar strength");
    stability->add_option("--omega", st.omega, "frame rotation rate");
    stability->add_option("--R", st.radius, "planar ring radius");
    stability->add_option("--theta0", st.theta0, "ring colatitude (sphere families)");
    stability->add_flag("--deg", st.degrees, "theta0 in degrees");
    stability->add_flag("--closed-form", st.closed_form, "also report the closed-form verdict where one exists");

    SweepOptions sw;
    auto* sweep = app.add_subcommand("sweep", "stability diagram over a parameter grid, or a frontier search");
    sweep->add_option("--family", sw.family, "planar-ring-center, geostrophic-ring or geostrophic-ring-center; any family for --frontier")->required();
    sweep->add_option("--n", sw.n, "vortices in the ring")->required();
    sweep->add_option("--kappa", sw.kappa, "kappa range lo:hi:step")->capture_default_str();
    sweep->add_option("--lambda", sw.lambda, "lambda range lo:hi:step")->capture_default_str();
    sweep->add_option("--output,--out,-o", sw.output, "diagram CSV; a .meta.json is written next to it");
    sweep->add_option("--threads", sw.threads, "worker threads (default: hardware, capped by VORTEXLAB_THREADS)");
    sweep->add_option("--frontier", sw.frontier, "bisect in kappa, lambda or theta0 instead of sweeping");
    sweep->add_option("--lo", sw.lo, "lower end of the frontier bracket");
    sweep->add_option("--hi", sw.hi, "upper end of the frontier bracket");
    sweep->add_option("--tol", sw.tol, "bracket width at which bisection stops")->capture_default_str();
    sweep->add_option("--at-kappa", sw.fixed_kappa, "fixed kappa for a frontier search");
    sweep->add_option("--at-lambda", sw.fixed_lambda, "fixed lambda for a frontier search");
    sweep->add_option("--at-theta0", sw.fixed_theta0, "fixed theta0 for a frontier search");

    VerifyOptions ve;
    auto* verify = app.add_subcommand("verify", "run a verification suite");
    verify->add_option("--suite", ve.suite)
        ->required()
        ->check(CLI::IsMember({"specfun", "appendix-a", "persistence", "trig", "conservation"}));
    verify->add_option("--omega", ve.omegas, "rotation rates for the persistence suite");
    verify->add_option("--samples", ve.samples, "sample count for the appendix-a suite")->capture_default_str();
    verify->add_option("--output,--out,-o", ve.output, "full result table as CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }
    const bool as_json = format == "json";
    ve.seed = seed;

    try {
        if (*simulate) return run_simulate(sim, as_json);
        if (*stability) return run_stability(st, as_json);
        if (*sweep) return run_sweep(sw, as_json);
        if (*verify) return run_verify(ve, as_json);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const NoFrontierError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    }
    return exit_usage;
}
