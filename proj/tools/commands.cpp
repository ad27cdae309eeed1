#include "commands.hpp"

#include "spindeco/coupling.hpp"
#include "spindeco/evolution.hpp"
#include "spindeco/external.hpp"
#include "spindeco/io.hpp"
#include "spindeco/kernel.hpp"
#include "spindeco/montecarlo.hpp"
#include "spindeco/parallel.hpp"
#include "spindeco/states.hpp"

#include <CLI11.hpp>
#include <Eigen/Core>
#include <boost/version.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace spindeco::cli {

namespace fs = std::filesystem;
using io::json;

namespace {

constexpr const char* version = "1.0.0";

struct SpecArgs {
    std::string file;
    std::optional<int> two_j;
    std::vector<std::string> delta;  // "l=value"
    std::optional<int> N;

    void attach(CLI::App* app) {
        app->add_option("--spec", file, "coupling spec JSON {two_j, delta_bar, N}");
        app->add_option("--two-j", two_j, "override two_j");
        app->add_option("--delta", delta, "override a channel, l=value (repeatable)");
        app->add_option("--N", N, "override the environment size N");
    }

    coupling::CouplingSpec resolve() const {
        json js = json::object();
        if (!file.empty()) {
            try {
                js = json::parse(io::read_file(file));
            } catch (const json::parse_error& e) {
                throw coupling::SpecError("spec", std::string("invalid JSON: ") + e.what());
            }
            if (!js.is_object()) throw coupling::SpecError("spec", "expected a JSON object");
        }
        if (two_j) js["two_j"] = *two_j;
        if (!delta.empty() && !js.contains("delta_bar")) js["delta_bar"] = json::object();
        for (const auto& d : delta) {
            const auto eq = d.find('=');
            if (eq == std::string::npos) throw coupling::SpecError("delta_bar", "override must read l=value: " + d);
            double v = 0.0;
            try {
                v = std::stod(d.substr(eq + 1));
            } catch (const std::exception&) {
                throw coupling::SpecError("delta_bar." + d.substr(0, eq), "value is not a number");
            }
            js["delta_bar"][d.substr(0, eq)] = v;
        }
        if (N) js["N"] = *N;
        return coupling::spec_from_json(js);
    }
};

struct StateArgs {
    std::string kind = "coherent";
    double theta = 0.0, phi = 0.0;
    std::uint64_t seed = 1;

    void attach(CLI::App* app, double theta0 = 0.0, double phi0 = 0.0) {
        theta = theta0;
        phi = phi0;
        app->add_option("--state", kind, "initial state")
            ->check(CLI::IsMember({"coherent", "cat2", "cat3", "random"}))
            ->capture_default_str();
        app->add_option("--theta", theta, "coherent-state polar angle")->capture_default_str();
        app->add_option("--phi", phi, "coherent-state azimuth")->capture_default_str();
        app->add_option("--state-seed", seed, "seed of the random state")->capture_default_str();
    }

    states::SpinState make(su2::HalfInt j) const {
        if (kind == "cat2") return states::movie_cat2(j);
        if (kind == "cat3") return states::movie_cat3(j);
        if (kind == "random") return states::random_state(j, seed);
        return states::coherent(j, theta, phi);
    }

    json to_json() const {
        json js{{"kind", kind}};
        if (kind == "coherent") js.update({{"theta", theta}, {"phi", phi}});
        if (kind == "random") js["seed"] = seed;
        return js;
    }
};

std::vector<double> linspace(double a, double b, int n) {
    if (n < 1) throw std::invalid_argument("points must be positive");
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
    return v;
}

// Collects output files and renders the run manifest.
class Run {
public:
    Run(std::string command, fs::path out) : command_(std::move(command)), out_(std::move(out)) {}

    json inputs = json::object();
    json result;

    void write(const std::string& rel, const std::string& text) {
        const std::string hash = io::write_file(out_ / rel, text);
        files_.push_back({{"path", rel}, {"hash", hash}});
    }
    void record(const std::string& rel, const std::string& hash) { files_.push_back({{"path", rel}, {"hash", hash}}); }
    const fs::path& out() const { return out_; }

    json manifest() const {
        json m;
        m["tool"] = "spindeco";
        m["version"] = version;
        m["libraries"] = {{"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                        "." + std::to_string(EIGEN_MINOR_VERSION)},
                          {"boost", BOOST_LIB_VERSION}};
        m["command"] = command_;
        m["inputs"] = inputs;
        m["manifest_hash"] = io::fnv1a_hex(json{{"command", command_}, {"inputs", inputs}, {"version", version}}.dump());
        m["outputs"] = files_;
        if (!result.is_null()) m["result"] = result;
        return m;
    }

    void finish() {
        const json m = manifest();
        io::write_file(out_ / (command_ + ".manifest.json"), m.dump(2) + "\n");
        std::cout << m.dump(2) << "\n";
    }

private:
    std::string command_;
    fs::path out_;
    json files_ = json::array();
};

std::string zl_csv(const coupling::CouplingSpec& spec) {
    const auto z = coupling::z_of_l(spec);
    io::CsvTable t({"l", "Z", "Y"});
    for (int l = 0; l <= spec.j.twice; ++l) {
        const double x = spec.j.twice == 0 ? 0.0 : static_cast<double>(l) / spec.j.twice;
        t.add_row({static_cast<double>(l), z[l], coupling::y_scaling(spec, x)});
    }
    return t.str();
}

}  // namespace

int run(int argc, char** argv) {
    CLI::App app{"spindeco: spin decoherence in a random SU(2) x U(N) environment"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", std::string("spindeco ") + version);
    std::string out = "spindeco_out";
    app.add_option("--out", out, "output directory")->capture_default_str();

    // zl
    SpecArgs zl_spec;
    auto* zl = app.add_subcommand("zl", "l, Z(l), Y(l/2j) CSV");
    zl_spec.attach(zl);

    // timescales
    SpecArgs ts_spec;
    auto* ts = app.add_subcommand("timescales", "tau0..tau3, D0, Z_av JSON report");
    ts_spec.attach(ts);

    // kernel
    double k_z = 0.0, k_tmax = 10.0;
    int k_points = 201, k_nz = 41;
    double k_zmin = -1.0, k_zmax = 1.0;
    bool k_surface = false;
    auto* kern = app.add_subcommand("kernel", "M(t, z) CSV");
    kern->add_option("--z", k_z, "z in [-1, 1]")->capture_default_str();
    kern->add_option("--tmax", k_tmax, "largest t (tau0 units)")->capture_default_str();
    kern->add_option("--points", k_points, "number of t samples")->capture_default_str();
    kern->add_flag("--surface", k_surface, "emit the (t, z) grid");
    kern->add_option("--zmin", k_zmin)->capture_default_str();
    kern->add_option("--zmax", k_zmax)->capture_default_str();
    kern->add_option("--nz", k_nz, "number of z samples")->capture_default_str();

    // psi, phi
    double psi_tmax = 10.0, phi_tmax = 20.0;
    int psi_points = 201, phi_points = 201;
    auto* psi = app.add_subcommand("psi", "Psi(t') CSV");
    psi->add_option("--tmax", psi_tmax)->capture_default_str();
    psi->add_option("--points", psi_points)->capture_default_str();
    auto* phi = app.add_subcommand("phi", "Phi(t) CSV");
    phi->add_option("--tmax", phi_tmax)->capture_default_str();
    phi->add_option("--points", phi_points)->capture_default_str();

    // evolve
    SpecArgs ev_spec;
    StateArgs ev_state;
    std::vector<double> ev_times{0.0, 1.0, 2.0};
    int ev_grid = 64;
    double ev_rmax = 4.0;
    std::string ev_field = "wigner";
    bool ev_bold = false;
    auto* ev = app.add_subcommand("evolve", "phase-space frames of an evolving spin state");
    ev_spec.attach(ev);
    ev_state.attach(ev);
    ev->add_option("--times", ev_times, "comma-separated times (tau0 units)")->delimiter(',');
    ev->add_option("--grid", ev_grid, "stereographic grid resolution")->capture_default_str();
    ev->add_option("--rmax", ev_rmax, "stereographic plane half-width")->capture_default_str();
    ev->add_option("--field", ev_field, "field kind")
        ->check(CLI::IsMember({"wigner", "husimi", "p_symbol"}))
        ->capture_default_str();
    ev->add_flag("--bold", ev_bold, "scale by sqrt(4 pi / (2j+1))");

    // diffusion-profile
    double dp_rmax = 4.0;
    int dp_points = 81;
    auto* dp = app.add_subcommand("diffusion-profile", "W_quantum(r) and its variance-matched Gaussian");
    dp->add_option("--rmax", dp_rmax)->capture_default_str();
    dp->add_option("--points", dp_points)->capture_default_str();

    // magnetization
    SpecArgs mg_spec;
    StateArgs mg_state;
    double mg_tmax = 50.0;
    int mg_points = 201;
    auto* mg = app.add_subcommand("magnetization", "S_z(t) / S_z(0) CSV");
    mg_spec.attach(mg);
    mg_state.attach(mg);
    mg->add_option("--tmax", mg_tmax, "largest t (tau0 units)")->capture_default_str();
    mg->add_option("--points", mg_points)->capture_default_str();

    // external
    double ex_E = 0.0, ex_zav = 0.5, ex_zl = 0.5, ex_tmax = 10.0;
    int ex_points = 201;
    auto* ex = app.add_subcommand("external", "M(t, E, Z(l), Z_av) CSV for an initial energy eigenstate");
    ex->add_option("--E", ex_E, "energy (tau0 units)")->capture_default_str();
    ex->add_option("--zav", ex_zav, "Z_av")->capture_default_str();
    ex->add_option("--zl", ex_zl, "Z(l)")->capture_default_str();
    ex->add_option("--tmax", ex_tmax, "largest t (tau0 units)")->capture_default_str();
    ex->add_option("--points", ex_points)->capture_default_str();

    // diffusion
    SpecArgs df_spec;
    double df_E = 0.0;
    auto* df = app.add_subcommand("diffusion", "fast-bath diffusion constant D(E) JSON");
    df_spec.attach(df);
    df->add_option("--E", df_E, "energy (absolute units)")->capture_default_str();

    // mc-validate
    SpecArgs mc_spec;
    StateArgs mc_state;
    int mc_N = 0, mc_samples = 20, mc_bootstrap = 1000, mc_env_index = -1;
    std::uint64_t mc_seed = 1;
    std::vector<double> mc_times{0.5, 1.0, 2.0};
    double mc_floor = 0.02;
    auto* mc = app.add_subcommand("mc-validate", "finite-N Monte Carlo check of the planar kernel");
    mc_spec.attach(mc);
    mc_state.attach(mc, 1.0, 0.5);
    mc->add_option("--samples", mc_samples)->capture_default_str();
    mc->add_option("--seed", mc_seed)->capture_default_str();
    mc->add_option("--times", mc_times, "comma-separated times (tau0 units)")->delimiter(',');
    mc->add_option("--bootstrap", mc_bootstrap)->capture_default_str();
    mc->add_option("--floor", mc_floor, "absolute tolerance floor")->capture_default_str();
    mc->add_option("--env-index", mc_env_index, "start the environment in this H_(0) eigenstate");
    // --N is shared with the spec override
    (void)mc_N;

    // figures
    std::string fig_id;
    auto* fig = app.add_subcommand("figures", "regenerate figure datasets");
    fig->add_option("--id", fig_id, "figure id")->required()->check(CLI::IsMember({"appendix-A"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    try {
        if (zl->parsed()) {
            const auto spec = zl_spec.resolve();
            Run r("zl", out);
            r.inputs = {{"spec", coupling::to_json(spec)}};
            r.write("zl.csv", zl_csv(spec));
            r.finish();
        } else if (ts->parsed()) {
            const auto spec = ts_spec.resolve();
            Run r("timescales", out);
            r.inputs = {{"spec", coupling::to_json(spec)}};
            r.result = coupling::timescale_report(coupling::derive(spec));
            r.write("timescales.json", r.result.dump(2) + "\n");
            r.finish();
        } else if (kern->parsed()) {
            Run r("kernel", out);
            const auto ts_ = linspace(0.0, k_tmax, k_points);
            if (k_surface) {
                r.inputs = {{"surface", true}, {"tmax", k_tmax}, {"points", k_points},
                            {"zmin", k_zmin}, {"zmax", k_zmax}, {"nz", k_nz}};
                const auto zs = linspace(k_zmin, k_zmax, k_nz);
                std::vector<double> vals(zs.size() * ts_.size());
                parallel_for(vals.size(), [&](std::size_t i) {
                    vals[i] = kernel::m_auto(ts_[i % ts_.size()], zs[i / ts_.size()]).value;
                });
                io::CsvTable t({"t", "z", "M"});
                for (std::size_t i = 0; i < vals.size(); ++i) t.add_row({ts_[i % ts_.size()], zs[i / ts_.size()], vals[i]});
                r.write("kernel_surface.csv", t.str());
            } else {
                r.inputs = {{"z", k_z}, {"tmax", k_tmax}, {"points", k_points}};
                std::vector<double> vals(ts_.size());
                parallel_for(ts_.size(), [&](std::size_t i) { vals[i] = kernel::m_auto(ts_[i], k_z).value; });
                io::CsvTable t({"t", "M"});
                for (std::size_t i = 0; i < ts_.size(); ++i) t.add_row({ts_[i], vals[i]});
                r.write("kernel.csv", t.str());
            }
            r.finish();
        } else if (psi->parsed() || phi->parsed()) {
            const bool is_psi = psi->parsed();
            Run r(is_psi ? "psi" : "phi", out);
            const double tmax = is_psi ? psi_tmax : phi_tmax;
            const int points = is_psi ? psi_points : phi_points;
            r.inputs = {{"tmax", tmax}, {"points", points}};
            const auto ts_ = linspace(0.0, tmax, points);
            std::vector<double> vals(ts_.size());
            parallel_for(ts_.size(), [&](std::size_t i) { vals[i] = is_psi ? kernel::psi(ts_[i]) : kernel::phi(ts_[i]); });
            io::CsvTable t({is_psi ? "tp" : "t", is_psi ? "Psi" : "Phi"});
            for (std::size_t i = 0; i < ts_.size(); ++i) t.add_row({ts_[i], vals[i]});
            r.write(is_psi ? "psi.csv" : "phi.csv", t.str());
            r.finish();
        } else if (ev->parsed()) {
            const auto spec = ev_spec.resolve();
            const auto state = ev_state.make(spec.j);
            Run r("evolve", out);
            r.inputs = {{"spec", coupling::to_json(spec)}, {"state", ev_state.to_json()}, {"times", ev_times},
                        {"grid", ev_grid}, {"rmax", ev_rmax}, {"field", ev_field}, {"bold", ev_bold}};
            evolution::FrameOptions fo;
            fo.kind = wigner::field_kind_from_string(ev_field);
            fo.bold = ev_bold;
            const auto grid = wigner::stereographic_grid(ev_grid, ev_rmax);
            const auto fields = evolution::frames(state, coupling::derive(spec), ev_times, grid, fo);
            const json fm = evolution::write_frames(r.out(), fields, state, spec);
            for (const auto& f : fm["frames"]) r.record(f["csv"].get<std::string>(), f["csv_hash"].get<std::string>());
            r.record("manifest.json", io::fnv1a_hex(io::read_file(r.out() / "manifest.json")));
            r.finish();
        } else if (dp->parsed()) {
            Run r("diffusion-profile", out);
            r.inputs = {{"rmax", dp_rmax}, {"points", dp_points}};
            const auto rs = linspace(0.0, dp_rmax, dp_points);
            const double var = evolution::quantum_profile_variance();
            std::vector<double> q(rs.size());
            parallel_for(rs.size(), [&](std::size_t i) { q[i] = evolution::diffusion_profile_quantum(rs[i]); });
            io::CsvTable t({"r", "W_quantum", "W_gaussian"});
            for (std::size_t i = 0; i < rs.size(); ++i)
                t.add_row({rs[i], q[i], evolution::diffusion_profile_classical(rs[i], var)});
            r.write("diffusion_profile.csv", t.str());
            r.result = {{"variance", var}, {"kurtosis", evolution::quantum_profile_kurtosis()}};
            r.finish();
        } else if (mg->parsed()) {
            const auto spec = mg_spec.resolve();
            const auto state = mg_state.make(spec.j);
            const auto d = coupling::derive(spec);
            Run r("magnetization", out);
            r.inputs = {{"spec", coupling::to_json(spec)}, {"state", mg_state.to_json()}, {"tmax", mg_tmax},
                        {"points", mg_points}};
            const double s0 = evolution::sz0(state);
            const auto ts_ = linspace(0.0, mg_tmax, mg_points);
            std::vector<double> vals(ts_.size());
            parallel_for(ts_.size(), [&](std::size_t i) { vals[i] = evolution::magnetization(state, d, ts_[i]); });
            io::CsvTable t({"t", "Sz", "ratio"});
            for (std::size_t i = 0; i < ts_.size(); ++i) t.add_row({ts_[i], vals[i], s0 == 0.0 ? 0.0 : vals[i] / s0});
            r.write("magnetization.csv", t.str());
            r.finish();
        } else if (ex->parsed()) {
            Run r("external", out);
            r.inputs = {{"E", ex_E}, {"zav", ex_zav}, {"zl", ex_zl}, {"tmax", ex_tmax}, {"points", ex_points}};
            const auto ts_ = linspace(0.0, ex_tmax, ex_points);
            std::vector<double> vals(ts_.size());
            parallel_for(ts_.size(), [&](std::size_t i) { vals[i] = external::m_external(ts_[i], ex_E, ex_zl, ex_zav).value; });
            io::CsvTable t({"t", "M"});
            for (std::size_t i = 0; i < ts_.size(); ++i) t.add_row({ts_[i], vals[i]});
            r.write("external.csv", t.str());
            r.finish();
        } else if (df->parsed()) {
            const auto spec = df_spec.resolve();
            const auto bath = external::semicircle_bath(spec);
            Run r("diffusion", out);
            r.inputs = {{"spec", coupling::to_json(spec)}, {"E", df_E}};
            const auto& tau = bath.coupling.tau;
            r.result = {{"D", external::diffusion_coefficient(bath, df_E)},
                        {"E0", bath.e0()},
                        {"golden_rule", external::golden_rule_diffusion(bath, df_E, external::commutator_norm2(spec))},
                        {"tau0", tau.tau0},
                        {"tau1", std::isfinite(tau.tau1) ? json(tau.tau1) : json("inf")},
                        {"tau2", std::isfinite(tau.tau2) ? json(tau.tau2) : json("inf")}};
            r.write("diffusion.json", r.result.dump(2) + "\n");
            r.finish();
        } else if (mc->parsed()) {
            const auto spec = mc_spec.resolve();
            if (!spec.N) throw coupling::SpecError("N", "mc-validate needs N (spec field or --N)");
            const auto state = mc_state.make(spec.j);
            montecarlo::EnsembleOptions opt;
            opt.N = *spec.N;
            opt.samples = mc_samples;
            opt.seed = mc_seed;
            if (mc_env_index >= 0) opt.env = montecarlo::EnvInit::eigenstate(mc_env_index);
            Run r("mc-validate", out);
            r.inputs = {{"spec", coupling::to_json(spec)}, {"state", mc_state.to_json()}, {"samples", mc_samples},
                        {"seed", mc_seed}, {"times", mc_times}, {"bootstrap", mc_bootstrap}, {"floor", mc_floor},
                        {"env", mc_env_index >= 0 ? json(mc_env_index) : json("maximally_mixed")}};
            const auto rho0 = state.density();
            const auto run_ = montecarlo::run_ensemble(rho0, spec, mc_times, opt);
            const auto pts = montecarlo::empirical_kernel(run_, rho0, mc_bootstrap, mc_seed);
            const json report = montecarlo::validation_report(pts, mc_floor);
            bool all = true;
            for (const auto& p : report) all = all && p["pass"].get<bool>();
            r.write("mc_validate.json", report.dump(2) + "\n");
            r.result = {{"points", report.size()}, {"all_pass", all}};
            r.finish();
        } else if (fig->parsed()) {
            Run r("figures", out);
            r.inputs = {{"id", fig_id}};
            json index = json::array();
            for (const auto& fam : coupling::appendix_families()) {
                json panels = json::array();
                for (const auto& [name, spec] : fam.panels) {
                    const std::string rel = fig_id + "/" + fam.name + "/" + name + ".csv";
                    r.write(rel, zl_csv(spec));
                    panels.push_back({{"name", name}, {"csv", rel}, {"spec", coupling::to_json(spec)}});
                }
                index.push_back({{"family", fam.name}, {"description", fam.description}, {"panels", panels}});
            }
            r.write(fig_id + "/index.json", index.dump(2) + "\n");
            r.result = {{"families", index.size()}};
            r.finish();
        }
    } catch (const coupling::SpecError& e) {
        std::cerr << "invalid spec: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace spindeco::cli
