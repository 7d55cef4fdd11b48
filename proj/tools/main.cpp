// dyad — two-qubit dynamics and identification toolkit.
//
// Subcommands:
//   simulate     map-coefficient and mean-value trajectories to CSV
//   reconstruct  candidate Hamiltonians (and environment) from u-data
//   verify       parity, sign-flip and spectrum-gap check suites
//   classical    classical-analog normalization + round-trip report
//
// Exit codes: 0 all checks pass, 1 usage/schema error, 2 assertion or
// reconstruction failure.

#include "dyad/classical.hpp"
#include "dyad/dynamics.hpp"
#include "dyad/errors.hpp"
#include "dyad/json_io.hpp"
#include "dyad/parity.hpp"
#include "dyad/reconstruction.hpp"
#include "dyad/sampling.hpp"
#include "dyad/state_recovery.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace {

using dyad::io::json;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitFailure = 2;

struct GlobalOptions {
    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 1;
    std::optional<int> order;
    std::optional<double> tolerance;
    std::optional<std::string> mode;
};

json load_config(const GlobalOptions& opts) {
    if (opts.config_path.empty()) {
        return json::object();
    }
    return dyad::io::load_json_file(opts.config_path);
}

fs::path out_path(const GlobalOptions& opts, const std::string& name) {
    fs::create_directories(opts.out_dir);
    return fs::path(opts.out_dir) / name;
}

dyad::GeneralHamiltonian hamiltonian_from_config(const json& config) {
    if (config.contains("hamiltonian")) {
        return dyad::io::general_from_json(config["hamiltonian"]);
    }
    if (config.contains("hamiltonian_path")) {
        return dyad::io::general_from_json(
            dyad::io::load_json_file(config["hamiltonian_path"].get<std::string>()));
    }
    throw std::invalid_argument(
        "config needs \"hamiltonian\" or \"hamiltonian_path\"");
}

int run_simulate(const GlobalOptions& opts) {
    const json config = load_config(opts);
    const dyad::GeneralHamiltonian h = hamiltonian_from_config(config);
    const double t_max = config.value("t_max", 2.0);
    const int n_points = config.value("n_points", 100);
    if (t_max <= 0.0 || n_points < 2) {
        throw std::invalid_argument("need t_max > 0 and n_points >= 2");
    }

    std::vector<double> times;
    std::vector<dyad::MapSnapshot> snapshots;
    times.reserve(static_cast<std::size_t>(n_points));
    for (int i = 0; i < n_points; ++i) {
        const double t = t_max * i / (n_points - 1);
        times.push_back(t);
        snapshots.push_back(dyad::map_snapshot(h, t));
    }
    dyad::io::atomic_write_text(out_path(opts, "maps.csv"),
                                dyad::io::trajectory_csv(snapshots));
    std::cout << "wrote " << (fs::path(opts.out_dir) / "maps.csv").string()
              << " (" << n_points << " rows)\n";

    if (config.contains("state")) {
        const dyad::TwoQubitState s = dyad::io::state_from_json(config["state"]);
        const bool allow_invalid = config.value("allow_invalid_state", false);
        const auto means = dyad::mean_trajectory(h, s, times, allow_invalid);
        dyad::io::atomic_write_text(out_path(opts, "means.csv"),
                                    dyad::io::means_csv(times, means));
        std::cout << "wrote " << (fs::path(opts.out_dir) / "means.csv").string()
                  << "\n";
    }
    return kExitOk;
}

int run_reconstruct(const GlobalOptions& opts) {
    const json config = load_config(opts);
    const std::string mode = opts.mode.value_or(config.value("mode", "exact"));
    const int order = opts.order.value_or(config.value("order", 6));
    std::optional<double> tolerance = opts.tolerance;
    if (!tolerance && config.contains("tolerance")) {
        tolerance = config["tolerance"].get<double>();
    }

    dyad::TaylorTable table;
    std::optional<dyad::GeneralHamiltonian> source;
    dyad::ReconstructOptions rec_options;
    rec_options.eps = tolerance;
    if (mode == "exact") {
        source = hamiltonian_from_config(config);
        table = dyad::taylor_maps(*source, order);
    } else if (mode == "fit") {
        if (!config.contains("trajectory_path")) {
            throw std::invalid_argument("fit mode needs \"trajectory_path\"");
        }
        const auto snapshots = dyad::io::parse_trajectory_csv(
            dyad::io::load_text_file(config["trajectory_path"].get<std::string>()));
        double window = config.value("window", 0.0);
        if (window <= 0.0) {
            for (const auto& snap : snapshots) {
                window = std::max(window, snap.t);
            }
        }
        const dyad::FitResult fit = dyad::fit_taylor(snapshots, order, window);

        // Keep only the orders whose propagated error bar is small against
        // the coefficient scale; high derivatives past that point are noise.
        int trusted = 0;
        double worst_rel = 0.0;
        for (int m = 0; m <= fit.table.order(); ++m) {
            const auto idx = static_cast<std::size_t>(m);
            const double scale = std::max(
                1.0, dyad::flatten_maps(fit.table.coeff[idx]).cwiseAbs().maxCoeff());
            const double rel = fit.coeff_uncertainty[idx] / scale;
            if (rel > 1e-6) {
                break;
            }
            trusted = m;
            worst_rel = std::max(worst_rel, rel);
        }
        if (trusted < 2) {
            throw dyad::InsufficientOrderError(
                "fit mode: sampled data only supports order < 2; use a wider "
                "window or denser samples");
        }
        table.coeff.assign(fit.table.coeff.begin(),
                           fit.table.coeff.begin() + trusted + 1);
        rec_options.data_tolerance = std::max(1e-6, 10.0 * worst_rel);
        std::cout << "fit condition " << fit.condition << ", max residual "
                  << fit.max_residual << ", trusted order " << trusted << "\n";
    } else {
        throw std::invalid_argument("mode must be \"exact\" or \"fit\"");
    }

    const dyad::ReconstructionReport report = dyad::reconstruct(table, rec_options);
    json out = dyad::io::to_json(report);
    out["mode"] = mode;
    out["order"] = order;

    // With a known state (exact mode) the environment estimate of each
    // candidate is part of the report.
    if (source && config.contains("state")) {
        const dyad::TwoQubitState s = dyad::io::state_from_json(config["state"]);
        const int env_order = std::min(order, 4);
        const dyad::MeanResidualSeries aggregates = dyad::rotate_sigma_frame(
            dyad::observed_residual_series(*source, s, env_order),
            report.frame_rotation);
        out["environment"] = {
            {"plus", dyad::io::to_json(dyad::recover_environment(
                         report.candidate_plus, aggregates))},
            {"minus", dyad::io::to_json(dyad::recover_environment(
                          report.candidate_minus, aggregates))}};
    }

    dyad::io::write_json_file(out_path(opts, "report.json"), out);
    std::cout << "case: " << dyad::to_string(report.case_class)
              << ", verify residual " << report.diagnostics.verify_max << "\n";
    std::cout << "wrote " << (fs::path(opts.out_dir) / "report.json").string()
              << "\n";
    return kExitOk;
}

int run_verify(const GlobalOptions& opts) {
    const json config = load_config(opts);
    const int samples = config.value("samples", 20);
    const int order = opts.order.value_or(config.value("order", 6));
    const int n_times = config.value("n_times", 20);
    const double t_max = config.value("t_max", 2.0);

    dyad::Rng rng(opts.seed);
    json checks = json::array();
    bool all_pass = true;

    auto add_check = [&](const std::string& name, bool pass, double deviation) {
        checks.push_back({{"name", name}, {"pass", pass}, {"max_deviation", deviation}});
        all_pass = all_pass && pass;
        std::cout << (pass ? "[PASS] " : "[FAIL] ") << name
                  << " (max deviation " << deviation << ")\n";
    };

    {
        const dyad::ColorAlgebraReport report = dyad::check_color_algebra();
        add_check("color algebra sweep (225 pairs)", report.pass,
                  static_cast<double>(report.violations.size()));
    }
    {
        double worst = 0.0;
        bool pass = true;
        for (int i = 0; i < samples; ++i) {
            const auto h = dyad::random_canonical_hamiltonian(rng);
            const dyad::ParityReport report = dyad::verify_parity_series(h, order);
            pass = pass && report.pass;
            worst = std::max({worst, report.max_u_deviation,
                              report.max_blue_deviation, report.max_red_deviation});
        }
        add_check("parity negation pattern, order " + std::to_string(order),
                  pass, worst);
    }
    {
        double worst = 0.0;
        for (int i = 0; i < samples; ++i) {
            const auto h = dyad::random_canonical_hamiltonian(rng);
            const auto partner = dyad::sign_partner(h);
            for (int k = 0; k < n_times; ++k) {
                const double t = t_max * (k + 1) / n_times;
                worst = std::max(
                    worst, dyad::max_abs_diff_u(dyad::map_snapshot(h, t).maps,
                                                dyad::map_snapshot(partner, t).maps));
            }
        }
        add_check("sign-flip u-trajectory invariance", worst <= 1e-12, worst);
    }
    {
        std::uniform_real_distribution<double> gamma_dist(0.1, 2.0);
        double min_gap = std::numeric_limits<double>::infinity();
        for (int i = 0; i < samples; ++i) {
            dyad::CanonicalHamiltonian h;
            dyad::Vector3d g{gamma_dist(rng), gamma_dist(rng), gamma_dist(rng)};
            std::sort(g.data(), g.data() + 3);
            h.gamma = g;
            min_gap = std::min(min_gap, dyad::verify_spectrum_gap(h));
        }
        add_check("spectrum gap positive for nonzero gamma triples",
                  min_gap > 0.0, min_gap);
    }
    {
        // Same trajectories from the partner Hamiltonian with the red mean
        // values flipped.
        double worst = 0.0;
        for (int i = 0; i < samples; ++i) {
            const auto h = dyad::random_canonical_hamiltonian(rng);
            dyad::TwoQubitState s = dyad::random_pure_state(rng);
            dyad::TwoQubitState flipped = s;
            flipped.xi(1) = -flipped.xi(1);
            flipped.xi(2) = -flipped.xi(2);
            flipped.corr.col(0) = -flipped.corr.col(0);
            for (int k = 0; k < n_times; ++k) {
                const double t = t_max * (k + 1) / n_times;
                const auto a = dyad::mean_trajectory(h, s, {t}, true);
                const auto b = dyad::mean_trajectory(dyad::sign_partner(h),
                                                     flipped, {t}, true);
                worst = std::max(worst, (a[0] - b[0]).cwiseAbs().maxCoeff());
            }
        }
        add_check("sign-flip state trajectory invariance", worst <= 1e-12, worst);
    }

    json out{{"seed", opts.seed},
             {"samples", samples},
             {"order", order},
             {"pass", all_pass},
             {"checks", checks}};
    dyad::io::write_json_file(out_path(opts, "verify.json"), out);
    std::cout << "wrote " << (fs::path(opts.out_dir) / "verify.json").string()
              << "\n";
    return all_pass ? kExitOk : kExitFailure;
}

int run_classical(const GlobalOptions& opts) {
    const json config = load_config(opts);
    if (!config.contains("system")) {
        throw std::invalid_argument("config needs \"system\"");
    }
    const dyad::ClassicalSystem sys =
        dyad::io::classical_system_from_json(config["system"]);
    const double y0_prime = config.value("y0", 0.0);
    const std::string mode = opts.mode.value_or(config.value("mode", "analytic"));
    const double step = config.value("step", 1e-4);

    std::vector<double> x0_values{-1.0, -0.25, 0.5, 1.25};
    if (config.contains("x0_values")) {
        x0_values = config["x0_values"].get<std::vector<double>>();
    }

    const dyad::ClassicalCanonical normalized = dyad::classical_normalize(sys);
    const double y0 = dyad::normalize_initial_y(sys, y0_prime);

    std::vector<dyad::ClassicalDerivativeSample> samples;
    for (const double x0 : x0_values) {
        dyad::ClassicalDerivativeSample sample;
        sample.x0 = x0;
        sample.d = mode == "finite_difference"
                       ? dyad::finite_difference_derivatives(normalized, x0, y0, step)
                       : dyad::classical_derivatives(normalized, x0, y0);
        samples.push_back(sample);
    }
    const dyad::ClassicalReconstruction rec = dyad::classical_reconstruct(samples);

    const double tolerance =
        opts.tolerance.value_or(mode == "finite_difference" ? 1e-6 : 1e-12);
    double deviation = std::abs(rec.alpha - normalized.alpha);
    bool pass = true;
    if (rec.hidden_observable) {
        deviation = std::max({deviation,
                              std::abs(rec.system.beta - normalized.beta),
                              std::abs(rec.system.gamma - normalized.gamma),
                              std::abs(rec.y0 - y0)});
        pass = rec.system.sign == normalized.sign && deviation <= tolerance;
    } else {
        pass = deviation <= tolerance;
    }

    json out{{"system", dyad::io::to_json(sys)},
             {"normalized", dyad::io::to_json(normalized)},
             {"y0", y0},
             {"mode", mode},
             {"reconstructed", dyad::io::to_json(rec)},
             {"max_deviation", deviation},
             {"pass", pass}};
    dyad::io::write_json_file(out_path(opts, "classical.json"), out);
    std::cout << (pass ? "[PASS] " : "[FAIL] ")
              << "classical round trip (max deviation " << deviation << ")\n";
    std::cout << "wrote " << (fs::path(opts.out_dir) / "classical.json").string()
              << "\n";
    return pass ? kExitOk : kExitFailure;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-qubit dynamics and identification toolkit"};
    app.require_subcommand(1);

    GlobalOptions opts;
    int requested_order = 0;
    double requested_tolerance = 0.0;
    std::string requested_mode;

    auto add_common = [&](CLI::App* cmd, bool needs_config) {
        auto* config_opt =
            cmd->add_option("--config", opts.config_path, "config JSON path");
        if (needs_config) {
            config_opt->required();
        }
        cmd->add_option("--out", opts.out_dir, "output directory");
        cmd->add_option("--seed", opts.seed, "random seed");
        cmd->add_option("--order", requested_order, "Taylor order")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--tolerance", requested_tolerance,
                        "tolerance override");
        cmd->add_option("--mode", requested_mode, "exact|fit (reconstruct)");
    };

    auto* simulate = app.add_subcommand("simulate", "write trajectory CSVs");
    add_common(simulate, true);
    auto* reconstruct_cmd =
        app.add_subcommand("reconstruct", "recover candidate Hamiltonians");
    add_common(reconstruct_cmd, true);
    auto* verify = app.add_subcommand("verify", "run the check suites");
    add_common(verify, false);
    auto* classical = app.add_subcommand("classical", "classical analog report");
    add_common(classical, true);

    CLI11_PARSE(app, argc, argv);

    if (requested_order > 0) {
        opts.order = requested_order;
    }
    if (requested_tolerance > 0.0) {
        opts.tolerance = requested_tolerance;
    }
    if (!requested_mode.empty()) {
        opts.mode = requested_mode;
    }

    try {
        if (simulate->parsed()) {
            return run_simulate(opts);
        }
        if (reconstruct_cmd->parsed()) {
            return run_reconstruct(opts);
        }
        if (verify->parsed()) {
            return run_verify(opts);
        }
        if (classical->parsed()) {
            return run_classical(opts);
        }
    } catch (const dyad::MalformedDataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    } catch (const dyad::ReconstructionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    } catch (const dyad::InsufficientOrderError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    } catch (const dyad::InconsistentDataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    } catch (const dyad::FitConditioningError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    } catch (const dyad::io::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
