#include "gme/experiment.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "gme/oracle.hpp"

namespace gme {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void write_populations_csv(const TrajectoryData& traj, std::ostream& os) {
    const int n = static_cast<int>(traj.populations.cols());
    os << "t";
    for (int m = 0; m < n; ++m) os << ",n" << (m + 1);
    os << "\n";
    for (size_t i = 0; i < traj.times.size(); ++i) {
        os << fmt17(traj.times[i]);
        for (int m = 0; m < n; ++m)
            os << "," << fmt17(traj.populations(static_cast<int>(i), m));
        os << "\n";
    }
}

TrajectoryData read_populations_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line))
        throw ValidationError("populations csv: missing header");
    int n_cols = 1;
    for (char c : line)
        if (c == ',') ++n_cols;
    if (n_cols < 2 || line.substr(0, 1) != "t")
        throw ValidationError("populations csv: unexpected header '" + line + "'");

    std::vector<double> times;
    std::vector<double> values;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        int col = 0;
        while (std::getline(row, cell, ',')) {
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str())
                throw ValidationError("populations csv: bad cell '" + cell + "'");
            if (col == 0)
                times.push_back(v);
            else
                values.push_back(v);
            ++col;
        }
        if (col != n_cols)
            throw ValidationError("populations csv: ragged row '" + line + "'");
    }
    TrajectoryData out;
    out.times = std::move(times);
    out.populations.resize(static_cast<int>(out.times.size()), n_cols - 1);
    for (int i = 0; i < out.populations.rows(); ++i)
        for (int m = 0; m < n_cols - 1; ++m)
            out.populations(i, m) = values[static_cast<size_t>(i) * (n_cols - 1) + m];
    return out;
}

TrajectoryData read_populations_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open trajectory file '" + path + "'");
    return read_populations_csv(in);
}

TrajectoryComparison compare_trajectories(const TrajectoryData& a,
                                          const TrajectoryData& b) {
    if (a.times.size() != b.times.size() ||
        a.populations.cols() != b.populations.cols())
        throw ValidationError("compare_trajectories: grid or mode count mismatch");
    for (size_t i = 0; i < a.times.size(); ++i)
        if (std::abs(a.times[i] - b.times[i]) >
            1e-12 * std::max(1.0, std::abs(a.times[i])))
            throw ValidationError("compare_trajectories: time grids differ");

    const int n = static_cast<int>(a.populations.cols());
    const int rows = static_cast<int>(a.times.size());
    TrajectoryComparison cmp;
    cmp.max_abs_per_mode.assign(n, 0.0);
    cmp.rms_per_mode.assign(n, 0.0);
    for (int m = 0; m < n; ++m) {
        double acc = 0.0;
        for (int i = 0; i < rows; ++i) {
            const double d = a.populations(i, m) - b.populations(i, m);
            cmp.max_abs_per_mode[m] = std::max(cmp.max_abs_per_mode[m], std::abs(d));
            acc += d * d;
        }
        cmp.rms_per_mode[m] = std::sqrt(acc / rows);
        cmp.max_abs = std::max(cmp.max_abs, cmp.max_abs_per_mode[m]);
        cmp.rms = std::max(cmp.rms, cmp.rms_per_mode[m]);
    }
    return cmp;
}

namespace {

struct PointOutcome {
    double gamma{0.0};
    int dyson_order{0};
    bool dyson_converged{false};
    double delta_peak{0.0};
    double delta_final{0.0};
    bool failed{false};
    std::string error;
};

TrajectoryData to_trajectory(const std::vector<double>& times,
                             const Eigen::MatrixXd& populations) {
    return TrajectoryData{times, populations};
}

// Drop the interleaved half-grid points introduced by refine_midpoints.
TrajectoryData decimate(const TrajectoryData& fine) {
    TrajectoryData out;
    const int rows = static_cast<int>(fine.times.size());
    out.populations.resize((rows + 1) / 2, fine.populations.cols());
    for (int i = 0; i < rows; i += 2) {
        out.times.push_back(fine.times[i]);
        out.populations.row(i / 2) = fine.populations.row(i);
    }
    return out;
}

void write_file(const fs::path& path, const std::string& contents) {
    std::ofstream os(path);
    if (!os) throw ValidationError("cannot write '" + path.string() + "'");
    os << contents;
}

void dump_kernel_file(const TwoTimeKernel& k, const fs::path& path) {
    std::ofstream os(path);
    if (!os) throw ValidationError("cannot write '" + path.string() + "'");
    kernel_to_csv(k, os);
}

PointOutcome run_single_point(const SimulationConfig& cfg, const fs::path& out_dir) {
    cfg.validate();
    fs::create_directories(out_dir);
    {
        std::ofstream os(out_dir / "effective_config.ini");
        write_effective_config(cfg, os);
    }

    const TimeGrid solve_grid = cfg.refine_midpoints
                                    ? TimeGrid(cfg.grid.t_max, 2 * cfg.grid.n_steps)
                                    : cfg.grid;

    RunSettings settings;
    settings.model = cfg.model;
    settings.bath = cfg.bath;
    settings.grid = solve_grid;
    settings.initial_state = cfg.initial_state;
    settings.dyson_tol = cfg.dyson_tol;
    settings.max_order = cfg.max_order;
    settings.conventions = cfg.conventions;
    settings.integration = cfg.integration;

    PointOutcome outcome;
    outcome.gamma = cfg.bath.gamma;

    if (cfg.dump_kernels) {
        fs::create_directories(out_dir / "kernels");
        const NambuMatrix nambu = build_nambu(cfg.model);
        const BogoliubovData bog = diagonalize_bogoliubov(nambu, cfg.model.coupled_sites);
        const TwoTimeKernel bare = bare_correlation(cfg.bath, solve_grid);
        const TwoTimeKernel sigma = system_commutator(bog, solve_grid);
        dump_kernel_file(bare, out_dir / "kernels" / "bare_correlation.csv");
        dump_kernel_file(sigma, out_dir / "kernels" / "system_commutator.csv");
        dump_kernel_file(self_energy(sigma, cfg.conventions),
                         out_dir / "kernels" / "self_energy.csv");
    }

    std::map<std::string, TrajectoryData> produced;
    ordered_json steady_table = ordered_json::object();
    ordered_json convergence_meta = ordered_json::object();

    for (const std::string& mode : cfg.modes) {
        const fs::path mode_dir = out_dir / mode;
        fs::create_directories(mode_dir);
        ordered_json diag;
        diag["mode"] = mode;
        TrajectoryData traj;

        if (mode == "oracle") {
            const double window = cfg.oracle_window_factor * cfg.bath.lambda;
            const DiscreteBath bath = discretize_bath(cfg.bath, cfg.oracle_modes, window);
            const double horizon = recurrence_horizon(bath);
            if (!(cfg.grid.t_max < 0.5 * horizon))
                throw ValidationError(
                    "oracle: t_max must stay below half the recurrence horizon (" +
                    fmt17(horizon) + "); increase bath.oracle_modes");
            const double err = bath_reconstruction_error(bath, cfg.bath, cfg.grid);
            const double c0 = cfg.bath.correlation(0.0);
            if (c0 > 0.0 && err > cfg.bath_quality_tol * c0)
                throw ValidationError(
                    "oracle: bath reconstruction error " + fmt17(err / c0) +
                    " (relative) exceeds bath.quality_tol; enlarge the window or "
                    "loosen the gate");
            const Eigen::MatrixXcd gamma0 =
                initial_covariance(cfg.initial_state, cfg.model.n_modes);
            const OracleResult res = exact_evolve(cfg.model, bath, gamma0, cfg.grid);
            traj = to_trajectory(res.times, res.populations);
            diag["bath"] = {{"modes", bath.n_modes()},
                            {"window", window},
                            {"recurrence_horizon", horizon},
                            {"reconstruction_error", err},
                            {"reconstruction_error_relative", c0 > 0 ? err / c0 : 0.0}};
            steady_table[mode] = {{"steady_state_time", nullptr},
                                  {"final_populations",
                                   std::vector<double>(
                                       res.populations.row(res.populations.rows() - 1)
                                           .data(),
                                       res.populations.row(res.populations.rows() - 1)
                                               .data() +
                                           res.populations.cols())}};
        } else {
            settings.keep_kernel = cfg.dump_kernels && mode == "gme";
            settings.check_residual = cfg.check_residual && mode == "gme";
            const RunResult res =
                run(mode == "gme" ? RunMode::Gme : RunMode::Redfield, settings);
            traj = to_trajectory(res.trajectory.times, res.trajectory.populations);
            if (cfg.refine_midpoints) traj = decimate(traj);

            diag["steady_state_time"] = res.trajectory.steady_state_time
                                            ? ordered_json(*res.trajectory.steady_state_time)
                                            : ordered_json(nullptr);
            diag["final_rhs_norm"] = res.trajectory.rhs_norms.back();
            diag["max_projection_drift"] = res.trajectory.max_projection_drift;
            diag["max_population_clip"] = res.trajectory.max_population_clip;
            diag["max_coefficient_deviation"] = res.trajectory.max_coefficient_deviation;
            ordered_json dyson;
            dyson["order_reached"] = res.dyson_order;
            dyson["converged"] = res.dyson_converged;
            dyson["deltas"] = res.dyson_deltas;
            if (res.fixed_point_residual) dyson["residual"] = *res.fixed_point_residual;
            diag["dyson"] = dyson;

            if (mode == "gme") {
                outcome.dyson_order = res.dyson_order;
                outcome.dyson_converged = res.dyson_converged;
                if (!res.dyson_deltas.empty()) {
                    outcome.delta_peak = *std::max_element(res.dyson_deltas.begin(),
                                                           res.dyson_deltas.end());
                    outcome.delta_final = res.dyson_deltas.back();
                }
                std::ostringstream conv;
                conv << "k,delta\n";
                for (size_t k = 0; k < res.dyson_deltas.size(); ++k)
                    conv << (k + 1) << "," << fmt17(res.dyson_deltas[k]) << "\n";
                write_file(mode_dir / "convergence.csv", conv.str());
                convergence_meta = dyson;
                if (cfg.dump_kernels && res.dressed_kernel)
                    dump_kernel_file(*res.dressed_kernel,
                                     out_dir / "kernels" / "dressed.csv");
            }
            steady_table[mode] = {
                {"steady_state_time", diag["steady_state_time"]},
                {"final_populations",
                 std::vector<double>(
                     res.trajectory.populations.row(res.trajectory.populations.rows() - 1)
                         .data(),
                     res.trajectory.populations.row(res.trajectory.populations.rows() - 1)
                             .data() +
                         res.trajectory.populations.cols())},
                {"final_rhs_norm", res.trajectory.rhs_norms.back()}};
        }

        std::ostringstream csv;
        write_populations_csv(traj, csv);
        write_file(mode_dir / "populations.csv", csv.str());
        write_file(mode_dir / "diagnostics.json", diag.dump(2) + "\n");
        produced[mode] = std::move(traj);
    }

    ordered_json comparison;
    comparison["pairs"] = ordered_json::array();
    for (auto it = produced.begin(); it != produced.end(); ++it) {
        for (auto jt = std::next(it); jt != produced.end(); ++jt) {
            const TrajectoryComparison cmp = compare_trajectories(it->second, jt->second);
            ordered_json pair;
            pair["a"] = it->first;
            pair["b"] = jt->first;
            pair["max_abs"] = cmp.max_abs;
            pair["rms"] = cmp.rms;
            pair["max_abs_per_mode"] = cmp.max_abs_per_mode;
            pair["rms_per_mode"] = cmp.rms_per_mode;
            pair["within_tolerance"] = cmp.max_abs <= cfg.compare_max_tol &&
                                       cmp.rms <= cfg.compare_rms_tol;
            comparison["pairs"].push_back(pair);
        }
    }
    comparison["steady_state"] = steady_table;
    if (!convergence_meta.empty()) comparison["convergence"] = convergence_meta;
    comparison["tolerances"] = {{"max_abs", cfg.compare_max_tol},
                                {"rms", cfg.compare_rms_tol}};
    write_file(out_dir / "comparison.json", comparison.dump(2) + "\n");
    return outcome;
}

std::string gamma_dir_name(double gamma) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "gamma_%.12g", gamma);
    return buf;
}

}  // namespace

std::string run_experiment(const SimulationConfig& cfg) {
    cfg.validate();
    const fs::path out_dir =
        cfg.output_dir.empty() ? fs::path(default_output_root()) : fs::path(cfg.output_dir);
    fs::create_directories(out_dir);

    try {
        if (cfg.sweep_axis.empty()) {
            run_single_point(cfg, out_dir);
        } else {
            {
                std::ofstream os(out_dir / "effective_config.ini");
                write_effective_config(cfg, os);
            }
            // Per-point outputs are directory-isolated, so points can run
            // concurrently.
            std::vector<PointOutcome> outcomes(cfg.sweep_values.size());
            std::vector<SimulationConfig> points;
            for (double v : cfg.sweep_values) {
                SimulationConfig p = cfg;
                p.bath.gamma = v;
                p.sweep_axis.clear();
                p.sweep_values.clear();
                points.push_back(std::move(p));
            }
            const int jobs =
                std::min<int>(cfg.sweep_jobs, static_cast<int>(points.size()));
            std::atomic<size_t> cursor{0};
            auto worker = [&]() {
                while (true) {
                    const size_t i = cursor.fetch_add(1);
                    if (i >= points.size()) break;
                    const fs::path dir = out_dir / gamma_dir_name(points[i].bath.gamma);
                    try {
                        outcomes[i] = run_single_point(points[i], dir);
                    } catch (const std::exception& e) {
                        outcomes[i].gamma = points[i].bath.gamma;
                        outcomes[i].failed = true;
                        outcomes[i].error = e.what();
                        std::error_code ec;
                        fs::create_directories(dir, ec);
                        std::ofstream marker(dir / "FAILED");
                        marker << e.what() << "\n";
                    }
                }
            };
            if (jobs <= 1) {
                worker();
            } else {
                std::vector<std::thread> pool;
                for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
                for (auto& th : pool) th.join();
            }

            std::ostringstream summary;
            summary << "gamma,orders_to_converge,converged,delta_peak,delta_final,status\n";
            for (const auto& o : outcomes) {
                summary << fmt17(o.gamma) << "," << o.dyson_order << ","
                        << (o.dyson_converged ? 1 : 0) << "," << fmt17(o.delta_peak)
                        << "," << fmt17(o.delta_final) << ","
                        << (o.failed ? "failed" : "ok") << "\n";
            }
            write_file(out_dir / "sweep_summary.csv", summary.str());
            for (const auto& o : outcomes)
                if (o.failed)
                    throw NumericalError("sweep point gamma=" + fmt17(o.gamma) +
                                         " failed: " + o.error);
        }
    } catch (const std::exception& e) {
        std::ofstream marker(out_dir / "FAILED");
        marker << e.what() << "\n";
        throw;
    }
    return out_dir.string();
}

int exit_code_for_current_exception() {
    try {
        throw;
    } catch (const ValidationError&) {
        return 2;
    } catch (const DivergenceError&) {
        return 3;
    } catch (const IntegrationError&) {
        return 4;
    } catch (const NumericalError&) {
        return 5;
    } catch (...) {
        return 1;
    }
}

}  // namespace gme
