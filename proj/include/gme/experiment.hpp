#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <string>
#include <vector>

#include "gme/config.hpp"

namespace gme {

struct TrajectoryData {
    std::vector<double> times;
    Eigen::MatrixXd populations;  // rows: grid points, cols: modes
};

// Fixed column order (t, n1, ..., nK), 17-significant-digit decimal floats.
void write_populations_csv(const TrajectoryData& traj, std::ostream& os);
TrajectoryData read_populations_csv(std::istream& is);
TrajectoryData read_populations_csv_file(const std::string& path);

struct TrajectoryComparison {
    std::vector<double> max_abs_per_mode;
    std::vector<double> rms_per_mode;
    double max_abs{0.0};
    double rms{0.0};
};

// Requires matching grids and mode counts.
TrajectoryComparison compare_trajectories(const TrajectoryData& a,
                                          const TrajectoryData& b);

// Runs every configured mode (plus the sweep, when requested), writes CSV and
// JSON artifacts under the output directory and returns its path.
std::string run_experiment(const SimulationConfig& cfg);

// Exit-code mapping shared by the CLI: 0 success, 2 validation failure,
// 3 Dyson divergence, 4 integration/physicality failure, 5 other numerical
// failure, 1 anything else.
int exit_code_for_current_exception();

}  // namespace gme
