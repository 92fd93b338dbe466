#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "gme/kernels.hpp"
#include "gme/propagator.hpp"
#include "gme/quadratic_model.hpp"
#include "gme/time_grid.hpp"

namespace gme {

// Fully resolved run description. Defaults reproduce the paired double-dot
// setup: J = diag(0.5, 1.0), pairing 0.7, λ = 1.5, both sites coupled,
// (|00> + |11>)/√2 start.
struct SimulationConfig {
    QuadraticModel model;
    StateSpec initial_state{StateSpec::BellPair};

    SpectralDensity bath{0.2, 1.5};
    int oracle_modes{600};
    double oracle_window_factor{30.0};  // window W = factor * λ
    double bath_quality_tol{0.03};      // relative to c(0)

    TimeGrid grid{10.0, 1000};

    double dyson_tol{1e-6};
    int max_order{24};
    KernelConventions conventions{};
    IntegrationOptions integration{};
    bool refine_midpoints{false};  // run the solver at dt/2, output on the grid
    bool check_residual{false};

    std::vector<std::string> modes{"gme"};
    std::string output_dir;  // empty: $GME_OUTPUT_ROOT or ./gme_out
    std::string sweep_axis;  // empty or "gamma"
    std::vector<double> sweep_values;
    int sweep_jobs{1};
    double compare_max_tol{1e-2};
    double compare_rms_tol{3e-3};
    bool dump_kernels{false};

    SimulationConfig();
    void validate() const;
};

// INI-style parser: [section] headers, key = value lines, #/; comments.
// Unknown sections or keys are rejected with path-qualified messages; values
// are range-checked. Defaults fill everything a file does not mention.
SimulationConfig parse_config_text(const std::string& text);
SimulationConfig parse_config(const std::string& path);

// Emits every effective setting; parsing the output reproduces the config.
void write_effective_config(const SimulationConfig& cfg, std::ostream& os);

std::string default_output_root();

}  // namespace gme
