#pragma once

#include <cmath>

#include "gme/errors.hpp"

namespace gme {

// Uniform time grid on [0, t_max] with n_steps intervals (n_steps + 1 points).
struct TimeGrid {
    double t_max{0.0};
    int n_steps{0};

    TimeGrid() = default;
    TimeGrid(double t_max_, int n_steps_) : t_max(t_max_), n_steps(n_steps_) {
        if (!(t_max > 0.0)) throw ValidationError("TimeGrid: t_max must be > 0");
        if (n_steps < 1) throw ValidationError("TimeGrid: n_steps must be >= 1");
    }

    double dt() const { return t_max / n_steps; }
    int points() const { return n_steps + 1; }
    double time(int i) const { return i * dt(); }

    bool operator==(const TimeGrid& other) const {
        return t_max == other.t_max && n_steps == other.n_steps;
    }
    bool operator!=(const TimeGrid& other) const { return !(*this == other); }

    // Composite trapezoid weight for ∫_0^{t(upper)} evaluated at node j.
    // The empty integral (upper == 0) has zero weight everywhere.
    double trapezoid_weight(int upper, int j) const {
        if (upper <= 0 || j < 0 || j > upper) return 0.0;
        return (j == 0 || j == upper) ? 0.5 * dt() : dt();
    }
};

}  // namespace gme
