#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lcqkd/channels.hpp"
#include "lcqkd/security.hpp"

namespace lcqkd {

enum class SweepVariable { r_e, spacing, dist_ab, dist_ae, gamma, theta };

const char* to_string(SweepVariable v);
std::optional<SweepVariable> sweep_variable_from_string(const std::string& name);

struct SweepSpec {
    SweepVariable variable = SweepVariable::r_e;
    std::vector<double> values;
    LineGeometry base;
    // Keep the tap at the midpoint while dist_ab is swept.
    bool dae_tracks_midpoint = false;
};

struct SweepPoint {
    double value = 0.0;
    SecurityReport report;
};

// Optimized key fraction along one variable. Sweeping gamma or theta fixes
// that argument and optimizes the other; geometry sweeps optimize both.
// Points evaluate in parallel; output order follows the input order.
std::vector<SweepPoint> run_sweep(const SweepSpec& spec);

// CSV with header
// variable,value,gamma_opt,theta_opt,p_ok,eve_bound,bob_entropy,rate
void write_csv(std::ostream& out, const SweepSpec& spec,
               const std::vector<SweepPoint>& points);

}  // namespace lcqkd
