#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "dcmu/simulator.hpp"

namespace dcmu {

/// Parse failure; the message names the source, line and offending key.
struct ScenarioParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Scenario files are plain text:
//
//   # comment
//   [params]
//   rho = 20            # m
//   q = 0.02            # m^2, scalar means q * I; [[a, b], [c, d]] for a full matrix
//   ...
//   [[obstacle]]
//   cx = 52
//   cy = 8
//   r = 3
//   [[robot]]
//   role = leader
//   x = 0
//   y = 0
//   speed = 1           # m/s
//   waypoints = [[60, 0], [60, 60]]
//
// Required [params] keys: rho rho0 d_beta_min d_beta_max d_gamma_min
// d_gamma_max s epsilon dt v_max duration q r p0 k_fb. Optional, with
// defaults: collision_radius (0.5), consensus_rounds (200),
// consensus_shift_margin (1), consensus_seed (0), algo (dcmu).
// Robots need role, x, y; x_hat / y_hat default to x / y. Leaders need speed
// and waypoints. Unknown keys and sections are errors.

Scenario parse_scenario_text(const std::string& text, const std::string& origin = "<string>");

/// Throws ScenarioParseError (also when the file cannot be read).
Scenario parse_scenario(const std::filesystem::path& path);

/// Canonical text form; parse_scenario_text(serialize_scenario(s)) == s.
std::string serialize_scenario(const Scenario& scenario);

/// FNV-1a 64 of the canonical text.
std::uint64_t scenario_hash(const Scenario& scenario);

}  // namespace dcmu
