#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "adaptmt/sim.hpp"
#include "json.hpp"

namespace adaptmt::cli {

// Exit codes: 0 success, 1 validation error, 2 numerical failure.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

enum class Layout { Fwer, Power };

struct SimulationPlan {
  Layout layout = Layout::Power;
  std::vector<sim::SimulationConfig> cells;  // scenarios x rho x rules
};

// Simulation document: shared settings plus "scenarios", "rules" and "rho"
// lists whose product gives the cells. scale multiplies replicate counts
// (rounded up, at least one).
SimulationPlan parse_simulation(const nlohmann::json& doc, double scale = 1.0);

void print_simulation_table(std::ostream& out, Layout layout, const std::vector<sim::PowerReport>& reports);

}  // namespace adaptmt::cli
