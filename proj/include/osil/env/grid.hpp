#pragma once

#include <string>
#include <utility>
#include <vector>

#include "osil/env/tabular_cmdp.hpp"

namespace osil {

class KvConfig;

enum class ObservationMode { kOneHotState, kCoordinateFeatures };

ObservationMode observation_mode_from_string(const std::string& s);
std::string to_string(ObservationMode m);

// Gridworld with hazard cells (per-step cost on arrival) and absorbing goal
// cells (terminal reward on arrival). Actions are east/west/north/south;
// slipping replaces the intended move with one of the two perpendicular
// directions. Walking into a wall stays in place.
struct GridSpec {
    int width = 5;
    int height = 5;
    std::pair<int, int> start = {0, 0};
    std::vector<std::pair<int, int>> goals = {{4, 0}};
    std::vector<std::pair<int, int>> hazards = {{2, 0}, {2, 1}, {2, 2}};
    double slip_prob = 0.0;
    double hazard_cost = 1.0;
    double goal_reward = 1.0;
    double step_penalty = 0.01;
    double gamma = 0.99;
    int horizon = 30;
    double cost_budget = 0.1;
    ObservationMode observation_mode = ObservationMode::kCoordinateFeatures;

    void validate() const;
};

GridSpec grid_spec_from_kv(const KvConfig& kv, const std::string& prefix = "env.");

struct GridWorld {
    GridSpec spec;
    TabularCmdp cmdp;
    std::vector<std::vector<double>> features;  // [state] -> observation vector
    int obs_dim = 0;

    int state_of(int x, int y) const { return y * spec.width + x; }
    std::pair<int, int> cell_of(int s) const { return {s % spec.width, s / spec.width}; }
};

// Compiles the grid into its tabular CMDP plus per-state observations.
// Coordinate features are (cell-center x / width, cell-center y / height,
// hazard flags for here/E/W/N/S); cell centers keep every observation away
// from the all-zero vector, which the unit-normalizing encoder cannot embed.
GridWorld make_grid_world(const GridSpec& spec);

inline constexpr int kGridActions = 4;  // 0:east 1:west 2:north 3:south

}  // namespace osil
