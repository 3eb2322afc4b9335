#include "osil/env/grid.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "osil/core/kv.hpp"

namespace osil {

ObservationMode observation_mode_from_string(const std::string& s) {
    if (s == "one_hot_state") return ObservationMode::kOneHotState;
    if (s == "coordinate_features") return ObservationMode::kCoordinateFeatures;
    throw ConfigError("unknown observation_mode: " + s);
}

std::string to_string(ObservationMode m) {
    return m == ObservationMode::kOneHotState ? "one_hot_state" : "coordinate_features";
}

void GridSpec::validate() const {
    if (width < 2 || height < 2) throw ConfigError("GridSpec: grid must be at least 2x2");
    auto in_bounds = [&](std::pair<int, int> c) {
        return c.first >= 0 && c.first < width && c.second >= 0 && c.second < height;
    };
    if (!in_bounds(start)) throw ConfigError("GridSpec: start cell out of bounds");
    if (goals.empty()) throw ConfigError("GridSpec: need at least one goal cell");
    std::set<std::pair<int, int>> goal_set(goals.begin(), goals.end());
    for (const auto& g : goals) {
        if (!in_bounds(g)) throw ConfigError("GridSpec: goal cell out of bounds");
    }
    for (const auto& h : hazards) {
        if (!in_bounds(h)) throw ConfigError("GridSpec: hazard cell out of bounds");
        if (goal_set.count(h)) throw ConfigError("GridSpec: cell is both goal and hazard");
    }
    if (goal_set.count(start)) throw ConfigError("GridSpec: start cell is a goal");
    if (slip_prob < 0.0 || slip_prob >= 1.0) throw ConfigError("GridSpec: slip_prob out of [0,1)");
    if (hazard_cost <= 0.0) throw ConfigError("GridSpec: hazard_cost must be positive");
    if (step_penalty < 0.0) throw ConfigError("GridSpec: step_penalty must be nonnegative");
    if (gamma <= 0.0 || gamma >= 1.0) throw ConfigError("GridSpec: gamma must be in (0,1)");
    if (horizon < 1) throw ConfigError("GridSpec: horizon must be >= 1");
    if (cost_budget < 0.0) throw ConfigError("GridSpec: cost_budget must be >= 0");
}

namespace {

std::pair<int, int> parse_cell(const std::string& s) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) throw ConfigError("cell must be x:y, got " + s);
    try {
        return {std::stoi(s.substr(0, colon)), std::stoi(s.substr(colon + 1))};
    } catch (const std::exception&) {
        throw ConfigError("cell must be x:y with integers, got " + s);
    }
}

std::vector<std::pair<int, int>> parse_cells(const std::string& s) {
    std::vector<std::pair<int, int>> out;
    std::istringstream in(s);
    std::string part;
    while (std::getline(in, part, ',')) {
        const auto first = part.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        const auto last = part.find_last_not_of(" \t");
        out.push_back(parse_cell(part.substr(first, last - first + 1)));
    }
    return out;
}

}  // namespace

GridSpec grid_spec_from_kv(const KvConfig& kv, const std::string& prefix) {
    GridSpec def;
    GridSpec s;
    s.width = static_cast<int>(kv.get_int(prefix + "width", def.width));
    s.height = static_cast<int>(kv.get_int(prefix + "height", def.height));
    if (kv.contains(prefix + "start")) s.start = parse_cell(kv.get_string(prefix + "start"));
    if (kv.contains(prefix + "goals")) s.goals = parse_cells(kv.get_string(prefix + "goals"));
    if (kv.contains(prefix + "hazards")) s.hazards = parse_cells(kv.get_string(prefix + "hazards"));
    s.slip_prob = kv.get_double(prefix + "slip_prob", def.slip_prob);
    s.hazard_cost = kv.get_double(prefix + "hazard_cost", def.hazard_cost);
    s.goal_reward = kv.get_double(prefix + "goal_reward", def.goal_reward);
    s.step_penalty = kv.get_double(prefix + "step_penalty", def.step_penalty);
    s.gamma = kv.get_double(prefix + "gamma", def.gamma);
    s.horizon = static_cast<int>(kv.get_int(prefix + "horizon", def.horizon));
    s.cost_budget = kv.get_double(prefix + "cost_budget", def.cost_budget);
    s.observation_mode = observation_mode_from_string(
        kv.get_string(prefix + "observation_mode", to_string(def.observation_mode)));
    s.validate();
    return s;
}

GridWorld make_grid_world(const GridSpec& spec) {
    spec.validate();
    GridWorld w;
    w.spec = spec;
    const int S = spec.width * spec.height;
    const int A = kGridActions;

    std::vector<std::uint8_t> hazard(S, 0), goal(S, 0);
    for (const auto& h : spec.hazards) hazard[w.state_of(h.first, h.second)] = 1;
    for (const auto& g : spec.goals) goal[w.state_of(g.first, g.second)] = 1;

    TabularCmdp& m = w.cmdp;
    m.n_states = S;
    m.n_actions = A;
    m.transition.assign(static_cast<std::size_t>(S) * A * S, 0.0);
    m.reward.assign(static_cast<std::size_t>(S) * A, 0.0);
    m.cost.assign(static_cast<std::size_t>(S) * A, 0.0);
    m.initial_dist.assign(S, 0.0);
    m.initial_dist[w.state_of(spec.start.first, spec.start.second)] = 1.0;
    m.absorbing.assign(S, 0);
    m.gamma = spec.gamma;
    m.horizon = spec.horizon;
    m.cost_budget = spec.cost_budget;

    // dx/dy per action: 0 east, 1 west, 2 north, 3 south.
    const int dx[A] = {1, -1, 0, 0};
    const int dy[A] = {0, 0, 1, -1};
    // Perpendicular action pairs for slips.
    const int perp[A][2] = {{2, 3}, {2, 3}, {0, 1}, {0, 1}};

    auto dest_of = [&](int x, int y, int dir) {
        const int nx = std::clamp(x + dx[dir], 0, spec.width - 1);
        const int ny = std::clamp(y + dy[dir], 0, spec.height - 1);
        return w.state_of(nx, ny);
    };

    for (int s = 0; s < S; ++s) {
        const auto [x, y] = w.cell_of(s);
        if (goal[s]) {
            m.absorbing[s] = 1;
            for (int a = 0; a < A; ++a) m.transition[m.sas(s, a, s)] = 1.0;
            continue;
        }
        for (int a = 0; a < A; ++a) {
            m.transition[m.sas(s, a, dest_of(x, y, a))] += 1.0 - spec.slip_prob;
            m.transition[m.sas(s, a, dest_of(x, y, perp[a][0]))] += 0.5 * spec.slip_prob;
            m.transition[m.sas(s, a, dest_of(x, y, perp[a][1]))] += 0.5 * spec.slip_prob;
            double p_goal = 0.0, p_hazard = 0.0;
            for (int s2 = 0; s2 < S; ++s2) {
                const double p = m.transition[m.sas(s, a, s2)];
                if (goal[s2]) p_goal += p;
                if (hazard[s2]) p_hazard += p;
            }
            m.reward[m.sa(s, a)] = -spec.step_penalty + spec.goal_reward * p_goal;
            m.cost[m.sa(s, a)] = spec.hazard_cost * p_hazard;
        }
    }
    m.validate();

    if (spec.observation_mode == ObservationMode::kOneHotState) {
        w.obs_dim = S;
        w.features.assign(S, std::vector<double>(S, 0.0));
        for (int s = 0; s < S; ++s) w.features[s][s] = 1.0;
    } else {
        // here/E/W/N/S hazard flags after the two cell-center coordinates.
        w.obs_dim = 7;
        w.features.assign(S, std::vector<double>(7, 0.0));
        auto hazard_at = [&](int x, int y) {
            if (x < 0 || x >= spec.width || y < 0 || y >= spec.height) return 0.0;
            return hazard[w.state_of(x, y)] ? 1.0 : 0.0;
        };
        for (int s = 0; s < S; ++s) {
            const auto [x, y] = w.cell_of(s);
            std::vector<double>& f = w.features[s];
            f[0] = (x + 0.5) / spec.width;
            f[1] = (y + 0.5) / spec.height;
            f[2] = hazard_at(x, y);
            f[3] = hazard_at(x + 1, y);
            f[4] = hazard_at(x - 1, y);
            f[5] = hazard_at(x, y + 1);
            f[6] = hazard_at(x, y - 1);
        }
    }
    return w;
}

}  // namespace osil
