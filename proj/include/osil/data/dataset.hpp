#pragma once

#include <filesystem>
#include <vector>

#include "json.hpp"
#include "osil/core/rng.hpp"
#include "osil/env/trajectory.hpp"

namespace osil {

enum class DatasetLabel { kUnion, kNonPreferred };

std::string to_string(DatasetLabel label);
DatasetLabel dataset_label_from_string(const std::string& s);

struct TrajectoryDataset {
    DatasetLabel label = DatasetLabel::kUnion;
    int obs_dim = 0;
    int n_actions = 0;
    std::vector<Trajectory> trajectories;
    nlohmann::json provenance = nlohmann::json::object();

    int size() const { return static_cast<int>(trajectories.size()); }
    void validate() const;
};

// Learner-facing window onto a dataset: observations, actions, terminal
// flags. The reward/cost channels have no accessor here, so nothing built
// on a view can train against them; evaluation code takes the full dataset.
class DatasetView {
  public:
    explicit DatasetView(const TrajectoryDataset& ds) : ds_(&ds) { ds.validate(); }

    DatasetLabel label() const { return ds_->label; }
    int size() const { return ds_->size(); }
    int obs_dim() const { return ds_->obs_dim; }
    int n_actions() const { return ds_->n_actions; }
    int length(int traj) const { return ds_->trajectories[traj].length(); }
    const std::vector<double>& observation(int traj, int t) const {
        return ds_->trajectories[traj].observations[t];
    }
    int action(int traj, int t) const { return ds_->trajectories[traj].actions[t]; }
    bool terminal(int traj, int t) const { return ds_->trajectories[traj].terminals[t] != 0; }

  private:
    const TrajectoryDataset* ds_;
};

struct DatasetBuildOptions {
    double union_return_quantile = 0.5;  // keep returns at or above this pool quantile
    double nonpref_cost_quantile = 0.7;  // non-preferred candidates: top 30% by cost
    int n_nonpref = 50;
    int max_union = 0;  // 0 keeps every qualifying trajectory
    bool keep_nonpref_in_union = true;
    std::uint64_t seed = 0;
};

struct DatasetPair {
    TrajectoryDataset union_ds;
    TrajectoryDataset nonpref_ds;
};

// Splits a rollout pool into the union dataset (high return, any cost) and
// the non-preferred dataset (a uniform sample of the simultaneously
// high-return, high-cost trajectories). Thresholds are inclusive, which
// keeps tie-heavy pools (discrete episodic totals) from filtering to empty.
DatasetPair build_datasets(const std::vector<Trajectory>& pool, int obs_dim, int n_actions,
                           const DatasetBuildOptions& opt);

// Interpolated empirical quantile (the numpy default convention).
double quantile(std::vector<double> values, double q);

// Replaces floor(noise_fraction * |D_N|) non-preferred trajectories with
// uniform draws (with replacement) from the union dataset.
TrajectoryDataset inject_label_noise(const TrajectoryDataset& nonpref,
                                     const TrajectoryDataset& union_ds, double noise_fraction,
                                     std::uint64_t seed);

// JSON Lines: a header object carrying schema version, label, dims, count,
// and provenance, then one trajectory per line. Doubles round-trip exactly.
void serialize_dataset(const TrajectoryDataset& ds, const std::filesystem::path& path);
TrajectoryDataset deserialize_dataset(const std::filesystem::path& path);

std::uint64_t file_hash(const std::filesystem::path& path);

}  // namespace osil
