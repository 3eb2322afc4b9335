#include "osil/data/dataset.hpp"

#include "osil/core/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace osil {

std::string to_string(DatasetLabel label) {
    return label == DatasetLabel::kUnion ? "union" : "non_preferred";
}

DatasetLabel dataset_label_from_string(const std::string& s) {
    if (s == "union") return DatasetLabel::kUnion;
    if (s == "non_preferred") return DatasetLabel::kNonPreferred;
    throw DataError("unknown dataset label: " + s);
}

void TrajectoryDataset::validate() const {
    if (trajectories.empty()) throw DataError("dataset is empty");
    if (obs_dim <= 0 || n_actions <= 0) throw DataError("dataset dims not set");
    for (const Trajectory& tr : trajectories) {
        tr.check_consistent();
        for (const auto& obs : tr.observations) {
            if (static_cast<int>(obs.size()) != obs_dim) {
                throw DataError("dataset observation dimensionality mismatch");
            }
        }
        for (int a : tr.actions) {
            if (a < 0 || a >= n_actions) throw DataError("dataset action out of range");
        }
    }
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw DataError("quantile of empty list");
    if (q < 0.0 || q > 1.0) throw ConfigError("quantile level out of [0,1]");
    std::sort(values.begin(), values.end());
    const double h = (values.size() - 1) * q;
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= values.size()) return values.back();
    return values[lo] + (h - lo) * (values[lo + 1] - values[lo]);
}

DatasetPair build_datasets(const std::vector<Trajectory>& pool, int obs_dim, int n_actions,
                           const DatasetBuildOptions& opt) {
    if (pool.empty()) throw DataError("build_datasets: empty pool");
    if (opt.n_nonpref < 1) throw ConfigError("build_datasets: n_nonpref must be >= 1");

    std::vector<double> returns(pool.size()), costs(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
        returns[i] = pool[i].total_hidden_reward();
        costs[i] = pool[i].total_hidden_cost();
    }
    const double return_threshold = quantile(returns, opt.union_return_quantile);
    const double cost_threshold = quantile(costs, opt.nonpref_cost_quantile);

    std::vector<int> union_idx, candidate_idx;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (returns[i] >= return_threshold) {
            union_idx.push_back(static_cast<int>(i));
            if (costs[i] >= cost_threshold) candidate_idx.push_back(static_cast<int>(i));
        }
    }
    if (union_idx.empty()) {
        throw DataError("build_datasets: union filter kept 0 of " + std::to_string(pool.size()));
    }
    if (static_cast<int>(candidate_idx.size()) < opt.n_nonpref) {
        throw DataError("build_datasets: only " + std::to_string(candidate_idx.size()) +
                        " high-return high-cost candidates for n_nonpref = " +
                        std::to_string(opt.n_nonpref) + " (pool " + std::to_string(pool.size()) +
                        ", union " + std::to_string(union_idx.size()) + ")");
    }

    const Rng root(opt.seed);
    Rng pick = root.child("nonpref_sample");
    std::vector<int> chosen_pos =
        pick.sample_without_replacement(static_cast<int>(candidate_idx.size()), opt.n_nonpref);
    std::vector<int> nonpref_idx;
    nonpref_idx.reserve(opt.n_nonpref);
    for (int p : chosen_pos) nonpref_idx.push_back(candidate_idx[p]);
    std::sort(nonpref_idx.begin(), nonpref_idx.end());

    if (!opt.keep_nonpref_in_union) {
        std::vector<int> pruned;
        pruned.reserve(union_idx.size());
        for (int i : union_idx) {
            if (!std::binary_search(nonpref_idx.begin(), nonpref_idx.end(), i)) pruned.push_back(i);
        }
        union_idx = std::move(pruned);
        if (union_idx.empty()) {
            throw DataError("build_datasets: removing non-preferred trajectories emptied D_U");
        }
    }
    if (opt.max_union > 0 && static_cast<int>(union_idx.size()) > opt.max_union) {
        Rng cap = root.child("union_cap");
        std::vector<int> keep =
            cap.sample_without_replacement(static_cast<int>(union_idx.size()), opt.max_union);
        std::sort(keep.begin(), keep.end());
        std::vector<int> capped;
        capped.reserve(opt.max_union);
        for (int k : keep) capped.push_back(union_idx[k]);
        union_idx = std::move(capped);
    }

    auto assemble = [&](const std::vector<int>& idx, DatasetLabel label) {
        TrajectoryDataset ds;
        ds.label = label;
        ds.obs_dim = obs_dim;
        ds.n_actions = n_actions;
        ds.trajectories.reserve(idx.size());
        for (int i : idx) ds.trajectories.push_back(pool[i]);
        ds.provenance = {
            {"seed", opt.seed},
            {"pool_size", pool.size()},
            {"union_return_quantile", opt.union_return_quantile},
            {"nonpref_cost_quantile", opt.nonpref_cost_quantile},
            {"return_threshold", return_threshold},
            {"cost_threshold", cost_threshold},
            {"keep_nonpref_in_union", opt.keep_nonpref_in_union},
            {"source_indices", idx},
        };
        ds.validate();
        return ds;
    };
    DatasetPair out{assemble(union_idx, DatasetLabel::kUnion),
                    assemble(nonpref_idx, DatasetLabel::kNonPreferred)};
    return out;
}

TrajectoryDataset inject_label_noise(const TrajectoryDataset& nonpref,
                                     const TrajectoryDataset& union_ds, double noise_fraction,
                                     std::uint64_t seed) {
    if (noise_fraction < 0.0 || noise_fraction >= 1.0) {
        throw ConfigError("inject_label_noise: noise_fraction out of [0,1)");
    }
    nonpref.validate();
    union_ds.validate();
    TrajectoryDataset out = nonpref;
    const int k = static_cast<int>(std::floor(noise_fraction * nonpref.size()));
    if (k == 0) return out;
    Rng rng = Rng(seed).child("label_noise");
    const std::vector<int> positions = rng.sample_without_replacement(nonpref.size(), k);
    std::vector<int> replacements;
    for (int pos : positions) {
        const int src = rng.uniform_int(union_ds.size());
        out.trajectories[pos] = union_ds.trajectories[src];
        replacements.push_back(src);
    }
    out.provenance["noise_fraction"] = noise_fraction;
    out.provenance["noise_replaced_positions"] = positions;
    out.provenance["noise_source_indices"] = replacements;
    out.validate();
    return out;
}

namespace {

nlohmann::json trajectory_to_json(const Trajectory& tr) {
    return {{"state_ids", tr.state_ids},   {"obs", tr.observations},
            {"actions", tr.actions},       {"terminals", tr.terminals},
            {"rewards", tr.hidden_rewards}, {"costs", tr.hidden_costs}};
}

Trajectory trajectory_from_json(const nlohmann::json& j) {
    Trajectory tr;
    tr.state_ids = j.at("state_ids").get<std::vector<int>>();
    tr.observations = j.at("obs").get<std::vector<std::vector<double>>>();
    tr.actions = j.at("actions").get<std::vector<int>>();
    tr.terminals = j.at("terminals").get<std::vector<std::uint8_t>>();
    tr.hidden_rewards = j.at("rewards").get<std::vector<double>>();
    tr.hidden_costs = j.at("costs").get<std::vector<double>>();
    tr.check_consistent();
    return tr;
}

constexpr int kDatasetVersion = 1;

}  // namespace

void serialize_dataset(const TrajectoryDataset& ds, const std::filesystem::path& path) {
    ds.validate();
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw DataError("cannot open " + tmp.string() + " for writing");
        const nlohmann::json header = {
            {"kind", "trajectory_dataset"}, {"version", kDatasetVersion},
            {"label", to_string(ds.label)}, {"obs_dim", ds.obs_dim},
            {"n_actions", ds.n_actions},    {"count", ds.size()},
            {"provenance", ds.provenance},
        };
        out << header.dump() << "\n";
        for (const Trajectory& tr : ds.trajectories) out << trajectory_to_json(tr).dump() << "\n";
        if (!out) throw DataError("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

TrajectoryDataset deserialize_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open dataset file " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw DataError("dataset file is empty: " + path.string());
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw DataError("malformed dataset header in " + path.string() + ": " + e.what());
    }
    if (header.value("kind", "") != "trajectory_dataset") {
        throw DataError("not a trajectory dataset: " + path.string());
    }
    if (header.value("version", -1) != kDatasetVersion) {
        throw DataError("unsupported dataset version in " + path.string());
    }
    TrajectoryDataset ds;
    ds.label = dataset_label_from_string(header.at("label").get<std::string>());
    ds.obs_dim = header.at("obs_dim").get<int>();
    ds.n_actions = header.at("n_actions").get<int>();
    ds.provenance = header.value("provenance", nlohmann::json::object());
    const int count = header.at("count").get<int>();
    ds.trajectories.reserve(count);
    for (int i = 0; i < count; ++i) {
        if (!std::getline(in, line)) {
            throw DataError("dataset truncated: expected " + std::to_string(count) +
                            " trajectories, found " + std::to_string(i) + " in " + path.string());
        }
        try {
            ds.trajectories.push_back(trajectory_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw DataError("malformed trajectory line " + std::to_string(i) + " in " +
                            path.string() + ": " + e.what());
        }
    }
    ds.validate();
    return ds;
}

std::uint64_t file_hash(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return fnv1a64(os.str());
}

}  // namespace osil
