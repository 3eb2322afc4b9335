#include "osil/data/sampling.hpp"

#include <string>

#include "osil/core/errors.hpp"

namespace osil {

namespace {

void check_min_length(const DatasetView& view, int horizon) {
    for (int i = 0; i < view.size(); ++i) {
        if (view.length(i) < horizon) {
            throw DataError("trajectory " + std::to_string(i) + " in the " +
                            to_string(view.label()) + " dataset has " +
                            std::to_string(view.length(i)) + " steps, shorter than the segment " +
                            "horizon " + std::to_string(horizon));
        }
    }
}

SegmentRef sample_segment(const DatasetView& view, int horizon, Rng& rng) {
    SegmentRef ref;
    ref.label = view.label();
    ref.traj = rng.uniform_int(view.size());
    ref.start = rng.uniform_int(view.length(ref.traj) - horizon + 1);
    return ref;
}

}  // namespace

PartialTrajectoryBatch sample_partial_batch(const DatasetView& union_view,
                                            const DatasetView& nonpref_view, int n_union,
                                            int n_nonpref, int horizon, Rng& rng) {
    if (horizon < 2) throw ConfigError("segment horizon must be at least 2");
    if (n_union < 0 || n_nonpref < 0 || n_union + n_nonpref == 0) {
        throw ConfigError("segment batch sizes must be nonnegative and not both zero");
    }
    if (n_union > 0) check_min_length(union_view, horizon);
    if (n_nonpref > 0) check_min_length(nonpref_view, horizon);

    PartialTrajectoryBatch batch;
    batch.union_view = &union_view;
    batch.nonpref_view = &nonpref_view;
    batch.horizon = horizon;
    batch.segments.reserve(n_union + n_nonpref);
    for (int i = 0; i < n_union; ++i) batch.segments.push_back(sample_segment(union_view, horizon, rng));
    for (int i = 0; i < n_nonpref; ++i) {
        batch.segments.push_back(sample_segment(nonpref_view, horizon, rng));
    }
    return batch;
}

TransitionBatch sample_transitions(const DatasetView& view, int n, Rng& rng) {
    if (n < 1) throw ConfigError("transition batch size must be at least 1");
    TransitionBatch batch;
    batch.obs.reserve(n);
    batch.actions.reserve(n);
    batch.next_obs.reserve(n);
    batch.terminals.reserve(n);
    for (int i = 0; i < n; ++i) {
        const int traj = rng.uniform_int(view.size());
        const int t = rng.uniform_int(view.length(traj));
        batch.obs.push_back(&view.observation(traj, t));
        batch.actions.push_back(view.action(traj, t));
        batch.next_obs.push_back(&view.observation(traj, t + 1));
        batch.terminals.push_back(view.terminal(traj, t) ? 1 : 0);
    }
    return batch;
}

StateActionBatch sample_state_actions(const DatasetView& view, int n, Rng& rng) {
    if (n < 1) throw ConfigError("state-action batch size must be at least 1");
    StateActionBatch batch;
    batch.obs.reserve(n);
    batch.actions.reserve(n);
    for (int i = 0; i < n; ++i) {
        const int traj = rng.uniform_int(view.size());
        const int t = rng.uniform_int(view.length(traj));
        batch.obs.push_back(&view.observation(traj, t));
        batch.actions.push_back(view.action(traj, t));
    }
    return batch;
}

StateActionBatch sample_initial_state_actions(const DatasetView& view, int n, Rng& rng) {
    if (n < 1) throw ConfigError("state-action batch size must be at least 1");
    StateActionBatch batch;
    batch.obs.reserve(n);
    batch.actions.reserve(n);
    for (int i = 0; i < n; ++i) {
        const int traj = rng.uniform_int(view.size());
        batch.obs.push_back(&view.observation(traj, 0));
        batch.actions.push_back(view.action(traj, 0));
    }
    return batch;
}

}  // namespace osil
