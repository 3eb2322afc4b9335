#pragma once

#include <vector>

#include "osil/core/rng.hpp"
#include "osil/data/dataset.hpp"

namespace osil {

// A length-H window starting at `start` within one trajectory of one dataset.
struct SegmentRef {
    DatasetLabel label = DatasetLabel::kUnion;
    int traj = 0;
    int start = 0;
};

// Minibatch of partial trajectories for the cost-model losses. Union
// segments come first, then non-preferred ones.
struct PartialTrajectoryBatch {
    const DatasetView* union_view = nullptr;
    const DatasetView* nonpref_view = nullptr;
    int horizon = 0;
    std::vector<SegmentRef> segments;

    int size() const { return static_cast<int>(segments.size()); }
    const DatasetView& view_for(const SegmentRef& ref) const {
        return ref.label == DatasetLabel::kUnion ? *union_view : *nonpref_view;
    }
    const std::vector<double>& observation(int seg, int t) const {
        const SegmentRef& ref = segments[seg];
        return view_for(ref).observation(ref.traj, ref.start + t);
    }
    int action(int seg, int t) const {
        const SegmentRef& ref = segments[seg];
        return view_for(ref).action(ref.traj, ref.start + t);
    }
};

// Uniformly samples trajectories and then window starts in [0, len - H].
// Every trajectory in both datasets must be at least H steps long.
PartialTrajectoryBatch sample_partial_batch(const DatasetView& union_view,
                                            const DatasetView& nonpref_view, int n_union,
                                            int n_nonpref, int horizon, Rng& rng);

// One-step transitions for temporal-difference updates.
struct TransitionBatch {
    std::vector<const std::vector<double>*> obs;
    std::vector<int> actions;
    std::vector<const std::vector<double>*> next_obs;
    std::vector<std::uint8_t> terminals;

    int size() const { return static_cast<int>(actions.size()); }
};

TransitionBatch sample_transitions(const DatasetView& view, int n, Rng& rng);

// State-action pairs, either from anywhere in the dataset or from episode
// starts only (t = 0), for behavior cloning and the safety penalty.
struct StateActionBatch {
    std::vector<const std::vector<double>*> obs;
    std::vector<int> actions;

    int size() const { return static_cast<int>(actions.size()); }
};

StateActionBatch sample_state_actions(const DatasetView& view, int n, Rng& rng);
StateActionBatch sample_initial_state_actions(const DatasetView& view, int n, Rng& rng);

}  // namespace osil
