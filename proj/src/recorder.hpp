#pragma once

#include "fracrd/evolution.hpp"

#include <string>
#include <vector>

namespace fracrd::detail {

// Collects per-step scalars and snapshots; record() returns false once the
// run has reached a terminal state.
class Recorder {
public:
    Recorder(const Grid& g, const SimParams& p, const RunOptions& o, std::string scheme);
    bool record(int n, const std::vector<double>& u);
    Trajectory finish();

private:
    SimParams params_;
    std::vector<double> weight_;
    Trajectory traj_;
};

}  // namespace fracrd::detail
