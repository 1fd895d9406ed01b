#pragma once

#include <vector>

#include "chronosim/task.hpp"

namespace chronosim::kernel {

struct TaskResponse {
    bool schedulable = false;
    double response = 0.0;  // worst-case response time; last iterate if divergent
};

// Classical fixed-priority response-time analysis for synchronous periodic
// tasks with constant execution times:
//   R_i = C_i + sum_{j in hp(i)} ceil(R_i / T_j) * C_j
// iterated from R_i = C_i until convergence, or until R_i exceeds the
// relative deadline (reported unschedulable). The priority order is taken
// from the policy: FP uses fixed_priority, RM uses periods, DM uses relative
// deadlines, ties broken by task index.
std::vector<TaskResponse> response_time_fp(const std::vector<TaskSpec>& tasks,
                                           SchedulingPolicy policy = SchedulingPolicy::FP);

}  // namespace chronosim::kernel
