#include "chronosim/response_time.hpp"

#include <algorithm>
#include <cmath>

#include "chronosim/errors.hpp"

namespace chronosim::kernel {

std::vector<TaskResponse> response_time_fp(const std::vector<TaskSpec>& tasks,
                                           SchedulingPolicy policy) {
    if (policy == SchedulingPolicy::EDF) {
        throw ValidationError("BadParameter", "response_time_fp requires a fixed-priority policy");
    }
    const std::size_t n = tasks.size();
    for (const TaskSpec& t : tasks) {
        if (!t.periodic || t.exec_time.kind != ExecTimeModel::Kind::Constant) {
            throw ValidationError("BadParameter",
                                  "response-time analysis needs periodic tasks with constant "
                                  "execution times");
        }
    }

    // Task indices sorted by descending priority under the policy.
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        double ka = policy == SchedulingPolicy::FP   ? tasks[a].fixed_priority
                    : policy == SchedulingPolicy::RM ? tasks[a].period
                                                     : tasks[a].rel_deadline;
        double kb = policy == SchedulingPolicy::FP   ? tasks[b].fixed_priority
                    : policy == SchedulingPolicy::RM ? tasks[b].period
                                                     : tasks[b].rel_deadline;
        if (ka != kb) return ka < kb;
        return a < b;
    });

    std::vector<TaskResponse> out(n);
    for (std::size_t rank = 0; rank < n; ++rank) {
        const TaskSpec& task = tasks[order[rank]];
        const double c = task.exec_time.constant;
        double r = c;
        for (;;) {
            double demand = c;
            for (std::size_t h = 0; h < rank; ++h) {
                const TaskSpec& hp = tasks[order[h]];
                demand += std::ceil(r / hp.period) * hp.exec_time.constant;
            }
            if (demand > task.rel_deadline) {
                out[order[rank]] = {false, demand};
                break;
            }
            if (demand == r) {
                out[order[rank]] = {true, r};
                break;
            }
            r = demand;
        }
    }
    return out;
}

}  // namespace chronosim::kernel
