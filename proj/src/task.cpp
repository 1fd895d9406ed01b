#include "chronosim/task.hpp"

#include "chronosim/errors.hpp"

namespace chronosim::kernel {

const char* to_string(SchedulingPolicy p) {
    switch (p) {
        case SchedulingPolicy::FP: return "fp";
        case SchedulingPolicy::RM: return "rm";
        case SchedulingPolicy::DM: return "dm";
        case SchedulingPolicy::EDF: return "edf";
    }
    return "?";
}

SchedulingPolicy policy_from_string(const std::string& s) {
    if (s == "fp") return SchedulingPolicy::FP;
    if (s == "rm") return SchedulingPolicy::RM;
    if (s == "dm") return SchedulingPolicy::DM;
    if (s == "edf") return SchedulingPolicy::EDF;
    throw ValidationError("BadParameter", "unknown scheduling policy '" + s + "'");
}

PriorityKey effective_priority(SchedulingPolicy policy, const Job& job, const TaskSpec& task) {
    PriorityKey key;
    key.task_index = job.task_index;
    key.release_seq = job.job_id;
    switch (policy) {
        case SchedulingPolicy::FP: key.primary = task.fixed_priority; break;
        case SchedulingPolicy::RM: key.primary = task.period; break;
        case SchedulingPolicy::DM: key.primary = task.rel_deadline; break;
        case SchedulingPolicy::EDF: key.primary = job.abs_deadline; break;
    }
    return key;
}

std::optional<std::size_t> pick_next(const std::vector<Job>& ready,
                                     const std::vector<TaskSpec>& tasks,
                                     SchedulingPolicy policy) {
    std::optional<std::size_t> best;
    PriorityKey best_key;
    for (std::size_t i = 0; i < ready.size(); ++i) {
        PriorityKey key = effective_priority(policy, ready[i], tasks[ready[i].task_index]);
        if (!best || key < best_key) {
            best = i;
            best_key = key;
        }
    }
    return best;
}

Job release_job(const TaskSpec& task, int task_index, std::uint64_t job_id, double t_release,
                sim::RngStream& rng) {
    Job job;
    job.job_id = job_id;
    job.task_index = task_index;
    job.release_time = t_release;
    job.abs_deadline = t_release + task.rel_deadline;
    job.remaining = task.exec_time.sample(rng);
    job.state = JobState::Ready;
    return job;
}

}  // namespace chronosim::kernel
