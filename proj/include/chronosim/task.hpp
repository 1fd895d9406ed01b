#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chronosim/rng.hpp"

namespace chronosim::kernel {

enum class SchedulingPolicy { FP, RM, DM, EDF };

const char* to_string(SchedulingPolicy p);
SchedulingPolicy policy_from_string(const std::string& s);

// Execution-time budget of one job. Samples are strictly positive.
struct ExecTimeModel {
    enum class Kind { Constant, Uniform } kind = Kind::Constant;
    double constant = 0.0;
    double lo = 0.0;
    double hi = 0.0;

    static ExecTimeModel make_constant(double c) { return {Kind::Constant, c, 0.0, 0.0}; }
    static ExecTimeModel make_uniform(double lo, double hi) {
        return {Kind::Uniform, 0.0, lo, hi};
    }

    double sample(sim::RngStream& rng) const {
        return kind == Kind::Constant ? constant : rng.uniform(lo, hi);
    }
};

struct TaskSpec {
    std::string name;
    bool periodic = true;
    double period = 0.0;         // local-clock seconds (periodic only)
    double first_release = 0.0;  // local-clock seconds (periodic only)
    double rel_deadline = 0.0;
    ExecTimeModel exec_time;
    int fixed_priority = 0;  // lower number = higher priority, FP only
};

// Blocked is reserved: nothing in the simulator blocks jobs (no mutexes),
// but the state space is part of the job contract.
enum class JobState { Ready, Running, Blocked, Done };

struct Job {
    std::uint64_t job_id = 0;  // release order within the node
    int task_index = -1;
    double release_time = 0.0;  // nominal seconds
    double abs_deadline = 0.0;
    double remaining = 0.0;
    JobState state = JobState::Ready;
    double exec_start = 0.0;  // time execution (re)started, valid while Running
};

// Affine local clock: local_time = (1 + drift) * t + offset. Positive drift
// means the local clock runs fast, so a task with local period p releases
// every p / (1 + drift) nominal seconds. Requires drift > -1.
struct ClockModel {
    double drift = 0.0;
    double offset = 0.0;

    double local_time(double t) const { return (1.0 + drift) * t + offset; }
    double nominal_time(double local) const { return (local - offset) / (1.0 + drift); }
};

struct Battery {
    double capacity = 0.0;  // joules
    double remaining = 0.0;
    int attached_node = -1;
};

// Priority key under a scheduling policy; smaller key runs first. The task
// index breaks ties between tasks, the release order breaks ties between
// jobs of one task.
struct PriorityKey {
    double primary = 0.0;
    int task_index = 0;
    std::uint64_t release_seq = 0;

    bool operator<(const PriorityKey& o) const {
        if (primary != o.primary) return primary < o.primary;
        if (task_index != o.task_index) return task_index < o.task_index;
        return release_seq < o.release_seq;
    }
    bool operator==(const PriorityKey& o) const {
        return primary == o.primary && task_index == o.task_index &&
               release_seq == o.release_seq;
    }
};

PriorityKey effective_priority(SchedulingPolicy policy, const Job& job, const TaskSpec& task);

// Index into `ready` of the minimum-key job, or nullopt when empty (idle).
std::optional<std::size_t> pick_next(const std::vector<Job>& ready,
                                     const std::vector<TaskSpec>& tasks,
                                     SchedulingPolicy policy);

// Job factory: deadline fixed at release, budget sampled from the exec model.
Job release_job(const TaskSpec& task, int task_index, std::uint64_t job_id, double t_release,
                sim::RngStream& rng);

}  // namespace chronosim::kernel
