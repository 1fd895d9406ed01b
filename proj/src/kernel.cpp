#include "chronosim/kernel.hpp"

#include <algorithm>
#include <cmath>

#include "chronosim/errors.hpp"

namespace chronosim::kernel {

const char* to_string(TaskTraceState s) {
    switch (s) {
        case TaskTraceState::Idle: return "IDLE";
        case TaskTraceState::Ready: return "READY";
        case TaskTraceState::Running: return "RUNNING";
    }
    return "?";
}

KernelNode::KernelNode(int index, std::string name, int node_number, std::vector<TaskSpec> tasks,
                       SchedulingPolicy policy, ClockModel clock, double context_switch,
                       std::optional<double> battery_capacity, sim::EventQueue& queue,
                       std::uint64_t root_seed, NodeCallbacks callbacks)
    : index_(index),
      name_(std::move(name)),
      node_number_(node_number),
      tasks_(std::move(tasks)),
      policy_(policy),
      clock_(clock),
      context_switch_(context_switch),
      queue_(queue),
      callbacks_(std::move(callbacks)) {
    if (battery_capacity) {
        battery_ = Battery{*battery_capacity, *battery_capacity, index_};
    }
    exec_rng_.reserve(tasks_.size());
    for (const TaskSpec& t : tasks_) {
        exec_rng_.emplace_back(root_seed, name_ + ".exec." + t.name);
    }
    last_traced_.assign(tasks_.size(), TaskTraceState::Idle);
    stats_.assign(tasks_.size(), TaskStats{});
}

int KernelNode::task_index(const std::string& name) const {
    for (std::size_t i = 0; i < tasks_.size(); ++i) {
        if (tasks_[i].name == name) return static_cast<int>(i);
    }
    return -1;
}

void KernelNode::register_handler(int network_number, int task_index) {
    handlers_[network_number] = task_index;
}

void KernelNode::start() {
    for (std::size_t i = 0; i < tasks_.size(); ++i) {
        if (!tasks_[i].periodic) continue;
        // Smallest k whose nominal release time is >= 0, i.e. whose local
        // release instant has not already passed at boot.
        const TaskSpec& task = tasks_[i];
        std::uint64_t k = 0;
        if (task.first_release < clock_.offset) {
            k = static_cast<std::uint64_t>(
                std::ceil((clock_.offset - task.first_release) / task.period));
        }
        schedule_release(static_cast<int>(i), k);
    }
    if (!tasks_.empty() && callbacks_.on_sched_trace) {
        for (std::size_t i = 0; i < tasks_.size(); ++i) {
            callbacks_.on_sched_trace(static_cast<int>(i), TaskTraceState::Idle, queue_.now());
        }
    }
}

void KernelNode::schedule_release(int task_index, std::uint64_t k) {
    const TaskSpec& task = tasks_[task_index];
    double local = task.first_release + static_cast<double>(k) * task.period;
    double t = clock_.nominal_time(local);
    if (t < queue_.now()) t = queue_.now();  // guard against boot-time rounding
    queue_.schedule(t, sim::EventKind::TaskRelease, index_,
                    [this, task_index, k](const sim::SimEvent& ev) {
                        on_release(task_index, k, ev.fire_time);
                    });
}

void KernelNode::on_release(int task_index, std::uint64_t k, double t) {
    if (!powered_) return;  // depleted node: future releases are suppressed
    schedule_release(task_index, k + 1);
    release_now(task_index, t);
}

void KernelNode::release_now(int task_index, double t) {
    if (!powered_) return;
    Job job = release_job(tasks_[task_index], task_index, next_job_id_++, t,
                          exec_rng_[task_index]);
    jobs_.push_back(LiveJob{job, 0});
    ++stats_[task_index].released;
    emit_task_state(task_index, t);
    dispatch(t);
}

KernelNode::LiveJob* KernelNode::running_job() {
    if (!running_) return nullptr;
    for (LiveJob& lj : jobs_) {
        if (lj.job.job_id == *running_) return &lj;
    }
    return nullptr;
}

void KernelNode::dispatch(double t) {
    // A same-instant event ranked ahead of the running job's ExecDone can
    // reach the scheduler after the job has in fact used up its budget;
    // settle that completion first so response times stay exact.
    if (LiveJob* run = running_job()) {
        double consumed = std::max(0.0, t - run->job.exec_start);
        if (consumed >= run->job.remaining) {
            queue_.cancel(run->exec_event);
            std::size_t slot = static_cast<std::size_t>(run - jobs_.data());
            running_.reset();
            complete_job(slot, t);
            dispatch(t);
            return;
        }
    }

    std::optional<std::size_t> best;
    PriorityKey best_key;
    for (std::size_t i = 0; i < jobs_.size(); ++i) {
        PriorityKey key = effective_priority(policy_, jobs_[i].job, tasks_[jobs_[i].job.task_index]);
        if (!best || key < best_key) {
            best = i;
            best_key = key;
        }
    }
    if (!best) return;

    LiveJob& next = jobs_[*best];
    if (running_ && next.job.job_id == *running_) return;

    if (LiveJob* run = running_job()) {
        double consumed = std::max(0.0, t - run->job.exec_start);
        run->job.remaining -= consumed;
        queue_.cancel(run->exec_event);
        run->job.state = JobState::Ready;
        running_.reset();
        emit_task_state(run->job.task_index, t);
    }

    next.job.state = JobState::Running;
    next.job.exec_start = t + context_switch_;
    next.exec_event =
        queue_.schedule(t + context_switch_ + next.job.remaining, sim::EventKind::ExecDone,
                        index_, [this](const sim::SimEvent& ev) { on_exec_done(ev.fire_time); });
    running_ = next.job.job_id;
    emit_task_state(next.job.task_index, t);
}

void KernelNode::on_exec_done(double t) {
    LiveJob* run = running_job();
    if (!run) return;
    std::size_t slot = static_cast<std::size_t>(run - jobs_.data());
    running_.reset();
    complete_job(slot, t);
    dispatch(t);
}

void KernelNode::complete_job(std::size_t slot, double t) {
    Job job = jobs_[slot].job;
    jobs_.erase(jobs_.begin() + static_cast<std::ptrdiff_t>(slot));
    job.state = JobState::Done;
    job.remaining = 0.0;

    TaskStats& st = stats_[job.task_index];
    ++st.completed;
    st.max_response = std::max(st.max_response, t - job.release_time);
    if (t > job.abs_deadline) {
        ++st.deadline_misses;
        if (callbacks_.on_event) {
            callbacks_.on_event("deadline_miss",
                                name_ + "." + tasks_[job.task_index].name +
                                    " completed " + std::to_string(t - job.abs_deadline) +
                                    "s late",
                                t);
        }
    }
    emit_task_state(job.task_index, t);
    if (callbacks_.on_job_complete) callbacks_.on_job_complete(job.task_index, job, t);
}

void KernelNode::deliver(int network_number, const Message& msg, double t) {
    if (!powered_) {
        if (callbacks_.on_event) {
            callbacks_.on_event("drop_node_off", name_ + " received frame while powered off", t);
        }
        return;
    }
    inbox_.push_back(msg);
    auto it = handlers_.find(network_number);
    if (it == handlers_.end()) {
        if (callbacks_.on_event) {
            callbacks_.on_event("no_handler",
                                name_ + " has no handler for network " +
                                    std::to_string(network_number),
                                t);
        }
        return;
    }
    release_now(it->second, t);
}

std::optional<Message> KernelNode::pop_message() {
    if (inbox_.empty()) return std::nullopt;
    Message m = inbox_.front();
    inbox_.pop_front();
    return m;
}

void KernelNode::consume_energy(double joules, double t) {
    if (!battery_) return;
    double drawn = std::min(joules, battery_->remaining);
    battery_->remaining -= drawn;
    energy_consumed_ += drawn;
    if (callbacks_.on_energy) callbacks_.on_energy(battery_->remaining, t);
    if (battery_->remaining <= 0.0 && powered_) {
        queue_.schedule(t, sim::EventKind::BatteryDepleted, index_,
                        [this](const sim::SimEvent& ev) { power_off(ev.fire_time); });
    }
}

void KernelNode::power_off(double t) {
    if (!powered_) return;
    powered_ = false;
    if (LiveJob* run = running_job()) {
        queue_.cancel(run->exec_event);
    }
    running_.reset();
    std::vector<int> affected;
    for (const LiveJob& lj : jobs_) affected.push_back(lj.job.task_index);
    jobs_.clear();
    for (int ti : affected) emit_task_state(ti, t);
    if (callbacks_.on_event) {
        callbacks_.on_event("battery_depleted", name_ + " switched off, jobs aborted", t);
    }
    if (callbacks_.on_power_off) callbacks_.on_power_off(t);
}

void KernelNode::emit_task_state(int task_index, double t) {
    if (!callbacks_.on_sched_trace) return;
    TaskTraceState state = TaskTraceState::Idle;
    for (const LiveJob& lj : jobs_) {
        if (lj.job.task_index != task_index) continue;
        if (lj.job.state == JobState::Running) {
            state = TaskTraceState::Running;
            break;
        }
        state = TaskTraceState::Ready;
    }
    if (state == last_traced_[task_index]) return;
    last_traced_[task_index] = state;
    callbacks_.on_sched_trace(task_index, state, t);
}

void KernelNode::account_unfinished(double t_end) {
    for (const LiveJob& lj : jobs_) {
        if (lj.job.abs_deadline <= t_end) {
            ++stats_[lj.job.task_index].deadline_misses;
        }
    }
}

}  // namespace chronosim::kernel
