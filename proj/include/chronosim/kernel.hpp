#pragma once

#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chronosim/event_queue.hpp"
#include "chronosim/rng.hpp"
#include "chronosim/task.hpp"

namespace chronosim::kernel {

// Payload delivered to a node's receive buffer.
struct Message {
    double value = 0.0;
    int src_node = -1;
    int network_number = -1;
    double sent_time = 0.0;     // when the sender handed it to the network
    double deliver_time = 0.0;  // when it reached this node
};

// Per-task schedule line states, matching the schedule trace schema.
enum class TaskTraceState { Idle, Ready, Running };

const char* to_string(TaskTraceState s);

struct NodeCallbacks {
    // Invoked when a job finishes; the world runs the task's action here
    // (sampling, control computation, sends, actuation).
    std::function<void(int task_index, const Job& job, double t)> on_job_complete;
    // Schedule trace row: emitted only on task state changes.
    std::function<void(int task_index, TaskTraceState state, double t)> on_sched_trace;
    // Event trace row (drops, deadline misses, battery depletion, ...).
    std::function<void(const std::string& kind, const std::string& detail, double t)> on_event;
    // Energy trace row after each battery draw.
    std::function<void(double remaining_joules, double t)> on_energy;
    // Battery depletion: the world detaches the node from its networks here.
    std::function<void(double t)> on_power_off;
};

struct TaskStats {
    std::uint64_t released = 0;
    std::uint64_t completed = 0;
    std::uint64_t deadline_misses = 0;
    double max_response = 0.0;
};

// Simulated real-time kernel node: periodic and message-triggered tasks,
// preemptive FP/RM/DM/EDF dispatching with switch-in overhead, an affine
// local clock driving releases, an unbounded FIFO receive buffer, and an
// optional battery that powers the node off at depletion.
//
// Releases of periodic tasks fire when the *local* clock reaches
// first_release + k*period; the corresponding nominal times are obtained by
// inverting the affine clock map. Execution budgets and deadlines are
// nominal seconds. The switch-in overhead is charged once per dispatch of a
// different job than the one previously running; it delays the incoming
// job's start without consuming its budget.
class KernelNode {
public:
    KernelNode(int index, std::string name, int node_number, std::vector<TaskSpec> tasks,
               SchedulingPolicy policy, ClockModel clock, double context_switch,
               std::optional<double> battery_capacity, sim::EventQueue& queue,
               std::uint64_t root_seed, NodeCallbacks callbacks);

    // Schedules the first release of every periodic task. Releases whose
    // nominal time would be negative are skipped.
    void start();

    // Message arrival: queues the payload and releases the handler task
    // registered for the network, if any. Deliveries to a powered-off node
    // are dropped with an event trace record.
    void deliver(int network_number, const Message& msg, double t);

    // Pops the oldest queued message (actions consume their trigger here).
    std::optional<Message> pop_message();

    void register_handler(int network_number, int task_index);

    // Drains the battery, flooring at zero; at zero the node powers off:
    // live jobs are aborted, future releases are suppressed, and sends and
    // receives are disabled.
    void consume_energy(double joules, double t);

    bool powered() const { return powered_; }
    int index() const { return index_; }
    const std::string& name() const { return name_; }
    int node_number() const { return node_number_; }
    const std::vector<TaskSpec>& tasks() const { return tasks_; }
    SchedulingPolicy policy() const { return policy_; }
    const ClockModel& clock() const { return clock_; }
    const std::optional<Battery>& battery() const { return battery_; }
    const std::vector<TaskStats>& stats() const { return stats_; }
    double energy_consumed() const { return energy_consumed_; }

    int task_index(const std::string& name) const;  // -1 if absent

    // Releases a job of a task right now (used for message handlers and by
    // tests driving the kernel directly).
    void release_now(int task_index, double t);

    // Deadline misses of jobs still unfinished when the run stops.
    void account_unfinished(double t_end);

private:
    struct LiveJob {
        Job job;
        sim::EventId exec_event = 0;
    };

    void schedule_release(int task_index, std::uint64_t k);
    void on_release(int task_index, std::uint64_t k, double t);
    void on_exec_done(double t);
    void dispatch(double t);
    void complete_job(std::size_t slot, double t);
    void power_off(double t);
    void emit_task_state(int task_index, double t);
    LiveJob* running_job();

    int index_;
    std::string name_;
    int node_number_;
    std::vector<TaskSpec> tasks_;
    SchedulingPolicy policy_;
    ClockModel clock_;
    double context_switch_;
    std::optional<Battery> battery_;
    sim::EventQueue& queue_;
    NodeCallbacks callbacks_;

    std::vector<sim::RngStream> exec_rng_;
    std::vector<LiveJob> jobs_;
    std::optional<std::uint64_t> running_;  // job_id
    std::uint64_t next_job_id_ = 1;
    std::map<int, int> handlers_;  // network_number -> task index
    std::deque<Message> inbox_;
    std::vector<TaskTraceState> last_traced_;
    std::vector<TaskStats> stats_;
    bool powered_ = true;
    double energy_consumed_ = 0.0;
};

}  // namespace chronosim::kernel
