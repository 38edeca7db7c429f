#pragma once

#include "stencildag/depgraph.hpp"
#include "stencildag/mdkernel.hpp"

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace stencildag {

using std::chrono::nanoseconds;

inline constexpr nanoseconds min_task_duration{100};
inline constexpr nanoseconds max_task_duration{100'000'000};

/// Measured once per process: cost of one monotonic clock read and its observable resolution.
struct spin_calibration {
	nanoseconds clock_read_cost{0};
	nanoseconds resolution{0};
};

const spin_calibration& calibration();

/// Spins on the monotonic clock until `d` has elapsed. With `yield` the spin gives up the core
/// between clock reads, which the executor does when it runs more threads than hardware threads.
void busy_wait(nanoseconds d, bool yield = false);

struct exec_config {
	std::size_t threads = 1;
	nanoseconds task_duration{1'000'000};
	bool payload = false;
	std::uint64_t seed = 42;
	std::size_t repetitions = 3;
};

struct exec_result {
	std::size_t threads = 0;
	std::size_t tasks = 0;
	/// Median over repetitions.
	nanoseconds wall{0};
	std::vector<nanoseconds> samples;
	/// Final accumulators of the first repetition when the payload is enabled.
	std::optional<accumulators> payload;
	/// False if a later repetition produced different accumulators.
	bool payload_stable = true;

	/// Contract audit over all repetitions; all zero for a correct run.
	std::size_t exactly_once_violations = 0;
	std::size_t ordering_violations = 0;
	std::size_t exclusion_violations = 0;
	/// Spawns of dynamic runs whose parent had not finished.
	std::size_t spawn_violations = 0;

	/// Non-fatal conditions, e.g. a task duration close to the timer resolution.
	std::vector<std::string> warnings;

	bool contract_ok() const { return exactly_once_violations == 0 && ordering_violations == 0 && exclusion_violations == 0 && spawn_violations == 0; }
};

/// Runs every task of the graph on a pool of `cfg.threads` workers. A global ready queue hands out
/// tasks in ascending id order; each task body spins for `cfg.task_duration`.
exec_result execute(const task_graph& graph, const exec_config& cfg);
/// As above; `grid` is the domain the graph was generated for, required when `cfg.payload` is set.
exec_result execute(const task_graph& graph, const grid_spec& grid, const exec_config& cfg);

/// Nested variant: completions spawn continuations through the scheduler lock, which also performs
/// spawn-time dependency detection.
exec_result execute(const nested_plan& plan, const exec_config& cfg);

enum class baseline {
	/// Measured single-thread run of the same graph.
	measured,
	/// task count times the task duration.
	nominal,
};

struct sweep_point {
	nanoseconds duration{0};
	nanoseconds serial_wall{0};
	nanoseconds parallel_wall{0};
	double speedup = 0;
	/// Speedup divided by the simulator's unit-duration speedup at the same worker count.
	double efficiency = 0;
	bool contract_ok = true;
};

/// Efficiency of a `threads`-worker run of `graph` relative to `base`.
sweep_point measure_efficiency(const task_graph& graph, nanoseconds duration, std::size_t threads, baseline base = baseline::measured, std::size_t repetitions = 3);

struct duration_sweep_result {
	std::vector<sweep_point> points;
	/// Smallest duration reaching the efficiency target.
	std::optional<nanoseconds> knee;
	double target = 0.9;
};

duration_sweep_result duration_sweep(const task_graph& graph, std::span<const nanoseconds> durations, std::size_t threads, std::size_t repetitions = 3,
    double target = 0.9, baseline base = baseline::measured);

} // namespace stencildag
