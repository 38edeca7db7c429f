#pragma once

#include "stencildag/depgraph.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace stencildag {

struct sim_config {
	/// Worker count; `unbounded` stands for as many workers as there are tasks.
	std::size_t workers = 1;
	bool record_timeline = true;

	static constexpr std::size_t unbounded_workers = SIZE_MAX;
	static sim_config unbounded() { return sim_config{unbounded_workers}; }
	bool is_unbounded() const { return workers == unbounded_workers; }
};

struct schedule_entry {
	std::size_t task = 0;
	std::size_t worker = 0;
	std::size_t start = 0;

	friend bool operator==(const schedule_entry&, const schedule_entry&) = default;
};

struct sim_result {
	/// Effective worker count (the task count for unbounded runs).
	std::size_t workers = 0;
	std::size_t tasks = 0;
	std::size_t makespan = 0;
	std::size_t serial_time = 0;
	double speedup = 1.0;
	double utilization = 1.0;
	/// Ordered by start time, then worker.
	std::vector<schedule_entry> timeline;
	/// Completion order (start time, then ascending id); the spawn log of dynamic runs.
	spawn_log completions;
	/// The graph built at spawn time (dynamic runs only).
	std::optional<task_graph> realized;

	std::vector<std::vector<std::size_t>> per_worker() const;
};

/// Greedy list scheduling with unit durations: each step assigns ready tasks to idle workers in
/// ascending id order.
sim_result simulate(const task_graph& graph, const sim_config& cfg);

/// As `simulate`, but completions (processed in ascending id at equal time) spawn continuations,
/// which are dependency-checked at spawn time.
sim_result simulate_dynamic(const nested_plan& plan, const sim_config& cfg);

std::vector<sim_result> speedup_curve(const task_graph& graph, std::span<const std::size_t> workers);
std::vector<sim_result> speedup_curve(const nested_plan& plan, std::span<const std::size_t> workers);

} // namespace stencildag
