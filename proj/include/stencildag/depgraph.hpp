#pragma once

#include "stencildag/taskgen.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace stencildag {

using edge = std::pair<std::size_t, std::size_t>;

/// Dependency DAG over tasks in creation (or spawn) order. Edges always point from a lower to a
/// higher task id. Immutable once built.
class task_graph {
  public:
	task_graph() = default;

	std::size_t size() const { return m_tasks.size(); }
	bool empty() const { return m_tasks.empty(); }
	const task_list& tasks() const { return m_tasks; }
	const task& operator[](std::size_t id) const { return m_tasks[id]; }
	std::span<const std::size_t> successors(std::size_t id) const { return m_successors[id]; }
	std::span<const std::size_t> predecessors(std::size_t id) const { return m_predecessors[id]; }
	std::size_t edge_count() const { return m_edge_count; }
	/// All edges sorted by (from, to).
	std::vector<edge> edges() const;

  private:
	friend class dependency_tracker;

	task_list m_tasks;
	std::vector<std::vector<std::size_t>> m_successors;
	std::vector<std::vector<std::size_t>> m_predecessors;
	std::size_t m_edge_count = 0;
};

/// Incremental last-accessor dependency detection: every task is linked to the previous accessor
/// of each resource it touches. Used directly for dynamic (spawn-time) graph construction.
///
/// Read-only inputs only wait for the last writer; the next writer then waits for all readers
/// since. With inout resources alone this is plain last-accessor chaining.
class dependency_tracker {
  public:
	/// Assigns the next dense id to `t` and records its incoming edges. Returns the id.
	std::size_t add(task t);

	const task_graph& graph() const { return m_graph; }
	task_graph take() &&;

  private:
	struct access_state {
		std::optional<std::size_t> writer;
		std::vector<std::size_t> readers;
	};

	task_graph m_graph;
	std::unordered_map<resource_id, access_state, resource_id_hash> m_access;
};

/// Static detection over a complete creation-ordered stream. Ids must be dense and ascending.
task_graph detect_dependencies(task_list tasks);

/// Completion events of a dynamic run, in the order the coordinator serialized them.
using spawn_log = std::vector<std::size_t>;

/// Rebuilds the graph a nested run realized: initial tasks first, then each logged completion
/// spawns its continuation, which is dependency-checked at spawn time. A completion of a task that
/// was never spawned, completed twice, or whose predecessors had not all completed is rejected.
task_graph detect_dependencies_dynamic(const nested_plan& plan, const spawn_log& completions);

/// Number of tasks on the longest path (unit durations); 0 for an empty graph.
std::size_t critical_path(const task_graph& graph);

struct dot_options {
	bool transitive_reduction = false;
	std::string name = "tasks";
};

std::string export_dot(const task_graph& graph, const dot_options& opts = {});

/// Edges not implied by any longer path.
std::vector<edge> transitive_reduction(const task_graph& graph);

} // namespace stencildag
