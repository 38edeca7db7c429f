#include "stencildag/depgraph.hpp"

#include <algorithm>
#include <cstdint>
#include <sstream>
#include <stdexcept>

namespace stencildag {

std::vector<edge> task_graph::edges() const {
	std::vector<edge> out;
	out.reserve(m_edge_count);
	for(std::size_t u = 0; u < m_successors.size(); ++u) {
		for(const auto v : m_successors[u]) out.emplace_back(u, v);
	}
	std::sort(out.begin(), out.end());
	return out;
}

std::size_t dependency_tracker::add(task t) {
	const auto id = m_graph.m_tasks.size();
	t.id = id;
	auto& preds = m_graph.m_predecessors.emplace_back();
	m_graph.m_successors.emplace_back();
	const auto link = [&](std::size_t prev) {
		if(prev == id || std::find(preds.begin(), preds.end(), prev) != preds.end()) return;
		preds.push_back(prev);
		m_graph.m_successors[prev].push_back(id);
		++m_graph.m_edge_count;
	};
	for(const auto& r : t.reads) {
		// a read of something this task also writes is covered by the write
		if(std::find(t.resources.begin(), t.resources.end(), r) != t.resources.end()) continue;
		auto& st = m_access[r];
		if(st.writer) link(*st.writer);
		st.readers.push_back(id);
	}
	for(const auto& r : t.resources) {
		auto& st = m_access[r];
		if(st.readers.empty()) {
			if(st.writer) link(*st.writer);
		} else {
			for(const auto reader : st.readers) link(reader);
			st.readers.clear();
		}
		st.writer = id;
	}
	std::sort(preds.begin(), preds.end());
	m_graph.m_tasks.push_back(std::move(t));
	return id;
}

task_graph dependency_tracker::take() && { return std::move(m_graph); }

task_graph detect_dependencies(task_list tasks) {
	dependency_tracker tracker;
	for(std::size_t i = 0; i < tasks.size(); ++i) {
		if(tasks[i].id != i) throw std::invalid_argument("task ids must be dense and in creation order (task at position " + std::to_string(i) + " has id " + std::to_string(tasks[i].id) + ")");
		tracker.add(std::move(tasks[i]));
	}
	return std::move(tracker).take();
}

task_graph detect_dependencies_dynamic(const nested_plan& plan, const spawn_log& completions) {
	dependency_tracker tracker;
	for(auto& t : plan.initial()) tracker.add(std::move(t));
	std::vector<bool> completed(tracker.graph().size(), false);
	for(const auto id : completions) {
		const auto& g = tracker.graph();
		if(id >= g.size()) throw std::logic_error("completion of task " + std::to_string(id) + " which was never spawned");
		if(completed[id]) throw std::logic_error("task " + std::to_string(id) + " completed twice");
		for(const auto p : g.predecessors(id)) {
			if(!completed[p]) throw std::logic_error("task " + std::to_string(id) + " completed before its predecessor " + std::to_string(p));
		}
		completed[id] = true;
		if(auto next = plan.continuation(g[id])) {
			tracker.add(std::move(*next));
			completed.push_back(false);
		}
	}
	return std::move(tracker).take();
}

std::size_t critical_path(const task_graph& graph) {
	std::vector<std::size_t> depth(graph.size(), 1);
	std::size_t longest = 0;
	// edges point from lower to higher ids, so id order is a topological order
	for(std::size_t v = 0; v < graph.size(); ++v) {
		for(const auto p : graph.predecessors(v)) {
			if(p >= v) throw std::logic_error("task graph contains a backward edge; cycle invariant violated");
			depth[v] = std::max(depth[v], depth[p] + 1);
		}
		longest = std::max(longest, depth[v]);
	}
	return longest;
}

std::vector<edge> transitive_reduction(const task_graph& graph) {
	std::vector<edge> kept;
	std::vector<std::size_t> mark(graph.size(), SIZE_MAX);
	std::vector<std::size_t> stack;
	for(std::size_t u = 0; u < graph.size(); ++u) {
		// successors reachable through another successor are redundant
		auto succ = std::vector<std::size_t>(graph.successors(u).begin(), graph.successors(u).end());
		std::sort(succ.begin(), succ.end());
		for(const auto s : succ) {
			for(const auto t : graph.successors(s)) {
				if(mark[t] != u) {
					mark[t] = u;
					stack.push_back(t);
				}
			}
		}
		while(!stack.empty()) {
			const auto x = stack.back();
			stack.pop_back();
			for(const auto t : graph.successors(x)) {
				if(mark[t] != u) {
					mark[t] = u;
					stack.push_back(t);
				}
			}
		}
		for(const auto s : succ) {
			if(mark[s] != u) kept.emplace_back(u, s);
		}
	}
	return kept;
}

std::string export_dot(const task_graph& graph, const dot_options& opts) {
	std::ostringstream os;
	os << "digraph " << opts.name << " {\n";
	os << "  node [shape=circle];\n";
	for(const auto& t : graph.tasks()) {
		os << "  t" << t.id << " [label=\"" << t.id << "\\n" << to_string(t.kind) << "\\ncell " << t.home.index;
		if(t.kind == task_kind::inter) os << " " << to_string(t.off, 3);
		os << "\"";
		switch(t.kind) {
		case task_kind::intra: os << ", style=filled, fillcolor=palegreen"; break;
		case task_kind::inter: os << ", style=filled, fillcolor=lightyellow"; break;
		case task_kind::reduce: os << ", style=filled, fillcolor=lightpink"; break;
		}
		os << "];\n";
	}
	const auto es = opts.transitive_reduction ? transitive_reduction(graph) : graph.edges();
	for(const auto& [u, v] : es) os << "  t" << u << " -> t" << v << ";\n";
	os << "}\n";
	return os.str();
}

} // namespace stencildag
