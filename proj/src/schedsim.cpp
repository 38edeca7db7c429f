#include "stencildag/schedsim.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <stdexcept>

namespace stencildag {

namespace {

	using ready_queue = std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>>;

	void check_config(const sim_config& cfg) {
		if(cfg.workers < 1) throw std::invalid_argument("simulation needs at least one worker");
	}

	void finish(sim_result& res, std::size_t workers) {
		res.serial_time = res.tasks;
		res.workers = workers;
		if(res.makespan == 0) {
			res.speedup = 1.0;
			res.utilization = 1.0;
			return;
		}
		res.speedup = static_cast<double>(res.serial_time) / static_cast<double>(res.makespan);
		res.utilization = static_cast<double>(res.serial_time) / (static_cast<double>(res.workers) * static_cast<double>(res.makespan));
	}

	/// Pops up to `workers` ready tasks for one time step.
	std::vector<std::size_t> take_step(ready_queue& ready, std::size_t workers) {
		std::vector<std::size_t> step;
		while(!ready.empty() && step.size() < workers) {
			step.push_back(ready.top());
			ready.pop();
		}
		return step;
	}

	void record(sim_result& res, const std::vector<std::size_t>& step, std::size_t time, bool timeline) {
		for(std::size_t w = 0; w < step.size(); ++w) {
			if(timeline) res.timeline.push_back({step[w], w, time});
			res.completions.push_back(step[w]);
		}
	}

} // namespace

std::vector<std::vector<std::size_t>> sim_result::per_worker() const {
	std::size_t used = 0;
	for(const auto& e : timeline) used = std::max(used, e.worker + 1);
	std::vector<std::vector<std::size_t>> out(used);
	for(const auto& e : timeline) out[e.worker].push_back(e.task);
	return out;
}

sim_result simulate(const task_graph& graph, const sim_config& cfg) {
	check_config(cfg);
	const auto n = graph.size();
	const auto workers = cfg.is_unbounded() ? std::max<std::size_t>(n, 1) : cfg.workers;
	sim_result res;
	res.tasks = n;
	res.completions.reserve(n);
	if(cfg.record_timeline) res.timeline.reserve(n);

	std::vector<std::size_t> pending(n);
	ready_queue ready;
	for(std::size_t v = 0; v < n; ++v) {
		pending[v] = graph.predecessors(v).size();
		if(pending[v] == 0) ready.push(v);
	}
	std::size_t done = 0;
	std::size_t time = 0;
	while(done < n) {
		const auto step = take_step(ready, workers);
		if(step.empty()) throw std::logic_error("no ready task but graph not finished; cycle invariant violated");
		record(res, step, time, cfg.record_timeline);
		for(const auto v : step) {
			++done;
			for(const auto s : graph.successors(v)) {
				if(--pending[s] == 0) ready.push(s);
			}
		}
		++time;
	}
	res.makespan = time;
	finish(res, workers);
	return res;
}

sim_result simulate_dynamic(const nested_plan& plan, const sim_config& cfg) {
	check_config(cfg);
	const auto total = plan.total_tasks();
	const auto workers = cfg.is_unbounded() ? std::max<std::size_t>(total, 1) : cfg.workers;
	sim_result res;
	res.completions.reserve(total);
	if(cfg.record_timeline) res.timeline.reserve(total);

	dependency_tracker tracker;
	std::vector<std::size_t> pending;
	std::vector<bool> completed;
	ready_queue ready;
	const auto spawn = [&](task t) {
		const auto id = tracker.add(std::move(t));
		std::size_t open = 0;
		for(const auto p : tracker.graph().predecessors(id)) {
			if(!completed[p]) ++open;
		}
		pending.push_back(open);
		completed.push_back(false);
		if(open == 0) ready.push(id);
	};
	for(auto& t : plan.initial()) spawn(std::move(t));

	std::size_t time = 0;
	while(!ready.empty()) {
		auto step = take_step(ready, workers);
		record(res, step, time, cfg.record_timeline);
		// take_step yields ascending ids, which is the spawn serialization order
		for(const auto v : step) {
			completed[v] = true;
			for(const auto s : tracker.graph().successors(v)) {
				if(--pending[s] == 0) ready.push(s);
			}
			if(auto next = plan.continuation(tracker.graph()[v])) spawn(std::move(*next));
		}
		++time;
	}
	res.tasks = tracker.graph().size();
	if(res.tasks != total) throw std::logic_error("nested run finished with unspawned or unfinished tasks");
	res.makespan = time;
	res.realized = std::move(tracker).take();
	finish(res, workers);
	return res;
}

std::vector<sim_result> speedup_curve(const task_graph& graph, std::span<const std::size_t> workers) {
	std::vector<sim_result> out;
	for(const auto w : workers) out.push_back(simulate(graph, sim_config{w, false}));
	return out;
}

std::vector<sim_result> speedup_curve(const nested_plan& plan, std::span<const std::size_t> workers) {
	std::vector<sim_result> out;
	for(const auto w : workers) out.push_back(simulate_dynamic(plan, sim_config{w, false}));
	return out;
}

} // namespace stencildag
