#include "stencildag/executor.hpp"

#include "stencildag/schedsim.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <functional>
#include <latch>
#include <memory>
#include <mutex>
#include <queue>
#include <stdexcept>
#include <thread>
#include <unordered_map>

namespace stencildag {

namespace {

	using steady = std::chrono::steady_clock;

	spin_calibration calibrate() {
		constexpr int reads = 20000;
		spin_calibration cal;
		auto smallest = nanoseconds::max();
		const auto begin = steady::now();
		auto prev = begin;
		for(int i = 0; i < reads; ++i) {
			const auto now = steady::now();
			if(now > prev) smallest = std::min(smallest, std::chrono::duration_cast<nanoseconds>(now - prev));
			prev = now;
		}
		cal.clock_read_cost = std::chrono::duration_cast<nanoseconds>(prev - begin) / reads;
		cal.resolution = smallest == nanoseconds::max() ? nanoseconds{1} : smallest;
		return cal;
	}

	void check_config(const exec_config& cfg) {
		if(cfg.threads < 1) throw std::invalid_argument("executor needs at least one thread");
		if(cfg.repetitions < 1) throw std::invalid_argument("executor needs at least one repetition");
		if(cfg.task_duration < min_task_duration || cfg.task_duration > max_task_duration) {
			throw std::invalid_argument("task duration must lie within [100ns, 100ms]");
		}
	}

	/// State of one repetition. Everything behind `m_mutex` is the coordinator's; task bodies run
	/// outside the lock.
	class pool_run {
	  public:
		pool_run(const task_graph* graph, const nested_plan* plan, const exec_config& cfg, payload_store* store)
		    : m_graph(graph), m_plan(plan), m_cfg(cfg), m_store(store), m_yield(cfg.threads > std::max(1u, std::thread::hardware_concurrency())) {
			if(m_graph) {
				m_total = m_graph->size();
				std::unordered_map<resource_id, std::size_t, resource_id_hash> dense;
				m_flag_index.resize(m_total);
				for(const auto& t : m_graph->tasks()) {
					for(const auto& r : t.resources) {
						const auto [it, _] = dense.try_emplace(r, dense.size());
						m_flag_index[t.id].push_back(it->second);
					}
				}
				m_flag_count = dense.size();
				m_pending.resize(m_total);
				for(std::size_t v = 0; v < m_total; ++v) {
					m_pending[v] = m_graph->predecessors(v).size();
					if(m_pending[v] == 0) m_ready.push(v);
				}
			} else {
				m_total = m_plan->total_tasks();
				m_flag_count = m_plan->grid().cell_count();
				m_flag_index.reserve(m_total);
				m_pending.reserve(m_total);
				m_completed.reserve(m_total);
				for(auto& t : m_plan->initial()) spawn(std::move(t));
			}
			m_flags = std::make_unique<std::atomic<bool>[]>(m_flag_count);
			m_runs = std::make_unique<std::atomic<std::uint32_t>[]>(m_total);
			m_start.resize(m_total);
			m_finish.resize(m_total);
			m_log.reserve(m_total);
		}

		nanoseconds run() {
			if(m_total == 0) return nanoseconds{0};
			std::latch ready_to_go(static_cast<std::ptrdiff_t>(m_cfg.threads) + 1);
			std::vector<std::jthread> workers;
			workers.reserve(m_cfg.threads);
			for(std::size_t w = 0; w < m_cfg.threads; ++w) {
				workers.emplace_back([this, &ready_to_go] {
					ready_to_go.arrive_and_wait();
					work();
				});
			}
			m_begin = steady::now();
			ready_to_go.arrive_and_wait();
			workers.clear();
			return std::chrono::duration_cast<nanoseconds>(m_end - m_begin);
		}

		void audit(exec_result& res) const {
			for(std::size_t v = 0; v < m_total; ++v) {
				if(m_runs[v].load() != 1) ++res.exactly_once_violations;
			}
			res.exclusion_violations += m_exclusion_violations.load();
			const task_graph* g = m_graph ? m_graph : &m_tracker.graph();
			for(const auto& [u, v] : g->edges()) {
				if(m_finish[u] > m_start[v]) ++res.ordering_violations;
			}
			if(m_plan) {
				// replaying the serialized completions must rebuild exactly the graph we ran
				try {
					const auto replay = detect_dependencies_dynamic(*m_plan, m_log);
					if(replay.edges() != g->edges() || replay.size() != g->size()) ++res.spawn_violations;
				} catch(const std::logic_error&) { ++res.spawn_violations; }
			}
		}

	  private:
		void spawn(task t) {
			const auto id = m_tracker.add(std::move(t));
			auto& idx = m_flag_index.emplace_back();
			for(const auto& r : m_tracker.graph()[id].resources) {
				if(!r.is_accumulator()) throw std::logic_error("nested tasks only touch accumulators");
				idx.push_back(r.cell);
			}
			std::size_t open = 0;
			for(const auto p : m_tracker.graph().predecessors(id)) {
				if(!m_completed[p]) ++open;
			}
			m_pending.push_back(open);
			m_completed.push_back(false);
			if(open == 0) m_ready.push(id);
		}

		void work() {
			for(;;) {
				std::size_t id = 0;
				task local;
				std::vector<std::size_t> local_flags;
				const task* current = nullptr;
				const std::vector<std::size_t>* flags = nullptr;
				{
					std::unique_lock lock(m_mutex);
					m_cv.wait(lock, [this] { return !m_ready.empty() || m_done == m_total; });
					if(m_ready.empty()) return;
					id = m_ready.top();
					m_ready.pop();
					if(m_graph) {
						current = &(*m_graph)[id];
						flags = &m_flag_index[id];
					} else {
						// the tracker may grow while this task runs, so take copies
						local = m_tracker.graph()[id];
						local_flags = m_flag_index[id];
						current = &local;
						flags = &local_flags;
					}
				}
				m_start[id] = steady::now();
				m_runs[id].fetch_add(1);
				for(const auto f : *flags) {
					if(m_flags[f].exchange(true)) m_exclusion_violations.fetch_add(1);
				}
				busy_wait(m_cfg.task_duration, m_yield);
				if(m_store) m_store->apply(*current);
				for(const auto f : *flags) m_flags[f].store(false);
				m_finish[id] = steady::now();
				complete(id);
			}
		}

		void complete(std::size_t id) {
			std::size_t released = 0;
			bool finished = false;
			{
				std::lock_guard lock(m_mutex);
				m_log.push_back(id);
				const auto before = m_ready.size();
				if(m_graph) {
					for(const auto s : m_graph->successors(id)) {
						if(--m_pending[s] == 0) m_ready.push(s);
					}
				} else {
					m_completed[id] = true;
					for(const auto s : m_tracker.graph().successors(id)) {
						if(--m_pending[s] == 0) m_ready.push(s);
					}
					if(auto next = m_plan->continuation(m_tracker.graph()[id])) spawn(std::move(*next));
				}
				released = m_ready.size() - before;
				if(++m_done == m_total) {
					m_end = steady::now();
					finished = true;
				}
			}
			if(finished || released > 1) {
				m_cv.notify_all();
			} else if(released == 1) {
				m_cv.notify_one();
			}
		}

		const task_graph* m_graph;
		const nested_plan* m_plan;
		const exec_config& m_cfg;
		payload_store* m_store;
		// oversubscribed spinners hand the core back so expired deadlines are noticed promptly
		bool m_yield;

		std::mutex m_mutex;
		std::condition_variable m_cv;
		std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> m_ready;
		std::vector<std::size_t> m_pending;
		std::vector<bool> m_completed;
		dependency_tracker m_tracker;
		std::vector<std::vector<std::size_t>> m_flag_index;
		spawn_log m_log;
		std::size_t m_done = 0;
		std::size_t m_total = 0;

		std::size_t m_flag_count = 0;
		std::unique_ptr<std::atomic<bool>[]> m_flags;
		std::unique_ptr<std::atomic<std::uint32_t>[]> m_runs;
		std::atomic<std::size_t> m_exclusion_violations{0};
		std::vector<steady::time_point> m_start;
		std::vector<steady::time_point> m_finish;
		steady::time_point m_begin;
		steady::time_point m_end;
	};

	exec_result run_repetitions(const task_graph* graph, const nested_plan* plan, const grid_spec* grid, const exec_config& cfg) {
		check_config(cfg);
		exec_result res;
		res.threads = cfg.threads;
		const auto& cal = calibration();
		if(cal.resolution * 10 > cfg.task_duration || cal.clock_read_cost * 10 > cfg.task_duration) {
			res.warnings.push_back("task duration " + std::to_string(cfg.task_duration.count()) + "ns is within 10x of the clock resolution ("
			                       + std::to_string(cal.resolution.count()) + "ns) or read cost (" + std::to_string(cal.clock_read_cost.count())
			                       + "ns); durations are approximate");
		}
		if(cfg.payload && !grid) throw std::invalid_argument("payload execution needs the grid the tasks were generated for");
		for(std::size_t rep = 0; rep < cfg.repetitions; ++rep) {
			std::optional<payload_store> store;
			if(cfg.payload) store.emplace(*grid, make_charges(*grid, cfg.seed));
			pool_run run(graph, plan, cfg, store ? &*store : nullptr);
			res.samples.push_back(run.run());
			run.audit(res);
			if(store) {
				auto acc = store->result();
				if(!res.payload) {
					res.payload = std::move(acc);
				} else if(*res.payload != acc) {
					res.payload_stable = false;
				}
			}
		}
		res.tasks = graph ? graph->size() : plan->total_tasks();
		auto sorted = res.samples;
		std::sort(sorted.begin(), sorted.end());
		res.wall = sorted[sorted.size() / 2];
		return res;
	}

} // namespace

const spin_calibration& calibration() {
	static const spin_calibration cal = calibrate();
	return cal;
}

void busy_wait(nanoseconds d, bool yield) {
	const auto deadline = steady::now() + d;
	while(steady::now() < deadline) {
		if(yield) std::this_thread::yield();
	}
}

exec_result execute(const task_graph& graph, const exec_config& cfg) {
	return run_repetitions(&graph, nullptr, nullptr, cfg);
}

exec_result execute(const task_graph& graph, const grid_spec& grid, const exec_config& cfg) { return run_repetitions(&graph, nullptr, &grid, cfg); }

exec_result execute(const nested_plan& plan, const exec_config& cfg) { return run_repetitions(nullptr, &plan, &plan.grid(), cfg); }

sweep_point measure_efficiency(const task_graph& graph, nanoseconds duration, std::size_t threads, baseline base, std::size_t repetitions) {
	sweep_point p;
	p.duration = duration;
	exec_config cfg;
	cfg.task_duration = duration;
	cfg.repetitions = repetitions;
	cfg.threads = threads;
	const auto parallel = execute(graph, cfg);
	p.parallel_wall = parallel.wall;
	p.contract_ok = parallel.contract_ok();
	if(base == baseline::measured) {
		cfg.threads = 1;
		const auto serial = execute(graph, cfg);
		p.serial_wall = serial.wall;
		p.contract_ok = p.contract_ok && serial.contract_ok();
	} else {
		p.serial_wall = duration * static_cast<std::int64_t>(graph.size());
	}
	const auto ideal = simulate(graph, sim_config{threads, false}).speedup;
	p.speedup = p.parallel_wall.count() > 0 ? static_cast<double>(p.serial_wall.count()) / static_cast<double>(p.parallel_wall.count()) : 1.0;
	p.efficiency = p.speedup / ideal;
	return p;
}

duration_sweep_result duration_sweep(const task_graph& graph, std::span<const nanoseconds> durations, std::size_t threads, std::size_t repetitions, double target, baseline base) {
	duration_sweep_result res;
	res.target = target;
	std::vector<nanoseconds> sorted(durations.begin(), durations.end());
	std::sort(sorted.begin(), sorted.end());
	for(const auto d : sorted) {
		res.points.push_back(measure_efficiency(graph, d, threads, base, repetitions));
		if(!res.knee && res.points.back().efficiency >= target) res.knee = d;
	}
	return res;
}

} // namespace stencildag
