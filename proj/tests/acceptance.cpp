// Acceptance suite: one PASS/FAIL line per criterion. Exit status is non-zero if any check fails.

#include "oracle.hpp"
#include "stencildag/analytics.hpp"
#include "stencildag/executor.hpp"
#include "stencildag/mdkernel.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace stencildag;
using namespace std::chrono_literals;

namespace {

struct verdict {
	bool pass = true;
	std::string detail;

	void fail(const std::string& why) {
		if(pass) detail.clear();
		pass = false;
		if(!detail.empty()) detail += "; ";
		detail += why;
	}
	void note(const std::string& what) {
		if(!pass) return;
		if(!detail.empty()) detail += "; ";
		detail += what;
	}
};

std::string fmt(double v, int digits = 4) {
	std::ostringstream os;
	os.setf(std::ios::fixed);
	os.precision(digits);
	os << v;
	return os.str();
}

std::string w_label(std::size_t w) { return w == sim_config::unbounded_workers ? "inf" : std::to_string(w); }

std::vector<std::size_t> one_to(std::size_t n) {
	std::vector<std::size_t> v(n);
	std::iota(v.begin(), v.end(), std::size_t{1});
	return v;
}

// 1 ------------------------------------------------------------------------------------------
verdict formula_agreement() {
	verdict v;
	const grid_spec grid(2, {50, 50});
	const std::size_t w = 16;
	for(std::size_t d = 1; d <= 5; ++d) {
		const auto order = order_with_displacement(2, d);
		if(displacement(order) != d) v.fail("constructed order for delta " + std::to_string(d) + " has delta " + std::to_string(displacement(order)));
		const auto g = detect_dependencies(generate_basic(grid, order));
		const analytic_model model{static_cast<std::int64_t>(d), 2500, 5};
		const auto at_w = compare(model, simulate(g, sim_config{w, false}), 0.05);
		const auto at_inf = simulate(g, sim_config::unbounded());
		const auto msg = "d" + std::to_string(d) + ": S16=" + fmt(at_w.measured) + " vs " + fmt(at_w.predicted) + " (err " + fmt(100 * at_w.relative_error, 2) + "%), Sinf=" + fmt(at_inf.speedup);
		if(!at_w.pass) v.fail(msg);
		else v.note(msg);
	}
	return v;
}

// 2 ------------------------------------------------------------------------------------------
verdict figure_presets() {
	verdict v;
	const std::array<std::tuple<const char*, std::size_t, rational>, 3> expected{{{"naive", 4, rational(5, 4)}, {"bad", 5, rational(1)}, {"opt", 1, rational(5)}}};
	for(const auto& [name, delta, smax] : expected) {
		const auto order = order_preset(name);
		const auto d = displacement(order);
		const auto s = speedup_max(static_cast<std::int64_t>(d), 5);
		const auto msg = std::string(name) + ": delta " + std::to_string(d) + ", S_max " + to_string(s);
		if(d != delta || s != smax) v.fail(msg);
		else v.note(msg);
	}
	return v;
}

// 3 ------------------------------------------------------------------------------------------
verdict bounds_3d() {
	verdict v;
	if(speedup_max(2, 14) != rational(7)) v.fail("S_max(2,14) = " + to_string(speedup_max(2, 14)));
	else v.note("S_max(2,14)=7");
	const grid_spec grid(3, {30, 10, 10});
	const auto order = order_preset("opt", 3);
	if(displacement(order) != 1) v.fail("opt order has delta " + std::to_string(displacement(order)));
	const auto g = detect_dependencies(generate_basic(grid, order));
	for(const auto w : {std::size_t{16}, std::size_t{20}, std::size_t{24}, std::size_t{32}, std::size_t{64}, sim_config::unbounded_workers}) {
		const auto s = simulate(g, sim_config{w, false}).speedup;
		const auto msg = "W=" + w_label(w) + ": " + fmt(s);
		if(s < 13.0 || s > 14.0) v.fail(msg);
		else if(w == 16 || w == sim_config::unbounded_workers) v.note(msg);
	}
	return v;
}

// 4 ------------------------------------------------------------------------------------------
verdict permutation_sweep_2d() {
	verdict v;
	const auto rows = permutation_sweep(2);
	const auto hist = delta_histogram(rows);
	const std::map<std::size_t, std::size_t> expected{{2, 6}, {3, 6}, {4, 6}, {5, 6}};
	std::set<std::string> distinct;
	bool intra_first = true;
	for(const auto& r : rows) {
		distinct.insert(r.order.describe());
		intra_first = intra_first && r.order[0].is_zero();
	}
	if(rows.size() != 24 || distinct.size() != 24) v.fail(std::to_string(rows.size()) + " rows, " + std::to_string(distinct.size()) + " distinct");
	if(!intra_first) v.fail("an order does not start with intra");
	if(hist != expected) v.fail("histogram differs");
	if(hist.begin()->first != 2 || hist.rbegin()->first != 5) v.fail("delta range differs");
	v.note("24 orders, histogram {2:6, 3:6, 4:6, 5:6}, range [2,5]");
	return v;
}

// 5-7 ----------------------------------------------------------------------------------------
template<typename Run>
verdict scaling(Run run, double factor) {
	verdict v;
	double worst = 1e9;
	std::size_t worst_w = 0;
	for(const auto w : one_to(32)) {
		const auto s = run(w);
		const auto ratio = s / static_cast<double>(w);
		if(ratio < worst) {
			worst = ratio;
			worst_w = w;
		}
		if(s < factor * static_cast<double>(w)) v.fail("W=" + std::to_string(w) + ": " + fmt(s) + " < " + fmt(factor * static_cast<double>(w)));
	}
	v.note("min S/W = " + fmt(worst) + " at W=" + std::to_string(worst_w));
	return v;
}

verdict loopex_scaling() {
	const auto g = detect_dependencies(generate_loopex(grid_spec(2, {50, 50})));
	return scaling([&](std::size_t w) { return simulate(g, sim_config{w, false}).speedup; }, 0.95);
}

verdict nested_scaling() {
	const auto plan = make_nested_plan(grid_spec(2, {50, 50}));
	return scaling([&](std::size_t w) { return simulate_dynamic(plan, sim_config{w, false}).speedup; }, 0.9);
}

verdict buffered_scaling() {
	const auto g = detect_dependencies(generate_buffered(grid_spec(2, {50, 50})));
	verdict edges;
	std::size_t compute_edges = 0;
	for(const auto& [u, w] : g.edges()) {
		if(g[u].kind != task_kind::reduce && g[w].kind != task_kind::reduce) ++compute_edges;
	}
	auto v = scaling([&](std::size_t w) { return simulate(g, sim_config{w, false}).speedup; }, 0.9);
	if(compute_edges != 0) v.fail(std::to_string(compute_edges) + " edges among compute tasks");
	else v.note("compute subgraph edge-free");
	return v;
}

// 8 ------------------------------------------------------------------------------------------
verdict example_program() {
	verdict v;
	const auto var = [](std::size_t i) { return resource_id::accumulator(cell_id{i}); };
	const auto make = [](std::size_t id, std::vector<resource_id> writes, std::vector<resource_id> reads) {
		task t;
		t.id = id;
		t.resources = std::move(writes);
		t.reads = std::move(reads);
		return t;
	};
	enum { a, b, c, d, s };
	const auto g = detect_dependencies({
	    make(0, {var(a)}, {}),
	    make(1, {var(b)}, {}),
	    make(2, {var(c)}, {}),
	    make(3, {var(c)}, {var(c), var(b)}),
	    make(4, {var(d)}, {var(a), var(b)}),
	    make(5, {var(s)}, {var(c), var(d)}),
	});
	// the drawn graph, 0-based: 1->4, 2->4, 2->5, 3->5, 4->6, 5->6
	const std::set<edge> drawn{{0, 3}, {1, 3}, {1, 4}, {2, 4}, {3, 5}, {4, 5}};
	const auto es = g.edges();
	const std::set<edge> got(es.begin(), es.end());
	std::array<std::size_t, 6> perm{0, 1, 2, 3, 4, 5};
	bool isomorphic = false;
	do {
		std::set<edge> mapped;
		for(const auto& [u, w] : got) mapped.emplace(perm[u], perm[w]);
		isomorphic = mapped == drawn;
	} while(!isomorphic && std::next_permutation(perm.begin(), perm.end()));
	std::size_t roots = 0, sinks = 0, mids = 0;
	for(std::size_t x = 0; x < g.size(); ++x) {
		if(g.predecessors(x).empty()) ++roots;
		else if(g.successors(x).empty()) ++sinks;
		else if(g.predecessors(x).size() == 2) ++mids;
	}
	if(!isomorphic) v.fail("not isomorphic to the drawn graph");
	if(roots != 3 || mids != 2 || sinks != 1) v.fail("shape roots/mids/sinks = " + std::to_string(roots) + "/" + std::to_string(mids) + "/" + std::to_string(sinks));
	if(critical_path(g) != 3) v.fail("critical path " + std::to_string(critical_path(g)));
	v.note("6 tasks, " + std::to_string(g.edge_count()) + " edges, isomorphic, critical path 3");
	return v;
}

// 9 ------------------------------------------------------------------------------------------
verdict critical_path_identity() {
	verdict v;
	std::size_t graphs = 0;
	const auto check = [&](const task_graph& g, const std::string& name) {
		++graphs;
		const auto es = g.edges();
		const auto brute = oracle::longest_path(g.size(), std::set<edge>(es.begin(), es.end()));
		const auto makespan = simulate(g, sim_config{std::max<std::size_t>(g.size(), 1), false}).makespan;
		if(makespan != brute) v.fail(name + ": makespan " + std::to_string(makespan) + " vs longest path " + std::to_string(brute));
	};
	std::mt19937_64 rng(2024);
	for(int i = 0; i < 50; ++i) {
		const auto n = 1 + rng() % 40;
		const auto resources = 1 + rng() % 12;
		task_list tasks;
		for(std::size_t t = 0; t < n; ++t) {
			task x;
			x.id = t;
			const auto touches = 1 + rng() % 3;
			for(std::size_t r = 0; r < touches; ++r) x.resources.push_back(resource_id::accumulator(cell_id{rng() % resources}));
			tasks.push_back(std::move(x));
		}
		check(detect_dependencies(tasks), "random graph " + std::to_string(i));
	}
	for(const bool periodic : {true, false}) {
		for(int ex = 1; ex <= 8; ++ex) {
			for(int ey = 1; ey <= 8; ++ey) {
				const grid_spec grid(2, {ex, ey}, periodic);
				const auto name = std::to_string(ex) + "x" + std::to_string(ey) + (periodic ? "" : " bounded");
				for(const char* p : {"naive", "bad", "opt"}) check(detect_dependencies(generate_basic(grid, order_preset(p))), name + " basic " + p);
				check(detect_dependencies(generate_loopex(grid)), name + " loopex");
				check(detect_dependencies(generate_buffered(grid)), name + " buffered");
				check(*simulate_dynamic(make_nested_plan(grid), sim_config{4, false}).realized, name + " nested");
			}
		}
	}
	v.note(std::to_string(graphs) + " graphs");
	return v;
}

// 10 -----------------------------------------------------------------------------------------
verdict oracle_invariance() {
	verdict v;
	std::size_t runs = 0;
	std::size_t mismatches = 0;
	const std::vector<grid_spec> grids{grid_spec(2, {8, 8}), grid_spec(2, {5, 3}), grid_spec(2, {8, 8}, false), grid_spec(3, {4, 4, 4})};
	for(const auto& grid : grids) {
		std::vector<stencil_order> orders;
		if(grid.dim() == 2) {
			for(const auto& r : permutation_sweep(2)) orders.push_back(r.order);
			orders.push_back(order_preset("opt"));
		} else {
			for(std::size_t d = 1; d <= 14; ++d) orders.push_back(order_with_displacement(3, d));
			orders.push_back(order_preset("naive", 3));
		}
		const auto per_cell = backward_half_stencil(grid.dim()).size();
		const std::array<std::size_t, 3> workers{1, 4, grid.cell_count() * (per_cell + 1)};
		for(std::uint64_t seed = 1; seed <= 100; ++seed) {
			const auto expected = reference_oracle(grid, seed);
			const auto sum = std::accumulate(expected.begin(), expected.end(), std::int64_t{0});
			if(sum != intra_total(grid, seed)) v.fail("inter terms do not cancel, seed " + std::to_string(seed));
			for(const auto w : workers) {
				payload_options opts;
				opts.sim = sim_config{w, true};
				const auto run = [&](strategy s) {
					++runs;
					if(execute_with_payload(s, grid, seed, opts) != expected) {
						if(++mismatches <= 5) v.fail(std::string(to_string(s)) + " seed " + std::to_string(seed) + " W " + std::to_string(w));
					}
				};
				for(const auto& o : orders) {
					opts.order = o;
					opts.chain = o;
					run(strategy::basic);
					run(strategy::nested);
				}
				opts.order.reset();
				opts.chain.reset();
				run(strategy::loopex);
				run(strategy::buffered);
			}
		}
	}
	v.note(std::to_string(runs) + " runs bit-identical, inter terms cancel");
	return v;
}

// 11 -----------------------------------------------------------------------------------------
verdict executor_sanity(std::size_t reps) {
	verdict v;
	const auto g = detect_dependencies(generate_loopex(grid_spec(2, {50, 50})));
	const std::size_t threads = 8;
	const auto slow = measure_efficiency(g, 10ms, threads, baseline::nominal, reps);
	const auto fast = measure_efficiency(g, 100ns, threads, baseline::nominal, reps);
	const auto msg = "10ms: eff " + fmt(slow.efficiency) + "; 100ns: eff " + fmt(fast.efficiency) + " (" + std::to_string(std::thread::hardware_concurrency()) + " hw threads)";
	if(!slow.contract_ok || !fast.contract_ok) v.fail("executor contract violated");
	if(slow.efficiency < 0.8) v.fail(msg + "; 10ms efficiency below 0.80");
	else if(fast.efficiency >= slow.efficiency) v.fail(msg + "; 100ns not below 10ms");
	else v.note(msg);
	return v;
}

} // namespace

int main(int argc, char** argv) {
	CLI::App app{"Acceptance checks"};
	std::vector<int> only;
	std::size_t reps = 3;
	app.add_option("--only", only, "Run just these criteria (1-11)")->delimiter(',')->check(CLI::Range(1, 11));
	app.add_option("--executor-reps", reps, "Repetitions per executor configuration")->check(CLI::PositiveNumber);
	CLI11_PARSE(app, argc, argv);

	const std::vector<std::pair<std::string, std::function<verdict()>>> criteria{
	    {"formula agreement, 2D basic vs closed form", formula_agreement},
	    {"figure order presets", figure_presets},
	    {"3D bounds", bounds_3d},
	    {"2D permutation sweep", permutation_sweep_2d},
	    {"loop-exchange scaling", loopex_scaling},
	    {"nested scaling", nested_scaling},
	    {"buffered strategy", buffered_scaling},
	    {"example program graph", example_program},
	    {"critical-path identity", critical_path_identity},
	    {"oracle invariance", oracle_invariance},
	    {"executor sanity", [reps] { return executor_sanity(reps); }},
	};

	int failed = 0;
	for(std::size_t i = 0; i < criteria.size(); ++i) {
		const int id = static_cast<int>(i) + 1;
		if(!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
		const auto begin = std::chrono::steady_clock::now();
		verdict v;
		try {
			v = criteria[i].second();
		} catch(const std::exception& e) {
			v.fail(std::string("exception: ") + e.what());
		}
		const auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - begin).count();
		std::printf("%s %2d %-45s [%6.1fs] %s\n", v.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(), secs, v.detail.c_str());
		std::fflush(stdout);
		if(!v.pass) ++failed;
	}
	std::printf("%d failed\n", failed);
	return failed == 0 ? 0 : 1;
}
