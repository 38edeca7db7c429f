#include "stencildag/cli.hpp"

#include "stencildag/analytics.hpp"
#include "stencildag/depgraph.hpp"
#include "stencildag/mdkernel.hpp"
#include "stencildag/taskgen.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace stencildag::cli {

namespace {

	std::string trim(std::string_view s) {
		while(!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
		while(!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
		return std::string(s);
	}

	std::vector<std::string> split(std::string_view s, char sep) {
		std::vector<std::string> parts;
		std::size_t pos = 0;
		while(true) {
			const auto next = s.find(sep, pos);
			parts.push_back(trim(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos)));
			if(next == std::string_view::npos) break;
			pos = next + 1;
		}
		return parts;
	}

	std::size_t parse_size(std::string_view s) {
		std::size_t v = 0;
		const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
		if(ec != std::errc{} || ptr != s.data() + s.size()) throw std::invalid_argument("not a non-negative integer: '" + std::string(s) + "'");
		return v;
	}

	std::string quote(const std::string& field) {
		if(field.find_first_of(",\"\n") == std::string::npos) return field;
		std::string q = "\"";
		for(const auto c : field) {
			if(c == '"') q += '"';
			q += c;
		}
		return q + "\"";
	}

	std::string fixed(double v, int digits = 6) {
		std::ostringstream os;
		os << std::fixed << std::setprecision(digits) << v;
		return os.str();
	}

	std::string workers_label(std::size_t w) { return w == sim_config::unbounded_workers ? "inf" : std::to_string(w); }

	/// Output sink: an explicit path, "-" for stdout, or a default file under $STENCILDAG_OUT_DIR.
	class output {
	  public:
		output(const std::string& path, const std::string& default_name, std::ostream& fallback) {
			std::filesystem::path target;
			if(path == "-") {
				m_stream = &fallback;
				return;
			}
			if(!path.empty()) {
				target = path;
			} else if(const char* dir = std::getenv(out_dir_env); dir && *dir) {
				target = std::filesystem::path(dir) / default_name;
			} else {
				m_stream = &fallback;
				return;
			}
			if(target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
			m_file = std::make_unique<std::ofstream>(target);
			if(!*m_file) throw std::runtime_error("cannot open output file " + target.string());
			m_path = target.string();
			m_stream = m_file.get();
		}

		std::ostream& stream() { return *m_stream; }
		const std::string& path() const { return m_path; }

	  private:
		std::unique_ptr<std::ofstream> m_file;
		std::ostream* m_stream = nullptr;
		std::string m_path;
	};

	std::filesystem::path output_dir(const std::string& explicit_dir) {
		if(!explicit_dir.empty()) return explicit_dir;
		if(const char* dir = std::getenv(out_dir_env); dir && *dir) return dir;
		return ".";
	}

	struct domain_options {
		int dim = 2;
		std::string extents;
		std::string default_2d = "50,50";
		std::string default_3d = "30,10,10";
		bool non_periodic = false;

		void add_to(CLI::App* cmd) {
			cmd->add_option("--dim", dim, "Spatial dimension (2 or 3)")->check(CLI::IsMember({2, 3}));
			cmd->add_option("--extents", extents, "Cells per axis (default " + default_2d + " in 2D, " + default_3d + " in 3D)");
			cmd->add_flag("--non-periodic", non_periodic, "Bounded domain instead of periodic wrap");
		}

		grid_spec grid() const { return grid_spec(dim, parse_extents(extents.empty() ? (dim == 3 ? default_3d : default_2d) : extents), !non_periodic); }
	};

	struct order_options {
		std::string order;
		std::size_t delta = 0;

		void add_to(CLI::App* cmd) {
			cmd->add_option("--order", order, "Per-cell order: naive|bad|opt or a permutation of backward stencil indices, e.g. 0,3,1,2,4");
			cmd->add_option("--delta", delta, "Build an order with this displacement (+x position)");
		}

		stencil_order resolve(int dim) const {
			if(!order.empty() && delta != 0) throw std::invalid_argument("--order and --delta are mutually exclusive");
			if(delta != 0) return order_with_displacement(dim, delta);
			if(order.empty()) return stencil_order::identity(backward_half_stencil(dim));
			if(order == "naive" || order == "bad" || order == "opt") return order_preset(order, dim);
			std::vector<std::size_t> perm;
			for(const auto& p : split(order, ',')) perm.push_back(parse_size(p));
			return stencil_order(backward_half_stencil(dim), std::move(perm));
		}

		std::string label() const {
			if(!order.empty()) return order;
			if(delta != 0) return "delta" + std::to_string(delta);
			return "naive";
		}
	};

	void warn_grid(const grid_spec& grid, std::ostream& err) {
		for(const auto& w : grid.warnings()) err << "warning: " << w << "\n";
	}

	/// Static graph for basic/loopex/buffered.
	task_graph build_graph(strategy s, const grid_spec& grid, const stencil_order& order) {
		switch(s) {
		case strategy::basic: return detect_dependencies(generate_basic(grid, order));
		case strategy::loopex: return detect_dependencies(generate_loopex(grid));
		case strategy::buffered: return detect_dependencies(generate_buffered(grid));
		case strategy::nested: break;
		}
		throw std::invalid_argument("nested strategy has no static graph");
	}

	csv_row base_row(strategy s, const grid_spec& grid, const std::optional<stencil_order>& order, const std::string& order_label) {
		csv_row row;
		row.strategy = std::string(to_string(s));
		row.dim = grid.dim();
		row.extents = grid.extents();
		if(s == strategy::basic && order) {
			row.order = order_label;
			row.delta = std::to_string(displacement(*order));
		} else if(s == strategy::nested && order) {
			row.order = order_label;
		}
		return row;
	}

	std::vector<csv_row> simulate_rows(strategy s, const grid_spec& grid, const stencil_order& order, const std::string& order_label, const std::vector<std::size_t>& workers) {
		std::vector<sim_result> results;
		if(s == strategy::nested) {
			results = speedup_curve(make_nested_plan(grid, order), workers);
		} else {
			results = speedup_curve(build_graph(s, grid, order), workers);
		}
		std::vector<csv_row> rows;
		for(std::size_t i = 0; i < results.size(); ++i) {
			auto row = base_row(s, grid, s == strategy::basic || s == strategy::nested ? std::optional(order) : std::nullopt, order_label);
			row.workers = workers_label(workers[i]);
			row.tasks = results[i].tasks;
			row.makespan = std::to_string(results[i].makespan);
			row.speedup = results[i].speedup;
			row.utilization = results[i].utilization;
			rows.push_back(std::move(row));
		}
		return rows;
	}

	void write_rows(std::ostream& os, const std::vector<csv_row>& rows, bool header = true) {
		if(header) os << csv_header << "\n";
		for(const auto& r : rows) os << format_csv_row(r) << "\n";
	}

	// ---------------------------------------------------------------- predict

	int cmd_predict(std::int64_t delta, std::int64_t n, const std::string& k_text, bool pipeline, std::ostream& out) {
		const auto print = [&](const rational& r) {
			out << to_string(r);
			if(r.denominator() != 1) out << " (" << fixed(to_double(r)) << ")";
			out << "\n";
		};
		if(k_text == "inf") {
			if(pipeline) {
				out << n << "\n";
				return exit_ok;
			}
			print(speedup_max(delta, n));
			return exit_ok;
		}
		const auto k = static_cast<std::int64_t>(parse_size(k_text));
		print(pipeline ? speedup_pipeline(n, k) : speedup_stencil(analytic_model{delta, k, n}));
		return exit_ok;
	}

	// ---------------------------------------------------------------- sweep

	int cmd_sweep(int dim, std::size_t samples, std::uint64_t seed, const std::string& path, std::ostream& out, std::ostream& err) {
		const auto rows = permutation_sweep(dim, samples, seed);
		output sink(path, "sweep.csv", out);
		auto& os = sink.stream();
		os << "order,delta,s_max,s_max_decimal\n";
		for(const auto& r : rows) {
			os << quote(r.order.describe()) << "," << r.delta << "," << to_string(r.s_max) << "," << fixed(to_double(r.s_max)) << "\n";
		}
		err << "delta histogram:";
		for(const auto& [d, count] : delta_histogram(rows)) err << " " << d << ":" << count;
		err << "\n";
		return exit_ok;
	}

	// ---------------------------------------------------------------- dag

	int cmd_dag(strategy s, const grid_spec& grid, const stencil_order& order, const std::string& workers_text, bool reduce, const std::string& path, std::ostream& out, std::ostream& err) {
		task_graph graph;
		if(s == strategy::nested) {
			const auto workers = parse_worker_list(workers_text);
			if(workers.size() != 1) throw std::invalid_argument("dag for the nested strategy needs exactly one worker count");
			auto res = simulate_dynamic(make_nested_plan(grid, order), sim_config{workers.front()});
			graph = std::move(*res.realized);
		} else {
			graph = build_graph(s, grid, order);
		}
		output sink(path, "dag.dot", out);
		sink.stream() << export_dot(graph, dot_options{reduce, "stencildag"});
		err << "tasks " << graph.size() << ", edges " << graph.edge_count() << ", critical path " << critical_path(graph) << "\n";
		return exit_ok;
	}

	// ---------------------------------------------------------------- simulate

	int cmd_simulate(strategy s, const grid_spec& grid, const order_options& ord, const std::string& workers_text, const std::string& path, std::ostream& out, std::ostream& err) {
		const auto order = ord.resolve(grid.dim());
		const auto rows = simulate_rows(s, grid, order, ord.label(), parse_worker_list(workers_text));
		output sink(path, "simulate.csv", out);
		write_rows(sink.stream(), rows);
		if(s == strategy::basic) {
			const analytic_model model{static_cast<std::int64_t>(displacement(order)), static_cast<std::int64_t>(grid.cell_count()), static_cast<std::int64_t>(order.size())};
			err << "model speedup (unbounded workers): " << fixed(to_double(speedup_stencil(model)), 4) << ", limit " << to_string(speedup_max(model.delta, model.n)) << "\n";
		}
		return exit_ok;
	}

	// ---------------------------------------------------------------- execute

	struct exec_options {
		std::string threads = "1,2,4";
		std::string duration = "1ms";
		std::size_t reps = 3;
		bool payload = false;
		std::uint64_t seed = 42;
	};

	exec_result run_exec(strategy s, const grid_spec& grid, const stencil_order& order, const task_graph* graph, const exec_config& cfg) {
		if(s == strategy::nested) return execute(make_nested_plan(grid, order), cfg);
		return execute(*graph, grid, cfg);
	}

	double ideal_speedup(strategy s, const grid_spec& grid, const stencil_order& order, const task_graph* graph, std::size_t threads) {
		if(s == strategy::nested) return simulate_dynamic(make_nested_plan(grid, order), sim_config{threads, false}).speedup;
		return simulate(*graph, sim_config{threads, false}).speedup;
	}

	int cmd_execute(strategy s, const grid_spec& grid, const order_options& ord, const exec_options& eo, const std::string& path, std::ostream& out, std::ostream& err) {
		const auto order = ord.resolve(grid.dim());
		std::optional<task_graph> graph;
		if(s != strategy::nested) graph = build_graph(s, grid, order);
		const auto* g = graph ? &*graph : nullptr;

		exec_config cfg;
		cfg.task_duration = parse_duration(eo.duration);
		cfg.repetitions = eo.reps;
		cfg.payload = eo.payload;
		cfg.seed = eo.seed;
		cfg.threads = 1;
		const auto serial = run_exec(s, grid, order, g, cfg);
		for(const auto& w : serial.warnings) err << "warning: " << w << "\n";

		const auto oracle = eo.payload ? std::optional(reference_oracle(grid, eo.seed)) : std::nullopt;
		bool ok = true;
		const auto audit = [&](const exec_result& r) {
			if(!r.contract_ok()) {
				err << "error: executor contract violated at " << r.threads << " threads (exactly-once " << r.exactly_once_violations << ", ordering " << r.ordering_violations
				    << ", exclusion " << r.exclusion_violations << ", spawn " << r.spawn_violations << ")\n";
				ok = false;
			}
			if(oracle && (!r.payload || *r.payload != *oracle || !r.payload_stable)) {
				err << "error: payload result at " << r.threads << " threads differs from the reference oracle\n";
				ok = false;
			}
		};
		audit(serial);

		std::vector<csv_row> rows;
		for(const auto threads : parse_worker_list(eo.threads)) {
			if(threads == sim_config::unbounded_workers) throw std::invalid_argument("execute needs finite thread counts");
			cfg.threads = threads;
			const auto res = threads == 1 ? serial : run_exec(s, grid, order, g, cfg);
			audit(res);
			auto row = base_row(s, grid, s == strategy::basic || s == strategy::nested ? std::optional(order) : std::nullopt, ord.label());
			row.kind = "exec";
			row.workers = std::to_string(threads);
			row.tasks = res.tasks;
			row.makespan = std::to_string(res.wall.count());
			row.speedup = res.wall.count() > 0 ? static_cast<double>(serial.wall.count()) / static_cast<double>(res.wall.count()) : 1.0;
			row.utilization = row.speedup / ideal_speedup(s, grid, order, g, threads);
			row.duration_ns = std::to_string(cfg.task_duration.count());
			row.seed = std::to_string(eo.seed);
			rows.push_back(std::move(row));
		}
		output sink(path, "execute.csv", out);
		write_rows(sink.stream(), rows);
		return ok ? exit_ok : exit_runtime;
	}

	// ---------------------------------------------------------------- oracle

	int cmd_oracle(const grid_spec& grid, const order_options& ord, const std::string& workers_text, std::uint64_t seed, std::size_t seeds, const std::string& dump, std::ostream& out, std::ostream& err) {
		const auto order = ord.resolve(grid.dim());
		const auto workers = parse_worker_list(workers_text);
		bool all_ok = true;
		std::vector<std::pair<std::string, accumulators>> dumped;
		for(std::uint64_t sd = seed; sd < seed + seeds; ++sd) {
			const auto expected = reference_oracle(grid, sd);
			std::int64_t total = 0;
			for(const auto v : expected) total += v;
			const bool cancels = total == intra_total(grid, sd);
			all_ok = all_ok && cancels;
			if(sd == seed) dumped.emplace_back("oracle", expected);
			for(const auto s : {strategy::basic, strategy::loopex, strategy::nested, strategy::buffered}) {
				for(const auto w : workers) {
					payload_options opts;
					opts.order = order;
					opts.sim = sim_config{w};
					const auto got = execute_with_payload(s, grid, sd, opts);
					const bool match = got == expected;
					all_ok = all_ok && match;
					if(!match) err << "mismatch: strategy " << to_string(s) << ", workers " << workers_label(w) << ", seed " << sd << "\n";
					if(sd == seed && w == workers.front()) dumped.emplace_back(std::string(to_string(s)), got);
				}
			}
			if(!cancels) err << "inter contributions do not cancel for seed " << sd << "\n";
		}
		out << (all_ok ? "OK" : "FAIL") << ": 4 strategies x " << workers.size() << " worker counts x " << seeds << " seeds on " << grid.cell_count() << " cells\n";
		if(!dump.empty()) {
			output sink(dump, "accumulators.csv", out);
			auto& os = sink.stream();
			os << "cell,x,y,z";
			for(const auto& [name, _] : dumped) os << "," << name;
			os << "\n";
			for(std::size_t c = 0; c < grid.cell_count(); ++c) {
				const auto xyz = grid.coords_of(cell_id{c});
				os << c << "," << xyz[0] << "," << xyz[1] << "," << xyz[2];
				for(const auto& [_, acc] : dumped) os << "," << acc[c];
				os << "\n";
			}
		}
		return all_ok ? exit_ok : exit_runtime;
	}

	// ---------------------------------------------------------------- repro

	struct fig7_case {
		strategy s;
		std::optional<stencil_order> order;
		std::string label;
	};

	void repro_fig7(const grid_spec& grid, const std::vector<fig7_case>& cases, const std::vector<std::size_t>& workers, const std::filesystem::path& dir, const std::string& name, std::ostream& out) {
		std::filesystem::create_directories(dir);
		std::ofstream csv(dir / (name + ".csv"));
		std::ofstream summary(dir / (name + "-summary.txt"));
		if(!csv || !summary) throw std::runtime_error("cannot write into " + dir.string());
		csv << csv_header << "\n";
		const auto canonical = stencil_order::identity(canonical_half_stencil(grid.dim()));
		summary << name << ": " << grid.cell_count() << " cells, workers " << workers_label(workers.front()) << ".." << workers_label(workers.back()) << "\n";
		summary << "strategy,order,delta,workers,speedup,predicted,relative_error,status\n";
		std::size_t failures = 0;
		for(const auto& c : cases) {
			const auto order = c.order.value_or(canonical);
			const auto rows = simulate_rows(c.s, grid, order, c.label, workers);
			write_rows(csv, rows, false);
			for(std::size_t i = 0; i < rows.size(); ++i) {
				const bool unbounded = workers[i] == sim_config::unbounded_workers;
				const auto w = static_cast<double>(workers[i]);
				double predicted = w;
				double tolerance = 0.05;
				if(c.s == strategy::basic) {
					const analytic_model model{static_cast<std::int64_t>(displacement(order)), static_cast<std::int64_t>(grid.cell_count()), static_cast<std::int64_t>(order.size())};
					predicted = std::min(w, to_double(speedup_stencil(model)));
				} else if(unbounded) {
					// linear scaling has no finite target without a worker bound
					summary << rows[i].strategy << "," << quote(c.label) << ",," << rows[i].workers << "," << fixed(rows[i].speedup, 4) << ",,,n/a\n";
					continue;
				} else {
					// improved strategies are judged against ideal linear scaling
					tolerance = 0.10;
				}
				const auto cmp = compare(predicted, rows[i].speedup, tolerance);
				if(!cmp.pass) ++failures;
				summary << rows[i].strategy << "," << quote(c.label) << "," << rows[i].delta << "," << rows[i].workers << "," << fixed(cmp.measured, 4) << "," << fixed(cmp.predicted, 4)
				        << "," << fixed(cmp.relative_error, 4) << "," << (cmp.pass ? "ok" : "deviates") << "\n";
			}
		}
		summary << "deviations beyond tolerance: " << failures << "\n";
		out << "wrote " << (dir / (name + ".csv")).string() << " and " << (dir / (name + "-summary.txt")).string() << " (" << failures << " deviations)\n";
	}

	int cmd_repro(const std::string& recipe, const std::string& dir_text, const std::string& workers_text, const std::string& durations_text, const std::string& threads_text,
	    std::size_t reps, const std::string& extents_override, std::ostream& out, std::ostream& err) {
		const auto dir = output_dir(dir_text);
		if(recipe == "fig7-2d") {
			const grid_spec grid(2, extents_override.empty() ? std::vector<int>{50, 50} : parse_extents(extents_override));
			std::vector<fig7_case> cases;
			for(const auto& preset : {"naive", "bad", "opt"}) cases.push_back({strategy::basic, order_preset(preset), preset});
			for(std::size_t d = 1; d <= 5; ++d) cases.push_back({strategy::basic, order_with_displacement(2, d), "delta" + std::to_string(d)});
			cases.push_back({strategy::loopex, std::nullopt, ""});
			cases.push_back({strategy::nested, std::nullopt, "canonical"});
			cases.push_back({strategy::buffered, std::nullopt, ""});
			repro_fig7(grid, cases, parse_worker_list(workers_text), dir, "fig7-2d", out);
			return exit_ok;
		}
		if(recipe == "fig7-3d") {
			const grid_spec grid(3, extents_override.empty() ? std::vector<int>{30, 10, 10} : parse_extents(extents_override));
			std::vector<fig7_case> cases;
			cases.push_back({strategy::basic, order_preset("bad", 3), "bad"});
			cases.push_back({strategy::basic, order_with_displacement(3, 2), "delta2"});
			cases.push_back({strategy::basic, order_preset("opt", 3), "opt"});
			cases.push_back({strategy::loopex, std::nullopt, ""});
			cases.push_back({strategy::nested, std::nullopt, "canonical"});
			cases.push_back({strategy::buffered, std::nullopt, ""});
			repro_fig7(grid, cases, parse_worker_list(workers_text), dir, "fig7-3d", out);
			return exit_ok;
		}
		if(recipe == "fig5") {
			const grid_spec grid(2, extents_override.empty() ? std::vector<int>{50, 50} : parse_extents(extents_override));
			const auto graph = detect_dependencies(generate_loopex(grid));
			std::vector<nanoseconds> durations;
			for(const auto& d : split(durations_text, ',')) durations.push_back(parse_duration(d));
			const auto thread_list = parse_worker_list(threads_text);
			if(thread_list.size() != 1 || thread_list.front() == sim_config::unbounded_workers) throw std::invalid_argument("fig5 needs exactly one finite thread count");
			const auto threads = thread_list.front();
			if(threads > std::thread::hardware_concurrency()) {
				err << "warning: " << threads << " threads on " << std::thread::hardware_concurrency() << " hardware threads; efficiencies reflect oversubscription\n";
			}
			const auto sweep = duration_sweep(graph, durations, threads, reps);
			std::filesystem::create_directories(dir);
			std::ofstream csv(dir / "fig5.csv");
			std::ofstream summary(dir / "fig5-summary.txt");
			if(!csv || !summary) throw std::runtime_error("cannot write into " + dir.string());
			csv << csv_header << "\n";
			summary << "fig5: loopex " << grid.cell_count() << " cells, " << threads << " threads, " << reps << " repetitions (median)\n";
			summary << "duration_ns,serial_wall_ns,parallel_wall_ns,speedup,efficiency\n";
			for(const auto& p : sweep.points) {
				auto row = base_row(strategy::loopex, grid, std::nullopt, "");
				row.kind = "exec";
				row.workers = std::to_string(threads);
				row.tasks = graph.size();
				row.makespan = std::to_string(p.parallel_wall.count());
				row.speedup = p.speedup;
				row.utilization = p.efficiency;
				row.duration_ns = std::to_string(p.duration.count());
				csv << format_csv_row(row) << "\n";
				summary << p.duration.count() << "," << p.serial_wall.count() << "," << p.parallel_wall.count() << "," << fixed(p.speedup, 4) << "," << fixed(p.efficiency, 4) << "\n";
			}
			summary << "knee (efficiency >= " << sweep.target << "): " << (sweep.knee ? std::to_string(sweep.knee->count()) + "ns" : std::string("not reached")) << "\n";
			out << "wrote " << (dir / "fig5.csv").string() << " and " << (dir / "fig5-summary.txt").string() << "\n";
			return exit_ok;
		}
		throw std::invalid_argument("unknown recipe '" + recipe + "' (expected fig7-2d, fig7-3d or fig5)");
	}

} // namespace

std::string format_csv_row(const csv_row& r) {
	std::ostringstream os;
	os << r.kind << "," << r.strategy << "," << r.dim << "," << r.extents[0] << "," << r.extents[1] << "," << r.extents[2] << "," << quote(r.order) << "," << r.delta << "," << r.workers
	   << "," << r.tasks << "," << r.makespan << "," << fixed(r.speedup) << "," << fixed(r.utilization) << "," << r.duration_ns << "," << r.seed;
	return os.str();
}

std::vector<std::size_t> parse_worker_list(std::string_view text) {
	std::vector<std::size_t> out;
	for(const auto& part : split(text, ',')) {
		if(part.empty()) throw std::invalid_argument("empty entry in worker list '" + std::string(text) + "'");
		if(part == "inf") {
			out.push_back(sim_config::unbounded_workers);
			continue;
		}
		if(const auto dots = part.find(".."); dots != std::string::npos) {
			const auto lo = parse_size(std::string_view(part).substr(0, dots));
			const auto hi = parse_size(std::string_view(part).substr(dots + 2));
			if(lo < 1 || hi < lo) throw std::invalid_argument("invalid worker range '" + part + "'");
			for(auto w = lo; w <= hi; ++w) out.push_back(w);
			continue;
		}
		const auto w = parse_size(part);
		if(w < 1) throw std::invalid_argument("worker counts must be >= 1");
		out.push_back(w);
	}
	return out;
}

nanoseconds parse_duration(std::string_view text) {
	const auto t = trim(text);
	std::size_t split_at = 0;
	while(split_at < t.size() && (std::isdigit(static_cast<unsigned char>(t[split_at])) || t[split_at] == '.')) ++split_at;
	if(split_at == 0) throw std::invalid_argument("invalid duration '" + t + "'");
	const double value = std::stod(t.substr(0, split_at));
	const auto unit = t.substr(split_at);
	double scale = 1;
	if(unit.empty() || unit == "ns") {
		scale = 1;
	} else if(unit == "us") {
		scale = 1e3;
	} else if(unit == "ms") {
		scale = 1e6;
	} else if(unit == "s") {
		scale = 1e9;
	} else {
		throw std::invalid_argument("invalid duration unit '" + unit + "' (expected ns, us, ms or s)");
	}
	return nanoseconds{static_cast<std::int64_t>(value * scale + 0.5)};
}

std::vector<int> parse_extents(std::string_view text) {
	std::string normalized(text);
	std::replace(normalized.begin(), normalized.end(), 'x', ',');
	std::vector<int> out;
	for(const auto& p : split(normalized, ',')) {
		const auto v = parse_size(p);
		if(v < 1 || v > 1'000'000) throw std::invalid_argument("extent out of range: '" + p + "'");
		out.push_back(static_cast<int>(v));
	}
	return out;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
	CLI::App app{"Task-graph serialization lab for link-cell stencil sweeps", "stencildag"};
	app.require_subcommand(1);

	std::string output_path;

	// predict
	auto* predict = app.add_subcommand("predict", "Closed-form speedup of a stencil sweep (or a pipeline)");
	std::int64_t p_delta = 1;
	std::int64_t p_n = 5;
	std::string p_k = "inf";
	bool p_pipeline = false;
	predict->add_option("--delta", p_delta, "Stencil displacement")->check(CLI::PositiveNumber);
	predict->add_option("--n", p_n, "Tasks per stencil")->check(CLI::PositiveNumber);
	predict->add_option("--k", p_k, "Stencil executions (cell count) or inf");
	predict->add_flag("--pipeline", p_pipeline, "Pipeline model nk/(n+k-1) instead");

	// sweep
	auto* sweep = app.add_subcommand("sweep", "Displacement of every intra-first stencil order");
	int s_dim = 2;
	std::size_t s_samples = 1000;
	std::uint64_t s_seed = 1;
	sweep->add_option("--dim", s_dim, "2 (exhaustive) or 3 (sampled)")->check(CLI::IsMember({2, 3}));
	sweep->add_option("--samples", s_samples, "Random 3D orders");
	sweep->add_option("--seed", s_seed, "Seed for 3D sampling");
	sweep->add_option("--output", output_path, "CSV path ('-' for stdout)");

	// dag
	auto* dag = app.add_subcommand("dag", "Generate a task stream, detect dependencies, export DOT");
	domain_options d_dom;
	d_dom.default_2d = "5,5";
	d_dom.default_3d = "3,3,3";
	order_options d_ord;
	std::string d_strategy = "basic";
	std::string d_workers = "inf";
	bool d_reduce = false;
	d_dom.add_to(dag);
	d_ord.add_to(dag);
	dag->add_option("--strategy", d_strategy, "basic|loopex|nested|buffered");
	dag->add_option("--workers", d_workers, "Worker count for realizing a nested graph");
	dag->add_flag("--reduce", d_reduce, "Drop transitively implied edges");
	dag->add_option("--output", output_path, "DOT path ('-' for stdout)");

	// simulate
	auto* sim = app.add_subcommand("simulate", "List-scheduling simulation with unit task durations");
	domain_options m_dom;
	order_options m_ord;
	std::string m_strategy = "basic";
	std::string m_workers = "1..32";
	m_dom.add_to(sim);
	m_ord.add_to(sim);
	sim->add_option("--strategy", m_strategy, "basic|loopex|nested|buffered");
	sim->add_option("--workers", m_workers, "Worker counts, e.g. 1..32,inf");
	sim->add_option("--output", output_path, "CSV path ('-' for stdout)");

	// execute
	auto* exe = app.add_subcommand("execute", "Run the task stream on real threads with synthetic task durations");
	domain_options e_dom;
	order_options e_ord;
	exec_options e_opts;
	std::string e_strategy = "loopex";
	e_dom.add_to(exe);
	e_ord.add_to(exe);
	exe->add_option("--strategy", e_strategy, "basic|loopex|nested|buffered");
	exe->add_option("--threads", e_opts.threads, "Thread counts, e.g. 1,2,4,8");
	exe->add_option("--duration", e_opts.duration, "Task duration, 100ns..100ms");
	exe->add_option("--reps", e_opts.reps, "Repetitions per configuration (median reported)")->check(CLI::PositiveNumber);
	exe->add_flag("--payload", e_opts.payload, "Apply the integer payload and check it against the oracle");
	exe->add_option("--seed", e_opts.seed, "Payload seed");
	exe->add_option("--output", output_path, "CSV path ('-' for stdout)");

	// oracle
	auto* orc = app.add_subcommand("oracle", "Cross-check every strategy's payload result against the direct oracle");
	domain_options o_dom;
	o_dom.default_2d = "8,8";
	o_dom.default_3d = "4,4,4";
	order_options o_ord;
	std::string o_workers = "1,4,inf";
	std::uint64_t o_seed = 42;
	std::size_t o_seeds = 1;
	std::string o_dump;
	o_dom.add_to(orc);
	o_ord.add_to(orc);
	orc->add_option("--workers", o_workers, "Simulated worker counts");
	orc->add_option("--seed", o_seed, "First seed");
	orc->add_option("--seeds", o_seeds, "Number of consecutive seeds")->check(CLI::PositiveNumber);
	orc->add_option("--dump", o_dump, "Write per-cell accumulators (first seed) to this CSV");

	// repro
	auto* rep = app.add_subcommand("repro", "Canned experiment recipes");
	std::string r_recipe;
	std::string r_dir;
	std::string r_workers = "1..32";
	std::string r_durations = "100ns,1us,10us,100us,1ms";
	std::string r_threads = std::to_string(std::max(1u, std::thread::hardware_concurrency()));
	std::size_t r_reps = 3;
	std::string r_extents;
	rep->add_option("recipe", r_recipe, "fig7-2d | fig7-3d | fig5")->required()->check(CLI::IsMember({"fig7-2d", "fig7-3d", "fig5"}));
	rep->add_option("--output-dir", r_dir, std::string("Artifact directory (default $") + out_dir_env + " or .)");
	rep->add_option("--workers", r_workers, "Simulated worker counts (fig7)");
	rep->add_option("--durations", r_durations, "Task durations (fig5)");
	rep->add_option("--threads", r_threads, "Thread count (fig5)");
	rep->add_option("--reps", r_reps, "Repetitions (fig5)")->check(CLI::PositiveNumber);
	rep->add_option("--extents", r_extents, "Override the recipe's domain");

	try {
		std::vector<std::string> reversed(args.rbegin(), args.rend());
		app.parse(reversed);
	} catch(const CLI::CallForHelp& e) {
		app.exit(e, out, err);
		return exit_ok;
	} catch(const CLI::CallForAllHelp& e) {
		app.exit(e, out, err);
		return exit_ok;
	} catch(const CLI::ParseError& e) {
		app.exit(e, out, err);
		err << app.help();
		return exit_usage;
	}

	try {
		if(*predict) return cmd_predict(p_delta, p_n, p_k, p_pipeline, out);
		if(*sweep) return cmd_sweep(s_dim, s_samples, s_seed, output_path, out, err);
		if(*dag) {
			const auto grid = d_dom.grid();
			warn_grid(grid, err);
			return cmd_dag(parse_strategy(d_strategy), grid, d_ord.resolve(grid.dim()), d_workers, d_reduce, output_path, out, err);
		}
		if(*sim) {
			const auto grid = m_dom.grid();
			warn_grid(grid, err);
			return cmd_simulate(parse_strategy(m_strategy), grid, m_ord, m_workers, output_path, out, err);
		}
		if(*exe) {
			const auto grid = e_dom.grid();
			warn_grid(grid, err);
			return cmd_execute(parse_strategy(e_strategy), grid, e_ord, e_opts, output_path, out, err);
		}
		if(*orc) {
			const auto grid = o_dom.grid();
			warn_grid(grid, err);
			return cmd_oracle(grid, o_ord, o_workers, o_seed, o_seeds, o_dump, out, err);
		}
		if(*rep) return cmd_repro(r_recipe, r_dir, r_workers, r_durations, r_threads, r_reps, r_extents, out, err);
	} catch(const std::invalid_argument& e) {
		err << "error: " << e.what() << "\n";
		return exit_usage;
	} catch(const std::exception& e) {
		err << "error: " << e.what() << "\n";
		return exit_runtime;
	}
	return exit_usage;
}

} // namespace stencildag::cli
