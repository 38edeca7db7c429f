#include "doctest.h"

#include "stencildag/executor.hpp"

#include <algorithm>
#include <stdexcept>

using namespace stencildag;
using namespace std::chrono_literals;

TEST_SUITE("executor") {

TEST_CASE("calibration is sane") {
	const auto& cal = calibration();
	CHECK(cal.clock_read_cost.count() > 0);
	CHECK(cal.clock_read_cost < 10us);
	CHECK(cal.resolution.count() > 0);
	CHECK(&cal == &calibration());
}

TEST_CASE("busy wait lasts at least the requested time") {
	for(const bool yield : {false, true}) {
		const auto begin = std::chrono::steady_clock::now();
		busy_wait(2ms, yield);
		CHECK(std::chrono::steady_clock::now() - begin >= 2ms);
	}
}

TEST_CASE("static graphs honor the execution contract") {
	const grid_spec grid(2, {6, 6});
	for(const auto& g : {detect_dependencies(generate_basic(grid, order_preset("naive"))), detect_dependencies(generate_loopex(grid)), detect_dependencies(generate_buffered(grid))}) {
		for(const std::size_t threads : {1, 2, 4}) {
			exec_config cfg;
			cfg.threads = threads;
			cfg.task_duration = 20us;
			const auto r = execute(g, cfg);
			CHECK(r.contract_ok());
			CHECK(r.tasks == g.size());
			CHECK(r.samples.size() == 3);
			CHECK(r.wall >= *std::min_element(r.samples.begin(), r.samples.end()));
			CHECK(r.wall <= *std::max_element(r.samples.begin(), r.samples.end()));
		}
	}
}

TEST_CASE("nested plans honor the execution contract") {
	const grid_spec grid(2, {6, 6});
	for(const std::size_t threads : {1, 3}) {
		exec_config cfg;
		cfg.threads = threads;
		cfg.task_duration = 20us;
		const auto r = execute(make_nested_plan(grid), cfg);
		CHECK(r.contract_ok());
		CHECK(r.tasks == 180);
	}
}

TEST_CASE("payload matches the oracle at every thread count") {
	const grid_spec grid(2, {6, 5});
	const auto expected = reference_oracle(grid, 21);
	for(const std::size_t threads : {1, 2, 4}) {
		exec_config cfg;
		cfg.threads = threads;
		cfg.task_duration = 5us;
		cfg.payload = true;
		cfg.seed = 21;
		for(const auto& g : {detect_dependencies(generate_basic(grid, order_preset("opt"))), detect_dependencies(generate_loopex(grid)), detect_dependencies(generate_buffered(grid))}) {
			const auto r = execute(g, grid, cfg);
			REQUIRE(r.payload);
			CHECK(*r.payload == expected);
			CHECK(r.payload_stable);
		}
		const auto nested = execute(make_nested_plan(grid), cfg);
		REQUIRE(nested.payload);
		CHECK(*nested.payload == expected);
	}
}

TEST_CASE("tiny durations warn about timer resolution") {
	const grid_spec grid(2, {3, 3});
	exec_config cfg;
	cfg.task_duration = 100ns;
	cfg.repetitions = 1;
	const auto r = execute(detect_dependencies(generate_loopex(grid)), cfg);
	CHECK(r.contract_ok());
	cfg.task_duration = 1ms;
	CHECK(execute(detect_dependencies(generate_loopex(grid)), cfg).warnings.empty());
	if(calibration().clock_read_cost * 10 > 100ns || calibration().resolution * 10 > 100ns) CHECK(!r.warnings.empty());
}

TEST_CASE("configuration is validated") {
	const grid_spec grid(2, {3, 3});
	const auto g = detect_dependencies(generate_loopex(grid));
	exec_config cfg;
	cfg.threads = 0;
	CHECK_THROWS_AS(execute(g, cfg), std::invalid_argument);
	cfg.threads = 1;
	cfg.task_duration = 50ns;
	CHECK_THROWS_AS(execute(g, cfg), std::invalid_argument);
	cfg.task_duration = 200ms;
	CHECK_THROWS_AS(execute(g, cfg), std::invalid_argument);
	cfg.task_duration = 1us;
	cfg.repetitions = 0;
	CHECK_THROWS_AS(execute(g, cfg), std::invalid_argument);
	cfg.repetitions = 1;
	cfg.payload = true;
	CHECK_THROWS_AS(execute(g, cfg), std::invalid_argument);
}

TEST_CASE("empty graph finishes immediately") {
	const auto r = execute(task_graph{}, exec_config{});
	CHECK(r.wall.count() == 0);
	CHECK(r.contract_ok());
}

TEST_CASE("a single task has efficiency one") {
	task t;
	t.resources = {resource_id::accumulator(cell_id{0})};
	const auto g = detect_dependencies({t});
	const auto p = measure_efficiency(g, 5ms, 4);
	CHECK(p.efficiency == doctest::Approx(1.0).epsilon(0.1));
	CHECK(p.contract_ok);
}

TEST_CASE("efficiency does not fall as tasks get longer") {
	const grid_spec grid(2, {4, 4});
	const auto g = detect_dependencies(generate_loopex(grid));
	const std::vector<nanoseconds> durations{2us, 20us, 200us, 2ms};
	const auto sweep = duration_sweep(g, durations, 2, 3);
	REQUIRE(sweep.points.size() == 4);
	double best = 0;
	for(const auto& p : sweep.points) {
		CAPTURE(p.duration.count());
		CAPTURE(p.efficiency);
		CHECK(p.contract_ok);
		// isotonic trend within a 10% noise band
		CHECK(p.efficiency >= best - 0.1);
		best = std::max(best, p.efficiency);
	}
	CHECK(sweep.points.back().efficiency > sweep.points.front().efficiency);
	for(const auto& p : sweep.points) {
		if(sweep.knee && p.duration == *sweep.knee) CHECK(p.efficiency >= sweep.target);
		if(!sweep.knee || p.duration < *sweep.knee) CHECK(p.efficiency < sweep.target);
	}
}

}
