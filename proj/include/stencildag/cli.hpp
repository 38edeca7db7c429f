#pragma once

#include "stencildag/executor.hpp"
#include "stencildag/schedsim.hpp"

#include <chrono>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace stencildag::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 1;
inline constexpr int exit_runtime = 2;

/// Default directory for artifacts when no explicit output path is given.
inline constexpr const char* out_dir_env = "STENCILDAG_OUT_DIR";

inline constexpr std::string_view csv_header = "kind,strategy,dim,ex,ey,ez,order,delta,workers,tasks,makespan,speedup,utilization,duration_ns,seed";

/// One row of the shared results schema. Simulated rows leave duration and seed empty; executed
/// rows report makespan in nanoseconds.
struct csv_row {
	std::string kind = "sim";
	std::string strategy;
	int dim = 2;
	coord extents{1, 1, 1};
	std::string order;
	std::string delta;
	std::string workers;
	std::size_t tasks = 0;
	std::string makespan;
	double speedup = 0;
	double utilization = 0;
	std::string duration_ns;
	std::string seed;
};

std::string format_csv_row(const csv_row& row);

/// "1..32", "1,2,4,8", "inf" and mixtures like "1..4,16,inf".
std::vector<std::size_t> parse_worker_list(std::string_view text);

/// "100ns", "10us", "5ms", "1s"; a bare number is nanoseconds.
nanoseconds parse_duration(std::string_view text);

/// "30,10,10" or "30x10x10".
std::vector<int> parse_extents(std::string_view text);

/// Runs one command line (without the program name). Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace stencildag::cli
