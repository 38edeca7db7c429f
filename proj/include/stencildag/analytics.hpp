#pragma once

#include "stencildag/schedsim.hpp"
#include "stencildag/taskgen.hpp"

#include <boost/rational.hpp>

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace stencildag {

// Compare against rational(n), not a bare integer: Boost 1.74's mixed operators recurse under C++20.
using rational = boost::rational<std::int64_t>;

inline double to_double(const rational& r) { return boost::rational_cast<double>(r); }
std::string to_string(const rational& r);

/// Stencil-sweep speedup model: `delta` tasks per cell before the next x-neighbor can start, `k`
/// stencil executions over the domain, `n` tasks per stencil.
struct analytic_model {
	std::int64_t delta = 1;
	std::int64_t k = 1;
	std::int64_t n = 5;
};

/// nk / (n + delta (k - 1))
rational speedup_stencil(const analytic_model& m);
/// Limit of speedup_stencil for k to infinity: n / delta.
rational speedup_max(std::int64_t delta, std::int64_t n);
/// nk / (n + k - 1); n operations through a pipeline of depth k.
rational speedup_pipeline(std::int64_t n, std::int64_t k);

struct sweep_row {
	stencil_order order;
	std::size_t delta;
	rational s_max;
};

/// All intra-first orders of the backward 2D stencil (24 rows). For dim 3, `samples` random
/// intra-first orders drawn with `seed`, plus the two extremal orders (delta 2 and 14).
std::vector<sweep_row> permutation_sweep(int dim = 2, std::size_t samples = 1000, std::uint64_t seed = 1);

std::map<std::size_t, std::size_t> delta_histogram(const std::vector<sweep_row>& rows);

struct comparison {
	double predicted = 0;
	double measured = 0;
	double relative_error = 0;
	double tolerance = 0;
	bool pass = false;
};

/// Measured speedup vs. the stencil model capped at the run's worker count.
comparison compare(const analytic_model& predicted, const sim_result& measured, double tolerance = 0.05);
comparison compare(double predicted, double measured, double tolerance = 0.05);

} // namespace stencildag
