#include "stencildag/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

namespace stencildag {

namespace {

	void check_model(std::int64_t delta, std::int64_t k, std::int64_t n) {
		if(n < 1) throw std::invalid_argument("n must be >= 1");
		if(k < 1) throw std::invalid_argument("k must be >= 1");
		if(delta < 1 || delta > n) throw std::invalid_argument("delta must lie in [1, n]");
	}

	sweep_row make_row(stencil_order order) {
		const auto delta = displacement(order);
		const auto n = static_cast<std::int64_t>(order.size());
		return sweep_row{std::move(order), delta, speedup_max(static_cast<std::int64_t>(delta), n)};
	}

} // namespace

std::string to_string(const rational& r) {
	if(r.denominator() == 1) return std::to_string(r.numerator());
	return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

rational speedup_stencil(const analytic_model& m) {
	check_model(m.delta, m.k, m.n);
	return rational(m.n * m.k, m.n + m.delta * (m.k - 1));
}

rational speedup_max(std::int64_t delta, std::int64_t n) {
	check_model(delta, 1, n);
	return rational(n, delta);
}

rational speedup_pipeline(std::int64_t n, std::int64_t k) {
	if(n < 1 || k < 1) throw std::invalid_argument("pipeline model needs n, k >= 1");
	return rational(n * k, n + k - 1);
}

std::vector<sweep_row> permutation_sweep(int dim, std::size_t samples, std::uint64_t seed) {
	const auto base = backward_half_stencil(dim);
	const auto intra = base.intra_index();
	std::vector<std::size_t> inter;
	for(std::size_t i = 0; i < base.size(); ++i) {
		if(i != intra) inter.push_back(i);
	}
	std::vector<sweep_row> rows;
	const auto with_intra = [&](const std::vector<std::size_t>& tail) {
		std::vector<std::size_t> perm{intra};
		perm.insert(perm.end(), tail.begin(), tail.end());
		return stencil_order(base, std::move(perm));
	};
	if(dim == 2) {
		auto perm = inter;
		do {
			rows.push_back(make_row(with_intra(perm)));
		} while(std::next_permutation(perm.begin(), perm.end()));
		return rows;
	}
	// 13! orders are out of reach; sample, and pin the extremes explicitly
	rows.push_back(make_row(order_with_displacement(dim, 2)));
	rows.push_back(make_row(order_with_displacement(dim, base.size())));
	std::mt19937_64 rng(seed);
	auto perm = inter;
	for(std::size_t s = 0; s < samples; ++s) {
		// Fisher-Yates on raw engine output keeps the draw identical across standard libraries
		for(std::size_t i = perm.size() - 1; i > 0; --i) {
			const auto j = static_cast<std::size_t>(rng() % (i + 1));
			std::swap(perm[i], perm[j]);
		}
		rows.push_back(make_row(with_intra(perm)));
	}
	return rows;
}

std::map<std::size_t, std::size_t> delta_histogram(const std::vector<sweep_row>& rows) {
	std::map<std::size_t, std::size_t> hist;
	for(const auto& r : rows) ++hist[r.delta];
	return hist;
}

comparison compare(double predicted, double measured, double tolerance) {
	comparison c;
	c.predicted = predicted;
	c.measured = measured;
	c.tolerance = tolerance;
	c.relative_error = predicted == 0 ? std::abs(measured) : std::abs(measured - predicted) / predicted;
	c.pass = c.relative_error <= tolerance;
	return c;
}

comparison compare(const analytic_model& predicted, const sim_result& measured, double tolerance) {
	const auto model = to_double(speedup_stencil(predicted));
	return compare(std::min(model, static_cast<double>(measured.workers)), measured.speedup, tolerance);
}

} // namespace stencildag
