#pragma once

#include "stencildag/schedsim.hpp"
#include "stencildag/taskgen.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace stencildag {

using accumulators = std::vector<std::int64_t>;

/// Per-cell charges from a seeded mt19937_64, in [-2^15, 2^15).
std::vector<std::int64_t> make_charges(const grid_spec& grid, std::uint64_t seed);

struct contribution {
	std::int64_t to_a = 0;
	std::int64_t to_b = 0;

	friend bool operator==(const contribution&, const contribution&) = default;
};

/// Antisymmetric pair term: swapping the cells and negating the offset negates the result, and
/// to_b == -to_a. Zero charges give zero; magnitudes stay below 2^23.
contribution pair_contribution(std::int64_t charge_a, std::int64_t charge_b, const offset& o);

/// Self-interaction term of one cell; zero for a zero charge.
std::int64_t intra_contribution(std::int64_t charge);

/// Resource-addressed values a task stream reads and writes.
class payload_store {
  public:
	payload_store(const grid_spec& grid, std::vector<std::int64_t> charges);

	/// Applies one task's contributions to its resources. Not synchronized: callers guarantee
	/// exclusive access to the task's resources.
	void apply(const task& t);

	accumulators result() const;
	const std::vector<std::int64_t>& charges() const { return m_charges; }

  private:
	std::int64_t& slot(const resource_id& r);

	grid_spec m_grid;
	std::size_t m_slots_per_cell;
	std::vector<std::int64_t> m_charges;
	accumulators m_acc;
	std::vector<std::int64_t> m_buffers;
};

struct payload_options {
	/// Basic strategy order; defaults to the canonical stencil, intra first.
	std::optional<stencil_order> order;
	/// Nested chain order; defaults to the canonical stencil, intra first.
	std::optional<stencil_order> chain;
	sim_config sim{1};
};

/// Builds the strategy's task stream, schedules it with the simulator and applies every task in
/// schedule order. Returns final per-cell accumulators.
accumulators execute_with_payload(strategy s, const grid_spec& grid, std::uint64_t seed, const payload_options& opts = {});

/// Direct loop over every cell and every nonzero offset of its full neighborhood, plus intra terms.
accumulators reference_oracle(const grid_spec& grid, std::uint64_t seed);

/// Sum of intra terms only; equals the accumulator total when inter terms cancel.
std::int64_t intra_total(const grid_spec& grid, std::uint64_t seed);

} // namespace stencildag
