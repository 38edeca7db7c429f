#pragma once

#include "stencildag/grid.hpp"

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace stencildag {

enum class task_kind { intra, inter, reduce };

std::string_view to_string(task_kind kind);

/// Memory proxy a task updates: a cell's accumulator, or one private buffer slot of a cell.
///
/// Buffer slots of a cell with an n-entry stencil: slot s < n holds the cell's own contribution for
/// stencil entry s; slot n + s holds the contribution written into this cell by the neighbor that
/// reaches it through inter entry s.
struct resource_id {
	enum class type : std::uint8_t { accumulator, buffer };

	type variant = type::accumulator;
	std::size_t cell = 0;
	std::uint32_t slot = 0;

	static resource_id accumulator(cell_id c) { return {type::accumulator, c.index, 0}; }
	static resource_id buffer(cell_id c, std::uint32_t slot) { return {type::buffer, c.index, slot}; }

	bool is_accumulator() const { return variant == type::accumulator; }

	friend auto operator<=>(const resource_id&, const resource_id&) = default;
};

std::string to_string(const resource_id& r);

struct resource_id_hash {
	std::size_t operator()(const resource_id& r) const noexcept {
		return std::hash<std::uint64_t>{}((static_cast<std::uint64_t>(r.cell) << 24) ^ (static_cast<std::uint64_t>(r.slot) << 1) ^ static_cast<std::uint64_t>(r.variant));
	}
};

/// One cell-cell interaction (or a reduce step). All `resources` are inout.
///
/// For inter tasks resources[0] belongs to the home cell and resources[1] (when present) to the
/// neighbor. A reduce task lists its accumulator first, followed by the buffer slots it sums.
struct task {
	std::size_t id = 0;
	task_kind kind = task_kind::intra;
	cell_id home;
	offset off;
	/// Index into the ordered stencil the generator walked (chain position for nested plans).
	std::size_t stencil_entry = 0;
	std::vector<resource_id> resources;
	/// Read-only inputs. Stencil tasks never use them; they exist for hand-written streams where
	/// concurrent readers of one datum must not be serialized.
	std::vector<resource_id> reads;
};

using task_list = std::vector<task>;

/// A per-cell evaluation order: a permutation of a stencil's entries.
class stencil_order {
  public:
	stencil_order(stencil base, std::vector<std::size_t> permutation);
	/// Takes the entries in the given order; they must form a valid stencil.
	static stencil_order from_offsets(int dim, std::vector<offset> ordered);
	static stencil_order identity(stencil base);

	int dim() const { return m_ordered.dim(); }
	std::size_t size() const { return m_ordered.size(); }
	const offset& operator[](std::size_t i) const { return m_ordered[i]; }
	/// The stencil with entries in evaluation order.
	const stencil& ordered() const { return m_ordered; }
	const std::vector<std::size_t>& permutation() const { return m_permutation; }

	/// e.g. "(0,0);(1,0);(1,1)"
	std::string describe() const;

  private:
	stencil m_ordered;
	std::vector<std::size_t> m_permutation;
};

/// Named orders over the backward stencil: naive, bad, opt. In 2D these are the figure orders; in
/// 3D naive is the stencil's own order, bad puts +x last and opt is a searched +x-first order whose
/// critical path comes within 4% of the pipeline bound on 30x10x10.
stencil_order order_preset(std::string_view name, int dim = 2);

/// Orders over the backward stencil with +x at 1-based position `delta`. For delta >= 2: intra
/// first, then the x-forward entries, then the in-plane ones, +x inserted at `delta`. delta == 1 is
/// the opt preset.
stencil_order order_with_displacement(int dim, std::size_t delta);

/// 1-based position of the pure +x entry.
std::size_t displacement(const stencil_order& order);

/// Outer loop over cells (x fastest), inner loop over the order.
task_list generate_basic(const grid_spec& grid, const stencil_order& order);

/// Outer loop over stencil entries, then colors ascending, then cells of that color x fastest.
task_list generate_loopex(const grid_spec& grid, const stencil& s);
task_list generate_loopex(const grid_spec& grid);

/// n compute tasks per cell writing private buffer slots, then one reduce task per cell.
task_list generate_buffered(const grid_spec& grid, const stencil& s);
task_list generate_buffered(const grid_spec& grid);

/// Buffer slots that exist for `cell` (fewer than 2n-1 on bounded grids).
std::vector<resource_id> buffer_slots_of(cell_id cell, const grid_spec& grid, const stencil& s);

/// Dynamic spawning recipe: every cell starts with the first entry of its chain; completing chain
/// position i spawns position i + 1 of the same cell.
class nested_plan {
  public:
	nested_plan(grid_spec grid, stencil_order chain);

	const grid_spec& grid() const { return m_grid; }
	const stencil_order& chain() const { return m_chain; }
	/// Tasks per cell actually spawned (truncated entries on bounded grids are skipped).
	std::size_t total_tasks() const;

	/// Initial task list, ids 0..k-1 in cell order.
	task_list initial() const;
	/// The task spawned when `parent` completes, without an id; none at the end of the chain.
	std::optional<task> continuation(const task& parent) const;

  private:
	std::optional<task> make_chain_task(cell_id cell, std::size_t chain_pos) const;

	grid_spec m_grid;
	stencil_order m_chain;
};

/// Chain order: canonical stencil, intra first.
nested_plan make_nested_plan(const grid_spec& grid);
nested_plan make_nested_plan(const grid_spec& grid, stencil_order chain);

enum class strategy { basic, loopex, nested, buffered };

std::string_view to_string(strategy s);
strategy parse_strategy(std::string_view name);

} // namespace stencildag
