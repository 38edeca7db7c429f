#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace stencildag {

using coord = std::array<int, 3>;

/// Linear cell index, x fastest, then y, then z.
struct cell_id {
	std::size_t index = 0;

	friend auto operator<=>(const cell_id&, const cell_id&) = default;
};

/// Periodic (or bounded) box of unit cells. Extents beyond `dim` are fixed to 1.
class grid_spec {
  public:
	grid_spec(int dim, const std::vector<int>& extents, bool periodic = true);

	int dim() const { return m_dim; }
	const coord& extents() const { return m_extents; }
	int extent(int axis) const { return m_extents[static_cast<std::size_t>(axis)]; }
	bool periodic() const { return m_periodic; }
	std::size_t cell_count() const { return m_cell_count; }

	/// True when a periodic axis is shorter than 3, so distinct offsets may reach the same cell.
	bool self_neighboring() const;
	/// Diagnostics collected at construction (currently only the self-neighboring warning).
	const std::vector<std::string>& warnings() const { return m_warnings; }

	coord coords_of(cell_id cell) const;
	cell_id cell_at(const coord& c) const;
	bool contains(const coord& c) const;

	friend bool operator==(const grid_spec& a, const grid_spec& b) {
		return a.m_dim == b.m_dim && a.m_extents == b.m_extents && a.m_periodic == b.m_periodic;
	}

  private:
	int m_dim;
	coord m_extents{1, 1, 1};
	bool m_periodic;
	std::size_t m_cell_count;
	std::vector<std::string> m_warnings;
};

/// Relative cell position with components in {-1, 0, +1}.
struct offset {
	coord d{0, 0, 0};

	constexpr offset() = default;
	constexpr offset(int x, int y, int z = 0) : d{x, y, z} {}

	constexpr bool is_zero() const { return d[0] == 0 && d[1] == 0 && d[2] == 0; }
	constexpr offset operator-() const { return offset{-d[0], -d[1], -d[2]}; }
	/// Lexicographic positivity with x most significant.
	constexpr bool is_positive() const {
		if(d[0] != 0) return d[0] > 0;
		if(d[1] != 0) return d[1] > 0;
		return d[2] > 0;
	}

	friend auto operator<=>(const offset&, const offset&) = default;
};

std::string to_string(const offset& o, int dim);

/// Every offset of the 3^dim neighborhood, including zero.
std::vector<offset> full_neighborhood(int dim);

/// Ordered half-stencil: one intra entry (zero offset) plus one of every {o, -o} pair.
class stencil {
  public:
	/// Validates dim, component range, a single zero entry, half-stencil and closure properties.
	stencil(int dim, std::vector<offset> entries);

	int dim() const { return m_dim; }
	std::size_t size() const { return m_entries.size(); }
	const std::vector<offset>& entries() const { return m_entries; }
	const offset& operator[](std::size_t i) const { return m_entries[i]; }
	/// Position of `o` in the entry list, if present.
	std::optional<std::size_t> find(const offset& o) const;
	std::size_t intra_index() const;

	friend bool operator==(const stencil&, const stencil&) = default;

  private:
	int m_dim;
	std::vector<offset> m_entries;
};

/// Intra entry first, then all lexicographically positive offsets in ascending order.
stencil canonical_half_stencil(int dim);

/// Intra entry first, then every offset that points forward in x or, within the same x plane, to an
/// already-swept row/layer (x > 0, or x = 0 and the offset is lexicographically negative), x-major.
/// Under x-fastest traversal these orders track the displacement model; the mirrored canonical set
/// couples each row to the next one and does not.
stencil backward_half_stencil(int dim);

/// The 2D set drawn in the link-cell figure: intra, (0,-1), (1,-1), (1,0), (1,1).
stencil figure_half_stencil_2d();

std::optional<cell_id> neighbor(cell_id cell, const offset& o, const grid_spec& grid);

using color_id = unsigned;

/// Parity bit-pack: bit a is coordinate a mod 2.
color_id color(cell_id cell, const grid_spec& grid);
inline unsigned color_count(const grid_spec& grid) { return 1u << grid.dim(); }

} // namespace stencildag
