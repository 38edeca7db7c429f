#include "stencildag/grid.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace stencildag {

namespace {

	void check_dim(int dim) {
		if(dim != 2 && dim != 3) throw std::invalid_argument("unsupported dimension " + std::to_string(dim) + " (expected 2 or 3)");
	}

	int wrap(int v, int extent) {
		const int r = v % extent;
		return r < 0 ? r + extent : r;
	}

} // namespace

grid_spec::grid_spec(int dim, const std::vector<int>& extents, bool periodic) : m_dim(dim), m_periodic(periodic) {
	check_dim(dim);
	if(extents.size() != static_cast<std::size_t>(dim)) {
		throw std::invalid_argument("expected " + std::to_string(dim) + " extents, got " + std::to_string(extents.size()));
	}
	m_cell_count = 1;
	for(int a = 0; a < dim; ++a) {
		if(extents[static_cast<std::size_t>(a)] < 1) throw std::invalid_argument("grid extents must be >= 1");
		m_extents[static_cast<std::size_t>(a)] = extents[static_cast<std::size_t>(a)];
		m_cell_count *= static_cast<std::size_t>(extents[static_cast<std::size_t>(a)]);
	}
	if(self_neighboring()) {
		m_warnings.emplace_back("periodic extent < 3: neighbor cells coincide with each other or with the home cell; "
		                        "task resource sets are deduplicated");
	}
}

bool grid_spec::self_neighboring() const {
	if(!m_periodic) return false;
	for(int a = 0; a < m_dim; ++a) {
		if(extent(a) < 3) return true;
	}
	return false;
}

coord grid_spec::coords_of(cell_id cell) const {
	if(cell.index >= m_cell_count) throw std::out_of_range("cell index out of range");
	coord c{0, 0, 0};
	auto rest = cell.index;
	for(int a = 0; a < 3; ++a) {
		const auto e = static_cast<std::size_t>(m_extents[static_cast<std::size_t>(a)]);
		c[static_cast<std::size_t>(a)] = static_cast<int>(rest % e);
		rest /= e;
	}
	return c;
}

bool grid_spec::contains(const coord& c) const {
	for(int a = 0; a < 3; ++a) {
		const auto i = static_cast<std::size_t>(a);
		if(c[i] < 0 || c[i] >= m_extents[i]) return false;
	}
	return true;
}

cell_id grid_spec::cell_at(const coord& c) const {
	if(!contains(c)) throw std::out_of_range("coordinates outside the grid");
	return cell_id{static_cast<std::size_t>(c[0])
	               + static_cast<std::size_t>(m_extents[0]) * (static_cast<std::size_t>(c[1]) + static_cast<std::size_t>(m_extents[1]) * static_cast<std::size_t>(c[2]))};
}

std::string to_string(const offset& o, int dim) {
	std::string s = "(";
	for(int a = 0; a < dim; ++a) {
		if(a > 0) s += ",";
		s += std::to_string(o.d[static_cast<std::size_t>(a)]);
	}
	return s + ")";
}

std::vector<offset> full_neighborhood(int dim) {
	check_dim(dim);
	std::vector<offset> all;
	const int zr = dim == 3 ? 1 : 0;
	for(int x = -1; x <= 1; ++x) {
		for(int y = -1; y <= 1; ++y) {
			for(int z = -zr; z <= zr; ++z) {
				all.emplace_back(x, y, z);
			}
		}
	}
	return all;
}

stencil::stencil(int dim, std::vector<offset> entries) : m_dim(dim), m_entries(std::move(entries)) {
	check_dim(dim);
	std::set<offset> seen;
	std::size_t zeros = 0;
	for(const auto& o : m_entries) {
		for(int a = 0; a < 3; ++a) {
			const int v = o.d[static_cast<std::size_t>(a)];
			if(v < -1 || v > 1 || (a >= dim && v != 0)) throw std::invalid_argument("stencil offset " + to_string(o, 3) + " invalid for dim " + std::to_string(dim));
		}
		if(o.is_zero()) ++zeros;
		if(!seen.insert(o).second) throw std::invalid_argument("duplicate stencil offset " + to_string(o, dim));
		if(!o.is_zero() && seen.contains(-o)) throw std::invalid_argument("stencil contains both " + to_string(o, dim) + " and its negation");
	}
	if(zeros != 1) throw std::invalid_argument("stencil must contain exactly one intra (zero) offset");
	const auto full = full_neighborhood(dim);
	for(const auto& o : full) {
		if(!seen.contains(o) && !seen.contains(-o)) throw std::invalid_argument("stencil does not cover offset " + to_string(o, dim) + " or its negation");
	}
}

std::optional<std::size_t> stencil::find(const offset& o) const {
	const auto it = std::find(m_entries.begin(), m_entries.end(), o);
	if(it == m_entries.end()) return std::nullopt;
	return static_cast<std::size_t>(it - m_entries.begin());
}

std::size_t stencil::intra_index() const { return *find(offset{}); }

stencil canonical_half_stencil(int dim) {
	check_dim(dim);
	std::vector<offset> entries{offset{}};
	for(const auto& o : full_neighborhood(dim)) {
		if(o.is_positive()) entries.push_back(o);
	}
	// full_neighborhood enumerates x-major, so the positive subset is already ascending
	return stencil(dim, std::move(entries));
}

stencil backward_half_stencil(int dim) {
	check_dim(dim);
	std::vector<offset> entries{offset{}};
	for(const auto& o : full_neighborhood(dim)) {
		if(o.d[0] > 0 || (o.d[0] == 0 && (-o).is_positive())) entries.push_back(o);
	}
	return stencil(dim, std::move(entries));
}

stencil figure_half_stencil_2d() { return backward_half_stencil(2); }

std::optional<cell_id> neighbor(cell_id cell, const offset& o, const grid_spec& grid) {
	auto c = grid.coords_of(cell);
	for(int a = 0; a < grid.dim(); ++a) {
		const auto i = static_cast<std::size_t>(a);
		c[i] += o.d[i];
		if(grid.periodic()) {
			c[i] = wrap(c[i], grid.extent(a));
		} else if(c[i] < 0 || c[i] >= grid.extent(a)) {
			return std::nullopt;
		}
	}
	return grid.cell_at(c);
}

color_id color(cell_id cell, const grid_spec& grid) {
	const auto c = grid.coords_of(cell);
	color_id col = 0;
	for(int a = 0; a < grid.dim(); ++a) {
		col |= static_cast<color_id>(c[static_cast<std::size_t>(a)] & 1) << a;
	}
	return col;
}

} // namespace stencildag
