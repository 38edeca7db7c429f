#include "stencildag/taskgen.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace stencildag {

namespace {

	offset plus_x(int dim) { return dim == 3 ? offset{1, 0, 0} : offset{1, 0}; }

	/// Intra or inter task writing straight into accumulators; none when the neighbor is truncated.
	std::optional<task> make_accumulator_task(const grid_spec& grid, cell_id home, const offset& o, std::size_t entry) {
		task t;
		t.home = home;
		t.off = o;
		t.stencil_entry = entry;
		t.resources.push_back(resource_id::accumulator(home));
		if(o.is_zero()) {
			t.kind = task_kind::intra;
			return t;
		}
		t.kind = task_kind::inter;
		const auto nb = neighbor(home, o, grid);
		if(!nb) return std::nullopt;
		if(*nb != home) t.resources.push_back(resource_id::accumulator(*nb));
		return t;
	}

	void append(task_list& out, std::optional<task> t) {
		if(!t) return;
		t->id = out.size();
		out.push_back(std::move(*t));
	}

	void check_dims(const grid_spec& grid, int stencil_dim) {
		if(grid.dim() != stencil_dim) throw std::invalid_argument("stencil dimension does not match grid dimension");
	}

} // namespace

std::string_view to_string(task_kind kind) {
	switch(kind) {
	case task_kind::intra: return "intra";
	case task_kind::inter: return "inter";
	case task_kind::reduce: return "reduce";
	}
	return "?";
}

std::string to_string(const resource_id& r) {
	if(r.is_accumulator()) return "acc[" + std::to_string(r.cell) + "]";
	return "buf[" + std::to_string(r.cell) + "." + std::to_string(r.slot) + "]";
}

stencil_order::stencil_order(stencil base, std::vector<std::size_t> permutation) : m_ordered(base), m_permutation(std::move(permutation)) {
	if(m_permutation.size() != base.size()) {
		throw std::invalid_argument("order has " + std::to_string(m_permutation.size()) + " entries, stencil has " + std::to_string(base.size()));
	}
	std::vector<bool> used(base.size(), false);
	std::vector<offset> ordered;
	for(const auto p : m_permutation) {
		if(p >= base.size() || used[p]) throw std::invalid_argument("order is not a permutation of the stencil entries");
		used[p] = true;
		ordered.push_back(base[p]);
	}
	m_ordered = stencil(base.dim(), std::move(ordered));
}

stencil_order stencil_order::from_offsets(int dim, std::vector<offset> ordered) {
	stencil s(dim, std::move(ordered));
	return identity(std::move(s));
}

stencil_order stencil_order::identity(stencil base) {
	std::vector<std::size_t> perm(base.size());
	std::iota(perm.begin(), perm.end(), std::size_t{0});
	return stencil_order(std::move(base), std::move(perm));
}

std::string stencil_order::describe() const {
	std::string s;
	for(std::size_t i = 0; i < size(); ++i) {
		if(i > 0) s += ";";
		s += to_string(m_ordered[i], dim());
	}
	return s;
}

stencil_order order_preset(std::string_view name, int dim) {
	if(dim == 2) {
		const offset intra{0, 0}, down{0, -1}, down_right{1, -1}, right{1, 0}, up_right{1, 1};
		if(name == "naive") return stencil_order::from_offsets(2, {intra, down, down_right, right, up_right});
		if(name == "bad") return stencil_order::from_offsets(2, {intra, down, down_right, up_right, right});
		if(name == "opt") return stencil_order::from_offsets(2, {right, down_right, up_right, down, intra});
	} else if(dim == 3) {
		if(name == "naive") return stencil_order::identity(backward_half_stencil(3));
		if(name == "bad") return order_with_displacement(3, backward_half_stencil(3).size());
		if(name == "opt") {
			// found by random search over +x-first, intra-last orders; no simple rule reproduces it
			return stencil_order::from_offsets(3, {{1, 0, 0}, {1, 1, 0}, {1, 1, 1}, {1, -1, 0}, {1, -1, -1}, {1, 0, -1}, {1, -1, 1},
			                                       {0, -1, 1}, {1, 1, -1}, {0, -1, 0}, {0, 0, -1}, {0, -1, -1}, {1, 0, 1}, {0, 0, 0}});
		}
	} else {
		throw std::invalid_argument("order presets exist for 2D and 3D only");
	}
	throw std::invalid_argument("unknown order preset '" + std::string(name) + "' (expected naive, bad or opt)");
}

stencil_order order_with_displacement(int dim, std::size_t delta) {
	const auto base = backward_half_stencil(dim);
	const auto n = base.size();
	if(delta < 1 || delta > n) throw std::invalid_argument("displacement must lie in [1, " + std::to_string(n) + "]");
	if(delta == 1) return order_preset("opt", dim);
	const auto x = *base.find(plus_x(dim));
	const auto intra = base.intra_index();
	std::vector<std::size_t> forward, in_plane;
	for(std::size_t i = 0; i < n; ++i) {
		if(i == x || i == intra) continue;
		(base[i].d[0] > 0 ? forward : in_plane).push_back(i);
	}
	std::vector<std::size_t> perm{intra};
	perm.insert(perm.end(), forward.begin(), forward.end());
	perm.insert(perm.end(), in_plane.begin(), in_plane.end());
	perm.insert(perm.begin() + static_cast<std::ptrdiff_t>(delta - 1), x);
	return stencil_order(base, std::move(perm));
}

std::size_t displacement(const stencil_order& order) {
	const auto pos = order.ordered().find(plus_x(order.dim()));
	if(!pos) throw std::invalid_argument("order lacks the +x entry");
	return *pos + 1;
}

task_list generate_basic(const grid_spec& grid, const stencil_order& order) {
	check_dims(grid, order.dim());
	task_list out;
	out.reserve(grid.cell_count() * order.size());
	for(std::size_t c = 0; c < grid.cell_count(); ++c) {
		for(std::size_t e = 0; e < order.size(); ++e) {
			append(out, make_accumulator_task(grid, cell_id{c}, order[e], e));
		}
	}
	return out;
}

task_list generate_loopex(const grid_spec& grid, const stencil& s) {
	check_dims(grid, s.dim());
	// intra first, then the remaining entries in stencil order
	std::vector<std::size_t> entries{s.intra_index()};
	for(std::size_t e = 0; e < s.size(); ++e) {
		if(e != s.intra_index()) entries.push_back(e);
	}
	std::vector<std::vector<cell_id>> by_color(color_count(grid));
	for(std::size_t c = 0; c < grid.cell_count(); ++c) {
		by_color[color(cell_id{c}, grid)].push_back(cell_id{c});
	}
	task_list out;
	out.reserve(grid.cell_count() * s.size());
	for(const auto e : entries) {
		for(const auto& cells : by_color) {
			for(const auto cell : cells) {
				append(out, make_accumulator_task(grid, cell, s[e], e));
			}
		}
	}
	return out;
}

task_list generate_loopex(const grid_spec& grid) { return generate_loopex(grid, canonical_half_stencil(grid.dim())); }

std::vector<resource_id> buffer_slots_of(cell_id cell, const grid_spec& grid, const stencil& s) {
	const auto n = static_cast<std::uint32_t>(s.size());
	std::vector<resource_id> slots;
	for(std::uint32_t e = 0; e < n; ++e) {
		if(s[e].is_zero()) {
			slots.push_back(resource_id::buffer(cell, e));
			continue;
		}
		if(neighbor(cell, s[e], grid)) slots.push_back(resource_id::buffer(cell, e));
		if(neighbor(cell, -s[e], grid)) slots.push_back(resource_id::buffer(cell, n + e));
	}
	std::sort(slots.begin(), slots.end());
	return slots;
}

task_list generate_buffered(const grid_spec& grid, const stencil& s) {
	check_dims(grid, s.dim());
	const auto n = static_cast<std::uint32_t>(s.size());
	task_list out;
	out.reserve(grid.cell_count() * (s.size() + 1));
	for(std::size_t c = 0; c < grid.cell_count(); ++c) {
		const cell_id home{c};
		for(std::uint32_t e = 0; e < n; ++e) {
			task t;
			t.home = home;
			t.off = s[e];
			t.stencil_entry = e;
			t.resources.push_back(resource_id::buffer(home, e));
			if(s[e].is_zero()) {
				t.kind = task_kind::intra;
			} else {
				t.kind = task_kind::inter;
				const auto nb = neighbor(home, s[e], grid);
				if(!nb) continue;
				t.resources.push_back(resource_id::buffer(*nb, n + e));
			}
			append(out, std::move(t));
		}
	}
	for(std::size_t c = 0; c < grid.cell_count(); ++c) {
		const cell_id home{c};
		task t;
		t.kind = task_kind::reduce;
		t.home = home;
		t.resources.push_back(resource_id::accumulator(home));
		const auto slots = buffer_slots_of(home, grid, s);
		t.resources.insert(t.resources.end(), slots.begin(), slots.end());
		append(out, std::move(t));
	}
	return out;
}

task_list generate_buffered(const grid_spec& grid) { return generate_buffered(grid, canonical_half_stencil(grid.dim())); }

nested_plan::nested_plan(grid_spec grid, stencil_order chain) : m_grid(std::move(grid)), m_chain(std::move(chain)) { check_dims(m_grid, m_chain.dim()); }

std::optional<task> nested_plan::make_chain_task(cell_id cell, std::size_t chain_pos) const {
	for(auto pos = chain_pos; pos < m_chain.size(); ++pos) {
		auto t = make_accumulator_task(m_grid, cell, m_chain[pos], pos);
		if(t) return t;
	}
	return std::nullopt;
}

std::size_t nested_plan::total_tasks() const {
	std::size_t total = 0;
	for(std::size_t c = 0; c < m_grid.cell_count(); ++c) {
		for(std::size_t pos = 0; pos < m_chain.size(); ++pos) {
			if(m_chain[pos].is_zero() || neighbor(cell_id{c}, m_chain[pos], m_grid)) ++total;
		}
	}
	return total;
}

task_list nested_plan::initial() const {
	task_list out;
	out.reserve(m_grid.cell_count());
	for(std::size_t c = 0; c < m_grid.cell_count(); ++c) {
		append(out, make_chain_task(cell_id{c}, 0));
	}
	return out;
}

std::optional<task> nested_plan::continuation(const task& parent) const { return make_chain_task(parent.home, parent.stencil_entry + 1); }

nested_plan make_nested_plan(const grid_spec& grid) { return nested_plan(grid, stencil_order::identity(canonical_half_stencil(grid.dim()))); }

nested_plan make_nested_plan(const grid_spec& grid, stencil_order chain) { return nested_plan(grid, std::move(chain)); }

std::string_view to_string(strategy s) {
	switch(s) {
	case strategy::basic: return "basic";
	case strategy::loopex: return "loopex";
	case strategy::nested: return "nested";
	case strategy::buffered: return "buffered";
	}
	return "?";
}

strategy parse_strategy(std::string_view name) {
	if(name == "basic") return strategy::basic;
	if(name == "loopex") return strategy::loopex;
	if(name == "nested") return strategy::nested;
	if(name == "buffered") return strategy::buffered;
	throw std::invalid_argument("unknown strategy '" + std::string(name) + "' (expected basic, loopex, nested or buffered)");
}

} // namespace stencildag
