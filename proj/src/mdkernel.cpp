#include "stencildag/mdkernel.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

namespace stencildag {

namespace {

	std::uint64_t mix64(std::uint64_t z) {
		z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
		z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
		return z ^ (z >> 31);
	}

	std::uint64_t encode(const offset& o) {
		return static_cast<std::uint64_t>((o.d[0] + 1) + 3 * (o.d[1] + 1) + 9 * (o.d[2] + 1));
	}

	/// a times a hashed weight in [-64, 64); not symmetric on its own, zero when a is zero.
	std::int64_t directed_term(std::int64_t a, std::int64_t b, const offset& o) {
		const auto h = mix64(static_cast<std::uint64_t>(a) * 0x9e3779b97f4a7c15ULL ^ mix64(static_cast<std::uint64_t>(b) + 0x632be59bd9b4e019ULL) ^ (encode(o) << 56));
		return a * (static_cast<std::int64_t>(h & 0x7f) - 64);
	}

	std::size_t slots_for(int dim) { return 2 * canonical_half_stencil(dim).size(); }

} // namespace

std::vector<std::int64_t> make_charges(const grid_spec& grid, std::uint64_t seed) {
	std::mt19937_64 rng(seed);
	std::vector<std::int64_t> charges(grid.cell_count());
	for(auto& c : charges) c = static_cast<std::int64_t>(rng() >> 48) - (1 << 15);
	return charges;
}

contribution pair_contribution(std::int64_t charge_a, std::int64_t charge_b, const offset& o) {
	const auto g = directed_term(charge_a, charge_b, o) - directed_term(charge_b, charge_a, -o);
	return {g, -g};
}

std::int64_t intra_contribution(std::int64_t charge) { return charge * (static_cast<std::int64_t>(mix64(static_cast<std::uint64_t>(charge) ^ 0x5851f42d4c957f2dULL) & 0x7f) - 64); }

payload_store::payload_store(const grid_spec& grid, std::vector<std::int64_t> charges)
    : m_grid(grid), m_slots_per_cell(slots_for(grid.dim())), m_charges(std::move(charges)), m_acc(grid.cell_count(), 0),
      m_buffers(grid.cell_count() * m_slots_per_cell, 0) {
	if(m_charges.size() != grid.cell_count()) throw std::invalid_argument("charge count does not match cell count");
}

std::int64_t& payload_store::slot(const resource_id& r) {
	if(r.is_accumulator()) return m_acc.at(r.cell);
	if(r.slot >= m_slots_per_cell) throw std::out_of_range("buffer slot out of range");
	return m_buffers.at(r.cell * m_slots_per_cell + r.slot);
}

void payload_store::apply(const task& t) {
	switch(t.kind) {
	case task_kind::intra: slot(t.resources.at(0)) += intra_contribution(m_charges[t.home.index]); break;
	case task_kind::inter: {
		const auto nb = neighbor(t.home, t.off, m_grid);
		if(!nb) throw std::logic_error("inter task with truncated neighbor");
		const auto c = pair_contribution(m_charges[t.home.index], m_charges[nb->index], t.off);
		const auto& target_a = t.resources.at(0);
		const auto& target_b = t.resources.size() > 1 ? t.resources[1] : t.resources[0];
		slot(target_a) += c.to_a;
		slot(target_b) += c.to_b;
		break;
	}
	case task_kind::reduce: {
		std::int64_t sum = 0;
		for(std::size_t i = 1; i < t.resources.size(); ++i) sum += slot(t.resources[i]);
		slot(t.resources.at(0)) += sum;
		break;
	}
	}
}

accumulators payload_store::result() const { return m_acc; }

accumulators execute_with_payload(strategy s, const grid_spec& grid, std::uint64_t seed, const payload_options& opts) {
	payload_store store(grid, make_charges(grid, seed));
	const auto canonical = stencil_order::identity(canonical_half_stencil(grid.dim()));
	sim_config cfg = opts.sim;
	cfg.record_timeline = true;
	sim_result run;
	const task_graph* graph = nullptr;
	task_graph static_graph;
	switch(s) {
	case strategy::basic: static_graph = detect_dependencies(generate_basic(grid, opts.order.value_or(canonical))); break;
	case strategy::loopex: static_graph = detect_dependencies(generate_loopex(grid)); break;
	case strategy::buffered: static_graph = detect_dependencies(generate_buffered(grid)); break;
	case strategy::nested: break;
	}
	if(s == strategy::nested) {
		run = simulate_dynamic(make_nested_plan(grid, opts.chain.value_or(canonical)), cfg);
		graph = &*run.realized;
	} else {
		run = simulate(static_graph, cfg);
		graph = &static_graph;
	}
	for(const auto& e : run.timeline) store.apply((*graph)[e.task]);
	return store.result();
}

accumulators reference_oracle(const grid_spec& grid, std::uint64_t seed) {
	const auto charges = make_charges(grid, seed);
	const auto full = full_neighborhood(grid.dim());
	accumulators acc(grid.cell_count(), 0);
	for(std::size_t a = 0; a < grid.cell_count(); ++a) {
		acc[a] += intra_contribution(charges[a]);
		for(const auto& o : full) {
			if(o.is_zero()) continue;
			const auto b = neighbor(cell_id{a}, o, grid);
			if(!b) continue;
			// every interaction is visited once from each side; keep only this side's share
			acc[a] += pair_contribution(charges[a], charges[b->index], o).to_a;
		}
	}
	return acc;
}

std::int64_t intra_total(const grid_spec& grid, std::uint64_t seed) {
	std::int64_t total = 0;
	for(const auto c : make_charges(grid, seed)) total += intra_contribution(c);
	return total;
}

} // namespace stencildag
