#include "pbftpool/state_space.hpp"

#include <fmt/format.h>

namespace pbftpool {

std::int64_t StateSpace::state_count(int n_total, int k_capacity) {
    const std::int64_t pools = static_cast<std::int64_t>(n_total + 1) * (n_total + 2) / 2;
    return pools * (k_capacity + 1);
}

StateSpace::StateSpace(int n_total, int k_capacity, std::int64_t ceiling)
    : n_total_(n_total), k_capacity_(k_capacity) {
    if (n_total < 0 || k_capacity < 0)
        throw std::invalid_argument("n_total and k_capacity must be non-negative");
    const std::int64_t count = state_count(n_total, k_capacity);
    if (count > ceiling)
        throw CapacityError(fmt::format(
            "state space has {} states, above the ceiling of {}", count, ceiling));

    states_.reserve(static_cast<size_t>(count));
    for (int h = 0; h <= n_total; ++h)
        for (int r = 0; r + h <= n_total; ++r)
            for (int q = 0; q <= k_capacity; ++q)
                states_.push_back({h, n_total - h - r, r, q});
}

bool StateSpace::contains(const SystemState& s) const {
    return s.h >= 0 && s.w >= 0 && s.r >= 0 && s.h + s.w + s.r == n_total_ &&
           s.q >= 0 && s.q <= k_capacity_;
}

int StateSpace::index_of(const SystemState& s) const {
    if (!contains(s))
        throw std::out_of_range(fmt::format("state ({},{},{},{}) not in space N={}, K={}",
                                            s.h, s.w, s.r, s.q, n_total_, k_capacity_));
    // Position of (h, r) among pairs ordered lexicographically, then q.
    const std::int64_t hr_offset =
        static_cast<std::int64_t>(s.h) * (n_total_ + 1) -
        static_cast<std::int64_t>(s.h) * (s.h - 1) / 2 + s.r;
    return static_cast<int>(hr_offset * (k_capacity_ + 1) + s.q);
}

StateSpace enumerate_states(const SystemParams& params, std::int64_t ceiling) {
    return StateSpace(params.n_total, params.k_capacity, ceiling);
}

}  // namespace pbftpool
