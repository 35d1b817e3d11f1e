#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "pbftpool/params.hpp"

namespace pbftpool {

// One CTMC state: node counts per pool plus the transaction queue length.
// Every valid state satisfies h + w + r = N and 0 <= q <= K.
struct SystemState {
    int h = 0;  // hot-pool nodes
    int w = 0;  // warm-pool nodes
    int r = 0;  // repair-pool nodes
    int q = 0;  // transactions in the hot pool, incl. in service

    auto operator<=>(const SystemState&) const = default;
};

struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// All states with h+w+r=N, 0<=q<=K in canonical order: lexicographic by
// (h, r, q) with w derived. The index map is a bijection, so enumeration
// order and matrix layout are deterministic.
class StateSpace {
public:
    static constexpr std::int64_t kDefaultCeiling = 10'000'000;

    StateSpace(int n_total, int k_capacity, std::int64_t ceiling = kDefaultCeiling);

    int size() const { return static_cast<int>(states_.size()); }
    const SystemState& state_at(int index) const { return states_[static_cast<size_t>(index)]; }
    const std::vector<SystemState>& states() const { return states_; }

    // Throws std::out_of_range for tuples outside the space.
    int index_of(const SystemState& s) const;
    bool contains(const SystemState& s) const;

    int n_total() const { return n_total_; }
    int k_capacity() const { return k_capacity_; }

    static std::int64_t state_count(int n_total, int k_capacity);

private:
    int n_total_;
    int k_capacity_;
    std::vector<SystemState> states_;
};

StateSpace enumerate_states(const SystemParams& params,
                            std::int64_t ceiling = StateSpace::kDefaultCeiling);

}  // namespace pbftpool
