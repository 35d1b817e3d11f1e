#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include <Eigen/SparseCore>

#include "pbftpool/params.hpp"
#include "pbftpool/state_space.hpp"

namespace pbftpool {

enum class EventKind : std::uint8_t {
    Arrival = 0,
    ConsensusCompletion,
    Failure,
    RepairCompletion,
    HpMigration,
    WpMigration,
};
inline constexpr int kEventKindCount = 6;
const char* to_string(EventKind kind);

struct Transition {
    int source = -1;
    int target = -1;
    double rate = 0.0;
    EventKind kind = EventKind::Arrival;
};

// Infinitesimal generator over StateSpace indices. Off-diagonal (i,j) holds
// the total rate i->j; each diagonal is the negative row sum. A full-queue
// arrival is a self-loop and contributes nothing here; drop probability
// comes from the stationary mass at q = K.
struct GeneratorMatrix {
    Eigen::SparseMatrix<double, Eigen::RowMajor> rates;

    int size() const { return static_cast<int>(rates.rows()); }
};

// Event rules, applied to one state:
//   Arrival             lambda          (h,w,r,q+1)    iff q < K
//   ConsensusCompletion mu_h            (h,w,r,q-1)    iff h >= 3f+1 and q > 0
//   Failure             h * xi          (h-1,w,r+1,q)  iff h > 0
//   RepairCompletion    mu_r            (h,w+1,r-1,q)  iff r > 0
//   HpMigration         beta_h          (h-1,w+1,r,q)  iff h > 3f+1
//   WpMigration         beta_w          (h+1,w-1,r,q)  iff w > 0
// Zero-rate transitions are not emitted.
std::vector<Transition> transitions_from(const SystemState& s, const SystemParams& params,
                                         const StateSpace& space);

// `space` must match params.n_total / params.k_capacity.
GeneratorMatrix build_generator(const StateSpace& space, const SystemParams& params);

std::pair<StateSpace, GeneratorMatrix> build_generator(
    const SystemParams& params, std::int64_t ceiling = StateSpace::kDefaultCeiling);

struct ReachabilityReport {
    std::vector<int> reachable;        // indices reachable from the start state, ascending
    std::vector<int> recurrent;        // the unique closed communicating class, if single
    int closed_class_count = 0;        // closed classes within the reachable set
    bool single_closed_class = false;  // reachable set itself is one closed class

    bool has_transient_states() const {
        return closed_class_count == 1 && recurrent.size() < reachable.size();
    }
};

// BFS over the transition graph plus SCC analysis of the reachable set.
// The stationary solver consumes `recurrent`; states outside it keep pi = 0.
ReachabilityReport reachability_report(const StateSpace& space, const GeneratorMatrix& gen,
                                       const SystemState& start);

// Coordinate text export, 1-based indices ("%%MatrixMarket matrix coordinate
// real general").
void write_matrix_market(const GeneratorMatrix& gen, std::ostream& out);

}  // namespace pbftpool
