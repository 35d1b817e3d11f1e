#include "pbftpool/generator.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <ostream>

namespace pbftpool {

const char* to_string(EventKind kind) {
    switch (kind) {
        case EventKind::Arrival: return "arrival";
        case EventKind::ConsensusCompletion: return "consensus_completion";
        case EventKind::Failure: return "failure";
        case EventKind::RepairCompletion: return "repair_completion";
        case EventKind::HpMigration: return "hp_migration";
        case EventKind::WpMigration: return "wp_migration";
    }
    return "unknown";
}

namespace {

template <typename Emit>
void for_each_transition(const SystemState& s, const SystemParams& p, Emit&& emit) {
    const int quorum = p.quorum();
    if (s.q < p.k_capacity && p.lambda > 0)
        emit(EventKind::Arrival, SystemState{s.h, s.w, s.r, s.q + 1}, p.lambda);
    if (s.h >= quorum && s.q > 0 && p.mu_h > 0)
        emit(EventKind::ConsensusCompletion, SystemState{s.h, s.w, s.r, s.q - 1}, p.mu_h);
    if (s.h > 0 && p.xi > 0)
        emit(EventKind::Failure, SystemState{s.h - 1, s.w, s.r + 1, s.q}, s.h * p.xi);
    if (s.r > 0 && p.mu_r > 0)
        emit(EventKind::RepairCompletion, SystemState{s.h, s.w + 1, s.r - 1, s.q}, p.mu_r);
    if (s.h > quorum && p.beta_h > 0)
        emit(EventKind::HpMigration, SystemState{s.h - 1, s.w + 1, s.r, s.q}, p.beta_h);
    if (s.w > 0 && p.beta_w > 0)
        emit(EventKind::WpMigration, SystemState{s.h + 1, s.w - 1, s.r, s.q}, p.beta_w);
}

}  // namespace

std::vector<Transition> transitions_from(const SystemState& s, const SystemParams& p,
                                         const StateSpace& space) {
    std::vector<Transition> out;
    out.reserve(kEventKindCount);
    const int source = space.index_of(s);
    for_each_transition(s, p, [&](EventKind kind, const SystemState& target, double rate) {
        out.push_back({source, space.index_of(target), rate, kind});
    });
    return out;
}

GeneratorMatrix build_generator(const StateSpace& space, const SystemParams& p) {
    if (space.n_total() != p.n_total || space.k_capacity() != p.k_capacity)
        throw std::invalid_argument("state space does not match params");
    const int n = space.size();

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<size_t>(n) * (kEventKindCount + 1));
    for (int i = 0; i < n; ++i) {
        const SystemState& s = space.state_at(i);
        double exit_rate = 0.0;
        for_each_transition(s, p, [&](EventKind, const SystemState& target, double rate) {
            triplets.emplace_back(i, space.index_of(target), rate);
            exit_rate += rate;
        });
        if (exit_rate > 0) triplets.emplace_back(i, i, -exit_rate);
    }

    GeneratorMatrix gen;
    gen.rates.resize(n, n);
    gen.rates.setFromTriplets(triplets.begin(), triplets.end());
    gen.rates.makeCompressed();
    return gen;
}

std::pair<StateSpace, GeneratorMatrix> build_generator(const SystemParams& p,
                                                       std::int64_t ceiling) {
    StateSpace space(p.n_total, p.k_capacity, ceiling);
    GeneratorMatrix gen = build_generator(space, p);
    return {std::move(space), std::move(gen)};
}

namespace {

// Iterative Tarjan over the reachable subgraph; recursion depth would be
// unbounded on long q-chains.
struct SccResult {
    std::vector<std::vector<int>> components;  // in reverse topological order
};

SccResult strongly_connected_components(const std::vector<std::vector<int>>& adj) {
    const int n = static_cast<int>(adj.size());
    std::vector<int> index(n, -1), lowlink(n, 0), on_stack(n, 0);
    std::vector<int> stack;
    SccResult result;
    int next_index = 0;

    struct Frame {
        int v;
        size_t edge;
    };
    std::vector<Frame> call_stack;

    for (int root = 0; root < n; ++root) {
        if (index[root] != -1) continue;
        call_stack.push_back({root, 0});
        while (!call_stack.empty()) {
            auto& [v, edge] = call_stack.back();
            if (edge == 0) {
                index[v] = lowlink[v] = next_index++;
                stack.push_back(v);
                on_stack[v] = 1;
            }
            bool descended = false;
            while (edge < adj[static_cast<size_t>(v)].size()) {
                const int u = adj[static_cast<size_t>(v)][edge++];
                if (index[u] == -1) {
                    call_stack.push_back({u, 0});
                    descended = true;
                    break;
                }
                if (on_stack[u]) lowlink[v] = std::min(lowlink[v], index[u]);
            }
            if (descended) continue;
            if (lowlink[v] == index[v]) {
                std::vector<int> comp;
                int u;
                do {
                    u = stack.back();
                    stack.pop_back();
                    on_stack[u] = 0;
                    comp.push_back(u);
                } while (u != v);
                result.components.push_back(std::move(comp));
            }
            const int child = v;
            call_stack.pop_back();
            if (!call_stack.empty()) {
                int parent = call_stack.back().v;
                lowlink[parent] = std::min(lowlink[parent], lowlink[child]);
            }
        }
    }
    return result;
}

}  // namespace

ReachabilityReport reachability_report(const StateSpace& space, const GeneratorMatrix& gen,
                                       const SystemState& start) {
    const int n = space.size();
    const int start_idx = space.index_of(start);
    const auto& Q = gen.rates;

    // Forward BFS; the reachable set is closed by construction.
    std::vector<int> local(n, -1);  // global index -> position in `reachable`
    std::vector<int> reachable;
    reachable.push_back(start_idx);
    local[start_idx] = 0;
    for (size_t head = 0; head < reachable.size(); ++head) {
        const int i = reachable[head];
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(Q, i); it; ++it) {
            const int j = static_cast<int>(it.col());
            if (j == i || it.value() <= 0) continue;
            if (local[j] == -1) {
                local[j] = static_cast<int>(reachable.size());
                reachable.push_back(j);
            }
        }
    }

    // Subgraph adjacency in local indices.
    std::vector<std::vector<int>> adj(reachable.size());
    for (size_t v = 0; v < reachable.size(); ++v) {
        const int i = reachable[v];
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(Q, i); it; ++it) {
            const int j = static_cast<int>(it.col());
            if (j == i || it.value() <= 0) continue;
            adj[v].push_back(local[j]);
        }
    }

    SccResult scc = strongly_connected_components(adj);
    std::vector<int> component_of(reachable.size());
    for (size_t c = 0; c < scc.components.size(); ++c)
        for (int v : scc.components[c]) component_of[static_cast<size_t>(v)] = static_cast<int>(c);

    ReachabilityReport report;
    std::vector<int> closed_components;
    for (size_t c = 0; c < scc.components.size(); ++c) {
        bool closed = true;
        for (int v : scc.components[c]) {
            for (int u : adj[static_cast<size_t>(v)]) {
                if (component_of[static_cast<size_t>(u)] != static_cast<int>(c)) {
                    closed = false;
                    break;
                }
            }
            if (!closed) break;
        }
        if (closed) closed_components.push_back(static_cast<int>(c));
    }

    report.closed_class_count = static_cast<int>(closed_components.size());
    if (report.closed_class_count == 1) {
        for (int v : scc.components[static_cast<size_t>(closed_components.front())])
            report.recurrent.push_back(reachable[static_cast<size_t>(v)]);
        std::sort(report.recurrent.begin(), report.recurrent.end());
    }
    report.single_closed_class =
        report.closed_class_count == 1 && report.recurrent.size() == reachable.size();

    std::sort(reachable.begin(), reachable.end());
    report.reachable = std::move(reachable);
    return report;
}

void write_matrix_market(const GeneratorMatrix& gen, std::ostream& out) {
    const auto& Q = gen.rates;
    fmt::print(out, "%%MatrixMarket matrix coordinate real general\n");
    fmt::print(out, "{} {} {}\n", Q.rows(), Q.cols(), Q.nonZeros());
    for (int i = 0; i < Q.outerSize(); ++i)
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(Q, i); it; ++it)
            fmt::print(out, "{} {} {}\n", it.row() + 1, it.col() + 1, it.value());
}

}  // namespace pbftpool
