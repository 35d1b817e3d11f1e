#include <doctest.h>

#include <algorithm>
#include <map>
#include <sstream>

#include "pbftpool/generator.hpp"

using namespace pbftpool;

namespace {

std::map<EventKind, Transition> by_kind(const std::vector<Transition>& transitions) {
    std::map<EventKind, Transition> out;
    for (const Transition& t : transitions) out[t.kind] = t;
    return out;
}

}  // namespace

TEST_CASE("transition rules at (10,5,0,0) with defaults") {
    const SystemParams p;
    const StateSpace space(p.n_total, p.k_capacity);
    const auto transitions = transitions_from({10, 5, 0, 0}, p, space);
    const auto kinds = by_kind(transitions);

    REQUIRE(transitions.size() == 3);
    REQUIRE(kinds.count(EventKind::Arrival));
    CHECK(kinds.at(EventKind::Arrival).rate == 4.0);
    CHECK(space.state_at(kinds.at(EventKind::Arrival).target) == SystemState{10, 5, 0, 1});
    REQUIRE(kinds.count(EventKind::Failure));
    CHECK(kinds.at(EventKind::Failure).rate == 5.0);  // h * xi = 10 * 0.5
    CHECK(space.state_at(kinds.at(EventKind::Failure).target) == SystemState{9, 5, 1, 0});
    REQUIRE(kinds.count(EventKind::WpMigration));
    CHECK(kinds.at(EventKind::WpMigration).rate == 8.0);
    CHECK(space.state_at(kinds.at(EventKind::WpMigration).target) == SystemState{11, 4, 0, 0});
    // h = 3f+1 exactly: no hot-pool migration; q = 0: no completion; r = 0: no repair
    CHECK_FALSE(kinds.count(EventKind::HpMigration));
    CHECK_FALSE(kinds.count(EventKind::ConsensusCompletion));
    CHECK_FALSE(kinds.count(EventKind::RepairCompletion));
}

TEST_CASE("consensus stalls below quorum") {
    const SystemParams p;
    const StateSpace space(p.n_total, p.k_capacity);
    const auto kinds = by_kind(transitions_from({9, 6, 0, 5}, p, space));
    CHECK_FALSE(kinds.count(EventKind::ConsensusCompletion));
}

TEST_CASE("full queue emits no arrival transition") {
    const SystemParams p;
    const StateSpace space(p.n_total, p.k_capacity);
    for (const SystemState& s :
         {SystemState{15, 0, 0, 20}, SystemState{10, 3, 2, 20}, SystemState{0, 0, 15, 20}}) {
        const auto kinds = by_kind(transitions_from(s, p, space));
        CHECK_FALSE(kinds.count(EventKind::Arrival));
    }
}

TEST_CASE("event guards hold across a whole space") {
    SystemParams p;
    p.f = 1;
    p.n_total = 6;
    p.k_capacity = 3;
    const StateSpace space(p.n_total, p.k_capacity);
    for (const SystemState& s : space.states()) {
        for (const Transition& t : transitions_from(s, p, space)) {
            CHECK(t.rate > 0);
            CHECK(t.source != t.target);
            const SystemState& target = space.state_at(t.target);
            CHECK(target.h + target.w + target.r == p.n_total);
            CHECK(target.q >= 0);
            CHECK(target.q <= p.k_capacity);
            switch (t.kind) {
                case EventKind::ConsensusCompletion:
                    CHECK(s.h >= p.quorum());
                    CHECK(s.q > 0);
                    break;
                case EventKind::HpMigration: CHECK(s.h > p.quorum()); break;
                case EventKind::Failure: CHECK(s.h > 0); break;
                case EventKind::RepairCompletion: CHECK(s.r > 0); break;
                case EventKind::WpMigration: CHECK(s.w > 0); break;
                case EventKind::Arrival: CHECK(s.q < p.k_capacity); break;
            }
        }
    }
}

TEST_CASE("generator rows sum to zero with non-negative off-diagonals") {
    const auto [space, gen] = build_generator(SystemParams{});
    REQUIRE(gen.size() == 2856);
    for (int i = 0; i < gen.size(); ++i) {
        double sum = 0.0;
        int off_diag = 0;
        for (SparseRowMatrix::InnerIterator it(gen.rates, i); it; ++it) {
            sum += it.value();
            if (it.col() != i) {
                CHECK(it.value() > 0);
                ++off_diag;
            }
        }
        CHECK(std::abs(sum) <= 1e-12);
        CHECK(off_diag <= kEventKindCount);
    }
}

TEST_CASE("tiny generator has hand-checkable entries") {
    SystemParams p;
    p.f = 0;
    p.n_total = 1;
    p.k_capacity = 1;
    const auto [space, gen] = build_generator(p);
    REQUIRE(gen.size() == 6);
    const int from = space.index_of({1, 0, 0, 0});
    const int to = space.index_of({0, 0, 1, 0});
    CHECK(gen.rates.coeff(from, to) == p.xi);  // failure with h = 1
    CHECK(gen.rates.coeff(from, space.index_of({1, 0, 0, 1})) == p.lambda);
    CHECK(gen.rates.coeff(space.index_of({1, 0, 0, 1}), from) == p.mu_h);
}

TEST_CASE("disabled events leave their rows empty") {
    SystemParams p;
    p.beta_h = 0.0;
    const auto [space, gen] = build_generator(p);
    // at h = N only arrival / completion / failure remain
    const int idx = space.index_of({15, 0, 0, 0});
    std::vector<EventKind> kinds;
    for (const Transition& t : transitions_from({15, 0, 0, 0}, p, space))
        kinds.push_back(t.kind);
    CHECK(kinds == std::vector{EventKind::Arrival, EventKind::Failure});
    int entries = 0;
    for (SparseRowMatrix::InnerIterator it(gen.rates, idx); it; ++it)
        if (it.col() != idx) ++entries;
    CHECK(entries == 2);
}

TEST_CASE("two builds produce bit-identical matrices") {
    const SystemParams p;
    const auto [space_a, gen_a] = build_generator(p);
    const auto [space_b, gen_b] = build_generator(p);
    REQUIRE(gen_a.rates.nonZeros() == gen_b.rates.nonZeros());
    for (int i = 0; i < gen_a.size(); ++i) {
        SparseRowMatrix::InnerIterator a(gen_a.rates, i), b(gen_b.rates, i);
        for (; a && b; ++a, ++b) {
            CHECK(a.col() == b.col());
            CHECK(a.value() == b.value());
        }
        CHECK_FALSE(a);
        CHECK_FALSE(b);
    }
}

TEST_CASE("reachability: defaults reach every state as one class") {
    const SystemParams p;
    const auto [space, gen] = build_generator(p);
    const ReachabilityReport report = reachability_report(space, gen, {15, 0, 0, 0});
    CHECK(report.reachable.size() == 2856);
    CHECK(report.single_closed_class);
    CHECK(report.closed_class_count == 1);
    CHECK(report.recurrent.size() == 2856);
}

TEST_CASE("reachability: no failures and no hot migration pins h = N") {
    SystemParams p;
    p.xi = 0.0;
    p.beta_h = 0.0;
    const auto [space, gen] = build_generator(p);
    const ReachabilityReport report = reachability_report(space, gen, {15, 0, 0, 0});
    CHECK(report.reachable.size() == static_cast<size_t>(p.k_capacity + 1));
    for (int idx : report.reachable) CHECK(space.state_at(idx).h == 15);
    CHECK(report.single_closed_class);
}

TEST_CASE("reachability: unrepaired failures leave a transient sweep to h = 0") {
    SystemParams p;
    p.beta_w = 0.0;
    p.mu_r = 0.0;
    const auto [space, gen] = build_generator(p);
    const ReachabilityReport report = reachability_report(space, gen, {15, 0, 0, 0});
    CHECK_FALSE(report.single_closed_class);
    CHECK(report.closed_class_count == 1);
    CHECK(report.has_transient_states());
    // the absorbing class is the full-queue, all-failed state
    REQUIRE(report.recurrent.size() == 1);
    const SystemState& absorbing = space.state_at(report.recurrent[0]);
    CHECK(absorbing.h == 0);
    CHECK(absorbing.r == 15);
    CHECK(absorbing.q == 20);
}

TEST_CASE("matrix market export is 1-based coordinate text") {
    SystemParams p;
    p.f = 0;
    p.n_total = 1;
    p.k_capacity = 1;
    const auto [space, gen] = build_generator(p);
    std::ostringstream out;
    write_matrix_market(gen, out);
    std::istringstream in(out.str());
    std::string header;
    std::getline(in, header);
    CHECK(header == "%%MatrixMarket matrix coordinate real general");
    int rows = 0, cols = 0;
    long long nnz = 0;
    in >> rows >> cols >> nnz;
    CHECK(rows == 6);
    CHECK(cols == 6);
    CHECK(nnz == gen.rates.nonZeros());
    int r = 0, c = 0;
    double v = 0;
    long long count = 0;
    while (in >> r >> c >> v) {
        CHECK(r >= 1);
        CHECK(r <= 6);
        CHECK(c >= 1);
        CHECK(c <= 6);
        CHECK(v == gen.rates.coeff(r - 1, c - 1));
        ++count;
    }
    CHECK(count == nnz);
}
