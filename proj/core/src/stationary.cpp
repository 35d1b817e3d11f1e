#include "pbftpool/stationary.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <vector>

namespace pbftpool {

const char* to_string(SolveMethod method) {
    switch (method) {
        case SolveMethod::Auto: return "auto";
        case SolveMethod::DenseDirect: return "dense_direct";
        case SolveMethod::SparseDirect: return "sparse_direct";
        case SolveMethod::PowerIteration: return "power_iteration";
    }
    return "unknown";
}

namespace {

using ColMatrix = Eigen::SparseMatrix<double>;

// Submatrix of Q over `support`. For a closed class every off-diagonal
// entry of a support row stays inside the support, so rows still sum to 0.
SparseRowMatrix restrict_to_support(const SparseRowMatrix& Q, std::span<const int> support) {
    const int m = static_cast<int>(support.size());
    std::vector<int> local(static_cast<size_t>(Q.rows()), -1);
    for (int v = 0; v < m; ++v) local[static_cast<size_t>(support[v])] = v;

    std::vector<Eigen::Triplet<double>> triplets;
    for (int v = 0; v < m; ++v) {
        const int i = support[v];
        for (SparseRowMatrix::InnerIterator it(Q, i); it; ++it) {
            const int u = local[static_cast<size_t>(it.col())];
            if (u >= 0) triplets.emplace_back(v, u, it.value());
        }
    }
    SparseRowMatrix sub(m, m);
    sub.setFromTriplets(triplets.begin(), triplets.end());
    sub.makeCompressed();
    return sub;
}

// pi Q as a row vector (the stationary residual before taking the norm).
Eigen::VectorXd left_product(const Eigen::VectorXd& pi, const SparseRowMatrix& Q) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(Q.cols());
    for (int i = 0; i < Q.outerSize(); ++i) {
        const double pi_i = pi[i];
        if (pi_i == 0.0) continue;
        for (SparseRowMatrix::InnerIterator it(Q, i); it; ++it)
            out[it.col()] += pi_i * it.value();
    }
    return out;
}

void clean_and_normalize(Eigen::VectorXd& pi) {
    double most_negative = 0.0;
    for (int i = 0; i < pi.size(); ++i) {
        if (pi[i] < most_negative) most_negative = pi[i];
        if (pi[i] < 0.0) pi[i] = 0.0;
    }
    if (most_negative < -1e-8)
        throw SingularSystemError(
            fmt::format("solution has negative mass {:.3e}", most_negative));
    const double total = pi.sum();
    if (!(total > 0.0) || !std::isfinite(total))
        throw SingularSystemError("solution mass is zero or non-finite");
    pi /= total;
}

// Balance system with the last equation replaced by normalization:
// A = Q^T except row m-1 is all ones; b = e_{m-1}.
Eigen::VectorXd solve_dense_direct(const SparseRowMatrix& sub, int dense_limit) {
    const int m = static_cast<int>(sub.rows());
    if (m > dense_limit)
        throw SolverError(fmt::format(
            "dense direct solve limited to {} states, got {}", dense_limit, m));

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < sub.outerSize(); ++i)
        for (SparseRowMatrix::InnerIterator it(sub, i); it; ++it)
            if (it.col() != m - 1) a(static_cast<int>(it.col()), i) = it.value();
    a.row(m - 1).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
    b[m - 1] = 1.0;

    Eigen::VectorXd pi = Eigen::PartialPivLU<Eigen::MatrixXd>(a).solve(b);
    if (!pi.allFinite()) throw SingularSystemError("dense LU produced non-finite entries");
    return pi;
}

Eigen::VectorXd solve_sparse_direct(const SparseRowMatrix& sub) {
    const int m = static_cast<int>(sub.rows());
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<size_t>(sub.nonZeros()) + static_cast<size_t>(m));
    for (int i = 0; i < sub.outerSize(); ++i)
        for (SparseRowMatrix::InnerIterator it(sub, i); it; ++it)
            if (it.col() != m - 1) triplets.emplace_back(static_cast<int>(it.col()), i, it.value());
    for (int j = 0; j < m; ++j) triplets.emplace_back(m - 1, j, 1.0);

    ColMatrix a(m, m);
    a.setFromTriplets(triplets.begin(), triplets.end());
    a.makeCompressed();

    Eigen::SparseLU<ColMatrix> lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success)
        throw SingularSystemError("sparse LU factorization failed");
    Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
    b[m - 1] = 1.0;
    Eigen::VectorXd pi = lu.solve(b);
    if (!pi.allFinite()) throw SingularSystemError("sparse LU produced non-finite entries");
    return pi;
}

Eigen::VectorXd solve_power_iteration(const SparseRowMatrix& sub, const SolveOptions& opts,
                                      std::int64_t& iterations) {
    const int m = static_cast<int>(sub.rows());
    double max_exit = 0.0;
    for (int i = 0; i < m; ++i) max_exit = std::max(max_exit, -sub.coeff(i, i));
    if (max_exit == 0.0) {
        // No transitions at all; only a single absorbing state is consistent.
        if (m == 1) {
            iterations = 0;
            return Eigen::VectorXd::Ones(1);
        }
        throw SolverError("zero generator over a multi-state support");
    }

    // Uniformization with a 1% margin so the discrete chain is aperiodic.
    const double uniform_rate = 1.01 * max_exit;
    SparseRowMatrix p = sub;
    p *= 1.0 / uniform_rate;
    for (int i = 0; i < m; ++i) p.coeffRef(i, i) += 1.0;

    Eigen::VectorXd pi = Eigen::VectorXd::Constant(m, 1.0 / m);
    Eigen::VectorXd next(m);
    for (std::int64_t k = 1; k <= opts.max_iterations; ++k) {
        next.noalias() = p.transpose() * pi;
        const double change = (next - pi).cwiseAbs().maxCoeff();
        pi.swap(next);
        if (k % 128 == 0) pi /= pi.sum();
        if (change <= opts.power_tol) {
            iterations = k;
            pi /= pi.sum();
            return pi;
        }
    }
    throw NonConvergenceError(fmt::format(
        "power iteration did not reach {:.1e} within {} iterations",
        opts.power_tol, opts.max_iterations));
}

}  // namespace

StationaryDistribution solve_stationary(const SparseRowMatrix& Q, std::span<const int> support,
                                        const SolveOptions& opts) {
    if (support.empty()) throw SolverError("empty support");
    const SparseRowMatrix sub = restrict_to_support(Q, support);
    const int m = static_cast<int>(sub.rows());

    auto run = [&](SolveMethod method, std::int64_t& iterations) -> Eigen::VectorXd {
        switch (method) {
            case SolveMethod::DenseDirect: return solve_dense_direct(sub, opts.dense_limit);
            case SolveMethod::SparseDirect: return solve_sparse_direct(sub);
            case SolveMethod::PowerIteration: return solve_power_iteration(sub, opts, iterations);
            default: return solve_sparse_direct(sub);
        }
    };

    auto finish = [&](Eigen::VectorXd local, SolveMethod used,
                      std::int64_t iterations) -> StationaryDistribution {
        clean_and_normalize(local);
        StationaryDistribution dist;
        dist.pi = Eigen::VectorXd::Zero(Q.rows());
        for (int v = 0; v < m; ++v) dist.pi[support[v]] = local[v];
        dist.method_used = used;
        dist.iterations = iterations;
        dist.residual = left_product(dist.pi, Q).cwiseAbs().maxCoeff();
        if (dist.residual > opts.residual_tol)
            throw SolverError(fmt::format("residual {:.3e} above tolerance {:.1e}",
                                          dist.residual, opts.residual_tol));
        return dist;
    };

    if (opts.method == SolveMethod::Auto) {
        try {
            std::int64_t iterations = 0;
            return finish(run(SolveMethod::SparseDirect, iterations), SolveMethod::SparseDirect, 0);
        } catch (const SolverError&) {
            std::int64_t iterations = 0;
            return finish(run(SolveMethod::PowerIteration, iterations),
                          SolveMethod::PowerIteration, iterations);
        }
    }
    std::int64_t iterations = 0;
    Eigen::VectorXd local = run(opts.method, iterations);
    return finish(std::move(local), opts.method, iterations);
}

StationaryDistribution solve_stationary(const SparseRowMatrix& Q, const SolveOptions& opts) {
    std::vector<int> support(static_cast<size_t>(Q.rows()));
    std::iota(support.begin(), support.end(), 0);
    return solve_stationary(Q, support, opts);
}

StationaryDistribution solve_stationary(const StateSpace& space, const GeneratorMatrix& gen,
                                        const SystemState& start, const SolveOptions& opts) {
    const ReachabilityReport report = reachability_report(space, gen, start);
    if (report.closed_class_count != 1)
        throw MultipleRecurrentClassesError(fmt::format(
            "{} closed communicating classes reachable from ({},{},{},{}); "
            "stationary distribution is not unique",
            report.closed_class_count, start.h, start.w, start.r, start.q));
    return solve_stationary(gen.rates, report.recurrent, opts);
}

void write_pi_csv(const StateSpace& space, const Eigen::VectorXd& pi, std::ostream& out) {
    fmt::print(out, "h,w,r,q,probability\n");
    for (int i = 0; i < space.size(); ++i) {
        const SystemState& s = space.state_at(i);
        fmt::print(out, "{},{},{},{},{}\n", s.h, s.w, s.r, s.q, pi[i]);
    }
}

}  // namespace pbftpool
