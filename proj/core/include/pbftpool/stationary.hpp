#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "pbftpool/generator.hpp"
#include "pbftpool/state_space.hpp"

namespace pbftpool {

struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NonConvergenceError : SolverError {
    using SolverError::SolverError;
};
struct MultipleRecurrentClassesError : SolverError {
    using SolverError::SolverError;
};
struct SingularSystemError : SolverError {
    using SolverError::SolverError;
};

enum class SolveMethod {
    Auto,            // sparse direct, falling back to power iteration
    DenseDirect,     // one balance equation replaced by normalization, dense LU
    SparseDirect,    // same system, sparse LU
    PowerIteration,  // uniformization P = I + Q/Lambda, iterated to fixpoint
};
const char* to_string(SolveMethod method);

struct SolveOptions {
    SolveMethod method = SolveMethod::Auto;
    double residual_tol = 1e-10;           // accept threshold on ||pi Q||_inf
    double power_tol = 1e-12;              // max-norm change stop for power iteration
    std::int64_t max_iterations = 1'000'000;
    int dense_limit = 5000;                // DenseDirect refuses above this
};

struct StationaryDistribution {
    Eigen::VectorXd pi;  // aligned to state order; zero outside the support
    SolveMethod method_used = SolveMethod::Auto;
    std::int64_t iterations = 0;  // 0 for direct methods
    double residual = 0.0;        // ||pi Q||_inf at acceptance
};

using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// Solves pi Q = 0, sum(pi) = 1 for an irreducible generator. Throws
// SolverError subtypes on failure; every accepted solution satisfies the
// residual tolerance.
StationaryDistribution solve_stationary(const SparseRowMatrix& Q, const SolveOptions& opts = {});

// Restricts the solve to a closed communicating class (`support`, ascending
// indices); all other entries of pi are zero.
StationaryDistribution solve_stationary(const SparseRowMatrix& Q, std::span<const int> support,
                                        const SolveOptions& opts = {});

// Model-level entry: derives the support from reachability_report(start).
// Throws MultipleRecurrentClassesError when the stationary distribution is
// not unique for that start state.
StationaryDistribution solve_stationary(const StateSpace& space, const GeneratorMatrix& gen,
                                        const SystemState& start, const SolveOptions& opts = {});

// CSV dump: h,w,r,q,probability per row.
void write_pi_csv(const StateSpace& space, const Eigen::VectorXd& pi, std::ostream& out);

}  // namespace pbftpool
