#include "validate_suite.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <tuple>

#include "pbftpool/generator.hpp"
#include "pbftpool/metrics.hpp"
#include "pbftpool/simulator.hpp"
#include "pbftpool/stationary.hpp"

namespace pbftpool::cli {

namespace {

// Small dense linear solve with partial pivoting; deliberately independent
// of the stationary module it checks.
std::vector<double> gaussian_solve(std::vector<std::vector<double>> a, std::vector<double> b) {
    const size_t n = b.size();
    for (size_t col = 0; col < n; ++col) {
        size_t pivot = col;
        for (size_t row = col + 1; row < n; ++row)
            if (std::abs(a[row][col]) > std::abs(a[pivot][col])) pivot = row;
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (size_t row = col + 1; row < n; ++row) {
            const double factor = a[row][col] / a[col][col];
            for (size_t k = col; k < n; ++k) a[row][k] -= factor * a[col][k];
            b[row] -= factor * b[col];
        }
    }
    std::vector<double> x(n, 0.0);
    for (size_t row = n; row-- > 0;) {
        double acc = b[row];
        for (size_t k = row + 1; k < n; ++k) acc -= a[row][k] * x[k];
        x[row] = acc / a[row][row];
    }
    return x;
}

CheckResult check_six_state_brute_force() {
    CheckResult check{"six_state_brute_force"};
    SystemParams p;
    p.f = 0;
    p.n_total = 1;
    p.k_capacity = 1;

    // States in canonical order: (0,1,0,0) (0,1,0,1) (0,0,1,0) (0,0,1,1)
    // (1,0,0,0) (1,0,0,1); rates applied by hand from the six event rules.
    const double lam = p.lambda, mu_h = p.mu_h, xi = p.xi, mu_r = p.mu_r, bw = p.beta_w;
    std::vector<std::vector<double>> q(6, std::vector<double>(6, 0.0));
    q[0][1] = lam;  q[0][4] = bw;
    q[1][5] = bw;
    q[2][3] = lam;  q[2][0] = mu_r;
    q[3][1] = mu_r;
    q[4][5] = lam;  q[4][2] = xi;
    q[5][4] = mu_h; q[5][3] = xi;
    for (int i = 0; i < 6; ++i) {
        double sum = 0.0;
        for (int j = 0; j < 6; ++j) sum += q[i][j];
        q[i][i] = -sum;
    }
    // Balance equations (transposed) with the last replaced by normalization.
    std::vector<std::vector<double>> a(6, std::vector<double>(6, 0.0));
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) a[j][i] = q[i][j];
    for (int j = 0; j < 6; ++j) a[5][j] = 1.0;
    std::vector<double> b(6, 0.0);
    b[5] = 1.0;
    const std::vector<double> expected = gaussian_solve(a, b);

    const auto [space, gen] = build_generator(p);
    const StationaryDistribution dist = solve_stationary(space, gen, {1, 0, 0, 0});
    double max_diff = 0.0;
    for (int i = 0; i < 6; ++i)
        max_diff = std::max(max_diff, std::abs(dist.pi[i] - expected[static_cast<size_t>(i)]));
    check.passed = max_diff <= 1e-10;
    check.detail = fmt::format("max |pi - brute force| = {:.3e}", max_diff);
    return check;
}

CheckResult check_mm1k_reduction() {
    CheckResult check{"mm1k_reduction"};
    SystemParams p;
    p.xi = 0.0;
    p.beta_h = 0.0;

    const double rho = p.lambda / p.mu_h;
    const int k = p.k_capacity;
    const double rho_k = std::pow(rho, k);
    const double rho_k1 = rho_k * rho;
    const double eq = rho / (1 - rho) - (k + 1) * rho_k1 / (1 - rho_k1);
    const double p_drop = (1 - rho) * rho_k / (1 - rho_k1);
    const double t_resp = eq / (p.lambda * (1 - p_drop));

    const MetricsReport report = evaluate(p);
    const double d_eq = std::abs(report.mean_queue - eq);
    const double d_drop = std::abs(report.p_drop - p_drop);
    const double d_t = std::abs(report.t_resp - t_resp);
    check.passed = d_eq <= 1e-8 && d_drop <= 1e-8 && d_t <= 1e-8;
    check.detail = fmt::format("|dE[Q]| = {:.2e}, |dP_drop| = {:.2e}, |dT| = {:.2e}", d_eq,
                               d_drop, d_t);
    return check;
}

CheckResult check_generator_rows() {
    CheckResult check{"generator_row_sums"};
    const auto [space, gen] = build_generator(SystemParams{});
    double worst = 0.0;
    bool shape_ok = true;
    for (int i = 0; i < gen.size(); ++i) {
        double sum = 0.0;
        int off_diag = 0;
        for (SparseRowMatrix::InnerIterator it(gen.rates, i); it; ++it) {
            sum += it.value();
            if (it.col() != i) {
                ++off_diag;
                if (it.value() < 0) shape_ok = false;
            }
        }
        worst = std::max(worst, std::abs(sum));
        if (off_diag > kEventKindCount) shape_ok = false;
    }
    check.passed = worst <= 1e-12 && shape_ok;
    check.detail = fmt::format("max |row sum| = {:.3e} over {} states", worst, gen.size());
    return check;
}

CheckResult check_solver_agreement() {
    CheckResult check{"solver_agreement"};
    const auto [space, gen] = build_generator(SystemParams{});
    SolveOptions direct_opts;
    direct_opts.method = SolveMethod::DenseDirect;
    SolveOptions power_opts;
    power_opts.method = SolveMethod::PowerIteration;
    const SystemState start{15, 0, 0, 0};
    const StationaryDistribution direct = solve_stationary(space, gen, start, direct_opts);
    const StationaryDistribution power = solve_stationary(space, gen, start, power_opts);
    const double diff = (direct.pi - power.pi).cwiseAbs().maxCoeff();
    check.passed = diff <= 1e-8;
    check.detail = fmt::format("max |direct - iterative| = {:.3e} ({} iterations)", diff,
                               power.iterations);
    return check;
}

CheckResult check_guard_equivalence(bool inject_fault) {
    CheckResult check{"guard_equivalence"};
    SystemParams p;
    p.f = 1;
    p.n_total = 5;
    p.k_capacity = 4;
    const StateSpace space(p.n_total, p.k_capacity);
    const SimFault fault{inject_fault};

    using Key = std::tuple<int, int, double>;  // kind, target, rate
    int mismatches = 0;
    for (int i = 0; i < space.size(); ++i) {
        const SystemState& s = space.state_at(i);
        std::vector<Key> from_ctmc;
        for (const Transition& t : transitions_from(s, p, space))
            from_ctmc.emplace_back(static_cast<int>(t.kind), t.target, t.rate);
        std::vector<Key> from_sim;
        for (const SimEvent& e : sim_enabled_events(s, p, fault)) {
            if (e.is_drop) {
                if (e.target != s || s.q != p.k_capacity) ++mismatches;
                continue;  // self-loop, absent from the generator
            }
            from_sim.emplace_back(static_cast<int>(e.kind), space.index_of(e.target), e.rate);
        }
        std::sort(from_ctmc.begin(), from_ctmc.end());
        std::sort(from_sim.begin(), from_sim.end());
        if (from_ctmc != from_sim) ++mismatches;
    }
    check.passed = mismatches == 0;
    check.detail = fmt::format("{} mismatching states of {}{}", mismatches, space.size(),
                               inject_fault ? " (fault injected)" : "");
    return check;
}

CheckResult check_simulation_cross_check() {
    CheckResult check{"des_cross_check"};
    SystemParams p;
    SimConfig cfg;
    cfg.horizon_ms = 5e4;
    cfg.seed = 42;
    const SimReport sim = simulate(p, cfg);
    const MetricsReport analytical = evaluate(p);
    const ComparisonReport comparison = compare(sim, analytical);
    check.passed = comparison.ok && comparison.inside_count >= 6;
    check.detail = fmt::format("{} of {} metrics inside 95% CI", comparison.inside_count,
                               comparison.metrics.size());
    return check;
}

}  // namespace

std::vector<CheckResult> run_validation_suite(bool inject_fault) {
    std::vector<CheckResult> results;
    results.push_back(check_six_state_brute_force());
    results.push_back(check_mm1k_reduction());
    results.push_back(check_generator_rows());
    results.push_back(check_solver_agreement());
    results.push_back(check_guard_equivalence(inject_fault));
    results.push_back(check_simulation_cross_check());
    return results;
}

}  // namespace pbftpool::cli
