#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "cohlab/linalg.hpp"
#include "cohlab/rng.hpp"

namespace cohlab {

/// Knobs shared by the iterative minimizers.
struct SolverOptions {
    double tol = 1e-7;
    int max_iters = 5000;
    int restarts = 16;
    std::uint64_t seed = 12345;
};

namespace detail {

struct SimplexMinimum {
    double value = std::numeric_limits<double>::infinity();
    std::vector<double> point;
    /// max - min of the per-start best values (restart agreement).
    double spread = 0.0;
    int evaluations = 0;
};

/// Minimize a convex function over the probability simplex by projected
/// descent. Each iteration tries an Armijo-backtracked projected gradient
/// step; when backtracking stalls (nonsmooth kink), it falls back to
/// diminishing subgradient steps step0/sqrt(k) with best-iterate tracking.
///
/// `f`: objective; `grad`: (sub)gradient at a point. Starts are the warm
/// starts followed by `opts.restarts` random simplex points.
inline SimplexMinimum minimize_on_simplex(const std::function<double(const std::vector<double>&)>& f,
                                          const std::function<std::vector<double>(const std::vector<double>&)>& grad,
                                          int d, const SolverOptions& opts,
                                          const std::vector<std::vector<double>>& warm_starts,
                                          double subgrad_scale) {
    Rng rng(opts.seed);
    std::vector<std::vector<double>> starts = warm_starts;
    for (int r = 0; r < opts.restarts; ++r) starts.push_back(rng.simplex_point(d));

    SimplexMinimum best;
    double worst_start_best = -std::numeric_limits<double>::infinity();
    double best_start_best = std::numeric_limits<double>::infinity();

    for (const auto& start : starts) {
        std::vector<double> x = project_simplex(start);
        double fx = f(x);
        ++best.evaluations;
        std::vector<double> local_best_x = x;
        double local_best = fx;

        double alpha = 1.0;
        int iter = 0;
        int stall_k = 0;  // diminishing-step counter, reset on Armijo success
        while (iter < opts.max_iters) {
            ++iter;
            const std::vector<double> g = grad(x);

            // Armijo backtracking along the projection arc.
            bool stepped = false;
            double a = std::min(alpha * 2.0, 1e3);
            for (int bt = 0; bt < 45; ++bt) {
                std::vector<double> trial(x.size());
                for (size_t i = 0; i < x.size(); ++i) trial[i] = x[i] - a * g[i];
                trial = project_simplex(trial);
                double move2 = 0.0;
                for (size_t i = 0; i < x.size(); ++i) {
                    const double dxi = trial[i] - x[i];
                    move2 += dxi * dxi;
                }
                if (move2 == 0.0) break;  // projected-stationary for this step size
                const double ft = f(trial);
                ++best.evaluations;
                if (ft <= fx - 1e-4 * move2 / a) {
                    const double improvement = fx - ft;
                    x = std::move(trial);
                    fx = ft;
                    alpha = a;
                    stepped = true;
                    stall_k = 0;
                    if (fx < local_best) {
                        local_best = fx;
                        local_best_x = x;
                    }
                    if (improvement < opts.tol * 1e-3 && std::sqrt(move2) < opts.tol) iter = opts.max_iters;
                    break;
                }
                a *= 0.5;
            }

            if (!stepped) {
                // Nonsmooth stall: diminishing subgradient step, keep the best.
                ++stall_k;
                if (stall_k > 60) break;  // repeated stalls: accept the best iterate
                double gnorm = 0.0;
                for (double gi : g) gnorm = std::max(gnorm, std::abs(gi));
                if (gnorm <= 0.0) break;
                const double step = subgrad_scale / std::sqrt(static_cast<double>(stall_k));
                std::vector<double> trial(x.size());
                for (size_t i = 0; i < x.size(); ++i) trial[i] = x[i] - step * g[i] / gnorm;
                x = project_simplex(trial);
                fx = f(x);
                ++best.evaluations;
                alpha = 1.0;
                if (fx < local_best) {
                    local_best = fx;
                    local_best_x = x;
                }
            }
        }

        worst_start_best = std::max(worst_start_best, local_best);
        best_start_best = std::min(best_start_best, local_best);
        if (local_best < best.value) {
            best.value = local_best;
            best.point = local_best_x;
        }
    }
    best.spread = worst_start_best - best_start_best;
    return best;
}

}  // namespace detail

}  // namespace cohlab
