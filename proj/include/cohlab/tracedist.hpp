#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cohlab/complex_matrix.hpp"
#include "cohlab/errors.hpp"
#include "cohlab/linalg.hpp"
#include "cohlab/measures.hpp"
#include "cohlab/simplex_solver.hpp"
#include "cohlab/states.hpp"

namespace cohlab {

enum class TraceDistBackend { Qubit, BlockSum, XState, Pure, General };

inline const char* backend_name(TraceDistBackend b) {
    switch (b) {
        case TraceDistBackend::Qubit: return "qubit";
        case TraceDistBackend::BlockSum: return "blocksum";
        case TraceDistBackend::XState: return "xstate";
        case TraceDistBackend::Pure: return "pure";
        case TraceDistBackend::General: return "general";
    }
    return "?";
}

/// Result of a trace-distance coherence computation. `value` is the
/// contract; `minimizer` is the best diagonal state found (for closed-form
/// backends, the exact one). `certificate` is a cross-check residual where
/// one is available (solver backends).
struct TraceDistResult {
    double value;
    DiagonalState minimizer;
    TraceDistBackend backend;
    std::optional<double> certificate;
};

namespace detail {

/// Clamp the real diagonal of a square matrix onto the probability simplex.
inline DiagonalState diagonal_state_of(const ComplexMatrix& m) {
    std::vector<double> p(static_cast<size_t>(m.rows()));
    for (int i = 0; i < m.rows(); ++i) p[static_cast<size_t>(i)] = m(i, i).real();
    return DiagonalState(project_simplex(p));
}

}  // namespace detail

/// 2x2 closed form: the nearest diagonal matrix is diag(A), so the value is
/// |A01| + |A10|. Valid for any 2x2 complex matrix, not just states.
inline TraceDistResult c_tr_qubit(const ComplexMatrix& a) {
    a.require_square("c_tr_qubit");
    if (a.rows() != 2) throw WrongDim("c_tr_qubit requires a 2x2 matrix, got " + a.shape_str());
    const double value = std::abs(a(0, 1)) + std::abs(a(1, 0));
    return {value, detail::diagonal_state_of(a), TraceDistBackend::Qubit, 0.0};
}

/// Connected components of the off-diagonal support graph, as long as every
/// component has at most two vertices; otherwise NONE. Entries with modulus
/// <= tol are structural zeros.
inline std::optional<std::vector<std::vector<int>>> detect_blocks(
    const ComplexMatrix& m, double tol = defaults::support_tol) {
    m.require_square("detect_blocks");
    const int n = m.rows();
    std::vector<int> comp(static_cast<size_t>(n), -1);
    std::vector<std::vector<int>> parts;
    for (int i = 0; i < n; ++i) {
        if (comp[static_cast<size_t>(i)] >= 0) continue;
        // BFS from i over the support graph.
        std::vector<int> stack = {i};
        std::vector<int> members;
        comp[static_cast<size_t>(i)] = static_cast<int>(parts.size());
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            members.push_back(u);
            for (int v = 0; v < n; ++v) {
                if (v == u || comp[static_cast<size_t>(v)] >= 0) continue;
                if (std::abs(m(u, v)) > tol || std::abs(m(v, u)) > tol) {
                    comp[static_cast<size_t>(v)] = comp[static_cast<size_t>(i)];
                    stack.push_back(v);
                }
            }
        }
        if (members.size() > 2) return std::nullopt;
        std::sort(members.begin(), members.end());
        parts.push_back(std::move(members));
    }
    return parts;
}

/// True when the support of m lies on the main diagonal plus anti-diagonal.
inline bool is_x_pattern(const ComplexMatrix& m, double tol = defaults::support_tol) {
    if (!m.square()) return false;
    const int n = m.rows();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && j != n - 1 - i && std::abs(m(i, j)) > tol) return false;
    return true;
}

/// Closed form on a partition into 1- and 2-blocks: the value decomposes as
/// the sum of 2x2 closed forms, i.e. the total off-diagonal l1 mass.
inline TraceDistResult c_tr_blocksum(const ComplexMatrix& m,
                                     const std::vector<std::vector<int>>& partition) {
    m.require_square("c_tr_blocksum");
    const int n = m.rows();
    std::vector<int> seen(static_cast<size_t>(n), 0);
    double value = 0.0;
    for (const auto& part : partition) {
        if (part.empty() || part.size() > 2)
            throw BadPartition("c_tr_blocksum: components must have size 1 or 2");
        for (int idx : part) {
            if (idx < 0 || idx >= n) throw BadPartition("c_tr_blocksum: index out of range");
            if (seen[static_cast<size_t>(idx)]++)
                throw BadPartition("c_tr_blocksum: index " + std::to_string(idx) + " repeated");
        }
        if (part.size() == 2) value += std::abs(m(part[0], part[1])) + std::abs(m(part[1], part[0]));
    }
    for (int i = 0; i < n; ++i)
        if (!seen[static_cast<size_t>(i)])
            throw BadPartition("c_tr_blocksum: index " + std::to_string(i) + " missing");
    // The partition must actually isolate the blocks.
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j || std::abs(m(i, j)) <= defaults::support_tol) continue;
            bool together = false;
            for (const auto& part : partition)
                if (std::find(part.begin(), part.end(), i) != part.end() &&
                    std::find(part.begin(), part.end(), j) != part.end())
                    together = true;
            if (!together)
                throw BadPartition("c_tr_blocksum: entry (" + std::to_string(i) + ", " +
                                   std::to_string(j) + ") crosses the partition");
        }
    const TraceDistBackend tag =
        is_x_pattern(m) ? TraceDistBackend::XState : TraceDistBackend::BlockSum;
    return {value, detail::diagonal_state_of(m), tag, 0.0};
}

namespace detail {

struct RootTerms {
    std::vector<double> lam;    // positive weights
    std::vector<double> del;    // matching non-negative shifts
};

inline double root_fn(const RootTerms& t, double x) {
    double s = 0.0;
    for (size_t i = 0; i < t.lam.size(); ++i) s += t.lam[i] / (x + t.del[i]);
    return s;
}

inline double root_fn_deriv(const RootTerms& t, double x) {
    double s = 0.0;
    for (size_t i = 0; i < t.lam.size(); ++i) {
        const double z = x + t.del[i];
        s -= t.lam[i] / (z * z);
    }
    return s;
}

}  // namespace detail

/// Unique root x >= 0 of sum_i lambda_i / (x + delta_i) = 1.
///
/// The left side is convex and strictly decreasing on x > 0, so the root is
/// bracketed by [0, sum lambda] (expanding the top by doubling as a guard),
/// localized by bisection, then polished by Newton from the left -- which for
/// a convex decreasing function converges monotonically. Residual at the
/// returned root is at most 1e-12.
inline double largest_root(const std::vector<double>& lambda, const std::vector<double>& delta) {
    if (lambda.size() != delta.size())
        throw LengthMismatch("largest_root: lambda and delta lengths differ (" +
                             std::to_string(lambda.size()) + " vs " +
                             std::to_string(delta.size()) + ")");
    detail::RootTerms t;
    double lam_sum = 0.0;
    for (size_t i = 0; i < lambda.size(); ++i) {
        if (!std::isfinite(lambda[i]) || !std::isfinite(delta[i]))
            throw InvalidInput("largest_root: non-finite input");
        if (lambda[i] < 0.0)
            throw InvalidInput("largest_root: negative weight " + std::to_string(lambda[i]));
        if (delta[i] < 0.0)
            throw InvalidInput("largest_root: negative shift " + std::to_string(delta[i]));
        if (lambda[i] <= defaults::support_tol) continue;  // zero weights drop out
        t.lam.push_back(lambda[i]);
        t.del.push_back(delta[i]);
        lam_sum += lambda[i];
    }
    if (t.lam.empty()) throw DegenerateInput("largest_root: all weights vanish");

    double lo = 0.0;
    double hi = lam_sum;
    int guard = 0;
    while (detail::root_fn(t, hi) > 1.0 && guard++ < 200) hi *= 2.0;
    if (detail::root_fn(t, hi) > 1.0)
        throw NoConvergence("largest_root: failed to bracket the root from above");
    {
        // Below lo the function may be infinite (delta = 0 terms); evaluate at
        // lo only to reject inputs whose root would be negative.
        const double f0 = detail::root_fn(t, 0.0);
        if (std::isfinite(f0) && f0 < 1.0 - 1e-9)
            throw DegenerateInput("largest_root: no non-negative root, f(0) = " +
                                  std::to_string(f0));
        if (std::isfinite(f0) && f0 <= 1.0) return 0.0;
    }

    for (int i = 0; i < 30; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (detail::root_fn(t, mid) >= 1.0)
            lo = mid;
        else
            hi = mid;
    }
    double x = lo;
    for (int i = 0; i < 80; ++i) {
        const double fx = detail::root_fn(t, x);
        if (std::abs(fx - 1.0) <= 1e-13) break;
        const double fpx = detail::root_fn_deriv(t, x);
        double next = x + (fx - 1.0) / (-fpx);
        if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
        if (detail::root_fn(t, next) >= 1.0)
            lo = next;
        else
            hi = next;
        x = lo;
    }
    if (std::abs(detail::root_fn(t, x) - 1.0) > 1e-12)
        throw NoConvergence("largest_root: residual " +
                            std::to_string(std::abs(detail::root_fn(t, x) - 1.0)) +
                            " above 1e-12");
    return x;
}

namespace detail {

/// min over the simplex {v >= 0, sum v = 1} of sum_i lam_i / (t + v_i),
/// by water-filling: v_i = max(0, sqrt(lam_i / nu) - t) with nu fixed by the
/// budget. Returns the minimum value; fills v_out when non-null.
inline double capped_inverse_sum(const std::vector<double>& lam, double t,
                                 std::vector<double>* v_out) {
    const size_t d = lam.size();
    auto vsum = [&](double nu) {
        double s = 0.0;
        for (size_t i = 0; i < d; ++i) s += std::max(0.0, std::sqrt(lam[i] / nu) - t);
        return s;
    };
    double nu_hi;
    if (t > 0.0) {
        nu_hi = 0.0;
        for (double l : lam) nu_hi = std::max(nu_hi, l / (t * t));
        nu_hi = std::max(nu_hi, 1e-300);
    } else {
        double rt = 0.0;
        for (double l : lam) rt += std::sqrt(l);
        nu_hi = rt * rt;  // exact solution at t = 0
    }
    double nu_lo = nu_hi;
    int guard = 0;
    while (vsum(nu_lo) < 1.0 && guard++ < 2000) nu_lo *= 0.5;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (nu_lo + nu_hi);
        if (vsum(mid) >= 1.0)
            nu_lo = mid;
        else
            nu_hi = mid;
    }
    const double nu = 0.5 * (nu_lo + nu_hi);
    double val = 0.0;
    if (v_out) v_out->assign(d, 0.0);
    double budget = 0.0;
    std::vector<double> v(d, 0.0);
    for (size_t i = 0; i < d; ++i) {
        v[i] = std::max(0.0, std::sqrt(lam[i] / nu) - t);
        budget += v[i];
    }
    // Snap the water level exactly onto the simplex before evaluating.
    if (budget > 0.0)
        for (size_t i = 0; i < d; ++i) v[i] /= budget;
    for (size_t i = 0; i < d; ++i) val += lam[i] / (t + v[i]);
    if (v_out) *v_out = v;
    return val;
}

struct PureBisection {
    double value = 0.0;             // 2 t*
    std::vector<double> delta;      // optimal simplex point (live coordinates)
    std::vector<double> program_point;  // lam_i / (t* + delta_i)
};

/// Derivative-free route: the optimal value 2t* is the smallest t for which
/// min_v sum lam_i/(t + v_i) <= 1. Monotone in t, so bisect; the inner
/// minimum is the water-filling above. Deterministic and accurate to ~1e-15.
inline PureBisection pure_value_by_bisection(const std::vector<double>& lam) {
    PureBisection out;
    const size_t d = lam.size();
    double lam_sum = std::accumulate(lam.begin(), lam.end(), 0.0);
    double lo = 0.0, hi = lam_sum;
    if (capped_inverse_sum(lam, 0.0, nullptr) <= 1.0) {
        hi = 0.0;  // already incoherent (single nonzero weight)
    } else {
        for (int i = 0; i < 60; ++i) {
            const double mid = 0.5 * (lo + hi);
            if (capped_inverse_sum(lam, mid, nullptr) <= 1.0)
                hi = mid;
            else
                lo = mid;
        }
    }
    const double t = hi;
    std::vector<double> v;
    capped_inverse_sum(lam, t, &v);
    out.value = 2.0 * t;
    out.delta = v;
    out.program_point.resize(d);
    for (size_t i = 0; i < d; ++i) out.program_point[i] = lam[i] / (t + v[i]);
    return out;
}

}  // namespace detail

/// Everything the pure-state solver knows; c_tr_pure condenses this into a
/// TraceDistResult, tests inspect the two routes directly.
struct PureSolveDetail {
    double gradient_value = 0.0;    // projected-gradient route
    double bisection_value = 0.0;   // independent bisection route
    std::vector<double> delta;      // minimizer on the full index set
    std::vector<double> program_point;  // lam_i/(x + delta_i), full index set
};

/// Trace-distance coherence of a pure state.
///
/// Writing lam_i = |amplitude_i|^2, the value is 2 min over diagonal states
/// delta of the unique positive root of sum_i lam_i/(x + delta_i) = 1. The
/// root is smooth in delta with an implicit-function gradient, so the primary
/// route is projected gradient descent on the simplex; it is cross-checked
/// against the independent bisection route (agreement within 10 * opts.tol,
/// else NoConvergence). Amplitudes below the support floor are stripped and
/// receive zero minimizer mass.
inline PureSolveDetail c_tr_pure_detailed(const PureState& psi, SolverOptions opts = {}) {
    const std::vector<double> lam_full = psi.probabilities();
    const int d = psi.dim();
    std::vector<int> live;
    std::vector<double> lam;
    for (int i = 0; i < d; ++i) {
        if (lam_full[static_cast<size_t>(i)] > defaults::support_tol) {
            live.push_back(i);
            lam.push_back(lam_full[static_cast<size_t>(i)]);
        }
    }
    PureSolveDetail out;
    out.delta.assign(static_cast<size_t>(d), 0.0);
    out.program_point.assign(static_cast<size_t>(d), 0.0);
    if (live.size() <= 1) {
        // Incoherent basis state: nothing to optimize.
        for (size_t k = 0; k < live.size(); ++k)
            out.delta[static_cast<size_t>(live[k])] = 1.0;
        return out;
    }

    const detail::PureBisection bis = detail::pure_value_by_bisection(lam);

    auto objective = [&](const std::vector<double>& delta) {
        return largest_root(lam, delta);
    };
    auto gradient = [&](const std::vector<double>& delta) {
        const double x = largest_root(lam, delta);
        const size_t n = lam.size();
        std::vector<double> g(n);
        double denom = 0.0;
        for (size_t i = 0; i < n; ++i) {
            const double z = x + delta[i];
            denom += lam[i] / (z * z);
        }
        for (size_t i = 0; i < n; ++i) {
            const double z = x + delta[i];
            g[i] = -(lam[i] / (z * z)) / denom;
        }
        return g;
    };

    std::vector<std::vector<double>> warm = {project_simplex(lam), bis.delta};
    const detail::SimplexMinimum best = detail::minimize_on_simplex(
        objective, gradient, static_cast<int>(lam.size()), opts, warm, 0.25);

    out.gradient_value = 2.0 * best.value;
    out.bisection_value = bis.value;
    if (std::abs(out.gradient_value - out.bisection_value) > 10.0 * opts.tol) {
        std::ostringstream os;
        os << "c_tr_pure: gradient route " << out.gradient_value << " and bisection route "
           << out.bisection_value << " disagree beyond " << 10.0 * opts.tol;
        throw NoConvergence(os.str());
    }
    const double x_opt = best.value;
    for (size_t k = 0; k < live.size(); ++k) {
        out.delta[static_cast<size_t>(live[k])] = best.point[k];
        out.program_point[static_cast<size_t>(live[k])] = lam[k] / (x_opt + best.point[k]);
    }
    return out;
}

inline TraceDistResult c_tr_pure(const PureState& psi, SolverOptions opts = {}) {
    PureSolveDetail det = c_tr_pure_detailed(psi, opts);
    return {det.gradient_value, DiagonalState(project_simplex(det.delta)),
            TraceDistBackend::Pure, std::abs(det.gradient_value - det.bisection_value)};
}

/// Trace-distance coherence of an arbitrary state: min over diagonal states
/// delta of ||rho - diag(delta)||_1 by projected subgradient on the simplex
/// (subgradient at H = U L U^dagger is minus the real diagonal of
/// U sign(L) U^dagger; Armijo steps where the objective is smooth, diminishing
/// steps c/sqrt(k) with c = ||rho - diag rho||_1 at kinks; best-iterate
/// tracking across restarts). The restart spread lands in `certificate`.
inline TraceDistResult c_tr_general(const DensityMatrix& rho, SolverOptions opts = {}) {
    const ComplexMatrix& m = rho.matrix();
    const int d = m.rows();

    auto objective = [&](const std::vector<double>& delta) {
        ComplexMatrix h = m;
        for (int i = 0; i < d; ++i) h(i, i) -= delta[static_cast<size_t>(i)];
        return trace_norm(h);
    };
    auto gradient = [&](const std::vector<double>& delta) {
        ComplexMatrix h = m;
        for (int i = 0; i < d; ++i) h(i, i) -= delta[static_cast<size_t>(i)];
        return detail::schatten_diag_gradient(h, 1.0);
    };

    ComplexMatrix hollow = m;
    for (int i = 0; i < d; ++i) hollow(i, i) = 0.0;
    const double scale = std::max(1e-9, trace_norm(hollow));

    const std::vector<std::vector<double>> warm = {project_simplex(rho.diagonal_probs())};
    const detail::SimplexMinimum best =
        detail::minimize_on_simplex(objective, gradient, d, opts, warm, scale);
    if (!std::isfinite(best.value))
        throw NoConvergence("c_tr_general: objective did not produce a finite value");
    return {best.value, DiagonalState(project_simplex(best.point)), TraceDistBackend::General,
            best.spread};
}

/// Dispatcher over the backends, cheapest applicable first:
/// 2x2 closed form, then 1-2-block decompositions (X states included), then
/// the pure-state solver when the second eigenvalue is below 1e-9, then the
/// general solver.
inline TraceDistResult c_tr(const DensityMatrix& rho, SolverOptions opts = {}) {
    const ComplexMatrix& m = rho.matrix();
    if (m.rows() == 2) return c_tr_qubit(m);
    if (auto blocks = detect_blocks(m)) return c_tr_blocksum(m, *blocks);
    const HermitianEigen eig = hermitian_eig(m);
    if (eig.values.size() >= 2 && eig.values[1] <= 1e-9) {
        std::vector<cplx> amps(static_cast<size_t>(m.rows()));
        for (int i = 0; i < m.rows(); ++i) amps[static_cast<size_t>(i)] = eig.vectors(i, 0);
        TraceDistResult r = c_tr_pure(PureState::normalized(std::move(amps)), opts);
        return r;
    }
    return c_tr_general(rho, opts);
}

/// Matrix overload: full dispatch when the input is a valid state, closed
/// form otherwise (2x2 and 1-2-block supports only -- the minimization over
/// general diagonal matrices is defined here only where it has a closed form).
inline TraceDistResult c_tr(const ComplexMatrix& m, SolverOptions opts = {}) {
    m.require_square("c_tr");
    bool is_state = true;
    try {
        validate_density(m);
    } catch (const InvalidInput&) {
        is_state = false;
    }
    if (is_state) return c_tr(DensityMatrix(m), opts);
    if (m.rows() == 2) return c_tr_qubit(m);
    if (auto blocks = detect_blocks(m)) return c_tr_blocksum(m, *blocks);
    throw NotState(
        "c_tr: input is not a density matrix and has no 1-2-block closed form; "
        "only states are supported by the iterative backends");
}

/// Serialize the trace-distance SDP for an external solver, in sparse SDPA
/// (.dat-s) format.
///
/// The complex state is lifted to its real-symmetric embedding
/// R = [[Re rho, -Im rho], [Im rho, Re rho]] (2d x 2d), which doubles every
/// eigenvalue multiplicity and hence trace-norm mass. Variables are the
/// PSD blocks P and N (2d x 2d each) and a diagonal block delta (d); the
/// equality constraints are P - N + diag(delta, delta) = R entrywise plus
/// sum(delta) = 1, and the objective tr(P + N)/2 compensates the doubling.
/// SDPA's reported optimum is therefore -C_tr (its convention maximizes
/// tr(F0 Y)); negate the solver's answer to read off C_tr.
inline std::string sdpa_text(const DensityMatrix& rho) {
    const ComplexMatrix& m = rho.matrix();
    const int d = m.rows();
    const int n = 2 * d;

    auto emb = [&](int i, int j) -> double {
        const bool bi = i >= d, bj = j >= d;
        const int ii = bi ? i - d : i;
        const int jj = bj ? j - d : j;
        const cplx v = m(ii, jj);
        if (!bi && !bj) return v.real();
        if (!bi && bj) return -v.imag();
        if (bi && !bj) return v.imag();
        return v.real();
    };

    std::ostringstream os;
    os.setf(std::ios::fmtflags(0), std::ios::floatfield);
    os.precision(17);
    os << "\"d-embedded trace-distance coherence\n";
    const int m_cons = n * (n + 1) / 2 + 1;
    os << m_cons << " = mDIM\n";
    os << 3 << " = nBLOCK\n";
    os << n << " " << n << " " << -d << " = bLOCKsTRUCT\n";

    // RHS vector: embedded entries (off-diagonal rows carry the factor 2
    // because constraint matrices are symmetric), then the unit trace.
    bool first = true;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            os << (first ? "" : " ") << (i == j ? emb(i, j) : 2.0 * emb(i, j));
            first = false;
        }
    os << " " << 1.0 << "\n";

    // F0: -(1/2) identity on the P and N blocks (objective tr(P + N)/2).
    for (int blk = 1; blk <= 2; ++blk)
        for (int i = 1; i <= n; ++i) os << "0 " << blk << " " << i << " " << i << " -0.5\n";

    // Constraint matrices: one per embedded entry.
    int cons = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            ++cons;
            os << cons << " 1 " << (i + 1) << " " << (j + 1) << " 1\n";
            os << cons << " 2 " << (i + 1) << " " << (j + 1) << " -1\n";
            if (i == j) os << cons << " 3 " << (i % d) + 1 << " " << (i % d) + 1 << " 1\n";
        }
    ++cons;
    for (int t = 1; t <= d; ++t) os << cons << " 3 " << t << " " << t << " 1\n";
    return os.str();
}

inline void export_sdpa(const DensityMatrix& rho, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("export_sdpa: cannot open '" + path + "' for writing");
    out << sdpa_text(rho);
    if (!out) throw IoError("export_sdpa: write to '" + path + "' failed");
}

}  // namespace cohlab
