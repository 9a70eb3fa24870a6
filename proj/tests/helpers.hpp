#pragma once

// Test-side oracles, deliberately independent of the library code paths they
// check: an LU determinant, Gram-Schmidt unitaries, closed-form 2x2 singular
// values, and multilevel grid minimizers over the probability simplex.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "cohlab/cohlab.hpp"

namespace testutil {

using cohlab::ComplexMatrix;
using cohlab::cplx;
using cohlab::Rng;

/// Determinant by LU with partial pivoting.
inline cplx lu_det(ComplexMatrix a) {
    a.require_square("lu_det");
    const int n = a.rows();
    cplx det = 1.0;
    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = std::abs(a(k, k));
        for (int r = k + 1; r < n; ++r)
            if (std::abs(a(r, k)) > best) {
                best = std::abs(a(r, k));
                piv = r;
            }
        if (best == 0.0) return 0.0;
        if (piv != k) {
            for (int c = 0; c < n; ++c) std::swap(a(k, c), a(piv, c));
            det = -det;
        }
        det *= a(k, k);
        for (int r = k + 1; r < n; ++r) {
            const cplx f = a(r, k) / a(k, k);
            for (int c = k; c < n; ++c) a(r, c) -= f * a(k, c);
        }
    }
    return det;
}

/// Haar-ish random unitary: Gram-Schmidt on a complex Gaussian matrix.
inline ComplexMatrix random_unitary(int d, Rng& rng) {
    ComplexMatrix g = rng.ginibre(d, d);
    for (int j = 0; j < d; ++j) {
        for (int pass = 0; pass < 2; ++pass) {
            for (int k = 0; k < j; ++k) {
                cplx ip = 0.0;
                for (int i = 0; i < d; ++i) ip += std::conj(g(i, k)) * g(i, j);
                for (int i = 0; i < d; ++i) g(i, j) -= ip * g(i, k);
            }
        }
        double nrm = 0.0;
        for (int i = 0; i < d; ++i) nrm += std::norm(g(i, j));
        nrm = std::sqrt(nrm);
        for (int i = 0; i < d; ++i) g(i, j) /= nrm;
    }
    return g;
}

/// Trace norm of a 2x2 matrix without any eigensolver:
/// (s1 + s2)^2 = ||M||_F^2 + 2 |det M|.
inline double trace_norm_2x2(const ComplexMatrix& m) {
    const cplx det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    const double f2 = m.frobenius_norm() * m.frobenius_norm();
    return std::sqrt(std::max(0.0, f2 + 2.0 * std::abs(det)));
}

/// Eigenvalues of a Hermitian 2x2 matrix in closed form, descending.
inline std::pair<double, double> eig2x2(const ComplexMatrix& h) {
    const double tr = (h(0, 0) + h(1, 1)).real();
    const double gap = std::sqrt(std::norm(h(0, 0) - h(1, 1)) / 4.0 + std::norm(h(0, 1)));
    return {tr / 2.0 + gap, tr / 2.0 - gap};
}

/// Multilevel grid minimizer over the probability simplex: enumerate a box of
/// offsets around the incumbent, project each candidate onto the simplex,
/// recenter, shrink. Convex objectives converge to the optimum.
inline double simplex_grid_min(const std::function<double(const std::vector<double>&)>& obj,
                               std::vector<double> center, int levels = 18, int half_pts = 3,
                               std::vector<double>* argmin = nullptr) {
    center = cohlab::project_simplex(center);
    double best = obj(center);
    std::vector<double> best_pt = center;
    double range = 1.0;
    const int d = static_cast<int>(center.size());
    std::vector<int> idx(static_cast<size_t>(d));
    for (int lev = 0; lev < levels; ++lev) {
        std::fill(idx.begin(), idx.end(), -half_pts);
        std::vector<double> level_pt = best_pt;
        double level_best = best;
        while (true) {
            std::vector<double> cand(best_pt);
            for (int i = 0; i < d; ++i)
                cand[static_cast<size_t>(i)] +=
                    range * idx[static_cast<size_t>(i)] / static_cast<double>(half_pts);
            cand = cohlab::project_simplex(cand);
            const double v = obj(cand);
            if (v < level_best) {
                level_best = v;
                level_pt = cand;
            }
            int i = 0;
            for (; i < d; ++i) {
                if (idx[static_cast<size_t>(i)] < half_pts) {
                    ++idx[static_cast<size_t>(i)];
                    break;
                }
                idx[static_cast<size_t>(i)] = -half_pts;
            }
            if (i == d) break;
        }
        best = level_best;
        best_pt = level_pt;
        range *= 0.5;
    }
    if (argmin) *argmin = best_pt;
    return best;
}

/// Grid oracle for the trace-distance coherence of a square matrix: minimize
/// the trace norm of (m - diag(delta)) over diagonal states.
inline double grid_ctr(const ComplexMatrix& m, int levels = 18, int half_pts = 3) {
    const int d = m.rows();
    auto obj = [&](const std::vector<double>& delta) {
        ComplexMatrix h = m;
        for (int i = 0; i < d; ++i) h(i, i) -= delta[static_cast<size_t>(i)];
        return d == 2 ? trace_norm_2x2(h) : cohlab::trace_norm(h);
    };
    std::vector<double> center = cohlab::detail::diagonal_state_of(m).probs();
    return simplex_grid_min(obj, center, levels, half_pts);
}

}  // namespace testutil
