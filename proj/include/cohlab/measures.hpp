#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cohlab/complex_matrix.hpp"
#include "cohlab/errors.hpp"
#include "cohlab/linalg.hpp"
#include "cohlab/simplex_solver.hpp"
#include "cohlab/states.hpp"

namespace cohlab {

/// Identifies a coherence quantifier. Lp and Schatten carry an exponent.
struct MeasureId {
    enum class Kind { L1, RelEnt, Lp, Schatten, Trace };

    Kind kind = Kind::L1;
    double p = 1.0;

    static MeasureId l1() { return {Kind::L1, 1.0}; }
    static MeasureId relent() { return {Kind::RelEnt, 1.0}; }
    static MeasureId lp(double p) { return {Kind::Lp, p}; }
    static MeasureId schatten(double p) { return {Kind::Schatten, p}; }
    static MeasureId trace() { return {Kind::Trace, 1.0}; }

    std::string str() const {
        std::ostringstream os;
        switch (kind) {
            case Kind::L1: os << "l1"; break;
            case Kind::RelEnt: os << "relent"; break;
            case Kind::Lp: os << "lp:" << p; break;
            case Kind::Schatten: os << "schatten:" << p; break;
            case Kind::Trace: os << "trace"; break;
        }
        return os.str();
    }

    /// Parse "l1" | "relent" | "lp:<p>" | "schatten:<p>" | "trace".
    static MeasureId parse(const std::string& s) {
        if (s == "l1") return l1();
        if (s == "relent") return relent();
        if (s == "trace") return trace();
        const auto colon = s.find(':');
        if (colon != std::string::npos) {
            const std::string head = s.substr(0, colon);
            double p = 0.0;
            try {
                p = std::stod(s.substr(colon + 1));
            } catch (const std::exception&) {
                throw InvalidInput("unparsable measure exponent in '" + s + "'");
            }
            if (head == "lp" || head == "schatten") {
                if (!(p >= 1.0) || !std::isfinite(p))
                    throw BadExponent("measure '" + s + "' needs exponent p >= 1");
                return head == "lp" ? lp(p) : schatten(p);
            }
        }
        throw InvalidInput("unknown measure '" + s +
                           "' (expected l1|relent|lp:<p>|schatten:<p>|trace)");
    }
};

/// Sum of off-diagonal moduli. Defined for any square matrix.
inline double c_l1(const ComplexMatrix& m) {
    m.require_square("c_l1");
    double s = 0.0;
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
            if (i != j) s += std::abs(m(i, j));
    return s;
}

inline double c_l1(const DensityMatrix& rho) { return c_l1(rho.matrix()); }

/// Relative entropy of coherence in bits: S(diag rho) - S(rho), clamped at 0.
inline double c_r(const DensityMatrix& rho) {
    const double s_diag = shannon_entropy(rho.diagonal_probs());
    const double s_rho = von_neumann_entropy(rho.matrix());
    return std::max(0.0, s_diag - s_rho);
}

/// Entrywise-lp coherence for p >= 1: the off-diagonal lp mass. The nearest
/// diagonal matrix in entrywise lp distance is diag(rho), so this is closed
/// form. p = 1 coincides with c_l1.
inline double c_lp(const DensityMatrix& rho, double p) {
    if (!(p >= 1.0) || !std::isfinite(p))
        throw BadExponent("c_lp requires p >= 1, got " + std::to_string(p));
    const ComplexMatrix& m = rho.matrix();
    double acc = 0.0;
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
            if (i != j) acc += std::pow(std::abs(m(i, j)), p);
    return std::pow(acc, 1.0 / p);
}

namespace detail {

/// d/dH of ||H||_p restricted to the diagonal, for Hermitian H = U L U^dagger:
/// entries of the gradient of ||.||_p at H are U |L|^(p-1) sign(L) U^dagger
/// scaled by ||H||_p^(1-p); the objective's dependence on delta is -diag.
inline std::vector<double> schatten_diag_gradient(const ComplexMatrix& h, double p) {
    const HermitianEigen eig = hermitian_eig(h.hermitian_part(), 1e-6);
    double normp = 0.0;
    for (double lam : eig.values) normp += std::pow(std::abs(lam), p);
    normp = std::pow(normp, 1.0 / p);
    const int d = h.rows();
    std::vector<double> g(static_cast<size_t>(d), 0.0);
    if (normp <= 1e-300) return g;
    const double scale = std::pow(normp, 1.0 - p);
    for (int i = 0; i < d; ++i) {
        double acc = 0.0;
        for (int k = 0; k < d; ++k) {
            const double lam = eig.values[static_cast<size_t>(k)];
            if (lam == 0.0) continue;
            const double w = std::pow(std::abs(lam), p - 1.0) * (lam > 0.0 ? 1.0 : -1.0);
            acc += w * std::norm(eig.vectors(i, k));
        }
        g[static_cast<size_t>(i)] = -scale * acc;
    }
    return g;
}

}  // namespace detail

/// Default knobs for c_p: 20 random restarts on top of the warm start.
inline SolverOptions default_cp_options() {
    SolverOptions o;
    o.restarts = 20;
    return o;
}

/// Schatten-p coherence for p > 1: min over diagonal states delta of
/// ||rho - diag(delta)||_p, by projected gradient with Armijo backtracking
/// (diag(rho) warm start plus random restarts; diminishing-step subgradient
/// fallback at kinks). Throws NoConvergence if restarts disagree beyond
/// 10 * opts.tol.
inline double c_p(const DensityMatrix& rho, double p, SolverOptions opts = default_cp_options()) {
    if (!(p > 1.0) || !std::isfinite(p))
        throw BadExponent("c_p requires p > 1, got " + std::to_string(p));
    const ComplexMatrix& m = rho.matrix();
    const int d = m.rows();

    auto objective = [&](const std::vector<double>& delta) {
        ComplexMatrix h = m;
        for (int i = 0; i < d; ++i) h(i, i) -= delta[static_cast<size_t>(i)];
        return schatten_p_norm(h, p);
    };
    auto gradient = [&](const std::vector<double>& delta) {
        ComplexMatrix h = m;
        for (int i = 0; i < d; ++i) h(i, i) -= delta[static_cast<size_t>(i)];
        return detail::schatten_diag_gradient(h, p);
    };

    const std::vector<std::vector<double>> warm = {project_simplex(rho.diagonal_probs())};
    const double scale = std::max(1e-6, c_lp(rho, p));
    const detail::SimplexMinimum best =
        detail::minimize_on_simplex(objective, gradient, d, opts, warm, scale);
    if (best.spread > 10.0 * opts.tol) {
        std::ostringstream os;
        os << "c_p: restart values spread " << best.spread << " exceeds " << 10.0 * opts.tol;
        throw NoConvergence(os.str());
    }
    return best.value;
}

/// Holevo quantity of an ensemble: S(sum p_i rho_i) - sum p_i S(rho_i).
inline double holevo_chi(const std::vector<std::pair<double, DensityMatrix>>& ensemble) {
    if (ensemble.empty()) throw InvalidInput("holevo_chi: empty ensemble");
    const int d = ensemble.front().second.dim();
    std::vector<double> probs;
    probs.reserve(ensemble.size());
    ComplexMatrix avg(d, d);
    double mean_entropy = 0.0;
    for (const auto& [pr, st] : ensemble) {
        if (st.dim() != d)
            throw DimensionMismatch("holevo_chi: member dimension " + std::to_string(st.dim()) +
                                    " differs from " + std::to_string(d));
        probs.push_back(pr);
        avg = avg + st.matrix() * pr;
        if (pr > 0.0) mean_entropy += pr * von_neumann_entropy(st.matrix());
    }
    double sum = 0.0;
    for (double pr : probs) {
        if (!(pr >= -defaults::psd_tol))
            throw NotDistribution("holevo_chi: negative weight " + std::to_string(pr));
        sum += pr;
    }
    if (std::abs(sum - 1.0) > defaults::trace_tol)
        throw NotDistribution("holevo_chi: weights sum to " + std::to_string(sum));
    return std::max(0.0, von_neumann_entropy(avg.hermitian_part()) - mean_entropy);
}

/// The d diagonal phase unitaries U^k, U = diag(1, w, ..., w^(d-1)) with
/// w = exp(2 pi i / d). Averaging conjugations by them dephases any matrix.
inline std::vector<ComplexMatrix> dephasing_unitaries(int d) {
    if (d < 1) throw WrongDim("dephasing_unitaries: d must be >= 1");
    std::vector<ComplexMatrix> us;
    us.reserve(static_cast<size_t>(d));
    const double two_pi = 2.0 * 3.14159265358979323846;
    for (int k = 0; k < d; ++k) {
        ComplexMatrix u(d, d);
        for (int j = 0; j < d; ++j) {
            const double ang = two_pi * static_cast<double>(k) * static_cast<double>(j) /
                               static_cast<double>(d);
            u(j, j) = cplx(std::cos(ang), std::sin(ang));
        }
        us.push_back(std::move(u));
    }
    return us;
}

/// (1/d) sum_k U^k X U^-k: the full dephasing map. Equals diag(X) up to
/// round-off (asserted by tests, not here).
inline ComplexMatrix dephasing_twirl(const ComplexMatrix& x) {
    x.require_square("dephasing_twirl");
    const int d = x.rows();
    const std::vector<ComplexMatrix> us = dephasing_unitaries(d);
    ComplexMatrix acc(d, d);
    for (const auto& u : us) acc = acc + u * x * u.adjoint();
    return acc * (1.0 / static_cast<double>(d));
}

/// The 2^d diagonal sign unitaries diag(+-1, ..., +-1). Exponentially many,
/// so guarded to d <= 10; used as a cross-check twirling family.
inline std::vector<ComplexMatrix> sign_unitaries(int d) {
    if (d < 1) throw WrongDim("sign_unitaries: d must be >= 1");
    if (d > 10) throw OutOfRange("sign_unitaries: 2^d family only built for d <= 10");
    std::vector<ComplexMatrix> us;
    us.reserve(static_cast<size_t>(1) << d);
    for (int mask = 0; mask < (1 << d); ++mask) {
        ComplexMatrix u(d, d);
        for (int j = 0; j < d; ++j) u(j, j) = ((mask >> j) & 1) ? -1.0 : 1.0;
        us.push_back(std::move(u));
    }
    return us;
}

/// 2^-d sum over sign unitaries of S X S: dephases like dephasing_twirl but
/// with an exponentially larger family (d <= 10).
inline ComplexMatrix sign_twirl(const ComplexMatrix& x) {
    x.require_square("sign_twirl");
    const int d = x.rows();
    const std::vector<ComplexMatrix> us = sign_unitaries(d);
    ComplexMatrix acc(d, d);
    for (const auto& u : us) acc = acc + u * x * u.adjoint();
    return acc * (1.0 / static_cast<double>(us.size()));
}

/// Closed-form bounds tying c_l1 and c_r together for one state.
struct BoundReport {
    double c_l1 = 0.0;
    double c_r = 0.0;
    /// Pure-state style lower bound on c_l1: 2^c_r - 1.
    double pure_lower = 0.0;
    /// Entropy-continuity upper bound on c_r: c_l1 log2(d) + 1/(e ln 2).
    double fannes_upper = 0.0;
    /// Channel-capacity style upper bound on c_r: log2(d) * c_l1.
    double logd_upper = 0.0;
    /// c_l1 - c_r; conjectured non-negative, reported not asserted.
    double conjecture_gap = 0.0;
};

inline BoundReport bounds_report(const DensityMatrix& rho) {
    constexpr double inv_e_ln2 = 0.5307378454979482;  // 1 / (e ln 2)
    BoundReport r;
    r.c_l1 = c_l1(rho);
    r.c_r = c_r(rho);
    r.pure_lower = std::exp2(r.c_r) - 1.0;
    const double log2d = std::log2(static_cast<double>(rho.dim()));
    r.fannes_upper = r.c_l1 * log2d + inv_e_ln2;
    r.logd_upper = log2d * r.c_l1;
    r.conjecture_gap = r.c_l1 - r.c_r;
    return r;
}

}  // namespace cohlab
