#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cohlab/complex_matrix.hpp"
#include "cohlab/errors.hpp"
#include "cohlab/measures.hpp"
#include "cohlab/states.hpp"
#include "cohlab/tracedist.hpp"

namespace cohlab {

/// One Kraus operator, d_out x d_in. Incoherent means every column has at
/// most one entry above the support floor, so basis states map to (scaled)
/// basis states.
struct KrausOperator {
    ComplexMatrix m;

    int d_out() const { return m.rows(); }
    int d_in() const { return m.cols(); }

    bool incoherent(double tol = defaults::support_tol) const {
        for (int j = 0; j < m.cols(); ++j) {
            int hits = 0;
            for (int i = 0; i < m.rows(); ++i)
                if (std::abs(m(i, j)) > tol) ++hits;
            if (hits > 1) return false;
        }
        return true;
    }
};

/// A complete set of incoherent Kraus operators with a common input
/// dimension. Output dimensions may differ between operators.
struct IncoherentChannel {
    std::vector<KrausOperator> kraus;
    int d_in = 0;
};

/// Checks incoherence of every operator (NotIncoherent names the operator
/// and column), common input dimension (DimMismatch), and completeness
/// sum K^dagger K = I within 1e-9 max-entry (NotComplete with the residual).
inline void validate_channel(const IncoherentChannel& ch) {
    if (ch.kraus.empty()) throw InvalidInput("validate_channel: no Kraus operators");
    const int d = ch.d_in;
    for (size_t n = 0; n < ch.kraus.size(); ++n) {
        const KrausOperator& k = ch.kraus[n];
        if (k.d_in() != d)
            throw DimMismatch("validate_channel: operator " + std::to_string(n) +
                              " has input dimension " + std::to_string(k.d_in()) +
                              ", channel declares " + std::to_string(d));
        for (int j = 0; j < k.m.cols(); ++j) {
            int hits = 0;
            for (int i = 0; i < k.m.rows(); ++i)
                if (std::abs(k.m(i, j)) > defaults::support_tol) ++hits;
            if (hits > 1)
                throw NotIncoherent("validate_channel: operator " + std::to_string(n) +
                                    ", column " + std::to_string(j) + " has " +
                                    std::to_string(hits) + " nonzero entries");
        }
    }
    ComplexMatrix acc(d, d);
    for (const KrausOperator& k : ch.kraus) acc = acc + k.m.adjoint() * k.m;
    const double residual = acc.max_abs_diff(ComplexMatrix::identity(d));
    if (residual > 1e-9) {
        std::ostringstream os;
        os << "validate_channel: completeness residual " << residual << " exceeds 1e-9";
        throw NotComplete(os.str());
    }
}

/// One selective outcome of a channel.
struct Outcome {
    double prob;
    DensityMatrix state;
};

/// Selective application result. Outcomes with probability below the floor
/// are dropped; their total mass is recorded here instead of a state.
struct ApplyResult {
    std::vector<Outcome> outcomes;
    double dropped_mass = 0.0;
};

inline constexpr double outcome_prob_floor = 1e-12;

/// Selective application: outcome n has probability tr(K_n rho K_n^dagger)
/// and state K_n rho K_n^dagger / prob.
inline ApplyResult apply(const IncoherentChannel& ch, const DensityMatrix& rho,
                         bool validated = false) {
    if (!validated) validate_channel(ch);
    if (rho.dim() != ch.d_in)
        throw WrongDim("apply: state dimension " + std::to_string(rho.dim()) +
                       " does not match channel input " + std::to_string(ch.d_in));
    ApplyResult res;
    for (const KrausOperator& k : ch.kraus) {
        ComplexMatrix out = k.m * rho.matrix() * k.m.adjoint();
        const double p = out.trace().real();
        if (p < outcome_prob_floor) {
            res.dropped_mass += std::max(0.0, p);
            continue;
        }
        out = out * (1.0 / p);
        res.outcomes.push_back({p, DensityMatrix(out.hermitian_part())});
    }
    return res;
}

/// Non-selective application sum_n K_n rho K_n^dagger. All operators must
/// share one output dimension.
inline DensityMatrix deterministic_apply(const IncoherentChannel& ch, const DensityMatrix& rho,
                                         bool validated = false) {
    if (!validated) validate_channel(ch);
    if (rho.dim() != ch.d_in)
        throw WrongDim("deterministic_apply: state dimension " + std::to_string(rho.dim()) +
                       " does not match channel input " + std::to_string(ch.d_in));
    const int d_out = ch.kraus.front().d_out();
    for (const KrausOperator& k : ch.kraus)
        if (k.d_out() != d_out)
            throw MixedOutputDims("deterministic_apply: operator output dims differ (" +
                                  std::to_string(k.d_out()) + " vs " + std::to_string(d_out) +
                                  ")");
    ComplexMatrix acc(d_out, d_out);
    for (const KrausOperator& k : ch.kraus) acc = acc + k.m * rho.matrix() * k.m.adjoint();
    return DensityMatrix(acc.hermitian_part());
}

/// Random incoherent channel, complete by construction: each operator is a
/// partial injection of columns into rows (so K^dagger K stays diagonal), and
/// for each input column the amplitude vector across operators is a sampled
/// unit vector (so the diagonal sums to exactly 1). Requires d_out >= d_in.
inline IncoherentChannel random_incoherent_channel(int d_in, int n_ops, int d_out,
                                                   std::uint64_t seed) {
    if (d_in < 1 || n_ops < 1) throw InvalidInput("random_incoherent_channel: bad sizes");
    if (d_out < d_in)
        throw InfeasibleShape("random_incoherent_channel: d_out " + std::to_string(d_out) +
                              " < d_in " + std::to_string(d_in) +
                              " cannot host injective column maps");
    Rng rng(seed);
    IncoherentChannel ch;
    ch.d_in = d_in;
    std::vector<std::vector<int>> rows(static_cast<size_t>(n_ops));
    for (int n = 0; n < n_ops; ++n) {
        std::vector<int> perm = rng.permutation(d_out);
        rows[static_cast<size_t>(n)].assign(perm.begin(), perm.begin() + d_in);
        ch.kraus.push_back({ComplexMatrix(d_out, d_in)});
    }
    for (int j = 0; j < d_in; ++j) {
        std::vector<cplx> amp(static_cast<size_t>(n_ops));
        double n2 = 0.0;
        for (cplx& z : amp) {
            z = rng.complex_gaussian();
            n2 += std::norm(z);
        }
        const double inv = 1.0 / std::sqrt(n2);
        for (int n = 0; n < n_ops; ++n)
            ch.kraus[static_cast<size_t>(n)].m(rows[static_cast<size_t>(n)][static_cast<size_t>(j)], j) =
                amp[static_cast<size_t>(n)] * inv;
    }
    validate_channel(ch);
    return ch;
}

/// Evaluate one coherence measure on a state. Schatten at p = 1 coincides
/// with the trace-distance measure and is routed there.
inline double evaluate_measure(const MeasureId& id, const DensityMatrix& rho,
                               SolverOptions opts = {}) {
    switch (id.kind) {
        case MeasureId::Kind::L1: return c_l1(rho);
        case MeasureId::Kind::RelEnt: return c_r(rho);
        case MeasureId::Kind::Lp:
            return id.p == 1.0 ? c_l1(rho) : c_lp(rho, id.p);
        case MeasureId::Kind::Schatten: {
            if (id.p == 1.0) return c_tr(rho, opts).value;
            SolverOptions o = opts;
            o.restarts = std::max(o.restarts, 8);
            return c_p(rho, id.p, o);
        }
        case MeasureId::Kind::Trace: return c_tr(rho, opts).value;
    }
    throw InvalidInput("evaluate_measure: unknown measure kind");
}

/// Before/after record for one (measure, state, channel) triple.
/// strong_gap = C(rho) - sum p_n C(rho_n); negative values witness a
/// strong-monotonicity violation. weak_gap uses the non-selective output and
/// is absent when operator output dimensions differ.
struct MonotonicityReport {
    MeasureId measure;
    double c_in = 0.0;
    double c_avg_out = 0.0;
    std::optional<double> c_det_out;
    double strong_gap = 0.0;
    std::optional<double> weak_gap;
    double dropped_mass = 0.0;
};

inline MonotonicityReport monotonicity_report(const MeasureId& id, const DensityMatrix& rho,
                                              const IncoherentChannel& ch,
                                              SolverOptions opts = {}) {
    validate_channel(ch);
    MonotonicityReport rep;
    rep.measure = id;
    rep.c_in = evaluate_measure(id, rho, opts);
    const ApplyResult out = apply(ch, rho, /*validated=*/true);
    rep.dropped_mass = out.dropped_mass;
    double avg = 0.0;
    for (const Outcome& o : out.outcomes) avg += o.prob * evaluate_measure(id, o.state, opts);
    rep.c_avg_out = avg;
    rep.strong_gap = rep.c_in - rep.c_avg_out;
    const int d_out = ch.kraus.front().d_out();
    const bool uniform_out = std::all_of(ch.kraus.begin(), ch.kraus.end(),
                                         [&](const KrausOperator& k) { return k.d_out() == d_out; });
    if (uniform_out) {
        const DensityMatrix det = deterministic_apply(ch, rho, /*validated=*/true);
        rep.c_det_out = evaluate_measure(id, det, opts);
        rep.weak_gap = rep.c_in - *rep.c_det_out;
    }
    return rep;
}

// --- Two-parameter 4x4 counterexample family -------------------------------

/// (1/4) [[1,0,a,0],[0,1,0,b],[conj a,0,1,0],[0,conj b,0,1]]; a state for
/// |a|, |b| <= 1.
inline DensityMatrix counterexample_state(cplx a, cplx b) {
    if (std::abs(a) > 1.0 + 1e-12 || std::abs(b) > 1.0 + 1e-12)
        throw OutOfRange("counterexample_state: |a|, |b| must be <= 1");
    ComplexMatrix m(4, 4);
    m(0, 0) = m(1, 1) = m(2, 2) = m(3, 3) = 0.25;
    m(0, 2) = 0.25 * a;
    m(2, 0) = 0.25 * std::conj(a);
    m(1, 3) = 0.25 * b;
    m(3, 1) = 0.25 * std::conj(b);
    return DensityMatrix(m);
}

/// The matching two-operator incoherent channel: K1 routes basis states
/// 1 -> 2 and 3 -> 4, K2 routes 2 -> 1 and 4 -> 3 (both rank two).
inline IncoherentChannel counterexample_channel() {
    ComplexMatrix k1(4, 4), k2(4, 4);
    k1(1, 0) = 1.0;
    k1(3, 2) = 1.0;
    k2(0, 1) = 1.0;
    k2(2, 3) = 1.0;
    return IncoherentChannel{{{k1}, {k2}}, 4};
}

/// Entrywise-lp and Schatten-p monotonicity records for the counterexample
/// family. The two coincide analytically on these block-structured states;
/// violation of strong monotonicity is expected exactly when p > 1 and
/// a b != 0.
struct LpCounterexampleReport {
    MonotonicityReport lp;
    MonotonicityReport schatten;
    bool violation_expected = false;
};

inline LpCounterexampleReport lp_counterexample(cplx a, cplx b, double p,
                                                SolverOptions opts = {}) {
    if (!(p >= 1.0) || !std::isfinite(p))
        throw BadExponent("lp_counterexample requires p >= 1, got " + std::to_string(p));
    const DensityMatrix rho = counterexample_state(a, b);
    const IncoherentChannel ch = counterexample_channel();
    LpCounterexampleReport rep;
    rep.lp = monotonicity_report(p == 1.0 ? MeasureId::l1() : MeasureId::lp(p), rho, ch, opts);
    rep.schatten =
        monotonicity_report(p == 1.0 ? MeasureId::trace() : MeasureId::schatten(p), rho, ch, opts);
    rep.violation_expected = p > 1.0 && std::abs(a) > 0.0 && std::abs(b) > 0.0;
    return rep;
}

// --- Ancilla-erasure violation ----------------------------------------------

/// Reports for the erasure channel {I (x) |0><i|} acting on rho (x) I/d_anc.
/// For p > 1 both the entrywise and Schatten families gain coherence: the
/// input value carries the factor d_anc^(1/p - 1) < 1 relative to the output.
struct TensorViolationReport {
    MonotonicityReport lp;
    MonotonicityReport schatten;
    double expected_input_factor = 1.0;  // d_anc^(1/p - 1)
};

inline TensorViolationReport tensor_monotonicity_violation(const DensityMatrix& rho, int d_anc,
                                                           double p, SolverOptions opts = {}) {
    if (d_anc < 2) throw WrongDim("tensor_monotonicity_violation: d_anc must be >= 2");
    if (!(p >= 1.0) || !std::isfinite(p))
        throw BadExponent("tensor_monotonicity_violation requires p >= 1");
    if (c_l1(rho) <= 1e-9)
        throw NotCoherent("tensor_monotonicity_violation: input state is incoherent");

    const int d = rho.dim();
    ComplexMatrix anc = ComplexMatrix::identity(d_anc) * (1.0 / static_cast<double>(d_anc));
    const DensityMatrix input(kron(rho.matrix(), anc).hermitian_part());

    IncoherentChannel ch;
    ch.d_in = d * d_anc;
    for (int i = 0; i < d_anc; ++i) {
        ComplexMatrix sel(d_anc, d_anc);
        sel(0, i) = 1.0;
        ch.kraus.push_back({kron(ComplexMatrix::identity(d), sel)});
    }

    TensorViolationReport rep;
    rep.lp = monotonicity_report(p == 1.0 ? MeasureId::l1() : MeasureId::lp(p), input, ch, opts);
    rep.schatten = monotonicity_report(
        p == 1.0 ? MeasureId::trace() : MeasureId::schatten(p), input, ch, opts);
    rep.expected_input_factor = std::pow(static_cast<double>(d_anc), 1.0 / p - 1.0);
    return rep;
}

// --- Flag condition ----------------------------------------------------------

/// C_tr(sum_i p_i rho_i (x) |i><i|) - sum_i p_i C_tr(rho_i). Attaching an
/// incoherent flag makes the blocks orthogonal, so the first term cannot
/// exceed the probability-weighted sum; values above solver noise would
/// contradict the strong-monotonicity picture for the trace measure.
inline double flag_check(const std::vector<std::pair<double, DensityMatrix>>& ensemble,
                         SolverOptions opts = {}) {
    if (ensemble.empty()) throw InvalidInput("flag_check: empty ensemble");
    const int d = ensemble.front().second.dim();
    const int n = static_cast<int>(ensemble.size());
    double psum = 0.0;
    for (const auto& [pr, st] : ensemble) {
        if (st.dim() != d)
            throw DimensionMismatch("flag_check: mixed state dimensions in ensemble");
        if (pr < -defaults::psd_tol) throw NotDistribution("flag_check: negative probability");
        psum += pr;
    }
    if (std::abs(psum - 1.0) > defaults::trace_tol)
        throw NotDistribution("flag_check: probabilities sum to " + std::to_string(psum));

    ComplexMatrix flagged(d * n, d * n);
    double weighted = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto& [pr, st] = ensemble[static_cast<size_t>(i)];
        ComplexMatrix flag(n, n);
        flag(i, i) = 1.0;
        flagged = flagged + kron(st.matrix(), flag) * pr;
        if (pr > 0.0) weighted += pr * c_tr(st, opts).value;
    }
    const DensityMatrix sigma(flagged.hermitian_part());
    return c_tr(sigma, opts).value - weighted;
}

}  // namespace cohlab
