#include <catch_amalgamated.hpp>

#include <cmath>

#include "helpers.hpp"

using namespace cohlab;
using Catch::Matchers::WithinAbs;

namespace {

IncoherentChannel dephasing_channel(int d) {
    IncoherentChannel ch;
    ch.d_in = d;
    for (int i = 0; i < d; ++i) {
        ComplexMatrix k(d, d);
        k(i, i) = 1.0;
        ch.kraus.push_back({k});
    }
    return ch;
}

}  // namespace

TEST_CASE("Kraus operators and channel validation", "[channels]") {
    SECTION("column support classifies incoherence") {
        ComplexMatrix good(2, 2);
        good(0, 0) = 1.0;
        good(1, 1) = 1.0;
        REQUIRE(KrausOperator{good}.incoherent());
        ComplexMatrix bad(2, 2);
        bad(0, 0) = bad(1, 0) = 1.0 / std::sqrt(2.0);
        REQUIRE_FALSE(KrausOperator{bad}.incoherent());
    }
    SECTION("validate_channel failure modes") {
        // coherent column
        ComplexMatrix h(2, 2);
        h(0, 0) = h(1, 0) = h(0, 1) = 1.0 / std::sqrt(2.0);
        h(1, 1) = -1.0 / std::sqrt(2.0);
        REQUIRE_THROWS_AS(validate_channel({{{h}}, 2}), NotIncoherent);

        // incomplete
        ComplexMatrix half(2, 2);
        half(0, 0) = 1.0;
        REQUIRE_THROWS_AS(validate_channel({{{half}}, 2}), NotComplete);

        // mismatched input dimension
        REQUIRE_THROWS_AS(validate_channel({{{ComplexMatrix::identity(3)}}, 2}), DimMismatch);

        // empty
        REQUIRE_THROWS_AS(validate_channel({{}, 2}), InvalidInput);

        // dephasing is fine
        REQUIRE_NOTHROW(validate_channel(dephasing_channel(3)));
    }
}

TEST_CASE("selective and deterministic application", "[channels]") {
    Rng rng(61);
    SECTION("probabilities sum to one minus the dropped mass") {
        for (int trial = 0; trial < 60; ++trial) {
            const int d = 2 + rng.uniform_int(0, 2);
            const IncoherentChannel ch =
                random_incoherent_channel(d, 1 + rng.uniform_int(0, 3), d + rng.uniform_int(0, 2),
                                          rng.raw());
            const DensityMatrix rho = random_density(d, 1 + rng.uniform_int(0, d - 1), rng.raw());
            const ApplyResult res = apply(ch, rho);
            double total = res.dropped_mass;
            for (const Outcome& o : res.outcomes) {
                total += o.prob;
                REQUIRE(o.prob >= outcome_prob_floor);
                REQUIRE_NOTHROW(validate_density(o.state.matrix()));
            }
            REQUIRE_THAT(total, WithinAbs(1.0, 1e-10));
            REQUIRE(res.dropped_mass < 1e-9);
        }
    }
    SECTION("deterministic output equals the explicit operator sum") {
        for (int trial = 0; trial < 30; ++trial) {
            const int d = 2 + rng.uniform_int(0, 2);
            const IncoherentChannel ch =
                random_incoherent_channel(d, 2 + rng.uniform_int(0, 2), d, rng.raw());
            const DensityMatrix rho = random_density(d, d, rng.raw());
            const DensityMatrix out = deterministic_apply(ch, rho);
            ComplexMatrix acc(d, d);
            for (const KrausOperator& k : ch.kraus)
                acc = acc + k.m * rho.matrix() * k.m.adjoint();
            REQUIRE(out.matrix().max_abs_diff(acc) < 1e-12);
        }
    }
    SECTION("dephasing keeps exactly the diagonal") {
        const DensityMatrix rho = random_density(3, 3, rng.raw());
        const DensityMatrix out = deterministic_apply(dephasing_channel(3), rho);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                if (i == j)
                    REQUIRE_THAT(out(i, j).real(), WithinAbs(rho(i, i).real(), 1e-14));
                else
                    REQUIRE_THAT(std::abs(out(i, j)), WithinAbs(0.0, 1e-14));
            }
    }
    SECTION("mixed output dimensions are selective-only") {
        IncoherentChannel ch;
        ch.d_in = 2;
        ComplexMatrix wide(3, 2), narrow(2, 2);
        wide(0, 0) = 1.0 / std::sqrt(2.0);
        wide(2, 1) = 1.0 / std::sqrt(2.0);
        narrow(0, 0) = 1.0 / std::sqrt(2.0);
        narrow(1, 1) = 1.0 / std::sqrt(2.0);
        ch.kraus = {{wide}, {narrow}};
        const DensityMatrix rho = random_density(2, 2, rng.raw());
        REQUIRE_NOTHROW(apply(ch, rho));
        REQUIRE_THROWS_AS(deterministic_apply(ch, rho), MixedOutputDims);
    }
    SECTION("dimension mismatch between state and channel") {
        REQUIRE_THROWS_AS(apply(dephasing_channel(2), random_density(3, 3, rng.raw())), WrongDim);
    }
}

TEST_CASE("random incoherent channels", "[channels]") {
    Rng rng(62);
    SECTION("complete to machine precision with incoherent columns") {
        for (int trial = 0; trial < 50; ++trial) {
            const int d_in = 2 + rng.uniform_int(0, 3);
            const int d_out = d_in + rng.uniform_int(0, 2);
            const int n_ops = 1 + rng.uniform_int(0, 4);
            const IncoherentChannel ch = random_incoherent_channel(d_in, n_ops, d_out, rng.raw());
            ComplexMatrix acc(d_in, d_in);
            for (const KrausOperator& k : ch.kraus) {
                REQUIRE(k.incoherent());
                REQUIRE(k.d_out() == d_out);
                acc = acc + k.m.adjoint() * k.m;
            }
            REQUIRE(acc.max_abs_diff(ComplexMatrix::identity(d_in)) <= 1e-12);
        }
    }
    SECTION("deterministic per seed") {
        const IncoherentChannel a = random_incoherent_channel(3, 3, 4, 987);
        const IncoherentChannel b = random_incoherent_channel(3, 3, 4, 987);
        REQUIRE(a.kraus.size() == b.kraus.size());
        for (size_t n = 0; n < a.kraus.size(); ++n)
            REQUIRE(a.kraus[n].m.max_abs_diff(b.kraus[n].m) == 0.0);
    }
    SECTION("shrinking maps are rejected") {
        REQUIRE_THROWS_AS(random_incoherent_channel(3, 2, 2, 1), InfeasibleShape);
        REQUIRE_THROWS_AS(random_incoherent_channel(0, 2, 2, 1), InvalidInput);
    }
}

TEST_CASE("measure dispatch", "[channels]") {
    const DensityMatrix rho = pure_to_density(maximally_coherent(3));
    REQUIRE_THAT(evaluate_measure(MeasureId::l1(), rho), WithinAbs(2.0, 1e-12));
    REQUIRE_THAT(evaluate_measure(MeasureId::relent(), rho),
                 WithinAbs(std::log2(3.0), 1e-10));
    REQUIRE_THAT(evaluate_measure(MeasureId::lp(1.0), rho), WithinAbs(2.0, 1e-12));
    REQUIRE_THAT(evaluate_measure(MeasureId::lp(2.0), rho),
                 WithinAbs(std::sqrt(6.0) / 3.0, 1e-12));
    // Schatten at p = 1 routes to the trace-distance dispatcher (pure backend)
    REQUIRE_THAT(evaluate_measure(MeasureId::schatten(1.0), rho),
                 WithinAbs(4.0 / 3.0, 1e-6));
    REQUIRE_THAT(evaluate_measure(MeasureId::trace(), rho), WithinAbs(4.0 / 3.0, 1e-6));
}

TEST_CASE("monotone measures never gain under incoherent channels", "[channels]") {
    Rng rng(63);
    for (int trial = 0; trial < 150; ++trial) {
        const int d = 2 + rng.uniform_int(0, 2);
        const DensityMatrix rho = random_density(d, 1 + rng.uniform_int(0, d - 1), rng.raw());
        const IncoherentChannel ch = random_incoherent_channel(
            d, 1 + rng.uniform_int(0, 3), d + rng.uniform_int(0, 2), rng.raw());
        for (const MeasureId& id : {MeasureId::l1(), MeasureId::relent()}) {
            const MonotonicityReport rep = monotonicity_report(id, rho, ch);
            REQUIRE(rep.strong_gap >= -1e-9);
            if (rep.weak_gap) REQUIRE(*rep.weak_gap >= -1e-9);
            REQUIRE_THAT(rep.c_in - rep.c_avg_out, WithinAbs(rep.strong_gap, 1e-15));
        }
    }
}

TEST_CASE("column-pair contraction bound behind l1 monotonicity", "[channels]") {
    // For any 2x2 sub-block the selective outputs pick up |beta c| + |alpha e|
    // from the off-diagonal entries c, e while the input contributes
    // sqrt(|b|^2 + |c|^2 + |e|^2) >= the Cauchy-Schwarz combination with
    // |alpha|^2 + |beta|^2 = 1. Spot-check the scalar inequality densely.
    Rng rng(64);
    for (int trial = 0; trial < 100000; ++trial) {
        const double phase = rng.uniform(0.0, 1.0);
        const double alpha = std::sqrt(phase);
        const double beta = std::sqrt(1.0 - phase);
        const double b = rng.uniform(), c = rng.uniform(), e = rng.uniform();
        const double lhs = beta * c + alpha * e;
        const double rhs = std::sqrt(b * b + c * c + e * e);
        REQUIRE(lhs <= rhs + 1e-12);
    }
}

TEST_CASE("qubit Schatten weak monotonicity", "[channels]") {
    // For qubit outputs the Schatten family is weakly monotone; the solver
    // should never find a deterministic-output gain.
    Rng rng(65);
    for (int trial = 0; trial < 12; ++trial) {
        const DensityMatrix rho = random_density(2, 2, rng.raw());
        const IncoherentChannel ch =
            random_incoherent_channel(2, 1 + rng.uniform_int(0, 2), 2, rng.raw());
        for (double p : {1.5, 2.0, 3.0}) {
            SolverOptions opts;
            opts.seed = rng.raw();
            const MonotonicityReport rep = monotonicity_report(MeasureId::schatten(p), rho, ch,
                                                               opts);
            REQUIRE(rep.weak_gap.has_value());
            REQUIRE(*rep.weak_gap >= -1e-6);
        }
    }
}

TEST_CASE("two-parameter counterexample family", "[channels]") {
    SECTION("state validity and closed-form off-diagonal mass") {
        Rng rng(66);
        for (int trial = 0; trial < 20; ++trial) {
            const double a = rng.uniform(), b = rng.uniform();
            const DensityMatrix rho = counterexample_state(a, b);
            REQUIRE_NOTHROW(validate_density(rho.matrix()));
            REQUIRE_THAT(c_l1(rho), WithinAbs((a + b) / 2.0, 1e-12));
        }
        REQUIRE_THROWS_AS(counterexample_state(1.5, 0.2), OutOfRange);
        REQUIRE_THROWS_AS(counterexample_state(0.2, cplx(1.2, 0.9)), OutOfRange);
    }
    SECTION("channel outcomes are the two halves, each with probability 1/2") {
        const cplx a(0.6, 0.2), b(0.3, -0.4);
        const DensityMatrix rho = counterexample_state(a, b);
        const ApplyResult res = apply(counterexample_channel(), rho);
        REQUIRE(res.outcomes.size() == 2);
        REQUIRE_THAT(res.outcomes[0].prob, WithinAbs(0.5, 1e-14));
        REQUIRE_THAT(res.outcomes[1].prob, WithinAbs(0.5, 1e-14));
        const DensityMatrix& r1 = res.outcomes[0].state;
        REQUIRE_THAT(r1(1, 1).real(), WithinAbs(0.5, 1e-14));
        REQUIRE_THAT(r1(3, 3).real(), WithinAbs(0.5, 1e-14));
        REQUIRE_THAT(std::abs(r1(1, 3) - a * 0.5), WithinAbs(0.0, 1e-14));
        const DensityMatrix& r2 = res.outcomes[1].state;
        REQUIRE_THAT(r2(0, 0).real(), WithinAbs(0.5, 1e-14));
        REQUIRE_THAT(std::abs(r2(0, 2) - b * 0.5), WithinAbs(0.0, 1e-14));
    }
    SECTION("closed-form monotonicity gaps across p") {
        Rng rng(67);
        for (double p : {1.0, 1.5, 2.0, 3.0}) {
            const double a = 0.25 + 0.75 * rng.uniform();
            const double b = 0.25 + 0.75 * rng.uniform();
            SolverOptions opts;
            opts.seed = rng.raw();
            const LpCounterexampleReport rep = lp_counterexample(a, b, p, opts);

            const double c_in_expected =
                p == 1.0 ? (a + b) / 2.0
                         : std::pow(2.0, 1.0 / p) / 4.0 * std::pow(std::pow(a, p) + std::pow(b, p),
                                                                    1.0 / p);
            const double c_avg_expected =
                p == 1.0 ? (a + b) / 2.0 : std::pow(2.0, 1.0 / p - 2.0) * (a + b);
            REQUIRE_THAT(rep.lp.c_in, WithinAbs(c_in_expected, 1e-10));
            REQUIRE_THAT(rep.lp.c_avg_out, WithinAbs(c_avg_expected, 1e-10));
            REQUIRE(rep.violation_expected == (p > 1.0));
            if (p > 1.0) {
                REQUIRE(rep.lp.strong_gap < -1e-9);
                REQUIRE(rep.schatten.strong_gap < -1e-6);
                // the Schatten values coincide with the entrywise ones here
                REQUIRE_THAT(rep.schatten.c_in, WithinAbs(rep.lp.c_in, 1e-5));
                REQUIRE_THAT(rep.schatten.c_avg_out, WithinAbs(rep.lp.c_avg_out, 1e-5));
            } else {
                REQUIRE_THAT(rep.lp.strong_gap, WithinAbs(0.0, 1e-10));
                REQUIRE(rep.schatten.strong_gap >= -1e-6);
            }
        }
    }
    SECTION("p = 2 at full coupling reproduces the reference gap") {
        const LpCounterexampleReport rep = lp_counterexample(1.0, 1.0, 2.0);
        REQUIRE_THAT(rep.lp.c_in, WithinAbs(0.5, 1e-12));
        REQUIRE_THAT(rep.lp.c_avg_out, WithinAbs(1.0 / std::sqrt(2.0), 1e-12));
        REQUIRE_THAT(rep.lp.strong_gap, WithinAbs(0.5 - 1.0 / std::sqrt(2.0), 1e-12));
        REQUIRE(rep.lp.strong_gap <= -0.2);
        REQUIRE_THROWS_AS(lp_counterexample(1.0, 1.0, 0.5), BadExponent);
    }
}

TEST_CASE("ancilla erasure gains coherence for p > 1", "[channels]") {
    const DensityMatrix rho = pure_to_density(maximally_coherent(3));
    SECTION("p = 2 reference numbers") {
        const TensorViolationReport rep = tensor_monotonicity_violation(rho, 2, 2.0);
        REQUIRE_THAT(rep.lp.c_in, WithinAbs(1.0 / std::sqrt(3.0), 1e-12));
        REQUIRE_THAT(rep.lp.c_avg_out, WithinAbs(std::sqrt(2.0 / 3.0), 1e-12));
        REQUIRE_THAT(rep.expected_input_factor, WithinAbs(1.0 / std::sqrt(2.0), 1e-15));
        REQUIRE_THAT(rep.lp.c_in / rep.lp.c_avg_out,
                     WithinAbs(rep.expected_input_factor, 1e-10));
        REQUIRE(rep.lp.weak_gap.has_value());
        REQUIRE(*rep.lp.weak_gap < 0.0);
        REQUIRE(rep.schatten.weak_gap.has_value());
        REQUIRE(*rep.schatten.weak_gap < 0.0);
        REQUIRE_THAT(rep.schatten.c_in / rep.schatten.c_avg_out,
                     WithinAbs(rep.expected_input_factor, 1e-4));
    }
    SECTION("p = 1 stays flat") {
        const TensorViolationReport rep = tensor_monotonicity_violation(rho, 2, 1.0);
        REQUIRE_THAT(rep.lp.strong_gap, WithinAbs(0.0, 1e-10));
        REQUIRE_THAT(rep.expected_input_factor, WithinAbs(1.0, 1e-15));
    }
    SECTION("input validation") {
        const DensityMatrix diag(ComplexMatrix::diagonal(std::vector<double>{0.5, 0.5}));
        REQUIRE_THROWS_AS(tensor_monotonicity_violation(diag, 2, 2.0), NotCoherent);
        REQUIRE_THROWS_AS(tensor_monotonicity_violation(rho, 1, 2.0), WrongDim);
        REQUIRE_THROWS_AS(tensor_monotonicity_violation(rho, 2, 0.5), BadExponent);
    }
}

TEST_CASE("flagged mixtures never beat the weighted sum", "[channels]") {
    Rng rng(68);
    SECTION("qubit ensembles sit at exactly zero") {
        for (int trial = 0; trial < 20; ++trial) {
            const double w = 0.1 + 0.8 * rng.uniform();
            const std::vector<std::pair<double, DensityMatrix>> ensemble = {
                {w, random_density(2, 1 + rng.uniform_int(0, 1), rng.raw())},
                {1.0 - w, random_density(2, 2, rng.raw())},
            };
            REQUIRE_THAT(flag_check(ensemble), WithinAbs(0.0, 1e-6));
        }
    }
    SECTION("degenerate and invalid ensembles") {
        const DensityMatrix rho = random_density(2, 2, rng.raw());
        REQUIRE_THAT(flag_check({{1.0, rho}}), WithinAbs(0.0, 1e-9));
        REQUIRE_THROWS_AS(flag_check({}), InvalidInput);
        REQUIRE_THROWS_AS(flag_check({{0.5, rho}, {0.5, random_density(3, 3, 7)}}),
                          DimensionMismatch);
        REQUIRE_THROWS_AS(flag_check({{0.7, rho}, {0.7, rho}}), NotDistribution);
    }
    SECTION("incoherent ensembles give zero") {
        const DensityMatrix d1(ComplexMatrix::diagonal(std::vector<double>{0.3, 0.7}));
        const DensityMatrix d2(ComplexMatrix::diagonal(std::vector<double>{0.9, 0.1}));
        REQUIRE_THAT(flag_check({{0.4, d1}, {0.6, d2}}), WithinAbs(0.0, 1e-9));
    }
}

TEST_CASE("a pinned qutrit instance where selective outcomes gain trace-distance coherence",
          "[channels]") {
    // Found by the default random scan and frozen here as explicit matrices:
    // a valid rank-2 qutrit state and a complete incoherent channel whose
    // two selective outcomes carry, on average, strictly MORE trace-distance
    // coherence than the input. Each per-state value is the optimum of a
    // convex program, so the independent multilevel grid below certifies the
    // solver's numbers globally (an external interior-point SDP run on the
    // exported programs reproduces them as well). The measure therefore is
    // not a strong monotone beyond qubits, even though the deterministic
    // (averaged-output) direction stays monotone on this instance.
    const cplx i1(0.0, 1.0);
    ComplexMatrix r(3, 3);
    r(0, 0) = 0.45511529720822463;
    r(0, 1) = -0.32586719237504441 - 0.24923905363345042 * i1;
    r(0, 2) = -0.11734744866452106 + 0.021720932734864636 * i1;
    r(1, 0) = std::conj(r(0, 1));
    r(1, 1) = 0.50525068799337758;
    r(1, 2) = 0.049322699205460348 - 0.055127659962082749 * i1;
    r(2, 0) = std::conj(r(0, 2));
    r(2, 1) = std::conj(r(1, 2));
    r(2, 2) = 0.039634014798397822;
    const DensityMatrix rho(r);

    ComplexMatrix k1(3, 3);
    k1(0, 1) = 0.46364205144023524 - 0.20543273538391171 * i1;
    k1(1, 2) = 0.70234790483521459 + 0.59453128738202343 * i1;
    k1(2, 0) = 0.42075526973935068 + 0.37117585615764387 * i1;
    ComplexMatrix k2(3, 3);
    k2(0, 2) = -0.1627553840056038 + 0.35602058068972181 * i1;
    k2(1, 1) = 0.84630239654538031 - 0.16311251629019635 * i1;
    k2(2, 0) = 0.33017384129009009 + 0.75906437231630941 * i1;
    const IncoherentChannel ch{{{k1}, {k2}}, 3};
    REQUIRE_NOTHROW(validate_channel(ch));

    SolverOptions opts;
    opts.seed = 4242;
    opts.restarts = 12;
    const MonotonicityReport rep = monotonicity_report(MeasureId::trace(), rho, ch, opts);

    // independent global values via the convex grid oracle
    const double g_in = testutil::grid_ctr(rho.matrix(), 22, 4);
    const ApplyResult out = apply(ch, rho);
    REQUIRE(out.outcomes.size() == 2);
    double g_avg = 0.0;
    for (const Outcome& o : out.outcomes)
        g_avg += o.prob * testutil::grid_ctr(o.state.matrix(), 22, 4);

    REQUIRE_THAT(rep.c_in, WithinAbs(g_in, 1e-6));
    REQUIRE_THAT(rep.c_avg_out, WithinAbs(g_avg, 1e-6));
    REQUIRE_THAT(rep.c_in, WithinAbs(0.874822540, 1e-6));
    REQUIRE_THAT(rep.c_avg_out, WithinAbs(0.878047250, 1e-6));

    // the selective gap is genuinely negative, far beyond solver tolerance
    REQUIRE(rep.strong_gap < -3e-3);
    REQUIRE(g_in - g_avg < -3e-3);

    // while the deterministic direction still behaves monotonically here
    REQUIRE(rep.weak_gap.has_value());
    REQUIRE(*rep.weak_gap >= -1e-6);
}
