#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "cohlab/complex_matrix.hpp"
#include "cohlab/errors.hpp"
#include "cohlab/linalg.hpp"
#include "cohlab/rng.hpp"

namespace cohlab {

/// Probability vector on the incoherent (computational) basis.
class DiagonalState {
  public:
    explicit DiagonalState(std::vector<double> probs) : p_(std::move(probs)) {
        if (p_.empty()) throw WrongDim("DiagonalState: empty probability vector");
        double sum = 0.0;
        for (double v : p_) {
            if (!std::isfinite(v) || v < -defaults::psd_tol)
                throw NotDistribution("DiagonalState: entry " + std::to_string(v) +
                                      " is not a probability");
            sum += v;
        }
        if (std::abs(sum - 1.0) > defaults::trace_tol)
            throw NotDistribution("DiagonalState: entries sum to " + std::to_string(sum));
        for (double& v : p_) v = std::max(0.0, v);
    }

    int dim() const { return static_cast<int>(p_.size()); }
    const std::vector<double>& probs() const { return p_; }
    double operator[](int i) const { return p_[static_cast<size_t>(i)]; }

    ComplexMatrix matrix() const { return ComplexMatrix::diagonal(p_); }

  private:
    std::vector<double> p_;
};

/// Validate that a matrix is a density operator: Hermitian within
/// `hermitian_tol`, eigenvalues >= -psd_tol, trace 1 within `trace_tol`.
/// Throws NotSquare/NotHermitian/NotPsd/TraceNotOne with residuals.
inline void validate_density(const ComplexMatrix& m) {
    m.require_square("validate_density");
    if (m.rows() == 0) throw WrongDim("validate_density: empty matrix");
    if (!m.all_finite()) throw InvalidInput("validate_density: non-finite entries");
    const double hres = m.hermiticity_residual();
    if (hres > defaults::hermitian_tol) {
        std::ostringstream os;
        os << "validate_density: hermiticity residual " << hres << " exceeds "
           << defaults::hermitian_tol;
        throw NotHermitian(os.str());
    }
    const double tres = std::abs(m.trace().real() - 1.0) + std::abs(m.trace().imag());
    if (tres > defaults::trace_tol) {
        std::ostringstream os;
        os << "validate_density: |trace - 1| = " << tres << " exceeds " << defaults::trace_tol;
        throw TraceNotOne(os.str());
    }
    const HermitianEigen eig = hermitian_eig(m);
    for (double lam : eig.values) {
        if (lam < -defaults::psd_tol) {
            std::ostringstream os;
            os << "validate_density: eigenvalue " << lam << " below -" << defaults::psd_tol;
            throw NotPsd(os.str());
        }
    }
}

/// Density operator. Construction validates; entries are then trusted.
class DensityMatrix {
  public:
    explicit DensityMatrix(ComplexMatrix m) : m_(std::move(m)) { validate_density(m_); }

    int dim() const { return m_.rows(); }
    const ComplexMatrix& matrix() const { return m_; }
    const cplx& operator()(int i, int j) const { return m_(i, j); }

    std::vector<double> diagonal_probs() const {
        std::vector<double> p(static_cast<size_t>(dim()));
        for (int i = 0; i < dim(); ++i) p[static_cast<size_t>(i)] = std::max(0.0, m_(i, i).real());
        return p;
    }

  private:
    ComplexMatrix m_;
};

/// Pure state: complex amplitude vector with unit l2 norm (within norm_tol).
class PureState {
  public:
    explicit PureState(std::vector<cplx> amps) : a_(std::move(amps)) {
        if (a_.empty()) throw WrongDim("PureState: empty amplitude vector");
        double n2 = 0.0;
        for (const cplx& z : a_) {
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
                throw InvalidInput("PureState: non-finite amplitude");
            n2 += std::norm(z);
        }
        if (std::abs(std::sqrt(n2) - 1.0) > defaults::norm_tol)
            throw NotNormalized("PureState: amplitude norm " + std::to_string(std::sqrt(n2)) +
                                " differs from 1 beyond " + std::to_string(defaults::norm_tol));
    }

    /// Normalize an arbitrary nonzero vector first, then construct.
    static PureState normalized(std::vector<cplx> amps) {
        double n2 = 0.0;
        for (const cplx& z : amps) n2 += std::norm(z);
        if (n2 <= 0.0) throw DegenerateInput("PureState::normalized: zero vector");
        const double inv = 1.0 / std::sqrt(n2);
        for (cplx& z : amps) z *= inv;
        return PureState(std::move(amps));
    }

    int dim() const { return static_cast<int>(a_.size()); }
    const std::vector<cplx>& amplitudes() const { return a_; }

    /// Squared moduli of the amplitudes (a probability vector).
    std::vector<double> probabilities() const {
        std::vector<double> p(a_.size());
        for (size_t i = 0; i < a_.size(); ++i) p[i] = std::norm(a_[i]);
        return p;
    }

  private:
    std::vector<cplx> a_;
};

/// Rank-one projector |psi><psi| as a DensityMatrix.
inline DensityMatrix pure_to_density(const PureState& psi) {
    return DensityMatrix(outer(psi.amplitudes(), psi.amplitudes()));
}

/// Canonical form: replace every amplitude by its modulus. All coherence
/// measures used here are invariant under this diagonal-phase rotation.
inline PureState strip_phases(const PureState& psi) {
    std::vector<cplx> a(psi.amplitudes().size());
    for (size_t i = 0; i < a.size(); ++i) a[i] = std::abs(psi.amplitudes()[i]);
    return PureState(std::move(a));
}

/// Uniform-superposition state (1, ..., 1)/sqrt(d).
inline PureState maximally_coherent(int d) {
    if (d < 1) throw WrongDim("maximally_coherent: d must be >= 1, got " + std::to_string(d));
    std::vector<cplx> a(static_cast<size_t>(d), cplx(1.0 / std::sqrt(static_cast<double>(d)), 0.0));
    return PureState(std::move(a));
}

/// Two-parameter qutrit family: amplitudes
/// (sqrt(x), sqrt((1-x) y), sqrt((1-x)(1-y))) for x, y in [0, 1].
inline PureState qutrit_from_xy(double x, double y) {
    if (!(x >= 0.0 && x <= 1.0) || !(y >= 0.0 && y <= 1.0))
        throw OutOfRange("qutrit_from_xy: (x, y) must lie in [0,1]^2, got (" +
                         std::to_string(x) + ", " + std::to_string(y) + ")");
    std::vector<cplx> a = {std::sqrt(x), std::sqrt((1.0 - x) * y),
                           std::sqrt((1.0 - x) * (1.0 - y))};
    return PureState::normalized(std::move(a));
}

/// n x n matrix supported on the main diagonal and the anti-diagonal.
/// `diag` has length n. `antidiag` has length n, entry i landing at
/// (i, n-1-i); for odd n the central entry of `antidiag` is ignored because
/// that cell belongs to the diagonal. Hermiticity is not enforced.
inline ComplexMatrix x_state(const std::vector<double>& diag, const std::vector<cplx>& antidiag,
                             int n) {
    if (static_cast<int>(diag.size()) != n)
        throw LengthMismatch("x_state: diag has length " + std::to_string(diag.size()) +
                             ", expected " + std::to_string(n));
    if (static_cast<int>(antidiag.size()) != n)
        throw LengthMismatch("x_state: antidiag has length " + std::to_string(antidiag.size()) +
                             ", expected " + std::to_string(n));
    ComplexMatrix m(n, n);
    for (int i = 0; i < n; ++i) {
        m(i, i) = diag[static_cast<size_t>(i)];
        const int j = n - 1 - i;
        if (j != i) m(i, j) = antidiag[static_cast<size_t>(i)];
    }
    return m;
}

/// Random density matrix of the given rank: G G^dagger / tr(G G^dagger) with
/// G a d x rank standard complex Gaussian matrix. Deterministic per seed.
inline DensityMatrix random_density(int d, int rank, std::uint64_t seed) {
    if (d < 1) throw WrongDim("random_density: d must be >= 1");
    if (rank < 1 || rank > d)
        throw BadRank("random_density: rank " + std::to_string(rank) + " outside [1, " +
                      std::to_string(d) + "]");
    Rng rng(seed);
    const ComplexMatrix g = rng.ginibre(d, rank);
    ComplexMatrix rho = g * g.adjoint();
    const double tr = rho.trace().real();
    if (tr <= 0.0) throw DegenerateInput("random_density: zero-trace sample");
    rho = rho * (1.0 / tr);
    return DensityMatrix(rho.hermitian_part());
}

/// Random pure state: normalized standard complex Gaussian vector.
inline PureState random_pure(int d, std::uint64_t seed) {
    if (d < 1) throw WrongDim("random_pure: d must be >= 1");
    Rng rng(seed);
    std::vector<cplx> a(static_cast<size_t>(d));
    for (cplx& z : a) z = rng.complex_gaussian();
    return PureState::normalized(std::move(a));
}

}  // namespace cohlab
