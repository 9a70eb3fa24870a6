#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "cohlab/complex_matrix.hpp"
#include "cohlab/errors.hpp"

namespace cohlab {

namespace defaults {
/// Hermiticity residual allowed before a matrix is rejected.
inline constexpr double hermitian_tol = 1e-9;
/// Eigenvalues above -psd_tol are treated as non-negative (then clamped).
inline constexpr double psd_tol = 1e-9;
/// |tr - 1| allowed for states and probability vectors.
inline constexpr double trace_tol = 1e-8;
/// Unit-norm residual allowed for pure-state amplitude vectors.
inline constexpr double norm_tol = 1e-10;
/// Entries at or below this modulus count as structural zeros.
inline constexpr double support_tol = 1e-12;
/// Jacobi sweep target for the off-diagonal Frobenius mass.
inline constexpr double jacobi_tol = 1e-12;
}  // namespace defaults

/// Eigenvalues (descending) and matching orthonormal eigenvectors.
/// Column j of `vectors` is the eigenvector for `values[j]`.
struct HermitianEigen {
    std::vector<double> values;
    ComplexMatrix vectors;
};

/// Non-negative values in descending order (singular values, clamped spectra).
using Spectrum = std::vector<double>;

namespace detail {

/// Plain cyclic Jacobi on a dense real symmetric matrix held row-major in `a`
/// (n x n). Accumulates rotations into `v` (initialized to identity here).
/// Sweeps until the off-diagonal Frobenius mass drops below `tol`.
inline void jacobi_real_symmetric(std::vector<double>& a, std::vector<double>& v, int n,
                                  double tol) {
    auto at = [&](int i, int j) -> double& { return a[static_cast<size_t>(i) * n + j]; };
    auto vt = [&](int i, int j) -> double& { return v[static_cast<size_t>(i) * n + j]; };

    std::fill(v.begin(), v.end(), 0.0);
    for (int i = 0; i < n; ++i) vt(i, i) = 1.0;
    if (n < 2) return;

    auto off_mass = [&]() {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) s += 2.0 * at(i, j) * at(i, j);
        return std::sqrt(s);
    };

    const int max_sweeps = 80;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        if (off_mass() < tol) return;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = at(p, q);
                if (std::abs(apq) == 0.0) continue;
                const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const double tau = s / (1.0 + c);

                const double app = at(p, p);
                const double aqq = at(q, q);
                at(p, p) = app - t * apq;
                at(q, q) = aqq + t * apq;
                at(p, q) = 0.0;
                at(q, p) = 0.0;
                for (int k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    const double akp = at(k, p);
                    const double akq = at(k, q);
                    at(k, p) = akp - s * (akq + tau * akp);
                    at(p, k) = at(k, p);
                    at(k, q) = akq + s * (akp - tau * akq);
                    at(q, k) = at(k, q);
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = vt(k, p);
                    const double vkq = vt(k, q);
                    vt(k, p) = vkp - s * (vkq + tau * vkp);
                    vt(k, q) = vkq + s * (vkp - tau * vkq);
                }
            }
        }
    }
    if (off_mass() >= tol)
        throw NoConvergence("Jacobi eigensolver failed to reach off-diagonal mass " +
                            std::to_string(tol));
}

}  // namespace detail

/// Full eigendecomposition of a Hermitian matrix.
///
/// The complex problem is lifted to the 2d x 2d real symmetric matrix
/// [[Re H, -Im H], [Im H, Re H]] and solved by cyclic Jacobi. Each eigenvalue
/// of H appears twice in the lifted spectrum; one complex eigenvector per pair
/// is recovered by mapping real eigenvectors [a; b] to a + ib and running a
/// Gram-Schmidt pass that discards the duplicates. Deterministic for a fixed
/// input, and degenerate eigenvalues are handled by the same pass.
inline HermitianEigen hermitian_eig(const ComplexMatrix& h,
                                    double herm_tol = defaults::hermitian_tol) {
    h.require_square("hermitian_eig");
    const int d = h.rows();
    if (d == 0) return {{}, ComplexMatrix(0, 0)};
    const double herm_res = h.hermiticity_residual();
    if (herm_res > herm_tol) {
        std::ostringstream os;
        os << "hermitian_eig requires a Hermitian matrix; residual " << herm_res << " exceeds "
           << herm_tol;
        throw NotHermitian(os.str());
    }
    if (!h.all_finite()) throw InvalidInput("hermitian_eig: non-finite entries");

    const ComplexMatrix hs = h.hermitian_part();
    const int n = 2 * d;
    std::vector<double> a(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            const double re = hs(i, j).real();
            const double im = hs(i, j).imag();
            a[static_cast<size_t>(i) * n + j] = re;
            a[static_cast<size_t>(i) * n + (d + j)] = -im;
            a[static_cast<size_t>(d + i) * n + j] = im;
            a[static_cast<size_t>(d + i) * n + (d + j)] = re;
        }

    const double scale = std::max(1.0, hs.frobenius_norm());
    std::vector<double> v(static_cast<size_t>(n) * n, 0.0);
    detail::jacobi_real_symmetric(a, v, n, defaults::jacobi_tol * scale);

    // Sort lifted eigenpairs descending.
    std::vector<int> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
        return a[static_cast<size_t>(x) * n + x] > a[static_cast<size_t>(y) * n + y];
    });

    // Map real eigenvectors to complex candidates and keep the d that survive
    // Gram-Schmidt; the other d are the i-multiples of kept ones.
    HermitianEigen out;
    out.values.reserve(static_cast<size_t>(d));
    out.vectors = ComplexMatrix(d, d);
    std::vector<std::vector<cplx>> kept;
    kept.reserve(static_cast<size_t>(d));

    for (int idx = 0; idx < n && static_cast<int>(kept.size()) < d; ++idx) {
        const int col = order[static_cast<size_t>(idx)];
        std::vector<cplx> c(static_cast<size_t>(d));
        for (int i = 0; i < d; ++i)
            c[static_cast<size_t>(i)] = cplx(v[static_cast<size_t>(i) * n + col],
                                             v[static_cast<size_t>(d + i) * n + col]);
        // Two orthogonalization passes keep the basis clean.
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& u : kept) {
                cplx dot = 0.0;
                for (int i = 0; i < d; ++i) dot += std::conj(u[static_cast<size_t>(i)]) * c[static_cast<size_t>(i)];
                for (int i = 0; i < d; ++i) c[static_cast<size_t>(i)] -= dot * u[static_cast<size_t>(i)];
            }
        }
        double nrm = 0.0;
        for (const auto& z : c) nrm += std::norm(z);
        nrm = std::sqrt(nrm);
        if (nrm < 1e-4) continue;  // duplicate of an already-kept eigenvector
        for (auto& z : c) z /= nrm;
        out.values.push_back(a[static_cast<size_t>(col) * n + col]);
        kept.push_back(std::move(c));
    }
    if (static_cast<int>(kept.size()) != d)
        throw NoConvergence("hermitian_eig: eigenvector extraction found " +
                            std::to_string(kept.size()) + " of " + std::to_string(d) + " vectors");

    for (int j = 0; j < d; ++j)
        for (int i = 0; i < d; ++i) out.vectors(i, j) = kept[static_cast<size_t>(j)][static_cast<size_t>(i)];
    return out;
}

/// Singular values in descending order, computed from the Hermitian
/// eigenvalues of the smaller Gram matrix (negatives clamped before sqrt).
inline Spectrum singular_values(const ComplexMatrix& x) {
    if (!x.all_finite()) throw InvalidInput("singular_values: non-finite entries");
    if (x.rows() == 0 || x.cols() == 0) return {};
    const bool tall = x.rows() >= x.cols();
    const ComplexMatrix gram = tall ? (x.adjoint() * x) : (x * x.adjoint());
    // The Gram matrix is Hermitian by construction; round-off only.
    HermitianEigen eig = hermitian_eig(gram.hermitian_part(), 1e-6);
    Spectrum s;
    s.reserve(eig.values.size());
    for (double v : eig.values) s.push_back(std::sqrt(std::max(0.0, v)));
    std::sort(s.begin(), s.end(), std::greater<double>());
    return s;
}

/// Sum of singular values (requires a square matrix).
inline double trace_norm(const ComplexMatrix& x) {
    x.require_square("trace_norm");
    const Spectrum s = singular_values(x);
    return std::accumulate(s.begin(), s.end(), 0.0);
}

/// Schatten p-norm: lp norm of the singular value vector.
inline double schatten_p_norm(const ComplexMatrix& x, double p) {
    if (!(p >= 1.0) || !std::isfinite(p))
        throw BadExponent("schatten_p_norm requires p >= 1, got " + std::to_string(p));
    const Spectrum s = singular_values(x);
    double acc = 0.0;
    for (double v : s) acc += std::pow(v, p);
    return std::pow(acc, 1.0 / p);
}

/// Entrywise lp norm: (sum |x_ij|^p)^(1/p).
inline double lp_entrywise_norm(const ComplexMatrix& x, double p) {
    if (!(p >= 1.0) || !std::isfinite(p))
        throw BadExponent("lp_entrywise_norm requires p >= 1, got " + std::to_string(p));
    double acc = 0.0;
    for (const cplx& v : x.data()) acc += std::pow(std::abs(v), p);
    return std::pow(acc, 1.0 / p);
}

/// Shannon entropy in bits of a probability vector.
inline double shannon_entropy(const std::vector<double>& p,
                              double trace_tol = defaults::trace_tol) {
    double sum = 0.0;
    for (double v : p) {
        if (!std::isfinite(v)) throw NotDistribution("shannon_entropy: non-finite entry");
        if (v < -defaults::psd_tol)
            throw NotDistribution("shannon_entropy: negative entry " + std::to_string(v));
        sum += v;
    }
    if (std::abs(sum - 1.0) > trace_tol)
        throw NotDistribution("shannon_entropy: entries sum to " + std::to_string(sum) +
                              ", not 1");
    double h = 0.0;
    for (double v : p) {
        if (v > 0.0) h -= v * std::log2(v);
    }
    return std::max(0.0, h);
}

/// Von Neumann entropy in bits. Eigenvalues below psd_tol in magnitude are
/// clamped to zero; more negative ones reject the input.
inline double von_neumann_entropy(const ComplexMatrix& rho) {
    rho.require_square("von_neumann_entropy");
    const HermitianEigen eig = hermitian_eig(rho);
    double h = 0.0;
    double sum = 0.0;
    for (double lam : eig.values) {
        if (lam < -defaults::psd_tol)
            throw NotPsd("von_neumann_entropy: eigenvalue " + std::to_string(lam) +
                         " below -" + std::to_string(defaults::psd_tol));
        const double v = std::max(0.0, lam);
        sum += v;
        if (v > 0.0) h -= v * std::log2(v);
    }
    if (std::abs(sum - 1.0) > defaults::trace_tol)
        throw TraceNotOne("von_neumann_entropy: eigenvalues sum to " + std::to_string(sum));
    return std::max(0.0, h);
}

/// Euclidean projection onto the probability simplex {x >= 0, sum x = 1}.
inline std::vector<double> project_simplex(const std::vector<double>& v) {
    if (v.empty()) throw InvalidInput("project_simplex: empty vector");
    for (double x : v)
        if (!std::isfinite(x)) throw InvalidInput("project_simplex: non-finite entry");
    std::vector<double> u(v);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double cum = 0.0;
    double tau = 0.0;
    int support = 0;
    for (size_t j = 0; j < u.size(); ++j) {
        cum += u[j];
        const double t = (cum - 1.0) / static_cast<double>(j + 1);
        if (u[j] - t > 0.0) {
            tau = t;
            support = static_cast<int>(j + 1);
        }
    }
    (void)support;
    std::vector<double> out(v.size());
    for (size_t i = 0; i < v.size(); ++i) out[i] = std::max(0.0, v[i] - tau);
    // Guard against accumulated round-off: renormalize the (tiny) residual.
    double s = std::accumulate(out.begin(), out.end(), 0.0);
    if (s <= 0.0) {
        std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(out.size()));
    } else if (std::abs(s - 1.0) > 1e-14) {
        for (double& x : out) x /= s;
    }
    return out;
}

}  // namespace cohlab
