// core.hpp: dense complex operators on the truncated space H_qubit (x) H_cavity.
//
// Conventions used everywhere in jcdiss:
//   * qubit factor first, qubit basis (g, e) -> indices (0, 1);
//   * cavity Fock index 0..N, fock_dim = N + 1;
//   * joint index of |q, n> is q * fock_dim + n;
//   * vectorization stacks columns: vec(X)[i + j * d] = X(i, j), hence
//     vec(A X B) = (B^T (x) A) vec(X).

#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <utility>

#include "jcdiss/errors.hpp"

namespace jcdiss {

template <typename Real>
using Complex = std::complex<Real>;
template <typename Real>
using CMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using CVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;
template <typename Real>
using CMatrix2 = Eigen::Matrix<std::complex<Real>, 2, 2>;
template <typename Real>
using CMatrix4 = Eigen::Matrix<std::complex<Real>, 4, 4>;
template <typename Real>
using CVector4 = Eigen::Matrix<std::complex<Real>, 4, 1>;

using Index = Eigen::Index;

inline constexpr Index kQubitDim = 2;
inline constexpr Index kGround = 0;
inline constexpr Index kExcited = 1;

class HilbertDims {
public:
    explicit HilbertDims(Index fock_dim = 4) : fock_dim_(fock_dim) {
        if (fock_dim < 2)
            throw ValidationError("fock_dim must be >= 2 (vacuum plus at least one photon), got " +
                                  std::to_string(fock_dim));
    }

    Index qubit_dim() const { return kQubitDim; }
    Index fock_dim() const { return fock_dim_; }
    Index max_photons() const { return fock_dim_ - 1; }
    Index total_dim() const { return kQubitDim * fock_dim_; }

    // Joint index of |q, n>.
    Index index(Index qubit, Index photons) const {
        if (qubit < 0 || qubit >= kQubitDim || photons < 0 || photons >= fock_dim_)
            throw ValidationError("basis state |" + std::to_string(qubit) + ", " +
                                  std::to_string(photons) + "> outside the truncated space");
        return qubit * fock_dim_ + photons;
    }

    friend bool operator==(const HilbertDims&, const HilbertDims&) = default;

private:
    Index fock_dim_;
};

struct Tolerances {
    double hermiticity = 1e-10;
    double trace = 1e-10;
    double positivity = 1e-8;
};

struct DensityCheck {
    double hermiticity_error = 0;  // max |rho - rho^dagger|
    double trace_error = 0;        // |Tr rho - 1|
    double min_eigenvalue = 0;     // of the Hermitian part
    bool ok = false;
};

template <typename Real>
DensityCheck check_density(const CMatrix<Real>& m, const Tolerances& tol = {}) {
    DensityCheck c;
    if (m.rows() != m.cols() || m.rows() == 0)
        return c;
    c.hermiticity_error = static_cast<double>((m - m.adjoint()).cwiseAbs().maxCoeff());
    c.trace_error = static_cast<double>(std::abs(m.trace() - Complex<Real>(1)));
    const CMatrix<Real> herm = (m + m.adjoint()) / Real(2);
    Eigen::SelfAdjointEigenSolver<CMatrix<Real>> es(herm, Eigen::EigenvaluesOnly);
    c.min_eigenvalue = static_cast<double>(es.eigenvalues().minCoeff());
    c.ok = c.hermiticity_error <= tol.hermiticity && c.trace_error <= tol.trace &&
           c.min_eigenvalue >= -tol.positivity;
    return c;
}

// A square complex matrix meant to be a state. The constructor only checks the
// shape; use checked() when the physical invariants must hold on entry.
template <typename Real>
class DensityMatrix {
public:
    DensityMatrix() = default;
    explicit DensityMatrix(CMatrix<Real> m) : m_(std::move(m)) {
        if (m_.rows() != m_.cols() || m_.rows() == 0)
            throw ValidationError("density matrix must be square and non-empty");
    }

    static DensityMatrix checked(CMatrix<Real> m, const Tolerances& tol = {}) {
        DensityMatrix rho(std::move(m));
        const auto c = rho.check(tol);
        if (!c.ok)
            throw ValidationError("not a density matrix: hermiticity error " +
                                  std::to_string(c.hermiticity_error) + ", trace error " +
                                  std::to_string(c.trace_error) + ", min eigenvalue " +
                                  std::to_string(c.min_eigenvalue));
        return rho;
    }

    static DensityMatrix pure(const CVector<Real>& psi) {
        return DensityMatrix(psi * psi.adjoint());
    }

    const CMatrix<Real>& matrix() const { return m_; }
    Index dim() const { return m_.rows(); }
    DensityCheck check(const Tolerances& tol = {}) const { return check_density<Real>(m_, tol); }

    Real purity() const { return (m_ * m_).trace().real(); }

private:
    CMatrix<Real> m_;
};

// a on the Fock factor alone: a(n-1, n) = sqrt(n).
template <typename Real = double>
CMatrix<Real> annihilation_op(const HilbertDims& dims) {
    const Index d = dims.fock_dim();
    CMatrix<Real> a = CMatrix<Real>::Zero(d, d);
    for (Index n = 1; n < d; ++n)
        a(n - 1, n) = std::sqrt(static_cast<Real>(n));
    return a;
}

template <typename Real = double>
CMatrix<Real> number_op(const HilbertDims& dims) {
    const Index d = dims.fock_dim();
    CMatrix<Real> n = CMatrix<Real>::Zero(d, d);
    for (Index k = 0; k < d; ++k)
        n(k, k) = static_cast<Real>(k);
    return n;
}

template <typename Real = double>
struct QubitOps {
    CMatrix<Real> sigma_plus;   // |e><g|
    CMatrix<Real> sigma_minus;  // |g><e|
};

template <typename Real = double>
QubitOps<Real> qubit_ops() {
    QubitOps<Real> ops{CMatrix<Real>::Zero(2, 2), CMatrix<Real>::Zero(2, 2)};
    ops.sigma_plus(kExcited, kGround) = Real(1);
    ops.sigma_minus(kGround, kExcited) = Real(1);
    return ops;
}

template <typename DerivedA, typename DerivedB>
auto kron(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
    using Scalar = typename DerivedA::Scalar;
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out = Eigen::kroneckerProduct(a.eval(), b.eval());
    return out;
}

// I_qubit (x) A, i.e. an operator acting on the cavity only.
template <typename Derived>
auto lift_cavity(const Eigen::MatrixBase<Derived>& cavity_op) {
    using Scalar = typename Derived::Scalar;
    using M = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    return kron(M::Identity(kQubitDim, kQubitDim), cavity_op);
}

template <typename Derived>
auto lift_qubit(const Eigen::MatrixBase<Derived>& qubit_op, const HilbertDims& dims) {
    using Scalar = typename Derived::Scalar;
    using M = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    return kron(qubit_op, M::Identity(dims.fock_dim(), dims.fock_dim()));
}

template <typename Derived>
auto vectorize(const Eigen::MatrixBase<Derived>& m) {
    using Scalar = typename Derived::Scalar;
    if (m.rows() != m.cols())
        throw ValidationError("vectorize: matrix must be square");
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> dense = m;
    return Eigen::Matrix<Scalar, Eigen::Dynamic, 1>(
        Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>(dense.data(), dense.size()));
}

template <typename Real>
CVector<Real> vectorize(const DensityMatrix<Real>& rho) {
    return vectorize(rho.matrix());
}

template <typename Derived>
auto unvectorize(const Eigen::MatrixBase<Derived>& v) {
    using Scalar = typename Derived::Scalar;
    const Index d = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
    if (d * d != v.size() || v.cols() != 1)
        throw ValidationError("unvectorize: length " + std::to_string(v.size()) + " is not a square");
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> dense = v;
    return Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>(
        Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>>(dense.data(), d, d));
}

// Superoperator of X -> A X B under column stacking.
template <typename DerivedA, typename DerivedB>
auto sandwich_superop(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
    return kron(b.transpose(), a);
}

template <typename Real>
CMatrix<Real> partial_trace_cavity(const CMatrix<Real>& rho, const HilbertDims& dims) {
    if (rho.rows() != dims.total_dim() || rho.cols() != dims.total_dim())
        throw ValidationError("partial_trace_cavity: expected a " + std::to_string(dims.total_dim()) +
                              "-dimensional operator, got " + std::to_string(rho.rows()) + "x" +
                              std::to_string(rho.cols()));
    const Index f = dims.fock_dim();
    CMatrix<Real> out = CMatrix<Real>::Zero(kQubitDim, kQubitDim);
    for (Index q = 0; q < kQubitDim; ++q)
        for (Index p = 0; p < kQubitDim; ++p)
            out(q, p) = rho.block(q * f, p * f, f, f).trace();
    return out;
}

template <typename Real>
DensityMatrix<Real> partial_trace_cavity(const DensityMatrix<Real>& rho, const HilbertDims& dims) {
    return DensityMatrix<Real>(partial_trace_cavity<Real>(rho.matrix(), dims));
}

// Diagonal of the cavity's reduced state: population of each Fock level.
template <typename Real>
Eigen::Matrix<Real, Eigen::Dynamic, 1> fock_populations(const CMatrix<Real>& rho, const HilbertDims& dims) {
    const Index f = dims.fock_dim();
    Eigen::Matrix<Real, Eigen::Dynamic, 1> pops = Eigen::Matrix<Real, Eigen::Dynamic, 1>::Zero(f);
    for (Index q = 0; q < kQubitDim; ++q)
        for (Index n = 0; n < f; ++n)
            pops(n) += rho(q * f + n, q * f + n).real();
    return pops;
}

// |q, n> as a column vector on the joint space.
template <typename Real = double>
CVector<Real> basis_ket(const HilbertDims& dims, Index qubit, Index photons) {
    CVector<Real> v = CVector<Real>::Zero(dims.total_dim());
    v(dims.index(qubit, photons)) = Real(1);
    return v;
}

} // namespace jcdiss
