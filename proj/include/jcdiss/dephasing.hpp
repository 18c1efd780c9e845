// dephasing.hpp: closed-form solution of the Jaynes-Cummings model with
// cavity dephasing.
//
// The dephasing Liouvillian conserves a^dagger a + sigma+ sigma-. A state that
// starts in the n-excitation sector stays in the span of
//   v1 |g,n><g,n|,  v2 |g,n><e,n-1|,  v3 |e,n-1><g,n|,  v4 |e,n-1><e,n-1|,
// and dv/dt = L4 v with the 4x4 block
//
//   [   0        i g sqrt(n)   -i g sqrt(n)      0        ]
//   [ i g sqrt(n)  -gamma+i delta     0       -i g sqrt(n) ]
//   [ -i g sqrt(n)     0      -gamma-i delta   i g sqrt(n) ]
//   [   0       -i g sqrt(n)    i g sqrt(n)      0        ]

#pragma once

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "jcdiss/model.hpp"
#include "jcdiss/timeseries.hpp"

namespace jcdiss {

template <typename Real>
struct DephasingBlock {
    Index n = 1;
    CMatrix4<Real> L4;
    Real eta = 0;  // 16 g^2 n / gamma^2
};

template <typename Real>
Real dephasing_eta(const ModelParams<Real>& p, Index n) {
    return Real(16) * p.g * p.g * static_cast<Real>(n) / (p.gamma * p.gamma);
}

inline void require_sector(Index n) {
    if (n < 1)
        throw ValidationError("excitation number n must be >= 1 (the vacuum sector has no 4x4 block), got " +
                              std::to_string(n));
}

// Projects the full dephasing Liouvillian onto the invariant sector basis. The
// truncation is chosen just large enough to contain |g,n>.
template <typename Real>
DephasingBlock<Real> block_matrix(const ModelParams<Real>& p, Index n) {
    require_sector(n);
    ModelParams<Real> q = p;
    q.dims = HilbertDims(std::max<Index>(2, n + 1));
    const CMatrix<Real> L = liouvillian(q, Scenario::Dephasing);
    const Index d = q.dims.total_dim();
    const Index ig = q.dims.index(kGround, n);
    const Index ie = q.dims.index(kExcited, n - 1);
    const std::array<Index, 4> rows{ig, ig, ie, ie};
    const std::array<Index, 4> cols{ig, ie, ig, ie};

    DephasingBlock<Real> b;
    b.n = n;
    b.eta = p.gamma > 0 ? dephasing_eta(p, n) : std::numeric_limits<Real>::infinity();
    for (int a = 0; a < 4; ++a)
        for (int c = 0; c < 4; ++c)
            b.L4(a, c) = L(rows[a] + cols[a] * d, rows[c] + cols[c] * d);
    return b;
}

// Q(z) = z (4 g^2 n gamma + (4 g^2 n + gamma^2 + delta^2) z + 2 gamma z^2 + z^3)
template <typename Real>
Complex<Real> characteristic_polynomial(const ModelParams<Real>& p, Index n, Complex<Real> z) {
    const Real g2n = p.g * p.g * static_cast<Real>(n);
    return z * (Real(4) * g2n * p.gamma + (Real(4) * g2n + p.gamma * p.gamma + p.delta * p.delta) * z +
                Real(2) * p.gamma * z * z + z * z * z);
}

template <typename Real>
struct DephasingEigenvalues {
    struct CardanoTerms {
        Real q = 0;
        Real r = 0;
        Complex<Real> s;
    };

    // Resonant case: l0 = 0, l1 = -gamma and the pair l+-.
    // General case: z0, z1, z+ and z- from the cubic formula, in that order.
    Complex<Real> l0, l1, l_plus, l_minus;
    std::optional<CardanoTerms> cardano;

    std::array<Complex<Real>, 4> values() const { return {l0, l1, l_plus, l_minus}; }
};

// l+- = -gamma (1 -+ sqrt(1 - eta)) / 2, valid for delta = 0.
template <typename Real>
DephasingEigenvalues<Real> eigenvalues_resonant(const ModelParams<Real>& p, Index n) {
    require_sector(n);
    p.validate();
    if (p.delta != 0)
        throw ValidationError("eigenvalues_resonant requires delta = 0; use eigenvalues_general");
    if (!(p.gamma > 0))
        throw ValidationError("eigenvalues_resonant requires gamma > 0");
    const Real eta = dephasing_eta(p, n);
    const Complex<Real> s = std::sqrt(Complex<Real>(1 - eta));
    DephasingEigenvalues<Real> ev;
    ev.l0 = 0;
    ev.l1 = -p.gamma;
    // 1 - s = eta / (1 + s) avoids cancellation for small eta.
    ev.l_plus = -p.gamma * eta / (Real(2) * (Real(1) + s));
    ev.l_minus = -p.gamma * (Real(1) + s) / Real(2);
    return ev;
}

// Roots of Q(z) for any delta via the cubic formula. The sign in r +- sqrt(q^3 + r^2)
// is the one of larger magnitude, so s vanishes only when q = r = 0 (triple root).
template <typename Real>
DephasingEigenvalues<Real> eigenvalues_general(const ModelParams<Real>& p, Index n) {
    require_sector(n);
    p.validate();
    using C = Complex<Real>;
    const Real g2n = p.g * p.g * static_cast<Real>(n);
    const Real gamma = p.gamma;
    const Real delta = p.delta;
    const Real q = -(gamma * gamma - Real(3) * delta * delta - Real(12) * g2n) / Real(9);
    const Real r = gamma * (gamma * gamma + Real(9) * delta * delta - Real(18) * g2n) / Real(27);

    const C root = std::sqrt(C(q * q * q + r * r));
    const C w_plus = C(r) + root;
    const C w_minus = C(r) - root;
    const C w = std::abs(w_plus) >= std::abs(w_minus) ? w_plus : w_minus;

    DephasingEigenvalues<Real> ev;
    const Real shift = -Real(2) * gamma / Real(3);
    ev.l0 = 0;
    if (std::abs(w) == Real(0)) {
        ev.l1 = ev.l_plus = ev.l_minus = shift;
        ev.cardano = typename DephasingEigenvalues<Real>::CardanoTerms{q, r, C(0)};
        return ev;
    }
    const C s = std::pow(w, Real(1) / Real(3));
    const C diff = s - q / s;
    const C sum = s + q / s;
    const C i_sqrt3_half(0, std::sqrt(Real(3)) / Real(2));
    ev.l1 = shift + diff;
    ev.l_plus = shift - diff / Real(2) + i_sqrt3_half * sum;
    ev.l_minus = shift - diff / Real(2) - i_sqrt3_half * sum;
    ev.cardano = typename DephasingEigenvalues<Real>::CardanoTerms{q, r, s};
    return ev;
}

// exp(L4 t) via the eigendecomposition of L4. Falls back to a Pade matrix
// exponential when the eigenvector matrix is ill-conditioned (eta_n close to 1).
template <typename Real>
class SectorPropagator {
public:
    SectorPropagator(const ModelParams<Real>& p, Index n) : block_(block_matrix(p, n)) {
        Eigen::ComplexEigenSolver<CMatrix4<Real>> es(block_.L4);
        if (es.info() != Eigen::Success)
            throw NumericalError("eigendecomposition of the dephasing block failed");
        const CMatrix4<Real> v = es.eigenvectors();
        Eigen::JacobiSVD<CMatrix4<Real>> svd(v);
        const auto sv = svd.singularValues();
        const Real cond = sv(0) / sv(3);
        diagonalizable_ = std::isfinite(static_cast<double>(cond)) && cond < Real(1e4);
        if (diagonalizable_) {
            eigenvalues_ = es.eigenvalues();
            vectors_ = v;
            inverse_ = v.inverse();
        }
    }

    const DephasingBlock<Real>& block() const { return block_; }
    bool diagonalizable() const { return diagonalizable_; }

    CVector4<Real> evolve(const CVector4<Real>& v0, Real t) const {
        if (t < 0)
            throw ValidationError("evolve_sector: t must be >= 0");
        if (!diagonalizable_) {
            const CMatrix4<Real> lt = block_.L4 * Complex<Real>(t);
            return lt.exp() * v0;
        }
        const CVector4<Real> c = inverse_ * v0;
        CVector4<Real> out = CVector4<Real>::Zero();
        for (int k = 0; k < 4; ++k)
            out += vectors_.col(k) * (c(k) * std::exp(eigenvalues_(k) * t));
        return out;
    }

private:
    DephasingBlock<Real> block_;
    bool diagonalizable_ = false;
    CVector4<Real> eigenvalues_;
    CMatrix4<Real> vectors_;
    CMatrix4<Real> inverse_;
};

template <typename Real>
CVector4<Real> evolve_sector(const ModelParams<Real>& p, Index n, const CVector4<Real>& v0, Real t) {
    return SectorPropagator<Real>(p, n).evolve(v0, t);
}

template <typename Real>
CVector4<Real> excited_sector_state() {
    CVector4<Real> v = CVector4<Real>::Zero();
    v(3) = Real(1);
    return v;
}

// h_n(t) = p_e - p_g for the initial state |e, n-1>, delta = 0.
template <typename Real>
Complex<Real> h_closed_form(const ModelParams<Real>& p, Index n, Real t) {
    if (t < 0)
        throw ValidationError("h_n: t must be >= 0");
    const auto ev = eigenvalues_resonant(p, n);
    const Real eta = dephasing_eta(p, n);
    const Complex<Real> s = std::sqrt(Complex<Real>(1 - eta));
    if (eta == Real(0) || std::abs(s) < Real(1e-4)) {
        // e^{-gamma t/2} (cosh x + sinh(x)/s), x = gamma s t / 2; regular at eta = 0 and eta = 1.
        const Complex<Real> x = p.gamma * s * t / Real(2);
        const Complex<Real> sinhc = std::abs(x) < Real(1e-4) ? Complex<Real>(1) + x * x / Real(6)
                                                            : std::sinh(x) / x;
        return std::exp(-p.gamma * t / Real(2)) * (std::cosh(x) + p.gamma * t / Real(2) * sinhc);
    }
    const auto term = [&](Complex<Real> l) {
        return eta * std::exp(l * t) / (Real(2) * eta + Real(4) * l / p.gamma);
    };
    return term(ev.l_plus) + term(ev.l_minus);
}

// Atomic purity for |e, n-1>, delta = 0:
//   P = 1/2 + (f+ + f- - eta e^{-gamma t}) / (4 (1 - eta)),
//   f+- = (1 +- sqrt(1-eta))^2 e^{-gamma (1 -+ sqrt(1-eta)) t} / 2.
template <typename Real>
Real purity_closed_form(const ModelParams<Real>& p, Index n, Real t) {
    const Real eta = dephasing_eta(p, n);
    if (std::abs(Real(1) - eta) < Real(1e-6)) {
        const Real h = h_closed_form(p, n, t).real();
        return (Real(1) + h * h) / Real(2);
    }
    const Complex<Real> s = std::sqrt(Complex<Real>(1 - eta));
    const Complex<Real> one_minus_s = eta / (Real(1) + s);
    const Complex<Real> fp = (Real(1) + s) * (Real(1) + s) / Real(2) * std::exp(-p.gamma * one_minus_s * t);
    const Complex<Real> fm = one_minus_s * one_minus_s / Real(2) * std::exp(-p.gamma * (Real(1) + s) * t);
    const Complex<Real> num = fp + fm - eta * std::exp(-p.gamma * t);
    return Real(0.5) + (num / (Real(4) * (Real(1) - eta))).real();
}

// Columns: h, p_e, purity. For delta = 0, h is the closed form and p_e = (1 + h)/2;
// otherwise h = v4 - v1 from the evolved sector. Purity always comes from the
// evolved sector: the reduced atomic state is diag(v1, v4).
template <typename Real>
TimeSeries atom_observables_dephasing(const ModelParams<Real>& p, Index n, std::span<const Real> t_grid) {
    require_sector(n);
    p.validate();
    if (!(p.gamma > 0))
        throw ValidationError("atom_observables_dephasing requires gamma > 0");
    const SectorPropagator<Real> prop(p, n);
    const CVector4<Real> v0 = excited_sector_state<Real>();

    TimeSeries ts;
    std::vector<double> h_col, pe_col, purity_col;
    for (const Real t : t_grid) {
        if (t < 0)
            throw ValidationError("atom_observables_dephasing: negative time in grid");
        const CVector4<Real> v = prop.evolve(v0, t);
        const Real v1 = v(0).real();
        const Real v4 = v(3).real();
        Real h;
        if (p.delta == 0) {
            const Complex<Real> hc = h_closed_form(p, n, t);
            if (std::abs(hc.imag()) > Real(1e-10))
                throw NumericalError("h_n has imaginary part " + std::to_string(static_cast<double>(hc.imag())));
            h = hc.real();
        } else {
            h = v4 - v1;
        }
        ts.axis.push_back(static_cast<double>(t));
        h_col.push_back(static_cast<double>(h));
        pe_col.push_back(static_cast<double>((Real(1) + h) / Real(2)));
        purity_col.push_back(static_cast<double>(v1 * v1 + v4 * v4));
    }
    ts.add_column("h", std::move(h_col));
    ts.add_column("p_e", std::move(pe_col));
    ts.add_column("purity", std::move(purity_col));
    return ts;
}

} // namespace jcdiss
