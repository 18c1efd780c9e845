// loss.hpp: closed-form solution of the Jaynes-Cummings model with cavity
// photon loss, built on the non-Hermitian Hamiltonian K = H - i kappa a^dagger a / 2.
//
// K is block diagonal in the basis |n,1> = |g,n>, |n,2> = |e,n-1>:
//   K^(0) = 0,  K^(n) = [[-i n kappa/2, g sqrt(n)], [g sqrt(n), (2 delta - i (n-1) kappa)/2]].
// Liouvillian eigenvalues are lambda = -i (eps_j^(n) - conj(eps_k^(m))).

#pragma once

#include <Eigen/Eigenvalues>

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
struct KBlock {
    Index n = 0;
    CMatrix<Real> K;                     // 1x1 zero for n = 0, 2x2 otherwise
    Complex<Real> chi;                   // 16 g^2 n / (2 delta + i kappa)^2
    Complex<Real> eps1;
    std::optional<Complex<Real>> eps2;   // absent for n = 0
    std::optional<Complex<Real>> theta;  // absent for n = 0 and at the exceptional point
    std::optional<CMatrix2<Real>> R;     // [[cos, -sin], [sin, cos]] of theta

    Index branches() const { return n == 0 ? 1 : 2; }
    Complex<Real> eps(int j) const { return j == 1 ? eps1 : *eps2; }
};

// eps_j = (2 delta + i kappa - 2 i n kappa)/4 + (-1)^j (2 delta + i kappa)/4 sqrt(1 + chi_n),
// principal square root. With this labeling eps_1 -> -i n kappa / 2 as g -> 0.
template <typename Real>
std::array<Complex<Real>, 2> k_eigenvalues(const ModelParams<Real>& p, Index n) {
    using C = Complex<Real>;
    const C z(Real(2) * p.delta, p.kappa);
    const C base = (z - C(0, Real(2) * static_cast<Real>(n) * p.kappa)) / Real(4);
    const Real g2n16 = Real(16) * p.g * p.g * static_cast<Real>(n);
    C spread;
    if (std::abs(z) == Real(0))
        spread = C(std::sqrt(g2n16)) / Real(4);  // delta = kappa = 0: eps = -+ g sqrt(n)
    else
        spread = z / Real(4) * std::sqrt(C(1) + g2n16 / (z * z));
    return {base - spread, base + spread};
}

// Relative distance |1 + chi_n| measured against 1 + |chi_n|. Zero exactly at the
// exceptional point, which requires delta = 0 and kappa = 4 g sqrt(n).
template <typename Real>
Real exceptional_point_distance(const ModelParams<Real>& p, Index n = 1) {
    using C = Complex<Real>;
    const C z(Real(2) * p.delta, p.kappa);
    const Real g2n16 = Real(16) * p.g * p.g * static_cast<Real>(n);
    // |z^2 + 16 g^2 n| / (|z|^2 + 16 g^2 n) equals |1 + chi| / (1 + |chi|).
    const Real denom = std::norm(z) + g2n16;
    return denom == Real(0) ? Real(1) : std::abs(z * z + g2n16) / denom;
}

inline constexpr double kExceptionalPointGuard = 1e-6;

template <typename Real>
bool near_exceptional_point(const ModelParams<Real>& p, Index n = 1) {
    return n >= 1 && p.g > 0 && exceptional_point_distance(p, n) < Real(kExceptionalPointGuard);
}

template <typename Real>
KBlock<Real> k_block(const ModelParams<Real>& p, Index n) {
    using C = Complex<Real>;
    if (n < 0)
        throw ValidationError("k_block: n must be >= 0");
    p.validate();
    KBlock<Real> b;
    b.n = n;
    const C z(Real(2) * p.delta, p.kappa);
    b.chi = std::abs(z) == Real(0) ? C(std::numeric_limits<Real>::infinity())
                                   : Real(16) * p.g * p.g * static_cast<Real>(n) / (z * z);
    if (n == 0) {
        b.K = CMatrix<Real>::Zero(1, 1);
        b.eps1 = 0;
        return b;
    }
    const Real nr = static_cast<Real>(n);
    const Real coupling = p.g * std::sqrt(nr);
    b.K.resize(2, 2);
    b.K << C(0, -nr * p.kappa / Real(2)), coupling,
           coupling, C(p.delta, -(nr - Real(1)) * p.kappa / Real(2));
    const auto eps = k_eigenvalues(p, n);
    b.eps1 = eps[0];
    b.eps2 = eps[1];

    if (coupling == Real(0)) {
        b.theta = C(0);
    } else {
        // tan(theta) = (2 eps_1 + i n kappa) / (2 g sqrt(n)); at the exceptional point
        // 1 + tan^2 = 0 and theta diverges.
        const C tan_theta = (Real(2) * b.eps1 + C(0, nr * p.kappa)) / (Real(2) * coupling);
        const C norm = C(1) + tan_theta * tan_theta;
        if (std::abs(norm) >= Real(1e-8) * (Real(1) + std::norm(tan_theta)))
            b.theta = std::atan(tan_theta);
    }
    if (b.theta) {
        const C c = std::cos(*b.theta);
        const C s = std::sin(*b.theta);
        CMatrix2<Real> R;
        R << c, -s,
             s, c;
        b.R = R;
    }
    return b;
}

template <typename Real>
struct LiouvillianEigenvalue {
    Index n = 0, m = 0;
    int j = 1, k = 1;
    Complex<Real> value;
};

// All lambda_{j,k}^{(n,m)} for 0 <= n, m <= n_max.
template <typename Real>
std::vector<LiouvillianEigenvalue<Real>> liouvillian_spectrum_loss(const ModelParams<Real>& p, Index n_max) {
    if (n_max < 1)
        throw ValidationError("liouvillian_spectrum_loss: n_max must be >= 1");
    std::vector<KBlock<Real>> blocks;
    for (Index n = 0; n <= n_max; ++n)
        blocks.push_back(k_block(p, n));
    std::vector<LiouvillianEigenvalue<Real>> out;
    const Complex<Real> minus_i(0, -1);
    for (const auto& bn : blocks)
        for (const auto& bm : blocks)
            for (int j = 1; j <= bn.branches(); ++j)
                for (int k = 1; k <= bm.branches(); ++k)
                    out.push_back({bn.n, bm.n, j, k, minus_i * (bn.eps(j) - std::conj(bm.eps(k)))});
    return out;
}

// Right kets |r_j> = sum_k R_kj |n,k> and left bras <q_j| = sum_k R_kj <n,k>
// (no complex conjugation), so <q_i|r_j> = (R^T R)_ij = delta_ij.
template <typename Real>
struct EigvecPair {
    Index n = 1;
    std::array<Eigen::Matrix<Complex<Real>, 2, 1>, 2> right;  // sector coordinates
    std::array<Eigen::Matrix<Complex<Real>, 1, 2>, 2> left;
    std::array<Complex<Real>, 2> eigenvalues;

    // Sector coordinates -> joint-space ket.
    CVector<Real> embed(const Eigen::Matrix<Complex<Real>, 2, 1>& v, const HilbertDims& dims) const {
        CVector<Real> out = CVector<Real>::Zero(dims.total_dim());
        out(dims.index(kGround, n)) = v(0);
        out(dims.index(kExcited, n - 1)) = v(1);
        return out;
    }
};

template <typename Real>
EigvecPair<Real> eigvec_pair(const ModelParams<Real>& p, Index n) {
    if (n < 1)
        throw ValidationError("eigvec_pair: n must be >= 1");
    const KBlock<Real> b = k_block(p, n);
    if (!b.R)
        throw ExceptionalPointError("K^(" + std::to_string(n) +
                                    ") is not diagonalizable (chi_n = -1): delta = 0 and kappa = 4 g sqrt(n)");
    EigvecPair<Real> e;
    e.n = n;
    for (int j = 0; j < 2; ++j) {
        e.right[j] = b.R->col(j);
        e.left[j] = b.R->col(j).transpose();
    }
    e.eigenvalues = {b.eps1, *b.eps2};
    return e;
}

template <typename Real>
struct SingleExcitationState {
    Complex<Real> c_g{0};
    Complex<Real> c_e{1};

    void validate() const {
        const Real norm = std::norm(c_g) + std::norm(c_e);
        if (std::abs(norm - Real(1)) > Real(1e-12))
            throw ValidationError("initial amplitudes must satisfy |c_g|^2 + |c_e|^2 = 1");
    }
};

// f(t) = [4 g^2 e^{-i eps2 t} + (i kappa + 2 eps1)^2 e^{-i eps1 t}] / [4 g^2 + (i kappa + 2 eps1)^2]
template <typename Real>
Complex<Real> f_rational(const ModelParams<Real>& p, Real t) {
    using C = Complex<Real>;
    const auto eps = k_eigenvalues(p, 1);
    const C w = C(0, p.kappa) + Real(2) * eps[0];
    const C four_g2(Real(4) * p.g * p.g);
    const C minus_i(0, -1);
    return (four_g2 * std::exp(minus_i * eps[1] * t) + w * w * std::exp(minus_i * eps[0] * t)) / (four_g2 + w * w);
}

// f(t) = sum_j (R_2j)^2 e^{-i eps_j t}; the amplitude of |e,0> is c_e f(t).
template <typename Real>
Complex<Real> f_eigenvector_sum(const ModelParams<Real>& p, Real t) {
    const KBlock<Real> b = k_block(p, 1);
    if (!b.R)
        throw ExceptionalPointError("f_eigenvector_sum: exceptional point");
    const Complex<Real> minus_i(0, -1);
    Complex<Real> f = 0;
    for (int j = 0; j < 2; ++j) {
        const Complex<Real> r2 = (*b.R)(1, j);
        f += r2 * r2 * std::exp(minus_i * b.eps(j + 1) * t);
    }
    return f;
}

// <e,0| e^{-i K t} |e,0> = e^{-i sigma t} [cos(W t) - i (K22 - sigma) sin(W t)/W],
// sigma = Tr K / 2, W^2 = ((K11 - K22)/2)^2 + g^2. Even in W, so no branch choice, and
// the W -> 0 limit is the confluent form at the exceptional point.
template <typename Real>
Complex<Real> f_propagator(const ModelParams<Real>& p, Real t) {
    using C = Complex<Real>;
    const C k11(0, -p.kappa / Real(2));
    const C k22(p.delta);
    const C sigma = (k11 + k22) / Real(2);
    const C half_diff = (k11 - k22) / Real(2);
    const C w = std::sqrt(half_diff * half_diff + C(p.g * p.g));
    const C x = w * t;
    const C sinc_t = std::abs(x) < Real(1e-4) ? t * (C(1) - x * x / Real(6)) : std::sin(x) / w;
    return std::exp(C(0, -1) * sigma * t) * (std::cos(x) - C(0, 1) * (k22 - sigma) * sinc_t);
}

// f(t) for the single-excitation problem. Exact e^{-i delta t} at g = 0, the
// confluent propagator near the exceptional point, the rational form otherwise.
template <typename Real>
Complex<Real> loss_f(const ModelParams<Real>& p, Real t) {
    if (t < 0)
        throw ValidationError("f(t): t must be >= 0");
    p.validate();
    if (p.g == Real(0))
        return std::exp(Complex<Real>(0, -p.delta * t));
    if (near_exceptional_point(p, 1))
        return f_propagator(p, t);
    return f_rational(p, t);
}

// Reduced atomic state for (c_g |g> + c_e |e>) (x) |0>:
//   rho_gg = 1 - |c_e f|^2, rho_ee = |c_e f|^2, rho_eg = c_e c_g^* f.
template <typename Real>
DensityMatrix<Real> evolve_single_excitation(const ModelParams<Real>& p, const SingleExcitationState<Real>& psi0,
                                             Real t) {
    psi0.validate();
    const Complex<Real> f = loss_f(p, t);
    const Real pe = std::norm(psi0.c_e * f);
    CMatrix<Real> rho(2, 2);
    const Complex<Real> eg = psi0.c_e * std::conj(psi0.c_g) * f;
    rho(kGround, kGround) = Real(1) - pe;
    rho(kExcited, kExcited) = pe;
    rho(kExcited, kGround) = eg;
    rho(kGround, kExcited) = std::conj(eg);
    return DensityMatrix<Real>(std::move(rho));
}

// Columns: p_e = |c_e f|^2, purity = 1 + 2 |c_e|^4 |f|^2 (|f|^2 - 1), abs_f_sq.
template <typename Real>
TimeSeries atom_observables_loss(const ModelParams<Real>& p, const SingleExcitationState<Real>& psi0,
                                 std::span<const Real> t_grid) {
    psi0.validate();
    const Real ce2 = std::norm(psi0.c_e);
    TimeSeries ts;
    std::vector<double> pe, purity, fsq;
    for (const Real t : t_grid) {
        const Real f2 = std::norm(loss_f(p, t));
        ts.axis.push_back(static_cast<double>(t));
        pe.push_back(static_cast<double>(ce2 * f2));
        purity.push_back(static_cast<double>(Real(1) + Real(2) * ce2 * ce2 * f2 * (f2 - Real(1))));
        fsq.push_back(static_cast<double>(f2));
    }
    ts.add_column("p_e", std::move(pe));
    ts.add_column("purity", std::move(purity));
    ts.add_column("abs_f_sq", std::move(fsq));
    return ts;
}

} // namespace jcdiss
