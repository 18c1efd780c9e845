// model.hpp: Jaynes-Cummings Hamiltonian, Lindblad dissipator and the two
// Liouvillians (cavity dephasing, cavity photon loss). hbar = 1.

#pragma once

#include <cmath>
#include <string>

#include "jcdiss/core.hpp"

namespace jcdiss {

enum class Scenario { Dephasing, Loss };

inline std::string to_string(Scenario s) { return s == Scenario::Dephasing ? "dephasing" : "loss"; }

template <typename Real = double>
struct ModelParams {
    Real g = 1;      // atom-cavity coupling
    Real delta = 0;  // atom-cavity detuning
    Real gamma = 0;  // cavity dephasing rate
    Real kappa = 0;  // cavity photon-loss rate
    HilbertDims dims{4};

    void validate() const {
        if (!(g >= 0) || !(gamma >= 0) || !(kappa >= 0) || !std::isfinite(static_cast<double>(delta)))
            throw ValidationError("model parameters require g, gamma, kappa >= 0 and finite delta");
    }
};

// H = delta sigma+ sigma- (x) I + g (sigma+ (x) a + sigma- (x) a^dagger)
template <typename Real>
CMatrix<Real> hamiltonian(const ModelParams<Real>& p) {
    p.validate();
    const auto q = qubit_ops<Real>();
    const CMatrix<Real> a = annihilation_op<Real>(p.dims);
    const CMatrix<Real> id = CMatrix<Real>::Identity(p.dims.fock_dim(), p.dims.fock_dim());
    const CMatrix<Real> sp_sm = q.sigma_plus * q.sigma_minus;
    return Complex<Real>(p.delta) * kron(sp_sm, id) +
           Complex<Real>(p.g) * (kron(q.sigma_plus, a) + kron(q.sigma_minus, CMatrix<Real>(a.adjoint())));
}

// a^dagger a + sigma+ sigma- on the joint space.
template <typename Real = double>
CMatrix<Real> excitation_number(const HilbertDims& dims) {
    const auto q = qubit_ops<Real>();
    const CMatrix<Real> sp_sm = q.sigma_plus * q.sigma_minus;
    return lift_cavity(number_op<Real>(dims)) + lift_qubit(sp_sm, dims);
}

// -i[H, .]
template <typename Real>
CMatrix<Real> commutator_superop(const CMatrix<Real>& h) {
    const Index d = h.rows();
    const CMatrix<Real> id = CMatrix<Real>::Identity(d, d);
    const Complex<Real> minus_i(0, -1);
    return minus_i * (sandwich_superop(h, id) - sandwich_superop(id, h));
}

// D[A] rho = A rho A^dagger - (A^dagger A rho + rho A^dagger A) / 2
template <typename Real>
CMatrix<Real> dissipator_superop(const CMatrix<Real>& a) {
    if (a.rows() != a.cols())
        throw ValidationError("dissipator_superop: Lindblad operator must be square");
    const Index d = a.rows();
    const CMatrix<Real> id = CMatrix<Real>::Identity(d, d);
    const CMatrix<Real> ad = a.adjoint();
    const CMatrix<Real> ada = ad * a;
    return sandwich_superop(a, ad) - Real(0.5) * (sandwich_superop(ada, id) + sandwich_superop(id, ada));
}

// Dephasing: -i[H, .] + 2 gamma D[a^dagger a]. The factor 2 makes gamma the
// decay rate of coherences between adjacent photon numbers, which is the rate
// that appears in the 4x4 sector blocks and their eigenvalues (0, -gamma, l+-).
// Loss: -i[H, .] + kappa D[a].
template <typename Real>
CMatrix<Real> liouvillian(const ModelParams<Real>& p, Scenario s) {
    const CMatrix<Real> h = hamiltonian(p);
    const CMatrix<Real> a = annihilation_op<Real>(p.dims);
    if (s == Scenario::Dephasing) {
        const CMatrix<Real> n = lift_cavity(CMatrix<Real>(a.adjoint() * a));
        return commutator_superop(h) + Complex<Real>(2 * p.gamma) * dissipator_superop(n);
    }
    const CMatrix<Real> lifted = lift_cavity(a);
    return commutator_superop(h) + Complex<Real>(p.kappa) * dissipator_superop(lifted);
}

template <typename Real>
CMatrix<Real> apply_superop(const CMatrix<Real>& superop, const CMatrix<Real>& rho) {
    return unvectorize(CVector<Real>(superop * vectorize(rho)));
}

} // namespace jcdiss
