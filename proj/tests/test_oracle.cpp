#include <doctest.h>

#include <vector>

#include "jcdiss/dephasing.hpp"
#include "jcdiss/loss.hpp"
#include "jcdiss/oracle.hpp"
#include "jcdiss/spectral_match.hpp"
#include "test_support.hpp"

using namespace jcdiss;
using namespace jcdiss::testing;

namespace {

ModelParams<double> params(double g, double delta, double gamma, double kappa, Index fock = 4) {
    ModelParams<double> p;
    p.g = g;
    p.delta = delta;
    p.gamma = gamma;
    p.kappa = kappa;
    p.dims = HilbertDims(fock);
    return p;
}

std::vector<double> grid(double t_max, int samples) {
    std::vector<double> t(static_cast<std::size_t>(samples));
    for (int k = 0; k < samples; ++k)
        t[static_cast<std::size_t>(k)] = t_max * k / (samples - 1);
    return t;
}

} // namespace

TEST_CASE("zero generator leaves the state unchanged") {
    const Mat rho = random_density(4);
    const auto t = grid(3, 7);
    const auto traj = integrate_master(Mat(Mat::Zero(16, 16)), DensityMatrix<double>(rho), std::span<const double>(t));
    REQUIRE(traj.states.size() == t.size());
    for (const auto& s : traj.states)
        CHECK(max_abs(Mat(s.matrix() - rho)) < 1e-15);
    CHECK(traj.times == t);
}

TEST_CASE("vacuum Rabi oscillation") {
    const auto p = params(1, 0, 0, 0, 3);
    const auto t = grid(10, 101);
    const auto obs = atom_observables_oracle(liouvillian(p, Scenario::Loss), p.dims, basis_ket(p.dims, kExcited, 0),
                                             std::span<const double>(t));
    for (std::size_t k = 0; k < t.size(); ++k) {
        CHECK(std::abs(obs.series.column("p_e")[k] - std::pow(std::cos(t[k]), 2)) < 1e-8);
        // The atom is entangled with the field: its state is diag(sin^2, cos^2).
        const double c2 = std::pow(std::cos(t[k]), 2);
        CHECK(std::abs(obs.series.column("purity")[k] - (c2 * c2 + (1 - c2) * (1 - c2))) < 1e-8);
    }
    // Same trajectory from the Hamiltonian exponential.
    const Mat h = hamiltonian(p);
    const Vec psi0 = basis_ket(p.dims, kExcited, 0);
    const Mat u = (C(0, -1) * h * 2.3).exp();
    const Vec psi = u * psi0;
    CHECK(std::abs(std::norm(psi(p.dims.index(kExcited, 0))) - std::pow(std::cos(2.3), 2)) < 1e-12);
}

TEST_CASE("oracle agrees with the sector solution") {
    const auto p = params(1, 0, 10, 0);
    const auto t = grid(5, 51);
    const auto obs = atom_observables_oracle(liouvillian(p, Scenario::Dephasing), p.dims,
                                             basis_ket(p.dims, kExcited, 0), std::span<const double>(t));
    const auto exact = atom_observables_dephasing(p, 1, std::span<const double>(t));
    for (std::size_t k = 0; k < t.size(); ++k) {
        CHECK(std::abs(obs.series.column("p_e")[k] - exact.column("p_e")[k]) < 1e-6);
        CHECK(std::abs(obs.series.column("purity")[k] - exact.column("purity")[k]) < 1e-6);
    }
}

TEST_CASE("superoperator spectra") {
    const auto free = params(0, 1, 0, 0, 2);
    for (const C z : superop_spectrum(liouvillian(free, Scenario::Loss))) {
        const double d = std::min({std::abs(z), std::abs(z - C(0, 1)), std::abs(z + C(0, 1))});
        CHECK(d < 1e-12);
    }
    const auto loss = params(1, 0.8, 0, 3.0, 4);
    const auto numeric = superop_spectrum(liouvillian(loss, Scenario::Loss));
    std::vector<C> closed;
    for (const auto& l : liouvillian_spectrum_loss(loss, 2))
        closed.push_back(l.value);
    CHECK(containment_distance<double>(closed, numeric) < 1e-8);
    double nearest_zero = 1;
    for (const C z : numeric)
        nearest_zero = std::min(nearest_zero, std::abs(z));
    CHECK(nearest_zero < 1e-10);

    const auto deph = params(1, 0, 3.0, 0, 4);
    const auto full = superop_spectrum(liouvillian(deph, Scenario::Dephasing));
    for (Index n = 1; n <= 3; ++n) {
        const auto ev = eigenvalues_resonant(deph, n).values();
        CHECK(containment_distance<double>(ev, full) < 1e-8);
    }
    CHECK_THROWS_AS(superop_spectrum(Mat(Mat::Zero(kMaxSuperopDim + 1, kMaxSuperopDim + 1))), ValidationError);
    CHECK_THROWS_AS(superop_spectrum(Mat(random_matrix(2, 3))), ValidationError);
}

TEST_CASE("steady states") {
    const auto loss = params(1, 0.8, 0, 2.0, 3);
    const auto st = steady_state(liouvillian(loss, Scenario::Loss));
    REQUIRE(st.unique());
    const Vec g0 = basis_ket(loss.dims, kGround, 0);
    CHECK(max_abs(Mat(st.state().matrix() - g0 * g0.adjoint())) < 1e-8);

    const auto deph = params(1, 0, 5.0, 0, 3);
    const Mat ld = liouvillian(deph, Scenario::Dephasing);
    const auto global = steady_state(ld);
    CHECK(global.basis.size() > 1);
    CHECK_THROWS_AS(global.state(), NumericalError);

    const std::vector<Index> sector{deph.dims.index(kGround, 1), deph.dims.index(kExcited, 0)};
    const auto sec = steady_state(ld, deph.dims, std::span<const Index>(sector));
    REQUIRE(sec.unique());
    const Mat atom = partial_trace_cavity<double>(sec.state().matrix(), deph.dims);
    CHECK(max_abs(Mat(atom - 0.5 * Mat::Identity(2, 2))) < 1e-10);

    // The n = 1 sector alone is not invariant under photon loss.
    CHECK_THROWS_AS(steady_state(liouvillian(loss, Scenario::Loss), loss.dims, std::span<const Index>(sector)),
                    ValidationError);

    const auto zero = steady_state(Mat(Mat::Zero(9, 9)));
    CHECK(zero.basis.size() == 9);
}

TEST_CASE("integrator tolerance halving") {
    const auto p = params(1, 0.8, 0, 1.0);
    const auto t = grid(10, 41);
    const Mat l = liouvillian(p, Scenario::Loss);
    const Vec psi = basis_ket(p.dims, kExcited, 0);
    IntegratorConfig loose, tight;
    loose.rel_tol = 1e-8;
    loose.abs_tol = 1e-10;
    tight.rel_tol = 0.5e-8;
    tight.abs_tol = 0.5e-10;
    const auto a = atom_observables_oracle(l, p.dims, psi, std::span<const double>(t), loose);
    const auto b = atom_observables_oracle(l, p.dims, psi, std::span<const double>(t), tight);
    for (const char* name : {"p_e", "purity"})
        for (std::size_t k = 0; k < t.size(); ++k)
            CHECK(std::abs(a.series.column(name)[k] - b.series.column(name)[k]) < 10 * tight.rel_tol);
    CHECK(b.stats.accepted >= a.stats.accepted);
}

TEST_CASE("CPTP and truncation reports") {
    for (const auto s : {Scenario::Dephasing, Scenario::Loss}) {
        for (const double ratio : {1.0, 10.0, 100.0}) {
            const auto p = params(1, 0.8, s == Scenario::Dephasing ? ratio : 0, s == Scenario::Loss ? ratio : 0);
            const auto t = grid(10, 51);
            const auto obs = atom_observables_oracle(liouvillian(p, s), p.dims, basis_ket(p.dims, kExcited, 0),
                                                     std::span<const double>(t));
            CHECK(obs.cptp.max_trace_error <= 1e-9);
            CHECK(obs.cptp.max_hermiticity_error <= 1e-10);
            CHECK(obs.cptp.min_eigenvalue >= -1e-8);
            CHECK(obs.truncation.certified());
            CHECK(obs.truncation.fock_dim == 4);
        }
    }
    // A two-photon Fock state under the Hamiltonian reaches the top levels.
    const auto p = params(1, 0, 0, 0, 3);
    const Vec psi = basis_ket(p.dims, kExcited, 1);
    const auto t = grid(2, 11);
    const auto traj =
        integrate_master(liouvillian(p, Scenario::Loss), DensityMatrix<double>::pure(psi), std::span<const double>(t));
    CHECK_FALSE(truncation_report(traj, p.dims).certified());
}

TEST_CASE("integrator failures") {
    const auto p = params(1, 0, 0, 1.0, 2);
    const Mat l = liouvillian(p, Scenario::Loss);
    const auto rho = DensityMatrix<double>::pure(basis_ket(p.dims, kExcited, 0));
    const auto t = grid(10, 3);
    IntegratorConfig few;
    few.max_steps = 3;
    CHECK_THROWS_AS(integrate_master(l, rho, std::span<const double>(t), few), IntegrationError);

    // A generator with a huge negative eigenvalue forces steps below round-off.
    Mat stiff = Mat::Zero(4, 4);
    stiff(0, 0) = C(-1e300);
    const auto mixed = DensityMatrix<double>(Mat(Mat::Identity(2, 2) / 2.0));
    const std::vector<double> far{1.0, 2.0};
    CHECK_THROWS_AS(integrate_master(stiff, mixed, std::span<const double>(far)), IntegrationError);

    const std::vector<double> backwards{1.0, 0.5};
    CHECK_THROWS_AS(integrate_master(l, rho, std::span<const double>(backwards)), ValidationError);
    CHECK_THROWS_AS(integrate_master(Mat(Mat::Zero(4, 4)), rho, std::span<const double>(t)), ValidationError);
    IntegratorConfig bad;
    bad.rel_tol = 0;
    CHECK_THROWS_AS(integrate_master(l, rho, std::span<const double>(t), bad), ValidationError);
}

TEST_CASE("oracle runs in long double") {
    ModelParams<long double> p;
    p.dims = HilbertDims(2);
    const CMatrix<long double> l = liouvillian(p, Scenario::Loss);
    const CVector<long double> psi = basis_ket<long double>(p.dims, kExcited, 0);
    const std::vector<long double> t{0.0L, 1.0L};
    const auto obs = atom_observables_oracle(l, p.dims, psi, std::span<const long double>(t));
    CHECK(obs.series.column("p_e")[1] == doctest::Approx(std::pow(std::cos(1.0), 2)).epsilon(1e-8));
}
