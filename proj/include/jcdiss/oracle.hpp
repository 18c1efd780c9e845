// oracle.hpp: brute-force reference solver on the truncated Fock space.
// Integrates d vec(rho)/dt = L vec(rho) with an adaptive Dormand-Prince 5(4)
// scheme and diagonalizes superoperators densely.

#pragma once

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "jcdiss/model.hpp"
#include "jcdiss/timeseries.hpp"

namespace jcdiss {

struct IntegratorConfig {
    double rel_tol = 1e-9;
    double abs_tol = 1e-11;
    double max_step = std::numeric_limits<double>::infinity();
    double initial_step = 0;  // 0: chosen automatically
    long max_steps = 50'000'000;

    void validate() const {
        if (!(rel_tol > 0) || !(abs_tol > 0) || !(max_step > 0) || initial_step < 0 || max_steps <= 0)
            throw ValidationError("integrator tolerances and max_step must be positive");
    }
};

struct IntegrationStats {
    long accepted = 0;
    long rejected = 0;
    double max_trace_drift = 0;        // max |Tr rho(t_k) - Tr rho0|
    double max_hermiticity_drift = 0;  // before symmetrization at output points
};

template <typename Real>
struct MasterTrajectory {
    std::vector<Real> times;
    std::vector<DensityMatrix<Real>> states;
    IntegrationStats stats;
};

namespace detail {

// Dormand-Prince 5(4) tableau.
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                        e6 = 22.0 / 525, e7 = -1.0 / 40;

} // namespace detail

// Adaptive explicit integration of dy/dt = A y for a constant matrix A.
// Output states land exactly on the requested times.
template <typename Real>
class LinearDopri5 {
public:
    LinearDopri5(const CMatrix<Real>& generator, IntegratorConfig cfg) : A_(generator), cfg_(cfg) {
        cfg_.validate();
        if (A_.rows() != A_.cols())
            throw ValidationError("generator must be square");
    }

    // Callback receives (index, time, state) and may modify the state in place.
    template <typename OnOutput>
    IntegrationStats run(CVector<Real> y, std::span<const Real> times, OnOutput&& on_output) const {
        using namespace detail;
        IntegrationStats stats;
        if (times.empty())
            return stats;
        if (y.size() != A_.rows())
            throw ValidationError("state length does not match generator");
        for (std::size_t i = 1; i < times.size(); ++i)
            if (times[i] < times[i - 1])
                throw ValidationError("output times must be non-decreasing");

        Real t = times.front();
        const Real span = times.back() - times.front();
        CVector<Real> k1 = A_ * y, k2, k3, k4, k5, k6, k7, ytmp, ynew;
        Real h = static_cast<Real>(cfg_.initial_step);
        if (h == 0)
            h = initial_step(y, k1, span);

        std::size_t next = 0;
        while (next < times.size() && times[next] <= t) {
            on_output(next, t, y);
            k1 = A_ * y;
            ++next;
        }
        const Real safety = 0.9, min_factor = 0.2, max_factor = 10.0;
        while (next < times.size()) {
            const Real target = times[next];
            const Real max_step = static_cast<Real>(cfg_.max_step);
            Real step = std::min({h, target - t, max_step});
            const bool hits_target = step >= target - t;
            if (hits_target)
                step = target - t;
            const Real time_scale = std::max(std::abs(t), std::abs(times.back()));
            if (!hits_target && step <= time_scale * std::numeric_limits<Real>::epsilon() * 16)
                throw IntegrationError("step size underflow at t = " + std::to_string(static_cast<double>(t)),
                                       static_cast<double>(t));
            if (stats.accepted + stats.rejected >= cfg_.max_steps)
                throw IntegrationError("maximum number of steps exceeded at t = " +
                                           std::to_string(static_cast<double>(t)),
                                       static_cast<double>(t));

            ytmp = y + step * Real(a21) * k1;
            k2 = A_ * ytmp;
            ytmp = y + step * (Real(a31) * k1 + Real(a32) * k2);
            k3 = A_ * ytmp;
            ytmp = y + step * (Real(a41) * k1 + Real(a42) * k2 + Real(a43) * k3);
            k4 = A_ * ytmp;
            ytmp = y + step * (Real(a51) * k1 + Real(a52) * k2 + Real(a53) * k3 + Real(a54) * k4);
            k5 = A_ * ytmp;
            ytmp = y + step * (Real(a61) * k1 + Real(a62) * k2 + Real(a63) * k3 + Real(a64) * k4 + Real(a65) * k5);
            k6 = A_ * ytmp;
            ynew = y + step * (Real(b1) * k1 + Real(b3) * k3 + Real(b4) * k4 + Real(b5) * k5 + Real(b6) * k6);
            k7 = A_ * ynew;
            const CVector<Real> err =
                step * (Real(e1) * k1 + Real(e3) * k3 + Real(e4) * k4 + Real(e5) * k5 + Real(e6) * k6 + Real(e7) * k7);

            Real norm = 0;
            for (Index i = 0; i < y.size(); ++i) {
                const Real scale = static_cast<Real>(cfg_.abs_tol) +
                                   static_cast<Real>(cfg_.rel_tol) * std::max(std::abs(y(i)), std::abs(ynew(i)));
                const Real r = std::abs(err(i)) / scale;
                norm += r * r;
            }
            norm = std::sqrt(norm / static_cast<Real>(y.size()));

            if (norm <= 1) {
                ++stats.accepted;
                t = hits_target ? target : t + step;
                y.swap(ynew);
                k1.swap(k7);
                const Real factor = norm == 0 ? max_factor
                                              : std::clamp(safety * std::pow(norm, Real(-0.2)), min_factor, max_factor);
                if (!hits_target || factor < 1)
                    h = step * factor;
                bool touched = false;
                while (next < times.size() && times[next] <= t) {
                    on_output(next, t, y);
                    touched = true;
                    ++next;
                }
                if (touched)
                    k1 = A_ * y;
            } else {
                if (!std::isfinite(static_cast<double>(norm)))
                    h = step * min_factor;
                else
                    h = step * std::max(min_factor, safety * std::pow(norm, Real(-0.2)));
                ++stats.rejected;
            }
        }
        return stats;
    }

private:
    Real initial_step(const CVector<Real>& y, const CVector<Real>& f0, Real span) const {
        // Hairer, Norsett & Wanner, II.4.
        const auto scaled_norm = [&](const CVector<Real>& v, const CVector<Real>& ref) {
            Real s = 0;
            for (Index i = 0; i < v.size(); ++i) {
                const Real sc = static_cast<Real>(cfg_.abs_tol) + static_cast<Real>(cfg_.rel_tol) * std::abs(ref(i));
                s += std::norm(v(i)) / (sc * sc);
            }
            return std::sqrt(s / static_cast<Real>(std::max<Index>(1, v.size())));
        };
        const Real d0 = scaled_norm(y, y);
        const Real d1 = scaled_norm(f0, y);
        Real h0 = (d0 < Real(1e-5) || d1 < Real(1e-5)) ? Real(1e-6) : Real(0.01) * d0 / d1;
        if (!std::isfinite(static_cast<double>(h0)) || !(h0 > 0))
            h0 = Real(1e-6);  // scaled norms overflow for tolerances near the underflow limit
        if (span > 0)
            h0 = std::min(h0, span);
        const CVector<Real> y1 = y + h0 * f0;
        const CVector<Real> f1 = A_ * y1;
        const Real d2 = scaled_norm(CVector<Real>(f1 - f0), y) / h0;
        const Real dmax = std::max(d1, d2);
        const Real h1 = dmax <= Real(1e-15) ? std::max(Real(1e-6), h0 * Real(1e-3))
                                            : std::pow(Real(0.01) / dmax, Real(0.2));
        Real h = std::isfinite(static_cast<double>(h1)) ? std::min(Real(100) * h0, h1) : h0;
        if (span > 0)
            h = std::min(h, span);
        return h;
    }

    CMatrix<Real> A_;
    IntegratorConfig cfg_;
};

// Integrates the master equation for the superoperator L. Each output state is
// symmetrized, rho <- (rho + rho^dagger)/2, and integration continues from the
// symmetrized state; the pre-symmetrization drift is recorded.
template <typename Real>
MasterTrajectory<Real> integrate_master(const CMatrix<Real>& L, const DensityMatrix<Real>& rho0,
                                        std::span<const Real> t_grid, const IntegratorConfig& cfg = {}) {
    const Index d = rho0.dim();
    if (L.rows() != d * d || L.cols() != d * d)
        throw ValidationError("integrate_master: superoperator of size " + std::to_string(L.rows()) +
                              " does not act on a " + std::to_string(d) + "-dimensional state");
    MasterTrajectory<Real> out;
    out.times.assign(t_grid.begin(), t_grid.end());
    out.states.resize(t_grid.size());
    const Complex<Real> trace0 = rho0.matrix().trace();
    double trace_drift = 0, herm_drift = 0;

    LinearDopri5<Real> solver(L, cfg);
    auto stats = solver.run(vectorize(rho0.matrix()), t_grid, [&](std::size_t k, Real, CVector<Real>& y) {
        CMatrix<Real> rho = unvectorize(y);
        herm_drift = std::max(herm_drift, static_cast<double>((rho - rho.adjoint()).cwiseAbs().maxCoeff()));
        rho = (rho + rho.adjoint()).eval() / Real(2);
        trace_drift = std::max(trace_drift, static_cast<double>(std::abs(rho.trace() - trace0)));
        y = vectorize(rho);
        out.states[k] = DensityMatrix<Real>(std::move(rho));
    });
    stats.max_trace_drift = trace_drift;
    stats.max_hermiticity_drift = herm_drift;
    out.stats = stats;
    return out;
}

inline constexpr Index kMaxSuperopDim = 4096;

template <typename Real>
std::vector<Complex<Real>> superop_spectrum(const CMatrix<Real>& L) {
    if (L.rows() != L.cols())
        throw ValidationError("superop_spectrum: superoperator must be square");
    if (L.rows() > kMaxSuperopDim)
        throw ValidationError("superop_spectrum: dimension " + std::to_string(L.rows()) + " exceeds the dense limit " +
                              std::to_string(kMaxSuperopDim));
    Eigen::ComplexEigenSolver<CMatrix<Real>> es(L, false);
    if (es.info() != Eigen::Success)
        throw NumericalError("superop_spectrum: eigensolver did not converge");
    const CVector<Real> ev = es.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

template <typename Real>
struct Stationary {
    // Unique case: one unit-trace Hermitian state. Degenerate case: a basis of
    // the nullspace (not normalized, members may be traceless).
    std::vector<CMatrix<Real>> basis;

    bool unique() const { return basis.size() == 1; }
    DensityMatrix<Real> state() const {
        if (!unique())
            throw NumericalError("stationary state is not unique: nullspace dimension " +
                                 std::to_string(basis.size()));
        return DensityMatrix<Real>(basis.front());
    }
};

namespace detail {

template <typename Real>
std::vector<CVector<Real>> null_vectors(const CMatrix<Real>& L, Real rel_tol) {
    Eigen::JacobiSVD<CMatrix<Real>> svd(L, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const Real cutoff = rel_tol * std::max(Real(1), sv.size() ? sv(0) : Real(0));
    std::vector<CVector<Real>> out;
    for (Index i = 0; i < sv.size(); ++i)
        if (sv(i) <= cutoff)
            out.emplace_back(svd.matrixV().col(i));
    return out;
}

template <typename Real>
Stationary<Real> stationary_from_nullspace(const std::vector<CMatrix<Real>>& null_mats) {
    Stationary<Real> st;
    if (null_mats.size() == 1) {
        CMatrix<Real> rho = null_mats.front();
        const Complex<Real> tr = rho.trace();
        if (std::abs(tr) < Real(1e-12))
            throw NumericalError("steady state has vanishing trace");
        rho /= tr;
        rho = ((rho + rho.adjoint()) / Real(2)).eval();
        st.basis.push_back(std::move(rho));
    } else {
        st.basis = null_mats;
    }
    return st;
}

} // namespace detail

template <typename Real>
Stationary<Real> steady_state(const CMatrix<Real>& L, Real rel_tol = Real(1e-10)) {
    if (L.rows() != L.cols())
        throw ValidationError("steady_state: superoperator must be square");
    std::vector<CMatrix<Real>> mats;
    for (const auto& v : detail::null_vectors(L, rel_tol))
        mats.push_back(unvectorize(v));
    return detail::stationary_from_nullspace(mats);
}

// Steady state of L restricted to operators supported on span{|s> : s in states}.
// The restriction must be invariant under L.
template <typename Real>
Stationary<Real> steady_state(const CMatrix<Real>& L, const HilbertDims& dims, std::span<const Index> states,
                              Real rel_tol = Real(1e-10)) {
    const Index d = dims.total_dim();
    if (L.rows() != d * d || L.cols() != d * d)
        throw ValidationError("steady_state: superoperator does not match the Hilbert dims");
    const Index k = static_cast<Index>(states.size());
    std::vector<Index> idx;
    for (Index c = 0; c < k; ++c)
        for (Index r = 0; r < k; ++r)
            idx.push_back(states[r] + states[c] * d);
    const Index m = static_cast<Index>(idx.size());
    CMatrix<Real> sub(m, m);
    for (Index a = 0; a < m; ++a)
        for (Index b = 0; b < m; ++b)
            sub(a, b) = L(idx[a], idx[b]);
    // Invariance: the selected columns must have no weight outside the subspace.
    Real leak = 0;
    for (Index b = 0; b < m; ++b)
        leak = std::max(leak, L.col(idx[b]).cwiseAbs().sum() - sub.col(b).cwiseAbs().sum());
    if (leak > Real(1e-12) * std::max(Real(1), L.cwiseAbs().maxCoeff()))
        throw ValidationError("steady_state: the selected subspace is not invariant under L");

    std::vector<CMatrix<Real>> mats;
    for (const auto& v : detail::null_vectors(sub, rel_tol)) {
        CMatrix<Real> full = CMatrix<Real>::Zero(d, d);
        for (Index c = 0; c < k; ++c)
            for (Index r = 0; r < k; ++r)
                full(states[r], states[c]) = v(r + c * k);
        mats.push_back(std::move(full));
    }
    return detail::stationary_from_nullspace(mats);
}

// Population held by the two highest Fock levels (only the highest when fock_dim = 2),
// maximized over a trajectory. Round-off level leakage certifies the truncation.
struct TruncationReport {
    Index fock_dim = 0;
    double leakage = 0;
    double threshold = 1e-10;
    bool certified() const { return leakage < threshold; }
};

template <typename Real>
TruncationReport truncation_report(const MasterTrajectory<Real>& traj, const HilbertDims& dims,
                                   double threshold = 1e-10) {
    TruncationReport rep;
    rep.fock_dim = dims.fock_dim();
    rep.threshold = threshold;
    const Index first = std::max<Index>(1, dims.fock_dim() - 2);
    for (const auto& rho : traj.states) {
        const auto pops = fock_populations<Real>(rho.matrix(), dims);
        rep.leakage = std::max(rep.leakage, static_cast<double>(pops.tail(dims.fock_dim() - first).sum()));
    }
    return rep;
}

struct CptpReport {
    double max_trace_error = 0;        // max |Tr rho - 1|
    double max_hermiticity_error = 0;  // max |rho - rho^dagger| before symmetrization
    double min_eigenvalue = 1;
};

template <typename Real>
struct OracleObservables {
    TimeSeries series;  // columns p_e, purity
    IntegrationStats stats;
    TruncationReport truncation;
    CptpReport cptp;
};

// Integrates |psi0><psi0| under L and reduces each state to the atom.
template <typename Real>
OracleObservables<Real> atom_observables_oracle(const CMatrix<Real>& L, const HilbertDims& dims,
                                                const CVector<Real>& psi0, std::span<const Real> t_grid,
                                                const IntegratorConfig& cfg = {}) {
    const auto traj = integrate_master(L, DensityMatrix<Real>::pure(psi0), t_grid, cfg);
    OracleObservables<Real> out;
    out.stats = traj.stats;
    out.truncation = truncation_report(traj, dims);
    out.cptp.max_hermiticity_error = traj.stats.max_hermiticity_drift;
    std::vector<double> pe, purity;
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
        const auto check = traj.states[k].check();
        out.cptp.max_trace_error = std::max(out.cptp.max_trace_error, check.trace_error);
        out.cptp.max_hermiticity_error = std::max(out.cptp.max_hermiticity_error, check.hermiticity_error);
        out.cptp.min_eigenvalue = std::min(out.cptp.min_eigenvalue, check.min_eigenvalue);
        const CMatrix<Real> atom = partial_trace_cavity<Real>(traj.states[k].matrix(), dims);
        out.series.axis.push_back(static_cast<double>(traj.times[k]));
        pe.push_back(static_cast<double>(atom(kExcited, kExcited).real()));
        purity.push_back(static_cast<double>((atom * atom).trace().real()));
    }
    out.series.add_column("p_e", std::move(pe));
    out.series.add_column("purity", std::move(purity));
    return out;
}

} // namespace jcdiss
