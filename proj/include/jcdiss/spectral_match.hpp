#pragma once

#include <algorithm>
#include <complex>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "jcdiss/errors.hpp"

namespace jcdiss {

// Smallest achievable max |a_i - b_perm(i)| over all pairings of two equally
// sized eigenvalue lists. Brute force, meant for blocks of size <= 8.
template <typename Real>
Real multiset_distance(std::span<const std::complex<Real>> a, std::span<const std::complex<Real>> b) {
    if (a.size() != b.size())
        throw ValidationError("multiset_distance: sizes differ");
    if (a.size() > 8)
        throw ValidationError("multiset_distance: lists longer than 8 are not supported");
    std::vector<std::size_t> perm(a.size());
    std::iota(perm.begin(), perm.end(), 0);
    Real best = std::numeric_limits<Real>::infinity();
    do {
        Real worst = 0;
        for (std::size_t i = 0; i < a.size(); ++i)
            worst = std::max(worst, std::abs(a[i] - b[perm[i]]));
        best = std::min(best, worst);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

// max over x in subset of the distance to the nearest element of superset.
template <typename Real>
Real containment_distance(std::span<const std::complex<Real>> subset, std::span<const std::complex<Real>> superset) {
    Real worst = 0;
    for (const auto& x : subset) {
        Real nearest = std::numeric_limits<Real>::infinity();
        for (const auto& y : superset)
            nearest = std::min(nearest, std::abs(x - y));
        worst = std::max(worst, nearest);
    }
    return worst;
}

} // namespace jcdiss
