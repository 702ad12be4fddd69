// Shared fixtures for the test suites: deterministic random models/states and
// the walk-spectrum comparison used by both the unit tests and the
// acceptance runner.

#pragma once

#include "oscbath/bath.hpp"
#include "oscbath/dynamics.hpp"
#include "oscbath/model.hpp"
#include "oscbath/qwalk.hpp"
#include "oscbath/rng.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace testutil {

using namespace oscbath;

// Unit-scale random model with strictly diagonally dominant K (hence PD) and
// nonzero bath couplings of mixed sign.
inline CompositeModel random_model(std::mt19937_64& rng, Index d, Index n,
                                   double coupling_scale = 0.3) {
    SystemSpec sys;
    sys.masses.resize(d);
    for (Index i = 0; i < d; ++i) sys.masses[i] = 0.5 + uniform_double(rng);
    sys.kappa = Matrix::Zero(d, d);
    for (Index i = 0; i < d; ++i) {
        sys.kappa(i, i) = 0.5 + uniform_double(rng);
        for (Index j = i + 1; j < d; ++j)
            sys.kappa(i, j) = sys.kappa(j, i) = 0.5 * uniform_double(rng);
    }
    sys.star_index = d > 1 ? static_cast<Index>(rng() % static_cast<std::uint64_t>(d)) : 0;

    BathSpec bath;
    bath.nu_max = 1.0;
    bath.nu.resize(n);
    bath.g.resize(n);
    const double gs = coupling_scale / std::sqrt(static_cast<double>(n));
    for (Index a = 0; a < n; ++a) {
        bath.nu[a] = 0.1 + 0.9 * uniform_double(rng);
        const double sign = uniform_double(rng) < 0.5 ? -1.0 : 1.0;
        bath.g[a] = sign * gs * (0.2 + 0.8 * uniform_double(rng));
    }
    return build_model(std::move(sys), std::move(bath));
}

inline PhaseState random_state(std::mt19937_64& rng, const CompositeModel& m) {
    PhaseState s;
    s.t = 0.0;
    auto fill = [&rng](Vector& v, Index n) {
        v.resize(n);
        for (Index i = 0; i < n; ++i) v[i] = 2.0 * uniform_double(rng) - 1.0;
    };
    fill(s.x, m.d());
    fill(s.p, m.d());
    fill(s.y, m.N());
    fill(s.k, m.N());
    return s;
}

inline double state_distance(const PhaseState& a, const PhaseState& b) {
    return std::max({(a.x - b.x).cwiseAbs().maxCoeff(), (a.p - b.p).cwiseAbs().maxCoeff(),
                     (a.y - b.y).cwiseAbs().maxCoeff(), (a.k - b.k).cwiseAbs().maxCoeff()});
}

// Wrap-safe distance between the phases of two unit-circle values.
inline double phase_distance(Complex a, Complex b) { return std::abs(std::arg(a * std::conj(b))); }

struct WalkPhaseCheck {
    double max_mismatch = 0.0;     // walk-subspace eigenphases vs +/- arccos(gamma)
    Index walk_dims = 0;           // dimensions carried by the walk subspace
    Index collapsed = 0;           // eigenvalues with |gamma| = 1 (1-dim pairs)
    std::vector<double> gammas;    // discriminant spectrum
};

// Verifies the eigenphase correspondence block by block: for each eigenpair
// (gamma, u) of the discriminant T^dag S T, the span {Tu, STu} is
// W-invariant and carries eigenvalues exp(+-i arccos gamma); |gamma| = 1
// collapses the pair to one eigenvector.
inline WalkPhaseCheck check_walk_phases(const WalkSpace& ws) {
    const Index D = ws.D;
    CMatrix st(D * D, D);
    for (Index i = 0; i < D * D; ++i) st.row(i) = ws.T.row(swap_index(i, D));
    CMatrix disc = ws.T.adjoint() * st;
    disc = 0.5 * (disc + disc.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(disc);

    WalkPhaseCheck out;
    for (Index l = 0; l < D; ++l) {
        const double gamma = es.eigenvalues()[l];
        out.gammas.push_back(gamma);
        const CVector a = ws.T * es.eigenvectors().col(l);
        CVector b(D * D);
        for (Index i = 0; i < D * D; ++i) b[i] = a[swap_index(i, D)];

        if (std::abs(gamma) >= 1.0 - 1e-12) {
            const Complex val = a.dot(ws.W * a);
            const Complex expected = gamma > 0 ? Complex{1.0, 0.0} : Complex{-1.0, 0.0};
            out.max_mismatch = std::max(out.max_mismatch, phase_distance(val, expected));
            out.walk_dims += 1;
            out.collapsed += 1;
            continue;
        }
        CVector b_perp = b - gamma * a;
        b_perp /= b_perp.norm();
        CMatrix block(2, 2);
        const CVector wa = ws.W * a, wb = ws.W * b_perp;
        block << a.dot(wa), a.dot(wb), b_perp.dot(wa), b_perp.dot(wb);
        Eigen::ComplexEigenSolver<CMatrix> bes(block);
        const double theta = std::acos(std::clamp(gamma, -1.0, 1.0));
        const Complex e_plus = std::polar(1.0, theta);
        const Complex e_minus = std::polar(1.0, -theta);
        const Complex l0 = bes.eigenvalues()[0], l1 = bes.eigenvalues()[1];
        const double pairing_a =
            std::max(phase_distance(l0, e_plus), phase_distance(l1, e_minus));
        const double pairing_b =
            std::max(phase_distance(l0, e_minus), phase_distance(l1, e_plus));
        out.max_mismatch = std::max(out.max_mismatch, std::min(pairing_a, pairing_b));
        out.walk_dims += 2;
    }
    return out;
}

}  // namespace testutil
