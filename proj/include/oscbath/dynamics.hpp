// dynamics.hpp — classical ground-truth evolution of the composite network.
//
// Two independent integration routes are kept deliberately separate:
//  * NormalModes: exact propagation through the eigendecomposition of the
//    composite quadratic form (the primary oracle),
//  * evolve_verlet: symplectic leapfrog (the stepped second oracle).
// They have disjoint failure modes, which is what the cross-checks rely on.
//
// Equations of motion:
//   dx_i/dt = p_i / m_i
//   dp_i/dt = -K x |_i + delta_{i,*} sum_a g_a (y_a - (g_a/nu_a) x_*)
//   dy_a/dt = nu_a k_a
//   dk_a/dt = -nu_a y_a + g_a x_*

#pragma once

#include "oscbath/model.hpp"

namespace oscbath {

struct PhaseState {
    double t = 0.0;
    Vector x, p;  // primary positions / momenta
    Vector y, k;  // bath positions / momenta
};

// Bath started in the displaced configuration y_a = (g_a/nu_a) x_*(0),
// k_a = 0, which zeroes the bath block of the encoded state at t = 0.
PhaseState initial_state(const CompositeModel& model, const Vector& x0, const Vector& p0);

double total_energy(const CompositeModel& model, const PhaseState& s);
double system_energy(const CompositeModel& model, const PhaseState& s);

// Time derivative of (x, p, y, k) at s.
void eom_rhs(const CompositeModel& model, const PhaseState& s,
             Vector& dx, Vector& dp, Vector& dy, Vector& dk);

// Exact evolution. With q = (x, y), pi = (p, k), T = diag(M^-1, F) and V the
// potential's Hessian, w = T^-1/2 q obeys w'' = -Omega^2 w with
// Omega^2 = T^1/2 V T^1/2 symmetric PD. One eigendecomposition of Omega^2 is
// done at construction and reused for every time query.
class NormalModes {
public:
    explicit NormalModes(const CompositeModel& model);

    // Evolve s forward by dt (exact for any dt, positive or negative).
    PhaseState evolve(const PhaseState& s, double dt) const;

    // Normal-mode frequencies omega_l >= 0, ascending.
    const Vector& frequencies() const { return omega_; }

private:
    const CompositeModel* model_;
    Vector omega_;        // sqrt of Omega^2 eigenvalues
    Matrix modes_;        // eigenvectors of Omega^2 (columns)
    Vector sqrt_t_;       // diag T^1/2  (1/sqrt(m), sqrt(nu))
    Vector sqrt_t_inv_;
};

// One-shot convenience; builds the decomposition per call. Hold a
// NormalModes instance when evolving many times on one model.
PhaseState evolve_normal_modes(const CompositeModel& model, const PhaseState& s, double dt);

// Symplectic leapfrog (kick-drift-kick) with step dt and a trailing partial
// step so the final time is exactly s.t + t. O(dt^2) accurate, bounded
// energy drift.
PhaseState evolve_verlet(const CompositeModel& model, const PhaseState& s, double t, double dt);

}  // namespace oscbath
