// qstate.hpp — amplitude encoding between classical phase space and the
// unit-norm quantum state, plus an idealized tomography readout emulation.
//
// The encoded state at energy E0 = H(x, p, y, k) is
//
//   psi = ( sqrt(K) x | sqrt(M)^-1 p | sqrt(F) y - G^T x | sqrt(F) k ) / sqrt(2 E0)
//
// which has unit 2-norm exactly because 2 E0 equals the sum of the squared
// block norms. E0 travels with the state as classical side information; it
// is conserved, so one evaluation at t = 0 suffices.

#pragma once

#include "oscbath/dynamics.hpp"

#include <cstdint>

namespace oscbath {

struct BlockLayout {
    Index d = 0, N = 0;
    Index x_offset() const { return 0; }
    Index p_offset() const { return d; }
    Index y_offset() const { return 2 * d; }
    Index k_offset() const { return 2 * d + N; }
    Index size() const { return 2 * (d + N); }
};

struct EncodedState {
    CVector amplitudes;  // unit norm
    double E0 = 0.0;     // energy normalization
    double t = 0.0;
    BlockLayout layout;
};

// Requires total_energy > 0 (the normalization is undefined at zero energy).
EncodedState encode(const CompositeModel& model, const PhaseState& s);

// Inverse of encode. Amplitudes of classical states are real; imaginary
// residue above imag_tol (accumulated numerical noise after exact
// propagation stays far below 1e-8) is an error. Callers holding states
// from approximate propagation pass a looser tolerance explicitly.
PhaseState decode(const CompositeModel& model, const EncodedState& state,
                  double imag_tol = 1e-8);

// Global-phase removal: returns exp(-i phi) * v with phi = arg(sum_j v_j^2)/2,
// which makes a real-up-to-phase vector real.
CVector phase_align(const CVector& v);

struct TomographyResult {
    Vector amplitude;         // estimates of the 2d primary-block amplitudes
    Vector amplitude_radius;  // approximate 95% confidence radii
    Vector x, p;              // decoded estimates
    Vector x_radius, p_radius;
    Index reference_index = 0;  // sign-reference amplitude used
    std::uint64_t shots = 0;
};

// Simulated projective readout of the 2d primary amplitudes: magnitudes from
// computational-basis shot counts over all D outcomes, relative signs from
// two-outcome measurements in the (e_ref +/- e_b)/sqrt(2) bases. The global
// sign is fixed by taking the reference amplitude positive. Deterministic
// per seed. If the largest primary amplitude is below 1/sqrt(D) the sign
// reference is flagged ill-conditioned and the next-largest is tried.
TomographyResult tomography_sample(const CompositeModel& model, const EncodedState& state,
                                   std::uint64_t shots, std::uint64_t seed);

// shots -> infinity limit: reads the amplitudes directly.
TomographyResult tomography_direct(const CompositeModel& model, const EncodedState& state);

}  // namespace oscbath
