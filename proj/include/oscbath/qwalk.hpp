// qwalk.hpp — statevector emulation of non-sparse Hamiltonian simulation by
// Szegedy walk plus phase estimation.
//
// Construction, for a D x D Hermitian Hh with connected graph:
//
//  1. Perron pair of abs(Hh):  abs(Hh) v = Hnorm v, v > 0 entrywise.
//  2. Isometry T = sum_a |psi_a><a| : C^D -> C^D (x) C^D with
//       T[(a,b), a] = conj(f_ab) sqrt(v_b / (Hnorm v_a)),
//     where the factor pair obeys f_ab f*_ba = Hh*_ab and |f_ab|^2 = |Hh_ab|.
//     Column normalization is exactly the Perron property. The convention is
//     pinned by the assertable identities
//       T^dag T = I_D      and      T^dag S T = Hh^T / Hnorm,
//     with S the register swap |a,b> -> |b,a>.
//  3. Walk operator W = S (2 T T^dag - I). For each eigenpair (gamma_l, u_l)
//     of the discriminant Hh^T/Hnorm, the invariant span{T u_l, S T u_l}
//     carries W-eigenvalues exp(+-i arccos gamma_l); writing
//     s_l = arcsin gamma_l these are i^{+-1} exp(-+ i s_l), i.e. the
//     conventional pair w_+- = +-exp(+-i s_l) up to one global factor i.
//     |gamma_l| = 1 collapses the pair to a single eigenvector (this happens
//     exactly when the graph is a tree, where Hnorm = ||Hh||).
//  4. Phase estimation Q on W with p ancilla bits; the oracle P multiplies
//     phase bin j by exp(-i t Hnorm sin(s~_j)), where the bin's walk phase
//     theta_j = 2 pi j / 2^p encodes s~_j = arcsin(cos theta_j), i.e.
//     sin(s~_j) = cos(theta_j) on both eigenphase branches.
//  5. Composite per segment: U = T^dag Q^dag P Q T, applied to segments of
//     length t / ceil(Hnorm t).
//
// For this model family Hh^T = -Hh (purely imaginary entries, zero
// diagonal), so U built on the discriminant Hh^T/Hnorm generates backward
// evolution; simulate() therefore drives P with the negated segment time to
// realize exp(-i Hh t). See walk_operator() tests for the locked-in
// conventions.

#pragma once

#include "oscbath/hamsim.hpp"
#include "oscbath/model.hpp"
#include "oscbath/qstate.hpp"

#include <cstdint>

namespace oscbath {

struct PerronPair {
    double hnorm = 0.0;  // ||abs(Hh)||
    Vector v;            // strictly positive, unit norm
    Index iterations = 0;
    double residual = 0.0;
};

// Shifted power iteration on abs(Hh), structured matvecs. Throws if the
// graph of Hh is disconnected (isolated bath pairs when some g_a = 0): the
// Perron vector would have zeros and the model must be decomposed instead.
PerronPair abs_principal_eigenvector(const CompositeModel& model,
                                     double tol = 1e-12, Index max_iterations = 1000000);

// Same computation on an explicitly given Hermitian matrix.
PerronPair abs_principal_eigenvector(const CMatrix& h,
                                     double tol = 1e-12, Index max_iterations = 1000000);

// Column a of the D^2 x D isometry, as documented above.
CMatrix build_isometry(const CMatrix& h, double hnorm, const Vector& v);

// W = S (2 T T^dag - I), dense D^2 x D^2.
CMatrix walk_operator(const CMatrix& t_isometry);

// Swap index map: |a,b> -> |b,a> for the row-major pairing (a,b) = a*D + b.
inline Index swap_index(Index idx, Index d) { return (idx % d) * d + idx / d; }

struct WalkSpace {
    Index D = 0;
    double hnorm = 0.0;
    Vector v;
    CMatrix T;  // D^2 x D
    CMatrix W;  // D^2 x D^2
};

WalkSpace build_walk_space(const CompositeModel& model);

struct PhaseConfig {
    int phase_bits = 8;
    Index repetitions = 0;       // 0 = auto (ceil(Hnorm t) segments)
    double target_eps = 1e-2;
    std::uint64_t resource_cap = std::uint64_t{1} << 22;  // cap on D^2 * 2^p
};

// Phase estimation as a unitary on C^{D^2} (x) C^{2^p}, joint index
// j * D^2 + w. Hadamards, controlled-W^{2^j}, inverse Fourier transform;
// applied as a structured product, never materialized.
class QpeOperator {
public:
    QpeOperator(const CMatrix& w, int phase_bits, std::uint64_t resource_cap);

    void apply(CVector& joint) const;          // Q
    void apply_inverse(CVector& joint) const;  // Q^dag
    Index walk_dim() const { return walk_dim_; }
    int phase_bits() const { return phase_bits_; }
    Index joint_dim() const { return walk_dim_ << phase_bits_; }

private:
    Index walk_dim_;
    int phase_bits_;
    std::vector<CMatrix> w_powers_;  // W^(2^j)
};

// Q applied to |0>_phase (x) psi_walk. Resource guard on D^2 * 2^p.
CVector qpe(const CMatrix& w, const CVector& psi_walk, int phase_bits,
            std::uint64_t resource_cap = std::uint64_t{1} << 22);

// P: multiply each phase bin j by exp(-i t hnorm sin(s~_j)),
// sin(s~_j) = cos(2 pi j / 2^p).
void phase_oracle(CVector& joint, Index walk_dim, int phase_bits, double t, double hnorm);

struct WalkRunReport {
    double fidelity = 1.0;       // |<psi_exact|psi_walk>|^2
    double traj_error = 0.0;     // max decoded |dx|, |dp| vs exact propagation
    double achieved_eps = 0.0;   // 1 - fidelity
    double norm_leakage = 0.0;   // amplitude lost to nonzero phase bins
    bool best_effort = false;    // achieved_eps above target_eps
    Index segments = 0;
    std::uint64_t walk_queries = 0;  // 2 (2^p - 1) per Q/Q^dag pair per segment
    int phase_bits = 0;
    double hnorm = 0.0;
};

// Applies the segmented composite U and compares against the exact
// propagator. Construction of the walk space and the spectral reference is
// done once; simulate() may then be called for many (t, cfg) pairs.
class WalkSimulator {
public:
    explicit WalkSimulator(const CompositeModel& model);

    EncodedState simulate(const EncodedState& psi0, double t, const PhaseConfig& cfg,
                          WalkRunReport* report = nullptr) const;

    const WalkSpace& walk_space() const { return ws_; }

private:
    const CompositeModel* model_;
    WalkSpace ws_;
    ExactPropagator exact_;
};

EncodedState simulate(const CompositeModel& model, const EncodedState& psi0, double t,
                      const PhaseConfig& cfg, WalkRunReport* report = nullptr);

struct ResourceEstimate {
    // Cost-model instantiation: queries = b * Hnorm * t / sqrt(eps),
    // repetitions = Hnorm * t / sqrt(eps). Real-valued so scaling relations
    // hold exactly.
    double formula_queries = 0.0;
    double formula_repetitions = 0.0;
    Index arboricity_bound = 0;
    double hnorm = 0.0;
    double t = 0.0;
    double eps = 0.0;
    // Emulation-side counts for the same (t, eps) at the given phase bits.
    Index segments = 0;
    int phase_bits = 0;
    std::uint64_t walk_queries_emulated = 0;
    std::uint64_t state_size = 0;  // D^2 * 2^p
};

ResourceEstimate resource_estimate(const CompositeModel& model, double t, double eps,
                                   int phase_bits = 8);

}  // namespace oscbath
