// Hardness and structure diagnostics: norms, stable rank, an arboricity
// upper bound with an explicit forest-decomposition certificate, and the
// dissipation observables (envelope decay rate, energy recurrence).

#pragma once

#include "oscbath/model.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace oscbath {

using EdgeList = std::vector<std::pair<Index, Index>>;

struct ForestCertificate {
    std::vector<EdgeList> forests;
    Index vertex_count = 0;
    // True when the forests are disjoint, acyclic, and cover every edge.
    bool validate(const EdgeList& edges) const;
};

struct DecayFit {
    double gamma = 0.0;   // envelope rate: |x_*| peaks ~ exp(-gamma t)
    double r2 = 0.0;      // quality of the log-envelope line fit
    double window_lo = 0.0, window_hi = 0.0;
    Index peaks_used = 0;
};

struct DiagnosticsReport {
    double spectral_norm = 0.0;
    double frobenius_norm_sq = 0.0;      // closed form
    double frobenius_entrywise = -1.0;   // brute-force cross-check, -1 if skipped
    double abs_norm = 0.0;
    double abs_ratio = 0.0;              // abs_norm / spectral_norm
    double stable_rank = 0.0;
    Index arboricity_bound = 0;
    std::optional<DecayFit> decay;
    std::optional<double> recurrence_time;
};

// ||Hh||_F^2 = 2 [ sum_i K_ii/m_i + sum_a g_a^2/(m_* nu_a) + sum_a nu_a^2 ],
// evaluated without materializing Hh. The first term equals
// ||sqrt(K) sqrt(M)^-1||_F^2 = tr(sqrt(M)^-1 K sqrt(M)^-1) exactly because M
// is diagonal.
double frobenius_norm_sq(const CompositeModel& model);

// Entrywise sum over the dense Hh; oracle for the closed form at small D.
double frobenius_norm_sq_entrywise(const CompositeModel& model);

// ||Hh||. Dense eigensolve up to dense_cutoff, Lanczos on B^T B above it
// (the flat-bath spectral gap is too small for plain power iteration).
double spectral_norm(const CompositeModel& model, Index dense_cutoff = 512);

// ||Hh||_F^2 / ||Hh||^2.
double stable_rank(const CompositeModel& model);

// Certified upper bound on the arboricity of the graph of Hh. Bath edges
// (star at p_* plus the y-k matching) always fit into the first forest
// since each one attaches a fresh vertex; the primary bipartite block is
// decomposed by peeling maximal spanning forests, which uses at most
// max-degree <= d forests. Exact arboricity is not needed: the runtime
// formula only consumes an upper bound.
Index arboricity_bound(const CompositeModel& model, ForestCertificate* certificate = nullptr);

struct AbsNormCheck {
    double abs_norm = 0.0;
    double spectral_norm = 0.0;
    double ratio = 0.0;  // in [1, 2b]
};

AbsNormCheck abs_norm_check(const CompositeModel& model);

// Least-squares line through (t_peak, log peak) where the peaks are local
// maxima of |x| refined by quadratic interpolation. Throws when fewer than
// 4 peaks are found. r2 is defined as 1 for a flat envelope.
DecayFit decay_fit(const std::vector<double>& ts, const std::vector<double>& xs);

// First time the primary energy returns to theta * E_S(0) after having
// dropped below theta/2 * E_S(0); nullopt when it never drops or never
// returns inside the sampled window.
std::optional<double> recurrence_time(const std::vector<double>& ts,
                                      const std::vector<double>& es, double theta = 0.5);

struct TrajectoryOptions {
    bool enabled = false;
    Vector x0, p0;
    double t_final = 0.0;
    double sample_dt = 0.0;
    double theta = 0.5;
};

// Norms, stable rank, arboricity; decay/recurrence when a trajectory is
// requested (normal-mode oracle run internally).
DiagnosticsReport diagnose(const CompositeModel& model,
                           const TrajectoryOptions& traj = {});

}  // namespace oscbath
