#include "oscbath/diagnostics.hpp"

#include "oscbath/dynamics.hpp"
#include "oscbath/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace oscbath {

namespace {

struct UnionFind {
    std::vector<Index> parent;
    explicit UnionFind(Index n) : parent(static_cast<std::size_t>(n)) {
        std::iota(parent.begin(), parent.end(), Index{0});
    }
    Index find(Index a) {
        while (parent[static_cast<std::size_t>(a)] != a) {
            parent[static_cast<std::size_t>(a)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
            a = parent[static_cast<std::size_t>(a)];
        }
        return a;
    }
    bool unite(Index a, Index b) {
        const Index ra = find(a), rb = find(b);
        if (ra == rb) return false;
        parent[static_cast<std::size_t>(ra)] = rb;
        return true;
    }
};

std::pair<Index, Index> normalized(std::pair<Index, Index> e) {
    if (e.first > e.second) std::swap(e.first, e.second);
    return e;
}

double abs_spectral_norm(const CompositeModel& model) {
    auto apply = [&model](const Vector& in, Vector& out) { apply_abs(model, in, out); };
    // Power iteration first (it also delivers the Perron vector elsewhere);
    // fall back to Lanczos when the gap at the top is too small.
    const auto res = power_iteration_nonnegative(model.dim(), apply,
                                                 abs_norm_upper_bound(model), 1e-12, 200000);
    if (res.converged) return res.eigenvalue;
    return lanczos_max_eigenvalue(model.dim(), apply, 500, 1e-13);
}

}  // namespace

bool ForestCertificate::validate(const EdgeList& edges) const {
    std::vector<std::pair<Index, Index>> covered;
    for (const auto& forest : forests) {
        UnionFind uf(vertex_count);
        for (const auto& e : forest) {
            if (e.first < 0 || e.first >= vertex_count || e.second < 0 ||
                e.second >= vertex_count)
                return false;
            if (!uf.unite(e.first, e.second)) return false;  // cycle
            covered.push_back(normalized(e));
        }
    }
    std::vector<std::pair<Index, Index>> want;
    want.reserve(edges.size());
    for (const auto& e : edges) want.push_back(normalized(e));
    std::sort(covered.begin(), covered.end());
    std::sort(want.begin(), want.end());
    if (std::adjacent_find(covered.begin(), covered.end()) != covered.end()) return false;
    return covered == want;
}

double frobenius_norm_sq(const CompositeModel& model) {
    // 2 [ sum K_ii/m_i + sum g_a^2/(m_* nu_a) + sum nu_a^2 ]. The system term
    // is exact: tr((R)^T R) = tr(M^-1/2 K M^-1/2) = sum K_ii/m_i since M is
    // diagonal.
    const double system_term =
        model.K.diagonal().cwiseQuotient(model.system.masses).sum();
    const double coupling_term =
        model.sum_g2_over_nu / model.system.masses[model.star()];
    const double bath_term = model.bath.nu.cwiseAbs2().sum();
    return 2.0 * (system_term + coupling_term + bath_term);
}

double frobenius_norm_sq_entrywise(const CompositeModel& model) {
    return assemble_hamiltonian(model).cwiseAbs2().sum();
}

double spectral_norm(const CompositeModel& model, Index dense_cutoff) {
    if (model.dim() <= dense_cutoff) {
        Eigen::SelfAdjointEigenSolver<CMatrix> es(assemble_hamiltonian(model),
                                                  Eigen::EigenvaluesOnly);
        return es.eigenvalues().cwiseAbs().maxCoeff();
    }
    // ||Hh||^2 = lambda_max(B^T B) with B = -i Hh real antisymmetric.
    Vector tmp;
    auto apply = [&model, &tmp](const Vector& in, Vector& out) {
        apply_b(model, in, tmp);
        apply_b(model, tmp, out);
        out = -out;
    };
    const double lam = lanczos_max_eigenvalue(model.dim(), apply, 400, 1e-13);
    return std::sqrt(std::max(lam, 0.0));
}

double stable_rank(const CompositeModel& model) {
    const double s = spectral_norm(model);
    return frobenius_norm_sq(model) / (s * s);
}

Index arboricity_bound(const CompositeModel& model, ForestCertificate* certificate) {
    const Index d = model.d();
    const EdgeList edges = hamiltonian_edges(model);

    EdgeList primary, bath_edges;
    for (const auto& e : edges)
        (e.first < 2 * d && e.second < 2 * d ? primary : bath_edges).push_back(e);
    std::sort(primary.begin(), primary.end());

    // Peel maximal spanning forests off the primary bipartite block. Every
    // vertex with remaining edges loses at least one per round, so the
    // number of rounds is at most the maximum degree, itself at most d.
    std::vector<EdgeList> forests;
    EdgeList remaining = primary;
    while (!remaining.empty()) {
        UnionFind uf(2 * d);
        EdgeList forest, rest;
        for (const auto& e : remaining)
            (uf.unite(e.first, e.second) ? forest : rest).push_back(e);
        forests.push_back(std::move(forest));
        remaining = std::move(rest);
    }
    if (forests.empty()) forests.emplace_back();

    // Bath edges (star at p_* plus the y-k matching) each attach a vertex
    // not seen before inside the forest, so they extend forest 0 acyclically.
    auto& first = forests.front();
    first.insert(first.end(), bath_edges.begin(), bath_edges.end());

    if (certificate) {
        certificate->forests = forests;
        certificate->vertex_count = model.dim();
    }
    return static_cast<Index>(forests.size());
}

AbsNormCheck abs_norm_check(const CompositeModel& model) {
    AbsNormCheck out;
    out.abs_norm = abs_spectral_norm(model);
    out.spectral_norm = spectral_norm(model);
    out.ratio = out.abs_norm / out.spectral_norm;
    return out;
}

DecayFit decay_fit(const std::vector<double>& ts, const std::vector<double>& xs) {
    if (ts.size() != xs.size() || ts.size() < 3)
        throw std::invalid_argument("decay_fit: trajectory too short");

    // Envelope: local maxima of |x| with quadratic peak interpolation.
    std::vector<double> tp, logv;
    for (std::size_t i = 1; i + 1 < ts.size(); ++i) {
        const double y0 = std::abs(xs[i - 1]), y1 = std::abs(xs[i]), y2 = std::abs(xs[i + 1]);
        if (!(y1 >= y0 && y1 >= y2 && (y1 > y0 || y1 > y2))) continue;
        double t_peak = ts[i], v_peak = y1;
        const double denom = y0 - 2.0 * y1 + y2;
        if (denom < -1e-300) {
            const double h = 0.5 * (ts[i + 1] - ts[i - 1]);
            double delta = 0.5 * (y0 - y2) / denom;
            delta = std::clamp(delta, -0.5, 0.5);
            t_peak = ts[i] + delta * h;
            v_peak = y1 - 0.25 * (y0 - y2) * delta;
        }
        if (v_peak > 0.0) {
            tp.push_back(t_peak);
            logv.push_back(std::log(v_peak));
        }
    }
    if (tp.size() < 4)
        throw std::runtime_error("decay_fit: fewer than 4 envelope peaks in the window");

    const auto n = static_cast<double>(tp.size());
    const double mt = std::accumulate(tp.begin(), tp.end(), 0.0) / n;
    const double mv = std::accumulate(logv.begin(), logv.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < tp.size(); ++i) {
        const double dt = tp[i] - mt, dv = logv[i] - mv;
        sxx += dt * dt;
        sxy += dt * dv;
        syy += dv * dv;
    }

    DecayFit out;
    out.gamma = sxx > 0.0 ? -sxy / sxx : 0.0;
    out.r2 = syy > 1e-30 ? (sxy * sxy) / (sxx * syy) : 1.0;  // flat envelope: perfect fit
    out.window_lo = tp.front();
    out.window_hi = tp.back();
    out.peaks_used = static_cast<Index>(tp.size());
    return out;
}

std::optional<double> recurrence_time(const std::vector<double>& ts,
                                      const std::vector<double>& es, double theta) {
    if (ts.size() != es.size() || ts.empty())
        throw std::invalid_argument("recurrence_time: bad trajectory");
    const double e0 = es.front();
    if (!(e0 > 0.0)) return std::nullopt;

    std::size_t drop = ts.size();
    for (std::size_t i = 0; i < es.size(); ++i) {
        if (es[i] < 0.5 * theta * e0) {
            drop = i;
            break;
        }
    }
    if (drop == ts.size()) return std::nullopt;  // never drops
    for (std::size_t i = drop + 1; i < es.size(); ++i)
        if (es[i] >= theta * e0) return ts[i];
    return std::nullopt;
}

DiagnosticsReport diagnose(const CompositeModel& model, const TrajectoryOptions& traj) {
    DiagnosticsReport rep;
    rep.spectral_norm = spectral_norm(model);
    rep.frobenius_norm_sq = frobenius_norm_sq(model);
    if (model.dim() <= 1024) rep.frobenius_entrywise = frobenius_norm_sq_entrywise(model);
    rep.abs_norm = abs_spectral_norm(model);
    rep.abs_ratio = rep.abs_norm / rep.spectral_norm;
    rep.stable_rank = rep.frobenius_norm_sq / (rep.spectral_norm * rep.spectral_norm);
    rep.arboricity_bound = arboricity_bound(model);

    if (traj.enabled) {
        const NormalModes nm(model);
        const PhaseState s0 = initial_state(model, traj.x0, traj.p0);
        const auto samples =
            static_cast<std::size_t>(std::floor(traj.t_final / traj.sample_dt + 1e-9)) + 1;
        std::vector<double> ts(samples), xstar(samples), esys(samples);
        for (std::size_t i = 0; i < samples; ++i) {
            const double t = static_cast<double>(i) * traj.sample_dt;
            const PhaseState s = nm.evolve(s0, t);
            ts[i] = t;
            xstar[i] = s.x[model.star()];
            esys[i] = system_energy(model, s);
        }
        rep.recurrence_time = recurrence_time(ts, esys, traj.theta);
        std::size_t window = samples;
        if (rep.recurrence_time) {
            window = static_cast<std::size_t>(
                std::distance(ts.begin(),
                              std::lower_bound(ts.begin(), ts.end(), *rep.recurrence_time)));
        }
        try {
            rep.decay = decay_fit({ts.begin(), ts.begin() + static_cast<long>(window)},
                                  {xstar.begin(), xstar.begin() + static_cast<long>(window)});
        } catch (const std::exception&) {
            rep.decay = std::nullopt;
        }
    }
    return rep;
}

}  // namespace oscbath
