#include "oscbath/model.hpp"

#include <cmath>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace oscbath {

namespace {

bool all_finite(const Matrix& m) { return m.allFinite(); }
bool all_finite(const Vector& v) { return v.allFinite(); }

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

}  // namespace

void SystemSpec::validate() const {
    const Index n = d();
    if (n < 1) fail("system: at least one oscillator required");
    if (!all_finite(masses)) fail("system: masses must be finite");
    for (Index i = 0; i < n; ++i)
        if (masses[i] <= 0.0) fail("system: masses must be strictly positive");
    if (kappa.rows() != n || kappa.cols() != n)
        fail("system: kappa must be a d x d matrix");
    if (!all_finite(kappa)) fail("system: kappa must be finite");
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            if (kappa(i, j) < 0.0) fail("system: kappa entries must be nonnegative");
            // Silent symmetrization would hide configuration bugs.
            if (std::abs(kappa(i, j) - kappa(j, i)) > 1e-12)
                fail("system: kappa must be symmetric (asymmetry above 1e-12)");
        }
    }
    if (star_index < 0 || star_index >= n) fail("system: star_index out of range");
}

void BathSpec::validate() const {
    const Index n = N();
    if (n < 1) fail("bath: at least one mode required");
    if (g.size() != n) fail("bath: frequency/coupling length mismatch");
    if (!all_finite(nu) || !all_finite(g)) fail("bath: entries must be finite");
    if (!(nu_max > 0.0) || !std::isfinite(nu_max)) fail("bath: nu_max must be positive");
    for (Index a = 0; a < n; ++a) {
        // nu = 0 would make the coupling column g/sqrt(nu) diverge.
        if (nu[a] <= 0.0) fail("bath: frequencies must be strictly positive");
        if (nu[a] > nu_max * (1.0 + 1e-12)) fail("bath: frequency exceeds nu_max");
    }
}

Matrix build_spring_matrix(const SystemSpec& spec) {
    spec.validate();
    const Index n = spec.d();
    Matrix k = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
        double diag = 0.0;
        for (Index j = 0; j < n; ++j) {
            diag += spec.kappa(i, j);
            if (i != j) k(i, j) = -spec.kappa(i, j);
        }
        k(i, i) = diag;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(k);
    const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    if (es.eigenvalues().minCoeff() <= 1e-12 * scale)
        fail("system: spring matrix is not positive-definite (model cannot be encoded)");
    return k;
}

Matrix principal_sqrt(const Matrix& a, double tol) {
    if (a.rows() != a.cols()) fail("principal_sqrt: matrix must be square");
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        fail("principal_sqrt: matrix must be symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix> es(a);
    const double norm = std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 1e-300);
    Vector lam = es.eigenvalues();
    for (Index i = 0; i < lam.size(); ++i) {
        if (lam[i] < -tol * norm)
            fail("principal_sqrt: matrix has a negative eigenvalue beyond tolerance");
        lam[i] = std::sqrt(std::max(lam[i], 0.0));
    }
    Matrix r = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
    return 0.5 * (r + r.transpose());
}

CompositeModel build_model(SystemSpec system, BathSpec bath) {
    system.validate();
    bath.validate();

    CompositeModel m;
    m.K = build_spring_matrix(system);
    m.system = std::move(system);
    m.bath = std::move(bath);

    Eigen::SelfAdjointEigenSolver<Matrix> es(m.K);
    Vector lam = es.eigenvalues();
    Vector sq = lam.cwiseSqrt();
    m.sqrt_k = es.eigenvectors() * sq.asDiagonal() * es.eigenvectors().transpose();
    m.sqrt_k = 0.5 * (m.sqrt_k + m.sqrt_k.transpose());
    m.sqrt_k_inv = es.eigenvectors() * sq.cwiseInverse().asDiagonal() *
                   es.eigenvectors().transpose();
    m.sqrt_k_inv = 0.5 * (m.sqrt_k_inv + m.sqrt_k_inv.transpose());

    m.sqrt_m = m.system.masses.cwiseSqrt();
    m.sqrt_m_inv = m.sqrt_m.cwiseInverse();
    m.coupling_block = m.sqrt_k * m.sqrt_m_inv.asDiagonal();

    m.g_over_sqrt_nu = m.bath.g.cwiseQuotient(m.bath.nu.cwiseSqrt());
    m.sum_g2_over_nu = m.bath.g.cwiseAbs2().cwiseQuotient(m.bath.nu).sum();
    return m;
}

CMatrix assemble_hamiltonian(const CompositeModel& model, Index dense_cap) {
    const Index d = model.d(), n = model.N(), D = model.dim();
    if (D > dense_cap) {
        std::ostringstream os;
        os << "assemble_hamiltonian: dimension " << D << " exceeds dense cap " << dense_cap;
        throw std::invalid_argument(os.str());
    }
    CMatrix upper = CMatrix::Zero(D, D);
    // x-p block: i R
    upper.block(0, d, d, d) = kImag * model.coupling_block;
    // p-y block: i sqrt(M)^-1 G, nonzero only in the star row
    const double ms_inv = model.sqrt_m_inv[model.star()];
    for (Index a = 0; a < n; ++a)
        upper(d + model.star(), 2 * d + a) = kImag * ms_inv * model.g_over_sqrt_nu[a];
    // y-k block: i F
    for (Index a = 0; a < n; ++a)
        upper(2 * d + a, 2 * d + n + a) = kImag * model.bath.nu[a];
    // Mirroring makes Hermiticity exact.
    return upper + upper.adjoint();
}

void apply_b(const CompositeModel& model, const Vector& z, Vector& w) {
    const Index d = model.d(), n = model.N();
    w.resize(2 * (d + n));
    const auto zx = z.segment(0, d);
    const auto zp = z.segment(d, d);
    const auto zy = z.segment(2 * d, n);
    const auto zk = z.segment(2 * d + n, n);
    const double ms_inv = model.sqrt_m_inv[model.star()];

    w.segment(0, d) = model.coupling_block * zp;
    w.segment(d, d) = -model.coupling_block.transpose() * zx;
    w[d + model.star()] += ms_inv * model.g_over_sqrt_nu.dot(zy);
    const double zps = zp[model.star()];
    w.segment(2 * d, n) =
        -ms_inv * zps * model.g_over_sqrt_nu + model.bath.nu.cwiseProduct(zk);
    w.segment(2 * d + n, n) = -model.bath.nu.cwiseProduct(zy);
}

void apply_abs(const CompositeModel& model, const Vector& z, Vector& w) {
    const Index d = model.d(), n = model.N();
    w.resize(2 * (d + n));
    const auto zx = z.segment(0, d);
    const auto zp = z.segment(d, d);
    const auto zy = z.segment(2 * d, n);
    const auto zk = z.segment(2 * d + n, n);
    const Matrix r_abs = model.coupling_block.cwiseAbs();
    const Vector gm_abs = model.sqrt_m_inv[model.star()] * model.g_over_sqrt_nu.cwiseAbs();

    w.segment(0, d) = r_abs * zp;
    w.segment(d, d) = r_abs.transpose() * zx;
    w[d + model.star()] += gm_abs.dot(zy);
    w.segment(2 * d, n) = zp[model.star()] * gm_abs + model.bath.nu.cwiseProduct(zk);
    w.segment(2 * d + n, n) = model.bath.nu.cwiseProduct(zy);
}

double abs_norm_upper_bound(const CompositeModel& model) {
    const Index d = model.d(), n = model.N();
    const Matrix r_abs = model.coupling_block.cwiseAbs();
    const Vector gm_abs = model.sqrt_m_inv[model.star()] * model.g_over_sqrt_nu.cwiseAbs();
    double bound = 0.0;
    for (Index i = 0; i < d; ++i) bound = std::max(bound, r_abs.row(i).sum());
    for (Index j = 0; j < d; ++j) {
        double s = r_abs.col(j).sum();
        if (j == model.star()) s += gm_abs.sum();
        bound = std::max(bound, s);
    }
    for (Index a = 0; a < n; ++a) {
        bound = std::max(bound, gm_abs[a] + model.bath.nu[a]);
        bound = std::max(bound, model.bath.nu[a]);
    }
    return bound;
}

std::vector<std::pair<Index, Index>> hamiltonian_edges(const CompositeModel& model,
                                                       double rel_tol) {
    const Index d = model.d(), n = model.N();
    std::vector<std::pair<Index, Index>> edges;
    const Matrix r_abs = model.coupling_block.cwiseAbs();
    const double cut = rel_tol * std::max(r_abs.maxCoeff(), 1e-300);
    for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j)
            if (r_abs(i, j) > cut) edges.emplace_back(i, d + j);
    for (Index a = 0; a < n; ++a) {
        if (model.bath.g[a] != 0.0) edges.emplace_back(d + model.star(), 2 * d + a);
        edges.emplace_back(2 * d + a, 2 * d + n + a);  // nu > 0 always
    }
    return edges;
}

bool graph_connected(const CompositeModel& model) {
    const Index D = model.dim();
    std::vector<std::vector<Index>> adj(static_cast<std::size_t>(D));
    for (const auto& [u, v] : hamiltonian_edges(model)) {
        adj[static_cast<std::size_t>(u)].push_back(v);
        adj[static_cast<std::size_t>(v)].push_back(u);
    }
    std::vector<char> seen(static_cast<std::size_t>(D), 0);
    std::queue<Index> bfs;
    bfs.push(0);
    seen[0] = 1;
    Index count = 1;
    while (!bfs.empty()) {
        const Index u = bfs.front();
        bfs.pop();
        for (Index v : adj[static_cast<std::size_t>(u)]) {
            if (!seen[static_cast<std::size_t>(v)]) {
                seen[static_cast<std::size_t>(v)] = 1;
                ++count;
                bfs.push(v);
            }
        }
    }
    return count == D;
}

}  // namespace oscbath
