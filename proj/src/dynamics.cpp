#include "oscbath/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace oscbath {

namespace {

void check_state(const CompositeModel& model, const PhaseState& s) {
    if (s.x.size() != model.d() || s.p.size() != model.d() ||
        s.y.size() != model.N() || s.k.size() != model.N())
        throw std::invalid_argument("phase state dimensions do not match the model");
}

}  // namespace

PhaseState initial_state(const CompositeModel& model, const Vector& x0, const Vector& p0) {
    if (x0.size() != model.d() || p0.size() != model.d())
        throw std::invalid_argument("initial_state: x0/p0 must have length d");
    PhaseState s;
    s.t = 0.0;
    s.x = x0;
    s.p = p0;
    const double xs = x0[model.star()];
    s.y = xs * model.bath.g.cwiseQuotient(model.bath.nu);
    s.k = Vector::Zero(model.N());
    return s;
}

double total_energy(const CompositeModel& model, const PhaseState& s) {
    check_state(model, s);
    const Index d = model.d(), n = model.N();
    // Evaluated from the double-sum form, independent of the K-matrix route.
    double e = 0.0;
    for (Index i = 0; i < d; ++i)
        e += 0.5 * (s.p[i] * s.p[i] / model.system.masses[i] +
                    model.system.kappa(i, i) * s.x[i] * s.x[i]);
    for (Index i = 0; i < d; ++i)
        for (Index j = i + 1; j < d; ++j) {
            const double dx = s.x[i] - s.x[j];
            e += 0.5 * model.system.kappa(i, j) * dx * dx;
        }
    const double xs = s.x[model.star()];
    for (Index a = 0; a < n; ++a) {
        const double shift = s.y[a] - model.bath.g[a] / model.bath.nu[a] * xs;
        e += 0.5 * model.bath.nu[a] * (s.k[a] * s.k[a] + shift * shift);
    }
    return e;
}

double system_energy(const CompositeModel& model, const PhaseState& s) {
    check_state(model, s);
    const Index d = model.d();
    double e = 0.0;
    for (Index i = 0; i < d; ++i)
        e += 0.5 * (s.p[i] * s.p[i] / model.system.masses[i] +
                    model.system.kappa(i, i) * s.x[i] * s.x[i]);
    for (Index i = 0; i < d; ++i)
        for (Index j = i + 1; j < d; ++j) {
            const double dx = s.x[i] - s.x[j];
            e += 0.5 * model.system.kappa(i, j) * dx * dx;
        }
    return e;
}

void eom_rhs(const CompositeModel& model, const PhaseState& s,
             Vector& dx, Vector& dp, Vector& dy, Vector& dk) {
    check_state(model, s);
    const Index star = model.star();
    const double xs = s.x[star];

    dx = s.p.cwiseQuotient(model.system.masses);
    dp = -model.K * s.x;
    dp[star] += model.bath.g.dot(s.y) - model.sum_g2_over_nu * xs;
    dy = model.bath.nu.cwiseProduct(s.k);
    dk = -model.bath.nu.cwiseProduct(s.y) + xs * model.bath.g;
}

NormalModes::NormalModes(const CompositeModel& model) : model_(&model) {
    const Index d = model.d(), n = model.N(), m = d + n;

    sqrt_t_.resize(m);
    sqrt_t_.segment(0, d) = model.sqrt_m_inv;
    sqrt_t_.segment(d, n) = model.bath.nu.cwiseSqrt();
    sqrt_t_inv_ = sqrt_t_.cwiseInverse();

    // Omega^2 = T^1/2 V T^1/2 with V the potential Hessian in (x, y).
    Matrix omega2 = Matrix::Zero(m, m);
    Matrix vxx = model.K;
    vxx(model.star(), model.star()) += model.sum_g2_over_nu;
    omega2.block(0, 0, d, d) =
        model.sqrt_m_inv.asDiagonal() * vxx * model.sqrt_m_inv.asDiagonal();
    const double ms_inv = model.sqrt_m_inv[model.star()];
    for (Index a = 0; a < n; ++a) {
        const double c = -ms_inv * model.bath.g[a] * std::sqrt(model.bath.nu[a]);
        omega2(model.star(), d + a) = c;
        omega2(d + a, model.star()) = c;
        omega2(d + a, d + a) = model.bath.nu[a] * model.bath.nu[a];
    }

    Eigen::SelfAdjointEigenSolver<Matrix> es(omega2);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("normal modes: eigendecomposition failed");
    Vector lam = es.eigenvalues();
    const double scale = std::max(lam.cwiseAbs().maxCoeff(), 1e-300);
    for (Index i = 0; i < lam.size(); ++i) {
        if (lam[i] < -1e-12 * scale)
            throw std::runtime_error("normal modes: quadratic form is not PSD");
        lam[i] = std::max(lam[i], 0.0);
    }
    omega_ = lam.cwiseSqrt();
    modes_ = es.eigenvectors();
}

PhaseState NormalModes::evolve(const PhaseState& s, double dt) const {
    check_state(*model_, s);
    const Index d = model_->d(), n = model_->N(), m = d + n;

    Vector q(m), pi(m);
    q.segment(0, d) = s.x;
    q.segment(d, n) = s.y;
    pi.segment(0, d) = s.p;
    pi.segment(d, n) = s.k;

    const Vector c = modes_.transpose() * sqrt_t_inv_.cwiseProduct(q);
    const Vector v = modes_.transpose() * sqrt_t_.cwiseProduct(pi);

    Vector ca(m), va(m);
    for (Index l = 0; l < m; ++l) {
        const double w = omega_[l];
        if (w == 0.0) {
            ca[l] = c[l] + v[l] * dt;
            va[l] = v[l];
        } else {
            const double cs = std::cos(w * dt), sn = std::sin(w * dt);
            ca[l] = c[l] * cs + v[l] / w * sn;
            va[l] = -c[l] * w * sn + v[l] * cs;
        }
    }

    const Vector qt = sqrt_t_.cwiseProduct(modes_ * ca);
    const Vector pt = sqrt_t_inv_.cwiseProduct(modes_ * va);

    PhaseState out;
    out.t = s.t + dt;
    out.x = qt.segment(0, d);
    out.y = qt.segment(d, n);
    out.p = pt.segment(0, d);
    out.k = pt.segment(d, n);
    return out;
}

PhaseState evolve_normal_modes(const CompositeModel& model, const PhaseState& s, double dt) {
    return NormalModes(model).evolve(s, dt);
}

PhaseState evolve_verlet(const CompositeModel& model, const PhaseState& s, double t, double dt) {
    check_state(model, s);
    if (!(dt > 0.0)) throw std::invalid_argument("evolve_verlet: dt must be positive");
    if (t < 0.0) throw std::invalid_argument("evolve_verlet: t must be nonnegative");

    const Index star = model.star();
    Vector x = s.x, p = s.p, y = s.y, k = s.k;

    auto force_p = [&](const Vector& xx, const Vector& yy) -> Vector {
        Vector f = -model.K * xx;
        f[star] += model.bath.g.dot(yy) - model.sum_g2_over_nu * xx[star];
        return f;
    };

    const auto n_steps = static_cast<long long>(std::floor(t / dt + 1e-12));
    const double rem = t - static_cast<double>(n_steps) * dt;

    auto step = [&](double h) {
        // kick-drift-kick
        p += 0.5 * h * force_p(x, y);
        k += 0.5 * h * (-model.bath.nu.cwiseProduct(y) + x[star] * model.bath.g);
        x += h * p.cwiseQuotient(model.system.masses);
        y += h * model.bath.nu.cwiseProduct(k);
        p += 0.5 * h * force_p(x, y);
        k += 0.5 * h * (-model.bath.nu.cwiseProduct(y) + x[star] * model.bath.g);
    };

    for (long long i = 0; i < n_steps; ++i) step(dt);
    if (rem > 1e-15 * std::max(1.0, t)) step(rem);

    PhaseState out;
    out.t = s.t + t;
    out.x = std::move(x);
    out.p = std::move(p);
    out.y = std::move(y);
    out.k = std::move(k);
    return out;
}

}  // namespace oscbath
