#include "oscbath/linalg.hpp"

#include "oscbath/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace oscbath {

PowerIterationResult power_iteration_nonnegative(Index dim, const ApplyFn& apply,
                                                 double shift, double tol,
                                                 Index max_iterations) {
    if (dim < 1) throw std::invalid_argument("power iteration: empty operator");
    if (shift <= 0.0) shift = 1.0;

    PowerIterationResult out;
    Vector v = Vector::Constant(dim, 1.0 / std::sqrt(static_cast<double>(dim)));
    Vector av(dim);
    for (Index it = 1; it <= max_iterations; ++it) {
        apply(v, av);
        const double lambda = v.dot(av);
        const double resid = (av - lambda * v).norm();
        out.eigenvalue = lambda;
        out.iterations = it;
        out.residual = resid / std::max(std::abs(lambda), 1e-300);
        if (out.residual <= tol) {
            out.converged = true;
            out.vector = v;
            return out;
        }
        av += shift * v;  // step with A + shift I so the Perron value dominates
        const double n = av.norm();
        if (n == 0.0) throw std::runtime_error("power iteration: zero iterate");
        v = av / n;
    }
    out.vector = v;
    return out;
}

double lanczos_max_eigenvalue(Index dim, const ApplyFn& apply, Index max_steps, double tol) {
    if (dim < 1) throw std::invalid_argument("lanczos: empty operator");
    max_steps = std::min(max_steps, dim);

    // Deterministic non-uniform start so structured eigenvectors are not
    // accidentally orthogonal to it.
    std::mt19937_64 rng(0x9e3779b9ULL);
    Vector v(dim);
    for (Index i = 0; i < dim; ++i) v[i] = uniform_double(rng) - 0.5;
    v.normalize();

    std::vector<Vector> basis;
    basis.reserve(static_cast<std::size_t>(max_steps));
    std::vector<double> alpha, beta;  // tridiagonal coefficients
    Vector w(dim);
    double best = 0.0, prev = std::numeric_limits<double>::lowest();

    for (Index m = 0; m < max_steps; ++m) {
        basis.push_back(v);
        apply(v, w);
        const double a = v.dot(w);
        alpha.push_back(a);
        w -= a * v;
        if (m > 0) w -= beta.back() * basis[static_cast<std::size_t>(m - 1)];
        // full reorthogonalization
        for (const Vector& b : basis) w -= b.dot(w) * b;

        const Index k = static_cast<Index>(alpha.size());
        Matrix tri = Matrix::Zero(k, k);
        for (Index i = 0; i < k; ++i) {
            tri(i, i) = alpha[static_cast<std::size_t>(i)];
            if (i + 1 < k) tri(i, i + 1) = tri(i + 1, i) = beta[static_cast<std::size_t>(i)];
        }
        Eigen::SelfAdjointEigenSolver<Matrix> es(tri);
        best = es.eigenvalues().maxCoeff();

        const double b = w.norm();
        if (b < 1e-14 * std::max(1.0, std::abs(best))) break;  // invariant subspace
        if (m >= 8 && std::abs(best - prev) <= tol * std::max(std::abs(best), 1e-300)) break;
        prev = best;
        beta.push_back(b);
        v = w / b;
    }
    return best;
}

}  // namespace oscbath
