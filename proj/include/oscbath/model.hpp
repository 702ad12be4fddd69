// model.hpp — composite oscillator-network model and its encoding Hamiltonian.
//
// A finite network of d primary oscillators (masses m_i, symmetric spring
// couplings kappa_ij >= 0, kappa_ii the wall coupling) is joined to N
// independent bath modes (frequencies nu_a, couplings g_a) through a single
// designated "star" mass. The classical Hamiltonian is
//
//   H = 1/2 sum_i [ p_i^2/m_i + kappa_ii x_i^2 ]
//     + 1/2 sum_{i<j} kappa_ij (x_i - x_j)^2
//     + 1/2 sum_a nu_a [ k_a^2 + (y_a - (g_a/nu_a) x_*)^2 ]
//
// and the matrices used everywhere downstream are
//
//   M_ij = delta_ij m_i             (d x d, diagonal)
//   K_ii = sum_j kappa_ij,  K_ij = -kappa_ij (i != j)   (d x d, PD required)
//   F_ab = delta_ab nu_a            (N x N, diagonal)
//   G_ia = delta_{i,*} g_a / sqrt(nu_a)                 (d x N, one row)
//
// The encoding Hamiltonian on C^D, D = 2(d+N), is the Hermitian block matrix
//
//         |   0        i R         0        0   |        R  = sqrt(K) sqrt(M)^-1
//   Hh =  | -i R^T      0        i Gm       0   |        Gm = sqrt(M)^-1 G
//         |   0       -i Gm^T      0       i F  |
//         |   0         0        -i F       0   |
//
// Off-diagonal entries are purely imaginary and the diagonal vanishes, so
// Hh = i B with B real antisymmetric and the spectrum comes in +/- pairs.

#pragma once

#include "oscbath/types.hpp"

#include <utility>
#include <vector>

namespace oscbath {

struct SystemSpec {
    Vector masses;      // m_i > 0
    Matrix kappa;       // symmetric, entrywise >= 0
    Index star_index = 0;

    Index d() const { return masses.size(); }
    void validate() const;  // throws std::invalid_argument on any violation
};

struct BathSpec {
    Vector nu;          // 0 < nu_a <= nu_max
    Vector g;           // finite couplings
    double nu_max = 0.0;

    Index N() const { return nu.size(); }
    void validate() const;
};

// Immutable after build(); safe to share read-only across threads.
// Dense storage is kept only for the d-blocks; F and G stay structured so
// diagnostics can run at N far beyond the dense-propagator range.
struct CompositeModel {
    SystemSpec system;
    BathSpec bath;

    Matrix K;                // spring matrix
    Matrix sqrt_k;           // principal square root of K
    Matrix sqrt_k_inv;       // inverse of sqrt_k (K is strictly PD)
    Vector sqrt_m;           // sqrt(m_i)
    Vector sqrt_m_inv;       // 1/sqrt(m_i)
    Matrix coupling_block;   // R = sqrt(K) sqrt(M)^-1
    Vector g_over_sqrt_nu;   // nonzero row of G
    double sum_g2_over_nu = 0.0;  // (G G^T)_{**}

    Index d() const { return system.d(); }
    Index N() const { return bath.N(); }
    Index dim() const { return 2 * (d() + N()); }  // D = 2(d+N)
    Index star() const { return system.star_index; }
};

// K_ii = sum_j kappa_ij, K_ij = -kappa_ij. Rejects asymmetric or negative
// kappa and any K that is not strictly positive-definite.
Matrix build_spring_matrix(const SystemSpec& spec);

// Principal square root of a symmetric PSD matrix. Eigenvalues in
// [-tol*||A||, 0) are clamped to zero; anything below that is an error.
Matrix principal_sqrt(const Matrix& a, double tol = 1e-10);

CompositeModel build_model(SystemSpec system, BathSpec bath);

// Dense Hh. Guarded by a dimension cap since the dense matrix is only the
// desk-scale oracle path.
CMatrix assemble_hamiltonian(const CompositeModel& model, Index dense_cap = 4096);

// Structured matvecs, O(d^2 + N) each.
// apply_b:   w = B z           (B = -i Hh, real antisymmetric)
// apply_abs: w = abs(Hh) z     (entrywise absolute values)
void apply_b(const CompositeModel& model, const Vector& z, Vector& w);
void apply_abs(const CompositeModel& model, const Vector& z, Vector& w);

// Gershgorin-style upper bound on ||abs(Hh)|| (max row sum), used as the
// power-iteration shift.
double abs_norm_upper_bound(const CompositeModel& model);

// Undirected edges of the graph of Hh (upper-triangle nonzero pattern over
// the D vertices). Entries of R below rel_tol * max|R| are treated as zero;
// exact zeros appear when K is block-diagonal.
std::vector<std::pair<Index, Index>> hamiltonian_edges(const CompositeModel& model,
                                                       double rel_tol = 1e-13);

bool graph_connected(const CompositeModel& model);

}  // namespace oscbath
