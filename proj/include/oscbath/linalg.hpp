// Iterative eigenvalue kernels for operators given as matrix-vector closures.

#pragma once

#include "oscbath/types.hpp"

#include <functional>

namespace oscbath {

using ApplyFn = std::function<void(const Vector&, Vector&)>;

struct PowerIterationResult {
    double eigenvalue = 0.0;
    Vector vector;
    Index iterations = 0;
    double residual = 0.0;
    bool converged = false;
};

// Largest eigenvalue and eigenvector of a symmetric entrywise-nonnegative
// operator by shifted power iteration. The shift (A + shift*I) makes the
// top of the spectrum strictly dominant for any shift > 0. Starts from the
// uniform positive vector, so for irreducible A it converges to the Perron
// pair. Residual is ||A v - lambda v||_2 relative to lambda.
PowerIterationResult power_iteration_nonnegative(Index dim, const ApplyFn& apply,
                                                 double shift, double tol = 1e-12,
                                                 Index max_iterations = 1000000);

// Largest eigenvalue of a symmetric PSD operator by Lanczos with full
// reorthogonalization. Used where the spectral gap is too small for plain
// power iteration (flat bath spectra).
double lanczos_max_eigenvalue(Index dim, const ApplyFn& apply, Index max_steps = 400,
                              double tol = 1e-13);

}  // namespace oscbath
