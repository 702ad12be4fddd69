// Exact propagator exp(-i Hh t) through the spectral decomposition
// Hh = V D V^dagger, so exp(-i Hh t) = V exp(-i D t) V^dagger. This is the
// quantum-side ground truth; it is deliberately dense and capped in size.

#pragma once

#include "oscbath/model.hpp"
#include "oscbath/qstate.hpp"

namespace oscbath {

struct SpectralData {
    CMatrix V;          // unitary eigenvector matrix (columns)
    Vector eigenvalues; // ascending, in +/- pairs
};

// Throws on non-Hermitian input or dimension above dense_cap.
SpectralData spectral_decompose(const CMatrix& h, Index dense_cap = 4096);

CVector propagate(const SpectralData& sd, const CVector& psi, double t);
EncodedState propagate(const SpectralData& sd, const EncodedState& state, double t);

// Caches the decomposition of a model's Hamiltonian for repeated time queries.
class ExactPropagator {
public:
    explicit ExactPropagator(const CompositeModel& model, Index dense_cap = 4096);

    EncodedState propagate(const EncodedState& state, double t) const;
    const SpectralData& spectral_data() const { return sd_; }

private:
    SpectralData sd_;
};

}  // namespace oscbath
