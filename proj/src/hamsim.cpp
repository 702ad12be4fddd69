#include "oscbath/hamsim.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace oscbath {

SpectralData spectral_decompose(const CMatrix& h, Index dense_cap) {
    if (h.rows() != h.cols()) throw std::invalid_argument("spectral_decompose: square matrix required");
    if (h.rows() > dense_cap) {
        std::ostringstream os;
        os << "spectral_decompose: dimension " << h.rows() << " exceeds dense cap " << dense_cap;
        throw std::invalid_argument(os.str());
    }
    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw std::invalid_argument("spectral_decompose: matrix is not Hermitian");

    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("spectral_decompose: eigensolver failed");

    SpectralData sd;
    sd.V = es.eigenvectors();
    sd.eigenvalues = es.eigenvalues();
    return sd;
}

CVector propagate(const SpectralData& sd, const CVector& psi, double t) {
    if (psi.size() != sd.V.rows())
        throw std::invalid_argument("propagate: dimension mismatch");
    CVector coeffs = sd.V.adjoint() * psi;
    for (Index l = 0; l < coeffs.size(); ++l)
        coeffs[l] *= std::exp(Complex(0.0, -sd.eigenvalues[l] * t));
    return sd.V * coeffs;
}

EncodedState propagate(const SpectralData& sd, const EncodedState& state, double t) {
    EncodedState out = state;
    out.amplitudes = propagate(sd, state.amplitudes, t);
    out.t = state.t + t;
    return out;
}

ExactPropagator::ExactPropagator(const CompositeModel& model, Index dense_cap)
    : sd_(spectral_decompose(assemble_hamiltonian(model, dense_cap), dense_cap)) {}

EncodedState ExactPropagator::propagate(const EncodedState& state, double t) const {
    return oscbath::propagate(sd_, state, t);
}

}  // namespace oscbath
