#include "oscbath/qstate.hpp"

#include "oscbath/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace oscbath {

EncodedState encode(const CompositeModel& model, const PhaseState& s) {
    const double e0 = total_energy(model, s);
    if (!(e0 > 0.0))
        throw std::invalid_argument("encode: zero-energy state, normalization undefined");

    const Index d = model.d(), n = model.N();
    const double inv = 1.0 / std::sqrt(2.0 * e0);

    Vector b3(n), b4(n);
    const double xs = s.x[model.star()];
    for (Index a = 0; a < n; ++a) {
        const double sn = std::sqrt(model.bath.nu[a]);
        b3[a] = sn * s.y[a] - model.g_over_sqrt_nu[a] * xs;
        b4[a] = sn * s.k[a];
    }

    EncodedState out;
    out.layout = BlockLayout{d, n};
    out.E0 = e0;
    out.t = s.t;
    out.amplitudes.resize(out.layout.size());
    out.amplitudes.segment(0, d) = (inv * (model.sqrt_k * s.x)).cast<Complex>();
    out.amplitudes.segment(d, d) = (inv * model.sqrt_m_inv.cwiseProduct(s.p)).cast<Complex>();
    out.amplitudes.segment(2 * d, n) = (inv * b3).cast<Complex>();
    out.amplitudes.segment(2 * d + n, n) = (inv * b4).cast<Complex>();
    return out;
}

PhaseState decode(const CompositeModel& model, const EncodedState& state, double imag_tol) {
    const Index d = model.d(), n = model.N();
    if (state.layout.d != d || state.layout.N != n ||
        state.amplitudes.size() != state.layout.size())
        throw std::invalid_argument("decode: state layout does not match the model");
    if (std::abs(state.amplitudes.norm() - 1.0) > 1e-6)
        throw std::invalid_argument("decode: state is not unit norm");

    const double residue = state.amplitudes.imag().cwiseAbs().maxCoeff();
    if (residue > imag_tol) {
        std::ostringstream os;
        os << "decode: imaginary residue " << residue << " exceeds tolerance " << imag_tol;
        throw std::runtime_error(os.str());
    }

    const double scale = std::sqrt(2.0 * state.E0);
    const Vector r = scale * state.amplitudes.real();

    PhaseState s;
    s.t = state.t;
    s.x = model.sqrt_k_inv * r.segment(0, d);
    s.p = model.sqrt_m.cwiseProduct(r.segment(d, d));
    const double xs = s.x[model.star()];
    s.y.resize(n);
    s.k.resize(n);
    for (Index a = 0; a < n; ++a) {
        const double sn = std::sqrt(model.bath.nu[a]);
        s.y[a] = (r[2 * d + a] + model.g_over_sqrt_nu[a] * xs) / sn;
        s.k[a] = r[2 * d + n + a] / sn;
    }
    return s;
}

CVector phase_align(const CVector& v) {
    Complex sum2 = 0.0;
    for (Index i = 0; i < v.size(); ++i) sum2 += v[i] * v[i];
    if (std::abs(sum2) == 0.0) return v;
    const double phi = 0.5 * std::arg(sum2);
    return v * std::exp(Complex(0.0, -phi));
}

namespace {

// Inverse-CDF categorical sampling; avoids the unspecified standard-library
// distributions for cross-platform byte determinism.
Index draw(const std::vector<double>& cdf, std::mt19937_64& rng) {
    const double u = uniform_double(rng);
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    return std::min<Index>(static_cast<Index>(it - cdf.begin()),
                           static_cast<Index>(cdf.size()) - 1);
}

std::vector<double> cumulative(const Vector& prob) {
    std::vector<double> cdf(static_cast<std::size_t>(prob.size()));
    double acc = 0.0;
    for (Index i = 0; i < prob.size(); ++i) {
        acc += prob[i];
        cdf[static_cast<std::size_t>(i)] = acc;
    }
    if (acc > 0.0)
        for (double& c : cdf) c /= acc;
    return cdf;
}

void decode_primary(const CompositeModel& model, double e0,
                    const Vector& amp, const Vector& radius, TomographyResult& out) {
    const Index d = model.d();
    const double scale = std::sqrt(2.0 * e0);
    out.x = scale * (model.sqrt_k_inv * amp.segment(0, d));
    out.p = scale * model.sqrt_m.cwiseProduct(amp.segment(d, d));
    // Radii propagate through the row-wise absolute transforms.
    out.x_radius = scale * (model.sqrt_k_inv.cwiseAbs() * radius.segment(0, d));
    out.p_radius = scale * model.sqrt_m.cwiseProduct(radius.segment(d, d));
}

}  // namespace

TomographyResult tomography_sample(const CompositeModel& model, const EncodedState& state,
                                   std::uint64_t shots, std::uint64_t seed) {
    if (shots < 1) throw std::invalid_argument("tomography: shots must be at least 1");
    const Index d = model.d();
    const Index D = state.layout.size();
    const CVector& psi = state.amplitudes;

    std::mt19937_64 rng(seed);

    // Magnitudes from computational-basis counts over all D outcomes.
    const Vector prob = psi.cwiseAbs2();
    const auto cdf = cumulative(prob);
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(D), 0);
    for (std::uint64_t s = 0; s < shots; ++s) ++counts[static_cast<std::size_t>(draw(cdf, rng))];

    const double inv_shots = 1.0 / static_cast<double>(shots);
    Vector mag(2 * d), rad(2 * d);
    for (Index j = 0; j < 2 * d; ++j) {
        const double ph = static_cast<double>(counts[static_cast<std::size_t>(j)]) * inv_shots;
        mag[j] = std::sqrt(ph);
        // Delta-method binomial radius with a floor where the estimate sits at 0 or 1.
        const double floor_sd = 0.5 * std::sqrt(inv_shots);
        double sd = floor_sd;
        if (mag[j] > 0.0) sd = std::max(std::sqrt(ph * (1.0 - ph) * inv_shots) / (2.0 * mag[j]), floor_sd);
        rad[j] = 1.96 * sd;
    }

    // Sign reference: largest estimated primary magnitude at or above
    // 1/sqrt(D); below that sign recovery is ill-conditioned and the
    // next-largest candidates are tried in order.
    std::vector<Index> order(static_cast<std::size_t>(2 * d));
    std::iota(order.begin(), order.end(), Index{0});
    std::sort(order.begin(), order.end(), [&](Index a, Index b) { return mag[a] > mag[b]; });
    const double threshold = 1.0 / std::sqrt(static_cast<double>(D));
    Index ref = order.front();
    for (Index cand : order) {
        if (mag[cand] >= threshold) {
            ref = cand;
            break;
        }
    }

    // Relative signs against the reference from (e_ref +/- e_b)/sqrt(2)
    // two-outcome measurements; the reference is taken positive.
    Vector sign = Vector::Ones(2 * d);
    for (Index b = 0; b < 2 * d; ++b) {
        if (b == ref) continue;
        const double p_plus = 0.5 * std::norm(psi[ref] + psi[b]);
        const double p_minus = 0.5 * std::norm(psi[ref] - psi[b]);
        const double p_rest = std::max(0.0, 1.0 - p_plus - p_minus);
        Vector three(3);
        three << p_plus, p_minus, p_rest;
        const auto cdf3 = cumulative(three);
        std::int64_t balance = 0;
        for (std::uint64_t s = 0; s < shots; ++s) {
            const Index o = draw(cdf3, rng);
            if (o == 0) ++balance;
            else if (o == 1) --balance;
        }
        sign[b] = balance >= 0 ? 1.0 : -1.0;
    }

    TomographyResult out;
    out.shots = shots;
    out.reference_index = ref;
    out.amplitude = sign.cwiseProduct(mag);
    out.amplitude_radius = rad;
    decode_primary(model, state.E0, out.amplitude, out.amplitude_radius, out);
    return out;
}

TomographyResult tomography_direct(const CompositeModel& model, const EncodedState& state) {
    const Index d = model.d();
    const CVector aligned = phase_align(state.amplitudes);

    TomographyResult out;
    out.shots = 0;
    out.amplitude = aligned.segment(0, 2 * d).real();
    out.amplitude_radius = Vector::Zero(2 * d);
    out.reference_index = 0;
    decode_primary(model, state.E0, out.amplitude, out.amplitude_radius, out);
    return out;
}

}  // namespace oscbath
