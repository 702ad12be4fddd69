#include "oscbath/bath.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace oscbath {

void SpectralModel::validate() const {
    if (!(nu_max > 0.0) || !std::isfinite(nu_max))
        throw std::invalid_argument("spectral model: nu_max must be positive");
    if (!(coupling_scale > 0.0) || !std::isfinite(coupling_scale))
        throw std::invalid_argument("spectral model: coupling scale must be positive");
    if (kind == SpectralKind::band_limited) {
        if (!(band_lo > 0.0) || !(band_lo < band_hi) || !(band_hi <= nu_max))
            throw std::invalid_argument(
                "spectral model: band must satisfy 0 < lo < hi <= nu_max");
    }
    if (kind == SpectralKind::explicit_list) {
        if (frequencies.size() < 1 || frequencies.size() != couplings.size())
            throw std::invalid_argument(
                "spectral model: explicit list needs matching frequency/coupling arrays");
    }
}

BathSpec generate(const SpectralModel& model, Index N) {
    model.validate();
    if (N < 1) throw std::invalid_argument("bath: N must be at least 1");

    BathSpec out;
    out.nu_max = model.nu_max;
    switch (model.kind) {
        case SpectralKind::uniform_flat: {
            out.nu.resize(N);
            // Start at nu_max/N, not zero: zero-frequency modes are invalid.
            for (Index a = 0; a < N; ++a)
                out.nu[a] = static_cast<double>(a + 1) * model.nu_max / static_cast<double>(N);
            out.g = Vector::Constant(N, model.coupling_scale / std::sqrt(static_cast<double>(N)));
            break;
        }
        case SpectralKind::band_limited: {
            out.nu.resize(N);
            if (N == 1) {
                out.nu[0] = 0.5 * (model.band_lo + model.band_hi);
            } else {
                const double step = (model.band_hi - model.band_lo) / static_cast<double>(N - 1);
                for (Index a = 0; a < N; ++a)
                    out.nu[a] = model.band_lo + static_cast<double>(a) * step;
            }
            out.g = Vector::Constant(N, model.coupling_scale / std::sqrt(static_cast<double>(N)));
            break;
        }
        case SpectralKind::explicit_list: {
            if (N != model.frequencies.size())
                throw std::invalid_argument("bath: N does not match the explicit list length");
            out.nu = model.frequencies;
            out.g = model.couplings;
            if (out.nu.size() > 0 && out.nu.maxCoeff() > out.nu_max) out.nu_max = out.nu.maxCoeff();
            break;
        }
    }
    out.validate();
    return out;
}

BathSpec bath_from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("bath csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("bath csv: missing header line");
    std::vector<double> nu, g;
    Index lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string a, b;
        if (!std::getline(ls, a, ',') || !std::getline(ls, b)) {
            std::ostringstream os;
            os << "bath csv: line " << lineno << " is not 'nu,g'";
            throw std::invalid_argument(os.str());
        }
        try {
            nu.push_back(std::stod(a));
            g.push_back(std::stod(b));
        } catch (const std::exception&) {
            std::ostringstream os;
            os << "bath csv: line " << lineno << " has a malformed number";
            throw std::invalid_argument(os.str());
        }
    }
    if (nu.empty()) throw std::invalid_argument("bath csv: no data rows");

    BathSpec out;
    out.nu = Eigen::Map<Vector>(nu.data(), static_cast<Index>(nu.size()));
    out.g = Eigen::Map<Vector>(g.data(), static_cast<Index>(g.size()));
    out.nu_max = out.nu.maxCoeff();
    out.validate();
    return out;
}

}  // namespace oscbath
