#include "oscbath/qwalk.hpp"

#include "oscbath/diagnostics.hpp"
#include "test_util.hpp"

#include "doctest.h"

using namespace oscbath;

namespace {

CMatrix pauli_like() {
    CMatrix h(2, 2);
    h << Complex(0, 0), Complex(0, 1), Complex(0, -1), Complex(0, 0);
    return h;
}

CompositeModel near_decoupled_unit(double g = 1e-3) {
    SystemSpec sys;
    sys.masses = Vector::Ones(1);
    sys.kappa = Matrix::Ones(1, 1);
    BathSpec bath;
    bath.nu = Vector::Ones(1);
    bath.g = Vector::Constant(1, g);
    bath.nu_max = 1.0;
    return build_model(sys, bath);
}

CompositeModel chain_model(Index d, Index n, double coupling = 0.4) {
    SystemSpec sys;
    sys.masses = Vector::Ones(d);
    sys.kappa = Matrix::Zero(d, d);
    for (Index i = 0; i < d; ++i) {
        sys.kappa(i, i) = 1.0;
        for (Index j = i + 1; j < d; ++j) sys.kappa(i, j) = sys.kappa(j, i) = 0.5;
    }
    SpectralModel sm;
    sm.kind = SpectralKind::uniform_flat;
    sm.nu_max = 1.0;
    sm.coupling_scale = coupling;
    return build_model(sys, generate(sm, n));
}

}  // namespace

TEST_SUITE_BEGIN("qwalk");

TEST_CASE("Perron pair of a symmetric 2x2") {
    CMatrix h(2, 2);
    h << 0.0, 1.0, 1.0, 0.0;
    const PerronPair pp = abs_principal_eigenvector(h);
    CHECK(std::abs(pp.hnorm - 1.0) <= 1e-10);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(pp.v[0] - inv_sqrt2) <= 1e-8);
    CHECK(std::abs(pp.v[1] - inv_sqrt2) <= 1e-8);
}

TEST_CASE("tree graphs: ||abs(Hh)|| equals ||Hh||") {
    std::mt19937_64 rng(211);
    for (int trial = 0; trial < 3; ++trial) {
        const CompositeModel m = testutil::random_model(rng, 1, 2 + trial);
        const PerronPair pp = abs_principal_eigenvector(m);
        const double norm = spectral_norm(m);
        CHECK(std::abs(pp.hnorm - norm) <= 1e-9 * norm);
        CHECK(pp.v.minCoeff() > 0.0);
        CHECK(pp.residual <= 1e-10);
    }
}

TEST_CASE("dense primary block: ||abs(Hh)|| within the arboricity bound") {
    const CompositeModel m = chain_model(3, 2);
    const PerronPair pp = abs_principal_eigenvector(m);
    const double norm = spectral_norm(m);
    const auto b = static_cast<double>(arboricity_bound(m));
    CHECK(pp.hnorm >= norm * (1.0 - 1e-9));
    CHECK(pp.hnorm <= 2.0 * b * norm * (1.0 + 1e-9));
}

TEST_CASE("disconnected graphs are rejected") {
    CHECK_THROWS_AS(abs_principal_eigenvector(near_decoupled_unit(0.0)),
                    std::invalid_argument);
    CMatrix blockdiag = CMatrix::Zero(4, 4);
    blockdiag.block(0, 0, 2, 2) = pauli_like();
    blockdiag.block(2, 2, 2, 2) = pauli_like();
    CHECK_THROWS_AS(abs_principal_eigenvector(blockdiag), std::invalid_argument);
}

TEST_CASE("isometry for the 2x2 case") {
    const CMatrix h = pauli_like();
    const PerronPair pp = abs_principal_eigenvector(h);
    const CMatrix t = build_isometry(h, pp.hnorm, pp.v);
    REQUIRE(t.rows() == 4);
    REQUIRE(t.cols() == 2);
    // Column 0 lives on |01>, column 1 on |10>, both with unit magnitude.
    CHECK(std::abs(std::abs(t(1, 0)) - 1.0) <= 1e-10);
    CHECK(std::abs(std::abs(t(2, 1)) - 1.0) <= 1e-10);
    CHECK(std::abs(t(0, 0)) + std::abs(t(2, 0)) + std::abs(t(3, 0)) <= 1e-12);
    CHECK(std::abs(t(0, 1)) + std::abs(t(1, 1)) + std::abs(t(3, 1)) <= 1e-12);
    const CMatrix gram = t.adjoint() * t;
    CHECK((gram - CMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("isometry and discriminant identities") {
    std::mt19937_64 rng(223);
    for (int trial = 0; trial < 3; ++trial) {
        const CompositeModel m = trial == 0 ? near_decoupled_unit()
                                            : testutil::random_model(rng, 1 + trial, 2);
        const WalkSpace ws = build_walk_space(m);
        const CMatrix h = assemble_hamiltonian(m);
        const Index D = ws.D;

        const CMatrix gram = ws.T.adjoint() * ws.T;
        CHECK((gram - CMatrix::Identity(D, D)).cwiseAbs().maxCoeff() <= 1e-10);

        CMatrix st(D * D, D);
        for (Index i = 0; i < D * D; ++i) st.row(i) = ws.T.row(swap_index(i, D));
        const CMatrix disc = ws.T.adjoint() * st;
        CHECK((disc - h.transpose() / ws.hnorm).cwiseAbs().maxCoeff() <= 1e-10);

        const CMatrix wtw = ws.W.adjoint() * ws.W;
        CHECK((wtw - CMatrix::Identity(D * D, D * D)).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("walk spectrum for the unit 2x2 Hamiltonian") {
    // gamma = +-1 exactly: the pair subspaces collapse and the walk carries
    // eigenvalues {1, -1} there, with {-1, -1} on |00>, |11>.
    const CMatrix h = pauli_like();
    const PerronPair pp = abs_principal_eigenvector(h);
    const CMatrix t = build_isometry(h, pp.hnorm, pp.v);
    const CMatrix w = walk_operator(t);
    Eigen::ComplexEigenSolver<CMatrix> es(w);
    std::vector<double> real_parts;
    for (Index i = 0; i < 4; ++i) {
        CHECK(std::abs(es.eigenvalues()[i].imag()) <= 1e-12);
        real_parts.push_back(es.eigenvalues()[i].real());
    }
    std::sort(real_parts.begin(), real_parts.end());
    CHECK(std::abs(real_parts[0] + 1.0) <= 1e-12);
    CHECK(std::abs(real_parts[1] + 1.0) <= 1e-12);
    CHECK(std::abs(real_parts[2] + 1.0) <= 1e-12);
    CHECK(std::abs(real_parts[3] - 1.0) <= 1e-12);
}

TEST_CASE("walk eigenphases follow +-arccos(gamma)") {
    std::mt19937_64 rng(227);
    for (int trial = 0; trial < 3; ++trial) {
        const CompositeModel m =
            trial == 0 ? chain_model(2, 1) : testutil::random_model(rng, 1 + trial % 2, 2);
        const WalkSpace ws = build_walk_space(m);
        const testutil::WalkPhaseCheck check = testutil::check_walk_phases(ws);
        CHECK(check.max_mismatch <= 1e-8);
    }
}

TEST_CASE("dimension count: walk subspace plus trivial complement") {
    const CompositeModel m = chain_model(2, 1);
    const WalkSpace ws = build_walk_space(m);
    const Index D = ws.D;

    const testutil::WalkPhaseCheck check = testutil::check_walk_phases(ws);
    REQUIRE(check.collapsed == 0);  // model chosen with a strict gap
    for (double g : check.gammas) CHECK(std::abs(g) < 0.999);

    Eigen::ComplexEigenSolver<CMatrix> es(ws.W);
    Index nontrivial = 0;
    for (Index i = 0; i < D * D; ++i) {
        const Complex lam = es.eigenvalues()[i];
        const double dist = std::min(std::abs(lam - 1.0), std::abs(lam + 1.0));
        if (dist > 1e-3) {
            ++nontrivial;
        } else {
            CHECK(dist <= 1e-8);  // complement carries exact +-1 phases
        }
    }
    CHECK(nontrivial == 2 * D);
}

TEST_CASE("qpe peaks at exact bins") {
    CMatrix w = CMatrix::Zero(2, 2);
    w(0, 0) = 1.0;
    w(1, 1) = std::polar(1.0, std::numbers::pi / 2.0);  // theta = 2 pi / 4

    CVector e0 = CVector::Zero(2);
    e0[0] = 1.0;
    const CVector j0 = qpe(w, e0, 2);
    CHECK(std::abs(std::abs(j0[0]) - 1.0) <= 1e-12);  // bin 0, walk index 0

    CVector e1 = CVector::Zero(2);
    e1[1] = 1.0;
    const CVector j1 = qpe(w, e1, 2);
    CHECK(std::abs(std::abs(j1[1 * 2 + 1]) - 1.0) <= 1e-12);  // bin 1, walk index 1
}

TEST_CASE("qpe between bins reproduces the analytic kernel") {
    const int p = 4;
    const Index bins = Index{1} << p;
    const double theta = 2.0 * std::numbers::pi * 3.3 / static_cast<double>(bins);
    CMatrix w = CMatrix::Constant(1, 1, std::polar(1.0, theta));
    CVector e = CVector::Ones(1);
    const CVector joint = qpe(w, e, p);

    double total_variation = 0.0;
    for (Index phi = 0; phi < bins; ++phi) {
        const double delta = theta - 2.0 * std::numbers::pi * static_cast<double>(phi) /
                                          static_cast<double>(bins);
        double analytic;
        if (std::abs(std::sin(0.5 * delta)) < 1e-15) {
            analytic = 1.0;
        } else {
            const double num = std::sin(0.5 * static_cast<double>(bins) * delta);
            const double den =
                static_cast<double>(bins) * std::sin(0.5 * delta);
            analytic = (num * num) / (den * den);
        }
        total_variation += std::abs(std::norm(joint[phi]) - analytic);
    }
    CHECK(0.5 * total_variation <= 1e-8);
}

TEST_CASE("qpe is unitary") {
    std::mt19937_64 rng(229);
    const CompositeModel m = near_decoupled_unit();
    const WalkSpace ws = build_walk_space(m);
    const QpeOperator q(ws.W, 3, std::uint64_t{1} << 22);
    CVector joint(q.joint_dim());
    for (Index i = 0; i < joint.size(); ++i)
        joint[i] = Complex(uniform_double(rng) - 0.5, uniform_double(rng) - 0.5);
    joint /= joint.norm();
    CVector original = joint;
    q.apply(joint);
    CHECK(std::abs(joint.norm() - 1.0) <= 1e-12);
    q.apply_inverse(joint);
    CHECK((joint - original).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("phase oracle bins") {
    const int p = 4;
    const Index walk_dim = 2;
    const Index bins = Index{1} << p;

    CVector joint = CVector::Ones(walk_dim * bins);
    CVector copy = joint;
    phase_oracle(joint, walk_dim, p, 0.0, 1.0);
    CHECK((joint - copy).cwiseAbs().maxCoeff() == 0.0);  // t = 0 is the identity

    // Bin 0 encodes s~ = pi/2 (sin = 1): factor exp(-i t Hnorm).
    joint = CVector::Ones(walk_dim * bins);
    phase_oracle(joint, walk_dim, p, 1.0, 1.0);
    CHECK(std::abs(joint[0] - std::exp(Complex(0.0, -1.0))) <= 1e-14);
    // Bin 2^p/4 encodes s~ = 0 (sin = 0): factor 1.
    CHECK(std::abs(joint[(bins / 4) * walk_dim] - Complex(1.0, 0.0)) <= 1e-14);
}

TEST_CASE("simulate: quarter period of the near-decoupled oscillator") {
    const CompositeModel m = near_decoupled_unit();
    const WalkSimulator sim(m);
    const PhaseState s0 = initial_state(m, Vector::Ones(1), Vector::Zero(1));
    const EncodedState psi0 = encode(m, s0);

    PhaseConfig cfg;
    cfg.phase_bits = 8;
    WalkRunReport rep;
    EncodedState out = sim.simulate(psi0, std::numbers::pi / 2.0, cfg, &rep);
    out.amplitudes = phase_align(out.amplitudes);
    const PhaseState s = decode(m, out, 1e100);
    CHECK(std::abs(s.x[0] - 0.0) <= 2e-2);
    CHECK(std::abs(s.p[0] + 1.0) <= 2e-2);
    CHECK(rep.fidelity >= 0.999);
}

TEST_CASE("simulate: error decreases with phase bits") {
    const CompositeModel m = chain_model(1, 3);
    const WalkSimulator sim(m);
    const PhaseState s0 = initial_state(m, Vector::Ones(1), Vector::Zero(1));
    const EncodedState psi0 = encode(m, s0);

    double prev = 1e100;
    for (int p : {4, 6, 8, 10}) {
        PhaseConfig cfg;
        cfg.phase_bits = p;
        WalkRunReport rep;
        sim.simulate(psi0, std::numbers::pi / 2.0, cfg, &rep);
        CHECK(rep.traj_error < prev);
        prev = rep.traj_error;
    }
    CHECK(prev <= 2e-2);
}

TEST_CASE("simulate: t = 0 is the identity") {
    const CompositeModel m = near_decoupled_unit();
    const WalkSimulator sim(m);
    const EncodedState psi0 = encode(m, initial_state(m, Vector::Ones(1), Vector::Zero(1)));
    WalkRunReport rep;
    const EncodedState out = sim.simulate(psi0, 0.0, PhaseConfig{}, &rep);
    CHECK((out.amplitudes - psi0.amplitudes).cwiseAbs().maxCoeff() == 0.0);
    CHECK(rep.fidelity >= 1.0 - 1e-10);
}

TEST_CASE("resource cap aborts oversized runs") {
    const CompositeModel m = near_decoupled_unit();
    const WalkSimulator sim(m);
    const EncodedState psi0 = encode(m, initial_state(m, Vector::Ones(1), Vector::Zero(1)));
    PhaseConfig cfg;
    cfg.phase_bits = 10;
    cfg.resource_cap = 1024;  // D^2 * 2^10 = 16384 over the cap
    CHECK_THROWS_AS(sim.simulate(psi0, 1.0, cfg, nullptr), std::invalid_argument);
}

TEST_CASE("resource formula scalings") {
    const CompositeModel m1 = chain_model(1, 2);
    const ResourceEstimate base = resource_estimate(m1, 1.0, 0.01);
    const ResourceEstimate twice = resource_estimate(m1, 2.0, 0.01);
    CHECK(twice.formula_queries == doctest::Approx(2.0 * base.formula_queries).epsilon(1e-12));
    const ResourceEstimate finer = resource_estimate(m1, 1.0, 0.0025);
    CHECK(finer.formula_repetitions ==
          doctest::Approx(2.0 * base.formula_repetitions).epsilon(1e-12));

    const CompositeModel m3 = chain_model(3, 2);
    const ResourceEstimate est3 = resource_estimate(m3, 1.0, 0.01);
    const double per_rep_1 = base.formula_queries / base.formula_repetitions;
    const double per_rep_3 = est3.formula_queries / est3.formula_repetitions;
    CHECK(per_rep_1 == doctest::Approx(static_cast<double>(base.arboricity_bound)));
    CHECK(per_rep_3 == doctest::Approx(static_cast<double>(est3.arboricity_bound)));
    CHECK(per_rep_3 / per_rep_1 ==
          doctest::Approx(static_cast<double>(est3.arboricity_bound) /
                          static_cast<double>(base.arboricity_bound)));
}

TEST_SUITE_END();
