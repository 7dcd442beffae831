#include <gtest/gtest.h>

#include <random>

#include <Eigen/Eigenvalues>

#include "modrabi/dynamics.hpp"
#include "modrabi/errors.hpp"
#include "oracles.hpp"

using namespace modrabi;
using namespace modrabi::dynamics;
using namespace modrabi::modulation;
using hamiltonians::FramePhases;
using hamiltonians::ModelKind;
using quantum::PauliKind;
using quantum::QubitLevel;

namespace {

const SystemParams kSys = SystemParams::circuit_qed_reference();

PureState product(const HilbertSpace& s, QubitLevel q, int n) {
  const QubitLevel lv[] = {q};
  return PureState::product(s, lv, n);
}

IntegratorConfig adaptive(double rtol = 1e-10, double atol = 1e-12) {
  IntegratorConfig cfg;
  cfg.method = Method::AdaptiveRK45;
  cfg.rtol = rtol;
  cfg.atol = atol;
  return cfg;
}

// exp(𝓛t) vec(ρ) for the Liouvillian of H and jumps, column-stacked,
// assembled directly from the Lindblad form.
Matrix liouvillian_oracle(const Matrix& h, const std::vector<std::pair<Matrix, double>>& jumps) {
  const Eigen::Index n = h.rows();
  const Matrix id = Matrix::Identity(n, n);
  // vec(AρB) = (Bᵀ ⊗ A) vec(ρ) with column stacking.
  auto sandwich = [&](const Matrix& a, const Matrix& b) { return oracle::kron(b.transpose(), a); };
  Matrix l = -kI * (sandwich(h, id) - sandwich(id, h));
  for (const auto& [op, rate] : jumps) {
    const Matrix ld = op.adjoint() * op;
    l += rate * (sandwich(op, op.adjoint()) - 0.5 * sandwich(ld, id) - 0.5 * sandwich(id, ld));
  }
  return l;
}

Matrix evolve_liouvillian(const Matrix& l, const Matrix& rho0, double t) {
  Eigen::ComplexEigenSolver<Matrix> es(l);
  const Matrix v = es.eigenvectors();
  Vector e(l.rows());
  for (Eigen::Index k = 0; k < l.rows(); ++k) e(k) = std::exp(es.eigenvalues()(k) * t);
  const Vector vec = Eigen::Map<const Vector>(rho0.data(), rho0.size());
  const Vector out = v * e.asDiagonal() * v.partialPivLu().solve(vec);
  return Eigen::Map<const Matrix>(out.data(), rho0.rows(), rho0.cols());
}

}  // namespace

TEST(Grid, Validation) {
  EXPECT_THROW((TimeGrid{0, 1, 1}.validate()), ValidationError);
  EXPECT_THROW((TimeGrid{0, 0, 5}.validate()), ValidationError);
  const auto t = TimeGrid{0, 1, 5}.times();
  ASSERT_EQ(t.size(), 5u);
  EXPECT_EQ(t.back(), 1.0);
  IntegratorConfig cfg;
  cfg.rtol = 0;
  EXPECT_THROW(cfg.validate(), ValidationError);
}

TEST(Schrodinger, ZeroHamiltonianIsIdentity) {
  HilbertSpace s(1, 4);
  const auto h = TimeDependentHamiltonian::constant(Operator::zero(s));
  Vector v = Vector::Random(8).normalized();
  const PureState psi(s, v);
  IntegratorConfig cfg;
  cfg.dt = 1e-3;
  cfg.store_states = true;
  const auto tr = evolve_schrodinger(h, psi, {0, 1, 3}, cfg);
  EXPECT_LT((tr.pure_state(2).amplitudes() - v).norm(), 1e-15);
}

TEST(Schrodinger, ConstantHamiltonianMatchesExponential) {
  HilbertSpace s(1, 6);
  EffectiveParams eff;
  eff.omega_eff = mhz(12);
  eff.epsilon_eff = mhz(-3);
  eff.g_r = mhz(6);
  eff.g_cr = mhz(4);
  eff.phi2 = 0.3;
  const auto h = hamiltonians::effective_hamiltonian(eff, s);
  const auto psi0 = product(s, QubitLevel::Ground, 0);
  const double t_end = 200e-9;
  const Matrix u = oracle::unitary_propagator(h.evaluate(0).matrix(), t_end);
  IntegratorConfig fine;
  fine.points_per_period = 200;
  for (auto cfg : {adaptive(1e-11, 1e-13), fine}) {
    cfg.store_states = true;
    const auto tr = evolve_schrodinger(h, psi0, {0, t_end, 11}, cfg);
    EXPECT_LT((tr.pure_state(10).amplitudes() - u * psi0.amplitudes()).norm(), 1e-8) << to_string(cfg.method);
    EXPECT_LT(tr.diagnostics.max_norm_drift, 1e-8);
  }
}

TEST(Schrodinger, ResonantJaynesCummingsTransfer) {
  HilbertSpace s(1, 5);
  EffectiveParams eff;
  eff.omega_eff = eff.epsilon_eff = mhz(17.5);
  eff.g_r = mhz(-19.9);
  const auto h = hamiltonians::model(ModelKind::JC, eff, s);
  const double t = std::numbers::pi / (2 * std::abs(eff.g_r));
  const auto tr = evolve_schrodinger(h, product(s, QubitLevel::Excited, 0), {0, t, 2}, adaptive());
  EXPECT_NEAR(tr.observable("sigma_pop").back(), 0.0, 1e-8);
  EXPECT_NEAR(tr.observable("photon_number").back(), 1.0, 1e-8);
}

TEST(Schrodinger, TrajectoryShapeAndDecimation) {
  HilbertSpace s(1, 4);
  EffectiveParams eff;
  eff.omega_eff = mhz(10);
  eff.g_r = eff.g_cr = mhz(2);
  IntegratorConfig cfg = adaptive();
  cfg.store_every = 3;
  cfg.store_states = true;
  const auto tr = evolve_schrodinger(hamiltonians::effective_hamiltonian(eff, s), product(s, QubitLevel::Ground, 0),
                                     {0, 50e-9, 11}, cfg);
  ASSERT_EQ(tr.times.size(), 5u);  // samples 0, 3, 6, 9 and the last
  EXPECT_EQ(tr.times.back(), 50e-9);
  EXPECT_TRUE(std::is_sorted(tr.times.begin(), tr.times.end()));
  EXPECT_EQ(tr.states.size(), tr.times.size());
  for (const auto& [name, series] : tr.observables) EXPECT_EQ(series.size(), tr.times.size()) << name;
}

TEST(Schrodinger, AntiJaynesCummingsExcitationsMatch) {
  HilbertSpace s(1, 20);
  EffectiveParams eff;
  eff.omega_eff = eff.epsilon_eff = mhz(17.5);
  eff.g_cr = mhz(-19.9);
  const auto tr = evolve_schrodinger(hamiltonians::model(ModelKind::AJC, eff, s), product(s, QubitLevel::Ground, 0),
                                     {0, 100e-9, 401}, adaptive(1e-12, 1e-14));
  const auto& n = tr.observable("photon_number");
  const auto& q = tr.observable("sigma_pop");
  double worst = 0.0;
  for (std::size_t i = 0; i < n.size(); ++i) worst = std::max(worst, std::abs(n[i] - q[i]));
  EXPECT_LT(worst, 1e-8);
  EXPECT_GT(*std::max_element(q.begin(), q.end()), 0.1);
}

TEST(Schrodinger, FixedStepConvergesAtFourthOrder) {
  HilbertSpace s(1, 8);
  const DriveParams drive{ghz(3.2), ghz(7.558), 2.296 / 3.2, 5.422 / 7.558, 0, 0};
  const auto h = hamiltonians::rotated_hamiltonian(kSys, drive, s);
  const Matrix psi0 = product(s, QubitLevel::Ground, 0).amplitudes();
  const double t_end = 1e-9;
  IntegratorConfig ref = adaptive(1e-13, 1e-15);
  const Matrix exact = propagate_columns(h, psi0, 0, t_end, ref);
  std::vector<double> errors;
  for (int ppp : {20, 40, 80, 160}) {
    IntegratorConfig cfg;
    cfg.points_per_period = ppp;
    errors.push_back((propagate_columns(h, psi0, 0, t_end, cfg) - exact).norm());
  }
  for (std::size_t i = 1; i < errors.size(); ++i) {
    const double ratio = errors[i - 1] / errors[i];
    EXPECT_GT(ratio, 10.0) << i;
    EXPECT_LT(ratio, 24.0) << i;
  }
}

TEST(Master, PureDecayLaws) {
  HilbertSpace s(1, 4);
  const auto h = TimeDependentHamiltonian::constant(Operator::zero(s));
  const double gamma = 2e6, kappa = 5e6;
  IntegratorConfig cfg;
  cfg.dt = 1e-10;
  {
    const auto rho0 = DensityMatrix::pure(product(s, QubitLevel::Ground, 1));
    const auto tr = evolve_master(h, standard_dissipators(s, 0.0, gamma), rho0, {0, 2e-6, 21}, cfg);
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
      EXPECT_NEAR(tr.observable("photon_number")[i], std::exp(-gamma * tr.times[i]), 1e-6);
    }
    EXPECT_LT(tr.diagnostics.max_trace_drift, 1e-8);
  }
  {
    const auto rho0 = DensityMatrix::pure(product(s, QubitLevel::Excited, 0));
    const auto tr = evolve_master(h, standard_dissipators(s, kappa, 0.0), rho0, {0, 1e-6, 21}, cfg);
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
      EXPECT_NEAR(tr.observable("sigma_pop")[i], std::exp(-kappa * tr.times[i]), 1e-6);
    }
  }
}

TEST(Master, MatchesLiouvillianExponential) {
  HilbertSpace s(1, 3);
  EffectiveParams eff;
  eff.omega_eff = mhz(3);
  eff.epsilon_eff = mhz(1);
  eff.g_r = mhz(2);
  eff.g_cr = mhz(1.5);
  const auto h = hamiltonians::effective_hamiltonian(eff, s);
  const double kappa = 4e6, gamma = 3e6;
  const auto rho0 = DensityMatrix::pure(product(s, QubitLevel::Excited, 1));
  IntegratorConfig cfg = adaptive(1e-11, 1e-13);
  cfg.store_states = true;
  const double t_end = 300e-9;
  const auto tr = evolve_master(h, standard_dissipators(s, kappa, gamma), rho0, {0, t_end, 4}, cfg);
  const Matrix sm = quantum::qubit_operator(s, 0, PauliKind::Minus).matrix();
  const Matrix a = quantum::annihilation(s).matrix();
  const Matrix l = liouvillian_oracle(h.evaluate(0).matrix(), {{sm, kappa}, {a, gamma}});
  const Matrix expected = evolve_liouvillian(l, rho0.matrix(), t_end);
  EXPECT_LT((tr.states.back() - expected).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Master, ZeroRatesKeepPurity) {
  HilbertSpace s(1, 6);
  EffectiveParams eff;
  eff.omega_eff = mhz(8);
  eff.g_r = eff.g_cr = mhz(5);
  const auto rho0 = DensityMatrix::pure(product(s, QubitLevel::Ground, 0));
  const auto tr = evolve_master(hamiltonians::effective_hamiltonian(eff, s), {}, rho0, {0, 200e-9, 41}, adaptive());
  for (double p : tr.observable("purity")) EXPECT_NEAR(p, 1.0, 1e-8);
  EXPECT_LT(tr.diagnostics.max_trace_drift, 1e-8);
  EXPECT_GE(tr.diagnostics.min_eigenvalue, kPositivityTolerance);
}

TEST(Master, AgreesWithSchrodingerWithoutDissipation) {
  HilbertSpace s(1, 5);
  const DriveParams drive{ghz(3.2), ghz(6.759), 2.296 / 3.2, 4.849 / 6.759, 0, 0};
  const auto h = hamiltonians::rotated_hamiltonian(kSys, drive, s);
  const auto psi0 = product(s, QubitLevel::Ground, 0);
  const IntegratorConfig cfg = adaptive(1e-12, 1e-14);
  const TimeGrid grid{0, 2e-9, 21};
  const auto pure = evolve_schrodinger(h, psi0, grid, cfg);
  const auto mixed = evolve_master(h, {}, DensityMatrix::pure(psi0), grid, cfg);
  for (std::size_t i = 0; i < grid.samples; ++i) {
    EXPECT_NEAR(pure.observable("sigma_pop")[i], mixed.observable("sigma_pop")[i], 1e-9);
  }
}

TEST(Master, RejectsNegativeRates) {
  HilbertSpace s(1, 3);
  const auto h = TimeDependentHamiltonian::constant(Operator::zero(s));
  std::vector<Dissipator> d = {{quantum::annihilation(s), -1.0}};
  IntegratorConfig cfg;
  cfg.dt = 1e-9;
  EXPECT_THROW(evolve_master(h, d, DensityMatrix::pure(product(s, QubitLevel::Ground, 0)), {0, 1e-8, 2}, cfg),
               ValidationError);
}

TEST(Dissipation, FrameInvariance) {
  HilbertSpace s(1, 6);
  const DriveParams drive{ghz(3.2), ghz(6.759), 2.296 / 3.2, 4.849 / 6.759, 0.1, 0.2};
  FramePhases frame(s, kSys, drive);
  const auto base = standard_dissipators(s, kSys.kappa, kSys.gamma);
  const Matrix reference = lindblad_superoperator(base);
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1e-6);
  for (int k = 0; k < 100; ++k) {
    const Operator uu = frame.unitary(u(rng));
    std::vector<Dissipator> moved;
    for (const auto& d : base) moved.push_back({uu.adjoint() * d.jump * uu, d.rate});
    EXPECT_LT((lindblad_superoperator(moved) - reference).cwiseAbs().maxCoeff(), 1e-9 * kSys.kappa);
  }
}

TEST(Dissipation, SuperoperatorMatchesOracle) {
  HilbertSpace s(1, 3);
  const auto d = standard_dissipators(s, 2.0, 3.0);
  ASSERT_EQ(d.size(), 2u);
  const Matrix l = liouvillian_oracle(Matrix::Zero(6, 6), {{d[0].jump.matrix(), d[0].rate}, {d[1].jump.matrix(), d[1].rate}});
  EXPECT_LT((lindblad_superoperator(d) - l).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_EQ(standard_dissipators(s, 0.0, 0.0).size(), 0u);
}

TEST(Fidelity, SimpleValues) {
  HilbertSpace s(1, 2);
  const auto g0 = product(s, QubitLevel::Ground, 0);
  const auto g1 = product(s, QubitLevel::Ground, 1);
  EXPECT_NEAR(fidelity(g0, DensityMatrix::pure(g0)), 1.0, 1e-15);
  EXPECT_NEAR(fidelity(g0, DensityMatrix::pure(g1)), 0.0, 1e-15);
  const Matrix mix = 0.5 * (DensityMatrix::pure(g0).matrix() + DensityMatrix::pure(g1).matrix());
  EXPECT_NEAR(fidelity(g0, DensityMatrix(s, mix)), 0.5, 1e-15);
}

TEST(Period, SyntheticSeries) {
  const double omega = kTwoPi * 3.3e6;
  std::vector<double> t, y;
  for (int i = 0; i <= 2000; ++i) {
    t.push_back(i * 2e-9);
    y.push_back(std::pow(std::sin(omega * t.back() / 2), 2) + 1e-3 * std::sin(kTwoPi * 0.27e9 * t.back()));
  }
  const auto est = extract_period(t, y);
  EXPECT_NEAR(est.period / (kTwoPi / omega), 1.0, 5e-3);
  EXPECT_GE(est.maxima, 3);
  std::vector<double> flat(t.size(), 0.5);
  EXPECT_THROW(extract_period(t, flat), NumericalError);
}

TEST(Period, RippleAtMidpointDoesNotSplitExcursions) {
  const double omega = kTwoPi * 4e6;
  std::vector<double> t, y;
  for (int i = 0; i <= 10000; ++i) {
    t.push_back(i * 0.1e-9);
    y.push_back(std::pow(std::sin(omega * t.back() / 2), 2) + 0.05 * std::sin(kTwoPi * 0.9e9 * t.back()));
  }
  const auto est = extract_period(t, y);
  EXPECT_EQ(est.maxima, 4);
  EXPECT_NEAR(est.period / (kTwoPi / omega), 1.0, 0.02);
}

TEST(Observables, StandardSet) {
  HilbertSpace s(2, 3);
  const auto obs = standard_observables(s);
  ASSERT_EQ(obs.size(), 3u);
  const QubitLevel ee[] = {QubitLevel::Excited, QubitLevel::Excited};
  const auto psi = PureState::product(s, ee, 2);
  for (const auto& o : obs) {
    const double v = quantum::expectation(o.op, psi).real();
    if (o.name == "sigma_pop") EXPECT_NEAR(v, 2.0, 1e-15);
    if (o.name == "photon_number") EXPECT_NEAR(v, 2.0, 1e-15);
    if (o.name == "top_fock_pop") EXPECT_NEAR(v, 1.0, 1e-15);
  }
}
