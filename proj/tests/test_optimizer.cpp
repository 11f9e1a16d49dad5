#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracle.hpp"
#include "tco/optimizer.hpp"

#include <cmath>
#include <random>

using namespace tco;

namespace {

const DeviceCostTable<double> kTable{};
const CostModelParams<double> kParams = CostModelParams<double>::defaults(kTable);

double quadratic(double m) { return (m - 5.0) * (m - 5.0); }

// Large load-balancing benefit so the optimum sits inside the grid
// (about m = 75 at n = 5000, t = 10).
CostModelParams<double> interior_params() {
  auto p = kParams;
  p.y_instr = 7e4;
  return p;
}

}  // namespace

TEST_CASE("gain schedule defaults and validation") {
  const GainSchedule s;
  CHECK(s.a() == 10.0);
  CHECK(s.c() == 1.0);
  CHECK(s.A() == 4.0);
  CHECK(s.alpha() == 3.0);
  CHECK(s.gamma() == 2.0);
  CHECK_THROWS_AS(GainSchedule(0.0, 1, 4, 3, 2), std::invalid_argument);
  CHECK_THROWS_AS(GainSchedule(10, 0.0, 4, 3, 2), std::invalid_argument);
  CHECK_THROWS_AS(GainSchedule(10, 1, -1.0, 3, 2), std::invalid_argument);
  CHECK_THROWS_AS(GainSchedule(10, 1, 4, 0.0, 2), std::invalid_argument);
  CHECK_THROWS_AS(GainSchedule(10, 1, 4, 3, 0.0), std::invalid_argument);
  CHECK_NOTHROW(GainSchedule(10, 1, 0.0, 3, 2));
}

TEST_CASE("gain values") {
  const GainSchedule s;
  CHECK(gain_a(0, s) == 0.08);
  CHECK(gain_a(4, s) == doctest::Approx(0.013717421124828532236).epsilon(1e-15));
  CHECK(gain_c(0, s) == 1.0);
  CHECK(gain_c(3, s) == 0.0625);
  CHECK_THROWS_AS(gain_a(-1, s), std::invalid_argument);
}

TEST_CASE("gains are positive and strictly decreasing") {
  for (const GainSchedule& s : {GainSchedule{}, GainSchedule(0.5, 1.0, 50.0, 0.602, 0.101)}) {
    double pa = gain_a(0, s), pc = gain_c(0, s);
    for (std::int64_t k = 1; k < 2000; ++k) {
      const double a = gain_a(k, s), c = gain_c(k, s);
      CHECK(a > 0.0);
      CHECK(c > 0.0);
      CHECK(a < pa);
      CHECK(c < pc);
      pa = a;
      pc = c;
    }
  }
}

TEST_CASE("central difference") {
  CHECK(fdsa_gradient(quadratic, 2.0, 1.0).g == -6.0);
  const auto constant = [](double) { return 3.0; };
  CHECK(fdsa_gradient(constant, 17.0, 0.3).g == 0.0);
  CHECK_THROWS_AS(fdsa_gradient(quadratic, 2.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(fdsa_gradient(quadratic, 2.0, -1.0), std::invalid_argument);
}

TEST_CASE("central difference is exact on random quadratics") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> coef(-3.0, 3.0), pos(-20.0, 20.0), width(1e-2, 4.0);
  for (int i = 0; i < 500; ++i) {
    const double a = coef(rng), b = coef(rng), c = coef(rng);
    const double m = pos(rng), h = width(rng);
    const auto f = [=](double x) { return a * x * x + b * x + c; };
    const double g = fdsa_gradient(f, m, h).g;
    const double scale = std::abs(a) * (m * m + h * h) + std::abs(b * m) + std::abs(c) + 1.0;
    CHECK(std::abs(g - (2.0 * a * m + b)) <= 1e-13 * scale / h);
  }
}

TEST_CASE("probes are clipped and the realized spacing is used") {
  const Bounds box(1.0, 10.0);
  const auto est = fdsa_gradient(quadratic, 1.5, 1.0, box);
  CHECK(est.m_minus == 1.0);
  CHECK(est.m_plus == 2.5);
  CHECK(est.g == doctest::Approx((quadratic(2.5) - quadratic(1.0)) / 1.5));
  const auto wide = fdsa_gradient(quadratic, 5.0, 100.0, box);
  CHECK(wide.m_minus == 1.0);
  CHECK(wide.m_plus == 10.0);
  const Bounds point(1.0, 1.0);
  CHECK(fdsa_gradient(quadratic, 1.0, 1.0, point).g == 0.0);
}

TEST_CASE("gradient of the noise-free tco") {
  const auto f = [](double m) {
    return deterministic_tco(ScenarioPoint<double>{5000, m, 10.0}, kParams, kTable).total;
  };
  const double g = fdsa_gradient(f, 20.0, 1.0, Bounds(1.0, 5000.0)).g;
  const double reference = oracle::richardson_derivative(f, 20.0, 0.5);
  CHECK(std::abs(g / reference - 1.0) < 1e-3);
  CHECK(reference == doctest::Approx(133.10482681845210021).epsilon(1e-6));
}

TEST_CASE("projected update") {
  CHECK(projected_update(2.0, 0.5, -6.0, Bounds(1.0, 100.0)) == 5.0);
  CHECK(projected_update(2.0, 10.0, -6.0, Bounds(1.0, 50.0)) == 50.0);
  CHECK(projected_update(1.5, 1.0, 3.0, Bounds(1.0, 50.0)) == 1.0);
  CHECK_THROWS_AS(Bounds(5.0, 1.0), std::invalid_argument);
}

TEST_CASE("fdsa step records its probes") {
  FdsaTrajectory traj;
  const GainSchedule s;
  const FdsaState next = fdsa_step({0, 2.0}, quadratic, s, Bounds(1.0, 100.0), traj);
  REQUIRE(traj.records.size() == 1);
  const auto& r = traj.records[0];
  CHECK(r.k == 0);
  CHECK(r.a_k == 0.08);
  CHECK(r.c_k == 1.0);
  CHECK(r.g_hat == -6.0);
  CHECK(r.probe_plus == 4.0);
  CHECK(r.probe_minus == 16.0);
  CHECK(next.k == 1);
  CHECK(next.m_hat == doctest::Approx(2.48));
}

TEST_CASE("integer recommendation rounds half up inside the box") {
  const Bounds b(1.0, 50.0);
  CHECK(integer_recommendation(2.5, b) == 3);
  CHECK(integer_recommendation(2.49, b) == 2);
  CHECK(integer_recommendation(0.2, b) == 1);
  CHECK(integer_recommendation(50.0, b) == 50);
}

TEST_CASE("quadratic with the default gains stalls short of the minimum") {
  // sum_k a_k = 10 (zeta(3) - 1 - 1/8 - 1/27 - 1/64) ~ 0.244, so the iterate
  // only closes part of the gap: m - 5 shrinks by prod (1 - 2 a_k).
  OptimizeOptions o;
  o.m0 = 3.0;
  o.max_iters = 200;
  const auto traj = optimize(quadratic, Bounds(1.0, 100.0), GainSchedule{}, o);
  double expected = 3.0;
  for (std::int64_t k = 0; k < static_cast<std::int64_t>(traj.records.size()); ++k)
    expected = 5.0 + (1.0 - 2.0 * gain_a(k, GainSchedule{})) * (expected - 5.0);
  CHECK(traj.final_m == doctest::Approx(expected).epsilon(1e-12));
  CHECK(traj.final_m > 3.5);
  CHECK(traj.final_m < 4.0);

  o.m0 = 1.0;
  const auto from_one = optimize(quadratic, Bounds(1.0, 100.0), GainSchedule{}, o);
  CHECK(std::abs(from_one.final_m - 5.0) > 0.5);
}

TEST_CASE("quadratic converges with a slowly decaying schedule") {
  OptimizeOptions o;
  o.m0 = 1.0;
  o.max_iters = 200;
  const auto traj = optimize(quadratic, Bounds(1.0, 100.0), GainSchedule(0.5, 1.0, 4.0, 0.602, 0.101), o);
  CHECK(std::abs(traj.final_m - 5.0) <= 0.5);
  CHECK(traj.recommendation == 5);
  CHECK(traj.records.size() <= 200);
}

TEST_CASE("optimize validates its inputs") {
  OptimizeOptions o;
  o.max_iters = 0;
  CHECK_THROWS_AS(optimize(quadratic, Bounds(1.0, 10.0), GainSchedule{}, o), std::invalid_argument);
  o.max_iters = 10;
  o.m0 = 11.0;
  CHECK_THROWS_AS(optimize(quadratic, Bounds(1.0, 10.0), GainSchedule{}, o), std::domain_error);
  CHECK_THROWS_AS(optimize(ScenarioPoint<double>{10, 1.0, 1.0}, kParams, kTable,
                           PerturbationSpec::noise_free(), GainSchedule{}, o),
                  std::domain_error);
}

TEST_CASE("early stop fires after a quiet run") {
  OptimizeOptions o;
  o.m0 = 1.0;
  o.max_iters = 500;
  const auto f = [](double m) { return 133.0 * m; };  // pinned at the lower bound
  const auto traj = optimize(f, Bounds(1.0, 100.0), GainSchedule{}, o);
  CHECK(traj.stopped_early);
  CHECK(traj.records.size() == 10);
  o.early_stop = false;
  CHECK(optimize(f, Bounds(1.0, 100.0), GainSchedule{}, o).records.size() == 500);
}

TEST_CASE("grid search") {
  auto only_cost = kParams;
  only_cost.y_instr = 0.0;
  CHECK(grid_search(5000, 10.0, only_cost, kTable, 200).m == 1);

  const auto golden = grid_search(5000, 10.0, kParams, kTable, 200);
  CHECK(golden.m == 1);
  CHECK(golden.tco == doctest::Approx(69989.909446395726346).epsilon(1e-13));

  const auto interior = grid_search(5000, 10.0, interior_params(), kTable, 200);
  CHECK(interior.m > 60);
  CHECK(interior.m < 90);

  CHECK_THROWS_AS(grid_search(5000, 10.0, kParams, kTable, 0), std::invalid_argument);
  CHECK_THROWS_AS(grid_search(50, 10.0, kParams, kTable, 51), std::invalid_argument);
}

TEST_CASE("grid search tie goes to the smaller m") {
  // With z_instr = 0 and free edge servers the total is flat in m.
  auto flat = kParams;
  flat.z_instr = 0.0;
  DeviceCostTable<double> table = kTable;
  table.x_esrvr = 1e-300;
  flat.e0.setConstant(0.0);
  flat.e1.setConstant(0.0);
  CHECK(grid_search(100, 3.0, flat, table, 20).m == 1);
}

TEST_CASE("noise-free FDSA matches the grid oracle at defaults") {
  for (double t : {5.0, 10.0, 25.0}) {
    OptimizeOptions o;
    o.m0 = 30.0;
    const auto traj = optimize(ScenarioPoint<double>{5000, 1.0, t}, kParams, kTable,
                               PerturbationSpec::noise_free(), GainSchedule{}, o);
    const auto best = grid_search(5000, t, kParams, kTable, 200);
    const double at_rec = deterministic_tco(
        ScenarioPoint<double>{5000, double(traj.recommendation), t}, kParams, kTable).total;
    CHECK(at_rec <= 1.01 * best.tco);
  }
}

TEST_CASE("noise-free FDSA finds an interior optimum with a slowly decaying schedule") {
  const auto params = interior_params();
  const GainSchedule schedule(5.0, 1.0, 10.0, 0.602, 0.101);
  OptimizeOptions o;
  o.m0 = 1.0;
  o.max_iters = 2000;
  const auto traj = optimize(ScenarioPoint<double>{5000, 1.0, 10.0}, params, kTable,
                             PerturbationSpec::noise_free(), schedule, o);
  const auto best = grid_search(5000, 10.0, params, kTable, 200);
  CHECK(std::abs(traj.recommendation - best.m) <= 1);
  const double at_rec = deterministic_tco(
      ScenarioPoint<double>{5000, double(traj.recommendation), 10.0}, params, kTable).total;
  CHECK(at_rec <= 1.01 * best.tco);
}

TEST_CASE("noisy runs stay feasible and are reproducible") {
  const auto spec = PerturbationSpec::defaults(kTable, 77);
  OptimizeOptions o;
  o.m0 = 50.0;
  o.early_stop = false;
  const ScenarioPoint<double> point{2000, 1.0, 10.0};
  const auto a = optimize(point, kParams, kTable, spec, GainSchedule{}, o, 3);
  const auto b = optimize(point, kParams, kTable, spec, GainSchedule{}, o, 3);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].m_hat == b.records[i].m_hat);
    CHECK(a.records[i].probe_plus == b.records[i].probe_plus);
    CHECK(a.records[i].m_plus >= 1.0);
    CHECK(a.records[i].m_minus <= 2000.0);
    CHECK(a.records[i].m_hat >= 1.0);
    CHECK(a.records[i].m_hat <= 2000.0);
  }
  CHECK(a.final_m == b.final_m);
  const auto c = optimize(point, kParams, kTable, spec, GainSchedule{}, o, 4);
  CHECK(c.records[0].probe_plus != a.records[0].probe_plus);
}

TEST_CASE("resample policies") {
  OptimizeOptions o;
  o.m0 = 10.0;
  o.max_iters = 5;
  o.early_stop = false;
  const ScenarioPoint<double> point{1000, 1.0, 4.0};
  const auto det = [&](double m) {
    return deterministic_tco(ScenarioPoint<double>{1000, m, 4.0}, kParams, kTable).total;
  };

  auto frozen = PerturbationSpec::defaults(kTable, 1);
  frozen.resample = ResamplePolicy::FrozenPerRun;
  const auto tf = optimize(point, kParams, kTable, frozen, GainSchedule{}, o);
  // A frozen draw shifts every evaluation by the same m-affine amount, so
  // successive offsets follow the edge-server multiplicity only.
  const auto xi = PerturbationStream(frozen, 0).next();
  for (const auto& r : tf.records) {
    const double off_plus = r.probe_plus - det(r.m_plus);
    const double off_minus = r.probe_minus - det(r.m_minus);
    const double edge = xi(static_cast<int>(Term::EsrvrC)) + xi(static_cast<int>(Term::EsrvrO));
    CHECK(off_plus - off_minus == doctest::Approx(edge * (r.m_plus - r.m_minus)).epsilon(1e-6));
  }

  auto paired = PerturbationSpec::defaults(kTable, 1);
  paired.pairing = ProbePairing::Paired;
  const auto tp = optimize(point, kParams, kTable, paired, GainSchedule{}, o);
  PerturbationStream stream(paired, 0);
  for (const auto& r : tp.records) {
    const auto draw = stream.next();
    const double edge = draw(static_cast<int>(Term::EsrvrC)) + draw(static_cast<int>(Term::EsrvrO));
    const double off_plus = r.probe_plus - det(r.m_plus);
    const double off_minus = r.probe_minus - det(r.m_minus);
    CHECK(off_plus - off_minus == doctest::Approx(edge * (r.m_plus - r.m_minus)).epsilon(1e-6));
  }
}
