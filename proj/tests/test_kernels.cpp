#include <random>
#include <vector>

#include "bldc/kernels.hpp"
#include "doctest.h"

using namespace bldc;

namespace {

struct Batch {
  std::vector<ThreePhaseVector> abc;
  std::vector<DQVector> dq;
  std::vector<double> theta;
};

Batch random_batch(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  Batch b;
  for (std::size_t k = 0; k < n; ++k) {
    b.abc.push_back({u(rng), u(rng), u(rng)});
    b.dq.push_back({u(rng), u(rng)});
    b.theta.push_back(u(rng));
  }
  return b;
}

}  // namespace

TEST_CASE("parallel transforms match the serial reference exactly") {
  const Batch b = random_batch(5000, 1);
  std::vector<DQVector> p(b.abc.size());
  std::vector<DQVector> s(b.abc.size());
  kernels::dq_transform_batch(b.abc, b.theta, p);
  kernels::dq_transform_batch_serial(b.abc, b.theta, s);
  for (std::size_t k = 0; k < p.size(); ++k) {
    CHECK(p[k].d == s[k].d);
    CHECK(p[k].q == s[k].q);
  }
  std::vector<ThreePhaseVector> pi(b.dq.size());
  std::vector<ThreePhaseVector> si(b.dq.size());
  kernels::inverse_dq_batch(b.dq, b.theta, pi);
  kernels::inverse_dq_batch_serial(b.dq, b.theta, si);
  for (std::size_t k = 0; k < pi.size(); ++k) {
    CHECK(pi[k].a == si[k].a);
    CHECK(pi[k].b == si[k].b);
    CHECK(pi[k].c == si[k].c);
  }
  std::vector<DQVector> short_out(3);
  CHECK_THROWS_AS(kernels::dq_transform_batch(b.abc, b.theta, short_out), Error);
}

TEST_CASE("reductions match the serial reference") {
  const Batch b = random_batch(5000, 2);
  CHECK(kernels::trig_identity_max_error(b.theta) == kernels::trig_identity_max_error_serial(b.theta));
  CHECK(kernels::trig_identity_max_error(b.theta) < 1e-14);
  CHECK(kernels::trig_identity_max_error({}) == 0.0);
  const Batch c = random_batch(5000, 3);
  std::vector<ThreePhaseVector> v;
  std::vector<ThreePhaseVector> i;
  for (std::size_t k = 0; k < b.dq.size(); ++k) {
    v.push_back(inverse_dq(b.dq[k], b.theta[k]));
    i.push_back(inverse_dq(c.dq[k], b.theta[k]));
  }
  CHECK(kernels::power_invariance_max_error(v, i, b.theta) ==
        kernels::power_invariance_max_error_serial(v, i, b.theta));
  CHECK(kernels::power_invariance_max_error(v, i, b.theta) < 1e-13);
}

TEST_CASE("ensemble runs match serial runs and propagate errors") {
  QAxisMotorModel m;
  m.ktq = m.kbq = 0.1;
  m.r_phase = 0.2;
  m.l_effective = 1e-4;
  m.inertia = 1e-4;
  m.pole_pairs = 7;
  std::vector<kernels::EnsembleCase> cases;
  for (int n = 0; n < 6; ++n) {
    kernels::EnsembleCase c{m, Controller::voltage(2.0 + n), LoadProfile::constant(0.0),
                            n % 2 ? ModelSelector::ThreePhase : ModelSelector::QAxis,
                            RunOptions{0.01, 1e-5, {}, 10}};
    cases.push_back(c);
  }
  const auto p = kernels::run_ensemble(cases);
  const auto s = kernels::run_ensemble_serial(cases);
  REQUIRE(p.size() == s.size());
  for (std::size_t k = 0; k < p.size(); ++k) {
    CHECK(p[k].omega == s[k].omega);
    CHECK(p[k].theta_r == s[k].theta_r);
  }
  cases[3].options.dt = 0.01;  // unstable step
  cases[3].options.t_end = 1.0;
  CHECK_THROWS_AS(kernels::run_ensemble(cases), NonFiniteState);
}
