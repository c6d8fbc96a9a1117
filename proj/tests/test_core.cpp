#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "foodchain/param_set.hpp"
#include "foodchain/rng.hpp"
#include "foodchain/sgd.hpp"

using namespace foodchain;

TEST_CASE("sgd zero gradient is a fixed point") {
  Tensor p(1, 1);
  p.at(0, 0) = 1.0;
  ParamSet ps;
  ps.add("p", &p);
  SgdConfig cfg;
  sgd_step(ps, cfg);
  CHECK(p.at(0, 0) == 1.0);
  CHECK(ps.step() == 1);
}

TEST_CASE("sgd one-step arithmetic") {
  Tensor p(1, 1);
  p.at(0, 0) = 1.0;
  p.grad_at(0, 0) = 1.0;
  ParamSet ps;
  ps.add("p", &p);
  SgdConfig cfg;  // lr 0.001
  sgd_step(ps, cfg);
  CHECK(p.at(0, 0) == doctest::Approx(0.999).epsilon(1e-15));
  CHECK(p.grad_at(0, 0) == 0.0);  // gradients zeroed after the step
}

TEST_CASE("sgd converges on quadratic (p-3)^2") {
  Tensor p(1, 1);
  ParamSet ps;
  ps.add("p", &p);
  SgdConfig cfg;
  cfg.learning_rate = 0.1;
  cfg.clip_norm = 0.0;  // pure geometric contraction
  for (int i = 0; i < 100; ++i) {
    p.grad_at(0, 0) = 2.0 * (p.at(0, 0) - 3.0);
    sgd_step(ps, cfg);
  }
  CHECK(std::fabs(p.at(0, 0) - 3.0) < 1e-6);
}

TEST_CASE("sgd rejects non-finite gradients, naming the parameter") {
  Tensor p(1, 1);
  p.grad_at(0, 0) = std::nan("");
  ParamSet ps;
  ps.add("bad_tensor", &p);
  SgdConfig cfg;
  CHECK_THROWS_WITH_AS(sgd_step(ps, cfg),
                       doctest::Contains("bad_tensor"), std::runtime_error);
}

TEST_CASE("gradient clipping bounds the global norm") {
  Tensor p(2, 1);
  p.grad_at(0, 0) = 30.0;
  p.grad_at(1, 0) = 40.0;  // norm 50 > clip 5 -> scaled by 0.1
  ParamSet ps;
  ps.add("p", &p);
  SgdConfig cfg;
  cfg.learning_rate = 1.0;
  sgd_step(ps, cfg);
  CHECK(p.at(0, 0) == doctest::Approx(-3.0).epsilon(1e-12));
  CHECK(p.at(1, 0) == doctest::Approx(-4.0).epsilon(1e-12));
}

TEST_CASE("grad_check exact for quadratics") {
  Tensor p(1, 1);
  p.at(0, 0) = 2.0;
  ParamSet ps;
  ps.add("p", &p);
  auto loss = [&]() { return p.at(0, 0) * p.at(0, 0); };
  auto grads = [&]() {
    ps.zero_grads();
    p.grad_at(0, 0) = 2.0 * p.at(0, 0);
  };
  CHECK(grad_check(loss, grads, ps) < 1e-8);
}

TEST_CASE("grad_check flags a wrong gradient") {
  Tensor p(1, 1);
  p.at(0, 0) = 2.0;
  ParamSet ps;
  ps.add("p", &p);
  auto loss = [&]() { return p.at(0, 0) * p.at(0, 0); };
  auto grads = [&]() {
    ps.zero_grads();
    p.grad_at(0, 0) = 3.0 * p.at(0, 0);  // wrong on purpose
  };
  CHECK(grad_check(loss, grads, ps) > 0.1);
}

TEST_CASE("grad_check enforces the epsilon range") {
  Tensor p(1, 1);
  ParamSet ps;
  ps.add("p", &p);
  auto zero = [&]() { return 0.0; };
  auto none = [&]() { ps.zero_grads(); };
  CHECK_THROWS_AS(grad_check(zero, none, ps, 1e-7), std::invalid_argument);
  CHECK_THROWS_AS(grad_check(zero, none, ps, 1e-2), std::invalid_argument);
}

TEST_CASE("param set serialization round-trips exactly") {
  Rng rng(123);
  Tensor a(3, 4), b(2, 1);
  xavier_init(a, 3, 4, rng);
  xavier_init(b, 2, 1, rng);
  ParamSet ps;
  ps.add("model.a", &a);
  ps.add("model.b", &b);
  std::stringstream buf;
  ps.save(buf);

  Tensor a2(3, 4), b2(2, 1);
  ParamSet ps2;
  ps2.add("model.a", &a2);
  ps2.add("model.b", &b2);
  ps2.load(buf);
  CHECK(a2.v == a.v);
  CHECK(b2.v == b.v);
}

TEST_CASE("param set load rejects a corrupted payload") {
  Tensor a(2, 2);
  a.at(0, 0) = 1.5;
  ParamSet ps;
  ps.add("a", &a);
  std::stringstream buf;
  ps.save(buf);
  std::string text = buf.str();
  auto pos = text.find("1.5");
  REQUIRE(pos != std::string::npos);
  text[pos] = '2';  // flip a digit: checksum must catch it
  Tensor a2(2, 2);
  ParamSet ps2;
  ps2.add("a", &a2);
  std::istringstream bad(text);
  CHECK_THROWS_AS(ps2.load(bad), std::runtime_error);
}

TEST_CASE("snapshot/restore round-trips values") {
  Tensor a(2, 2);
  a.at(0, 0) = 4.0;
  ParamSet ps;
  ps.add("a", &a);
  auto snap = ps.snapshot();
  a.at(0, 0) = -1.0;
  ps.restore(snap);
  CHECK(a.at(0, 0) == 4.0);
}

TEST_CASE("xavier init is reproducible and bounded") {
  Rng r1(42), r2(42);
  Tensor a(8, 8), b(8, 8);
  xavier_init(a, 8, 8, r1);
  xavier_init(b, 8, 8, r2);
  CHECK(a.v == b.v);
  double bound = std::sqrt(6.0 / 16.0);
  for (double x : a.v) CHECK(std::fabs(x) <= bound);
}

TEST_CASE("sgd config validation") {
  SgdConfig cfg;
  cfg.learning_rate = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = SgdConfig{};
  cfg.batch_size = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = SgdConfig{};
  cfg.epochs = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
