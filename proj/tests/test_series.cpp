#include <random>

#include "doctest.h"
#include "imexglm/series.hpp"

using namespace imexglm;

namespace {

GlmTableau forward_euler_glm() {
  GlmTableau t;
  t.name = "forward Euler";
  t.A = Mat{{0.0}};
  t.U = Mat{{1.0}};
  t.B = Mat{{1.0}};
  t.V = Mat{{1.0}};
  t.c = {0.0};
  t.p = t.q = t.r = t.s = 1;
  t.kind = TableauKind::explicit_type1;
  return t;
}

}  // namespace

TEST_CASE("exp_series coefficients") {
  const auto s1 = exp_series(1.0, 3);
  CHECK(s1[0] == 1.0);
  CHECK(s1[1] == 1.0);
  CHECK(s1[2] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(s1[3] == doctest::Approx(1.0 / 6.0).epsilon(1e-15));

  const auto s0 = exp_series(0.0, 3);
  CHECK(s0[0] == 1.0);
  CHECK(s0[1] == 0.0);
  CHECK(s0[2] == 0.0);
  CHECK(s0[3] == 0.0);

  const auto sh = exp_series(0.5, 2);
  CHECK(sh[0] == 1.0);
  CHECK(sh[1] == 0.5);
  CHECK(sh[2] == 0.125);
}

TEST_CASE("series product is commutative and associative up to K") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int K = 5;
    TruncatedSeries a{Vec(K + 1)}, b{Vec(K + 1)}, c{Vec(K + 1)};
    for (int k = 0; k <= K; ++k) {
      a.coeffs[k] = dist(rng);
      b.coeffs[k] = dist(rng);
      c.coeffs[k] = dist(rng);
    }
    const auto ab = mul(a, b);
    const auto ba = mul(b, a);
    for (int k = 0; k <= K; ++k) CHECK(ab[k] == doctest::Approx(ba[k]).epsilon(1e-13));
    const auto abc = mul(mul(a, b), c);
    const auto acb = mul(a, mul(b, c));
    for (int k = 0; k <= K; ++k) CHECK(abc[k] == doctest::Approx(acb[k]).epsilon(1e-12));
  }
}

TEST_CASE("stage-order condition for cataloged and trivial methods") {
  const auto& pair2b = find_pair("2B");
  const auto We = weight_vectors(pair2b.explicit_method.A, pair2b.explicit_method.c, 2);
  CHECK(stage_order_residual(pair2b.explicit_method, We, 2, 2) < 1e-14);

  // perturbing a21 against the original representation breaks the condition
  GlmTableau bad = pair2b.explicit_method;
  bad.A(1, 0) = 1.6;
  CHECK(stage_order_residual(bad, We, 2, 2) > 1e-3);

  const auto fe = forward_euler_glm();
  const WeightMatrix Wfe{Mat{{1.0, 0.0}}};
  CHECK(stage_order_residual(fe, Wfe, 1, 1) == 0.0);

  CHECK_THROWS_AS(stage_order_residual(fe, Wfe, 3, 1), std::invalid_argument);
}

TEST_CASE("order condition for all cataloged members") {
  for (const auto& pair : catalog()) {
    const int p = pair.explicit_method.p;
    const double bound = (p == 2) ? 1e-13 : 1e-9;
    const auto We = weight_vectors(pair.explicit_method.A, pair.explicit_method.c, p);
    const auto Wi = weight_vectors(pair.implicit_method.A, pair.implicit_method.c, p);
    CAPTURE(pair.name);
    CHECK(order_residual(pair.explicit_method, We, p) < bound);
    CHECK(order_residual(pair.implicit_method, Wi, p) < bound);
    CHECK(stage_order_residual(pair.explicit_method, We, p, p) < bound);
    CHECK(stage_order_residual(pair.implicit_method, Wi, p, p) < bound);
  }

  const auto fe = forward_euler_glm();
  const WeightMatrix Wfe{Mat{{1.0, 0.0}}};
  CHECK(order_residual(fe, Wfe, 1) == 0.0);

  GlmTableau broken = find_pair("3B").implicit_method;
  broken.B(0, 0) = 0.0;
  const auto Wb = weight_vectors(broken.A, broken.c, 3);
  CHECK(order_residual(broken, Wb, 3) > 1e-2);
}

TEST_CASE("termination rows against the matching stage representations") {
  // explicit weights pair with the explicit member's representation,
  // implicit weights with the implicit member's
  for (const auto& pair : catalog()) {
    const int p = pair.explicit_method.p;
    const double bound = (p == 2) ? 1e-13 : 1e-9;
    const auto We = weight_vectors(pair.explicit_method.A, pair.explicit_method.c, p);
    const auto Wi = weight_vectors(pair.implicit_method.A, pair.implicit_method.c, p);
    CAPTURE(pair.name);
    CHECK(termination_row_residual(pair.termination.beta0, pair.termination.gamma0,
                                   pair.explicit_method, We, p) < bound);
    CHECK(termination_row_residual(pair.termination.beta0_hat, pair.termination.gamma0,
                                   pair.implicit_method, Wi, p) < bound);
  }
}

TEST_CASE("degenerate termination weights leave a visible z^1 defect") {
  const auto& pair = find_pair("2B");
  const auto We = weight_vectors(pair.explicit_method.A, pair.explicit_method.c, 2);
  const Vec zeros{0.0, 0.0};
  const Vec e1{1.0, 0.0};
  CHECK(termination_row_residual(zeros, e1, pair.explicit_method, We, 2) > 0.1);
}

TEST_CASE("full dense-output stencil for the forward-Euler method") {
  // rows k = 0..1 of the dense-output condition solved by hand:
  // k=0: e^z = z*1*e^0 + 1*w(z); k=1: z e^z = z*1*e^0 + 0*w(z) through z^1.
  const auto fe = forward_euler_glm();
  const WeightMatrix Wfe{Mat{{1.0, 0.0}}};
  const Mat Btilde{{1.0}, {1.0}};
  const Mat Vtilde{{1.0}, {0.0}};
  CHECK(termination_residual(Btilde, Vtilde, fe, Wfe, 1) == 0.0);

  const Mat wrong_cols{{1.0, 0.0}, {1.0, 0.0}};
  CHECK_THROWS_AS(termination_residual(wrong_cols, Vtilde, fe, Wfe, 1),
                  std::invalid_argument);
}

TEST_CASE("residuals do not depend on the truncation beyond p+1") {
  const auto& pair = find_pair("3A");
  const int p = 3;
  const auto We = weight_vectors(pair.explicit_method.A, pair.explicit_method.c, p);
  const double r1 = order_residual(pair.explicit_method, We, p, p + 2);
  const double r2 = order_residual(pair.explicit_method, We, p, p + 5);
  CHECK(r1 == r2);
  const double s1 = stage_order_residual(pair.explicit_method, We, p, p, p + 2);
  const double s2 = stage_order_residual(pair.explicit_method, We, p, p, p + 6);
  CHECK(s1 == s2);
}

TEST_CASE("stage-order residual with q = p-1 defect term") {
  // any order-p tableau also satisfies the q = p-1 form with q_p from its own
  // weight matrix, since the prescribed defect then vanishes
  const auto& pair = find_pair("2B");
  const auto We = weight_vectors(pair.explicit_method.A, pair.explicit_method.c, 2);
  CHECK(stage_order_residual(pair.explicit_method, We, 2, 1) < 1e-14);
}
