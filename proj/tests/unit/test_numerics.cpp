/*
 * Copyright 2026 The GCE Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <cmath>
#include <random>

#include "doctest.h"

#include "gce/error.h"
#include "gce/numerics/adam.h"
#include "gce/numerics/autodiff.h"
#include "gce/numerics/dense_matrix.h"
#include "gce/numerics/gradcheck.h"
#include "gce/numerics/sparse_matrix.h"
#include "support/oracles.h"

using namespace gce;

TEST_SUITE("numerics") {

TEST_CASE("dense matmul by hand") {
  const auto i2 = DenseMatrix::identity(2);
  const auto m = DenseMatrix::from_rows({{1, 2}, {3, 4}});
  CHECK(matmul(i2, m) == m);
  CHECK(matmul(DenseMatrix::from_rows({{1, 2}}), DenseMatrix::from_rows({{3}, {4}})) ==
        DenseMatrix::from_rows({{11}}));
  CHECK_THROWS_AS(matmul(m, DenseMatrix(3, 1)), ShapeError);
  CHECK_THROWS_AS(DenseMatrix(2, 2, std::vector<double>{1, 2, 3}), ShapeError);
}

TEST_CASE("dense matmul matches triple loop") {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 20; ++t) {
    const auto a = oracle::random_dense(5, 4, rng);
    const auto b = oracle::random_dense(4, 3, rng);
    CHECK(max_abs_diff(matmul(a, b), oracle::triple_loop_matmul(a, b)) < 1e-14);
    const auto c = oracle::random_dense(5, 3, rng);
    DenseMatrix at(4, 5);
    for (std::size_t i = 0; i < 5; ++i) {
      for (std::size_t j = 0; j < 4; ++j) at(j, i) = a(i, j);
    }
    CHECK(max_abs_diff(matmul_tn(a, c), oracle::triple_loop_matmul(at, c)) < 1e-14);
  }
}

TEST_CASE("matmul_nt against explicit transpose") {
  std::mt19937_64 rng(2);
  const auto a = oracle::random_dense(3, 4, rng);
  const auto b = oracle::random_dense(5, 4, rng);
  DenseMatrix bt(4, 5);
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < 4; ++j) bt(j, i) = b(i, j);
  }
  CHECK(max_abs_diff(matmul_nt(a, b), oracle::triple_loop_matmul(a, bt)) < 1e-14);
}

TEST_CASE("sparse construction rejects bad entries") {
  CHECK_THROWS_AS(SparseMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {0, 0, 2.0}}), ShapeError);
  CHECK_THROWS_AS(SparseMatrix::from_triplets(2, 2, {{2, 0, 1.0}}), IndexError);
  CHECK_THROWS_AS(SparseMatrix::from_triplets(2, 2, {{0, 0, NAN}}), NumericError);
  const auto s = SparseMatrix::from_triplets(3, 3, {{2, 1, 5.0}, {0, 2, 1.0}, {0, 0, 2.0}});
  CHECK(s.nnz() == 3);
  CHECK(s.at(0, 0) == 2.0);
  CHECK(s.at(0, 2) == 1.0);
  CHECK(s.at(2, 1) == 5.0);
  CHECK(s.at(1, 1) == 0.0);
  CHECK(s.row_cols(0)[0] < s.row_cols(0)[1]);
}

TEST_CASE("spmm identity, empty and random") {
  std::mt19937_64 rng(3);
  const auto d = oracle::random_dense(6, 3, rng);
  CHECK(spmm(SparseMatrix::identity(6), d) == d);
  CHECK(spmm(SparseMatrix(6, 6), d) == DenseMatrix(6, 3));
  for (int t = 0; t < 50; ++t) {
    const auto s = oracle::random_sparse(6, 6, 0.2, rng);
    const auto dd = oracle::random_dense(6, 3, rng);
    CHECK(max_abs_diff(spmm(s, dd), oracle::triple_loop_matmul(s.to_dense(), dd)) < 1e-12);
    CHECK(max_abs_diff(spmm_tn(s, dd), spmm(s.transpose(), dd)) < 1e-12);
  }
  CHECK_THROWS_AS(spmm(SparseMatrix(2, 3), DenseMatrix(2, 1)), ShapeError);
}

TEST_CASE("column slice keeps a column range") {
  const auto s = SparseMatrix::from_triplets(2, 4, {{0, 0, 1}, {0, 3, 2}, {1, 1, 3}, {1, 2, 4}});
  const auto sl = s.column_slice(1, 3);
  CHECK(sl.rows() == 2);
  CHECK(sl.cols() == 4);
  CHECK(sl.nnz() == 2);
  CHECK(sl.at(1, 1) == 3);
  CHECK(sl.at(0, 3) == 0);
}

TEST_CASE("scalar activations") {
  CHECK(sigmoid(0.0) == 0.5);
  CHECK(softplus(0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(softplus(800.0) == 800.0);
  CHECK(softplus(-800.0) >= 0.0);
  CHECK(std::isfinite(sigmoid(-1000.0)));
  CHECK(sigmoid(1000.0) == 1.0);
}

TEST_CASE("relu forward") {
  ad::Tape tape;
  const auto y = ad::relu(tape.constant(DenseMatrix::from_rows({{-1, 2}})));
  CHECK(y.value() == DenseMatrix::from_rows({{0, 2}}));
}

TEST_CASE("backward visits in reverse recording order") {
  Parameter p("p", DenseMatrix::from_rows({{1, 2}, {3, 4}}));
  ad::Tape tape;
  const auto x = tape.parameter(p);
  const auto a = ad::scale(x, 2.0);
  const auto b = ad::relu(a);
  const auto c = ad::sum(b);
  tape.backward(c);
  const auto order = tape.backward_order();
  REQUIRE(order.size() == 4);
  CHECK(order[0] == c.id());
  CHECK(order[1] == b.id());
  CHECK(order[2] == a.id());
  CHECK(order[3] == x.id());
  CHECK(p.grad == DenseMatrix(2, 2, 2.0));
}

TEST_CASE("unused parameters get exactly zero gradient") {
  Parameter used("u", DenseMatrix(1, 2, 1.0));
  Parameter unused("n", DenseMatrix(1, 2, 1.0));
  ad::Tape tape;
  tape.parameter(unused);
  tape.backward(ad::sum(tape.parameter(used)));
  CHECK(unused.grad == DenseMatrix(1, 2));
  CHECK(used.grad == DenseMatrix(1, 2, 1.0));
}

TEST_CASE("composed backward equals the chained Jacobians on 2x2") {
  // f(X) = sum(relu(A X) * B), a Jacobian oracle by hand: df/dX = A^T (B * 1[AX > 0])
  const auto a = DenseMatrix::from_rows({{1, -2}, {0.5, 1}});
  const auto b = DenseMatrix::from_rows({{2, 3}, {-1, 4}});
  Parameter x("x", DenseMatrix::from_rows({{0.3, -0.7}, {0.9, 0.2}}));
  ad::Tape tape;
  const auto ax = ad::matmul(tape.constant(a), tape.parameter(x));
  tape.backward(ad::sum(ad::hadamard(ad::relu(ax), tape.constant(b))));
  DenseMatrix upstream(2, 2);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) upstream(i, j) = ax.value()(i, j) > 0 ? b(i, j) : 0.0;
  }
  CHECK(max_abs_diff(x.grad, matmul_tn(a, upstream)) < 1e-15);
}

TEST_CASE("every primitive passes central differences at random points") {
  std::mt19937_64 rng(4);
  const auto s = oracle::random_sparse(4, 4, 0.5, rng);
  for (int probe = 0; probe < 100; ++probe) {
    Parameter a("a", oracle::random_dense(4, 3, rng));
    Parameter b("b", oracle::random_dense(4, 3, rng));
    Parameter w("w", oracle::random_dense(3, 2, rng));
    Parameter r("r", oracle::random_dense(1, 3, rng));
    Parameter c("c", oracle::random_dense(1, 1, rng));
    const DenseMatrix mask = oracle::random_dense(4, 3, rng, 0.0, 2.0);
    const std::vector<std::size_t> ids{2, 0, 2};
    auto loss = [&](ad::Tape& t) {
      auto va = t.parameter(a);
      auto vb = t.parameter(b);
      auto h = ad::add(ad::hadamard(va, vb), ad::sub(va, ad::scale(vb, 0.5)));
      h = ad::add_row(ad::mask(h, mask), t.parameter(r));
      h = ad::add_scalar(h, t.parameter(c));
      auto z = ad::matmul(ad::relu(h), t.parameter(w));
      auto sp = ad::spmm(s, ad::sigmoid(z));
      auto g = ad::gather_rows(ad::softplus(ad::concat_cols(std::vector<ad::Var>{sp, z})), ids);
      auto rd = ad::row_dot(ad::gather_rows(va, ids), ad::gather_rows(vb, ids));
      return ad::add(ad::mean(ad::row_sum(g)), ad::sum(rd));
    };
    std::vector<Parameter*> ps{&a, &b, &w, &r, &c};
    const auto res = check_gradient(loss, ps);
    CHECK(res.max_rel_error < 1e-4);
  }
}

TEST_CASE("gradient checker on x squared") {
  Parameter x("x", DenseMatrix(1, 1, 3.0));
  std::vector<Parameter*> ps{&x};
  const auto res =
    check_gradient([&](ad::Tape& t) { auto v = t.parameter(x); return ad::sum(ad::hadamard(v, v)); }, ps);
  CHECK(res.analytic == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(std::abs(res.numeric - 6.0) < 1e-6);
}

TEST_CASE("gradient checker rejects non-finite loss") {
  Parameter x("x", DenseMatrix(1, 1, 0.0));
  std::vector<Parameter*> ps{&x};
  CHECK_THROWS_AS(check_gradient([&](ad::Tape& t) {
                    return ad::scale(ad::sum(t.parameter(x)), INFINITY);
                  }, ps),
                  NumericError);
}

TEST_CASE("ops reject shape mismatches") {
  ad::Tape t;
  auto a = t.constant(DenseMatrix(2, 3));
  auto b = t.constant(DenseMatrix(3, 2));
  CHECK_THROWS_AS(ad::add(a, b), ShapeError);
  CHECK_THROWS_AS(ad::row_dot(a, b), ShapeError);
  CHECK_THROWS_AS(ad::matmul(a, a), ShapeError);
  CHECK_THROWS_AS(ad::gather_rows(a, std::vector<std::size_t>{2}), IndexError);
  CHECK_THROWS_AS(t.backward(a), ShapeError);
}

TEST_CASE("adam with zero gradient is the identity") {
  DenseMatrix p = DenseMatrix::from_rows({{0.5, -1.5}});
  const DenseMatrix before = p;
  AdamState st;
  for (int i = 0; i < 3; ++i) adam_step(st, AdamOptions{}, p, DenseMatrix(1, 2));
  CHECK(p == before);
  CHECK(st.m == DenseMatrix(1, 2));
  CHECK(st.v == DenseMatrix(1, 2));
  CHECK(st.step == 3);
}

TEST_CASE("adam first step moves by about lr") {
  DenseMatrix p(1, 1, 0.0);
  AdamState st;
  adam_step(st, AdamOptions{0.001}, p, DenseMatrix(1, 1, 1.0));
  // m_hat = 1, v_hat = 1 at t = 1
  CHECK(std::abs(p(0, 0) - (-0.001 / (1.0 + 1e-8))) < 1e-15);
  CHECK(std::abs(p(0, 0) + 0.001) < 1e-6);
  const double first = p(0, 0);
  adam_step(st, AdamOptions{0.001}, p, DenseMatrix(1, 1, 1.0));
  CHECK(std::abs((p(0, 0) - first) - first) < 1e-9);
}

TEST_CASE("adam rejects non-finite or mismatched gradients") {
  DenseMatrix p(1, 2);
  AdamState st;
  CHECK_THROWS_AS(adam_step(st, AdamOptions{}, p, DenseMatrix(1, 2, NAN)), NumericError);
  CHECK_THROWS_AS(adam_step(st, AdamOptions{}, p, DenseMatrix(2, 1)), ShapeError);
}

TEST_CASE("adam over parameters zeroes and steps") {
  Parameter a("a", DenseMatrix(1, 1, 1.0));
  Adam opt({&a}, AdamOptions{0.1});
  a.grad(0, 0) = 2.0;
  opt.step();
  CHECK(a.value(0, 0) < 1.0);
  CHECK(opt.state(0).step == 1);
  opt.zero_grad();
  CHECK(a.grad(0, 0) == 0.0);
}

}  // TEST_SUITE
