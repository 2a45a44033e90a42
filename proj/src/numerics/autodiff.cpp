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

#include "gce/numerics/autodiff.h"

#include <algorithm>
#include <cmath>
#include <memory>

#include "gce/error.h"

namespace gce {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

namespace ad {

const DenseMatrix& Var::value() const { return tape_->value(id_); }
const DenseMatrix& Var::grad() const { return tape_->grad(id_); }

Var Tape::push(Node node) {
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Var Tape::constant(DenseMatrix value) {
  Node n;
  n.value = std::move(value);
  return push(std::move(n));
}

Var Tape::parameter(Parameter& p) {
  Node n;
  n.value = p.value;
  n.param = &p;
  n.needs_grad = true;
  return push(std::move(n));
}

Var Tape::record(DenseMatrix value, std::initializer_list<Var> inputs, Backward backward) {
  return record(std::move(value), std::span<const Var>(inputs.begin(), inputs.size()),
                std::move(backward));
}

Var Tape::record(DenseMatrix value, std::span<const Var> inputs, Backward backward) {
  Node n;
  n.value = std::move(value);
  for (const Var& v : inputs) {
    if (v.tape() != this) throw Error("ad: input recorded on a different tape");
    n.needs_grad = n.needs_grad || nodes_[v.id()].needs_grad;
  }
  if (n.needs_grad) n.backward = std::move(backward);
  return push(std::move(n));
}

DenseMatrix& Tape::grad_buffer(std::size_t id) {
  Node& n = nodes_[id];
  if (n.grad.empty() && !n.value.empty()) n.grad = DenseMatrix(n.value.rows(), n.value.cols());
  return n.grad;
}

void Tape::backward(Var root) {
  if (root.tape() != this) throw Error("ad: backward root from a different tape");
  const DenseMatrix& rv = nodes_[root.id()].value;
  if (rv.rows() != 1 || rv.cols() != 1) throw ShapeError("ad: backward root must be 1x1");
  for (auto& n : nodes_) n.grad = DenseMatrix();
  visited_.clear();
  grad_buffer(root.id())(0, 0) = 1.0;
  for (std::size_t i = root.id() + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.needs_grad || n.grad.empty()) continue;
    visited_.push_back(i);
    if (n.param != nullptr) {
      n.param->grad.axpy(1.0, n.grad);
    } else if (n.backward) {
      n.backward(*this, i);
    }
  }
}

namespace {

std::string dims(const DenseMatrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_same(const char* op, Var a, Var b) {
  if (!a.value().same_shape(b.value())) {
    throw ShapeError(std::string(op) + ": " + dims(a.value()) + " vs " + dims(b.value()));
  }
}

template <typename F>
DenseMatrix map(const DenseMatrix& x, F f) {
  DenseMatrix out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.size(); ++i) out.data()[i] = f(x.data()[i]);
  return out;
}

}  // namespace

Var matmul(Var a, Var b) {
  Tape& t = *a.tape();
  return t.record(gce::matmul(a.value(), b.value()), {a, b},
                  [ia = a.id(), ib = b.id()](Tape& t, std::size_t self) {
                    const DenseMatrix& g = t.grad(self);
                    if (t.needs_grad(ia)) t.grad_buffer(ia).axpy(1.0, matmul_nt(g, t.value(ib)));
                    if (t.needs_grad(ib)) t.grad_buffer(ib).axpy(1.0, matmul_tn(t.value(ia), g));
                  });
}

Var spmm(const SparseMatrix& s, Var d) {
  Tape& t = *d.tape();
  return t.record(gce::spmm(s, d.value()), {d}, [ps = &s, id = d.id()](Tape& t, std::size_t self) {
    t.grad_buffer(id).axpy(1.0, spmm_tn(*ps, t.grad(self)));
  });
}

Var add(Var a, Var b) {
  require_same("add", a, b);
  DenseMatrix v = a.value();
  v.axpy(1.0, b.value());
  return a.tape()->record(std::move(v), {a, b},
                          [ia = a.id(), ib = b.id()](Tape& t, std::size_t self) {
                            if (t.needs_grad(ia)) t.grad_buffer(ia).axpy(1.0, t.grad(self));
                            if (t.needs_grad(ib)) t.grad_buffer(ib).axpy(1.0, t.grad(self));
                          });
}

Var sub(Var a, Var b) {
  require_same("sub", a, b);
  DenseMatrix v = a.value();
  v.axpy(-1.0, b.value());
  return a.tape()->record(std::move(v), {a, b},
                          [ia = a.id(), ib = b.id()](Tape& t, std::size_t self) {
                            if (t.needs_grad(ia)) t.grad_buffer(ia).axpy(1.0, t.grad(self));
                            if (t.needs_grad(ib)) t.grad_buffer(ib).axpy(-1.0, t.grad(self));
                          });
}

Var hadamard(Var a, Var b) {
  require_same("hadamard", a, b);
  DenseMatrix v = a.value();
  for (std::size_t i = 0; i < v.size(); ++i) v.data()[i] *= b.value().data()[i];
  return a.tape()->record(std::move(v), {a, b},
                          [ia = a.id(), ib = b.id()](Tape& t, std::size_t self) {
                            const DenseMatrix& g = t.grad(self);
                            if (t.needs_grad(ia)) {
                              DenseMatrix& ga = t.grad_buffer(ia);
                              const DenseMatrix& vb = t.value(ib);
                              for (std::size_t i = 0; i < g.size(); ++i) {
                                ga.data()[i] += g.data()[i] * vb.data()[i];
                              }
                            }
                            if (t.needs_grad(ib)) {
                              DenseMatrix& gb = t.grad_buffer(ib);
                              const DenseMatrix& va = t.value(ia);
                              for (std::size_t i = 0; i < g.size(); ++i) {
                                gb.data()[i] += g.data()[i] * va.data()[i];
                              }
                            }
                          });
}

Var scale(Var a, double factor) {
  return a.tape()->record(map(a.value(), [factor](double x) { return factor * x; }), {a},
                          [ia = a.id(), factor](Tape& t, std::size_t self) {
                            t.grad_buffer(ia).axpy(factor, t.grad(self));
                          });
}

Var add_row(Var x, Var row) {
  const DenseMatrix& xv = x.value();
  const DenseMatrix& rv = row.value();
  if (rv.rows() != 1 || rv.cols() != xv.cols()) {
    throw ShapeError("add_row: " + dims(xv) + " + " + dims(rv));
  }
  DenseMatrix v = xv;
  for (std::size_t r = 0; r < v.rows(); ++r) {
    auto out = v.row(r);
    for (std::size_t c = 0; c < v.cols(); ++c) out[c] += rv(0, c);
  }
  return x.tape()->record(std::move(v), {x, row},
                          [ix = x.id(), ir = row.id()](Tape& t, std::size_t self) {
                            const DenseMatrix& g = t.grad(self);
                            if (t.needs_grad(ix)) t.grad_buffer(ix).axpy(1.0, g);
                            if (t.needs_grad(ir)) {
                              DenseMatrix& gr = t.grad_buffer(ir);
                              for (std::size_t r = 0; r < g.rows(); ++r) {
                                for (std::size_t c = 0; c < g.cols(); ++c) gr(0, c) += g(r, c);
                              }
                            }
                          });
}

Var add_scalar(Var x, Var scalar) {
  const DenseMatrix& sv = scalar.value();
  if (sv.rows() != 1 || sv.cols() != 1) throw ShapeError("add_scalar: scalar is " + dims(sv));
  const double s = sv(0, 0);
  return x.tape()->record(map(x.value(), [s](double v) { return v + s; }), {x, scalar},
                          [ix = x.id(), is = scalar.id()](Tape& t, std::size_t self) {
                            const DenseMatrix& g = t.grad(self);
                            if (t.needs_grad(ix)) t.grad_buffer(ix).axpy(1.0, g);
                            if (t.needs_grad(is)) {
                              double acc = 0.0;
                              for (double v : g.values()) acc += v;
                              t.grad_buffer(is)(0, 0) += acc;
                            }
                          });
}

Var mask(Var x, const DenseMatrix& m) {
  if (!x.value().same_shape(m)) throw ShapeError("mask: " + dims(x.value()) + " vs " + dims(m));
  DenseMatrix v = x.value();
  for (std::size_t i = 0; i < v.size(); ++i) v.data()[i] *= m.data()[i];
  auto held = std::make_shared<const DenseMatrix>(m);
  return x.tape()->record(std::move(v), {x}, [ix = x.id(), held](Tape& t, std::size_t self) {
    const DenseMatrix& g = t.grad(self);
    DenseMatrix& gx = t.grad_buffer(ix);
    for (std::size_t i = 0; i < g.size(); ++i) gx.data()[i] += g.data()[i] * held->data()[i];
  });
}

Var relu(Var x) {
  return x.tape()->record(map(x.value(), [](double v) { return v > 0.0 ? v : 0.0; }), {x},
                          [ix = x.id()](Tape& t, std::size_t self) {
                            const DenseMatrix& g = t.grad(self);
                            const DenseMatrix& xv = t.value(ix);
                            DenseMatrix& gx = t.grad_buffer(ix);
                            for (std::size_t i = 0; i < g.size(); ++i) {
                              if (xv.data()[i] > 0.0) gx.data()[i] += g.data()[i];
                            }
                          });
}

Var sigmoid(Var x) {
  return x.tape()->record(map(x.value(), [](double v) { return gce::sigmoid(v); }), {x},
                          [ix = x.id()](Tape& t, std::size_t self) {
                            const DenseMatrix& g = t.grad(self);
                            const DenseMatrix& y = t.value(self);
                            DenseMatrix& gx = t.grad_buffer(ix);
                            for (std::size_t i = 0; i < g.size(); ++i) {
                              const double s = y.data()[i];
                              gx.data()[i] += g.data()[i] * s * (1.0 - s);
                            }
                          });
}

Var softplus(Var x) {
  return x.tape()->record(map(x.value(), [](double v) { return gce::softplus(v); }), {x},
                          [ix = x.id()](Tape& t, std::size_t self) {
                            const DenseMatrix& g = t.grad(self);
                            const DenseMatrix& xv = t.value(ix);
                            DenseMatrix& gx = t.grad_buffer(ix);
                            for (std::size_t i = 0; i < g.size(); ++i) {
                              gx.data()[i] += g.data()[i] * gce::sigmoid(xv.data()[i]);
                            }
                          });
}

Var gather_rows(Var x, std::span<const std::size_t> ids) {
  const DenseMatrix& xv = x.value();
  DenseMatrix v(ids.size(), xv.cols());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] >= xv.rows()) {
      throw IndexError("gather_rows: id " + std::to_string(ids[i]) + " >= " +
                       std::to_string(xv.rows()));
    }
    std::copy_n(xv.row(ids[i]).data(), xv.cols(), v.row(i).data());
  }
  return x.tape()->record(std::move(v), {x},
                          [ix = x.id(), rows = std::vector<std::size_t>(ids.begin(), ids.end())](
                            Tape& t, std::size_t self) {
                            const DenseMatrix& g = t.grad(self);
                            DenseMatrix& gx = t.grad_buffer(ix);
                            const std::size_t c = g.cols();
                            for (std::size_t i = 0; i < rows.size(); ++i) {
                              const double* src = g.data() + i * c;
                              double* dst = gx.data() + rows[i] * c;
                              for (std::size_t j = 0; j < c; ++j) dst[j] += src[j];
                            }
                          });
}

Var concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw ShapeError("concat_cols: no inputs");
  const std::size_t n = parts.front().rows();
  std::size_t total = 0;
  std::vector<std::size_t> ids, widths;
  for (const Var& p : parts) {
    if (p.rows() != n) throw ShapeError("concat_cols: row count mismatch");
    ids.push_back(p.id());
    widths.push_back(p.cols());
    total += p.cols();
  }
  DenseMatrix v(n, total);
  std::size_t off = 0;
  for (const Var& p : parts) {
    for (std::size_t r = 0; r < n; ++r) {
      std::copy_n(p.value().row(r).data(), p.cols(), v.row(r).data() + off);
    }
    off += p.cols();
  }
  return parts.front().tape()->record(
    std::move(v), parts, [ids, widths](Tape& t, std::size_t self) {
      const DenseMatrix& g = t.grad(self);
      std::size_t off = 0;
      for (std::size_t k = 0; k < ids.size(); ++k) {
        if (t.needs_grad(ids[k])) {
          DenseMatrix& gp = t.grad_buffer(ids[k]);
          for (std::size_t r = 0; r < g.rows(); ++r) {
            for (std::size_t c = 0; c < widths[k]; ++c) gp(r, c) += g(r, off + c);
          }
        }
        off += widths[k];
      }
    });
}

Var row_sum(Var x) {
  const DenseMatrix& xv = x.value();
  DenseMatrix v(xv.rows(), 1);
  for (std::size_t r = 0; r < xv.rows(); ++r) {
    double s = 0.0;
    for (double e : xv.row(r)) s += e;
    v(r, 0) = s;
  }
  return x.tape()->record(std::move(v), {x}, [ix = x.id()](Tape& t, std::size_t self) {
    const DenseMatrix& g = t.grad(self);
    DenseMatrix& gx = t.grad_buffer(ix);
    for (std::size_t r = 0; r < gx.rows(); ++r) {
      for (double& e : gx.row(r)) e += g(r, 0);
    }
  });
}

Var row_dot(Var a, Var b) {
  require_same("row_dot", a, b);
  const DenseMatrix& av = a.value();
  const DenseMatrix& bv = b.value();
  DenseMatrix v(av.rows(), 1);
  for (std::size_t r = 0; r < av.rows(); ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < av.cols(); ++c) s += av(r, c) * bv(r, c);
    v(r, 0) = s;
  }
  return a.tape()->record(std::move(v), {a, b},
                          [ia = a.id(), ib = b.id()](Tape& t, std::size_t self) {
                            const DenseMatrix& g = t.grad(self);
                            const DenseMatrix& av = t.value(ia);
                            const DenseMatrix& bv = t.value(ib);
                            if (t.needs_grad(ia)) {
                              DenseMatrix& ga = t.grad_buffer(ia);
                              for (std::size_t r = 0; r < av.rows(); ++r) {
                                for (std::size_t c = 0; c < av.cols(); ++c) {
                                  ga(r, c) += g(r, 0) * bv(r, c);
                                }
                              }
                            }
                            if (t.needs_grad(ib)) {
                              DenseMatrix& gb = t.grad_buffer(ib);
                              for (std::size_t r = 0; r < av.rows(); ++r) {
                                for (std::size_t c = 0; c < av.cols(); ++c) {
                                  gb(r, c) += g(r, 0) * av(r, c);
                                }
                              }
                            }
                          });
}

Var sum(Var x) {
  double s = 0.0;
  for (double e : x.value().values()) s += e;
  return x.tape()->record(DenseMatrix(1, 1, s), {x}, [ix = x.id()](Tape& t, std::size_t self) {
    const double g = t.grad(self)(0, 0);
    for (double& e : t.grad_buffer(ix).values()) e += g;
  });
}

Var mean(Var x) {
  const std::size_t n = x.value().size();
  if (n == 0) throw ShapeError("mean: empty input");
  return scale(sum(x), 1.0 / static_cast<double>(n));
}

}  // namespace ad
}  // namespace gce
