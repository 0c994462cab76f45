/*
 * Copyright 2026 The swin4d Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "swin4d/ops.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "swin4d/error.hpp"

namespace swin4d {

namespace {

template <typename T>
using NodeT = detail::Node<T>;
template <typename T>
using NodePtrT = std::shared_ptr<NodeT<T>>;
template <typename T>
using Backward = std::function<void(NodeT<T>&)>;

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using ConstMap = Eigen::Map<const RowMat<T>>;
template <typename T>
using MutMap = Eigen::Map<RowMat<T>>;

template <typename T>
Tensor<T> make_result(Shape shape, std::vector<T> data, const char* op, std::vector<NodePtrT<T>> inputs,
                      Backward<T> backward) {
  auto node = std::make_shared<NodeT<T>>();
  node->shape = std::move(shape);
  node->data = std::move(data);
  node->op = op;
#ifndef NDEBUG
  const bool inputs_finite = std::all_of(inputs.begin(), inputs.end(), [](const NodePtrT<T>& in) {
    return std::all_of(in->data.begin(), in->data.end(), [](T v) { return std::isfinite(v); });
  });
  if (inputs_finite && !std::all_of(node->data.begin(), node->data.end(), [](T v) { return std::isfinite(v); }))
    throw RuntimeFailure(std::string("non-finite output from ") + op + " on finite input");
#endif
  const bool track = grad_mode_enabled() &&
                     std::any_of(inputs.begin(), inputs.end(), [](const NodePtrT<T>& in) { return in->requires_grad; });
  node->is_leaf = !track;
  if (track) {
    node->requires_grad = true;
    node->inputs = std::move(inputs);
    node->backward = std::move(backward);
  }
  return Tensor<T>::from_node(std::move(node));
}

// Calls f(out_offset, in_offset) for every element of `shape` in row-major
// order, where in_offset = sum over axes of tables[axis][index[axis]].
template <class F>
void for_each_mapped(const Shape& shape, const std::vector<std::vector<Index>>& tables, F&& f) {
  const int r = static_cast<int>(shape.size());
  if (r == 0) {
    f(Index{0}, Index{0});
    return;
  }
  const Index n = shape_numel(shape);
  const Index inner = shape[r - 1];
  const Index* last = tables[r - 1].data();
  std::vector<Index> idx(r, 0);
  Index base = 0;
  for (int ax = 0; ax < r - 1; ++ax) base += tables[ax][0];
  for (Index o = 0; o < n; o += inner) {
    for (Index k = 0; k < inner; ++k) f(o + k, base + last[k]);
    for (int ax = r - 2; ax >= 0; --ax) {
      base -= tables[ax][idx[ax]];
      if (++idx[ax] < shape[ax]) {
        base += tables[ax][idx[ax]];
        break;
      }
      idx[ax] = 0;
      base += tables[ax][0];
    }
  }
}

std::vector<Index> linear_table(Index extent, Index stride, Index start = 0) {
  std::vector<Index> t(extent);
  for (Index i = 0; i < extent; ++i) t[i] = (start + i) * stride;
  return t;
}

void require_same_shape(const Shape& a, const Shape& b, const char* op) {
  if (a != b) throw ShapeError(std::string(op) + ": shape mismatch " + shape_to_string(a) + " vs " + shape_to_string(b));
}

// Right-aligned broadcast of two shapes.
Shape broadcast_shape(const Shape& a, const Shape& b, const char* op) {
  const std::size_t r = std::max(a.size(), b.size());
  Shape out(r);
  for (std::size_t i = 0; i < r; ++i) {
    const Index ea = i < r - a.size() ? 1 : a[i - (r - a.size())];
    const Index eb = i < r - b.size() ? 1 : b[i - (r - b.size())];
    if (ea != eb && ea != 1 && eb != 1)
      throw ShapeError(std::string(op) + ": cannot broadcast " + shape_to_string(a) + " with " + shape_to_string(b));
    out[i] = std::max(ea, eb);
  }
  return out;
}

// Offset tables of `in` when broadcast to `out` (zero stride on broadcast axes).
std::vector<std::vector<Index>> broadcast_tables(const Shape& in, const Shape& out) {
  const std::size_t r = out.size();
  const std::size_t lead = r - in.size();
  const auto strides = row_major_strides(in);
  std::vector<std::vector<Index>> tables(r);
  for (std::size_t i = 0; i < r; ++i) {
    const bool broadcast = i < lead || in[i - lead] == 1;
    tables[i] = linear_table(out[i], broadcast ? 0 : strides[i - lead]);
  }
  return tables;
}

enum class BinOp { kAdd, kSub, kMul, kDiv };

template <typename T>
T apply_bin(BinOp op, T a, T b) {
  switch (op) {
    case BinOp::kAdd: return a + b;
    case BinOp::kSub: return a - b;
    case BinOp::kMul: return a * b;
    case BinOp::kDiv: return a / b;
  }
  return T(0);
}

const char* bin_name(BinOp op) {
  switch (op) {
    case BinOp::kAdd: return "add";
    case BinOp::kSub: return "sub";
    case BinOp::kMul: return "mul";
    case BinOp::kDiv: return "div";
  }
  return "?";
}

template <typename T>
Tensor<T> binary(const Tensor<T>& a, const Tensor<T>& b, BinOp op, bool allow_broadcast) {
  const char* name = bin_name(op);
  if (!allow_broadcast) require_same_shape(a.shape(), b.shape(), name);
  Shape out_shape = broadcast_shape(a.shape(), b.shape(), name);
  const Index n = shape_numel(out_shape);
  std::vector<T> out(n);
  const auto& ad = a.node()->data;
  const auto& bd = b.node()->data;
  const bool same = a.shape() == b.shape();
  if (same) {
    for (Index i = 0; i < n; ++i) out[i] = apply_bin(op, ad[i], bd[i]);
  }
  std::vector<std::vector<Index>> ta, tb;
  if (!same) {
    ta = broadcast_tables(a.shape(), out_shape);
    tb = broadcast_tables(b.shape(), out_shape);
    // Walk the output once per operand; record b's offsets for the pairing.
    std::vector<Index> boff(n);
    for_each_mapped(out_shape, tb, [&](Index o, Index ib) { boff[o] = ib; });
    for_each_mapped(out_shape, ta, [&](Index o, Index ia) { out[o] = apply_bin(op, ad[ia], bd[boff[o]]); });
  }
  return make_result<T>(
      out_shape, std::move(out), name, {a.node(), b.node()},
      [op, same, out_shape, ta = std::move(ta), tb = std::move(tb)](NodeT<T>& self) {
        auto& na = *self.inputs[0];
        auto& nb = *self.inputs[1];
        const auto& g = self.grad;
        const Index n = static_cast<Index>(g.size());
        std::vector<Index> ia(n), ib(n);
        if (same) {
          std::iota(ia.begin(), ia.end(), Index{0});
          ib = ia;
        } else {
          for_each_mapped(out_shape, ta, [&](Index o, Index off) { ia[o] = off; });
          for_each_mapped(out_shape, tb, [&](Index o, Index off) { ib[o] = off; });
        }
        if (na.requires_grad) {
          auto& ga = na.grad_buffer();
          for (Index o = 0; o < n; ++o) {
            T d = g[o];
            if (op == BinOp::kMul) d *= nb.data[ib[o]];
            if (op == BinOp::kDiv) d /= nb.data[ib[o]];
            ga[ia[o]] += d;
          }
        }
        if (nb.requires_grad) {
          auto& gb = nb.grad_buffer();
          for (Index o = 0; o < n; ++o) {
            T d = g[o];
            if (op == BinOp::kSub) d = -d;
            if (op == BinOp::kMul) d *= na.data[ia[o]];
            if (op == BinOp::kDiv) {
              const T bv = nb.data[ib[o]];
              d = -d * na.data[ia[o]] / (bv * bv);
            }
            gb[ib[o]] += d;
          }
        }
      });
}

template <typename T, class F, class DF>
Tensor<T> unary(const Tensor<T>& x, const char* name, F f, DF df) {
  const auto& xd = x.node()->data;
  std::vector<T> out(xd.size());
  for (std::size_t i = 0; i < xd.size(); ++i) out[i] = f(xd[i]);
  return make_result<T>(x.shape(), std::move(out), name, {x.node()}, [df](NodeT<T>& self) {
    auto& in = *self.inputs[0];
    auto& gi = in.grad_buffer();
    for (std::size_t i = 0; i < gi.size(); ++i) gi[i] += self.grad[i] * df(in.data[i], self.data[i]);
  });
}

// outer x n x inner decomposition around `axis`.
struct AxisSplit {
  Index outer = 1, n = 1, inner = 1;
};

AxisSplit split_at(const Shape& shape, int axis) {
  AxisSplit s;
  for (int i = 0; i < axis; ++i) s.outer *= shape[i];
  s.n = shape[axis];
  for (std::size_t i = axis + 1; i < shape.size(); ++i) s.inner *= shape[i];
  return s;
}

}  // namespace

template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b) {
  const Shape& as = a.shape();
  const Shape& bs = b.shape();
  if (as.size() < 2 || bs.size() < 2 || as[as.size() - 1] != bs[bs.size() - 2])
    throw ShapeError("matmul: incompatible shapes " + shape_to_string(as) + " and " + shape_to_string(bs));
  const Index m = as[as.size() - 2], k = as[as.size() - 1], n = bs[bs.size() - 1];

  if (bs.size() == 2) {
    const Index rows = a.numel() / k;
    Shape out_shape(as.begin(), as.end() - 1);
    out_shape.push_back(n);
    std::vector<T> out(rows * n);
    MutMap<T>(out.data(), rows, n).noalias() =
        ConstMap<T>(a.node()->data.data(), rows, k) * ConstMap<T>(b.node()->data.data(), k, n);
    return make_result<T>(out_shape, std::move(out), "matmul", {a.node(), b.node()}, [rows, k, n](NodeT<T>& self) {
      auto& na = *self.inputs[0];
      auto& nb = *self.inputs[1];
      ConstMap<T> g(self.grad.data(), rows, n);
      if (na.requires_grad)
        MutMap<T>(na.grad_buffer().data(), rows, k).noalias() += g * ConstMap<T>(nb.data.data(), k, n).transpose();
      if (nb.requires_grad)
        MutMap<T>(nb.grad_buffer().data(), k, n).noalias() += ConstMap<T>(na.data.data(), rows, k).transpose() * g;
    });
  }

  const Shape abatch(as.begin(), as.end() - 2);
  const Shape bbatch(bs.begin(), bs.end() - 2);
  const Shape obatch = broadcast_shape(abatch, bbatch, "matmul");
  std::vector<Index> aoff(shape_numel(obatch)), boff(shape_numel(obatch));
  for_each_mapped(obatch, broadcast_tables(abatch, obatch), [&](Index o, Index off) { aoff[o] = off * m * k; });
  for_each_mapped(obatch, broadcast_tables(bbatch, obatch), [&](Index o, Index off) { boff[o] = off * k * n; });
  Shape out_shape = obatch;
  out_shape.push_back(m);
  out_shape.push_back(n);
  const Index batches = static_cast<Index>(aoff.size());
  std::vector<T> out(batches * m * n);
  for (Index i = 0; i < batches; ++i)
    MutMap<T>(out.data() + i * m * n, m, n).noalias() =
        ConstMap<T>(a.node()->data.data() + aoff[i], m, k) * ConstMap<T>(b.node()->data.data() + boff[i], k, n);
  return make_result<T>(
      out_shape, std::move(out), "matmul", {a.node(), b.node()},
      [m, k, n, aoff = std::move(aoff), boff = std::move(boff)](NodeT<T>& self) {
        auto& na = *self.inputs[0];
        auto& nb = *self.inputs[1];
        for (std::size_t i = 0; i < aoff.size(); ++i) {
          ConstMap<T> g(self.grad.data() + i * m * n, m, n);
          if (na.requires_grad)
            MutMap<T>(na.grad_buffer().data() + aoff[i], m, k).noalias() +=
                g * ConstMap<T>(nb.data.data() + boff[i], k, n).transpose();
          if (nb.requires_grad)
            MutMap<T>(nb.grad_buffer().data() + boff[i], k, n).noalias() +=
                ConstMap<T>(na.data.data() + aoff[i], m, k).transpose() * g;
        }
      });
}

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
  return binary(a, b, BinOp::kAdd, false);
}
template <typename T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b) {
  return binary(a, b, BinOp::kSub, false);
}
template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b) {
  return binary(a, b, BinOp::kMul, false);
}
template <typename T>
Tensor<T> div(const Tensor<T>& a, const Tensor<T>& b) {
  return binary(a, b, BinOp::kDiv, false);
}
template <typename T>
Tensor<T> broadcast_add(const Tensor<T>& a, const Tensor<T>& b) {
  return binary(a, b, BinOp::kAdd, true);
}
template <typename T>
Tensor<T> broadcast_mul(const Tensor<T>& a, const Tensor<T>& b) {
  return binary(a, b, BinOp::kMul, true);
}
template <typename T>
Tensor<T> broadcast_div(const Tensor<T>& a, const Tensor<T>& b) {
  return binary(a, b, BinOp::kDiv, true);
}

template <typename T>
Tensor<T> scale(const Tensor<T>& x, T factor) {
  return unary(
      x, "scale", [factor](T v) { return v * factor; }, [factor](T, T) { return factor; });
}

template <typename T>
Tensor<T> add_scalar(const Tensor<T>& x, T value) {
  return unary(
      x, "add_scalar", [value](T v) { return v + value; }, [](T, T) { return T(1); });
}

template <typename T>
Tensor<T> neg(const Tensor<T>& x) {
  return scale(x, T(-1));
}

template <typename T>
Tensor<T> exp(const Tensor<T>& x) {
  return unary(
      x, "exp", [](T v) { return std::exp(v); }, [](T, T y) { return y; });
}

template <typename T>
Tensor<T> log(const Tensor<T>& x) {
  return unary(
      x, "log", [](T v) { return std::log(v); }, [](T v, T) { return T(1) / v; });
}

template <typename T>
Tensor<T> sqrt(const Tensor<T>& x) {
  return unary(
      x, "sqrt", [](T v) { return std::sqrt(v); }, [](T, T y) { return T(0.5) / y; });
}

template <typename T>
Tensor<T> square(const Tensor<T>& x) {
  return unary(
      x, "square", [](T v) { return v * v; }, [](T v, T) { return T(2) * v; });
}

template <typename T>
Tensor<T> softplus(const Tensor<T>& x) {
  return unary(
      x, "softplus", [](T v) { return std::max(v, T(0)) + std::log1p(std::exp(-std::abs(v))); },
      [](T v, T) {
        if (v >= 0) return T(1) / (T(1) + std::exp(-v));
        const T e = std::exp(v);
        return e / (T(1) + e);
      });
}

template <typename T>
Tensor<T> gelu(const Tensor<T>& x) {
  constexpr T kC = T(0.7978845608028654);  // sqrt(2 / pi)
  constexpr T kA = T(0.044715);
  return unary(
      x, "gelu",
      [](T v) { return T(0.5) * v * (T(1) + std::tanh(kC * (v + kA * v * v * v))); },
      [](T v, T) {
        const T t = std::tanh(kC * (v + kA * v * v * v));
        return T(0.5) * (T(1) + t) + T(0.5) * v * (T(1) - t * t) * kC * (T(1) + T(3) * kA * v * v);
      });
}

template <typename T>
Tensor<T> softmax(const Tensor<T>& x, int axis) {
  const int ax = normalize_axis(axis, x.rank());
  const AxisSplit s = split_at(x.shape(), ax);
  const auto& xd = x.node()->data;
  std::vector<T> out(xd.size());
  for (Index o = 0; o < s.outer; ++o) {
    for (Index i = 0; i < s.inner; ++i) {
      const Index base = o * s.n * s.inner + i;
      T mx = xd[base];
      for (Index j = 1; j < s.n; ++j) mx = std::max(mx, xd[base + j * s.inner]);
      T total = 0;
      for (Index j = 0; j < s.n; ++j) {
        const T e = std::exp(xd[base + j * s.inner] - mx);
        out[base + j * s.inner] = e;
        total += e;
      }
      const T inv = T(1) / total;
      for (Index j = 0; j < s.n; ++j) out[base + j * s.inner] *= inv;
    }
  }
  return make_result<T>(x.shape(), std::move(out), "softmax", {x.node()}, [s](NodeT<T>& self) {
    auto& gi = self.inputs[0]->grad_buffer();
    const auto& y = self.data;
    const auto& g = self.grad;
    for (Index o = 0; o < s.outer; ++o) {
      for (Index i = 0; i < s.inner; ++i) {
        const Index base = o * s.n * s.inner + i;
        T dot = 0;
        for (Index j = 0; j < s.n; ++j) dot += g[base + j * s.inner] * y[base + j * s.inner];
        for (Index j = 0; j < s.n; ++j) {
          const Index p = base + j * s.inner;
          gi[p] += y[p] * (g[p] - dot);
        }
      }
    }
  });
}

template <typename T>
Tensor<T> layer_norm(const Tensor<T>& x, const Tensor<T>& gamma, const Tensor<T>& beta, T eps) {
  const Index c = x.dim(-1);
  if (gamma.shape() != Shape{c} || beta.shape() != Shape{c})
    throw ShapeError("layer_norm: gamma/beta must be [" + std::to_string(c) + "], got " +
                     shape_to_string(gamma.shape()) + " and " + shape_to_string(beta.shape()));
  const Index rows = x.numel() / c;
  const auto& xd = x.node()->data;
  const auto& gd = gamma.node()->data;
  const auto& bd = beta.node()->data;
  std::vector<T> out(xd.size());
  auto xhat = std::make_shared<std::vector<T>>(xd.size());
  auto rstd = std::make_shared<std::vector<T>>(rows);
  for (Index r = 0; r < rows; ++r) {
    const T* row = xd.data() + r * c;
    T mu = 0;
    for (Index j = 0; j < c; ++j) mu += row[j];
    mu /= T(c);
    T var = 0;
    for (Index j = 0; j < c; ++j) var += (row[j] - mu) * (row[j] - mu);
    var /= T(c);
    const T inv = T(1) / std::sqrt(var + eps);
    (*rstd)[r] = inv;
    for (Index j = 0; j < c; ++j) {
      const T h = (row[j] - mu) * inv;
      (*xhat)[r * c + j] = h;
      out[r * c + j] = gd[j] * h + bd[j];
    }
  }
  return make_result<T>(
      x.shape(), std::move(out), "layer_norm", {x.node(), gamma.node(), beta.node()},
      [rows, c, xhat, rstd](NodeT<T>& self) {
        auto& nx = *self.inputs[0];
        auto& ng = *self.inputs[1];
        auto& nb = *self.inputs[2];
        const auto& g = self.grad;
        if (ng.requires_grad || nb.requires_grad) {
          for (Index r = 0; r < rows; ++r)
            for (Index j = 0; j < c; ++j) {
              if (ng.requires_grad) ng.grad_buffer()[j] += g[r * c + j] * (*xhat)[r * c + j];
              if (nb.requires_grad) nb.grad_buffer()[j] += g[r * c + j];
            }
        }
        if (nx.requires_grad) {
          auto& gx = nx.grad_buffer();
          for (Index r = 0; r < rows; ++r) {
            T mean_d = 0, mean_dh = 0;
            for (Index j = 0; j < c; ++j) {
              const T d = g[r * c + j] * ng.data[j];
              mean_d += d;
              mean_dh += d * (*xhat)[r * c + j];
            }
            mean_d /= T(c);
            mean_dh /= T(c);
            for (Index j = 0; j < c; ++j) {
              const T d = g[r * c + j] * ng.data[j];
              gx[r * c + j] += (*rstd)[r] * (d - mean_d - (*xhat)[r * c + j] * mean_dh);
            }
          }
        }
      });
}

template <typename T>
Tensor<T> reshape(const Tensor<T>& x, Shape new_shape) {
  Index known = 1;
  int wildcard = -1;
  for (std::size_t i = 0; i < new_shape.size(); ++i) {
    if (new_shape[i] == -1) {
      if (wildcard >= 0) throw ShapeError("reshape: more than one -1 in " + shape_to_string(new_shape));
      wildcard = static_cast<int>(i);
    } else {
      known *= new_shape[i];
    }
  }
  if (wildcard >= 0 && known > 0 && x.numel() % known == 0) new_shape[wildcard] = x.numel() / known;
  if (shape_numel(new_shape) != x.numel() || std::any_of(new_shape.begin(), new_shape.end(), [](Index e) { return e <= 0; }))
    throw ShapeError("reshape: cannot view " + shape_to_string(x.shape()) + " as " + shape_to_string(new_shape));
  return make_result<T>(new_shape, x.node()->data, "reshape", {x.node()}, [](NodeT<T>& self) {
    auto& gi = self.inputs[0]->grad_buffer();
    for (std::size_t i = 0; i < gi.size(); ++i) gi[i] += self.grad[i];
  });
}

template <typename T>
Tensor<T> permute(const Tensor<T>& x, const std::vector<int>& order) {
  const int r = x.rank();
  std::vector<int> sorted(order);
  std::sort(sorted.begin(), sorted.end());
  std::vector<int> iota(r);
  std::iota(iota.begin(), iota.end(), 0);
  if (sorted != iota) throw ShapeError("permute: order is not a permutation of the " + std::to_string(r) + " axes");
  const auto strides = row_major_strides(x.shape());
  Shape out_shape(r);
  std::vector<std::vector<Index>> tables(r);
  for (int i = 0; i < r; ++i) {
    out_shape[i] = x.shape()[order[i]];
    tables[i] = linear_table(out_shape[i], strides[order[i]]);
  }
  const auto& xd = x.node()->data;
  std::vector<T> out(xd.size());
  for_each_mapped(out_shape, tables, [&](Index o, Index in) { out[o] = xd[in]; });
  return make_result<T>(out_shape, std::move(out), "permute", {x.node()},
                        [out_shape, tables = std::move(tables)](NodeT<T>& self) {
                          auto& gi = self.inputs[0]->grad_buffer();
                          const auto& g = self.grad;
                          for_each_mapped(out_shape, tables, [&](Index o, Index in) { gi[in] += g[o]; });
                        });
}

template <typename T>
Tensor<T> transpose_last2(const Tensor<T>& x) {
  const int r = x.rank();
  if (r < 2) throw ShapeError("transpose_last2: rank must be at least 2");
  std::vector<int> order(r);
  std::iota(order.begin(), order.end(), 0);
  std::swap(order[r - 1], order[r - 2]);
  return permute(x, order);
}

template <typename T>
Tensor<T> roll(const Tensor<T>& x, const std::vector<Index>& shifts) {
  const int r = x.rank();
  if (static_cast<int>(shifts.size()) > r)
    throw ShapeError("roll: " + std::to_string(shifts.size()) + " shifts for rank " + std::to_string(r));
  const auto strides = row_major_strides(x.shape());
  std::vector<std::vector<Index>> tables(r);
  for (int ax = 0; ax < r; ++ax) {
    const Index n = x.shape()[ax];
    const Index s = ax < static_cast<int>(shifts.size()) ? ((shifts[ax] % n) + n) % n : 0;
    tables[ax].resize(n);
    for (Index i = 0; i < n; ++i) tables[ax][i] = ((i - s + n) % n) * strides[ax];
  }
  const auto& xd = x.node()->data;
  std::vector<T> out(xd.size());
  for_each_mapped(x.shape(), tables, [&](Index o, Index in) { out[o] = xd[in]; });
  return make_result<T>(x.shape(), std::move(out), "roll", {x.node()},
                        [shape = x.shape(), tables = std::move(tables)](NodeT<T>& self) {
                          auto& gi = self.inputs[0]->grad_buffer();
                          const auto& g = self.grad;
                          for_each_mapped(shape, tables, [&](Index o, Index in) { gi[in] += g[o]; });
                        });
}

template <typename T>
Tensor<T> pad_trailing(const Tensor<T>& x, const std::vector<Index>& pads) {
  const int r = x.rank();
  if (static_cast<int>(pads.size()) > r) throw ShapeError("pad_trailing: more pads than axes");
  if (std::all_of(pads.begin(), pads.end(), [](Index p) { return p == 0; })) return x;
  Shape out_shape = x.shape();
  for (std::size_t i = 0; i < pads.size(); ++i) {
    if (pads[i] < 0) throw ShapeError("pad_trailing: negative pad");
    out_shape[i] += pads[i];
  }
  const auto out_strides = row_major_strides(out_shape);
  std::vector<std::vector<Index>> tables(r);
  for (int ax = 0; ax < r; ++ax) tables[ax] = linear_table(x.shape()[ax], out_strides[ax]);
  const auto& xd = x.node()->data;
  std::vector<T> out(shape_numel(out_shape), T(0));
  for_each_mapped(x.shape(), tables, [&](Index i, Index o) { out[o] = xd[i]; });
  return make_result<T>(out_shape, std::move(out), "pad_trailing", {x.node()},
                        [shape = x.shape(), tables = std::move(tables)](NodeT<T>& self) {
                          auto& gi = self.inputs[0]->grad_buffer();
                          const auto& g = self.grad;
                          for_each_mapped(shape, tables, [&](Index i, Index o) { gi[i] += g[o]; });
                        });
}

template <typename T>
Tensor<T> slice_block(const Tensor<T>& x, const std::vector<Index>& starts, const Shape& extents) {
  const int r = x.rank();
  if (static_cast<int>(starts.size()) != r || static_cast<int>(extents.size()) != r)
    throw ShapeError("slice_block: starts/extents must have rank " + std::to_string(r));
  for (int ax = 0; ax < r; ++ax)
    if (starts[ax] < 0 || extents[ax] <= 0 || starts[ax] + extents[ax] > x.shape()[ax])
      throw ShapeError("slice_block: block out of range for " + shape_to_string(x.shape()));
  if (extents == x.shape()) return x;
  const auto strides = row_major_strides(x.shape());
  std::vector<std::vector<Index>> tables(r);
  for (int ax = 0; ax < r; ++ax) tables[ax] = linear_table(extents[ax], strides[ax], starts[ax]);
  const auto& xd = x.node()->data;
  std::vector<T> out(shape_numel(extents));
  for_each_mapped(extents, tables, [&](Index o, Index in) { out[o] = xd[in]; });
  return make_result<T>(extents, std::move(out), "slice", {x.node()},
                        [extents, tables = std::move(tables)](NodeT<T>& self) {
                          auto& gi = self.inputs[0]->grad_buffer();
                          const auto& g = self.grad;
                          for_each_mapped(extents, tables, [&](Index o, Index in) { gi[in] += g[o]; });
                        });
}

template <typename T>
Tensor<T> slice(const Tensor<T>& x, int axis, Index start, Index length) {
  const int ax = normalize_axis(axis, x.rank());
  std::vector<Index> starts(x.rank(), 0);
  Shape extents = x.shape();
  starts[ax] = start;
  extents[ax] = length;
  return slice_block(x, starts, extents);
}

template <typename T>
Tensor<T> index_select(const Tensor<T>& x, int axis, const std::vector<Index>& indices) {
  const int ax = normalize_axis(axis, x.rank());
  const AxisSplit s = split_at(x.shape(), ax);
  if (indices.empty()) throw ShapeError("index_select: empty index list");
  for (Index i : indices)
    if (i < 0 || i >= s.n) throw ShapeError("index_select: index " + std::to_string(i) + " out of range");
  Shape out_shape = x.shape();
  out_shape[ax] = static_cast<Index>(indices.size());
  const Index m = static_cast<Index>(indices.size());
  const auto& xd = x.node()->data;
  std::vector<T> out(s.outer * m * s.inner);
  for (Index o = 0; o < s.outer; ++o)
    for (Index j = 0; j < m; ++j)
      std::copy_n(xd.data() + (o * s.n + indices[j]) * s.inner, s.inner, out.data() + (o * m + j) * s.inner);
  return make_result<T>(out_shape, std::move(out), "index_select", {x.node()}, [s, m, indices](NodeT<T>& self) {
    auto& gi = self.inputs[0]->grad_buffer();
    const auto& g = self.grad;
    for (Index o = 0; o < s.outer; ++o)
      for (Index j = 0; j < m; ++j) {
        T* dst = gi.data() + (o * s.n + indices[j]) * s.inner;
        const T* src = g.data() + (o * m + j) * s.inner;
        for (Index i = 0; i < s.inner; ++i) dst[i] += src[i];
      }
  });
}

template <typename T>
Tensor<T> stack(const std::vector<Tensor<T>>& parts) {
  if (parts.empty()) throw ShapeError("stack: no tensors");
  const Shape& part_shape = parts[0].shape();
  for (const auto& p : parts) require_same_shape(p.shape(), part_shape, "stack");
  const Index each = parts[0].numel();
  Shape out_shape{static_cast<Index>(parts.size())};
  out_shape.insert(out_shape.end(), part_shape.begin(), part_shape.end());
  std::vector<T> out(each * parts.size());
  std::vector<NodePtrT<T>> inputs;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    std::copy(parts[i].node()->data.begin(), parts[i].node()->data.end(), out.begin() + i * each);
    inputs.push_back(parts[i].node());
  }
  return make_result<T>(out_shape, std::move(out), "stack", std::move(inputs), [each](NodeT<T>& self) {
    for (std::size_t i = 0; i < self.inputs.size(); ++i) {
      auto& in = *self.inputs[i];
      if (!in.requires_grad) continue;
      auto& gi = in.grad_buffer();
      for (Index j = 0; j < each; ++j) gi[j] += self.grad[i * each + j];
    }
  });
}

template <typename T>
Tensor<T> sum(const Tensor<T>& x) {
  const auto& xd = x.node()->data;
  T total = 0;
  for (T v : xd) total += v;
  return make_result<T>(Shape{}, std::vector<T>{total}, "sum", {x.node()}, [](NodeT<T>& self) {
    auto& gi = self.inputs[0]->grad_buffer();
    const T g = self.grad[0];
    for (auto& v : gi) v += g;
  });
}

template <typename T>
Tensor<T> mean(const Tensor<T>& x) {
  return scale(sum(x), T(1) / T(x.numel()));
}

template <typename T>
Tensor<T> sum_axis(const Tensor<T>& x, int axis, bool keepdim) {
  const int ax = normalize_axis(axis, x.rank());
  const AxisSplit s = split_at(x.shape(), ax);
  Shape out_shape = x.shape();
  if (keepdim)
    out_shape[ax] = 1;
  else
    out_shape.erase(out_shape.begin() + ax);
  const auto& xd = x.node()->data;
  std::vector<T> out(s.outer * s.inner, T(0));
  for (Index o = 0; o < s.outer; ++o)
    for (Index j = 0; j < s.n; ++j)
      for (Index i = 0; i < s.inner; ++i) out[o * s.inner + i] += xd[(o * s.n + j) * s.inner + i];
  return make_result<T>(out_shape, std::move(out), "sum_axis", {x.node()}, [s](NodeT<T>& self) {
    auto& gi = self.inputs[0]->grad_buffer();
    for (Index o = 0; o < s.outer; ++o)
      for (Index j = 0; j < s.n; ++j)
        for (Index i = 0; i < s.inner; ++i) gi[(o * s.n + j) * s.inner + i] += self.grad[o * s.inner + i];
  });
}

template <typename T>
Tensor<T> mean_axis(const Tensor<T>& x, int axis, bool keepdim) {
  const int ax = normalize_axis(axis, x.rank());
  return scale(sum_axis(x, ax, keepdim), T(1) / T(x.shape()[ax]));
}

template <typename T>
Tensor<T> dropout(const Tensor<T>& x, T rate, std::mt19937_64& rng) {
  if (rate <= T(0)) return x;
  if (rate >= T(1)) throw ValidationError("dropout rate must be below 1");
  std::bernoulli_distribution keep(1.0 - static_cast<double>(rate));
  std::vector<T> mask(x.numel());
  const T inv = T(1) / (T(1) - rate);
  for (auto& m : mask) m = keep(rng) ? inv : T(0);
  return mul(x, Tensor<T>(x.shape(), std::move(mask)));
}

#define SWIN4D_INSTANTIATE_OPS(T)                                                                     \
  template Tensor<T> matmul(const Tensor<T>&, const Tensor<T>&);                                      \
  template Tensor<T> add(const Tensor<T>&, const Tensor<T>&);                                         \
  template Tensor<T> sub(const Tensor<T>&, const Tensor<T>&);                                         \
  template Tensor<T> mul(const Tensor<T>&, const Tensor<T>&);                                         \
  template Tensor<T> div(const Tensor<T>&, const Tensor<T>&);                                         \
  template Tensor<T> broadcast_add(const Tensor<T>&, const Tensor<T>&);                               \
  template Tensor<T> broadcast_mul(const Tensor<T>&, const Tensor<T>&);                               \
  template Tensor<T> broadcast_div(const Tensor<T>&, const Tensor<T>&);                               \
  template Tensor<T> scale(const Tensor<T>&, T);                                                      \
  template Tensor<T> add_scalar(const Tensor<T>&, T);                                                 \
  template Tensor<T> neg(const Tensor<T>&);                                                           \
  template Tensor<T> exp(const Tensor<T>&);                                                           \
  template Tensor<T> log(const Tensor<T>&);                                                           \
  template Tensor<T> sqrt(const Tensor<T>&);                                                          \
  template Tensor<T> square(const Tensor<T>&);                                                        \
  template Tensor<T> softplus(const Tensor<T>&);                                                      \
  template Tensor<T> gelu(const Tensor<T>&);                                                          \
  template Tensor<T> softmax(const Tensor<T>&, int);                                                  \
  template Tensor<T> layer_norm(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, T);             \
  template Tensor<T> reshape(const Tensor<T>&, Shape);                                                \
  template Tensor<T> permute(const Tensor<T>&, const std::vector<int>&);                              \
  template Tensor<T> transpose_last2(const Tensor<T>&);                                               \
  template Tensor<T> roll(const Tensor<T>&, const std::vector<Index>&);                               \
  template Tensor<T> pad_trailing(const Tensor<T>&, const std::vector<Index>&);                       \
  template Tensor<T> slice_block(const Tensor<T>&, const std::vector<Index>&, const Shape&);           \
  template Tensor<T> slice(const Tensor<T>&, int, Index, Index);                                      \
  template Tensor<T> index_select(const Tensor<T>&, int, const std::vector<Index>&);                  \
  template Tensor<T> stack(const std::vector<Tensor<T>>&);                                            \
  template Tensor<T> sum(const Tensor<T>&);                                                           \
  template Tensor<T> mean(const Tensor<T>&);                                                          \
  template Tensor<T> sum_axis(const Tensor<T>&, int, bool);                                           \
  template Tensor<T> mean_axis(const Tensor<T>&, int, bool);                                          \
  template Tensor<T> dropout(const Tensor<T>&, T, std::mt19937_64&);

SWIN4D_INSTANTIATE_OPS(float)
SWIN4D_INSTANTIATE_OPS(double)

#undef SWIN4D_INSTANTIATE_OPS

}  // namespace swin4d
