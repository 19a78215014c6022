#include "hycore/tape.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "hycore/geometry.hpp"  // shared numerical guards

namespace hycore::ad {

namespace {

using ERowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<const ERowMat>;
using MapMatMut = Eigen::Map<ERowMat>;
using MapVec = Eigen::Map<const Eigen::VectorXd>;
using MapVecMut = Eigen::Map<Eigen::VectorXd>;

constexpr double kDivFloor = 1e-15;
constexpr double kLogFloor = 1e-300;

double floored(double b) {
  const double f = std::max(std::abs(b), kDivFloor);
  return b < 0.0 ? -f : f;
}

double clamp_atanh_arg(double u) {
  return std::clamp(u, -geo::kAtanhArgMax, geo::kAtanhArgMax);
}

enum class Bcast { kSame, kRowVec, kScalarRight, kScalarLeft };

Bcast elementwise_mode(const Tensor& a, const Tensor& b, bool allow_rowvec,
                       const char* opname) {
  if (a.same_shape(b)) return Bcast::kSame;
  if (b.is_scalar()) return Bcast::kScalarRight;
  if (a.is_scalar()) return Bcast::kScalarLeft;
  if (allow_rowvec && a.rank() == 2 && b.rank() == 1 && b.size() == a.cols())
    return Bcast::kRowVec;
  throw std::invalid_argument(std::string(opname) + ": shape mismatch");
}

[[noreturn]] void bad_shape(const char* opname) {
  throw std::invalid_argument(std::string(opname) + ": unsupported shape");
}

}  // namespace

const Tensor& Var::value() const { return tape->value(*this); }

Var Tape::push(Node n) {
  nodes_.push_back(std::move(n));
  return Var{this, static_cast<std::int32_t>(nodes_.size() - 1)};
}

Var Tape::leaf(Tensor value, bool requires_grad) {
  Node n;
  n.op = Op::kLeaf;
  n.requires_grad = requires_grad;
  n.out = std::move(value);
  return push(std::move(n));
}

Var Tape::param(const Tensor& value) {
  Node n;
  n.op = Op::kLeaf;
  n.requires_grad = true;
  n.borrowed = &value;
  return push(std::move(n));
}

Var Tape::constant(Tensor value) { return leaf(std::move(value), false); }
Var Tape::constant(double scalar) { return leaf(Tensor::scalar(scalar), false); }

const Tensor& Tape::value(Var v) const { return out_of(v.idx); }

bool Tape::requires_grad(Var v) const { return nodes_[v.idx].requires_grad; }

Var Tape::unary(Op op, Var a, double p0, double p1) {
  Node n;
  n.op = op;
  n.a = a.idx;
  n.p0 = p0;
  n.p1 = p1;
  n.requires_grad = nodes_[a.idx].requires_grad;
  return push(std::move(n));
}

Var Tape::binary(Op op, Var a, Var b) {
  if (a.tape != b.tape) throw std::invalid_argument("tape: operands from different tapes");
  Node n;
  n.op = op;
  n.a = a.idx;
  n.b = b.idx;
  n.requires_grad = nodes_[a.idx].requires_grad || nodes_[b.idx].requires_grad;
  return push(std::move(n));
}

// ----- forward --------------------------------------------------------------

Var add(Var a, Var b) {
  Tape& t = *a.tape;
  const Tensor& x = a.value();
  const Tensor& y = b.value();
  const Bcast mode = elementwise_mode(x, y, true, "add");
  Var out = t.binary(Op::kAdd, a, b);
  Tensor& o = t.nodes_[out.idx].out;
  switch (mode) {
    case Bcast::kSame:
      o = Tensor(x.shape, x.v);
      for (std::size_t i = 0; i < o.size(); ++i) o.v[i] += y.v[i];
      break;
    case Bcast::kRowVec: {
      o = Tensor(x.shape, x.v);
      const std::size_t m = x.cols();
      for (std::size_t r = 0; r < x.rows(); ++r)
        for (std::size_t j = 0; j < m; ++j) o.v[r * m + j] += y.v[j];
      break;
    }
    case Bcast::kScalarRight:
      o = Tensor(x.shape, x.v);
      for (auto& e : o.v) e += y.v[0];
      break;
    case Bcast::kScalarLeft:
      o = Tensor(y.shape, y.v);
      for (auto& e : o.v) e += x.v[0];
      break;
  }
  return out;
}

Var sub(Var a, Var b) {
  Tape& t = *a.tape;
  const Tensor& x = a.value();
  const Tensor& y = b.value();
  const Bcast mode = elementwise_mode(x, y, true, "sub");
  Var out = t.binary(Op::kSub, a, b);
  Tensor& o = t.nodes_[out.idx].out;
  switch (mode) {
    case Bcast::kSame:
      o = Tensor(x.shape, x.v);
      for (std::size_t i = 0; i < o.size(); ++i) o.v[i] -= y.v[i];
      break;
    case Bcast::kRowVec: {
      o = Tensor(x.shape, x.v);
      const std::size_t m = x.cols();
      for (std::size_t r = 0; r < x.rows(); ++r)
        for (std::size_t j = 0; j < m; ++j) o.v[r * m + j] -= y.v[j];
      break;
    }
    case Bcast::kScalarRight:
      o = Tensor(x.shape, x.v);
      for (auto& e : o.v) e -= y.v[0];
      break;
    case Bcast::kScalarLeft:
      o = Tensor::zeros_like(y);
      for (std::size_t i = 0; i < o.size(); ++i) o.v[i] = x.v[0] - y.v[i];
      break;
  }
  return out;
}

Var mul(Var a, Var b) {
  Tape& t = *a.tape;
  const Tensor& x = a.value();
  const Tensor& y = b.value();
  const Bcast mode = elementwise_mode(x, y, false, "mul");
  Var out = t.binary(Op::kMul, a, b);
  Tensor& o = t.nodes_[out.idx].out;
  switch (mode) {
    case Bcast::kSame:
      o = Tensor(x.shape, x.v);
      for (std::size_t i = 0; i < o.size(); ++i) o.v[i] *= y.v[i];
      break;
    case Bcast::kScalarRight:
      o = Tensor(x.shape, x.v);
      for (auto& e : o.v) e *= y.v[0];
      break;
    case Bcast::kScalarLeft:
      o = Tensor(y.shape, y.v);
      for (auto& e : o.v) e *= x.v[0];
      break;
    default:
      bad_shape("mul");
  }
  return out;
}

Var div(Var a, Var b) {
  Tape& t = *a.tape;
  const Tensor& x = a.value();
  const Tensor& y = b.value();
  const Bcast mode = elementwise_mode(x, y, false, "div");
  Var out = t.binary(Op::kDiv, a, b);
  Tensor& o = t.nodes_[out.idx].out;
  switch (mode) {
    case Bcast::kSame:
      o = Tensor(x.shape, x.v);
      for (std::size_t i = 0; i < o.size(); ++i) o.v[i] /= floored(y.v[i]);
      break;
    case Bcast::kScalarRight:
      o = Tensor(x.shape, x.v);
      for (auto& e : o.v) e /= floored(y.v[0]);
      break;
    case Bcast::kScalarLeft:
      o = Tensor::zeros_like(y);
      for (std::size_t i = 0; i < o.size(); ++i) o.v[i] = x.v[0] / floored(y.v[i]);
      break;
    default:
      bad_shape("div");
  }
  return out;
}

Var matmul(Var a, Var b) {
  Tape& t = *a.tape;
  const Tensor& x = a.value();
  const Tensor& y = b.value();
  Var out = t.binary(Op::kMatMul, a, b);
  Tensor& o = t.nodes_[out.idx].out;
  if (x.rank() == 2 && y.rank() == 2) {
    if (x.cols() != y.rows()) bad_shape("matmul");
    o = Tensor::zeros({x.rows(), y.cols()});
    MapMatMut(o.v.data(), o.rows(), o.cols()).noalias() =
        MapMat(x.v.data(), x.rows(), x.cols()) * MapMat(y.v.data(), y.rows(), y.cols());
  } else if (x.rank() == 2 && y.rank() == 1) {
    if (x.cols() != y.size()) bad_shape("matmul");
    o = Tensor::zeros({x.rows()});
    MapVecMut(o.v.data(), o.size()).noalias() =
        MapMat(x.v.data(), x.rows(), x.cols()) * MapVec(y.v.data(), y.size());
  } else {
    bad_shape("matmul");
  }
  return out;
}

Var sum(Var a) {
  Tape& t = *a.tape;
  const Tensor& x = a.value();
  Var out = t.unary(Op::kSum, a);
  double s = 0.0;
  for (double e : x.v) s += e;
  t.nodes_[out.idx].out = Tensor::scalar(s);
  return out;
}

Var mean(Var a) {
  Tape& t = *a.tape;
  const Tensor& x = a.value();
  if (x.size() == 0) throw std::invalid_argument("mean: empty tensor");
  Var out = t.unary(Op::kMean, a);
  double s = 0.0;
  for (double e : x.v) s += e;
  t.nodes_[out.idx].out = Tensor::scalar(s / static_cast<double>(x.size()));
  return out;
}

Var max_axis(Var a, int axis) {
  Tape& t = *a.tape;
  const Tensor& x = a.value();
  if (x.size() == 0) throw std::invalid_argument("max_axis: empty tensor");
  Var out = t.unary(Op::kMaxAxis, a);
  Tape::Node& n = t.nodes_[out.idx];
  n.axis = axis;
  if (x.rank() == 1) {
    if (axis != 0) bad_shape("max_axis");
    std::size_t arg = 0;
    for (std::size_t i = 1; i < x.size(); ++i)
      if (x.v[i] > x.v[arg]) arg = i;
    n.aux = {static_cast<std::int32_t>(arg)};
    n.out = Tensor::scalar(x.v[arg]);
  } else if (x.rank() == 2 && axis == 0) {
    const std::size_t rows = x.rows(), cols = x.cols();
    n.aux.assign(cols, 0);
    Tensor o = Tensor::zeros({cols});
    for (std::size_t j = 0; j < cols; ++j) {
      std::size_t arg = 0;
      for (std::size_t i = 1; i < rows; ++i)
        if (x.at(i, j) > x.at(arg, j)) arg = i;
      n.aux[j] = static_cast<std::int32_t>(arg);
      o.v[j] = x.at(arg, j);
    }
    n.out = std::move(o);
  } else if (x.rank() == 2 && axis == 1) {
    const std::size_t rows = x.rows(), cols = x.cols();
    n.aux.assign(rows, 0);
    Tensor o = Tensor::zeros({rows});
    for (std::size_t i = 0; i < rows; ++i) {
      std::size_t arg = 0;
      for (std::size_t j = 1; j < cols; ++j)
        if (x.at(i, j) > x.at(i, arg)) arg = j;
      n.aux[i] = static_cast<std::int32_t>(arg);
      o.v[i] = x.at(i, arg);
    }
    n.out = std::move(o);
  } else {
    bad_shape("max_axis");
  }
  return out;
}

Var concat(Var a, Var b) {
  Tape& t = *a.tape;
  const Tensor& x = a.value();
  const Tensor& y = b.value();
  if (x.rank() != 1 || y.rank() != 1) bad_shape("concat");
  Var out = t.binary(Op::kConcat, a, b);
  std::vector<double> data = x.v;
  data.insert(data.end(), y.v.begin(), y.v.end());
  t.nodes_[out.idx].out = Tensor::vector(std::move(data));
  return out;
}

template <typename F>
Var Tape::elementwise(Op op, Var a, F&& f, double p0, double p1) {
  Tape& t = *a.tape;
  const Tensor& x = a.value();
  Var out = t.unary(op, a, p0, p1);
  Tensor o = Tensor(x.shape, x.v);
  for (auto& e : o.v) e = f(e);
  t.nodes_[out.idx].out = std::move(o);
  return out;
}

Var tanh(Var a) {
  return Tape::elementwise(Op::kTanh, a, [](double x) { return std::tanh(x); });
}

Var atanh(Var a) {
  return Tape::elementwise(Op::kAtanh, a,
                           [](double x) { return std::atanh(clamp_atanh_arg(x)); });
}

Var acosh_safe(Var a) {
  return Tape::elementwise(Op::kAcoshSafe, a,
                           [](double x) { return std::acosh(std::max(x, 1.0)); });
}

Var sqrt(Var a) {
  return Tape::elementwise(Op::kSqrt, a, [](double x) { return std::sqrt(std::max(x, 0.0)); });
}

Var square(Var a) {
  return Tape::elementwise(Op::kSquare, a, [](double x) { return x * x; });
}

Var dot(Var a, Var b) {
  Tape& t = *a.tape;
  const Tensor& x = a.value();
  const Tensor& y = b.value();
  if (x.rank() != 1 || !x.same_shape(y)) bad_shape("dot");
  Var out = t.binary(Op::kDot, a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x.v[i] * y.v[i];
  t.nodes_[out.idx].out = Tensor::scalar(s);
  return out;
}

Var norm(Var a) {
  Tape& t = *a.tape;
  const Tensor& x = a.value();
  if (x.rank() != 1) bad_shape("norm");
  Var out = t.unary(Op::kNorm, a);
  double s = 0.0;
  for (double e : x.v) s += e * e;
  t.nodes_[out.idx].out = Tensor::scalar(std::sqrt(s));
  return out;
}

Var clamp(Var a, double lo, double hi) {
  return Tape::elementwise(Op::kClamp, a,
                           [lo, hi](double x) { return std::clamp(x, lo, hi); }, lo, hi);
}

Var relu(Var a) {
  return Tape::elementwise(Op::kRelu, a, [](double x) { return x > 0.0 ? x : 0.0; });
}

Var log(Var a) {
  return Tape::elementwise(Op::kLog, a,
                           [](double x) { return std::log(std::max(x, kLogFloor)); });
}

Var exp(Var a) {
  return Tape::elementwise(Op::kExp, a, [](double x) { return std::exp(x); });
}

Var softmax(Var a) {
  Tape& t = *a.tape;
  const Tensor& x = a.value();
  if (x.rank() != 1 || x.size() == 0) bad_shape("softmax");
  Var out = t.unary(Op::kSoftmax, a);
  const double mx = *std::max_element(x.v.begin(), x.v.end());
  Tensor o = Tensor(x.shape, x.v);
  double z = 0.0;
  for (auto& e : o.v) {
    e = std::exp(e - mx);
    z += e;
  }
  for (auto& e : o.v) e /= z;
  t.nodes_[out.idx].out = std::move(o);
  return out;
}

Var neg(Var a) {
  return Tape::elementwise(Op::kNeg, a, [](double x) { return -x; });
}

Var scale(Var a, double k) {
  return Tape::elementwise(Op::kScale, a, [k](double x) { return k * x; }, k);
}

Var Tape::apply(Op op, const std::vector<Var>& in, double p0, double p1, int axis) {
  switch (op) {
    case Op::kAdd: return ad::add(in.at(0), in.at(1));
    case Op::kSub: return ad::sub(in.at(0), in.at(1));
    case Op::kMul: return ad::mul(in.at(0), in.at(1));
    case Op::kDiv: return ad::div(in.at(0), in.at(1));
    case Op::kMatMul: return ad::matmul(in.at(0), in.at(1));
    case Op::kSum: return ad::sum(in.at(0));
    case Op::kMean: return ad::mean(in.at(0));
    case Op::kMaxAxis: return ad::max_axis(in.at(0), axis);
    case Op::kConcat: return ad::concat(in.at(0), in.at(1));
    case Op::kTanh: return ad::tanh(in.at(0));
    case Op::kAtanh: return ad::atanh(in.at(0));
    case Op::kAcoshSafe: return ad::acosh_safe(in.at(0));
    case Op::kSqrt: return ad::sqrt(in.at(0));
    case Op::kSquare: return ad::square(in.at(0));
    case Op::kDot: return ad::dot(in.at(0), in.at(1));
    case Op::kNorm: return ad::norm(in.at(0));
    case Op::kClamp: return ad::clamp(in.at(0), p0, p1);
    case Op::kRelu: return ad::relu(in.at(0));
    case Op::kLog: return ad::log(in.at(0));
    case Op::kExp: return ad::exp(in.at(0));
    case Op::kSoftmax: return ad::softmax(in.at(0));
    case Op::kNeg: return ad::neg(in.at(0));
    case Op::kScale: return ad::scale(in.at(0), p0);
    case Op::kLeaf: break;
  }
  throw std::invalid_argument("apply: not a primitive");
}

// ----- backward -------------------------------------------------------------

Tensor& Tape::grad_buffer(std::int32_t i) {
  if (grads_[i].empty()) grads_[i] = Tensor::zeros_like(out_of(i));
  return grads_[i];
}

void Tape::backward(Var loss) {
  if (loss.tape != this) throw std::invalid_argument("backward: loss from another tape");
  if (consumed_) throw std::logic_error("backward: graph already consumed");
  if (!value(loss).is_scalar()) throw std::invalid_argument("backward: loss must be scalar");
  consumed_ = true;
  grads_.assign(nodes_.size(), Tensor{});
  grads_[loss.idx] = Tensor::scalar(1.0);
  for (std::int32_t i = loss.idx; i >= 0; --i) {
    if (!nodes_[i].requires_grad || grads_[i].empty()) continue;
    if (nodes_[i].op != Op::kLeaf) backward_node(i);
  }
}

const Tensor& Tape::grad(Var v) {
  if (!consumed_) throw std::logic_error("grad: backward has not run");
  if (grads_[v.idx].empty()) grads_[v.idx] = Tensor::zeros_like(out_of(v.idx));
  return grads_[v.idx];
}

void Tape::backward_node(std::int32_t i) {
  const Node& n = nodes_[i];
  const Tensor& g = grads_[i];
  const bool need_a = n.a >= 0 && nodes_[n.a].requires_grad;
  const bool need_b = n.b >= 0 && nodes_[n.b].requires_grad;
  if (!need_a && !need_b) return;
  const Tensor& x = n.a >= 0 ? out_of(n.a) : n.out;
  const Tensor& y = n.b >= 0 ? out_of(n.b) : n.out;

  switch (n.op) {
    case Op::kAdd:
    case Op::kSub: {
      const double sign_b = n.op == Op::kSub ? -1.0 : 1.0;
      if (need_a) {
        Tensor& ga = grad_buffer(n.a);
        if (x.same_shape(g)) {
          for (std::size_t k = 0; k < g.size(); ++k) ga.v[k] += g.v[k];
        } else {  // a was the scalar side
          double s = 0.0;
          for (double e : g.v) s += e;
          ga.v[0] += s;
        }
      }
      if (need_b) {
        Tensor& gb = grad_buffer(n.b);
        if (y.same_shape(g)) {
          for (std::size_t k = 0; k < g.size(); ++k) gb.v[k] += sign_b * g.v[k];
        } else if (y.is_scalar()) {
          double s = 0.0;
          for (double e : g.v) s += e;
          gb.v[0] += sign_b * s;
        } else {  // row-vector broadcast over rows of g
          const std::size_t m = g.cols();
          for (std::size_t r = 0; r < g.rows(); ++r)
            for (std::size_t j = 0; j < m; ++j) gb.v[j] += sign_b * g.v[r * m + j];
        }
      }
      break;
    }
    case Op::kMul: {
      if (x.same_shape(y)) {
        if (need_a) {
          Tensor& ga = grad_buffer(n.a);
          for (std::size_t k = 0; k < g.size(); ++k) ga.v[k] += g.v[k] * y.v[k];
        }
        if (need_b) {
          Tensor& gb = grad_buffer(n.b);
          for (std::size_t k = 0; k < g.size(); ++k) gb.v[k] += g.v[k] * x.v[k];
        }
      } else if (y.is_scalar()) {
        if (need_a) {
          Tensor& ga = grad_buffer(n.a);
          for (std::size_t k = 0; k < g.size(); ++k) ga.v[k] += g.v[k] * y.v[0];
        }
        if (need_b) {
          double s = 0.0;
          for (std::size_t k = 0; k < g.size(); ++k) s += g.v[k] * x.v[k];
          grad_buffer(n.b).v[0] += s;
        }
      } else {  // x scalar
        if (need_a) {
          double s = 0.0;
          for (std::size_t k = 0; k < g.size(); ++k) s += g.v[k] * y.v[k];
          grad_buffer(n.a).v[0] += s;
        }
        if (need_b) {
          Tensor& gb = grad_buffer(n.b);
          for (std::size_t k = 0; k < g.size(); ++k) gb.v[k] += g.v[k] * x.v[0];
        }
      }
      break;
    }
    case Op::kDiv: {
      if (x.same_shape(y)) {
        for (std::size_t k = 0; k < g.size(); ++k) {
          const double bf = floored(y.v[k]);
          if (need_a) grad_buffer(n.a).v[k] += g.v[k] / bf;
          if (need_b) grad_buffer(n.b).v[k] -= g.v[k] * x.v[k] / (bf * bf);
        }
      } else if (y.is_scalar()) {
        const double bf = floored(y.v[0]);
        if (need_a) {
          Tensor& ga = grad_buffer(n.a);
          for (std::size_t k = 0; k < g.size(); ++k) ga.v[k] += g.v[k] / bf;
        }
        if (need_b) {
          double s = 0.0;
          for (std::size_t k = 0; k < g.size(); ++k) s += g.v[k] * x.v[k];
          grad_buffer(n.b).v[0] -= s / (bf * bf);
        }
      } else {  // x scalar
        if (need_a) {
          double s = 0.0;
          for (std::size_t k = 0; k < g.size(); ++k) s += g.v[k] / floored(y.v[k]);
          grad_buffer(n.a).v[0] += s;
        }
        if (need_b) {
          Tensor& gb = grad_buffer(n.b);
          for (std::size_t k = 0; k < g.size(); ++k) {
            const double bf = floored(y.v[k]);
            gb.v[k] -= g.v[k] * x.v[0] / (bf * bf);
          }
        }
      }
      break;
    }
    case Op::kMatMul: {
      if (x.rank() == 2 && y.rank() == 2) {
        MapMat gm(g.v.data(), g.rows(), g.cols());
        if (need_a) {
          Tensor& ga = grad_buffer(n.a);
          MapMatMut(ga.v.data(), ga.rows(), ga.cols()).noalias() +=
              gm * MapMat(y.v.data(), y.rows(), y.cols()).transpose();
        }
        if (need_b) {
          Tensor& gb = grad_buffer(n.b);
          MapMatMut(gb.v.data(), gb.rows(), gb.cols()).noalias() +=
              MapMat(x.v.data(), x.rows(), x.cols()).transpose() * gm;
        }
      } else {  // (n,k) @ (k)
        MapVec gv(g.v.data(), g.size());
        if (need_a) {
          Tensor& ga = grad_buffer(n.a);
          MapMatMut(ga.v.data(), ga.rows(), ga.cols()).noalias() +=
              gv * MapVec(y.v.data(), y.size()).transpose();
        }
        if (need_b) {
          Tensor& gb = grad_buffer(n.b);
          MapVecMut(gb.v.data(), gb.size()).noalias() +=
              MapMat(x.v.data(), x.rows(), x.cols()).transpose() * gv;
        }
      }
      break;
    }
    case Op::kSum: {
      Tensor& ga = grad_buffer(n.a);
      for (auto& e : ga.v) e += g.v[0];
      break;
    }
    case Op::kMean: {
      Tensor& ga = grad_buffer(n.a);
      const double w = g.v[0] / static_cast<double>(ga.size());
      for (auto& e : ga.v) e += w;
      break;
    }
    case Op::kMaxAxis: {
      Tensor& ga = grad_buffer(n.a);
      if (x.rank() == 1) {
        ga.v[n.aux[0]] += g.v[0];
      } else if (n.axis == 0) {
        const std::size_t m = x.cols();
        for (std::size_t j = 0; j < m; ++j)
          ga.v[static_cast<std::size_t>(n.aux[j]) * m + j] += g.v[j];
      } else {
        const std::size_t m = x.cols();
        for (std::size_t r = 0; r < x.rows(); ++r)
          ga.v[r * m + static_cast<std::size_t>(n.aux[r])] += g.v[r];
      }
      break;
    }
    case Op::kConcat: {
      const std::size_t na = x.size();
      if (need_a) {
        Tensor& ga = grad_buffer(n.a);
        for (std::size_t k = 0; k < na; ++k) ga.v[k] += g.v[k];
      }
      if (need_b) {
        Tensor& gb = grad_buffer(n.b);
        for (std::size_t k = 0; k < gb.size(); ++k) gb.v[k] += g.v[na + k];
      }
      break;
    }
    case Op::kTanh: {
      Tensor& ga = grad_buffer(n.a);
      for (std::size_t k = 0; k < g.size(); ++k)
        ga.v[k] += g.v[k] * (1.0 - n.out.v[k] * n.out.v[k]);
      break;
    }
    case Op::kAtanh: {
      // derivative at the clamped argument, consistent with the forward value
      Tensor& ga = grad_buffer(n.a);
      for (std::size_t k = 0; k < g.size(); ++k) {
        const double u = clamp_atanh_arg(x.v[k]);
        ga.v[k] += g.v[k] / (1.0 - u * u);
      }
      break;
    }
    case Op::kAcoshSafe: {
      Tensor& ga = grad_buffer(n.a);
      for (std::size_t k = 0; k < g.size(); ++k) {
        const double u = std::max(x.v[k], 1.0);
        ga.v[k] += g.v[k] / std::sqrt(std::max(u * u - 1.0, 1e-12));
      }
      break;
    }
    case Op::kSqrt: {
      Tensor& ga = grad_buffer(n.a);
      for (std::size_t k = 0; k < g.size(); ++k)
        ga.v[k] += g.v[k] / (2.0 * std::max(n.out.v[k], kDivFloor));
      break;
    }
    case Op::kSquare: {
      Tensor& ga = grad_buffer(n.a);
      for (std::size_t k = 0; k < g.size(); ++k) ga.v[k] += g.v[k] * 2.0 * x.v[k];
      break;
    }
    case Op::kDot: {
      if (need_a) {
        Tensor& ga = grad_buffer(n.a);
        for (std::size_t k = 0; k < ga.size(); ++k) ga.v[k] += g.v[0] * y.v[k];
      }
      if (need_b) {
        Tensor& gb = grad_buffer(n.b);
        for (std::size_t k = 0; k < gb.size(); ++k) gb.v[k] += g.v[0] * x.v[k];
      }
      break;
    }
    case Op::kNorm: {
      Tensor& ga = grad_buffer(n.a);
      const double nv = std::max(n.out.v[0], geo::kNormFloor);
      for (std::size_t k = 0; k < ga.size(); ++k) ga.v[k] += g.v[0] * x.v[k] / nv;
      break;
    }
    case Op::kClamp: {
      Tensor& ga = grad_buffer(n.a);
      for (std::size_t k = 0; k < g.size(); ++k)
        if (x.v[k] > n.p0 && x.v[k] < n.p1) ga.v[k] += g.v[k];
      break;
    }
    case Op::kRelu: {
      Tensor& ga = grad_buffer(n.a);
      for (std::size_t k = 0; k < g.size(); ++k)
        if (x.v[k] > 0.0) ga.v[k] += g.v[k];
      break;
    }
    case Op::kLog: {
      Tensor& ga = grad_buffer(n.a);
      for (std::size_t k = 0; k < g.size(); ++k)
        ga.v[k] += g.v[k] / std::max(x.v[k], kLogFloor);
      break;
    }
    case Op::kExp: {
      Tensor& ga = grad_buffer(n.a);
      for (std::size_t k = 0; k < g.size(); ++k) ga.v[k] += g.v[k] * n.out.v[k];
      break;
    }
    case Op::kSoftmax: {
      Tensor& ga = grad_buffer(n.a);
      double s = 0.0;
      for (std::size_t k = 0; k < g.size(); ++k) s += g.v[k] * n.out.v[k];
      for (std::size_t k = 0; k < g.size(); ++k)
        ga.v[k] += n.out.v[k] * (g.v[k] - s);
      break;
    }
    case Op::kNeg: {
      Tensor& ga = grad_buffer(n.a);
      for (std::size_t k = 0; k < g.size(); ++k) ga.v[k] -= g.v[k];
      break;
    }
    case Op::kScale: {
      Tensor& ga = grad_buffer(n.a);
      for (std::size_t k = 0; k < g.size(); ++k) ga.v[k] += g.v[k] * n.p0;
      break;
    }
    case Op::kLeaf:
      break;
  }
}

}  // namespace hycore::ad
