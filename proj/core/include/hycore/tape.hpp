#pragma once

#include <cstdint>
#include <deque>
#include <vector>

#include "hycore/tensor.hpp"

namespace hycore::ad {

enum class Op : std::uint8_t {
  kLeaf,
  kAdd,
  kSub,
  kMul,
  kDiv,
  kMatMul,
  kSum,
  kMean,
  kMaxAxis,
  kConcat,
  kTanh,
  kAtanh,
  kAcoshSafe,
  kSqrt,
  kSquare,
  kDot,
  kNorm,
  kClamp,
  kRelu,
  kLog,
  kExp,
  kSoftmax,
  kNeg,
  kScale,
};

class Tape;

/// Handle to a node on a Tape. Cheap to copy; valid as long as the tape lives.
struct Var {
  Tape* tape = nullptr;
  std::int32_t idx = -1;

  const Tensor& value() const;
};

/// Reverse-mode tape. Records one forward evaluation (define-by-run, so data
/// dependent control flow is fine) and differentiates it once. A tape is
/// single-threaded; independent tapes may run on independent threads.
///
/// Subgradient conventions: max picks the first attaining index, relu and
/// clamp pass gradient only strictly inside their linear region, so a hinge
/// sitting exactly at zero propagates zero. atanh clamps its argument to
/// |u| <= 1 - 1e-7 and division denominators are floored at 1e-15 in both
/// passes, mirroring the geometry module's guards.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Owned leaf.
  Var leaf(Tensor value, bool requires_grad = false);
  /// Borrowed differentiable leaf; caller keeps `value` alive and unchanged
  /// until the tape is dropped. This is how shared model parameters enter
  /// per-sample tapes without copies.
  Var param(const Tensor& value);
  Var constant(Tensor value);
  Var constant(double scalar);

  const Tensor& value(Var v) const;
  bool requires_grad(Var v) const;

  /// Reverse sweep from a scalar loss. Each tape may run this once.
  void backward(Var loss);
  /// Gradient accumulated for `v` during backward (zeros if none reached it).
  const Tensor& grad(Var v);

  std::size_t node_count() const { return nodes_.size(); }

  /// Generic dispatcher over every primitive; the named free functions below
  /// are thin wrappers. p0/p1 carry clamp bounds or the scale factor, axis
  /// feeds max_axis.
  Var apply(Op op, const std::vector<Var>& inputs, double p0 = 0.0, double p1 = 0.0,
            int axis = 0);

 private:
  friend Var add(Var a, Var b);
  friend Var sub(Var a, Var b);
  friend Var mul(Var a, Var b);
  friend Var div(Var a, Var b);
  friend Var matmul(Var a, Var b);
  friend Var sum(Var a);
  friend Var mean(Var a);
  friend Var max_axis(Var a, int axis);
  friend Var concat(Var a, Var b);
  friend Var tanh(Var a);
  friend Var atanh(Var a);
  friend Var acosh_safe(Var a);
  friend Var sqrt(Var a);
  friend Var square(Var a);
  friend Var dot(Var a, Var b);
  friend Var norm(Var a);
  friend Var clamp(Var a, double lo, double hi);
  friend Var relu(Var a);
  friend Var log(Var a);
  friend Var exp(Var a);
  friend Var softmax(Var a);
  friend Var neg(Var a);
  friend Var scale(Var a, double k);

  struct Node {
    Op op = Op::kLeaf;
    std::int32_t a = -1;
    std::int32_t b = -1;
    double p0 = 0.0;
    double p1 = 0.0;
    std::int32_t axis = 0;
    bool requires_grad = false;
    Tensor out;                        // owned output (unused for borrowed leaf)
    const Tensor* borrowed = nullptr;  // borrowed leaf storage
    std::vector<std::int32_t> aux;     // argmax indices for kMaxAxis
  };

  const Tensor& out_of(std::int32_t i) const {
    const Node& n = nodes_[i];
    return n.borrowed ? *n.borrowed : n.out;
  }
  Var push(Node n);
  Var unary(Op op, Var a, double p0 = 0.0, double p1 = 0.0);
  Var binary(Op op, Var a, Var b);
  template <typename F>
  static Var elementwise(Op op, Var a, F&& f, double p0 = 0.0, double p1 = 0.0);
  void backward_node(std::int32_t i);
  Tensor& grad_buffer(std::int32_t i);

  // deque: node references must survive graph growth
  std::deque<Node> nodes_;
  std::vector<Tensor> grads_;
  bool consumed_ = false;
};

// ----- primitives ----------------------------------------------------------
// add/sub also accept (n,m) op (m) row broadcast and tensor op scalar;
// mul/div also accept scalar against tensor. matmul covers (n,k)@(k,m) and
// (n,k)@(k). Reductions sum/mean/dot/norm produce scalars.

Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var div(Var a, Var b);
Var matmul(Var a, Var b);
Var sum(Var a);
Var mean(Var a);
Var max_axis(Var a, int axis);
Var concat(Var a, Var b);
Var tanh(Var a);
Var atanh(Var a);
Var acosh_safe(Var a);
Var sqrt(Var a);
Var square(Var a);
Var dot(Var a, Var b);
Var norm(Var a);
Var clamp(Var a, double lo, double hi);
Var relu(Var a);
Var log(Var a);
Var exp(Var a);
Var softmax(Var a);
Var neg(Var a);
Var scale(Var a, double k);

inline Var operator+(Var a, Var b) { return add(a, b); }
inline Var operator-(Var a, Var b) { return sub(a, b); }
inline Var operator*(Var a, Var b) { return mul(a, b); }
inline Var operator/(Var a, Var b) { return div(a, b); }
inline Var operator-(Var a) { return neg(a); }
inline Var operator*(Var a, double k) { return scale(a, k); }
inline Var operator*(double k, Var a) { return scale(a, k); }

}  // namespace hycore::ad
