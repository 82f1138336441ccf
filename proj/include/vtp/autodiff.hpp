#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vtp/errors.hpp"

namespace vtp::ad {

using Shape = std::vector<int>;

std::size_t numel(const Shape& s);
std::string shape_str(const Shape& s);

// Dense 64-bit tensor. Trainable tensors keep a gradient slot of the same
// shape; activations live on the Tape instead.
struct Tensor {
  Shape shape;
  std::vector<double> v;  // row-major
  std::vector<double> g;

  Tensor() = default;
  Tensor(Shape s, std::vector<double> values);

  static Tensor zeros(const Shape& s, bool with_grad = true);
  static Tensor full(const Shape& s, double fill, bool with_grad = true);

  std::size_t size() const { return v.size(); }
  void zero_grad() { std::fill(g.begin(), g.end(), 0.0); }
  bool finite() const;
};

// Handle to a node on a Tape; valid only for the tape that created it.
struct Ref {
  std::int32_t id = -1;
  bool valid() const { return id >= 0; }
};

// Reverse-mode tape over dense tensors. Forward values are computed eagerly
// as ops are recorded; backward() replays the records in reverse recording
// order (= reverse topological order), accumulating gradients with +=.
// Gradients reaching a param() leaf are added into the bound Tensor's grad
// slot, so batches accumulate naturally across tapes.
//
// Single-threaded per tape; independent tapes are safe concurrently.
class Tape {
 public:
  Tape();

  // leaves
  Ref constant(Shape shape, std::vector<double> values);
  Ref constant(const Tensor& t);
  Ref scalar(double x);
  Ref param(Tensor& t);  // t must outlive the tape

  // primitives
  Ref add(Ref a, Ref b);
  Ref sub(Ref a, Ref b);
  Ref mul(Ref a, Ref b);
  Ref tanh(Ref a);
  Ref sigmoid(Ref a);
  Ref relu(Ref a);
  Ref sqrt(Ref a);
  Ref recip(Ref a);
  Ref matmul(Ref a, Ref b);   // {m,k}x{k,n} -> {m,n}, or {m,k}x{k} -> {m}
  Ref softmax(Ref a);         // 1-d, numerically stabilized
  Ref concat(Ref a, Ref b);   // 1-d
  Ref dot(Ref a, Ref b);      // 1-d -> scalar
  Ref scale(Ref vec, Ref s);  // vector times scalar node
  Ref sum(Ref a);             // -> scalar
  Ref index(Ref t, int flat_index);  // single element -> scalar

  // access
  const Shape& shape(Ref r) const;
  std::span<const double> values(Ref r) const;
  double value(Ref r) const;  // scalar nodes only
  std::span<const double> grad(Ref r) const;

  // Replays backward rules from `loss` (must be scalar). Node gradients are
  // reset at entry, so repeated calls produce bit-identical results.
  void backward(Ref loss);

  // Sign pattern of every kinked activation input (relu, sqrt at zero) in
  // recording order; grad_check compares signatures across perturbed
  // evaluations to detect non-smooth crossings.
  const std::vector<std::int8_t>& kink_signature() const { return kinks_; }

  std::size_t size() const { return nodes_.size(); }

 private:
  enum class Op : std::uint8_t {
    kLeaf,
    kAdd,
    kSub,
    kMul,
    kTanh,
    kSigmoid,
    kRelu,
    kSqrt,
    kRecip,
    kMatMul,
    kSoftmax,
    kConcat,
    kDot,
    kScale,
    kSum,
    kIndex,
  };

  struct Node {
    Shape shape;
    std::vector<double> v;
    std::vector<double> g;
    Op op = Op::kLeaf;
    std::int32_t a = -1;
    std::int32_t b = -1;
    std::int32_t aux = 0;      // flat index for kIndex
    Tensor* bound = nullptr;   // param write-back target
  };

  Node& node(Ref r);
  const Node& node(Ref r) const;
  Ref push(Node n);
  void check_same_shape(const char* op, Ref a, Ref b) const;
  void check_1d(const char* op, Ref a) const;

  std::vector<Node> nodes_;
  std::vector<std::int8_t> kinks_;
};

}  // namespace vtp::ad
