#include "vtp/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace vtp::ad {

std::size_t numel(const Shape& s) {
  std::size_t n = 1;
  for (int d : s) n *= static_cast<std::size_t>(d);
  return n;
}

std::string shape_str(const Shape& s) {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) os << ',';
    os << s[i];
  }
  os << '}';
  return os.str();
}

Tensor::Tensor(Shape s, std::vector<double> values) : shape(std::move(s)), v(std::move(values)) {
  if (numel(shape) != v.size()) {
    throw DimensionError("tensor: shape " + shape_str(shape) + " does not match " +
                         std::to_string(v.size()) + " values");
  }
}

Tensor Tensor::zeros(const Shape& s, bool with_grad) { return full(s, 0.0, with_grad); }

Tensor Tensor::full(const Shape& s, double fill, bool with_grad) {
  Tensor t;
  t.shape = s;
  t.v.assign(numel(s), fill);
  if (with_grad) t.g.assign(t.v.size(), 0.0);
  return t;
}

bool Tensor::finite() const {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

Tape::Tape() { nodes_.reserve(4096); }

Tape::Node& Tape::node(Ref r) { return nodes_[static_cast<std::size_t>(r.id)]; }
const Tape::Node& Tape::node(Ref r) const { return nodes_[static_cast<std::size_t>(r.id)]; }

Ref Tape::push(Node n) {
  n.g.assign(n.v.size(), 0.0);
  nodes_.push_back(std::move(n));
  return Ref{static_cast<std::int32_t>(nodes_.size() - 1)};
}

void Tape::check_same_shape(const char* op, Ref a, Ref b) const {
  if (node(a).shape != node(b).shape) {
    throw DimensionError(std::string(op) + ": shape mismatch " + shape_str(node(a).shape) +
                         " vs " + shape_str(node(b).shape));
  }
}

void Tape::check_1d(const char* op, Ref a) const {
  if (node(a).shape.size() != 1) {
    throw DimensionError(std::string(op) + ": expected 1-d tensor, got " +
                         shape_str(node(a).shape));
  }
}

Ref Tape::constant(Shape shape, std::vector<double> values) {
  if (numel(shape) != values.size()) {
    throw DimensionError("constant: shape " + shape_str(shape) + " does not match " +
                         std::to_string(values.size()) + " values");
  }
  Node n;
  n.shape = std::move(shape);
  n.v = std::move(values);
  return push(std::move(n));
}

Ref Tape::constant(const Tensor& t) { return constant(t.shape, t.v); }

Ref Tape::scalar(double x) { return constant(Shape{1}, {x}); }

Ref Tape::param(Tensor& t) {
  if (t.g.size() != t.v.size()) t.g.assign(t.v.size(), 0.0);
  Node n;
  n.shape = t.shape;
  n.v = t.v;
  n.bound = &t;
  return push(std::move(n));
}

Ref Tape::add(Ref a, Ref b) {
  check_same_shape("add", a, b);
  Node n;
  n.shape = node(a).shape;
  n.op = Op::kAdd;
  n.a = a.id;
  n.b = b.id;
  n.v.resize(node(a).v.size());
  for (std::size_t i = 0; i < n.v.size(); ++i) n.v[i] = node(a).v[i] + node(b).v[i];
  return push(std::move(n));
}

Ref Tape::sub(Ref a, Ref b) {
  check_same_shape("sub", a, b);
  Node n;
  n.shape = node(a).shape;
  n.op = Op::kSub;
  n.a = a.id;
  n.b = b.id;
  n.v.resize(node(a).v.size());
  for (std::size_t i = 0; i < n.v.size(); ++i) n.v[i] = node(a).v[i] - node(b).v[i];
  return push(std::move(n));
}

Ref Tape::mul(Ref a, Ref b) {
  check_same_shape("mul", a, b);
  Node n;
  n.shape = node(a).shape;
  n.op = Op::kMul;
  n.a = a.id;
  n.b = b.id;
  n.v.resize(node(a).v.size());
  for (std::size_t i = 0; i < n.v.size(); ++i) n.v[i] = node(a).v[i] * node(b).v[i];
  return push(std::move(n));
}

Ref Tape::tanh(Ref a) {
  Node n;
  n.shape = node(a).shape;
  n.op = Op::kTanh;
  n.a = a.id;
  n.v.resize(node(a).v.size());
  for (std::size_t i = 0; i < n.v.size(); ++i) n.v[i] = std::tanh(node(a).v[i]);
  return push(std::move(n));
}

Ref Tape::sigmoid(Ref a) {
  Node n;
  n.shape = node(a).shape;
  n.op = Op::kSigmoid;
  n.a = a.id;
  n.v.resize(node(a).v.size());
  for (std::size_t i = 0; i < n.v.size(); ++i) n.v[i] = 1.0 / (1.0 + std::exp(-node(a).v[i]));
  return push(std::move(n));
}

Ref Tape::relu(Ref a) {
  Node n;
  n.shape = node(a).shape;
  n.op = Op::kRelu;
  n.a = a.id;
  n.v.resize(node(a).v.size());
  for (std::size_t i = 0; i < n.v.size(); ++i) {
    const double x = node(a).v[i];
    n.v[i] = x > 0.0 ? x : 0.0;
    kinks_.push_back(x > 0.0 ? 1 : (x < 0.0 ? -1 : 0));
  }
  return push(std::move(n));
}

Ref Tape::sqrt(Ref a) {
  Node n;
  n.shape = node(a).shape;
  n.op = Op::kSqrt;
  n.a = a.id;
  n.v.resize(node(a).v.size());
  for (std::size_t i = 0; i < n.v.size(); ++i) {
    const double x = node(a).v[i];
    if (x < 0.0) throw NumericalError("sqrt: negative input " + std::to_string(x));
    n.v[i] = std::sqrt(x);
    kinks_.push_back(x > 0.0 ? 1 : 0);
  }
  return push(std::move(n));
}

Ref Tape::recip(Ref a) {
  Node n;
  n.shape = node(a).shape;
  n.op = Op::kRecip;
  n.a = a.id;
  n.v.resize(node(a).v.size());
  for (std::size_t i = 0; i < n.v.size(); ++i) n.v[i] = 1.0 / node(a).v[i];
  return push(std::move(n));
}

Ref Tape::matmul(Ref a, Ref b) {
  const Shape& sa = node(a).shape;
  const Shape& sb = node(b).shape;
  if (sa.size() != 2 || (sb.size() != 2 && sb.size() != 1) || sa[1] != sb[0]) {
    throw DimensionError("matmul: incompatible shapes " + shape_str(sa) + " vs " + shape_str(sb));
  }
  const int m = sa[0];
  const int k = sa[1];
  const int cols = sb.size() == 2 ? sb[1] : 1;

  Node n;
  n.shape = sb.size() == 2 ? Shape{m, cols} : Shape{m};
  n.op = Op::kMatMul;
  n.a = a.id;
  n.b = b.id;
  n.v.assign(static_cast<std::size_t>(m) * cols, 0.0);
  const auto& av = node(a).v;
  const auto& bv = node(b).v;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < cols; ++j) {
      double acc = 0.0;
      for (int p = 0; p < k; ++p) acc += av[i * k + p] * bv[p * cols + j];
      n.v[i * cols + j] = acc;
    }
  }
  return push(std::move(n));
}

Ref Tape::softmax(Ref a) {
  check_1d("softmax", a);
  const auto& x = node(a).v;
  if (x.empty()) throw DimensionError("softmax: empty input");
  Node n;
  n.shape = node(a).shape;
  n.op = Op::kSoftmax;
  n.a = a.id;
  n.v.resize(x.size());
  const double m = *std::max_element(x.begin(), x.end());
  double denom = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    n.v[i] = std::exp(x[i] - m);
    denom += n.v[i];
  }
  for (double& y : n.v) y /= denom;
  return push(std::move(n));
}

Ref Tape::concat(Ref a, Ref b) {
  check_1d("concat", a);
  check_1d("concat", b);
  Node n;
  n.shape = Shape{node(a).shape[0] + node(b).shape[0]};
  n.op = Op::kConcat;
  n.a = a.id;
  n.b = b.id;
  n.v = node(a).v;
  n.v.insert(n.v.end(), node(b).v.begin(), node(b).v.end());
  return push(std::move(n));
}

Ref Tape::dot(Ref a, Ref b) {
  check_1d("dot", a);
  check_1d("dot", b);
  check_same_shape("dot", a, b);
  Node n;
  n.shape = Shape{1};
  n.op = Op::kDot;
  n.a = a.id;
  n.b = b.id;
  double acc = 0.0;
  for (std::size_t i = 0; i < node(a).v.size(); ++i) acc += node(a).v[i] * node(b).v[i];
  n.v = {acc};
  return push(std::move(n));
}

Ref Tape::scale(Ref vec, Ref s) {
  if (node(s).v.size() != 1) {
    throw DimensionError("scale: scalar operand has shape " + shape_str(node(s).shape));
  }
  Node n;
  n.shape = node(vec).shape;
  n.op = Op::kScale;
  n.a = vec.id;
  n.b = s.id;
  const double sv = node(s).v[0];
  n.v.resize(node(vec).v.size());
  for (std::size_t i = 0; i < n.v.size(); ++i) n.v[i] = node(vec).v[i] * sv;
  return push(std::move(n));
}

Ref Tape::sum(Ref a) {
  Node n;
  n.shape = Shape{1};
  n.op = Op::kSum;
  n.a = a.id;
  double acc = 0.0;
  for (double x : node(a).v) acc += x;
  n.v = {acc};
  return push(std::move(n));
}

Ref Tape::index(Ref t, int flat_index) {
  if (flat_index < 0 || static_cast<std::size_t>(flat_index) >= node(t).v.size()) {
    throw DimensionError("index: " + std::to_string(flat_index) + " out of range for " +
                         shape_str(node(t).shape));
  }
  Node n;
  n.shape = Shape{1};
  n.op = Op::kIndex;
  n.a = t.id;
  n.aux = flat_index;
  n.v = {node(t).v[static_cast<std::size_t>(flat_index)]};
  return push(std::move(n));
}

const Shape& Tape::shape(Ref r) const { return node(r).shape; }

std::span<const double> Tape::values(Ref r) const { return node(r).v; }

double Tape::value(Ref r) const {
  if (node(r).v.size() != 1) {
    throw DimensionError("value: node is not scalar, shape " + shape_str(node(r).shape));
  }
  return node(r).v[0];
}

std::span<const double> Tape::grad(Ref r) const { return node(r).g; }

void Tape::backward(Ref loss) {
  if (node(loss).v.size() != 1) {
    throw DimensionError("backward: loss must be scalar, got " + shape_str(node(loss).shape));
  }
  for (Node& n : nodes_) std::fill(n.g.begin(), n.g.end(), 0.0);
  node(loss).g[0] = 1.0;

  for (std::size_t idx = nodes_.size(); idx-- > 0;) {
    Node& n = nodes_[idx];
    const auto& g = n.g;
    switch (n.op) {
      case Op::kLeaf:
        if (n.bound) {
          for (std::size_t i = 0; i < g.size(); ++i) n.bound->g[i] += g[i];
        }
        break;
      case Op::kAdd: {
        Node& pa = nodes_[n.a];
        Node& pb = nodes_[n.b];
        for (std::size_t i = 0; i < g.size(); ++i) {
          pa.g[i] += g[i];
          pb.g[i] += g[i];
        }
        break;
      }
      case Op::kSub: {
        Node& pa = nodes_[n.a];
        Node& pb = nodes_[n.b];
        for (std::size_t i = 0; i < g.size(); ++i) {
          pa.g[i] += g[i];
          pb.g[i] -= g[i];
        }
        break;
      }
      case Op::kMul: {
        Node& pa = nodes_[n.a];
        Node& pb = nodes_[n.b];
        for (std::size_t i = 0; i < g.size(); ++i) {
          pa.g[i] += g[i] * pb.v[i];
          pb.g[i] += g[i] * pa.v[i];
        }
        break;
      }
      case Op::kTanh: {
        Node& pa = nodes_[n.a];
        for (std::size_t i = 0; i < g.size(); ++i) pa.g[i] += g[i] * (1.0 - n.v[i] * n.v[i]);
        break;
      }
      case Op::kSigmoid: {
        Node& pa = nodes_[n.a];
        for (std::size_t i = 0; i < g.size(); ++i) pa.g[i] += g[i] * n.v[i] * (1.0 - n.v[i]);
        break;
      }
      case Op::kRelu: {
        // gradient defined as 0 at exactly 0, matching the domain-cutoff
        // semantics of the spatial weights
        Node& pa = nodes_[n.a];
        for (std::size_t i = 0; i < g.size(); ++i) {
          if (pa.v[i] > 0.0) pa.g[i] += g[i];
        }
        break;
      }
      case Op::kSqrt: {
        Node& pa = nodes_[n.a];
        for (std::size_t i = 0; i < g.size(); ++i) {
          if (pa.v[i] > 0.0) pa.g[i] += g[i] * 0.5 / n.v[i];
        }
        break;
      }
      case Op::kRecip: {
        Node& pa = nodes_[n.a];
        for (std::size_t i = 0; i < g.size(); ++i) pa.g[i] -= g[i] * n.v[i] * n.v[i];
        break;
      }
      case Op::kMatMul: {
        Node& pa = nodes_[n.a];
        Node& pb = nodes_[n.b];
        const int m = pa.shape[0];
        const int k = pa.shape[1];
        const int cols = pb.shape.size() == 2 ? pb.shape[1] : 1;
        for (int i = 0; i < m; ++i) {
          for (int p = 0; p < k; ++p) {
            double acc = 0.0;
            for (int j = 0; j < cols; ++j) acc += g[i * cols + j] * pb.v[p * cols + j];
            pa.g[i * k + p] += acc;
          }
        }
        for (int p = 0; p < k; ++p) {
          for (int j = 0; j < cols; ++j) {
            double acc = 0.0;
            for (int i = 0; i < m; ++i) acc += pa.v[i * k + p] * g[i * cols + j];
            pb.g[p * cols + j] += acc;
          }
        }
        break;
      }
      case Op::kSoftmax: {
        Node& pa = nodes_[n.a];
        double inner = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) inner += g[i] * n.v[i];
        for (std::size_t i = 0; i < g.size(); ++i) pa.g[i] += n.v[i] * (g[i] - inner);
        break;
      }
      case Op::kConcat: {
        Node& pa = nodes_[n.a];
        Node& pb = nodes_[n.b];
        const std::size_t na = pa.v.size();
        for (std::size_t i = 0; i < na; ++i) pa.g[i] += g[i];
        for (std::size_t i = 0; i < pb.v.size(); ++i) pb.g[i] += g[na + i];
        break;
      }
      case Op::kDot: {
        Node& pa = nodes_[n.a];
        Node& pb = nodes_[n.b];
        for (std::size_t i = 0; i < pa.v.size(); ++i) {
          pa.g[i] += g[0] * pb.v[i];
          pb.g[i] += g[0] * pa.v[i];
        }
        break;
      }
      case Op::kScale: {
        Node& pa = nodes_[n.a];
        Node& pb = nodes_[n.b];
        const double sv = pb.v[0];
        double acc = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
          pa.g[i] += g[i] * sv;
          acc += g[i] * pa.v[i];
        }
        pb.g[0] += acc;
        break;
      }
      case Op::kSum: {
        Node& pa = nodes_[n.a];
        for (std::size_t i = 0; i < pa.v.size(); ++i) pa.g[i] += g[0];
        break;
      }
      case Op::kIndex: {
        Node& pa = nodes_[n.a];
        pa.g[static_cast<std::size_t>(n.aux)] += g[0];
        break;
      }
    }
  }
}

}  // namespace vtp::ad
