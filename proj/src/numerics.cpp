#include "birdcast/numerics.hpp"

#include <cmath>
#include <stdexcept>

namespace birdcast::num {

std::string shape_of(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

namespace {
[[noreturn]] void shape_error(const char* op, const Matrix& a, const Matrix& b) {
  throw std::invalid_argument(std::string(op) + ": incompatible shapes " +
                              shape_of(a) + " and " + shape_of(b));
}
}  // namespace

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) shape_error("matmul", a, b);
  return a * b;
}

Matrix add(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) shape_error("add", a, b);
  return a + b;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) shape_error("hadamard", a, b);
  return a.cwiseProduct(b);
}

Matrix transpose(const Matrix& a) { return a.transpose(); }

Matrix scale(const Matrix& a, double s) { return a * s; }

Activation activation_from_string(const std::string& name) {
  if (name == "tanh") return Activation::Tanh;
  if (name == "relu") return Activation::Relu;
  if (name == "sigmoid") return Activation::Sigmoid;
  if (name == "linear") return Activation::Linear;
  throw std::invalid_argument("unknown activation '" + name +
                              "' (expected tanh|relu|sigmoid|linear)");
}

std::string to_string(Activation a) {
  switch (a) {
    case Activation::Tanh: return "tanh";
    case Activation::Relu: return "relu";
    case Activation::Sigmoid: return "sigmoid";
    case Activation::Linear: return "linear";
  }
  return "?";
}

double apply_activation(Activation a, double x) {
  switch (a) {
    case Activation::Tanh: return std::tanh(x);
    case Activation::Relu: return relu(x);
    case Activation::Sigmoid: return sigmoid(x);
    case Activation::Linear: return x;
  }
  return x;
}

void sigmoid_inplace(Matrix& m) {
  m = (1.0 + (-m.array()).exp()).inverse().matrix();
}

void activation_inplace(Activation a, Matrix& m) {
  switch (a) {
    case Activation::Tanh:
      m = m.array().tanh().matrix();
      break;
    case Activation::Relu:
      m = m.cwiseMax(0.0);
      break;
    case Activation::Sigmoid:
      sigmoid_inplace(m);
      break;
    case Activation::Linear:
      break;
  }
}

double activation_derivative_from_value(Activation a, double v) {
  switch (a) {
    case Activation::Tanh: return 1.0 - v * v;
    case Activation::Relu: return v > 0.0 ? 1.0 : 0.0;
    case Activation::Sigmoid: return v * (1.0 - v);
    case Activation::Linear: return 1.0;
  }
  return 1.0;
}

std::uint64_t Rng::uniform_int(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_int: n must be positive");
  return engine_() % n;
}

void Rng::shuffle(std::vector<Index>& v) {
  if (v.empty()) return;
  for (std::size_t i = v.size() - 1; i > 0; --i) {
    const auto j = uniform_int(static_cast<std::uint64_t>(i) + 1);
    std::swap(v[i], v[static_cast<std::size_t>(j)]);
  }
}

}  // namespace birdcast::num
