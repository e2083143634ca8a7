#ifndef BIRDCAST_NUMERICS_HPP
#define BIRDCAST_NUMERICS_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace birdcast {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

namespace num {

// ---------------------------------------------------------------------------
// Shape-checked wrappers around the Eigen kernels. The network code validates
// dimensions once at construction and then uses Eigen expressions directly;
// these entry points exist for callers that assemble matrices from external
// input (files, tests) and want a diagnosable failure instead of an assert.
// ---------------------------------------------------------------------------

std::string shape_of(const Matrix& m);

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix add(const Matrix& a, const Matrix& b);
Matrix hadamard(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);
Matrix scale(const Matrix& a, double s);

// ---------------------------------------------------------------------------
// Activations
// ---------------------------------------------------------------------------

enum class Activation { Tanh, Relu, Sigmoid, Linear };

Activation activation_from_string(const std::string& name);
std::string to_string(Activation a);

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
inline double relu(double x) { return x > 0.0 ? x : 0.0; }

double apply_activation(Activation a, double x);

// Elementwise over a whole matrix (batched gate blocks).
void sigmoid_inplace(Matrix& m);
void activation_inplace(Activation a, Matrix& m);

// Derivative of the activation expressed through its *value* v = act(z).
// Relu additionally needs the pre-image sign, which survives in v except at
// exactly zero, where the subgradient 0 is used.
double activation_derivative_from_value(Activation a, double v);

// ---------------------------------------------------------------------------
// Deterministic RNG. std::mt19937_64 produces the same stream on every
// platform; the double mapping is done by hand because the standard library
// distributions are not portable across implementations.
// ---------------------------------------------------------------------------

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + uniform01() * (hi - lo); }

  // Uniform integer in [0, n). n must be positive.
  std::uint64_t uniform_int(std::uint64_t n);

  // Seeded Fisher-Yates shuffle.
  void shuffle(std::vector<Index>& v);

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
};

}  // namespace num
}  // namespace birdcast

#endif  // BIRDCAST_NUMERICS_HPP
