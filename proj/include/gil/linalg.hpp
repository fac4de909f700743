#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace gil {

using Vector = std::vector<double>;

// Dense row-major matrix of doubles. Deliberately minimal: the gradient math
// here only ever needs products, outer products and element-wise ops at
// dimensions of a few thousand.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double value = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, value) {}

  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  double* row(std::size_t r) { return data_.data() + r * cols_; }
  const double* row(std::size_t r) const { return data_.data() + r * cols_; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool same_shape(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// m * v
Vector matvec(const Matrix& m, const Vector& v);
// m^T * v (used by backprop; avoids materializing transposes)
Vector matvec_transpose(const Matrix& m, const Vector& v);
// u v^T
Matrix outer(const Vector& u, const Vector& v);
// acc += scale * u v^T
void add_outer(Matrix& acc, double scale, const Vector& u, const Vector& v);

Vector hadamard(const Vector& a, const Vector& b);
Matrix hadamard(const Matrix& a, const Matrix& b);

double dot(const Vector& a, const Vector& b);
// y += alpha * x
void axpy(Vector& y, double alpha, const Vector& x);
void axpy(Matrix& y, double alpha, const Matrix& x);

enum class Activation { Sigmoid, Tanh, Relu, Softmax, Identity };

const char* to_string(Activation a);
Activation activation_from_string(const std::string& s);

// Element-wise nonlinearity. Softmax is stabilized by max subtraction.
Vector activate(Activation kind, const Vector& z);
// Element-wise derivative evaluated at z. Softmax throws: its derivative is
// only ever needed fused with cross-entropy (see mlp_backward).
Vector activate_derivative(Activation kind, const Vector& z);

double sigmoid(double z);

enum class LossKind { CrossEntropy, Mse };

const char* to_string(LossKind k);
LossKind loss_from_string(const std::string& s);

// Cross-entropy treats a length-1 prediction as a Bernoulli probability and
// longer ones as categorical with a one-hot (or soft) target. Probabilities
// are clamped to [1e-12, 1 - 1e-12] before the log.
double loss(LossKind kind, const Vector& yhat, const Vector& y);
// dE/dyhat, same clamping as loss()
Vector loss_gradient(LossKind kind, const Vector& yhat, const Vector& y);

Vector one_hot(int label, std::size_t num_classes);

}  // namespace gil
