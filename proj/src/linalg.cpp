#include "gil/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gil {

namespace {

[[noreturn]] void shape_error(const std::string& what) {
  throw std::invalid_argument("shape error: " + what);
}

constexpr double kProbFloor = 1e-12;

double clamp_prob(double p) {
  return std::min(1.0 - kProbFloor, std::max(kProbFloor, p));
}

}  // namespace

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(rows.size(), rows.size() ? rows.begin()->size() : 0);
  std::size_t r = 0;
  for (const auto& row : rows) {
    if (row.size() != m.cols()) shape_error("from_rows with ragged rows");
    std::size_t c = 0;
    for (double v : row) m(r, c++) = v;
    ++r;
  }
  return m;
}

Vector matvec(const Matrix& m, const Vector& v) {
  if (m.cols() != v.size()) shape_error("matvec " + std::to_string(m.rows()) + "x" +
                                        std::to_string(m.cols()) + " * " +
                                        std::to_string(v.size()));
  Vector out(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const double* row = m.row(r);
    double acc = 0.0;
    for (std::size_t c = 0; c < m.cols(); ++c) acc += row[c] * v[c];
    out[r] = acc;
  }
  return out;
}

Vector matvec_transpose(const Matrix& m, const Vector& v) {
  if (m.rows() != v.size()) shape_error("matvec_transpose " + std::to_string(m.rows()) + "x" +
                                        std::to_string(m.cols()) + "^T * " +
                                        std::to_string(v.size()));
  Vector out(m.cols(), 0.0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const double* row = m.row(r);
    const double vr = v[r];
    for (std::size_t c = 0; c < m.cols(); ++c) out[c] += row[c] * vr;
  }
  return out;
}

Matrix outer(const Vector& u, const Vector& v) {
  Matrix m(u.size(), v.size());
  for (std::size_t r = 0; r < u.size(); ++r) {
    double* row = m.row(r);
    const double ur = u[r];
    for (std::size_t c = 0; c < v.size(); ++c) row[c] = ur * v[c];
  }
  return m;
}

void add_outer(Matrix& acc, double scale, const Vector& u, const Vector& v) {
  if (acc.rows() != u.size() || acc.cols() != v.size()) shape_error("add_outer");
  for (std::size_t r = 0; r < u.size(); ++r) {
    double* row = acc.row(r);
    const double s = scale * u[r];
    for (std::size_t c = 0; c < v.size(); ++c) row[c] += s * v[c];
  }
}

Vector hadamard(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) shape_error("hadamard vectors " + std::to_string(a.size()) + " vs " +
                                        std::to_string(b.size()));
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
  if (!a.same_shape(b)) shape_error("hadamard matrices");
  Matrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.size(); ++i) out.data()[i] = a.data()[i] * b.data()[i];
  return out;
}

double dot(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) shape_error("dot");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

void axpy(Vector& y, double alpha, const Vector& x) {
  if (y.size() != x.size()) shape_error("axpy vector");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void axpy(Matrix& y, double alpha, const Matrix& x) {
  if (!y.same_shape(x)) shape_error("axpy matrix");
  for (std::size_t i = 0; i < x.size(); ++i) y.data()[i] += alpha * x.data()[i];
}

const char* to_string(Activation a) {
  switch (a) {
    case Activation::Sigmoid: return "sigmoid";
    case Activation::Tanh: return "tanh";
    case Activation::Relu: return "relu";
    case Activation::Softmax: return "softmax";
    case Activation::Identity: return "identity";
  }
  return "?";
}

Activation activation_from_string(const std::string& s) {
  if (s == "sigmoid") return Activation::Sigmoid;
  if (s == "tanh") return Activation::Tanh;
  if (s == "relu") return Activation::Relu;
  if (s == "softmax") return Activation::Softmax;
  if (s == "identity") return Activation::Identity;
  throw std::invalid_argument("unknown activation: " + s);
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

Vector activate(Activation kind, const Vector& z) {
  Vector out(z.size());
  switch (kind) {
    case Activation::Sigmoid:
      for (std::size_t i = 0; i < z.size(); ++i) out[i] = sigmoid(z[i]);
      break;
    case Activation::Tanh:
      for (std::size_t i = 0; i < z.size(); ++i) out[i] = std::tanh(z[i]);
      break;
    case Activation::Relu:
      for (std::size_t i = 0; i < z.size(); ++i) out[i] = z[i] > 0.0 ? z[i] : 0.0;
      break;
    case Activation::Identity:
      out = z;
      break;
    case Activation::Softmax: {
      const double zmax = *std::max_element(z.begin(), z.end());
      double sum = 0.0;
      for (std::size_t i = 0; i < z.size(); ++i) {
        out[i] = std::exp(z[i] - zmax);
        sum += out[i];
      }
      for (double& v : out) v /= sum;
      break;
    }
  }
  return out;
}

Vector activate_derivative(Activation kind, const Vector& z) {
  Vector out(z.size());
  switch (kind) {
    case Activation::Sigmoid:
      for (std::size_t i = 0; i < z.size(); ++i) {
        const double s = sigmoid(z[i]);
        out[i] = s * (1.0 - s);
      }
      break;
    case Activation::Tanh:
      for (std::size_t i = 0; i < z.size(); ++i) {
        const double t = std::tanh(z[i]);
        out[i] = 1.0 - t * t;
      }
      break;
    case Activation::Relu:
      for (std::size_t i = 0; i < z.size(); ++i) out[i] = z[i] > 0.0 ? 1.0 : 0.0;
      break;
    case Activation::Identity:
      std::fill(out.begin(), out.end(), 1.0);
      break;
    case Activation::Softmax:
      throw std::logic_error("softmax derivative is fused with cross-entropy");
  }
  return out;
}

const char* to_string(LossKind k) {
  return k == LossKind::CrossEntropy ? "cross_entropy" : "mse";
}

LossKind loss_from_string(const std::string& s) {
  if (s == "cross_entropy") return LossKind::CrossEntropy;
  if (s == "mse") return LossKind::Mse;
  throw std::invalid_argument("unknown loss: " + s);
}

double loss(LossKind kind, const Vector& yhat, const Vector& y) {
  if (yhat.size() != y.size()) shape_error("loss");
  if (kind == LossKind::Mse) {
    double acc = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double d = yhat[i] - y[i];
      acc += d * d;
    }
    return acc / static_cast<double>(y.size());
  }
  if (yhat.size() == 1) {
    const double p = clamp_prob(yhat[0]);
    return -(y[0] * std::log(p) + (1.0 - y[0]) * std::log(1.0 - p));
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] != 0.0) acc -= y[i] * std::log(clamp_prob(yhat[i]));
  }
  return acc;
}

Vector loss_gradient(LossKind kind, const Vector& yhat, const Vector& y) {
  if (yhat.size() != y.size()) shape_error("loss_gradient");
  Vector g(yhat.size());
  if (kind == LossKind::Mse) {
    const double scale = 2.0 / static_cast<double>(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) g[i] = scale * (yhat[i] - y[i]);
    return g;
  }
  if (yhat.size() == 1) {
    const double p = clamp_prob(yhat[0]);
    g[0] = -y[0] / p + (1.0 - y[0]) / (1.0 - p);
    return g;
  }
  for (std::size_t i = 0; i < y.size(); ++i) g[i] = -y[i] / clamp_prob(yhat[i]);
  return g;
}

Vector one_hot(int label, std::size_t num_classes) {
  if (label < 0 || static_cast<std::size_t>(label) >= num_classes)
    throw std::invalid_argument("one_hot: label out of range");
  Vector v(num_classes, 0.0);
  v[static_cast<std::size_t>(label)] = 1.0;
  return v;
}

}  // namespace gil
