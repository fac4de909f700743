#include "gil/model_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace gil {

namespace {

constexpr const char* kMlpHeader = "gil-checkpoint 1 mlp";
constexpr const char* kLstmHeader = "gil-checkpoint 1 lstm";

void write_values(std::ostream& out, const Vector& v) {
  out << std::setprecision(17);
  for (double x : v) out << x << "\n";
}

void read_values(std::istream& in, Vector& v, const std::string& path) {
  for (double& x : v) {
    if (!(in >> x)) throw std::runtime_error("checkpoint " + path + ": truncated values");
  }
}

void write_matrix(std::ostream& out, const std::string& name, const Matrix& m) {
  out << name << " " << m.rows() << " " << m.cols() << "\n";
  write_values(out, m.data());
}

Matrix read_matrix(std::istream& in, const std::string& name, const std::string& path) {
  std::string tag;
  std::size_t rows = 0, cols = 0;
  if (!(in >> tag >> rows >> cols) || tag != name)
    throw std::runtime_error("checkpoint " + path + ": expected tensor '" + name + "'");
  Matrix m(rows, cols);
  read_values(in, m.data(), path);
  return m;
}

void write_vector(std::ostream& out, const std::string& name, const Vector& v) {
  out << name << " " << v.size() << "\n";
  write_values(out, v);
}

Vector read_vector(std::istream& in, const std::string& name, const std::string& path) {
  std::string tag;
  std::size_t n = 0;
  if (!(in >> tag >> n) || tag != name)
    throw std::runtime_error("checkpoint " + path + ": expected tensor '" + name + "'");
  Vector v(n);
  read_values(in, v, path);
  return v;
}

}  // namespace

void save_mlp(const MlpModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out << kMlpHeader << "\n" << model.layers.size() << "\n";
  for (const MlpLayer& layer : model.layers) {
    out << "layer " << to_string(layer.act) << "\n";
    write_matrix(out, "W", layer.W);
    write_vector(out, "b", layer.b);
  }
}

MlpModel load_mlp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  std::string header;
  std::getline(in, header);
  if (header != kMlpHeader)
    throw std::runtime_error("checkpoint " + path + ": bad header '" + header + "'");
  std::size_t n_layers = 0;
  if (!(in >> n_layers)) throw std::runtime_error("checkpoint " + path + ": missing layer count");
  MlpModel model;
  for (std::size_t i = 0; i < n_layers; ++i) {
    std::string tag, act;
    if (!(in >> tag >> act) || tag != "layer")
      throw std::runtime_error("checkpoint " + path + ": expected layer header");
    MlpLayer layer;
    layer.act = activation_from_string(act);
    layer.W = read_matrix(in, "W", path);
    layer.b = read_vector(in, "b", path);
    model.layers.push_back(std::move(layer));
  }
  return model;
}

void save_lstm(const LstmModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out << kLstmHeader << "\n" << to_string(model.out_act) << "\n";
  write_matrix(out, "Wo", model.Wo);
  write_matrix(out, "Wi", model.Wi);
  write_matrix(out, "Wg", model.Wg);
  write_matrix(out, "Wf", model.Wf);
  write_matrix(out, "Uo", model.Uo);
  write_matrix(out, "Ui", model.Ui);
  write_matrix(out, "Ug", model.Ug);
  write_matrix(out, "Uf", model.Uf);
  write_vector(out, "bo", model.bo);
  write_vector(out, "bi", model.bi);
  write_vector(out, "bg", model.bg);
  write_vector(out, "bf", model.bf);
  write_matrix(out, "Wout", model.Wout);
  write_vector(out, "bout", model.bout);
}

LstmModel load_lstm(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  std::string header;
  std::getline(in, header);
  if (header != kLstmHeader)
    throw std::runtime_error("checkpoint " + path + ": bad header '" + header + "'");
  std::string act;
  if (!(in >> act)) throw std::runtime_error("checkpoint " + path + ": missing output activation");
  LstmModel model;
  model.out_act = activation_from_string(act);
  model.Wo = read_matrix(in, "Wo", path);
  model.Wi = read_matrix(in, "Wi", path);
  model.Wg = read_matrix(in, "Wg", path);
  model.Wf = read_matrix(in, "Wf", path);
  model.Uo = read_matrix(in, "Uo", path);
  model.Ui = read_matrix(in, "Ui", path);
  model.Ug = read_matrix(in, "Ug", path);
  model.Uf = read_matrix(in, "Uf", path);
  model.bo = read_vector(in, "bo", path);
  model.bi = read_vector(in, "bi", path);
  model.bg = read_vector(in, "bg", path);
  model.bf = read_vector(in, "bf", path);
  model.Wout = read_matrix(in, "Wout", path);
  model.bout = read_vector(in, "bout", path);
  return model;
}

}  // namespace gil
