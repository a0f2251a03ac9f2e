#include "jacnet/field_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace jacnet {

namespace {

using nlohmann::json;

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows; ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols; ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j, const std::string& name) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    throw std::invalid_argument("field json: " + name + " must be a 2-D array");
  Matrix m(static_cast<int>(j.size()), static_cast<int>(j[0].size()));
  for (int i = 0; i < m.rows; ++i) {
    if (static_cast<int>(j[i].size()) != m.cols)
      throw std::invalid_argument("field json: ragged rows in " + name);
    for (int c = 0; c < m.cols; ++c) m(i, c) = j[i][c].get<double>();
  }
  return m;
}

}  // namespace

std::string field_to_json(const JacobianField& f) {
  json act;
  act["kind"] = to_string(f.activation.kind);
  if (f.activation.kind == ActivationKind::spd) act["epsilon"] = f.activation.epsilon;
  if (f.activation.kind == ActivationKind::scaled_tanh) act["k"] = f.activation.k;

  json j;
  j["d_in"] = f.d_in;
  j["d_out"] = f.d_out;
  j["hidden"] = f.hidden;
  j["activation"] = std::move(act);
  j["w1"] = matrix_to_json(f.params.w1);
  j["b1"] = f.params.b1;
  j["w2"] = matrix_to_json(f.params.w2);
  j["b2"] = f.params.b2;
  return j.dump(2) + "\n";
}

JacobianField field_from_json(const std::string& text) {
  const json j = json::parse(text);
  JacobianField f;
  f.d_in = j.at("d_in").get<int>();
  f.d_out = j.at("d_out").get<int>();
  f.hidden = j.at("hidden").get<int>();
  const json& act = j.at("activation");
  f.activation.kind = activation_kind_from_string(act.at("kind").get<std::string>());
  if (act.contains("epsilon")) f.activation.epsilon = act["epsilon"].get<double>();
  if (act.contains("k")) f.activation.k = act["k"].get<double>();
  f.params.w1 = matrix_from_json(j.at("w1"), "w1");
  f.params.b1 = j.at("b1").get<Vector>();
  f.params.w2 = matrix_from_json(j.at("w2"), "w2");
  f.params.b2 = j.at("b2").get<Vector>();

  const int m = f.d_out * f.d_in;
  if (f.params.w1.rows != f.hidden || f.params.w1.cols != f.d_in ||
      static_cast<int>(f.params.b1.size()) != f.hidden || f.params.w2.rows != m ||
      f.params.w2.cols != f.hidden || static_cast<int>(f.params.b2.size()) != m)
    throw std::invalid_argument("field json: inconsistent parameter shapes");
  return f;
}

void save_field(const JacobianField& f, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << field_to_json(f);
}

JacobianField load_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return field_from_json(buf.str());
}

}  // namespace jacnet
