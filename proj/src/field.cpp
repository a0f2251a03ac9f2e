#include "jacnet/field.hpp"

#include <cmath>

#include "jacnet/rng.hpp"

namespace jacnet {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

void check_activation(const ActivationSpec& act, int d_in, int d_out) {
  switch (act.kind) {
    case ActivationKind::spd:
      require(d_in == d_out, "spd activation requires d_out == d_in");
      require(act.epsilon > 0.0, "spd activation requires epsilon > 0");
      break;
    case ActivationKind::scaled_tanh:
      require(act.k > 0.0, "scaled_tanh activation requires k > 0");
      break;
    case ActivationKind::cauchy_riemann:
      require(d_in == 2 && d_out == 2, "cauchy_riemann activation requires d_out == d_in == 2");
      break;
    case ActivationKind::identity:
      break;
  }
}

// Forward pass with intermediates kept for the backward sweep.
struct MlpTrace {
  Vector hidden;    // tanh(w1 x + b1)
  Matrix raw;       // d_out x d_in
};

MlpTrace mlp_forward(const JacobianField& f, const Vector& x) {
  require(static_cast<int>(x.size()) == f.d_in, "field: x dimension mismatch");
  MlpTrace tr;
  tr.hidden = matvec(f.params.w1, x);
  for (int i = 0; i < f.hidden; ++i) tr.hidden[i] = std::tanh(tr.hidden[i] + f.params.b1[i]);
  Vector flat = matvec(f.params.w2, tr.hidden);
  tr.raw = Matrix(f.d_out, f.d_in);
  for (std::size_t i = 0; i < flat.size(); ++i) tr.raw.data[i] = flat[i] + f.params.b2[i];
  return tr;
}

// d<upstream, act(raw)>/draw for each activation.
Matrix activation_backward(const Matrix& raw, const ActivationSpec& act, const Matrix& upstream) {
  switch (act.kind) {
    case ActivationKind::identity:
      return upstream;
    case ActivationKind::spd: {
      // <U, R R^T> differentiates to (U + U^T) R.
      Matrix usym(raw.rows, raw.rows);
      for (int i = 0; i < raw.rows; ++i)
        for (int j = 0; j < raw.rows; ++j) usym(i, j) = upstream(i, j) + upstream(j, i);
      return matmul(usym, raw);
    }
    case ActivationKind::scaled_tanh: {
      Matrix g(raw.rows, raw.cols);
      for (std::size_t i = 0; i < raw.data.size(); ++i) {
        const double th = std::tanh(raw.data[i]);
        g.data[i] = upstream.data[i] * act.k * (1.0 - th * th);
      }
      return g;
    }
    case ActivationKind::cauchy_riemann: {
      Matrix g(2, 2);
      g(0, 0) = upstream(0, 0) + upstream(1, 1);
      g(1, 0) = upstream(1, 0) - upstream(0, 1);
      return g;
    }
  }
  throw std::logic_error("unreachable activation kind");
}

}  // namespace

std::string to_string(ActivationKind k) {
  switch (k) {
    case ActivationKind::identity: return "identity";
    case ActivationKind::spd: return "spd";
    case ActivationKind::scaled_tanh: return "scaled_tanh";
    case ActivationKind::cauchy_riemann: return "cauchy_riemann";
  }
  throw std::logic_error("unreachable activation kind");
}

ActivationKind activation_kind_from_string(const std::string& s) {
  if (s == "identity") return ActivationKind::identity;
  if (s == "spd") return ActivationKind::spd;
  if (s == "scaled_tanh") return ActivationKind::scaled_tanh;
  if (s == "cauchy_riemann") return ActivationKind::cauchy_riemann;
  throw std::invalid_argument("unknown activation kind: " + s);
}

JacobianField make_field(int d_in, int d_out, int hidden, const ActivationSpec& act,
                         std::uint64_t seed) {
  require(d_in > 0 && d_out > 0 && hidden > 0, "make_field: dimensions must be positive");
  check_activation(act, d_in, d_out);
  JacobianField f;
  f.d_in = d_in;
  f.d_out = d_out;
  f.hidden = hidden;
  f.activation = act;
  f.params.w1 = Matrix(hidden, d_in);
  f.params.b1 = Vector(hidden, 0.0);
  const int m = d_out * d_in;
  f.params.w2 = Matrix(m, hidden);
  f.params.b2 = Vector(m, 0.0);

  Rng rng(seed);
  const double s1 = std::sqrt(6.0 / (d_in + hidden));
  for (double& w : f.params.w1.data) w = rng.uniform(-s1, s1);
  const double s2 = std::sqrt(6.0 / (hidden + m));
  for (double& w : f.params.w2.data) w = rng.uniform(-s2, s2);
  return f;
}

int param_count(const JacobianField& f) {
  const int m = f.d_out * f.d_in;
  return f.hidden * f.d_in + f.hidden + m * f.hidden + m;
}

Vector flatten_params(const JacobianField& f) {
  Vector flat;
  flat.reserve(param_count(f));
  flat.insert(flat.end(), f.params.w1.data.begin(), f.params.w1.data.end());
  flat.insert(flat.end(), f.params.b1.begin(), f.params.b1.end());
  flat.insert(flat.end(), f.params.w2.data.begin(), f.params.w2.data.end());
  flat.insert(flat.end(), f.params.b2.begin(), f.params.b2.end());
  return flat;
}

void load_flat_params(JacobianField& f, const Vector& flat) {
  require(static_cast<int>(flat.size()) == param_count(f), "load_flat_params: size mismatch");
  auto it = flat.begin();
  auto take = [&](std::size_t n, std::vector<double>& dst) {
    std::copy(it, it + static_cast<std::ptrdiff_t>(n), dst.begin());
    it += static_cast<std::ptrdiff_t>(n);
  };
  take(f.params.w1.data.size(), f.params.w1.data);
  take(f.params.b1.size(), f.params.b1);
  take(f.params.w2.data.size(), f.params.w2.data);
  take(f.params.b2.size(), f.params.b2);
}

Matrix mlp_raw(const JacobianField& f, const Vector& x) { return mlp_forward(f, x).raw; }

Matrix apply_activation(const Matrix& raw, const ActivationSpec& act) {
  switch (act.kind) {
    case ActivationKind::identity:
      return raw;
    case ActivationKind::spd: {
      require(raw.rows == raw.cols, "spd activation requires a square matrix");
      require(act.epsilon > 0.0, "spd activation requires epsilon > 0");
      Matrix out = matmul(raw, transpose(raw));
      for (int i = 0; i < raw.rows; ++i) out(i, i) += act.epsilon;
      return out;
    }
    case ActivationKind::scaled_tanh: {
      require(act.k > 0.0, "scaled_tanh activation requires k > 0");
      Matrix out(raw.rows, raw.cols);
      for (std::size_t i = 0; i < raw.data.size(); ++i)
        out.data[i] = act.k * std::tanh(raw.data[i]);
      return out;
    }
    case ActivationKind::cauchy_riemann: {
      require(raw.rows == 2 && raw.cols == 2, "cauchy_riemann activation requires a 2x2 matrix");
      Matrix out(2, 2);
      const double a = raw(0, 0);
      const double b = raw(1, 0);
      out(0, 0) = a;
      out(0, 1) = -b;
      out(1, 0) = b;
      out(1, 1) = a;
      return out;
    }
  }
  throw std::logic_error("unreachable activation kind");
}

Matrix eval_field(const JacobianField& f, const Vector& x) {
  return apply_activation(mlp_raw(f, x), f.activation);
}

Vector field_param_grad(const JacobianField& f, const Vector& x, const Matrix& upstream) {
  require(upstream.rows == f.d_out && upstream.cols == f.d_in,
          "field_param_grad: upstream dimension mismatch");
  const MlpTrace tr = mlp_forward(f, x);
  const Matrix draw = activation_backward(tr.raw, f.activation, upstream);

  const int m = f.d_out * f.d_in;
  Vector grad(param_count(f), 0.0);
  const int w1_off = 0;
  const int b1_off = f.hidden * f.d_in;
  const int w2_off = b1_off + f.hidden;
  const int b2_off = w2_off + m * f.hidden;

  // b2 and w2
  for (int i = 0; i < m; ++i) {
    const double g = draw.data[i];
    grad[b2_off + i] = g;
    for (int j = 0; j < f.hidden; ++j) grad[w2_off + i * f.hidden + j] = g * tr.hidden[j];
  }
  // through the hidden tanh
  for (int j = 0; j < f.hidden; ++j) {
    double gh = 0.0;
    for (int i = 0; i < m; ++i) gh += f.params.w2(i, j) * draw.data[i];
    const double gpre = gh * (1.0 - tr.hidden[j] * tr.hidden[j]);
    grad[b1_off + j] = gpre;
    for (int c = 0; c < f.d_in; ++c) grad[w1_off + j * f.d_in + c] = gpre * x[c];
  }
  return grad;
}

}  // namespace jacnet
