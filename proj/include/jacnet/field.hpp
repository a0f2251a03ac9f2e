#pragma once

#include <cstdint>
#include <string>

#include "jacnet/linalg.hpp"

namespace jacnet {

enum class ActivationKind { identity, spd, scaled_tanh, cauchy_riemann };

std::string to_string(ActivationKind k);
ActivationKind activation_kind_from_string(const std::string& s);

/// Output activation applied to the raw network matrix:
///   identity       raw unchanged
///   spd            raw*raw^T + epsilon*I  (symmetric, eigenvalues >= epsilon)
///   scaled_tanh    k*tanh(raw_ij) elementwise, entries strictly inside (-k, k)
///   cauchy_riemann [[a, -b], [b, a]] from a = raw(0,0), b = raw(1,0)
struct ActivationSpec {
  ActivationKind kind = ActivationKind::identity;
  double epsilon = 1e-4;  // spd only, > 0
  double k = 1.0;         // scaled_tanh only, > 0
};

struct MlpParams {
  Matrix w1;  // hidden x d_in
  Vector b1;  // hidden
  Matrix w2;  // (d_out*d_in) x hidden
  Vector b2;  // d_out*d_in
};

/// A matrix-valued field x -> J(x) in R^(d_out x d_in): a one-hidden-layer
/// tanh MLP whose output is reshaped row-major and passed through the
/// structured output activation.
struct JacobianField {
  int d_in = 1;
  int d_out = 1;
  int hidden = 64;
  MlpParams params;
  ActivationSpec activation;
};

/// Glorot-uniform weights (+-sqrt(6/(fan_in+fan_out))), zero biases,
/// deterministic in seed. Draw order: w1 row-major, then w2 row-major.
JacobianField make_field(int d_in, int d_out, int hidden, const ActivationSpec& act,
                         std::uint64_t seed);

int param_count(const JacobianField& f);

/// Flat layout (the contract shared with the optimizer and serialization):
/// w1 row-major, b1, w2 row-major, b2.
Vector flatten_params(const JacobianField& f);
void load_flat_params(JacobianField& f, const Vector& flat);

Matrix mlp_raw(const JacobianField& f, const Vector& x);
Matrix apply_activation(const Matrix& raw, const ActivationSpec& act);
Matrix eval_field(const JacobianField& f, const Vector& x);

/// Gradient of <upstream, eval_field(f, x)>_F with respect to the flat
/// parameter vector, by analytic reverse-mode through the activation and MLP.
Vector field_param_grad(const JacobianField& f, const Vector& x, const Matrix& upstream);

}  // namespace jacnet
