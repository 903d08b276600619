#pragma once

// Ligand-internalisation kinetics: the Schnakenberg reaction terms with a
// delayed production term in the activator equation.
//
//   u_t = d_u/Lx^2 u_xx + d_u/Ly^2 u_yy + a - u - 2u^2 v + 3 u(t-tau)^2 v(t-tau)
//   v_t = d_v/Lx^2 v_xx + d_v/Ly^2 v_yy + b - u^2 v

#include <utility>

namespace turingdelay {

struct ModelParams {
    double a = 0.1;
    double b = 0.9;
    double du = 0.01;
    double dv = 0.2;
    double lx = 1.0;
    double ly = 0.2;
    double tau = 0.0;
};

/// Throws InvalidParameter unless every rate, diffusivity and length is
/// strictly positive and tau is non-negative. All other modules assume a
/// params object that already passed this check.
void validate(const ModelParams& params);

template <typename Scalar>
struct SteadyState {
    Scalar u_star;
    Scalar v_star;
};

template <typename Scalar = double>
SteadyState<Scalar> steady_state(const ModelParams& params)
{
    const Scalar s = Scalar(params.a) + Scalar(params.b);
    return {s, Scalar(params.b) / (s * s)};
}

template <typename Scalar>
struct Rates {
    Scalar f;
    Scalar g;
};

/// Reaction parts (f, g) at the current state (u, v) and the delayed state
/// (u_delayed, v_delayed).
template <typename Scalar>
Rates<Scalar> reaction_rates(Scalar u, Scalar v, Scalar u_delayed, Scalar v_delayed,
                             const ModelParams& params)
{
    const Scalar u2v = u * u * v;
    const Scalar f = Scalar(params.a) - u - Scalar(2) * u2v
                     + Scalar(3) * u_delayed * u_delayed * v_delayed;
    const Scalar g = Scalar(params.b) - u2v;
    return {f, g};
}

} // namespace turingdelay
