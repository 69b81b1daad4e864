#pragma once

#include <span>
#include <vector>

namespace randfeat {

/// Fills out[k] = C_k^{(tau)}(t) for k = 0..out.size()-1 by the three-term
/// recurrence  k C_k = 2(k + tau - 1) t C_{k-1} - (k + 2 tau - 2) C_{k-2}.
void gegenbauer_values(double tau, double t, std::span<double> out);

/// C_n^{(tau)}(t) for a single degree.
double gegenbauer(int n, double tau, double t);

/// C_k^{(tau)}(1) = Gamma(k + 2 tau) / (Gamma(2 tau) k!).
double gegenbauer_at_one(int k, double tau);

/// log of the squared norm h_k = int_{-1}^1 (C_k^{(tau)})^2 (1-t^2)^{tau-1/2} dt.
double log_gegenbauer_norm(int k, double tau);

/// Gauss rule for the weight (1 - t^2)^{tau - 1/2} on [-1, 1]: exact for
/// polynomials of degree <= 2 * nodes.size() - 1. Nodes are ascending.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Newton iteration on C_n^{(tau)} from asymptotic starting guesses, with
/// the symmetric half mirrored. Throws NumericError if an iteration fails to
/// converge or the nodes are not strictly separated.
QuadratureRule gauss_gegenbauer(int n, double tau);

}  // namespace randfeat
