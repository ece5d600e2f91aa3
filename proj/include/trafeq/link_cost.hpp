#pragma once

#include "trafeq/network.hpp"

namespace trafeq {

/// Beckmann: BPR congestion with exponent 1/mu taken from each edge.
/// StableDynamics: the mu -> 0+ limit, where flows are capped by capacity and
/// times above free flow are priced linearly by capacity.
/// BoundOnly: no composite term, just t >= t̄ (used for testing the
/// optimizer on synthetic objectives).
enum class CostModel { Beckmann, StableDynamics, BoundOnly };

/// τ_e(f) = t̄ (1 + ρ (f / f̄)^(1/μ)).
double travel_time(const Edge& e, double flow);

/// σ_e(f) = ∫₀^f τ_e(z) dz.
double sigma(const Edge& e, double flow);

/// σ*_e(t) on its domain t >= t̄. Beckmann edges with ρ = 0 are fixed-time
/// edges: σ* is 0 at t̄ and +inf above it.
double sigma_conj(CostModel model, const Edge& e, double time);

/// dσ*_e/dt, i.e. the flow at which the edge's time equals `time`.
double sigma_conj_grad(CostModel model, const Edge& e, double time);

/// Minimizer over t >= t̄ of ½(t − t̄)² + g t + A σ*_e(t).
/// Throws NumericalError if the root finder fails to converge.
double prox_step(CostModel model, const Edge& e, double g, double A);

}  // namespace trafeq
