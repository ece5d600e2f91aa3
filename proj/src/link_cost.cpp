#include "trafeq/link_cost.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "trafeq/error.hpp"

namespace trafeq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kRootIterations = 200;

void require_flow(double flow) {
  if (!(flow >= 0.0)) throw InvalidArgument("negative flow");
}

void require_time(const Edge& e, double time) {
  if (!(time >= e.free_flow_time))
    throw InvalidArgument("time below free-flow time");
}

// Solves z^p + c z = r for z >= 0 (p >= 1, c > 0, r > 0). The left side is
// convex and increasing, so Newton from the upper end of the bracket
// descends monotonically onto the root; bisection covers any misstep.
double solve_power_linear(double p, double c, double r) {
  double lo = 0.0;
  double hi = std::min(std::pow(r, 1.0 / p), r / c);
  double z = hi;
  const double tol = 1e-15 * (1.0 + r);
  for (int it = 0; it < kRootIterations; ++it) {
    const double zp = std::pow(z, p);
    const double f = zp + c * z - r;
    if (std::abs(f) <= tol) return z;
    if (f > 0.0)
      hi = z;
    else
      lo = z;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi)
      return z;
    const double df = (z > 0.0 ? p * zp / z : 0.0) + c;
    double next = z - f / df;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    z = next;
  }
  throw NumericalError("prox root finder did not converge");
}

}  // namespace

double travel_time(const Edge& e, double flow) {
  require_flow(flow);
  return e.free_flow_time *
         (1.0 + e.rho * std::pow(flow / e.capacity, e.power));
}

double sigma(const Edge& e, double flow) {
  require_flow(flow);
  const double mu = e.mu();
  return e.free_flow_time * flow *
         (1.0 + e.rho * (mu / (1.0 + mu)) * std::pow(flow / e.capacity, e.power));
}

double sigma_conj(CostModel model, const Edge& e, double time) {
  require_time(e, time);
  const double s = time - e.free_flow_time;
  switch (model) {
    case CostModel::BoundOnly:
      return 0.0;
    case CostModel::StableDynamics:
      return e.capacity * s;
    case CostModel::Beckmann:
      break;
  }
  if (s == 0.0) return 0.0;
  if (e.rho == 0.0) return kInf;
  const double mu = e.mu();
  return e.capacity * std::pow(s / (e.free_flow_time * e.rho), mu) * s /
         (1.0 + mu);
}

double sigma_conj_grad(CostModel model, const Edge& e, double time) {
  require_time(e, time);
  switch (model) {
    case CostModel::BoundOnly:
      return 0.0;
    case CostModel::StableDynamics:
      return e.capacity;
    case CostModel::Beckmann:
      break;
  }
  const double s = time - e.free_flow_time;
  if (s == 0.0 || e.rho == 0.0) return 0.0;
  return e.capacity * std::pow(s / (e.free_flow_time * e.rho), e.mu());
}

double prox_step(CostModel model, const Edge& e, double g, double A) {
  if (!(A > 0.0)) throw InvalidArgument("prox weight must be positive");
  const double r = -g;
  switch (model) {
    case CostModel::BoundOnly:
      return e.free_flow_time + std::max(0.0, r);
    case CostModel::StableDynamics:
      return e.free_flow_time + std::max(0.0, r - A * e.capacity);
    case CostModel::Beckmann:
      break;
  }
  if (!(r > 0.0) || e.rho == 0.0) return e.free_flow_time;
  // Stationarity: s + A f̄ (s / (t̄ ρ))^μ = r with s = t − t̄. Substituting
  // z = s^μ gives z^(1/μ) + c z = r.
  const double mu = e.mu();
  const double c = A * e.capacity / std::pow(e.free_flow_time * e.rho, mu);
  const double z = solve_power_linear(e.power, c, r);
  return e.free_flow_time + std::pow(z, e.power);
}

}  // namespace trafeq
