#pragma once

#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "vague/measure.hpp"

namespace vague {

/// Witness for the value of sup_A mu(A) - nu(A^eps): the maximizing atom
/// subset of mu (from the min cut of the feasibility flow) and the
/// associated flow value.
struct DeficiencyCertificate {
  double epsilon = 0;
  std::vector<size_t> witness_set;  // indices into mu.atoms()
  double deficiency_value = 0;
  double flow_value = 0;
};

/// max over atom subsets A of mu(A) - nu(A^eps), with A^eps the closed
/// eps-thickening in the chosen metric.  Computed as total_mass(mu) minus
/// the max flow of the bipartite feasibility graph.
DeficiencyCertificate deficiency(const DiscreteMeasure& mu,
                                 const DiscreteMeasure& nu, double eps,
                                 MetricChoice metric);

/// Exact Levy-Prohorov distance between probability measures:
/// inf{eps > 0 : mu(A) <= nu(A^eps) + eps for all A}, capped at 1.
/// Inputs must have total mass 1 up to 1e-9 (then renormalized exactly).
double prohorov(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                MetricChoice metric);

/// Brute-force verifier enumerating all atom subsets; combined atom count
/// capped at 16.
double prohorov_oracle(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                       MetricChoice metric);

/// rho_hat(mu,nu) = |mu(X)-nu(X)| + (mu(X)^nu(X)) * prohorov(normalized),
/// with the second term taken as 0 when either total mass vanishes.
double finite_measure_dist(const DiscreteMeasure& mu,
                           const DiscreteMeasure& nu);

struct VagueDistance {
  double value = 0;
  double error_bound = 0;  // truncation error of the series tail
};

/// rho_tilde(mu,nu) = sum_m 2^{-m} (1 ^ rho_hat(T_m mu, T_m nu)), summed to
/// the level M with 2^{-M} <= tol.
VagueDistance vague_dist(const LocallyFiniteMeasure& mu,
                         const LocallyFiniteMeasure& nu, double tol);

nlohmann::json certificate_to_json(const DeficiencyCertificate& cert);

}  // namespace vague
