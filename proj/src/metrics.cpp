#include "vague/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include <nlohmann/json.hpp>

namespace vague {

using json = nlohmann::json;

namespace {

constexpr double kFlowSlack = 1e-12;
constexpr size_t kAtomCap = 10000;
constexpr size_t kOracleCap = 16;

/// Edmonds-Karp max flow on the bipartite feasibility graph.  Deterministic:
/// atoms keep their sorted order, BFS explores nodes in index order.
struct FlowNetwork {
  // node ids: 0 = source, 1..n = mu atoms, n+1..n+k = nu atoms, n+k+1 = sink
  struct Edge {
    int to;
    double cap;
    size_t rev;
  };
  std::vector<std::vector<Edge>> adj;

  explicit FlowNetwork(size_t nodes) : adj(nodes) {}

  void add_edge(int u, int v, double cap) {
    adj[u].push_back({v, cap, adj[v].size()});
    adj[v].push_back({u, 0.0, adj[u].size() - 1});
  }

  double max_flow(int s, int t) {
    double total = 0;
    for (;;) {
      std::vector<int> prev_node(adj.size(), -1);
      std::vector<size_t> prev_edge(adj.size(), 0);
      std::queue<int> q;
      q.push(s);
      prev_node[s] = s;
      while (!q.empty() && prev_node[t] < 0) {
        int u = q.front();
        q.pop();
        for (size_t i = 0; i < adj[u].size(); ++i) {
          const Edge& e = adj[u][i];
          if (e.cap > kFlowSlack && prev_node[e.to] < 0) {
            prev_node[e.to] = u;
            prev_edge[e.to] = i;
            q.push(e.to);
          }
        }
      }
      if (prev_node[t] < 0) break;
      double aug = kInf;
      for (int v = t; v != s; v = prev_node[v])
        aug = std::min(aug, adj[prev_node[v]][prev_edge[v]].cap);
      for (int v = t; v != s; v = prev_node[v]) {
        Edge& e = adj[prev_node[v]][prev_edge[v]];
        e.cap -= aug;
        adj[e.to][e.rev].cap += aug;
      }
      total += aug;
    }
    return total;
  }

  /// Nodes reachable from s in the residual graph (the min cut side).
  std::vector<bool> reachable(int s) const {
    std::vector<bool> seen(adj.size(), false);
    std::queue<int> q;
    q.push(s);
    seen[s] = true;
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (const Edge& e : adj[u])
        if (e.cap > kFlowSlack && !seen[e.to]) {
          seen[e.to] = true;
          q.push(e.to);
        }
    }
    return seen;
  }
};

void check_same_space(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (!(mu.space() == nu.space()))
    throw SpaceMismatchError("measures live on different spaces");
}

std::vector<std::vector<double>> pairwise_distances(const DiscreteMeasure& mu,
                                                    const DiscreteMeasure& nu,
                                                    MetricChoice metric) {
  std::vector<std::vector<double>> d(mu.size(),
                                     std::vector<double>(nu.size()));
  for (size_t i = 0; i < mu.size(); ++i)
    for (size_t j = 0; j < nu.size(); ++j)
      d[i][j] = mu.space().dist(mu.atoms()[i].point, nu.atoms()[j].point,
                                metric);
  return d;
}

DeficiencyCertificate deficiency_impl(
    const DiscreteMeasure& mu, const DiscreteMeasure& nu, double eps,
    const std::vector<std::vector<double>>& dist) {
  size_t n = mu.size(), k = nu.size();
  FlowNetwork net(n + k + 2);
  int source = 0, sink = static_cast<int>(n + k + 1);
  for (size_t i = 0; i < n; ++i)
    net.add_edge(source, static_cast<int>(1 + i), mu.atoms()[i].weight);
  for (size_t j = 0; j < k; ++j)
    net.add_edge(static_cast<int>(1 + n + j), sink, nu.atoms()[j].weight);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < k; ++j)
      if (dist[i][j] <= eps + kFlowSlack)
        net.add_edge(static_cast<int>(1 + i), static_cast<int>(1 + n + j),
                     kInf);
  DeficiencyCertificate cert;
  cert.epsilon = eps;
  cert.flow_value = net.max_flow(source, sink);
  cert.deficiency_value = mu.total_mass() - cert.flow_value;
  auto seen = net.reachable(source);
  for (size_t i = 0; i < n; ++i)
    if (seen[1 + i]) cert.witness_set.push_back(i);
  return cert;
}

std::vector<double> breakpoints(const std::vector<std::vector<double>>& dist) {
  std::vector<double> out = {0.0};
  for (const auto& row : dist)
    for (double d : row)
      if (d <= 1.0) out.push_back(d);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

DiscreteMeasure normalize_probability(const DiscreteMeasure& mu,
                                      const char* who) {
  double m = mu.total_mass();
  if (std::fabs(m - 1.0) > 1e-9)
    throw SchemaError(std::string(who) +
                      " must be a probability measure (total mass within "
                      "1e-9 of 1)");
  return scale(mu, 1.0 / m);
}

}  // namespace

DeficiencyCertificate deficiency(const DiscreteMeasure& mu,
                                 const DiscreteMeasure& nu, double eps,
                                 MetricChoice metric) {
  check_same_space(mu, nu);
  if (mu.size() + nu.size() > kAtomCap)
    throw SizeCapError("combined atom count exceeds the exact-flow cap; "
                       "subsample the measures");
  return deficiency_impl(mu, nu, eps, pairwise_distances(mu, nu, metric));
}

double prohorov(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                MetricChoice metric) {
  check_same_space(mu, nu);
  if (mu.size() + nu.size() > kAtomCap)
    throw SizeCapError("combined atom count exceeds the exact-flow cap; "
                       "subsample the measures");
  if (mu.size() == 0 && nu.size() == 0) return 0;
  DiscreteMeasure p = normalize_probability(mu, "mu");
  DiscreteMeasure q = normalize_probability(nu, "nu");
  auto dist = pairwise_distances(p, q, metric);
  double best = 1.0;
  for (double eps : breakpoints(dist)) {
    if (eps >= best) break;
    DeficiencyCertificate cert = deficiency_impl(p, q, eps, dist);
    best = std::min(best, std::max(eps, cert.deficiency_value));
  }
  return std::max(best, 0.0);
}

double prohorov_oracle(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                       MetricChoice metric) {
  check_same_space(mu, nu);
  if (mu.size() + nu.size() > kOracleCap)
    throw SizeCapError("oracle is capped at 16 combined atoms");
  if (mu.size() == 0 && nu.size() == 0) return 0;
  DiscreteMeasure p = normalize_probability(mu, "mu");
  DiscreteMeasure q = normalize_probability(nu, "nu");
  auto dist = pairwise_distances(p, q, metric);
  size_t n = p.size();
  auto deficiency_at = [&](double eps) {
    double worst = 0;
    for (size_t mask = 0; mask < (size_t(1) << n); ++mask) {
      double mu_a = 0;
      double nu_thick = 0;
      for (size_t j = 0; j < q.size(); ++j) {
        bool close = false;
        for (size_t i = 0; i < n; ++i)
          if ((mask >> i) & 1) {
            if (dist[i][j] <= eps + kFlowSlack) close = true;
          }
        if (close) nu_thick += q.atoms()[j].weight;
      }
      for (size_t i = 0; i < n; ++i)
        if ((mask >> i) & 1) mu_a += p.atoms()[i].weight;
      worst = std::max(worst, mu_a - nu_thick);
    }
    return worst;
  };
  double best = 1.0;
  for (double eps : breakpoints(dist)) {
    if (eps >= best) break;
    best = std::min(best, std::max(eps, deficiency_at(eps)));
  }
  return std::max(best, 0.0);
}

double finite_measure_dist(const DiscreteMeasure& mu,
                           const DiscreteMeasure& nu) {
  check_same_space(mu, nu);
  double a = mu.total_mass(), b = nu.total_mass();
  double out = std::fabs(a - b);
  double lo = std::min(a, b);
  if (lo > 0)
    out += lo * prohorov(scale(mu, 1.0 / a), scale(nu, 1.0 / b),
                         MetricChoice::Hu);
  return out;
}

VagueDistance vague_dist(const LocallyFiniteMeasure& mu,
                         const LocallyFiniteMeasure& nu, double tol) {
  if (!(tol > 0)) throw SchemaError("vague_dist tolerance must be > 0");
  if (!(mu.space() == nu.space()))
    throw SpaceMismatchError("measures live on different spaces");
  int levels = 1;
  while (std::ldexp(1.0, -levels) > tol && levels < 60) ++levels;
  VagueDistance out;
  double weight = 1.0;
  for (int m = 1; m <= levels; ++m) {
    weight *= 0.5;
    double term = finite_measure_dist(truncate(mu, m), truncate(nu, m));
    out.value += weight * std::min(term, 1.0);
  }
  out.error_bound = weight;  // geometric tail: sum_{m > M} 2^{-m} = 2^{-M}
  return out;
}

json certificate_to_json(const DeficiencyCertificate& cert) {
  json j;
  j["epsilon"] = cert.epsilon;
  j["deficiency"] = cert.deficiency_value;
  j["flow"] = cert.flow_value;
  j["witness_set"] = cert.witness_set;
  return j;
}

}  // namespace vague
