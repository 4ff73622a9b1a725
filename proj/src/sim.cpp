#include "shotdown/sim.hpp"

#include <cmath>
#include <stdexcept>

namespace shotdown {

Estimate survival_probability(const StableLaw& law, const Domain& dom, const Point& x0, double t,
                              const SimScheme& scheme, const RngStream& base, std::size_t n,
                              Exec exec) {
  if (n == 0) throw std::invalid_argument("survival_probability: empty budget");
  if (t > scheme.horizon) throw std::invalid_argument("survival_probability: t beyond horizon");
  auto r = map_reduce_paths(n, 1, exec, [&](std::size_t i, std::span<double> out) {
    RngStream rng = base.sub(i);
    PathRecord rec = simulate(law, dom, x0, scheme, rng);
    out[0] = rec.sigma > t ? 1.0 : 0.0;
  });
  Estimate e = r.estimate(0);
  double p = e.value;
  e.stderr_value = std::sqrt(std::max(p * (1 - p), 0.0) / static_cast<double>(n));
  return e;
}

ExitTripleHistogram exit_triple_histogram(const StableLaw& law, const Domain& dom, const Point& x0,
                                          const std::vector<double>& time_edges,
                                          const std::vector<Domain>& pre_cells,
                                          const std::vector<Domain>& land_cells,
                                          const SimScheme& scheme, const RngStream& base,
                                          std::size_t n, Exec exec) {
  if (time_edges.size() < 2 || pre_cells.empty() || land_cells.empty())
    throw std::invalid_argument("exit_triple_histogram: empty cell specification");
  ExitTripleHistogram h;
  h.time_edges = time_edges;
  h.n_pre = pre_cells.size();
  h.n_land = land_cells.size();
  const std::size_t nt = time_edges.size() - 1;
  const std::size_t k = nt * h.n_pre * h.n_land;

  auto r = map_reduce_paths(n, k, exec, [&](std::size_t i, std::span<double> out) {
    RngStream rng = base.sub(i);
    PathRecord rec = simulate(law, dom, x0, scheme, rng);
    if (!rec.shot_down()) return;
    std::size_t ti = nt;
    for (std::size_t b = 0; b < nt; ++b)
      if (rec.sigma >= time_edges[b] && rec.sigma < time_edges[b + 1]) {
        ti = b;
        break;
      }
    if (ti == nt) return;
    for (std::size_t pi = 0; pi < pre_cells.size(); ++pi) {
      if (!pre_cells[pi].contains(rec.x_pre)) continue;
      for (std::size_t li = 0; li < land_cells.size(); ++li)
        if (land_cells[li].contains(rec.x_land)) out[h.index(ti, pi, li)] = 1.0;
    }
  });

  h.prob.resize(k);
  for (std::size_t j = 0; j < k; ++j) {
    double p = r.mean(j);
    h.prob[j] = {p, std::sqrt(std::max(p * (1 - p), 0.0) / static_cast<double>(n)), n, {}};
  }
  return h;
}

}  // namespace shotdown
