#include "lmpso/tsp/swap_pso.hpp"

#include <stdexcept>

namespace lmpso::tsp {

std::vector<std::size_t> apply_swaps(const SwapSequence& v, std::vector<std::size_t> order) {
  for (auto [i, j] : v.swaps) {
    if (i >= order.size() || j >= order.size()) throw std::out_of_range("swap index out of range");
    std::swap(order[i], order[j]);
  }
  return order;
}

SwapSequence diff(const std::vector<std::size_t>& to, const std::vector<std::size_t>& from) {
  if (to.size() != from.size()) throw std::invalid_argument("diff: size mismatch");
  const auto n = from.size();
  std::vector<std::size_t> cur = from;
  // where[c] = index of value c in cur
  std::vector<std::size_t> where(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (cur[i] >= n) throw std::invalid_argument("diff: not a permutation");
    where[cur[i]] = i;
  }
  SwapSequence s;
  for (std::size_t i = 0; i < n; ++i) {
    if (cur[i] == to[i]) continue;
    if (to[i] >= n) throw std::invalid_argument("diff: not a permutation");
    const std::size_t j = where[to[i]];
    s.swaps.emplace_back(i, j);
    where[cur[i]] = j;
    where[cur[j]] = i;
    std::swap(cur[i], cur[j]);
  }
  return s;
}

void SwapPsoConfig::validate() const {
  if (particles < 1 || iterations < 1) throw std::invalid_argument("swap-PSO needs N, G >= 1");
  if (!(alpha >= 0.0 && alpha <= 1.0) || !(beta >= 0.0 && beta <= 1.0)) {
    throw std::invalid_argument("swap-PSO alpha and beta must lie in [0, 1]");
  }
}

namespace {

double unit(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

void keep_each(SwapSequence& out, const SwapSequence& in, double p, Rng& rng) {
  for (const auto& s : in.swaps) {
    if (unit(rng) < p) out.swaps.push_back(s);
  }
}

swarm::ParticleEvent event(std::size_t id, swarm::EventKind kind, const Tour& t, double len) {
  return swarm::ParticleEvent{id, kind, 0, len, format_route(t)};
}

}  // namespace

SwapPsoResult swap_pso(const TspInstance& instance, const SwapPsoConfig& cfg, Rng& rng) {
  cfg.validate();
  const auto n = instance.size();
  const DistanceMatrix d(instance);
  const std::size_t init_swaps = cfg.initial_velocity_swaps.value_or(n);
  const std::size_t cap = cfg.velocity_cap.value_or(n);

  struct P {
    Tour x;
    double fx;
    SwapSequence v;
    Tour pbest;
    double fp;
  };
  std::vector<P> swarm;
  swarm.reserve(cfg.particles);
  SwapPsoResult result;
  result.positions.emplace_back();

  std::size_t g = 0;
  for (std::size_t i = 0; i < cfg.particles; ++i) {
    P p;
    p.x = random_tour(n, rng);
    p.fx = tour_length(d, p.x);
    for (std::size_t k = 0; k < init_swaps; ++k) {
      p.v.swaps.emplace_back(uniform_index(rng, n), uniform_index(rng, n));
    }
    p.pbest = p.x;
    p.fp = p.fx;
    if (i == 0 || p.fp < swarm[g].fp) g = i;
    result.positions.back().push_back(p.x);
    result.trace.initialization.events.push_back(event(i, swarm::EventKind::initialized, p.x, p.fx));
    swarm.push_back(std::move(p));
  }
  Tour gbest = swarm[g].pbest;
  double fg = swarm[g].fp;
  result.trace.initialization.gbest_score = fg;
  result.trace.initialization.gbest_text = format_route(gbest);

  for (std::size_t t = 1; t <= cfg.iterations; ++t) {
    swarm::IterationRecord rec;
    rec.iter = t;
    result.positions.emplace_back();
    for (std::size_t i = 0; i < swarm.size(); ++i) {
      auto& p = swarm[i];
      SwapSequence v;
      const std::size_t carried = std::min(cap, p.v.size());
      v.swaps.assign(p.v.swaps.begin(), p.v.swaps.begin() + static_cast<std::ptrdiff_t>(carried));
      keep_each(v, diff(p.pbest.order, p.x.order), cfg.alpha, rng);
      keep_each(v, diff(gbest.order, p.x.order), cfg.beta, rng);
      p.x.order = apply_swaps(v, std::move(p.x.order));
      p.v = std::move(v);
      p.fx = tour_length(d, p.x);
      if (p.fx < p.fp) {
        p.pbest = p.x;
        p.fp = p.fx;
      }
      if (p.fp < fg) {
        gbest = p.pbest;
        fg = p.fp;
      }
      result.positions.back().push_back(p.x);
      rec.events.push_back(event(i, swarm::EventKind::accepted, p.x, p.fx));
    }
    rec.gbest_score = fg;
    rec.gbest_text = format_route(gbest);
    result.trace.per_iteration.push_back(std::move(rec));
  }
  result.best = std::move(gbest);
  result.length = fg;
  return result;
}

}  // namespace lmpso::tsp
