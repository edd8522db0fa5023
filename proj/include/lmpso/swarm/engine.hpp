#pragma once

#include <atomic>
#include <concepts>
#include <exception>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lmpso/llm/chat.hpp"
#include "lmpso/rng.hpp"
#include "lmpso/swarm/trace.hpp"
#include "lmpso/swarm/types.hpp"

namespace lmpso::swarm {

/// Inputs for one particle's meta-prompt.
struct RenderInputs {
  std::size_t particle;
  std::string_view inertia;    // how the current position was generated
  std::string_view position;   // current position text
  std::string_view direction;  // freshly constructed velocity
  Rng& rng;
};

/// Problem adapter contract.
///
/// initial_position returns the raw text of a starting position; the engine
/// decodes and scores it through parse_and_validate/evaluate like any model
/// reply, so every held position has passed validation.
///
/// initial_position, parse_and_validate and evaluate may be called from several
/// threads at once when the swarm runs in concurrent mode.
template <class A>
concept ProblemAdapter =
    requires(A& a, Rng& rng, llm::ChatBackend& backend, const llm::SamplingParams& params,
             std::string_view text, const typename A::Solution& solution,
             const Candidate<typename A::Solution>& cand, const RenderInputs& in) {
      typename A::Solution;
      { a.describe(rng) } -> std::convertible_to<std::string>;
      { a.initial_position(rng, backend, params) } -> std::convertible_to<std::string>;
      { a.construct_velocity(cand, cand) } -> std::same_as<VelocityPrompt>;
      { a.render(in) } -> std::same_as<llm::MetaPrompt>;
      { a.parse_and_validate(text) } -> std::same_as<Parsed<typename A::Solution>>;
      { a.evaluate(solution) } -> std::convertible_to<double>;
    };

template <class S>
struct Particle {
  std::size_t id = 0;
  Candidate<S> position;
  VelocityPrompt velocity;
  std::optional<Candidate<S>> pbest;
  std::vector<std::pair<std::size_t, double>> history;
};

template <class S>
struct SwarmState {
  std::vector<Particle<S>> particles;
  std::optional<Candidate<S>> gbest;
};

template <class S>
struct RunResult {
  Candidate<S> gbest;
  RunTrace trace;
  std::size_t queries = 0;
};

/// Base number of model queries of a run: one per particle per iteration.
/// Per-query inference cost is not part of the count.
constexpr std::size_t cost_model(std::size_t particles, std::size_t iterations) noexcept {
  return particles * iterations;
}

/// Worst case with every reply rejected until the retry limit.
constexpr std::size_t max_queries(std::size_t particles, std::size_t iterations,
                                  std::size_t retry_limit) noexcept {
  return particles * iterations * (1 + retry_limit);
}

/// Replaces pbest_i iff `candidate` is strictly better, then gbest iff the
/// (possibly new) pbest_i is strictly better. Ties keep the incumbent.
template <class S>
std::pair<bool, bool> update_bests(SwarmState<S>& swarm, const Candidate<S>& candidate,
                                   std::size_t i) {
  auto& p = swarm.particles.at(i);
  const bool pbest_changed = !p.pbest || candidate.score < p.pbest->score;
  if (pbest_changed) p.pbest = candidate;
  const bool gbest_changed = !swarm.gbest || p.pbest->score < swarm.gbest->score;
  if (gbest_changed) swarm.gbest = *p.pbest;
  return {pbest_changed, gbest_changed};
}

/// Decode and score one reply. Adapter-side EvaluationError becomes a violation.
template <ProblemAdapter A>
Parsed<Candidate<typename A::Solution>> decode_candidate(A& adapter, std::string text,
                                                         bool minimize = true) {
  using S = typename A::Solution;
  if (text.empty()) return Violation{Violation::Kind::parse_failure, "empty reply"};
  try {
    auto parsed = adapter.parse_and_validate(text);
    if (auto* v = std::get_if<Violation>(&parsed)) return std::move(*v);
    S solution = std::move(std::get<S>(parsed));
    double score = static_cast<double>(adapter.evaluate(solution));
    if (!minimize) score = -score;
    if (!std::isfinite(score)) {
      return Violation{Violation::Kind::evaluation_error, "objective is not finite"};
    }
    return Candidate<S>{std::move(text), std::move(solution), score};
  } catch (const EvaluationError& e) {
    return Violation{Violation::Kind::evaluation_error, e.what()};
  }
}

template <class S>
struct Acquisition {
  /// Empty when neither the model nor reinitialization produced a valid position.
  std::optional<Candidate<S>> position;
  EventKind kind = EventKind::accepted;
  std::size_t retries = 0;
  std::size_t queries = 0;
};

/// Query until a valid reply arrives, at most retry_limit + 1 times; after that
/// fall back to a fresh initial position from the adapter.
/// BackendUnavailable propagates.
template <ProblemAdapter A>
Acquisition<typename A::Solution> acquire_position(A& adapter, llm::ChatBackend& backend,
                                                   const llm::MetaPrompt& prompt,
                                                   const SwarmConfig& cfg, Rng& rng) {
  Acquisition<typename A::Solution> out;
  for (std::size_t attempt = 0; attempt <= cfg.retry_limit; ++attempt) {
    std::string reply = backend.complete(prompt, cfg.sampling);
    ++out.queries;
    auto decoded = decode_candidate(adapter, std::move(reply), cfg.minimize);
    if (is_valid(decoded)) {
      out.position = std::move(std::get<0>(decoded));
      out.kind = attempt == 0 ? EventKind::accepted : EventKind::retried;
      out.retries = attempt;
      return out;
    }
  }
  out.retries = cfg.retry_limit;
  auto fresh = decode_candidate(adapter, adapter.initial_position(rng, backend, cfg.sampling),
                                cfg.minimize);
  if (is_valid(fresh)) {
    out.position = std::move(std::get<0>(fresh));
    out.kind = EventKind::reinitialized;
  } else {
    out.kind = EventKind::evaluation_error;
  }
  return out;
}

namespace detail {

/// Counts every model query made through it.
class CountingBackend final : public llm::ChatBackend {
 public:
  explicit CountingBackend(llm::ChatBackend& inner) : inner_(inner) {}
  using llm::ChatBackend::complete;
  std::string complete(const llm::Conversation& m, const llm::SamplingParams& p) override {
    ++count_;
    return inner_.complete(m, p);
  }
  std::size_t count() const noexcept { return count_.load(); }

 private:
  llm::ChatBackend& inner_;
  std::atomic<std::size_t> count_{0};
};

/// Runs body(i) for i in [0, n), in parallel when requested. The first
/// exception (lowest i) is rethrown after all bodies finish.
template <class Body>
void for_each_particle(std::size_t n, bool concurrent, Body&& body) {
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1) if (concurrent)
  for (long long i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

template <class S>
ParticleEvent make_event(const Particle<S>& p, EventKind kind, std::size_t retries) {
  return ParticleEvent{p.id, kind, retries, p.position.score, p.position.text};
}

template <class S>
IterationRecord sync_bests(SwarmState<S>& swarm, std::size_t iter,
                           std::vector<ParticleEvent> events) {
  for (std::size_t i = 0; i < swarm.particles.size(); ++i) {
    auto& p = swarm.particles[i];
    p.history.emplace_back(iter, p.position.score);
    update_bests(swarm, p.position, i);
  }
  return IterationRecord{iter, swarm.gbest->score, swarm.gbest->text, std::move(events)};
}

}  // namespace detail

using IterationCallback = std::function<void(const IterationRecord&)>;

/// Language-model particle swarm.
///
/// Per iteration: every particle builds its next velocity from (pbest_i, gbest),
/// renders the meta-prompt (problem description, inertia, current position,
/// new velocity), and asks the model for a new position, retrying or
/// reinitializing on invalid replies. Personal and global bests are then
/// updated in particle-id order at one synchronization point. Positions from
/// the last iteration are scored before the result is returned, so the returned
/// gbest is the best valid candidate ever held.
template <ProblemAdapter A>
RunResult<typename A::Solution> run(A& adapter, llm::ChatBackend& backend, const SwarmConfig& cfg,
                                    const IterationCallback& on_iteration = {}) {
  using S = typename A::Solution;
  cfg.validate();
  detail::CountingBackend counted(backend);
  const std::size_t n = cfg.num_particles;

  std::vector<Rng> rngs;
  rngs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) rngs.push_back(make_stream(cfg.rng_seed, "swarm.particle", i));

  SwarmState<S> swarm;
  swarm.particles.resize(n);
  std::vector<std::size_t> init_retries(n, 0);
  detail::for_each_particle(n, cfg.concurrent, [&](std::size_t i) {
    auto& p = swarm.particles[i];
    p.id = i;
    p.velocity = VelocityPrompt{cfg.bootstrap_velocity};
    for (std::size_t attempt = 0; attempt <= cfg.retry_limit; ++attempt) {
      auto decoded = decode_candidate(
          adapter, adapter.initial_position(rngs[i], counted, cfg.sampling), cfg.minimize);
      if (is_valid(decoded)) {
        p.position = std::move(std::get<0>(decoded));
        init_retries[i] = attempt;
        return;
      }
    }
    throw AdapterInitFailure("particle " + std::to_string(i) + ": no valid initial position after " +
                             std::to_string(cfg.retry_limit + 1) + " attempts");
  });

  RunResult<S> result;
  {
    std::vector<ParticleEvent> events;
    for (const auto& p : swarm.particles) {
      events.push_back(detail::make_event(p, EventKind::initialized, init_retries[p.id]));
    }
    result.trace.initialization = detail::sync_bests(swarm, 0, std::move(events));
  }

  std::vector<VelocityPrompt> next_velocity(n);
  std::vector<std::optional<llm::MetaPrompt>> prompts(n);
  std::vector<Acquisition<S>> acquired(n);
  for (std::size_t t = 1; t <= cfg.max_iterations; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      auto& p = swarm.particles[i];
      next_velocity[i] = adapter.construct_velocity(*p.pbest, *swarm.gbest);
      prompts[i] = adapter.render(
          RenderInputs{i, p.velocity.text, p.position.text, next_velocity[i].text, rngs[i]});
    }

    detail::for_each_particle(n, cfg.concurrent, [&](std::size_t i) {
      acquired[i] = acquire_position(adapter, counted, *prompts[i], cfg, rngs[i]);
    });

    std::vector<ParticleEvent> events;
    events.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      auto& p = swarm.particles[i];
      auto& a = acquired[i];
      if (a.position) {
        p.position = std::move(*a.position);
        p.velocity = a.kind == EventKind::reinitialized ? VelocityPrompt{cfg.bootstrap_velocity}
                                                        : std::move(next_velocity[i]);
      }
      events.push_back(detail::make_event(p, a.kind, a.retries));
    }
    result.trace.per_iteration.push_back(detail::sync_bests(swarm, t, std::move(events)));
    if (on_iteration) on_iteration(result.trace.per_iteration.back());
  }

  result.gbest = *swarm.gbest;
  result.queries = counted.count();
  return result;
}

}  // namespace lmpso::swarm
