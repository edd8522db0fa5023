#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lmpso::swarm {

enum class EventKind { initialized, accepted, retried, reinitialized, evaluation_error };

std::string_view to_string(EventKind kind) noexcept;
EventKind event_kind_from_string(std::string_view name);

/// What happened to one particle in one iteration.
///   accepted           first reply was valid (retries = 0)
///   retried            valid after `retries` rejected replies
///   reinitialized      every reply rejected (retries = retry limit); fresh position
///   evaluation_error   reinitialization failed too; the particle kept its position
struct ParticleEvent {
  std::size_t particle = 0;
  EventKind kind = EventKind::accepted;
  std::size_t retries = 0;
  /// Score and text of the position the particle holds after this event.
  std::optional<double> score;
  std::string position;

  bool operator==(const ParticleEvent&) const = default;
};

struct IterationRecord {
  std::size_t iter = 0;
  double gbest_score = 0.0;
  std::string gbest_text;
  std::vector<ParticleEvent> events;

  bool operator==(const IterationRecord&) const = default;
};

/// Run history. `initialization` (iter 0) holds how each particle was seeded
/// and the swarm best after seeding; `per_iteration` has exactly one record per
/// iteration 1..G.
struct RunTrace {
  IterationRecord initialization;
  std::vector<IterationRecord> per_iteration;

  bool operator==(const RunTrace&) const = default;
};

/// JSONL: one object per line. Line 0 is the initialization record (iter 0),
/// followed by one line per iteration with fields
/// {iter, gbest_score, gbest_text, events:[{particle, kind, retries, score, position}]}.
void write_jsonl(std::ostream& out, const RunTrace& trace);
std::string to_jsonl(const RunTrace& trace);
RunTrace read_jsonl(std::istream& in);

}  // namespace lmpso::swarm
