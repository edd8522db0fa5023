#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "lmpso/heuristic/wire.hpp"
#include "lmpso/swarm/types.hpp"

namespace lmpso::heuristic {

/// The evaluator could not be started, died, or stopped answering.
class EvaluatorDown : public swarm::EvaluationError {
 public:
  using swarm::EvaluationError::EvaluationError;
};

struct EvaluatorOptions {
  /// Executable and leading arguments; the policy path is appended when set.
  std::vector<std::string> command;
  std::optional<std::string> policy_path;
  std::chrono::milliseconds handshake_timeout{10'000};
  /// Added to the request's summed per-instance timeouts before the client
  /// gives up on a response and kills the subprocess.
  std::chrono::milliseconds response_grace{5'000};
};

/// One evaluator subprocess speaking the frame protocol over stdin/stdout.
/// Requests are strictly serialized. After a protocol error, timeout or crash
/// the subprocess is killed and transparently restarted by the next call.
class EvaluatorClient {
 public:
  /// Starts the subprocess and performs the hello handshake.
  /// Throws EvaluatorDown, or VersionMismatch when the peer disagrees.
  explicit EvaluatorClient(EvaluatorOptions options);
  ~EvaluatorClient();
  EvaluatorClient(const EvaluatorClient&) = delete;
  EvaluatorClient& operator=(const EvaluatorClient&) = delete;

  /// Sends the request (its id is replaced by the client's next id) and waits
  /// for the matching response. A success response is checked before being
  /// returned: one finite non-negative length per instance and, when tours are
  /// echoed, a permutation per instance. A tour that fails the check turns the
  /// response into an "invalid_tour" error.
  EvalResponse call(EvalRequest request);

  bool running() const noexcept;
  /// Number of times the subprocess was restarted after a failure.
  std::size_t restarts() const noexcept { return restarts_.load(); }
  /// Sends shutdown and reaps the subprocess. Idempotent.
  void stop();

 private:
  struct Process;
  void start();
  void kill_process();

  EvaluatorOptions options_;
  std::unique_ptr<Process> proc_;
  std::uint64_t next_id_ = 1;
  std::atomic<std::size_t> restarts_{0};
  bool started_once_ = false;
};

/// Fixed set of clients; each call borrows one. Size matches the engine's
/// particle concurrency.
class EvaluatorPool {
 public:
  EvaluatorPool(const EvaluatorOptions& options, std::size_t size);

  EvalResponse call(EvalRequest request);
  std::size_t size() const noexcept { return clients_.size(); }
  std::size_t restarts() const;

 private:
  std::vector<std::unique_ptr<EvaluatorClient>> clients_;
  std::vector<std::size_t> free_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
};

}  // namespace lmpso::heuristic
