#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "lmpso/swarm/types.hpp"
#include "lmpso/tsp/instance.hpp"

namespace lmpso::heuristic {

/// Newline-delimited JSON frames exchanged with the evaluator subprocess.
/// Every frame carries "type" and "version".
///
///   -> {"type":"hello","version":1}
///   <- {"type":"hello","version":1}
///   -> {"type":"eval_request","version":1,"id":7,"source":"...","instances":[...],
///       "timeout_s":30.0,"return_tours":false}
///   <- {"type":"eval_response","version":1,"id":7,"lengths":[...],"tours":[[...]]}
///   <- {"type":"eval_response","version":1,"id":7,"error":{"kind":"timeout","message":"..."}}
///   -> {"type":"shutdown","version":1}
///
/// "tours" is present only when requested. Error kinds used by the evaluator:
/// syntax_error, runtime_error, timeout, invalid_tour, missing_entry.
inline constexpr int kProtocolVersion = 1;

struct Hello {
  int version = kProtocolVersion;
};

struct Shutdown {
  int version = kProtocolVersion;
};

struct EvalRequest {
  std::uint64_t id = 0;
  std::string source;
  std::vector<tsp::TspInstance> instances;
  double timeout_s = 30.0;
  bool return_tours = false;
};

struct EvalFailure {
  std::string kind;
  std::string message;
};

struct EvalResponse {
  std::uint64_t id = 0;
  std::vector<double> lengths;
  std::optional<std::vector<std::vector<long long>>> tours;
  std::optional<EvalFailure> error;

  bool ok() const noexcept { return !error.has_value(); }
};

using Frame = std::variant<Hello, EvalRequest, EvalResponse, Shutdown>;

/// Malformed or unexpected frame. Scoring of the current candidate fails;
/// the engine treats it like any other invalid reply.
class ProtocolError : public swarm::EvaluationError {
 public:
  using swarm::EvaluationError::EvaluationError;
};

/// Peer speaks another protocol version. Not recoverable.
class VersionMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

nlohmann::json to_json(const Frame& frame);
/// One line, no trailing newline.
std::string encode(const Frame& frame);

/// Throws ProtocolError on bad JSON or shape, VersionMismatch on a different version.
Frame decode(const std::string& line);

}  // namespace lmpso::heuristic
