#include "lmpso/heuristic/evaluator_client.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>
#include <mutex>
#include <thread>

extern char** environ;

namespace lmpso::heuristic {
namespace {

using Clock = std::chrono::steady_clock;

void ignore_sigpipe() {
  static std::once_flag once;
  std::call_once(once, [] { ::signal(SIGPIPE, SIG_IGN); });
}

std::string errno_text(int err) { return std::strerror(err); }

bool is_permutation_of(const std::vector<long long>& tour, std::size_t n) {
  if (tour.size() != n) return false;
  std::vector<bool> seen(n, false);
  for (long long c : tour) {
    if (c < 0 || static_cast<std::size_t>(c) >= n || seen[static_cast<std::size_t>(c)]) return false;
    seen[static_cast<std::size_t>(c)] = true;
  }
  return true;
}

}  // namespace

struct EvaluatorClient::Process {
  pid_t pid = -1;
  int to_child = -1;
  int from_child = -1;
  std::string buffer;

  ~Process() { close_pipes(); }

  void close_pipes() {
    if (to_child >= 0) ::close(to_child);
    if (from_child >= 0) ::close(from_child);
    to_child = from_child = -1;
  }

  void write_line(const std::string& line) {
    std::string data = line + "\n";
    std::size_t off = 0;
    while (off < data.size()) {
      const ssize_t w = ::write(to_child, data.data() + off, data.size() - off);
      if (w < 0) {
        if (errno == EINTR) continue;
        throw EvaluatorDown("evaluator stdin closed: " + errno_text(errno));
      }
      off += static_cast<std::size_t>(w);
    }
  }

  std::string read_line(Clock::time_point deadline) {
    while (true) {
      if (const auto nl = buffer.find('\n'); nl != std::string::npos) {
        std::string line = buffer.substr(0, nl);
        buffer.erase(0, nl + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
      }
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
      if (left.count() <= 0) throw EvaluatorDown("evaluator did not answer in time");
      pollfd pfd{from_child, POLLIN, 0};
      const int r = ::poll(&pfd, 1, static_cast<int>(std::min<long long>(left.count(), 1'000'000)));
      if (r < 0) {
        if (errno == EINTR) continue;
        throw EvaluatorDown("poll failed: " + errno_text(errno));
      }
      if (r == 0) continue;
      char chunk[4096];
      const ssize_t n = ::read(from_child, chunk, sizeof chunk);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw EvaluatorDown("evaluator stdout read failed: " + errno_text(errno));
      }
      if (n == 0) throw EvaluatorDown("evaluator exited");
      buffer.append(chunk, static_cast<std::size_t>(n));
    }
  }

  void terminate() {
    close_pipes();
    if (pid > 0) {
      ::kill(pid, SIGKILL);
      int status = 0;
      while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
      }
      pid = -1;
    }
  }

  // Waits briefly for a voluntary exit, then kills.
  void reap(std::chrono::milliseconds patience) {
    close_pipes();
    if (pid <= 0) return;
    const auto until = Clock::now() + patience;
    int status = 0;
    while (Clock::now() < until) {
      const pid_t r = ::waitpid(pid, &status, WNOHANG);
      if (r == pid || (r < 0 && errno != EINTR)) {
        pid = -1;
        return;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    terminate();
  }
};

EvaluatorClient::EvaluatorClient(EvaluatorOptions options) : options_(std::move(options)) {
  if (options_.command.empty()) throw std::invalid_argument("evaluator command is empty");
  ignore_sigpipe();
  start();
}

EvaluatorClient::~EvaluatorClient() {
  try {
    stop();
  } catch (...) {
  }
}

bool EvaluatorClient::running() const noexcept { return proc_ && proc_->pid > 0; }

void EvaluatorClient::start() {
  std::vector<std::string> args = options_.command;
  if (options_.policy_path) args.push_back(*options_.policy_path);
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  argv.push_back(nullptr);

  int in_pipe[2];
  int out_pipe[2];
  if (::pipe2(in_pipe, O_CLOEXEC) != 0) throw EvaluatorDown("pipe: " + errno_text(errno));
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw EvaluatorDown("pipe: " + errno_text(errno));
  }
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in_pipe[0], STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);
  pid_t pid = -1;
  const int rc = ::posix_spawnp(&pid, argv[0], &actions, nullptr, argv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  if (rc != 0) {
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    throw EvaluatorDown("cannot launch evaluator '" + args[0] + "': " + errno_text(rc));
  }
  proc_ = std::make_unique<Process>();
  proc_->pid = pid;
  proc_->to_child = in_pipe[1];
  proc_->from_child = out_pipe[0];

  try {
    proc_->write_line(encode(Hello{}));
    const auto line = proc_->read_line(Clock::now() + options_.handshake_timeout);
    const Frame reply = decode(line);
    if (!std::holds_alternative<Hello>(reply)) throw ProtocolError("expected hello frame in handshake");
  } catch (const VersionMismatch&) {
    kill_process();
    throw;
  } catch (const std::exception& e) {
    kill_process();
    throw EvaluatorDown(std::string("evaluator handshake failed: ") + e.what());
  }
  if (started_once_) ++restarts_;
  started_once_ = true;
}

void EvaluatorClient::kill_process() {
  if (proc_) proc_->terminate();
  proc_.reset();
}

void EvaluatorClient::stop() {
  if (!proc_) return;
  try {
    proc_->write_line(encode(Shutdown{}));
  } catch (const std::exception&) {
  }
  proc_->reap(std::chrono::milliseconds(1000));
  proc_.reset();
}

EvalResponse EvaluatorClient::call(EvalRequest request) {
  if (!running()) start();
  request.id = next_id_++;
  double budget_s = 0.0;
  for (std::size_t i = 0; i < request.instances.size(); ++i) budget_s += request.timeout_s;
  const auto deadline = Clock::now() +
                        std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(budget_s)) +
                        options_.response_grace;
  EvalResponse response;
  try {
    proc_->write_line(encode(request));
    const Frame frame = decode(proc_->read_line(deadline));
    const auto* r = std::get_if<EvalResponse>(&frame);
    if (!r) throw ProtocolError("expected eval_response frame");
    if (r->id != request.id) {
      throw ProtocolError("response id " + std::to_string(r->id) + " does not match request " +
                          std::to_string(request.id));
    }
    response = *r;
    if (response.ok()) {
      if (response.lengths.size() != request.instances.size()) {
        throw ProtocolError("expected " + std::to_string(request.instances.size()) + " lengths, got " +
                            std::to_string(response.lengths.size()));
      }
      for (double len : response.lengths) {
        if (!std::isfinite(len) || len < 0.0) throw ProtocolError("length is not a finite non-negative number");
      }
    }
  } catch (...) {
    kill_process();
    throw;
  }

  if (response.ok() && response.tours) {
    const auto& tours = *response.tours;
    if (tours.size() != request.instances.size()) {
      response.error = EvalFailure{"invalid_tour", "evaluator echoed the wrong number of tours"};
    } else {
      for (std::size_t i = 0; i < tours.size(); ++i) {
        if (!is_permutation_of(tours[i], request.instances[i].size())) {
          response.error = EvalFailure{"invalid_tour", "tour for instance " + std::to_string(i) +
                                                           " is not a permutation"};
          break;
        }
      }
    }
    if (response.error) response.lengths.clear();
  }
  return response;
}

EvaluatorPool::EvaluatorPool(const EvaluatorOptions& options, std::size_t size) {
  if (size == 0) throw std::invalid_argument("evaluator pool needs at least one client");
  for (std::size_t i = 0; i < size; ++i) {
    clients_.push_back(std::make_unique<EvaluatorClient>(options));
    free_.push_back(i);
  }
}

EvalResponse EvaluatorPool::call(EvalRequest request) {
  std::size_t slot;
  {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return !free_.empty(); });
    slot = free_.back();
    free_.pop_back();
  }
  struct Release {
    EvaluatorPool& pool;
    std::size_t slot;
    ~Release() {
      {
        std::lock_guard lock(pool.mu_);
        pool.free_.push_back(slot);
      }
      pool.cv_.notify_one();
    }
  } release{*this, slot};
  return clients_[slot]->call(std::move(request));
}

std::size_t EvaluatorPool::restarts() const {
  std::lock_guard lock(mu_);
  std::size_t total = 0;
  for (const auto& c : clients_) total += c->restarts();
  return total;
}

}  // namespace lmpso::heuristic
