#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <sstream>

#include "tsn/smtlib.hpp"

extern char** environ;

namespace tsn {
namespace {

class Fd {
 public:
  Fd() = default;
  explicit Fd(int fd) : fd_(fd) {}
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  Fd(Fd&& o) noexcept : fd_(o.release()) {}
  Fd& operator=(Fd&& o) noexcept {
    reset(o.release());
    return *this;
  }
  ~Fd() { reset(); }

  int get() const { return fd_; }
  explicit operator bool() const { return fd_ >= 0; }
  int release() {
    const int fd = fd_;
    fd_ = -1;
    return fd;
  }
  void reset(int fd = -1) {
    if (fd_ >= 0) ::close(fd_);
    fd_ = fd;
  }

 private:
  int fd_ = -1;
};

struct Pipe {
  Fd read;
  Fd write;
};

Pipe make_pipe() {
  std::array<int, 2> fds{};
  if (::pipe2(fds.data(), O_CLOEXEC) != 0) throw std::runtime_error(std::string("pipe: ") + std::strerror(errno));
  return Pipe{Fd(fds[0]), Fd(fds[1])};
}

void set_nonblocking(int fd) { ::fcntl(fd, F_SETFL, ::fcntl(fd, F_GETFL) | O_NONBLOCK); }

SolverResult failure(std::string message) {
  SolverResult r;
  r.status = SolverStatus::SolverError;
  r.message = std::move(message);
  return r;
}

}  // namespace

std::vector<std::string> split_command(std::string_view command) {
  std::istringstream is{std::string(command)};
  std::vector<std::string> out;
  for (std::string word; is >> word;) out.push_back(word);
  return out;
}

std::vector<std::string> default_solver_command() {
  if (const char* env = std::getenv("TSN_SOLVER"); env != nullptr && *env != '\0') return split_command(env);
  return {"z3", "-in", "-smt2"};
}

SolverResult run_solver(const std::string& document, std::span<const std::string> command, double timeout_s) {
  using Clock = std::chrono::steady_clock;
  if (command.empty()) return failure("empty solver command");
  if (timeout_s <= 0) return failure("timeout must be positive");
  ::signal(SIGPIPE, SIG_IGN);

  const auto started = Clock::now();
  const auto deadline = started + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(timeout_s));

  Pipe in = make_pipe();
  Pipe out = make_pipe();
  Pipe err = make_pipe();

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in.read.get(), STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, out.write.get(), STDOUT_FILENO);
  posix_spawn_file_actions_adddup2(&actions, err.write.get(), STDERR_FILENO);

  std::vector<char*> argv;
  for (const auto& arg : command) argv.push_back(const_cast<char*>(arg.c_str()));
  argv.push_back(nullptr);

  pid_t pid = -1;
  const int rc = ::posix_spawnp(&pid, argv[0], &actions, nullptr, argv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0) return failure("cannot start solver '" + command[0] + "': " + std::strerror(rc));

  in.read.reset();
  out.write.reset();
  err.write.reset();
  set_nonblocking(in.write.get());
  set_nonblocking(out.read.get());
  set_nonblocking(err.read.get());

  std::string stdout_text;
  std::string stderr_text;
  std::size_t written = 0;
  bool timed_out = false;
  if (document.empty()) in.write.reset();

  std::array<char, 65536> buffer{};
  while (out.read || err.read) {
    const auto now = Clock::now();
    if (now >= deadline) {
      timed_out = true;
      break;
    }
    std::vector<pollfd> fds;
    if (in.write) fds.push_back({in.write.get(), POLLOUT, 0});
    if (out.read) fds.push_back({out.read.get(), POLLIN, 0});
    if (err.read) fds.push_back({err.read.get(), POLLIN, 0});
    const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
    const int ready = ::poll(fds.data(), fds.size(), static_cast<int>(std::max<std::int64_t>(remaining, 1)));
    if (ready < 0) {
      if (errno == EINTR) continue;
      break;
    }
    for (const auto& p : fds) {
      if (p.revents == 0) continue;
      if (in.write && p.fd == in.write.get()) {
        const ssize_t n = ::write(p.fd, document.data() + written, document.size() - written);
        if (n > 0) written += static_cast<std::size_t>(n);
        if (n < 0 && errno != EAGAIN) in.write.reset();
        if (written == document.size()) in.write.reset();
        continue;
      }
      Fd& fd = (out.read && p.fd == out.read.get()) ? out.read : err.read;
      std::string& sink = (&fd == &out.read) ? stdout_text : stderr_text;
      const ssize_t n = ::read(p.fd, buffer.data(), buffer.size());
      if (n > 0) {
        sink.append(buffer.data(), static_cast<std::size_t>(n));
      } else if (n == 0 || errno != EAGAIN) {
        fd.reset();
      }
    }
  }

  int wait_status = 0;
  if (timed_out) ::kill(pid, SIGKILL);
  ::waitpid(pid, &wait_status, 0);
  const double wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - started).count();

  if (timed_out) {
    SolverResult r;
    r.status = SolverStatus::Timeout;
    r.raw_output = stdout_text;
    r.stats.wall_ms = wall_ms;
    r.message = "solver exceeded " + std::to_string(timeout_s) + " s";
    return r;
  }

  SolverResult r = parse_solver_output(stdout_text);
  r.stats.wall_ms = wall_ms;
  if (r.status == SolverStatus::SolverError) {
    if (WIFEXITED(wait_status) && WEXITSTATUS(wait_status) == 127) r.message = "solver command not found";
    if (!stderr_text.empty()) r.message += (r.message.empty() ? "" : ": ") + stderr_text;
  }
  return r;
}

}  // namespace tsn
