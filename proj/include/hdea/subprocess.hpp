#pragma once

// POSIX child process with piped stdin/stdout/stderr and deadline-aware
// line reads. Used only by the external-evaluator session.

#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstring>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

#include "hdea/error.hpp"

namespace hdea {

class Subprocess {
public:
    explicit Subprocess(const std::vector<std::string>& argv) {
        if (argv.empty()) throw ParameterError("subprocess: empty command");
        // Writes to a dead child must surface as EPIPE, not SIGPIPE.
        ::signal(SIGPIPE, SIG_IGN);

        int in_pipe[2], out_pipe[2], err_pipe[2];
        if (::pipe(in_pipe) != 0 || ::pipe(out_pipe) != 0 || ::pipe(err_pipe) != 0)
            throw EvaluationError("subprocess: pipe() failed: " + errno_text());

        pid_ = ::fork();
        if (pid_ < 0) throw EvaluationError("subprocess: fork() failed: " + errno_text());
        if (pid_ == 0) {
            ::dup2(in_pipe[0], STDIN_FILENO);
            ::dup2(out_pipe[1], STDOUT_FILENO);
            ::dup2(err_pipe[1], STDERR_FILENO);
            for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1], err_pipe[0],
                           err_pipe[1]})
                ::close(fd);
            std::vector<char*> args;
            for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
            args.push_back(nullptr);
            ::execvp(args[0], args.data());
            ::_exit(127);
        }
        ::close(in_pipe[0]);
        ::close(out_pipe[1]);
        ::close(err_pipe[1]);
        stdin_fd_ = in_pipe[1];
        stdout_fd_ = out_pipe[0];
        stderr_fd_ = err_pipe[0];
        ::fcntl(stderr_fd_, F_SETFL, O_NONBLOCK);
    }

    Subprocess(const Subprocess&) = delete;
    Subprocess& operator=(const Subprocess&) = delete;

    ~Subprocess() {
        close_stdin();
        if (stdout_fd_ >= 0) ::close(stdout_fd_);
        if (stderr_fd_ >= 0) ::close(stderr_fd_);
        if (pid_ > 0) {
            // Give the child a brief window to exit on its own, then kill.
            for (int i = 0; i < 50; ++i) {
                if (::waitpid(pid_, nullptr, WNOHANG) != 0) {
                    pid_ = -1;
                    break;
                }
                ::usleep(10'000);
            }
            if (pid_ > 0) {
                ::kill(pid_, SIGKILL);
                ::waitpid(pid_, nullptr, 0);
            }
        }
    }

    void write_line(std::string_view line) {
        std::string payload(line);
        payload.push_back('\n');
        std::size_t off = 0;
        while (off < payload.size()) {
            const ssize_t n = ::write(stdin_fd_, payload.data() + off, payload.size() - off);
            if (n < 0) {
                if (errno == EINTR) continue;
                throw EvaluationError("subprocess: write failed (" + errno_text() +
                                      ")" + stderr_excerpt_suffix());
            }
            off += static_cast<std::size_t>(n);
        }
    }

    // Next line from the child's stdout, stripped of the trailing newline.
    // nullopt = clean EOF. Throws EvaluationError on deadline expiry.
    std::optional<std::string> read_line(std::chrono::milliseconds timeout) {
        const auto deadline = std::chrono::steady_clock::now() + timeout;
        for (;;) {
            const auto nl = buffer_.find('\n');
            if (nl != std::string::npos) {
                std::string line = buffer_.substr(0, nl);
                buffer_.erase(0, nl + 1);
                return line;
            }
            if (saw_eof_) {
                if (buffer_.empty()) return std::nullopt;
                std::string line = std::move(buffer_);
                buffer_.clear();
                return line;
            }
            const auto now = std::chrono::steady_clock::now();
            if (now >= deadline)
                throw EvaluationError("subprocess: timed out waiting for evaluator output" +
                                      stderr_excerpt_suffix());
            const auto wait_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                                     deadline - now)
                                     .count();
            struct pollfd pfd{stdout_fd_, POLLIN, 0};
            const int rc = ::poll(&pfd, 1, static_cast<int>(std::min<long long>(wait_ms, 60'000)));
            if (rc < 0) {
                if (errno == EINTR) continue;
                throw EvaluationError("subprocess: poll failed: " + errno_text());
            }
            if (rc == 0) continue; // re-check deadline
            char chunk[4096];
            const ssize_t n = ::read(stdout_fd_, chunk, sizeof(chunk));
            if (n < 0) {
                if (errno == EINTR) continue;
                throw EvaluationError("subprocess: read failed: " + errno_text());
            }
            if (n == 0)
                saw_eof_ = true;
            else
                buffer_.append(chunk, static_cast<std::size_t>(n));
        }
    }

    void close_stdin() {
        if (stdin_fd_ >= 0) {
            ::close(stdin_fd_);
            stdin_fd_ = -1;
        }
    }

    // Up to `limit` bytes currently available on the child's stderr.
    std::string drain_stderr(std::size_t limit = 4096) {
        std::string out;
        char chunk[512];
        while (out.size() < limit) {
            const ssize_t n = ::read(stderr_fd_, chunk, sizeof(chunk));
            if (n <= 0) break;
            out.append(chunk, static_cast<std::size_t>(n));
        }
        if (out.size() > limit) out.resize(limit);
        return out;
    }

private:
    static std::string errno_text() { return std::strerror(errno); }

    std::string stderr_excerpt_suffix() {
        const std::string err = drain_stderr();
        return err.empty() ? std::string{} : "; evaluator stderr: " + err;
    }

    pid_t pid_ = -1;
    int stdin_fd_ = -1;
    int stdout_fd_ = -1;
    int stderr_fd_ = -1;
    std::string buffer_;
    bool saw_eof_ = false;
};

} // namespace hdea
