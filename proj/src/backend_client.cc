//
// Copyright 2026 The Civility Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//


#include "civility/backend_client.h"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include <spdlog/spdlog.h>

#include "civility/errors.h"

namespace civility {
namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

void CloseQuietly(int fd) {
  if (fd >= 0) ::close(fd);
}

}  // namespace

std::unique_ptr<BackendClient> BackendClient::Launch(const std::string& command,
                                                     std::chrono::milliseconds timeout) {
  // A dead child must surface as an error from write(), not kill us.
  ::signal(SIGPIPE, SIG_IGN);
  int in_pipe[2], out_pipe[2];
  if (::pipe2(in_pipe, O_CLOEXEC) != 0) throw BackendError("pipe failed");
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
    CloseQuietly(in_pipe[0]);
    CloseQuietly(in_pipe[1]);
    throw BackendError("pipe failed");
  }
  pid_t pid = ::fork();
  if (pid < 0) throw BackendError(std::string("fork failed: ") + std::strerror(errno));
  if (pid == 0) {
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  CloseQuietly(in_pipe[0]);
  CloseQuietly(out_pipe[1]);
  spdlog::info("started backend '{}' (pid {})", command, pid);
  return std::unique_ptr<BackendClient>(
      new BackendClient(command, pid, in_pipe[1], out_pipe[0], timeout));
}

BackendClient::BackendClient(std::string command, int pid, int to_child, int from_child,
                             std::chrono::milliseconds timeout)
    : command_(std::move(command)), pid_(pid), to_child_(to_child), from_child_(from_child),
      timeout_(timeout) {}

BackendClient::~BackendClient() {
  try {
    Shutdown();
  } catch (const std::exception& e) {
    spdlog::warn("backend shutdown: {}", e.what());
  }
}

void BackendClient::WriteLine(const std::string& line) {
  std::string data = line + "\n";
  std::size_t written = 0;
  while (written < data.size()) {
    ssize_t n = ::write(to_child_, data.data() + written, data.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw BackendError("backend '" + command_ + "' closed its input: " + ExitDescription());
    }
    written += static_cast<std::size_t>(n);
  }
}

std::string BackendClient::ReadLine() {
  const auto deadline = Clock::now() + timeout_;
  for (;;) {
    if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return line;
    }
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
    if (left.count() <= 0) {
      // A late answer would desynchronize the stream, so the process goes.
      ::kill(pid_, SIGKILL);
      ::waitpid(pid_, nullptr, 0);
      running_ = false;
      throw BackendError("backend '" + command_ + "' timed out after " +
                         std::to_string(timeout_.count()) + " ms");
    }
    pollfd pfd{from_child_, POLLIN, 0};
    int ready = ::poll(&pfd, 1, static_cast<int>(std::min<int64_t>(left.count(), 1 << 30)));
    if (ready < 0) {
      if (errno == EINTR) continue;
      throw BackendError(std::string("poll failed: ") + std::strerror(errno));
    }
    if (ready == 0) continue;
    char chunk[65536];
    ssize_t n = ::read(from_child_, chunk, sizeof chunk);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw BackendError(std::string("read failed: ") + std::strerror(errno));
    }
    if (n == 0) {
      throw BackendError("backend '" + command_ + "' closed its output: " + ExitDescription());
    }
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

std::string BackendClient::ExitDescription() {
  if (!running_) return "process already stopped";
  int status = 0;
  // Give a crashing child a moment to finish exiting.
  for (int i = 0; i < 50; ++i) {
    pid_t r = ::waitpid(pid_, &status, WNOHANG);
    if (r == pid_) {
      running_ = false;
      if (WIFEXITED(status)) return "exited with status " + std::to_string(WEXITSTATUS(status));
      if (WIFSIGNALED(status)) return "killed by signal " + std::to_string(WTERMSIG(status));
      return "stopped";
    }
    ::usleep(10'000);
  }
  return "process still running";
}

json BackendClient::Request(std::string_view cmd, const json& payload) {
  if (!running_) throw BackendError("backend '" + command_ + "' is not running");
  const int64_t id = next_id_++;
  WriteLine(json{{"id", id}, {"cmd", cmd}, {"payload", payload}}.dump());
  std::string line = ReadLine();
  json response;
  try {
    response = json::parse(line);
  } catch (const json::exception&) {
    throw ProtocolError("backend response is not JSON", line);
  }
  if (!response.is_object() || !response.contains("id") || !response.contains("ok") ||
      !response.at("ok").is_boolean()) {
    throw ProtocolError("backend response lacks 'id' or boolean 'ok'", line);
  }
  if (!response.at("id").is_number_integer() || response.at("id").get<int64_t>() != id) {
    throw ProtocolError("backend response id does not match request " + std::to_string(id), line);
  }
  if (!response.at("ok").get<bool>()) {
    auto err = response.find("error");
    throw BackendError("backend rejected '" + std::string(cmd) + "': " +
                       (err != response.end() && err->is_string() ? err->get<std::string>()
                                                                  : line));
  }
  auto it = response.find("payload");
  if (it == response.end()) return json::object();
  return *it;
}

void BackendClient::Train(const BackendTrainRequest& request) {
  if (request.balance == BalanceKind::kSmote) {
    throw ContractError("SMOTE cannot be combined with the text backend");
  }
  if (request.texts.size() != request.labels.size()) {
    throw ContractError("backend train texts and labels differ in count");
  }
  Request("train", {{"texts", request.texts},
                    {"labels", request.labels},
                    {"balance", ToString(request.balance)},
                    {"trials", request.trials},
                    {"split", request.split}});
}

BackendPrediction BackendClient::Predict(const std::vector<std::string>& texts) {
  json payload = Request("predict", {{"texts", texts}});
  const std::string raw = payload.dump();
  if (!payload.is_object()) throw ProtocolError("predict payload must be an object", raw);
  auto labels = payload.find("labels");
  auto scores = payload.find("scores");
  if (labels == payload.end() || !labels->is_array() || labels->size() != texts.size()) {
    throw ProtocolError("predict response needs one label per text", raw);
  }
  BackendPrediction out;
  for (const json& l : *labels) {
    if (!l.is_string()) throw ProtocolError("predicted labels must be strings", raw);
    out.labels.push_back(l.get<std::string>());
  }
  if (scores != payload.end() && !scores->is_null()) {
    if (!scores->is_array() || scores->size() != texts.size()) {
      throw ProtocolError("predict response needs one score per text", raw);
    }
    for (const json& s : *scores) {
      if (!s.is_number()) throw ProtocolError("scores must be numbers", raw);
      out.scores.push_back(s.get<double>());
    }
  }
  return out;
}

void BackendClient::Shutdown() {
  if (!running_) {
    CloseQuietly(to_child_);
    CloseQuietly(from_child_);
    to_child_ = from_child_ = -1;
    return;
  }
  try {
    WriteLine(json{{"id", next_id_++}, {"cmd", "shutdown"}, {"payload", json::object()}}.dump());
  } catch (const BackendError&) {
    // Already gone; reaped below.
  }
  CloseQuietly(to_child_);
  to_child_ = -1;
  int status = 0;
  const auto deadline = Clock::now() + std::chrono::seconds(10);
  while (::waitpid(pid_, &status, WNOHANG) == 0) {
    if (Clock::now() > deadline) {
      ::kill(pid_, SIGKILL);
      ::waitpid(pid_, &status, 0);
      break;
    }
    ::usleep(10'000);
  }
  CloseQuietly(from_child_);
  from_child_ = -1;
  running_ = false;
}

}  // namespace civility
