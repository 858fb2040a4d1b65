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


// Client for an external classifier process speaking newline-delimited JSON
// over its standard input and output. Requests are
//   {"id": <int>, "cmd": "train" | "predict" | "shutdown", "payload": {...}}
// and every request is answered by exactly one line
//   {"id": <same>, "ok": true, "payload": {...}} or {"id", "ok": false, "error"}.

#ifndef CIVILITY_BACKEND_CLIENT_H_
#define CIVILITY_BACKEND_CLIENT_H_

#include <chrono>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "civility/balance.h"
#include "json.hpp"

namespace civility {

struct BackendTrainRequest {
  std::vector<std::string> texts;
  std::vector<std::string> labels;
  BalanceKind balance = BalanceKind::kNone;
  int trials = 50;
  std::vector<double> split = {0.70, 0.15, 0.15};
};

struct BackendPrediction {
  std::vector<std::string> labels;
  std::vector<double> scores;
};

class BackendClient {
 public:
  // Starts `command` through /bin/sh. Every request must be answered within
  // `timeout`.
  static std::unique_ptr<BackendClient> Launch(
      const std::string& command,
      std::chrono::milliseconds timeout = std::chrono::hours(6));

  ~BackendClient();
  BackendClient(const BackendClient&) = delete;
  BackendClient& operator=(const BackendClient&) = delete;

  // Sends one request and returns the response payload. Throws BackendError
  // for ok=false, timeouts and process exit, ProtocolError for lines that do
  // not follow the protocol.
  nlohmann::json Request(std::string_view cmd, const nlohmann::json& payload);

  // SMOTE needs numeric feature vectors and is refused with ContractError.
  void Train(const BackendTrainRequest& request);
  BackendPrediction Predict(const std::vector<std::string>& texts);

  // Asks the process to exit and reaps it. Safe to call twice.
  void Shutdown();

  const std::string& command() const { return command_; }

 private:
  BackendClient(std::string command, int pid, int to_child, int from_child,
                std::chrono::milliseconds timeout);

  void WriteLine(const std::string& line);
  std::string ReadLine();
  std::string ExitDescription();

  std::string command_;
  int pid_;
  int to_child_;
  int from_child_;
  std::chrono::milliseconds timeout_;
  std::string buffer_;
  int64_t next_id_ = 1;
  bool running_ = true;
};

}  // namespace civility

#endif  // CIVILITY_BACKEND_CLIENT_H_
