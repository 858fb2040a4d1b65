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


// Minimal stand-in for the text classification backend. It speaks the
// line-delimited JSON protocol on stdin/stdout without learning anything.
//
//   stub_backend [majority|echo|malformed|crash]
//
// majority   predicts the most frequent training label (default)
// echo       returns each input text as its label (order checks)
// malformed  answers every request with a line that is not JSON
// crash      exits with status 3 on the first request

#include <iostream>
#include <map>
#include <string>

#include "json.hpp"

using nlohmann::json;

int main(int argc, char** argv) {
  const std::string mode = argc > 1 ? argv[1] : "majority";
  std::string majority;
  std::string line;
  while (std::getline(std::cin, line)) {
    if (mode == "crash") return 3;
    if (mode == "malformed") {
      std::cout << "this is not json" << std::endl;
      continue;
    }
    json request;
    try {
      request = json::parse(line);
    } catch (const json::exception&) {
      std::cout << json{{"id", nullptr}, {"ok", false}, {"error", "invalid JSON"}}.dump()
                << std::endl;
      continue;
    }
    json response = {{"id", request.value("id", json(nullptr))}};
    const std::string cmd = request.value("cmd", "");
    const json payload = request.value("payload", json::object());
    if (cmd == "train") {
      if (payload.value("balance", "none") == "smote") {
        response["ok"] = false;
        response["error"] = "smote is not supported for text inputs";
      } else {
        std::map<std::string, int> counts;
        for (const json& l : payload.at("labels")) ++counts[l.get<std::string>()];
        int best = -1;
        for (const auto& [label, c] : counts) {
          if (c > best) {
            best = c;
            majority = label;
          }
        }
        response["ok"] = true;
        response["payload"] = {{"trained", payload.at("texts").size()}};
      }
    } else if (cmd == "predict") {
      json labels = json::array(), scores = json::array();
      for (const json& t : payload.at("texts")) {
        labels.push_back(mode == "echo" ? t.get<std::string>() : majority);
        scores.push_back(0.5);
      }
      response["ok"] = true;
      response["payload"] = {{"labels", labels}, {"scores", scores}};
    } else if (cmd == "shutdown") {
      response["ok"] = true;
      response["payload"] = json::object();
      std::cout << response.dump() << std::endl;
      return 0;
    } else {
      response["ok"] = false;
      response["error"] = "unknown cmd '" + cmd + "'";
    }
    std::cout << response.dump() << std::endl;
  }
  return 0;
}
