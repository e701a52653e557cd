// Copyright 2026 The NSC Authors
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

#include "nsc/log.h"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace nsc {
namespace {

LogLevel ParseLevel(const char* value) {
  if (value == nullptr || *value == '\0') return LogLevel::kInfo;
  if (std::strcmp(value, "error") == 0 || std::strcmp(value, "0") == 0)
    return LogLevel::kError;
  if (std::strcmp(value, "warn") == 0 || std::strcmp(value, "1") == 0)
    return LogLevel::kWarn;
  if (std::strcmp(value, "info") == 0 || std::strcmp(value, "2") == 0)
    return LogLevel::kInfo;
  if (std::strcmp(value, "debug") == 0 || std::strcmp(value, "3") == 0)
    return LogLevel::kDebug;
  return LogLevel::kInfo;
}

const char* LevelTag(LogLevel level) {
  switch (level) {
    case LogLevel::kError: return "E";
    case LogLevel::kWarn: return "W";
    case LogLevel::kInfo: return "I";
    case LogLevel::kDebug: return "D";
  }
  return "?";
}

}  // namespace

LogLevel GlobalLogLevel() {
  static LogLevel level = ParseLevel(std::getenv("NSC_LOG"));
  return level;
}

bool LogEnabled(LogLevel level) {
  return static_cast<int>(level) <= static_cast<int>(GlobalLogLevel());
}

void LogMessage(LogLevel level, const std::string& message) {
  std::fprintf(stderr, "[nsc %s] %s\n", LevelTag(level), message.c_str());
}

}  // namespace nsc
