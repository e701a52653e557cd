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

#ifndef NSC_LOG_H_
#define NSC_LOG_H_

#include <sstream>
#include <string>

namespace nsc {

enum class LogLevel { kError = 0, kWarn = 1, kInfo = 2, kDebug = 3 };

// Verbosity comes from the NSC_LOG environment variable
// (error|warn|info|debug or 0-3); default is info.
LogLevel GlobalLogLevel();
bool LogEnabled(LogLevel level);
void LogMessage(LogLevel level, const std::string& message);

}  // namespace nsc

#define NSC_LOG(level, expr)                     \
  do {                                           \
    if (nsc::LogEnabled(level)) {                \
      std::ostringstream nsc_log_os;             \
      nsc_log_os << expr;                        \
      nsc::LogMessage(level, nsc_log_os.str());  \
    }                                            \
  } while (0)

#define NSC_LOG_ERROR(expr) NSC_LOG(nsc::LogLevel::kError, expr)
#define NSC_LOG_WARN(expr) NSC_LOG(nsc::LogLevel::kWarn, expr)
#define NSC_LOG_INFO(expr) NSC_LOG(nsc::LogLevel::kInfo, expr)
#define NSC_LOG_DEBUG(expr) NSC_LOG(nsc::LogLevel::kDebug, expr)

#endif  // NSC_LOG_H_
