#pragma once

namespace krein {

inline constexpr const char* version = "0.1.0";

inline constexpr const char* problem_schema = "krein-problem/1";
inline constexpr const char* report_schema = "krein-report/1";

}  // namespace krein
