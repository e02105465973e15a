#ifndef SCANLAW_VERSION_HPP
#define SCANLAW_VERSION_HPP

namespace scanlaw {
inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kReportSchemaVersion = 1;
}  // namespace scanlaw

#endif  // SCANLAW_VERSION_HPP
