#pragma once

namespace apx {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kCertificateFormat = 1;

}  // namespace apx
