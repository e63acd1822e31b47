#pragma once

#include <string_view>

namespace gammaprime {

/// The bundled dietary summary dataset (label,or,ci_low,ci_high,ci_level).
std::string_view dietary_csv() noexcept;

}  // namespace gammaprime
