#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lmpso::swarm {

/// Replaces every "{name}" in `tmpl` with its value. Unknown placeholders are
/// left as-is so templates can contain literal braces.
std::string fill_template(std::string_view tmpl,
                          const std::vector<std::pair<std::string_view, std::string>>& values);

/// Shortest decimal that reads back as the same double ("%.17g" would pad).
std::string format_number(double value);

/// Fixed-point with `digits` decimals, for prompt text.
std::string format_fixed(double value, int digits);

}  // namespace lmpso::swarm
