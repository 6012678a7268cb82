// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "fluidmimo/scenario.hpp"

namespace fluidmimo {

// Plain key-value configuration: one `key = value` per line, `#` starts a
// comment. Dotted keys group by subsystem (system.*, channel.*, regions.*),
// plus `weights` as a space- or comma-separated list. Unknown keys and
// malformed values are errors. The result starts from SystemConfig defaults.
SystemConfig parse_config_text(const std::string& text);
SystemConfig parse_config_file(const std::string& path);

AntennaMode parse_mode(const std::string& word);
const char* mode_name(AntennaMode mode);

}  // namespace fluidmimo
