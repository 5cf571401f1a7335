#pragma once

#include <string>

#include "fbrl/experiment.hpp"

namespace fbrl {

// Flat key-value experiment description: one `key = value` per line, '#'
// comments, blank lines ignored. environment, size and method are required;
// everything else overrides the published preset for that pair. Unknown keys
// are errors. See README for the key list.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

}  // namespace fbrl
