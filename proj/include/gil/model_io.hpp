#pragma once

#include <string>

#include "gil/lstm.hpp"
#include "gil/mlp.hpp"

namespace gil {

// Versioned text checkpoints: a header line, then per-tensor shape lines
// followed by row-major values printed with full round-trip precision.
// Format details are documented in the README.
void save_mlp(const MlpModel& model, const std::string& path);
MlpModel load_mlp(const std::string& path);

void save_lstm(const LstmModel& model, const std::string& path);
LstmModel load_lstm(const std::string& path);

}  // namespace gil
