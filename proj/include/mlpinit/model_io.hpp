#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "mlpinit/network.hpp"

namespace mlpinit {

// Binary layout, all integers and floats little-endian:
//   8 bytes  magic "MLPINIT\0"
//   u32      format version
//   u32      topology depth (1, 2 or 3)
//   u32      layer count
//   per layer: u32 rows, u32 cols, rows*cols f64 weights (row-major), rows f64 bias
inline constexpr std::string_view kModelMagic{"MLPINIT\0", 8};
inline constexpr std::uint32_t kModelFormatVersion = 1;

std::string serialize_model(const MlpModel& model);
MlpModel deserialize_model(std::string_view bytes);

void save_model(const MlpModel& model, const std::filesystem::path& path);
MlpModel load_model(const std::filesystem::path& path);

}  // namespace mlpinit
