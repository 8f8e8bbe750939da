#pragma once

#include <cstdint>
#include <filesystem>

#include "sketchnet/network.hpp"

namespace sketchnet {

/// Model container, all integers unsigned little-endian:
///
///   offset  size  field
///   0       4     magic "SKNM"
///   4       4     format version (kModelFormatVersion)
///   8       4     scalar width in bytes (4 = float32, 8 = float64)
///   12      4     input channels
///   16      4     layer count L
///   20      12*L  per layer: kernel size, output channels, activation (0 relu, 1 none)
///   ...           per layer: weights (K*C*k*k scalars, (k,c,u,v) order) then bias (K scalars),
///                 IEEE-754 little-endian
///   end-8   8     FNV-1a 64 hash of every preceding byte
inline constexpr std::uint32_t kModelFormatVersion = 1;

template <typename T>
void save_model(const Network<T>& net, const std::filesystem::path& path);

/// Reads any scalar width and converts to T. Throws FileNotFoundError,
/// VersionError or CorruptDataError.
template <typename T>
Network<T> load_model(const std::filesystem::path& path);

}  // namespace sketchnet
