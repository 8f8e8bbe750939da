#pragma once

#include <filesystem>

#include "sketchnet/tensor.hpp"

namespace sketchnet {

/// Reads a binary PGM (P5) or PPM (P6) file into a 1xHxW or 3xHxW tensor
/// with values on the 0-255 scale. 16-bit files are rescaled to 0-255.
///
/// Throws FileNotFoundError, UnsupportedFormatError or CorruptDataError.
TensorF load_image(const std::filesystem::path& path);

/// Writes a 1-channel tensor as P5 or a 3-channel tensor as P6. Values are
/// clamped to [0, 255] and rounded half to even.
void save_image(const TensorF& image, const std::filesystem::path& path);

/// The clamp-and-round policy used by save_image.
unsigned char to_byte(float value) noexcept;

}  // namespace sketchnet
