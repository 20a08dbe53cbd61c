// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>

#include "groundseq/core.hpp"

namespace groundseq {

/// Reads an 8-bit RGB image from PNG or binary PPM (P6); the format is sniffed
/// from the file's magic bytes. The buffer's uri is set to the path.
ImageBuffer load_image(const std::filesystem::path& p);

void save_png(const std::filesystem::path& p, const ImageBuffer& img);
void save_ppm(const std::filesystem::path& p, const ImageBuffer& img);

}  // namespace groundseq
