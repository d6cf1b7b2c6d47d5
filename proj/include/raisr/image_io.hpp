// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>

#include "raisr/image.hpp"

namespace raisr {

// 8-bit image files. The format is picked from the extension:
// .png, .pgm/.ppm/.pnm (binary P5/P6) and .jpg/.jpeg.
// Values are clamped to [0,255] and rounded on write.

Raster read_image(const std::filesystem::path& path);
void write_image(const std::filesystem::path& path, const Raster& raster);
void write_image(const std::filesystem::path& path, const ImagePlane& gray);

/// Writes a JPEG at the given quality (0..100); other formats ignore quality.
void write_jpeg(const std::filesystem::path& path, const Raster& raster, int quality);

bool is_image_file(const std::filesystem::path& path);

}  // namespace raisr
