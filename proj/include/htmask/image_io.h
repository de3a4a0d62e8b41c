/* Copyright 2026 The HTMask Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#ifndef HTMASK_IMAGE_IO_H_
#define HTMASK_IMAGE_IO_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "htmask/raster.h"

namespace htmask {

// 8-bit gray or 8-bit-per-channel RGB(A) PNG, or binary PGM (P5, maxval
// 255). Colour images go through RgbToGray. The format is sniffed from the
// leading bytes, not the file extension.
GrayImage DecodeImage(std::string_view bytes);
GrayImage ReadImage(const std::string& path);

std::vector<std::uint8_t> EncodePng(const GrayImage& image);
std::vector<std::uint8_t> EncodePgm(const GrayImage& image);

std::string ReadFile(const std::string& path);
void WriteFile(const std::string& path, std::string_view bytes);

}  // namespace htmask

#endif  // HTMASK_IMAGE_IO_H_
