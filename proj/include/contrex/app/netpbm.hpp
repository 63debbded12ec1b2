#pragma once

#include <filesystem>
#include <span>
#include <string>

#include "contrex/raster.hpp"

namespace contrex::app {

/// Binary 8-bit PGM (P5). Values are clamped to [0,1] and scaled to 0..255;
/// with `max_normalize` they are first divided by their maximum (if positive).
std::string encode_pgm(Shape shape, std::span<const double> values, bool max_normalize);
void write_pgm(const std::filesystem::path& file, Shape shape, std::span<const double> values, bool max_normalize);

Image decode_pgm(const std::string& bytes);
Image read_pgm(const std::filesystem::path& file);

/// Binary 8-bit PPM (P6) from three [0,1] channels.
std::string encode_ppm(Shape shape, std::span<const double> red, std::span<const double> green,
                       std::span<const double> blue);
void write_ppm(const std::filesystem::path& file, Shape shape, std::span<const double> red,
               std::span<const double> green, std::span<const double> blue);

/// Grayscale image with the max-normalized saliency blended in as red.
void write_overlay(const std::filesystem::path& file, const Image& image, const SaliencyMap& saliency);

/// Writes through a temporary sibling and renames, so readers never see a
/// half-written file.
void write_file_atomic(const std::filesystem::path& file, const std::string& bytes);
std::string read_file(const std::filesystem::path& file);

}  // namespace contrex::app
