#include <fstream>

#include "pixelarena/render.hpp"

namespace pixelarena {

namespace {

void write_netpbm(const std::filesystem::path& path, const char* magic, int width, int height, int channels,
                  const std::vector<std::uint8_t>& data) {
    if (data.size() != static_cast<std::size_t>(width) * height * channels)
        throw ContractViolation("image size does not match " + std::to_string(width) + "x" + std::to_string(height));
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << magic << '\n' << width << ' ' << height << "\n255\n";
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace

void write_ppm(const std::filesystem::path& path, int width, int height, const std::vector<std::uint8_t>& rgb) {
    write_netpbm(path, "P6", width, height, 3, rgb);
}

void write_pgm(const std::filesystem::path& path, int width, int height, const std::vector<std::uint8_t>& gray) {
    write_netpbm(path, "P5", width, height, 1, gray);
}

void write_image(const std::filesystem::path& path, int width, int height, ScreenFormat format,
                 const std::vector<std::uint8_t>& pixels) {
    if (format == ScreenFormat::rgb24) write_ppm(path, width, height, pixels);
    else write_pgm(path, width, height, pixels);
}

}  // namespace pixelarena
