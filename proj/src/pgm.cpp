#include "segnoise/pgm.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace segnoise {

namespace {

struct PgmHeader {
    int width = 0;
    int height = 0;
    int maxval = 0;
};

int read_header_token(std::istream &in, std::filesystem::path const &path) {
    // Skip whitespace and '#' comment lines per the PNM spec.
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') {
                c = in.get();
            }
        } else if (!std::isspace(c)) {
            break;
        }
        c = in.get();
    }
    if (c == EOF || !std::isdigit(c)) {
        throw std::runtime_error("malformed PGM header: " + path.string());
    }
    int value = 0;
    while (c != EOF && std::isdigit(c)) {
        value = value * 10 + (c - '0');
        c = in.get();
    }
    return value;
}

PgmHeader read_pgm_header(std::istream &in, std::filesystem::path const &path) {
    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (!in || magic[0] != 'P' || magic[1] != '5') {
        throw std::runtime_error("not a binary PGM (P5) file: " + path.string());
    }
    PgmHeader h;
    h.width = read_header_token(in, path);
    h.height = read_header_token(in, path);
    h.maxval = read_header_token(in, path);
    if (h.width <= 0 || h.height <= 0 || h.maxval <= 0 || h.maxval > 65535) {
        throw std::runtime_error("invalid PGM dimensions in " + path.string());
    }
    return h;
}

std::vector<std::uint8_t> read_raster8(std::istream &in, PgmHeader const &h,
                                       std::filesystem::path const &path) {
    if (h.maxval > 255) {
        throw std::runtime_error("expected 8-bit PGM: " + path.string());
    }
    std::vector<std::uint8_t> raster(static_cast<std::size_t>(h.width) * h.height);
    in.read(reinterpret_cast<char *>(raster.data()), static_cast<std::streamsize>(raster.size()));
    if (!in) {
        throw std::runtime_error("truncated PGM raster in " + path.string());
    }
    return raster;
}

std::ofstream open_out(std::filesystem::path const &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write file: " + path.string());
    }
    return out;
}

std::ifstream open_in(std::filesystem::path const &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read file: " + path.string());
    }
    return in;
}

std::string sample_stem(int index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "sample_%04d", index);
    return buf;
}

} // namespace

Mask read_mask_pgm(std::filesystem::path const &path) {
    auto in = open_in(path);
    PgmHeader const h = read_pgm_header(in, path);
    auto raster = read_raster8(in, h, path);
    std::vector<std::uint8_t> values(raster.size());
    std::transform(raster.begin(), raster.end(), values.begin(),
                   [](std::uint8_t v) { return v >= 128 ? 1 : 0; });
    return Mask::from_values(h.width, h.height, std::move(values));
}

void write_mask_pgm(std::filesystem::path const &path, Mask const &mask) {
    auto out = open_out(path);
    out << "P5\n" << mask.width() << ' ' << mask.height() << "\n255\n";
    for (auto v : mask.values()) {
        out.put(v ? static_cast<char>(255) : 0);
    }
    if (!out) {
        throw std::runtime_error("failed writing PGM: " + path.string());
    }
}

void write_frequency_pgm(std::filesystem::path const &path, std::vector<double> const &values,
                         int width, int height) {
    if (values.size() != static_cast<std::size_t>(width) * height) {
        throw std::invalid_argument("frequency map size does not match dimensions");
    }
    auto out = open_out(path);
    out << "P5\n" << width << ' ' << height << "\n65535\n";
    for (double v : values) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw std::invalid_argument("frequency values must lie in [0, 1]");
        }
        auto const q = static_cast<std::uint16_t>(std::lround(v * 65535.0));
        out.put(static_cast<char>(q >> 8));
        out.put(static_cast<char>(q & 0xff));
    }
    if (!out) {
        throw std::runtime_error("failed writing PGM: " + path.string());
    }
}

GreyImage read_grey_pgm(std::filesystem::path const &path) {
    auto in = open_in(path);
    PgmHeader const h = read_pgm_header(in, path);
    GreyImage img;
    img.width = h.width;
    img.height = h.height;
    img.values = read_raster8(in, h, path);
    return img;
}

void write_grey_pgm(std::filesystem::path const &path, GreyImage const &image) {
    if (image.values.size() != static_cast<std::size_t>(image.width) * image.height) {
        throw std::invalid_argument("grey image size does not match dimensions");
    }
    auto out = open_out(path);
    out << "P5\n" << image.width << ' ' << image.height << "\n255\n";
    out.write(reinterpret_cast<char const *>(image.values.data()),
              static_cast<std::streamsize>(image.values.size()));
    if (!out) {
        throw std::runtime_error("failed writing PGM: " + path.string());
    }
}

void write_dataset(std::filesystem::path const &dir, std::vector<Sample> const &samples,
                   DatasetCodec const &codec) {
    std::filesystem::create_directories(dir);
    nlohmann::json manifest;
    manifest["intensity_offset"] = codec.intensity_offset;
    manifest["intensity_scale"] = codec.intensity_scale;
    nlohmann::json entries = nlohmann::json::array();
    for (std::size_t i = 0; i < samples.size(); ++i) {
        Sample const &s = samples[i];
        std::string const stem = sample_stem(static_cast<int>(i));
        nlohmann::json entry;
        entry["id"] = s.id;
        entry["healthy"] = area(s.mask) == 0;
        entry["mask"] = stem + "_mask.pgm";
        write_mask_pgm(dir / (stem + "_mask.pgm"), s.mask);
        nlohmann::json channels = nlohmann::json::array();
        for (int c = 0; c < s.image.channels(); ++c) {
            std::string const name = stem + "_c" + std::to_string(c) + ".pgm";
            GreyImage grey;
            grey.width = s.image.width();
            grey.height = s.image.height();
            grey.values.resize(static_cast<std::size_t>(grey.width) * grey.height);
            for (int y = 0; y < grey.height; ++y) {
                for (int x = 0; x < grey.width; ++x) {
                    double const v =
                        codec.intensity_offset + codec.intensity_scale * s.image.at(c, x, y);
                    grey.values[static_cast<std::size_t>(y) * grey.width + x] =
                        static_cast<std::uint8_t>(std::clamp<long>(std::lround(v), 0, 255));
                }
            }
            write_grey_pgm(dir / name, grey);
            channels.push_back(name);
        }
        entry["channels"] = channels;
        entries.push_back(entry);
    }
    manifest["samples"] = entries;
    auto out = open_out(dir / "manifest.json");
    out << manifest.dump(2) << '\n';
}

std::vector<Sample> read_dataset(std::filesystem::path const &dir) {
    auto in = open_in(dir / "manifest.json");
    nlohmann::json manifest;
    in >> manifest;
    DatasetCodec codec;
    codec.intensity_offset = manifest.value("intensity_offset", codec.intensity_offset);
    codec.intensity_scale = manifest.value("intensity_scale", codec.intensity_scale);
    if (codec.intensity_scale == 0.0) {
        throw std::runtime_error("manifest intensity_scale must be nonzero");
    }
    std::vector<Sample> samples;
    for (auto const &entry : manifest.at("samples")) {
        Sample s;
        s.id = entry.at("id").get<int>();
        s.mask = read_mask_pgm(dir / entry.at("mask").get<std::string>());
        auto const &channels = entry.at("channels");
        if (channels.empty()) {
            throw std::runtime_error("sample with no channels in " + dir.string());
        }
        s.image = MultiChannelImage(s.mask.width(), s.mask.height(),
                                    static_cast<int>(channels.size()));
        for (int c = 0; c < s.image.channels(); ++c) {
            GreyImage const grey = read_grey_pgm(dir / channels[c].get<std::string>());
            if (grey.width != s.mask.width() || grey.height != s.mask.height()) {
                throw std::runtime_error("channel dimensions differ from mask in " +
                                         dir.string());
            }
            for (int y = 0; y < grey.height; ++y) {
                for (int x = 0; x < grey.width; ++x) {
                    double const raw = grey.values[static_cast<std::size_t>(y) * grey.width + x];
                    s.image.set(c, x, y, (raw - codec.intensity_offset) / codec.intensity_scale);
                }
            }
        }
        samples.push_back(std::move(s));
    }
    if (samples.empty()) {
        throw std::runtime_error("dataset manifest lists no samples: " + dir.string());
    }
    return samples;
}

} // namespace segnoise
