// File formats and the stratified train/test split.
//
//   image:   <name>.hdr     text header, key=value lines
//            <name>.bin     float32 little-endian, band-sequential, row-major
//   samples: UTF-8 CSV, header band_1,...,band_N,label
//   map:     <name>.map.bin     uint16 little-endian, row-major
//            <name>.legend.csv  header class_id,class_name
//
// This code assumes a little-endian host, which both the build and the
// formats target.
#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "enfs/image.hpp"
#include "enfs/util.hpp"

namespace enfs {

namespace detail {

inline std::string replace_extension(const std::string& path, const std::string& old_ext,
                                     const std::string& new_ext) {
    if (path.size() < old_ext.size() ||
        path.compare(path.size() - old_ext.size(), old_ext.size(), old_ext) != 0)
        throw data_error("expected a path ending in '" + old_ext + "': " + path);
    return path.substr(0, path.size() - old_ext.size()) + new_ext;
}

inline std::vector<char> read_binary_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw data_error("cannot open file: " + path);
    const auto size = static_cast<std::size_t>(in.tellg());
    std::vector<char> buf(size);
    in.seekg(0);
    in.read(buf.data(), static_cast<std::streamsize>(size));
    if (!in) throw data_error("read failed: " + path);
    return buf;
}

inline void write_binary_file(const std::string& path, const char* data, std::size_t size) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot create file: " + path);
    out.write(data, static_cast<std::streamsize>(size));
    if (!out) throw data_error("write failed: " + path);
}

}  // namespace detail

// ---------------------------------------------------------------- images

inline void save_image(const MultibandImage& img, const std::string& stem) {
    img.validate();
    std::string hdr;
    hdr += "width=" + std::to_string(img.width) + "\n";
    hdr += "height=" + std::to_string(img.height) + "\n";
    hdr += "bands=" + std::to_string(img.bands) + "\n";
    hdr += "dtype=float32\n";
    hdr += "interleave=bsq\n";
    hdr += "byteorder=little\n";
    write_text_file(stem + ".hdr", hdr);
    detail::write_binary_file(stem + ".bin",
                              reinterpret_cast<const char*>(img.data.data()),
                              img.data.size() * sizeof(float));
}

inline MultibandImage load_image(const std::string& header_path) {
    std::map<std::string, std::string> kv;
    for (const auto& raw : split(read_text_file(header_path), '\n')) {
        const auto line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw data_error("malformed header line '" + std::string(line) + "' in " + header_path);
        kv[std::string(trim(line.substr(0, eq)))] = std::string(trim(line.substr(eq + 1)));
    }
    const auto need = [&](const std::string& key) {
        const auto it = kv.find(key);
        if (it == kv.end()) throw data_error("header key '" + key + "' missing in " + header_path);
        return it->second;
    };
    MultibandImage img;
    img.width = static_cast<int>(parse_long(need("width"), header_path));
    img.height = static_cast<int>(parse_long(need("height"), header_path));
    img.bands = static_cast<int>(parse_long(need("bands"), header_path));
    if (need("dtype") != "float32") throw data_error("unsupported dtype in " + header_path);
    if (need("interleave") != "bsq") throw data_error("unsupported interleave in " + header_path);
    if (need("byteorder") != "little") throw data_error("unsupported byteorder in " + header_path);
    if (img.width <= 0 || img.height <= 0 || img.bands <= 0)
        throw data_error("non-positive dimensions in " + header_path);

    const auto bin_path = detail::replace_extension(header_path, ".hdr", ".bin");
    const auto payload = detail::read_binary_file(bin_path);
    const std::size_t expected =
        img.pixel_count() * static_cast<std::size_t>(img.bands) * sizeof(float);
    if (payload.size() != expected)
        throw data_error("payload size mismatch for " + bin_path + ": expected " +
                         std::to_string(expected) + " bytes, found " +
                         std::to_string(payload.size()));
    img.data.resize(payload.size() / sizeof(float));
    std::memcpy(img.data.data(), payload.data(), payload.size());
    img.validate();
    return img;
}

// ---------------------------------------------------------------- samples

inline void save_samples(const SampleSet& s, const ClassLegend& legend, const std::string& csv_path) {
    s.validate(legend);
    std::string out;
    for (int b = 1; b <= s.n_bands; ++b) out += "band_" + std::to_string(b) + ",";
    out += "label\n";
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double* row = s.row(i);
        for (int b = 0; b < s.n_bands; ++b) {
            out += format_double(row[b]);
            out += ',';
        }
        out += legend.name(s.labels[i]);
        out += '\n';
    }
    write_text_file(csv_path, out);
}

inline std::pair<SampleSet, ClassLegend> load_samples(const std::string& csv_path) {
    const auto text = read_text_file(csv_path);
    auto lines = split(text, '\n');
    while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
    if (lines.size() < 2) throw data_error("samples file has no data rows: " + csv_path);

    const auto header = split(lines[0], ',');
    const int n_bands = static_cast<int>(header.size()) - 1;
    if (n_bands < 1 || trim(header.back()) != "label")
        throw data_error("samples header must be band_1,...,band_N,label in " + csv_path);
    for (int b = 0; b < n_bands; ++b)
        if (trim(header[b]) != "band_" + std::to_string(b + 1))
            throw data_error("unexpected column '" + header[b] + "' in " + csv_path);

    std::vector<std::vector<double>> rows;
    std::vector<std::string> row_labels;
    std::set<std::string> label_set;
    for (std::size_t ln = 1; ln < lines.size(); ++ln) {
        const auto cells = split(lines[ln], ',');
        if (cells.size() != header.size())
            throw data_error("row " + std::to_string(ln + 1) + " has " +
                             std::to_string(cells.size()) + " cells, expected " +
                             std::to_string(header.size()) + " in " + csv_path);
        std::vector<double> feats(static_cast<std::size_t>(n_bands));
        for (int b = 0; b < n_bands; ++b)
            feats[b] = parse_double(trim(cells[b]), csv_path + " row " + std::to_string(ln + 1));
        const std::string label(trim(cells.back()));
        if (label.empty())
            throw data_error("empty label on row " + std::to_string(ln + 1) + " in " + csv_path);
        rows.push_back(std::move(feats));
        row_labels.push_back(label);
        label_set.insert(label);
    }

    const auto legend = ClassLegend::from_labels(label_set);
    SampleSet s;
    s.n_bands = n_bands;
    s.features.reserve(rows.size() * static_cast<std::size_t>(n_bands));
    s.labels.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        s.features.insert(s.features.end(), rows[i].begin(), rows[i].end());
        s.labels.push_back(static_cast<std::uint16_t>(legend.id_of(row_labels[i])));
    }
    s.validate(legend);
    return {std::move(s), legend};
}

// ------------------------------------------------------------------- maps

inline void save_classification_map(const ClassificationMap& m, const std::string& stem) {
    m.validate();
    detail::write_binary_file(stem + ".map.bin",
                              reinterpret_cast<const char*>(m.labels.data()),
                              m.labels.size() * sizeof(std::uint16_t));
    std::string legend_csv = "class_id,class_name\n";
    for (int c = 0; c < m.legend.size(); ++c)
        legend_csv += std::to_string(c) + "," + m.legend.name(c) + "\n";
    write_text_file(stem + ".legend.csv", legend_csv);
}

inline ClassLegend load_legend_csv(const std::string& path) {
    auto lines = split(read_text_file(path), '\n');
    while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
    if (lines.empty() || trim(lines[0]) != "class_id,class_name")
        throw data_error("legend file must start with class_id,class_name: " + path);
    std::vector<std::string> names;
    for (std::size_t ln = 1; ln < lines.size(); ++ln) {
        const auto cells = split(lines[ln], ',');
        if (cells.size() != 2) throw data_error("malformed legend row in " + path);
        if (parse_long(trim(cells[0]), path) != static_cast<long>(ln - 1))
            throw data_error("legend ids must be 0..K-1 in order in " + path);
        names.emplace_back(trim(cells[1]));
    }
    return ClassLegend(std::move(names));
}

// Loads <stem>.map.bin + <stem>.legend.csv. Grid dimensions are taken from
// the caller because the raster itself is a bare label stream.
inline ClassificationMap load_classification_map(const std::string& stem, int width, int height) {
    ClassificationMap m;
    m.width = width;
    m.height = height;
    m.legend = load_legend_csv(stem + ".legend.csv");
    const auto payload = detail::read_binary_file(stem + ".map.bin");
    if (payload.size() != m.pixel_count() * sizeof(std::uint16_t))
        throw data_error("map payload size mismatch for " + stem + ".map.bin");
    m.labels.resize(m.pixel_count());
    std::memcpy(m.labels.data(), payload.data(), payload.size());
    m.validate();
    return m;
}

// ------------------------------------------------------------------ split

// Stratified split. Per class: train_n = round(fraction * n_c) clamped to
// [1, n_c - 1], membership chosen by a seeded shuffle of that class's rows.
// Union of the halves is the input, intersection is empty.
inline std::pair<SampleSet, SampleSet> split_samples(const SampleSet& s, const ClassLegend& legend,
                                                     double train_fraction, std::uint64_t seed) {
    s.validate(legend);
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw config_error("train fraction must lie in (0,1)");
    const auto counts = s.class_counts(legend);
    for (int c = 0; c < legend.size(); ++c)
        if (counts[c] < 2)
            throw data_error("class '" + legend.name(c) + "' has " +
                             std::to_string(counts[c]) + " samples; need at least 2 to split");

    std::vector<std::vector<std::uint32_t>> by_class(static_cast<std::size_t>(legend.size()));
    for (std::size_t i = 0; i < s.size(); ++i)
        by_class[s.labels[i]].push_back(static_cast<std::uint32_t>(i));

    Rng rng(seed);
    std::vector<bool> in_train(s.size(), false);
    for (int c = 0; c < legend.size(); ++c) {
        auto& rows = by_class[c];
        rng.shuffle(rows);
        const auto n_c = rows.size();
        auto train_n = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n_c)));
        train_n = std::clamp<std::size_t>(train_n, 1, n_c - 1);
        for (std::size_t i = 0; i < train_n; ++i) in_train[rows[i]] = true;
    }

    SampleSet train, test;
    train.n_bands = test.n_bands = s.n_bands;
    const bool keep_pixels = s.has_pixels();
    for (std::size_t i = 0; i < s.size(); ++i) {
        SampleSet& dst = in_train[i] ? train : test;
        const double* row = s.row(i);
        dst.features.insert(dst.features.end(), row, row + s.n_bands);
        dst.labels.push_back(s.labels[i]);
        if (keep_pixels) dst.pixels.push_back(s.pixels[i]);
    }
    return {std::move(train), std::move(test)};
}

}  // namespace enfs
