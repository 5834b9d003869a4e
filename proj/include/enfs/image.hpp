// Core value types: multiband rasters, class legends, labeled sample sets
// and classification maps. All types are immutable in spirit; construct,
// validate, then share freely.
#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "enfs/util.hpp"

namespace enfs {

// Ordered class table. Ids are 0..K-1 assigned by lexicographic class-name
// order, so the same label set always yields the same ids.
class ClassLegend {
public:
    ClassLegend() = default;

    explicit ClassLegend(std::vector<std::string> sorted_names) : names_(std::move(sorted_names)) {
        for (std::size_t i = 0; i + 1 < names_.size(); ++i)
            if (!(names_[i] < names_[i + 1]))
                throw data_error("legend names must be unique and sorted: '" + names_[i] +
                                 "' vs '" + names_[i + 1] + "'");
        for (const auto& n : names_)
            if (n.empty()) throw data_error("legend contains an empty class name");
    }

    static ClassLegend from_labels(const std::set<std::string>& labels) {
        return ClassLegend(std::vector<std::string>(labels.begin(), labels.end()));
    }

    int size() const { return static_cast<int>(names_.size()); }

    const std::string& name(int class_id) const {
        if (class_id < 0 || class_id >= size())
            throw data_error("class id " + std::to_string(class_id) + " outside legend");
        return names_[static_cast<std::size_t>(class_id)];
    }

    int id_of(const std::string& name) const {
        const auto it = std::lower_bound(names_.begin(), names_.end(), name);
        if (it == names_.end() || *it != name) throw data_error("unknown class name: " + name);
        return static_cast<int>(it - names_.begin());
    }

    const std::vector<std::string>& names() const { return names_; }

    bool operator==(const ClassLegend& other) const { return names_ == other.names_; }
    bool operator!=(const ClassLegend& other) const { return !(*this == other); }

private:
    std::vector<std::string> names_;
};

// Real-valued raster, band-sequential storage (all of band 0, then band 1,
// ...), row-major within each band. float32 payload to match the on-disk
// format exactly.
struct MultibandImage {
    int width = 0;
    int height = 0;
    int bands = 0;
    std::vector<float> data;

    std::size_t pixel_count() const {
        return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    }

    float at(int band, int row, int col) const {
        return data[(static_cast<std::size_t>(band) * height + row) * width + col];
    }

    float& at(int band, int row, int col) {
        return data[(static_cast<std::size_t>(band) * height + row) * width + col];
    }

    // pixel index is row-major: row * width + col
    float at_pixel(int band, std::size_t pixel) const {
        return data[static_cast<std::size_t>(band) * pixel_count() + pixel];
    }

    void validate() const {
        if (width <= 0 || height <= 0 || bands <= 0)
            throw data_error("image dimensions must be positive");
        if (data.size() != pixel_count() * static_cast<std::size_t>(bands))
            throw data_error("image data length does not match width*height*bands");
        for (const float v : data)
            if (!std::isfinite(v)) throw data_error("image contains non-finite values");
    }
};

// Labeled feature vectors. Features are stored row-major (sample-by-sample).
// `pixels`, when non-empty, records the source pixel of every sample so that
// sample-level results can be cross-checked against classified maps.
struct SampleSet {
    int n_bands = 0;
    std::vector<double> features;       // size() * n_bands
    std::vector<std::uint16_t> labels;  // size()
    std::vector<std::uint32_t> pixels;  // empty, or size()

    std::size_t size() const { return labels.size(); }

    const double* row(std::size_t i) const { return features.data() + i * static_cast<std::size_t>(n_bands); }

    bool has_pixels() const { return !pixels.empty(); }

    void validate(const ClassLegend& legend) const {
        if (n_bands <= 0) throw data_error("sample set has no bands");
        if (features.size() != size() * static_cast<std::size_t>(n_bands))
            throw data_error("sample feature storage is inconsistent");
        if (!pixels.empty() && pixels.size() != size())
            throw data_error("sample pixel index storage is inconsistent");
        for (const auto l : labels)
            if (l >= static_cast<std::uint16_t>(legend.size()))
                throw data_error("sample label " + std::to_string(l) + " outside legend");
    }

    // per-class sample counts, indexed by class id
    std::vector<std::size_t> class_counts(const ClassLegend& legend) const {
        std::vector<std::size_t> counts(static_cast<std::size_t>(legend.size()), 0);
        for (const auto l : labels) counts[l]++;
        return counts;
    }
};

// Integer label raster sharing the grid of its source image.
struct ClassificationMap {
    int width = 0;
    int height = 0;
    std::vector<std::uint16_t> labels;  // row-major
    ClassLegend legend;

    std::size_t pixel_count() const {
        return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    }

    void validate() const {
        if (width <= 0 || height <= 0) throw data_error("map dimensions must be positive");
        if (labels.size() != pixel_count())
            throw data_error("map label count does not match width*height");
        const auto k = static_cast<std::uint16_t>(legend.size());
        for (const auto l : labels)
            if (l >= k) throw data_error("map label " + std::to_string(l) + " outside legend");
    }
};

}  // namespace enfs
