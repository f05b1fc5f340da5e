#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "eetsne/types.hpp"

namespace eetsne {

// How to treat the last CSV column when loading a dataset.
//   None       - every column is a coordinate.
//   LastColumn - last column must be integral, becomes the label.
//   Auto       - LastColumn if there are >= 2 columns and every value in the
//                last one is integral, None otherwise.
enum class LabelMode { None, LastColumn, Auto };

struct LoadedCsv {
    Points data;
    std::vector<int> labels;  // empty when no label column
};

LoadedCsv load_csv(const std::string& path, LabelMode mode = LabelMode::Auto);

// Writes coordinates with %.17g (round-trips doubles exactly) and appends
// the label column when labels are provided.
void save_points_csv(const std::string& path, const Points& pts,
                     const std::vector<int>& labels = {});

// Square numeric CSV without label handling (e.g. explicit affinities).
Matrix load_matrix_csv(const std::string& path);

// One integer per line.
std::vector<int> load_labels_file(const std::string& path);

// IDX image file (magic 0x00000803): n x rows x cols bytes, scaled to [0,1]
// and flattened to rows*cols coordinates per point.
Points load_idx_images(const std::string& path);

// IDX label file (magic 0x00000801).
std::vector<int> load_idx_labels(const std::string& path);

// %.17g rendering used for every double this project writes.
std::string format_double(double v);

// Output directory that records every file it hands out and can write the
// listing as manifest.txt (sorted, one relative path per line).
class RunDir {
  public:
    explicit RunDir(std::string root);

    const std::string& root() const { return root_; }
    std::string path(const std::string& rel) const;

    // Opens rel for writing (creating parent directories) and registers it.
    std::ofstream create(const std::string& rel);

    // Registers a file produced by other means.
    void add(const std::string& rel);

    void write_manifest() const;

  private:
    std::string root_;
    std::vector<std::string> files_;
};

// "key = value" lines, doubles via format_double.
class KeyValueWriter {
  public:
    explicit KeyValueWriter(std::ofstream stream) : out_(std::move(stream)) {}

    void put(const std::string& key, const std::string& value);
    void put(const std::string& key, double value);
    void put(const std::string& key, int value);
    void put(const std::string& key, bool value);

  private:
    std::ofstream out_;
};

// Parses a whole file of "key = value" lines (used by tests and tools to
// read reports back).
std::vector<std::pair<std::string, std::string>> load_key_values(const std::string& path);

}  // namespace eetsne
