#include "texshuffle/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "texshuffle/error.hpp"
#include "texshuffle/random.hpp"

namespace fs = std::filesystem;

namespace texshuffle {

namespace {

constexpr std::array<std::string_view, kNumClasses> kLabelNames = {
    "fluid", "good", "dry", "tearing"};

std::string_view trim(std::string_view s) {
  const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// Splits one CSV record. Handles double-quoted fields without embedded newlines.
std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

}  // namespace

ClassLabel label_from_index(std::size_t index) {
  if (index >= kNumClasses) {
    throw std::out_of_range("label index out of range: " + std::to_string(index));
  }
  return static_cast<ClassLabel>(index);
}

std::string_view label_name(ClassLabel label) noexcept {
  return kLabelNames[label_index(label)];
}

std::optional<ClassLabel> parse_label(std::string_view text) {
  const std::string lowered = to_lower(trim(text));
  for (std::size_t i = 0; i < kNumClasses; ++i) {
    if (lowered == kLabelNames[i]) return static_cast<ClassLabel>(i);
  }
  return std::nullopt;
}

Dataset::Dataset(std::vector<TextureSample> samples) {
  samples_.reserve(samples.size());
  for (auto& s : samples) add(std::move(s));
}

void Dataset::add(TextureSample sample) {
  const Image& img = sample.image;
  if (img.height < 1 || img.width < 1 || img.channels != 3 ||
      img.data.size() != static_cast<std::size_t>(img.height) * img.width * 3) {
    throw std::invalid_argument("sample '" + sample.source_id +
                                "' is not a non-empty RGB image");
  }
  ++counts_[label_index(sample.label)];
  samples_.push_back(std::move(sample));
}

std::vector<LabelEntry> load_label_map(const fs::path& csv_path) {
  std::ifstream in(csv_path);
  if (!in) {
    throw IngestionError("cannot open label map: " + csv_path.string());
  }

  std::string line;
  if (!std::getline(in, line)) {
    throw ValidationError("label map is empty (no header): " + csv_path.string());
  }
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);  // UTF-8 BOM

  const auto header = split_csv_line(line);
  std::optional<std::size_t> file_col;
  std::optional<std::size_t> label_col;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string name = to_lower(trim(header[i]));
    if (name == "filename" && !file_col) file_col = i;
    if (name == "label" && !label_col) label_col = i;
  }
  if (!file_col || !label_col) {
    throw ValidationError(csv_path.string() +
                          ": header must contain 'filename' and 'label' columns");
  }

  std::vector<LabelEntry> entries;
  std::unordered_set<std::string> seen;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    ++row;
    const auto fields = split_csv_line(line);
    const std::size_t needed = std::max(*file_col, *label_col) + 1;
    if (fields.size() < needed) {
      throw ValidationError(csv_path.string() + " row " + std::to_string(row) +
                            ": expected at least " + std::to_string(needed) +
                            " columns");
    }
    std::string image_id(trim(fields[*file_col]));
    if (image_id.empty()) {
      throw ValidationError(csv_path.string() + " row " + std::to_string(row) +
                            ": empty filename");
    }
    const auto label = parse_label(fields[*label_col]);
    if (!label) {
      throw ValidationError(csv_path.string() + " row " + std::to_string(row) +
                            ": unknown label '" +
                            std::string(trim(fields[*label_col])) + "'");
    }
    if (!seen.insert(image_id).second) {
      throw ValidationError(csv_path.string() + " row " + std::to_string(row) +
                            ": duplicate filename '" + image_id + "'");
    }
    entries.push_back({std::move(image_id), *label});
  }
  return entries;
}

Image read_image(const fs::path& path) {
  cv::Mat bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
  if (bgr.empty()) {
    throw IngestionError("cannot decode image: " + path.string());
  }
  cv::Mat rgb;
  cv::cvtColor(bgr, rgb, cv::COLOR_BGR2RGB);
  Image image = make_rgb(rgb.rows, rgb.cols);
  for (int y = 0; y < rgb.rows; ++y) {
    const auto* row = rgb.ptr<std::uint8_t>(y);
    std::copy(row, row + static_cast<std::ptrdiff_t>(rgb.cols) * 3,
              image.data.begin() + static_cast<std::ptrdiff_t>(image.offset(y, 0)));
  }
  return image;
}

void write_image(const Image& image, const fs::path& path) {
  if (image.channels != 3) {
    throw std::invalid_argument("write_image: expected RGB");
  }
  cv::Mat rgb(image.height, image.width, CV_8UC3,
              const_cast<std::uint8_t*>(image.data.data()));
  cv::Mat bgr;
  cv::cvtColor(rgb, bgr, cv::COLOR_RGB2BGR);
  if (!cv::imwrite(path.string(), bgr)) {
    throw IngestionError("cannot write image: " + path.string());
  }
}

Dataset load_dataset(const fs::path& image_dir,
                     std::span<const LabelEntry> label_map) {
  std::vector<std::string> missing;
  for (const auto& entry : label_map) {
    std::error_code ec;
    if (!fs::is_regular_file(image_dir / entry.image_id, ec)) {
      missing.push_back(entry.image_id);
    }
  }
  if (!missing.empty()) {
    std::ostringstream msg;
    msg << missing.size() << " image(s) listed in the label map are missing under "
        << image_dir.string() << ":";
    for (const auto& m : missing) msg << ' ' << m;
    throw IngestionError(msg.str());
  }

  Dataset dataset;
  for (const auto& entry : label_map) {
    dataset.add({read_image(image_dir / entry.image_id), entry.label, entry.image_id});
  }
  return dataset;
}

fs::path save_dataset(const Dataset& dataset, const fs::path& dir) {
  fs::create_directories(dir / "images");
  const fs::path csv_path = dir / "labels.csv";
  std::ofstream csv(csv_path);
  if (!csv) {
    throw IngestionError("cannot write " + csv_path.string());
  }
  csv << "filename,label\n";
  for (const auto& sample : dataset) {
    std::string stem = sample.source_id;
    std::replace_if(stem.begin(), stem.end(),
                    [](char c) { return c == '/' || c == '\\' || c == '#'; }, '_');
    if (fs::path(stem).extension() != ".png") stem += ".png";
    const std::string rel = "images/" + stem;
    write_image(sample.image, dir / rel);
    csv << rel << ',' << label_name(sample.label) << '\n';
  }
  return csv_path;
}

Split stratified_split(const Dataset& dataset, double train_fraction,
                       std::uint64_t seed) {
  if (dataset.empty()) {
    throw std::invalid_argument("stratified_split: dataset is empty");
  }
  if (!(train_fraction > 0.0 && train_fraction <= 1.0)) {
    throw std::invalid_argument("stratified_split: train_fraction must be in (0, 1]");
  }

  std::vector<bool> in_train(dataset.size(), false);
  for (const ClassLabel label : kAllLabels) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      if (dataset[i].label == label) members.push_back(i);
    }
    if (members.empty()) continue;

    RandomStream rng(derive_seed(seed, {stream_tag("split"), label_index(label)}));
    for (std::size_t i = members.size() - 1; i > 0; --i) {
      std::swap(members[i], members[rng.uniform_index(i + 1)]);
    }
    // Round half up; the epsilon absorbs products like 0.7 * 15 = 10.4999...
    const double exact = train_fraction * static_cast<double>(members.size());
    const auto n_train = std::min(
        members.size(), static_cast<std::size_t>(std::floor(exact + 0.5 + 1e-9)));
    for (std::size_t k = 0; k < n_train; ++k) in_train[members[k]] = true;
  }

  Split split;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    (in_train[i] ? split.train : split.test).add(dataset[i]);
  }
  return split;
}

std::string dataset_checksum(const Dataset& dataset) {
  Fnv1a64 hash;
  for (const auto& s : dataset) {
    hash.update(s.source_id);
    const auto label = static_cast<std::uint8_t>(s.label);
    hash.update(&label, 1);
    const std::int32_t dims[2] = {s.image.height, s.image.width};
    hash.update(dims, sizeof dims);
    hash.update(s.image.data.data(), s.image.data.size());
  }
  return hash.hex();
}

}  // namespace texshuffle
