#include "gil/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace gil {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

bool parse_double(const std::string& s, double& out) {
  const char* begin = s.c_str();
  char* end = nullptr;
  out = std::strtod(begin, &end);
  return end == begin + s.size() && !s.empty();
}

void finalize_filled(Sample& s, double placeholder) {
  s.x_filled = s.x;
  for (std::size_t j = 0; j < s.x.size(); ++j) {
    if (s.m[j] == 0.0) s.x_filled[j] = placeholder;
  }
}

void finalize_filled(SequenceSample& s, double placeholder) {
  s.x_filled = s.x;
  for (std::size_t t = 0; t < s.horizon(); ++t) {
    for (std::size_t j = 0; j < s.x[t].size(); ++j) {
      if (s.m[t][j] == 0.0) s.x_filled[t][j] = placeholder;
    }
  }
}

std::uint32_t read_be_u32(std::istream& in, const std::string& path) {
  unsigned char buf[4];
  in.read(reinterpret_cast<char*>(buf), 4);
  if (!in) throw std::runtime_error("truncated IDX file: " + path);
  return (std::uint32_t(buf[0]) << 24) | (std::uint32_t(buf[1]) << 16) |
         (std::uint32_t(buf[2]) << 8) | std::uint32_t(buf[3]);
}

}  // namespace

void recompute_column_means(Dataset& ds) {
  Vector sums(ds.d, 0.0);
  std::vector<std::size_t> counts(ds.d, 0);
  auto accumulate = [&](const Vector& x, const Vector& m) {
    for (std::size_t j = 0; j < ds.d; ++j) {
      if (m[j] != 0.0) {
        sums[j] += x[j];
        ++counts[j];
      }
    }
  };
  for (const Sample& s : ds.samples) accumulate(s.x, s.m);
  for (const SequenceSample& s : ds.sequences) {
    for (std::size_t t = 0; t < s.horizon(); ++t) accumulate(s.x[t], s.m[t]);
  }
  ds.column_means.assign(ds.d, 0.0);
  for (std::size_t j = 0; j < ds.d; ++j) {
    if (counts[j] > 0) ds.column_means[j] = sums[j] / static_cast<double>(counts[j]);
  }
}

void refill_placeholder(Dataset& ds, double placeholder) {
  ds.placeholder = placeholder;
  for (Sample& s : ds.samples) finalize_filled(s, placeholder);
  for (SequenceSample& s : ds.sequences) finalize_filled(s, placeholder);
}

Dataset load_csv(const std::string& path, const CsvOptions& opts) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open csv file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty csv file: " + path);
  const std::vector<std::string> header = split_line(line);
  std::size_t label_idx = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == opts.label_column) label_idx = i;
  }
  if (label_idx == header.size())
    throw std::runtime_error("csv " + path + ": no column named '" + opts.label_column + "'");

  Dataset ds;
  ds.d = header.size() - 1;
  ds.placeholder = opts.placeholder;
  auto is_missing = [&](const std::string& cell) {
    return std::find(opts.missing_tokens.begin(), opts.missing_tokens.end(), cell) !=
           opts.missing_tokens.end();
  };

  std::size_t row = 1;
  int max_label = -1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_line(line);
    if (cells.size() != header.size())
      throw std::runtime_error("csv " + path + " row " + std::to_string(row) +
                               ": expected " + std::to_string(header.size()) + " cells, got " +
                               std::to_string(cells.size()));
    Sample s;
    s.x.reserve(ds.d);
    s.m.reserve(ds.d);
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i == label_idx) {
        double v = 0.0;
        if (!parse_double(cells[i], v) || v != std::floor(v) || v < 0)
          throw std::runtime_error("csv " + path + " row " + std::to_string(row) + " column '" +
                                   header[i] + "': bad label '" + cells[i] + "'");
        s.y = static_cast<int>(v);
        max_label = std::max(max_label, s.y);
        continue;
      }
      if (is_missing(cells[i])) {
        s.x.push_back(std::numeric_limits<double>::quiet_NaN());
        s.m.push_back(0.0);
      } else {
        double v = 0.0;
        if (!parse_double(cells[i], v))
          throw std::runtime_error("csv " + path + " row " + std::to_string(row) + " column '" +
                                   header[i] + "': cannot parse '" + cells[i] + "'");
        s.x.push_back(v);
        s.m.push_back(1.0);
      }
    }
    finalize_filled(s, opts.placeholder);
    ds.samples.push_back(std::move(s));
  }
  if (ds.samples.empty()) throw std::runtime_error("csv " + path + ": no data rows");
  ds.num_classes = max_label + 1;
  recompute_column_means(ds);

  // warn on columns with no observations at all
  std::vector<std::size_t> counts(ds.d, 0);
  for (const Sample& s : ds.samples) {
    for (std::size_t j = 0; j < ds.d; ++j) {
      if (s.m[j] != 0.0) ++counts[j];
    }
  }
  for (std::size_t j = 0; j < ds.d; ++j) {
    if (counts[j] == 0)
      std::cerr << "warning: csv " << path << ": column " << j
                << " has no observed values, mean set to 0\n";
  }

  if (opts.standardize) {
    Vector sq(ds.d, 0.0);
    for (const Sample& s : ds.samples) {
      for (std::size_t j = 0; j < ds.d; ++j) {
        if (s.m[j] != 0.0) {
          const double c = s.x[j] - ds.column_means[j];
          sq[j] += c * c;
        }
      }
    }
    Vector stddev(ds.d, 1.0);
    for (std::size_t j = 0; j < ds.d; ++j) {
      if (counts[j] > 0) {
        const double var = sq[j] / static_cast<double>(counts[j]);
        if (var > 0.0) stddev[j] = std::sqrt(var);
      }
    }
    for (Sample& s : ds.samples) {
      for (std::size_t j = 0; j < ds.d; ++j) {
        if (s.m[j] != 0.0) s.x[j] = (s.x[j] - ds.column_means[j]) / stddev[j];
      }
      finalize_filled(s, opts.placeholder);
    }
    recompute_column_means(ds);
  }
  return ds;
}

Dataset load_mnist_idx(const std::string& images_path, const std::string& labels_path) {
  std::ifstream img(images_path, std::ios::binary);
  if (!img) throw std::runtime_error("cannot open IDX image file: " + images_path);
  std::ifstream lab(labels_path, std::ios::binary);
  if (!lab) throw std::runtime_error("cannot open IDX label file: " + labels_path);

  const std::uint32_t img_magic = read_be_u32(img, images_path);
  if (img_magic != 0x00000803u)
    throw std::runtime_error("bad IDX image magic in " + images_path);
  const std::uint32_t n_images = read_be_u32(img, images_path);
  const std::uint32_t rows = read_be_u32(img, images_path);
  const std::uint32_t cols = read_be_u32(img, images_path);

  const std::uint32_t lab_magic = read_be_u32(lab, labels_path);
  if (lab_magic != 0x00000801u)
    throw std::runtime_error("bad IDX label magic in " + labels_path);
  const std::uint32_t n_labels = read_be_u32(lab, labels_path);
  if (n_images != n_labels)
    throw std::runtime_error("IDX image/label count mismatch: " + std::to_string(n_images) +
                             " vs " + std::to_string(n_labels));

  Dataset ds;
  ds.d = static_cast<std::size_t>(rows) * cols;
  ds.placeholder = 0.0;
  ds.samples.reserve(n_images);
  std::vector<unsigned char> pixels(ds.d);
  int max_label = -1;
  for (std::uint32_t i = 0; i < n_images; ++i) {
    img.read(reinterpret_cast<char*>(pixels.data()), static_cast<std::streamsize>(ds.d));
    if (!img) throw std::runtime_error("truncated IDX file: " + images_path);
    char label = 0;
    lab.read(&label, 1);
    if (!lab) throw std::runtime_error("truncated IDX file: " + labels_path);
    Sample s;
    s.x.resize(ds.d);
    for (std::size_t j = 0; j < ds.d; ++j) s.x[j] = static_cast<double>(pixels[j]) / 255.0;
    s.m.assign(ds.d, 1.0);
    s.x_filled = s.x;
    s.y = static_cast<unsigned char>(label);
    max_label = std::max(max_label, s.y);
    ds.samples.push_back(std::move(s));
  }
  ds.num_classes = std::max(max_label + 1, 10);
  recompute_column_means(ds);
  return ds;
}

std::pair<Dataset, Dataset> split(const Dataset& ds, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw std::invalid_argument("split: test_fraction must be in (0,1)");
  const std::size_t n = ds.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  shuffle(order, rng);
  const auto n_test =
      static_cast<std::size_t>(std::llround(static_cast<double>(n) * test_fraction));

  Dataset train, test;
  for (Dataset* part : {&train, &test}) {
    part->d = ds.d;
    part->num_classes = ds.num_classes;
    part->placeholder = ds.placeholder;
  }
  for (std::size_t i = 0; i < n; ++i) {
    Dataset& part = i < n - n_test ? train : test;
    if (ds.sequential())
      part.sequences.push_back(ds.sequences[order[i]]);
    else
      part.samples.push_back(ds.samples[order[i]]);
  }
  recompute_column_means(train);
  recompute_column_means(test);
  return {std::move(train), std::move(test)};
}

BatchIterator::BatchIterator(const Dataset& ds, std::size_t batch_size, std::uint64_t seed)
    : batch_size_(batch_size), order_(ds.size()), rng_(seed) {
  if (batch_size == 0 || batch_size > ds.size())
    throw std::invalid_argument("batch_iter: bad batch size");
  std::iota(order_.begin(), order_.end(), 0);
  reshuffle();
}

void BatchIterator::reshuffle() {
  shuffle(order_, rng_);
  cursor_ = 0;
}

std::vector<std::size_t> BatchIterator::next() {
  if (cursor_ + batch_size_ > order_.size()) reshuffle();  // drop the incomplete tail
  std::vector<std::size_t> batch(order_.begin() + static_cast<std::ptrdiff_t>(cursor_),
                                 order_.begin() + static_cast<std::ptrdiff_t>(cursor_ + batch_size_));
  cursor_ += batch_size_;
  return batch;
}

BalancedBatchIterator::BalancedBatchIterator(const Dataset& ds, std::size_t batch_size,
                                             std::uint64_t seed)
    : batch_size_(batch_size), rng_(seed) {
  if (ds.num_classes != 2)
    throw std::invalid_argument("balanced_batch_iter: requires binary labels");
  if (batch_size == 0 || batch_size % 2 != 0)
    throw std::invalid_argument("balanced_batch_iter: batch size must be even");
  for (std::size_t i = 0; i < ds.size(); ++i) {
    (ds.label(i) == 1 ? positives_ : negatives_).push_back(i);
  }
  const std::size_t half = batch_size_ / 2;
  if (positives_.size() < half || negatives_.size() < half)
    throw std::invalid_argument("balanced_batch_iter: not enough samples of each class");
  batches_per_epoch_ = std::min(positives_.size(), negatives_.size()) / half;
  reshuffle();
}

void BalancedBatchIterator::reshuffle() {
  shuffle(positives_, rng_);
  shuffle(negatives_, rng_);
  cursor_ = 0;
}

std::vector<std::size_t> BalancedBatchIterator::next() {
  if (cursor_ >= batches_per_epoch_) reshuffle();
  const std::size_t half = batch_size_ / 2;
  std::vector<std::size_t> batch;
  batch.reserve(batch_size_);
  for (std::size_t i = 0; i < half; ++i) batch.push_back(positives_[cursor_ * half + i]);
  for (std::size_t i = 0; i < half; ++i) batch.push_back(negatives_[cursor_ * half + i]);
  ++cursor_;
  return batch;
}

}  // namespace gil
