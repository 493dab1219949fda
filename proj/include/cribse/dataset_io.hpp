#ifndef CRIBSE_DATASET_IO_HPP
#define CRIBSE_DATASET_IO_HPP

#include <string>

#include "cribse/simulate.hpp"

namespace cribse::io {

enum class Format { Json, Binary };

Format format_from_name(const std::string& name);
std::string format_name(Format f);

/// A dataset together with the truth that produced it; the truth travels
/// with the file so separators fitted later can be scored against it.
struct DatasetFile {
  simulate::MixtureConfig config;
  simulate::Dataset data;
};

/// Json: one self-contained JSON document. Binary: a single-line JSON
/// header (ending in '\n') followed by the raw payload — x then s as
/// little-endian float64 pairs (re, im), x laid out sample-by-sample with
/// the d sensor values contiguous. Writing is byte-deterministic.
void save_dataset(const std::string& path, const simulate::MixtureConfig& config,
                  const simulate::Dataset& data, Format format);

/// Auto-detects the format; throws ParseError on malformed content and
/// IoError on filesystem trouble.
DatasetFile load_dataset(const std::string& path);

}  // namespace cribse::io

#endif
