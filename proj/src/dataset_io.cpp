#include "cribse/dataset_io.hpp"

#include <cstring>
#include <fstream>
#include <utility>
#include <vector>

#include "json.hpp"

#include "cribse/errors.hpp"

namespace cribse::io {

using nlohmann::json;

namespace {

json complex_to_json(Complex v) { return json::array({v.real(), v.imag()}); }

Complex complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) {
    throw ParseError("complex values must be [re, im] pairs");
  }
  return Complex(j[0].get<double>(), j[1].get<double>());
}

json cvector_to_json(const CVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
  return out;
}

CVector cvector_from_json(const json& j, int expected) {
  if (!j.is_array() || static_cast<int>(j.size()) != expected) {
    throw ParseError("vector with unexpected length in dataset file");
  }
  CVector v(expected);
  for (int i = 0; i < expected; ++i) v(i) = complex_from_json(j[i]);
  return v;
}

json header_json(const simulate::MixtureConfig& c, const char* payload) {
  json j;
  j["format"] = "crib-bse-dataset";
  j["version"] = 1;
  j["payload"] = payload;
  j["d"] = c.d;
  j["N"] = c.N;
  j["T"] = c.T;
  j["seed"] = c.seed;
  j["alpha"] = c.source.alpha();
  j["gamma"] = c.source.gamma();
  j["tau"] = c.tau;
  j["lambda"] = c.path.schedule.weights();
  j["a_first"] = cvector_to_json(c.path.a_first);
  j["a_last"] = cvector_to_json(c.path.a_last);
  j["h"] = cvector_to_json(c.w.h);
  return j;
}

simulate::MixtureConfig config_from_header(const json& j) {
  const int d = j.at("d").get<int>();
  const int N = j.at("N").get<int>();
  const int T = j.at("T").get<int>();
  if (d < 2 || N < 1 || T < 1) throw ParseError("invalid dimensions in dataset header");
  ggd::GgdParams source(j.at("alpha").get<double>(), j.at("gamma").get<double>());
  model::BlendingSchedule sched(T, j.at("lambda").get<std::vector<double>>());
  model::MixingPath path(cvector_from_json(j.at("a_first"), d),
                         cvector_from_json(j.at("a_last"), d), std::move(sched));
  model::SeparatingVector w(cvector_from_json(j.at("h"), d - 1));
  return simulate::MixtureConfig(N, source, j.at("tau").get<double>(),
                                 std::move(path), std::move(w),
                                 j.at("seed").get<std::uint64_t>());
}

void append_raw(std::string& out, const Complex& v) {
  const double re = v.real();
  const double im = v.imag();
  out.append(reinterpret_cast<const char*>(&re), sizeof(double));
  out.append(reinterpret_cast<const char*>(&im), sizeof(double));
}

Complex read_raw(const char* p) {
  double re, im;
  std::memcpy(&re, p, sizeof(double));
  std::memcpy(&im, p + sizeof(double), sizeof(double));
  return Complex(re, im);
}

}  // namespace

Format format_from_name(const std::string& name) {
  if (name == "json") return Format::Json;
  if (name == "binary" || name == "bin") return Format::Binary;
  throw InvalidParams("unknown dataset format: " + name);
}

std::string format_name(Format f) {
  return f == Format::Json ? "json" : "binary";
}

void save_dataset(const std::string& path, const simulate::MixtureConfig& config,
                  const simulate::Dataset& data, Format format) {
  if (data.d() != config.d || data.N() != config.N) {
    throw DimensionMismatch("dataset does not match its configuration");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);

  if (format == Format::Json) {
    json j = header_json(config, "inline");
    json x = json::array();
    for (int n = 0; n < config.N; ++n) x.push_back(cvector_to_json(data.x.col(n)));
    j["x"] = std::move(x);
    j["s"] = cvector_to_json(data.s);
    out << j.dump() << '\n';
  } else {
    out << header_json(config, "binary").dump() << '\n';
    std::string blob;
    blob.reserve(static_cast<std::size_t>(config.N) * (config.d + 1) * 16);
    for (int n = 0; n < config.N; ++n) {
      for (int i = 0; i < config.d; ++i) append_raw(blob, data.x(i, n));
    }
    for (int n = 0; n < config.N; ++n) append_raw(blob, data.s(n));
    out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
  }
  if (!out) throw IoError("write failed: " + path);
}

DatasetFile load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::string header_line;
  if (!std::getline(in, header_line)) throw ParseError("empty dataset file: " + path);

  json j;
  try {
    j = json::parse(header_line);
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad dataset header: ") + e.what());
  }

  try {
    simulate::MixtureConfig config = config_from_header(j);
    simulate::Dataset data;
    data.x.resize(config.d, config.N);
    data.s.resize(config.N);
    data.block_index.resize(config.N);
    for (int n = 1; n <= config.N; ++n) {
      data.block_index[n - 1] = model::block_of_sample(n, config.N, config.T);
    }

    const std::string payload = j.at("payload").get<std::string>();
    if (payload == "inline") {
      const json& x = j.at("x");
      if (static_cast<int>(x.size()) != config.N) {
        throw ParseError("sample count mismatch in dataset body");
      }
      for (int n = 0; n < config.N; ++n) {
        data.x.col(n) = cvector_from_json(x[n], config.d);
      }
      data.s = cvector_from_json(j.at("s"), config.N);
    } else if (payload == "binary") {
      const std::size_t count =
          static_cast<std::size_t>(config.N) * (config.d + 1);
      std::string blob(count * 16, '\0');
      in.read(blob.data(), static_cast<std::streamsize>(blob.size()));
      if (static_cast<std::size_t>(in.gcount()) != blob.size()) {
        throw ParseError("truncated binary payload in " + path);
      }
      const char* p = blob.data();
      for (int n = 0; n < config.N; ++n) {
        for (int i = 0; i < config.d; ++i, p += 16) data.x(i, n) = read_raw(p);
      }
      for (int n = 0; n < config.N; ++n, p += 16) data.s(n) = read_raw(p);
    } else {
      throw ParseError("unknown payload kind: " + payload);
    }
    return DatasetFile{std::move(config), std::move(data)};
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad dataset file: ") + e.what());
  }
}

}  // namespace cribse::io
