#include "cribse/sweep.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <system_error>

#include "json.hpp"

#include "cribse/errors.hpp"
#include "cribse/model.hpp"
#include "cribse/parallel.hpp"

namespace cribse::sweep {

namespace {

constexpr const char* kCsvHeader =
    "model,axis,value,d,N,T,alpha,gamma,tau,isr,isr_db,identifiable,rcond";

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ParseError("bad numeric field: " + s);
  }
  return v;
}

int parse_int(const std::string& s) {
  int v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ParseError("bad integer field: " + s);
  }
  return v;
}

bool parse_bool(const std::string& s) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw ParseError("bad boolean field: " + s);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

void check_point(double alpha, double gamma, double tau, const char* field) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw InvalidParams(std::string("alpha must be finite and positive (") + field +
                        ")");
  }
  if (!(gamma >= 0.0) || gamma >= 1.0) {
    throw InvalidParams(std::string("gamma must lie in [0, 1) (") + field + ")");
  }
  if (!std::isfinite(tau) || tau < 0.0 || tau > 1.0) {
    throw InvalidParams(std::string("tau must lie in [0, 1] (") + field + ")");
  }
}

}  // namespace

std::string axis_name(Axis a) {
  switch (a) {
    case Axis::Alpha: return "alpha";
    case Axis::Gamma: return "gamma";
    case Axis::Tau: return "tau";
  }
  throw InvalidParams("unknown axis tag");
}

Axis axis_from_name(const std::string& name) {
  if (name == "alpha") return Axis::Alpha;
  if (name == "gamma") return Axis::Gamma;
  if (name == "tau") return Axis::Tau;
  throw InvalidParams("unknown axis name: " + name);
}

std::vector<double> GridSpec::values() const {
  if (points < 1) throw InvalidParams("grid must have at least one point");
  if (!(min <= max)) throw InvalidParams("grid min must not exceed max");
  if (log_spacing && !(min > 0.0)) {
    throw InvalidParams("log-spaced grid needs a positive min");
  }
  std::vector<double> v(static_cast<std::size_t>(points));
  if (points == 1) {
    v[0] = min;
    return v;
  }
  const double lo = log_spacing ? std::log(min) : min;
  const double hi = log_spacing ? std::log(max) : max;
  for (int k = 0; k < points; ++k) {
    const double x = lo + (hi - lo) * k / (points - 1);
    v[static_cast<std::size_t>(k)] = log_spacing ? std::exp(x) : x;
  }
  v.front() = min;  // log spacing must not perturb the declared endpoints
  v.back() = max;
  return v;
}

void SweepSpec::validate() const {
  if (d < 2) throw InvalidParams("d must be >= 2");
  if (N < 1) throw InvalidParams("N must be >= 1");
  if (T < 1) throw InvalidParams("T must be >= 1");
  if (N % T != 0) throw InvalidParams("N must be divisible by T");
  if (models.empty()) throw InvalidParams("models list must be nonempty");
  for (double v : grid_values()) {
    const double a = axis == Axis::Alpha ? v : alpha;
    const double g = axis == Axis::Gamma ? v : gamma;
    const double t = axis == Axis::Tau ? v : tau;
    check_point(a, g, t, axis == Axis::Alpha   ? "alpha grid"
                         : axis == Axis::Gamma ? "gamma grid"
                                               : "tau grid");
  }
}

std::vector<double> SweepSpec::grid_values() const {
  std::vector<double> v = grid.values();
  for (double p : pins) {
    std::size_t nearest = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
      if (std::abs(v[i] - p) < std::abs(v[nearest] - p)) nearest = i;
    }
    v[nearest] = p;
  }
  return v;
}

SweepSpec preset(const std::string& name) {
  SweepSpec s;
  if (name == "chart1") {
    s.axis = Axis::Alpha;
    s.grid = GridSpec{0.1, 4.0, 21, true};
    s.pins = {1.0};
    s.gamma = 0.0;
    s.tau = 0.0;
  } else if (name == "chart2") {
    s.axis = Axis::Gamma;
    s.grid = GridSpec{0.0, 0.95, 20, false};
    s.alpha = 1.0;
    s.tau = 0.0;
  } else if (name == "chart3") {
    s.axis = Axis::Tau;
    s.grid = GridSpec{0.0, 1.0, 21, false};
    s.alpha = 1.0;
    s.gamma = 0.0;
  } else {
    throw InvalidParams("unknown preset: " + name);
  }
  return s;
}

std::vector<ResultRow> run_sweep(const SweepSpec& spec) {
  spec.validate();
  const std::vector<double> values = spec.grid_values();
  const int P = static_cast<int>(values.size());
  const int M = static_cast<int>(spec.models.size());
  std::vector<ResultRow> rows(static_cast<std::size_t>(P) * M);
  const model::BlendingSchedule sched = model::linear_schedule(spec.T);

  parallel_for(P, [&](int pi) {
    const double v = values[static_cast<std::size_t>(pi)];
    ResultRow base;
    base.axis = spec.axis;
    base.value = v;
    base.d = spec.d;
    base.N = spec.N;
    base.T = spec.T;
    base.alpha = spec.axis == Axis::Alpha ? v : spec.alpha;
    base.gamma = spec.axis == Axis::Gamma ? v : spec.gamma;
    base.tau = spec.axis == Axis::Tau ? v : spec.tau;
    const ggd::GgdParams p(base.alpha, base.gamma);
    for (int mi = 0; mi < M; ++mi) {
      ResultRow row = base;
      row.model = spec.models[static_cast<std::size_t>(mi)];
      const fim::CribResult r =
          fim::crib_model(row.model, spec.d, spec.N, spec.T, sched, p, base.tau);
      row.isr = r.isr;
      row.isr_db = r.isr_db;
      row.identifiable = r.identifiable;
      row.rcond = r.rcond;
      rows[static_cast<std::size_t>(pi) * M + mi] = row;
    }
  });
  return rows;
}

std::string to_csv(const std::vector<ResultRow>& rows) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : rows) {
    out += fim::model_name(r.model);
    out += ',';
    out += axis_name(r.axis);
    out += ',';
    out += fmt(r.value);
    out += ',';
    out += std::to_string(r.d);
    out += ',';
    out += std::to_string(r.N);
    out += ',';
    out += std::to_string(r.T);
    out += ',';
    out += fmt(r.alpha);
    out += ',';
    out += fmt(r.gamma);
    out += ',';
    out += fmt(r.tau);
    out += ',';
    out += fmt(r.isr);
    out += ',';
    out += fmt(r.isr_db);
    out += ',';
    out += r.identifiable ? "true" : "false";
    out += ',';
    out += fmt(r.rcond);
    out += '\n';
  }
  return out;
}

std::vector<ResultRow> rows_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw ParseError("missing or unexpected CSV header");
  }
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> f = split(line, ',');
    if (f.size() != 13) throw ParseError("CSV row with wrong field count");
    ResultRow r;
    r.model = fim::model_from_name(f[0]);
    r.axis = axis_from_name(f[1]);
    r.value = parse_double(f[2]);
    r.d = parse_int(f[3]);
    r.N = parse_int(f[4]);
    r.T = parse_int(f[5]);
    r.alpha = parse_double(f[6]);
    r.gamma = parse_double(f[7]);
    r.tau = parse_double(f[8]);
    r.isr = parse_double(f[9]);
    r.isr_db = parse_double(f[10]);
    r.identifiable = parse_bool(f[11]);
    r.rcond = parse_double(f[12]);
    rows.push_back(r);
  }
  return rows;
}

std::string to_json(const std::vector<ResultRow>& rows) {
  nlohmann::json j;
  j["schema"] = 1;
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json o;
    o["model"] = fim::model_name(r.model);
    o["axis"] = axis_name(r.axis);
    o["value"] = r.value;
    o["d"] = r.d;
    o["N"] = r.N;
    o["T"] = r.T;
    o["alpha"] = r.alpha;
    o["gamma"] = r.gamma;
    o["tau"] = r.tau;
    if (std::isinf(r.isr)) {
      o["isr"] = "inf";
    } else {
      o["isr"] = r.isr;
    }
    if (std::isinf(r.isr_db)) {
      o["isr_db"] = nullptr;
    } else {
      o["isr_db"] = r.isr_db;
    }
    o["identifiable"] = r.identifiable;
    o["rcond"] = r.rcond;
    arr.push_back(std::move(o));
  }
  j["rows"] = std::move(arr);
  return j.dump() + "\n";
}

std::vector<ResultRow> rows_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad result JSON: ") + e.what());
  }
  try {
    if (j.at("schema").get<int>() != 1) throw ParseError("unknown result schema");
    std::vector<ResultRow> rows;
    for (const auto& o : j.at("rows")) {
      ResultRow r;
      r.model = fim::model_from_name(o.at("model").get<std::string>());
      r.axis = axis_from_name(o.at("axis").get<std::string>());
      r.value = o.at("value").get<double>();
      r.d = o.at("d").get<int>();
      r.N = o.at("N").get<int>();
      r.T = o.at("T").get<int>();
      r.alpha = o.at("alpha").get<double>();
      r.gamma = o.at("gamma").get<double>();
      r.tau = o.at("tau").get<double>();
      const auto& isr = o.at("isr");
      r.isr = isr.is_string() ? std::numeric_limits<double>::infinity()
                              : isr.get<double>();
      const auto& db = o.at("isr_db");
      r.isr_db = db.is_null() ? std::numeric_limits<double>::infinity()
                              : db.get<double>();
      r.identifiable = o.at("identifiable").get<bool>();
      r.rcond = o.at("rcond").get<double>();
      rows.push_back(r);
    }
    return rows;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad result JSON: ") + e.what());
  }
}

std::string gnuplot_script(const SweepSpec& spec, const std::string& csv_path) {
  std::string s;
  s += "# CRIB sweep plot; run:  gnuplot -p <this file>\n";
  s += "set datafile separator ','\n";
  s += "set key top right\n";
  s += "set xlabel '" + axis_name(spec.axis) + "'\n";
  s += "set ylabel 'bound on mean ISR [dB]'\n";
  if (spec.grid.log_spacing) s += "set logscale x\n";
  s += "plot \\\n";
  for (std::size_t i = 0; i < spec.models.size(); ++i) {
    const std::string tag = fim::model_name(spec.models[i]);
    s += "  '" + csv_path + "' using 3:(strcol(1) eq '" + tag +
         "' ? column(11) : NaN) with linespoints title '" + tag + "'";
    s += (i + 1 < spec.models.size()) ? ", \\\n" : "\n";
  }
  return s;
}

}  // namespace cribse::sweep
