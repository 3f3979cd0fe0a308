#include "wsrm/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace wsrm::io {

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  throw InvalidArgument(where + ": " + what);
}

json pair(cdouble z) { return json::array({z.real(), z.imag()}); }

cdouble complex_from(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    bad(where, "expected a [re, im] pair of numbers");
  return {j[0].get<double>(), j[1].get<double>()};
}

json trace_json(const std::vector<double>& trace) {
  json t = json::array();
  for (double v : trace) t.push_back(v);
  return t;
}

}  // namespace

const json& require(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object()) bad(where, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) bad(where + "." + key, "missing field");
  return *it;
}

double require_number(const json& obj, const std::string& key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_number()) bad(where + "." + key, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) bad(where + "." + key, "must be finite");
  return d;
}

int require_int(const json& obj, const std::string& key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_number_integer()) bad(where + "." + key, "expected an integer");
  return v.get<int>();
}

std::string require_string(const json& obj, const std::string& key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_string()) bad(where + "." + key, "expected a string");
  return v.get<std::string>();
}

std::vector<double> require_numbers(const json& obj, const std::string& key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_array()) bad(where + "." + key, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) bad(where + "." + key + "[" + std::to_string(i) + "]", "expected a number");
    out.push_back(v[i].get<double>());
    if (!std::isfinite(out.back())) bad(where + "." + key + "[" + std::to_string(i) + "]", "must be finite");
  }
  return out;
}

json beams_to_json(const BeamformerSet& beams) {
  json out = json::array();
  for (const auto& w : beams.w) {
    json user = json::array();
    for (Eigen::Index n = 0; n < w.size(); ++n) user.push_back(pair(w(n)));
    out.push_back(std::move(user));
  }
  return out;
}

BeamformerSet beams_from_json(const json& j) {
  if (!j.is_array() || j.empty()) bad("beams", "expected a non-empty array of users");
  const auto n = j[0].is_array() ? j[0].size() : 0;
  BeamformerSet beams(static_cast<int>(j.size()), static_cast<int>(n));
  for (std::size_t k = 0; k < j.size(); ++k) {
    const std::string where = "beams[" + std::to_string(k) + "]";
    if (!j[k].is_array() || j[k].size() != n) bad(where, "expected " + std::to_string(n) + " entries");
    for (std::size_t i = 0; i < n; ++i)
      beams.w[k](static_cast<Eigen::Index>(i)) = complex_from(j[k][i], where + "[" + std::to_string(i) + "]");
  }
  return beams;
}

json channels_to_json(const ChannelSet& channels) {
  json h = json::array();
  for (const auto& row : channels.h) {
    json r = json::array();
    for (Eigen::Index n = 0; n < row.size(); ++n) r.push_back(pair(row(n)));
    h.push_back(std::move(r));
  }
  return {{"num_bs", channels.num_bs},
          {"num_users", channels.num_users},
          {"num_antennas", channels.num_antennas},
          {"h", std::move(h)}};
}

ChannelSet channels_from_json(const json& j) {
  const std::string where = "channels";
  const int B = require_int(j, "num_bs", where);
  const int K = require_int(j, "num_users", where);
  const int N = require_int(j, "num_antennas", where);
  if (B < 1 || K < 1 || N < 1) bad(where, "num_bs, num_users and num_antennas must be positive");
  const json& h = require(j, "h", where);
  if (!h.is_array() || h.size() != static_cast<std::size_t>(B * K))
    bad(where + ".h", "expected num_bs * num_users = " + std::to_string(B * K) + " rows");
  ChannelSet ch(B, K, N);
  for (std::size_t r = 0; r < h.size(); ++r) {
    const std::string rw = where + ".h[" + std::to_string(r) + "]";
    if (!h[r].is_array() || h[r].size() != static_cast<std::size_t>(N))
      bad(rw, "expected " + std::to_string(N) + " entries");
    for (int n = 0; n < N; ++n) ch.h[r](n) = complex_from(h[r][static_cast<std::size_t>(n)], rw + "[" + std::to_string(n) + "]");
  }
  return ch;
}

json network_to_json(const NetworkConfig& config) {
  return {{"num_bs", config.num_bs},          {"num_antennas", config.num_antennas},
          {"num_users", config.num_users},    {"noise_var", config.noise_var},
          {"weights", config.weights},        {"assignment", config.assignment}};
}

NetworkConfig network_from_json(const json& j, const std::string& where) {
  const int B = require_int(j, "num_bs", where);
  const int N = require_int(j, "num_antennas", where);
  const int K = require_int(j, "num_users", where);
  if (B < 1) bad(where + ".num_bs", "must be positive");
  if (N < 1) bad(where + ".num_antennas", "must be positive");
  if (K < B) bad(where + ".num_users", "must be at least num_bs");
  NetworkConfig c = NetworkConfig::multi_cell(B, N, K, 0.0);
  if (j.contains("noise_var")) {
    c.noise_var = require_number(j, "noise_var", where);
    if (!(c.noise_var > 0.0)) bad(where + ".noise_var", "must be > 0");
  }
  if (j.contains("weights")) {
    c.weights = require_numbers(j, "weights", where);
    if (c.weights.size() != static_cast<std::size_t>(K)) bad(where + ".weights", "expected one weight per user");
    for (double a : c.weights)
      if (!(a > 0.0)) bad(where + ".weights", "weights must be > 0");
  }
  if (j.contains("assignment")) {
    const json& a = j["assignment"];
    if (!a.is_array() || a.size() != static_cast<std::size_t>(K))
      bad(where + ".assignment", "expected one BS index per user");
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (!a[k].is_number_integer() || a[k].get<int>() < 0 || a[k].get<int>() >= B)
        bad(where + ".assignment[" + std::to_string(k) + "]", "expected a BS index in [0, num_bs)");
      c.assignment[k] = a[k].get<int>();
    }
  }
  return c;
}

json result_to_json(const std::string& algorithm, const sca::ScaResult& r) {
  return {{"algorithm", algorithm},
          {"converged", r.converged},
          {"iterations", r.iterations},
          {"wsr", r.trace.empty() ? 0.0 : r.trace.back()},
          {"trace", trace_json(r.trace)},
          {"kkt_residual", r.kkt_residual < 0.0 ? json(nullptr) : json(r.kkt_residual)},
          {"beams", beams_to_json(r.beams)}};
}

json result_to_json(const std::string& algorithm, const baselines::WmmseResult& r) {
  return {{"algorithm", algorithm},
          {"converged", r.converged},
          {"iterations", r.iterations},
          {"wsr", r.trace.empty() ? 0.0 : r.trace.back()},
          {"trace", trace_json(r.trace)},
          {"kkt_residual", nullptr},
          {"beams", beams_to_json(r.beams)}};
}

json result_to_json(const std::string& algorithm, const BeamformerSet& beams, double wsr) {
  return {{"algorithm", algorithm},
          {"converged", true},
          {"iterations", 0},
          {"wsr", wsr},
          {"trace", json::array({wsr})},
          {"kkt_residual", nullptr},
          {"beams", beams_to_json(beams)}};
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + tmp.string());
    os << content;
    os.flush();
    if (!os) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot rename " + tmp.string() + " to " + target.string() + ": " + ec.message());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InvalidArgument("cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace wsrm::io
