// Copyright 2026 The Ellipsoid Shield Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ellipsoid_shield/scenario_io.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

#include "json.hpp"

namespace eshield {

namespace {

using nlohmann::json;

std::string Num(double x) {
  if (!std::isfinite(x)) return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string JsonNum(double x) { return std::isfinite(x) ? Num(x) : "null"; }

std::string Child(const std::string& at, const std::string& key) {
  return at + "/" + key;
}

void CheckKeys(const json& obj, const std::string& at,
               const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ScenarioParseError(at, "expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw ScenarioParseError(Child(at, it.key()), "unknown key");
    }
  }
}

const json& Require(const json& obj, const std::string& key,
                    const std::string& at) {
  if (!obj.contains(key)) {
    throw ScenarioParseError(Child(at, key), "missing required key");
  }
  return obj.at(key);
}

double AsNumber(const json& v, const std::string& at) {
  if (!v.is_number()) throw ScenarioParseError(at, "expected a number");
  return v.get<double>();
}

bool AsBool(const json& v, const std::string& at) {
  if (!v.is_boolean()) throw ScenarioParseError(at, "expected a boolean");
  return v.get<bool>();
}

long long AsInteger(const json& v, const std::string& at) {
  if (!v.is_number_integer()) {
    throw ScenarioParseError(at, "expected an integer");
  }
  return v.get<long long>();
}

Eigen::VectorXd AsNumbers(const json& v, const std::string& at, int size) {
  if (!v.is_array() || static_cast<int>(v.size()) != size) {
    throw ScenarioParseError(
        at, "expected an array of " + std::to_string(size) + " numbers");
  }
  Eigen::VectorXd out(size);
  for (int i = 0; i < size; ++i) {
    out(i) = AsNumber(v[i], at + "/" + std::to_string(i));
  }
  return out;
}

Vec AsVector(const json& v, const std::string& at, int size) {
  return AsNumbers(v, at, size);
}

// Rotation from "R" (row-major) or "yaw" (planar only). Identity when absent.
Mat ParseRotation(const json& obj, const std::string& at, int d) {
  const bool has_r = obj.contains("R");
  const bool has_yaw = obj.contains("yaw");
  if (has_r && has_yaw) {
    throw ScenarioParseError(Child(at, "yaw"), "give either R or yaw");
  }
  if (has_yaw) {
    if (d != 2) throw ScenarioParseError(Child(at, "yaw"), "yaw needs d = 2");
    return PlanarRotation(AsNumber(obj.at("yaw"), Child(at, "yaw")));
  }
  if (!has_r) return Mat::Identity(d, d);
  const Eigen::VectorXd flat = AsNumbers(obj.at("R"), Child(at, "R"), d * d);
  Mat R(d, d);
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) R(r, c) = flat(r * d + c);
  }
  return R;
}

void ParseParams(const json& p, const std::string& at, Scenario* s) {
  CheckKeys(p, at,
            {"gamma", "k_z", "k_z_scheduled", "k_v", "k_omega", "beta_v",
             "beta_omega", "beta_a", "beta_steer", "cruise_speed",
             "z_rate_limit", "wheelbase", "cm_ratio"});
  ControllerParams& c = s->params;
  auto num = [&](const char* key, double* dst) {
    if (p.contains(key)) *dst = AsNumber(p.at(key), Child(at, key));
  };
  num("gamma", &c.gamma);
  num("k_z", &c.k_z.k);
  if (p.contains("k_z_scheduled")) {
    c.k_z.scheduled =
        AsBool(p.at("k_z_scheduled"), Child(at, "k_z_scheduled"));
  }
  num("k_v", &c.k_v);
  num("k_omega", &c.k_omega);
  num("beta_v", &c.beta_v);
  num("beta_omega", &c.beta_omega);
  num("beta_a", &c.beta_a);
  num("beta_steer", &c.beta_steer);
  num("cruise_speed", &c.cruise_speed);
  num("z_rate_limit", &c.z_rate_limit);
  num("wheelbase", &s->vehicle.wheelbase);
  num("cm_ratio", &s->vehicle.cm_ratio);
}

BodySpec ParseBody(const json& b, const std::string& at, const Scenario& s) {
  CheckKeys(b, at,
            {"id", "p", "R", "yaw", "axes", "goal", "path", "static", "speed",
             "steering"});
  const int d = s.dim();
  BodySpec spec;
  spec.body.id = static_cast<int>(AsInteger(Require(b, "id", at), Child(at, "id")));
  spec.body.pose.p = AsVector(Require(b, "p", at), Child(at, "p"), d);
  spec.body.pose.R = ParseRotation(b, at, d);
  spec.body.shape.axes = AsVector(Require(b, "axes", at), Child(at, "axes"), d);
  if (b.contains("static")) {
    spec.is_static = AsBool(b.at("static"), Child(at, "static"));
  }
  if (b.contains("goal")) {
    const std::string gat = Child(at, "goal");
    const json& g = b.at("goal");
    CheckKeys(g, gat, {"p", "R", "yaw"});
    Pose goal;
    goal.p = AsVector(Require(g, "p", gat), Child(gat, "p"), d);
    goal.R = ParseRotation(g, gat, d);
    spec.goal = goal;
  }
  if (b.contains("path")) {
    const std::string pat = Child(at, "path");
    const json& p = b.at("path");
    CheckKeys(p, pat, {"point", "direction"});
    LinePath path;
    path.point = AsVector(Require(p, "point", pat), Child(pat, "point"), d);
    path.direction =
        AsVector(Require(p, "direction", pat), Child(pat, "direction"), d);
    const double norm = path.direction.norm();
    if (!(norm > 0.0)) {
      throw ScenarioParseError(Child(pat, "direction"), "zero direction");
    }
    path.direction /= norm;
    spec.path = path;
  }
  if (b.contains("speed")) spec.speed = AsNumber(b.at("speed"), Child(at, "speed"));
  if (b.contains("steering")) {
    spec.steering = AsNumber(b.at("steering"), Child(at, "steering"));
  }
  return spec;
}

json VecJson(const Vec& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json RotationJson(const Mat& R) {
  json a = json::array();
  for (int r = 0; r < R.rows(); ++r) {
    for (int c = 0; c < R.cols(); ++c) a.push_back(R(r, c));
  }
  return a;
}

std::ofstream OpenOut(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

}  // namespace

Scenario ParseScenario(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioParseError("", std::string("invalid JSON at byte ") +
                                     std::to_string(e.byte) + ": " + e.what());
  }
  CheckKeys(doc, "", {"mode", "dt", "t_end", "seed", "oracle_every", "params",
                      "bodies"});
  Scenario s;
  const json& mode = Require(doc, "mode", "");
  if (!mode.is_string()) throw ScenarioParseError("/mode", "expected a string");
  const std::string m = mode.get<std::string>();
  if (m == "rbm2d") {
    s.mode = Mode::kRbm2d;
  } else if (m == "rbm3d") {
    s.mode = Mode::kRbm3d;
  } else if (m == "vehicle2d") {
    s.mode = Mode::kVehicle2d;
  } else {
    throw ScenarioParseError("/mode", "unknown mode '" + m + "'");
  }
  if (doc.contains("dt")) s.dt = AsNumber(doc.at("dt"), "/dt");
  s.t_end = AsNumber(Require(doc, "t_end", ""), "/t_end");
  if (doc.contains("seed")) {
    const long long seed = AsInteger(doc.at("seed"), "/seed");
    if (seed < 0) throw ScenarioParseError("/seed", "expected >= 0");
    s.seed = static_cast<std::uint64_t>(seed);
  }
  if (doc.contains("oracle_every")) {
    s.oracle_every =
        static_cast<int>(AsInteger(doc.at("oracle_every"), "/oracle_every"));
  }
  if (doc.contains("params")) ParseParams(doc.at("params"), "/params", &s);
  const json& bodies = Require(doc, "bodies", "");
  if (!bodies.is_array()) throw ScenarioParseError("/bodies", "expected an array");
  for (size_t k = 0; k < bodies.size(); ++k) {
    s.bodies.push_back(ParseBody(bodies[k], "/bodies/" + std::to_string(k), s));
  }
  return s;
}

Scenario LoadScenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioParseError("", "cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseScenario(buf.str());
}

std::string ScenarioToJson(const Scenario& s) {
  json doc;
  doc["mode"] = ModeName(s.mode);
  doc["dt"] = s.dt;
  doc["t_end"] = s.t_end;
  doc["seed"] = s.seed;
  doc["oracle_every"] = s.oracle_every;
  const ControllerParams& c = s.params;
  json p;
  p["gamma"] = c.gamma;
  p["k_z"] = c.k_z.k;
  p["k_z_scheduled"] = c.k_z.scheduled;
  if (s.mode == Mode::kVehicle2d) {
    p["beta_a"] = c.beta_a;
    p["beta_steer"] = c.beta_steer;
    p["cruise_speed"] = c.cruise_speed;
    p["z_rate_limit"] = c.z_rate_limit;
    p["wheelbase"] = s.vehicle.wheelbase;
    p["cm_ratio"] = s.vehicle.cm_ratio;
  } else {
    p["k_v"] = c.k_v;
    p["k_omega"] = c.k_omega;
    p["beta_v"] = c.beta_v;
    p["beta_omega"] = c.beta_omega;
  }
  doc["params"] = p;
  json bodies = json::array();
  for (const BodySpec& spec : s.bodies) {
    json b;
    b["id"] = spec.body.id;
    b["p"] = VecJson(spec.body.pose.p);
    b["R"] = RotationJson(spec.body.pose.R);
    b["axes"] = VecJson(spec.body.shape.axes);
    if (spec.is_static) b["static"] = true;
    if (spec.goal) {
      b["goal"] = {{"p", VecJson(spec.goal->p)},
                   {"R", RotationJson(spec.goal->R)}};
    }
    if (spec.path) {
      b["path"] = {{"point", VecJson(spec.path->point)},
                   {"direction", VecJson(spec.path->direction)}};
    }
    if (s.mode == Mode::kVehicle2d) {
      b["speed"] = spec.speed;
      b["steering"] = spec.steering;
    }
    bodies.push_back(b);
  }
  doc["bodies"] = bodies;
  return doc.dump(2) + "\n";
}

std::string TrajectoryCsvHeader(Mode mode, int d) {
  std::string h = "t,body_id";
  for (int i = 0; i < d; ++i) h += ",p_" + std::to_string(i);
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) h += ",R_" + std::to_string(r) + std::to_string(c);
  }
  for (int i = 0; i < d; ++i) h += ",v_" + std::to_string(i);
  for (int i = 0; i < AngularDim(d); ++i) h += ",omega_" + std::to_string(i);
  if (mode == Mode::kVehicle2d) h += ",speed,steering";
  return h;
}

std::string PairsCsvHeader(int d, bool with_oracle) {
  std::string h = "t,owner,other";
  for (int i = 0; i < d; ++i) h += ",z_" + std::to_string(i);
  h += ",h";
  if (with_oracle) h += ",w_star";
  return h;
}

void WriteTrajectoryCsv(const TrajectoryLog& log, const std::string& path) {
  std::ofstream out = OpenOut(path);
  out << TrajectoryCsvHeader(log.mode, log.dim) << "\n";
  std::string line;
  for (const StepRecord& rec : log.steps) {
    for (size_t k = 0; k < rec.bodies.size(); ++k) {
      const BodyRecord& b = rec.bodies[k];
      line = Num(rec.t) + "," + std::to_string(log.body_ids[k]);
      for (int i = 0; i < b.pose.p.size(); ++i) line += "," + Num(b.pose.p(i));
      for (int r = 0; r < b.pose.R.rows(); ++r) {
        for (int c = 0; c < b.pose.R.cols(); ++c) line += "," + Num(b.pose.R(r, c));
      }
      for (int i = 0; i < b.velocity.v.size(); ++i) line += "," + Num(b.velocity.v(i));
      for (int i = 0; i < b.velocity.omega.size(); ++i) {
        line += "," + Num(b.velocity.omega(i));
      }
      if (log.mode == Mode::kVehicle2d) {
        line += "," + Num(b.speed) + "," + Num(b.steering);
      }
      out << line << "\n";
    }
  }
  if (!out) throw std::runtime_error("failed writing " + path);
}

void WritePairsCsv(const TrajectoryLog& log, bool with_oracle,
                   const std::string& path) {
  std::ofstream out = OpenOut(path);
  out << PairsCsvHeader(log.dim, with_oracle) << "\n";
  std::string line;
  for (const StepRecord& rec : log.steps) {
    for (size_t c = 0; c < rec.pairs.size(); ++c) {
      const PairRecord& pr = rec.pairs[c];
      line = Num(rec.t) + "," + std::to_string(log.pair_ids[c].first) + "," +
             std::to_string(log.pair_ids[c].second);
      for (int i = 0; i < pr.z.size(); ++i) line += "," + Num(pr.z(i));
      line += "," + Num(pr.h);
      if (with_oracle) line += "," + (pr.audited ? Num(pr.w_star) : "");
      out << line << "\n";
    }
  }
  if (!out) throw std::runtime_error("failed writing " + path);
}

std::string SummaryJson(const RunSummary& s) {
  std::string out = "{\n";
  out += "  \"min_h\": " + JsonNum(s.min_h) + ",\n";
  out += "  \"max_h_minus_wstar\": " +
         (s.max_h_minus_wstar ? JsonNum(*s.max_h_minus_wstar) : "null") + ",\n";
  out += "  \"goal_errors\": [";
  for (size_t k = 0; k < s.goal_errors.size(); ++k) {
    out += (k ? ", " : "") + JsonNum(s.goal_errors[k]);
  }
  out += "],\n";
  out += "  \"qp_time_median_ms\": " + JsonNum(s.qp_time_median_ms) + "\n";
  out += "}\n";
  return out;
}

void WriteSummaryJson(const RunSummary& summary, const std::string& path) {
  std::ofstream out = OpenOut(path);
  out << SummaryJson(summary);
  if (!out) throw std::runtime_error("failed writing " + path);
}

void WriteHPlotSvg(const TrajectoryLog& log, const std::string& path) {
  const double width = 800.0, height = 400.0, margin = 40.0;
  double t_max = 0.0, h_min = 0.0, h_max = 0.0;
  for (const StepRecord& rec : log.steps) {
    t_max = std::max(t_max, rec.t);
    for (const PairRecord& pr : rec.pairs) {
      h_min = std::min(h_min, pr.h);
      h_max = std::max(h_max, pr.h);
    }
  }
  if (t_max <= 0.0) t_max = 1.0;
  if (h_max - h_min <= 0.0) h_max = h_min + 1.0;
  auto x_of = [&](double t) { return margin + (width - 2 * margin) * t / t_max; };
  auto y_of = [&](double h) {
    return height - margin - (height - 2 * margin) * (h - h_min) / (h_max - h_min);
  };
  std::ofstream out = OpenOut(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\">\n";
  out << "<line x1=\"" << margin << "\" y1=\"" << y_of(0.0) << "\" x2=\""
      << width - margin << "\" y2=\"" << y_of(0.0)
      << "\" stroke=\"black\" stroke-dasharray=\"4\"/>\n";
  const size_t stride = std::max<size_t>(1, log.steps.size() / 2000);
  for (size_t c = 0; c < log.pair_ids.size(); ++c) {
    out << "<polyline fill=\"none\" stroke=\"hsl(" << (c * 47) % 360
        << ",70%,40%)\" points=\"";
    for (size_t k = 0; k < log.steps.size(); k += stride) {
      out << x_of(log.steps[k].t) << "," << y_of(log.steps[k].pairs[c].h) << " ";
    }
    out << "\"/>\n";
  }
  out << "</svg>\n";
}

}  // namespace eshield
