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

#include "ellipsoid_shield/simulator.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <string>

#include "ellipsoid_shield/distance_oracle.h"
#include "ellipsoid_shield/parallel.h"
#include "ellipsoid_shield/qp.h"
#include "ellipsoid_shield/separation.h"

namespace eshield {

namespace {

constexpr double kSafetySlack = 1e-4;

std::vector<BodySpec> SortedBodies(const Scenario& scenario) {
  std::vector<BodySpec> bodies = scenario.bodies;
  std::stable_sort(bodies.begin(), bodies.end(),
                   [](const BodySpec& a, const BodySpec& b) {
                     return a.body.id < b.body.id;
                   });
  return bodies;
}

std::string PairName(const BodySpec& a, const BodySpec& b) {
  return std::to_string(a.body.id) + " and " + std::to_string(b.body.id);
}

double Median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  const size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  double m = values[mid];
  if (values.size() % 2 == 0) {
    m = 0.5 * (m + *std::max_element(values.begin(), values.begin() + mid));
  }
  return m;
}

// Mutable state of a run, indexed like the sorted body list.
struct SimState {
  std::vector<ShapedBody> bodies;
  std::vector<double> speed;
  std::vector<double> steering;
  std::vector<PairChannel> channels;
};

VehicleState VehicleOf(const SimState& s, int k) {
  return VehicleState{s.bodies[k].pose, s.speed[k], s.steering[k]};
}

}  // namespace

const char* ModeName(Mode mode) {
  switch (mode) {
    case Mode::kRbm2d:
      return "rbm2d";
    case Mode::kRbm3d:
      return "rbm3d";
    case Mode::kVehicle2d:
      return "vehicle2d";
  }
  return "unknown";
}

int ModeDimension(Mode mode) { return mode == Mode::kRbm3d ? 3 : 2; }

int StepCount(double t_end, double dt) {
  const double ratio = t_end / dt;
  const double nearest = std::round(ratio);
  if (std::abs(ratio - nearest) <= 1e-9 * std::max(1.0, ratio)) {
    return static_cast<int>(nearest);
  }
  return static_cast<int>(std::ceil(ratio));
}

void ValidateScenario(const Scenario& scenario) {
  if (!(scenario.dt > 0.0) || !std::isfinite(scenario.dt)) {
    throw ScenarioError("dt must be positive");
  }
  if (!(scenario.t_end > 0.0) || !std::isfinite(scenario.t_end)) {
    throw ScenarioError("t_end must be positive");
  }
  if (scenario.oracle_every < 0) {
    throw ScenarioError("oracle_every must be >= 0");
  }
  if (scenario.bodies.empty()) throw ScenarioError("scenario has no bodies");
  try {
    ValidateControllerParams(scenario.params);
    if (scenario.mode == Mode::kVehicle2d) {
      ValidateVehicleParams(scenario.vehicle);
    }
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(e.what());
  }
  const int d = scenario.dim();
  std::set<int> ids;
  const std::vector<BodySpec> bodies = SortedBodies(scenario);
  bool seen_static = false;
  for (const BodySpec& spec : bodies) {
    const std::string name = "body " + std::to_string(spec.body.id);
    if (!ids.insert(spec.body.id).second) {
      throw ScenarioError("duplicate body id " + std::to_string(spec.body.id));
    }
    if (spec.body.dim() != d) {
      throw ScenarioError(name + ": dimension does not match mode");
    }
    try {
      ValidateBody(spec.body);
    } catch (const std::invalid_argument& e) {
      throw ScenarioError(name + ": " + e.what());
    }
    if (spec.is_static) {
      seen_static = true;
    } else if (seen_static) {
      throw ScenarioError(name +
                          ": static bodies must have the highest ids");
    }
    if (spec.goal) {
      try {
        ValidatePose(*spec.goal);
      } catch (const std::invalid_argument& e) {
        throw ScenarioError(name + " goal: " + e.what());
      }
      if (spec.goal->dim() != d) {
        throw ScenarioError(name + ": goal dimension does not match mode");
      }
    }
    if (scenario.mode == Mode::kVehicle2d && !spec.is_static) {
      if (!spec.path) throw ScenarioError(name + ": vehicle needs a path");
      if (spec.path->point.size() != 2 || spec.path->direction.size() != 2 ||
          std::abs(spec.path->direction.norm() - 1.0) > 1e-9) {
        throw ScenarioError(name + ": path needs a point and unit direction");
      }
      if (!(std::abs(spec.steering) < std::numbers::pi / 2)) {
        throw ScenarioError(name + ": steering must satisfy |phi| < pi/2");
      }
    }
  }
}

std::vector<PairChannel> WarmStart(const Scenario& scenario) {
  ValidateScenario(scenario);
  const std::vector<BodySpec> bodies = SortedBodies(scenario);
  const int n = static_cast<int>(bodies.size());
  std::vector<PairChannel> channels;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (bodies[i].is_static && bodies[j].is_static) continue;
      PairChannel c;
      c.owner = i;
      c.other = j;
      channels.push_back(c);
    }
  }
  const int threads = 1;
  std::vector<std::string> errors(channels.size());
  ParallelFor(static_cast<int>(channels.size()), threads, [&](int k) {
    PairChannel& c = channels[k];
    const ShapedBody& bi = bodies[c.owner].body;
    const ShapedBody& bj = bodies[c.other].body;
    if (MinDistance(bi, bj).overlap) {
      errors[k] = "initial overlap between bodies " +
                  PairName(bodies[c.owner], bodies[c.other]);
      return;
    }
    const MaximizeResult m = MaximizeH(bi, bj);
    c.z = m.z;
    c.last_h = m.h;
    if (c.last_h <= 0.0) {
      errors[k] = "no separating hyperplane found for bodies " +
                  PairName(bodies[c.owner], bodies[c.other]);
      return;
    }
    c.r = Vec::Zero(bi.dim());
    if (scenario.mode == Mode::kVehicle2d) {
      const double k_z = scenario.params.k_z.Value(c.last_h);
      SecondOrderHyperplane zr{c.z, k_z * GradZ(bi, bj, c.z).transpose()};
      // Project through the rate limit exactly as the integrator does.
      c.r = ClampZRate(zr.z, zr.r, scenario.params.z_rate_limit);
    }
  });
  for (const std::string& e : errors) {
    if (!e.empty()) throw ScenarioError(e);
  }
  return channels;
}

TrajectoryLog Run(const Scenario& scenario, const SimulationOptions& options) {
  std::vector<PairChannel> channels = WarmStart(scenario);
  const std::vector<BodySpec> specs = SortedBodies(scenario);
  const int n = static_cast<int>(specs.size());
  const int d = scenario.dim();
  const bool vehicle_mode = scenario.mode == Mode::kVehicle2d;
  const ControllerParams& params = scenario.params;
  const int num_channels = static_cast<int>(channels.size());
  const int steps = StepCount(scenario.t_end, scenario.dt);

  SimState s;
  std::vector<bool> movable(n);
  std::vector<int> movable_index;
  for (int k = 0; k < n; ++k) {
    s.bodies.push_back(specs[k].body);
    s.speed.push_back(specs[k].speed);
    s.steering.push_back(specs[k].steering);
    movable[k] = !specs[k].is_static;
    if (movable[k]) movable_index.push_back(k);
  }
  s.channels = channels;

  TrajectoryLog log;
  log.mode = scenario.mode;
  log.dim = d;
  for (const BodySpec& spec : specs) log.body_ids.push_back(spec.body.id);
  for (const PairChannel& c : channels) {
    log.pair_ids.emplace_back(specs[c.owner].body.id, specs[c.other].body.id);
  }
  log.steps.reserve(steps + 1);

  RunSummary& summary = log.summary;
  summary.min_h = std::numeric_limits<double>::infinity();
  summary.min_margin = std::numeric_limits<double>::infinity();
  std::vector<double> qp_times;

  const int threads = std::max(1, options.threads);

  // Per-step scratch.
  std::vector<PairData> pair_data(num_channels);
  std::vector<VehiclePairTerms> vehicle_terms(vehicle_mode ? num_channels : 0);
  std::vector<Eigen::VectorXd> solutions(n);
  std::vector<BodyQp> qps(n);
  std::vector<QpSolution> qp_solutions(n);
  std::vector<double> qp_ms(n, 0.0);

  for (int step = 0; step <= steps; ++step) {
    StepRecord rec;
    rec.t = step * scenario.dt;

    // Shared snapshot: every pair quantity from the same states.
    ParallelFor(num_channels, threads, [&](int c) {
      const PairChannel& ch = s.channels[c];
      const ShapedBody& bi = s.bodies[ch.owner];
      const ShapedBody& bj = s.bodies[ch.other];
      PairData& data = pair_data[c];
      if (vehicle_mode) {
        const SecondOrderHyperplane zr{ch.z, ch.r};
        vehicle_terms[c] =
            AnalyzeVehiclePair(bi.shape, VehicleOf(s, ch.owner), bj.shape,
                               VehicleOf(s, ch.other), zr, scenario.vehicle);
        data.coeffs = vehicle_terms[c].coeffs;
        data.h = vehicle_terms[c].h;
        data.u_z_nominal = NominalHyperplaneInput(
            vehicle_terms[c], zr, params.k_z.Value(data.h),
            params.z_rate_limit);
      } else {
        data.coeffs = Coefficients(bi, bj, ch.z);
        data.h = SignedDistance(bi, bj, ch.z);
        data.u_z_nominal =
            params.k_z.Value(data.h) * data.coeffs.mu.transpose();
      }
    });

    // Each movable body solves its own QP from the snapshot.
    std::vector<std::string> failures(n);
    ParallelFor(static_cast<int>(movable_index.size()), threads, [&](int q) {
      const int k = movable_index[q];
      const auto start = std::chrono::steady_clock::now();
      BodyQp& bq = qps[k];
      if (vehicle_mode) {
        const VehicleInput nominal =
            VehicleNominal(VehicleOf(s, k), *specs[k].path, params.cruise_speed);
        bq = BodyQp{};
        std::vector<int> other_channels;
        for (int c = 0; c < num_channels; ++c) {
          if (s.channels[c].owner == k) bq.owned_channels.push_back(c);
          if (s.channels[c].other == k) other_channels.push_back(c);
        }
        const int nv = 2 + 2 * static_cast<int>(bq.owned_channels.size());
        const int m =
            static_cast<int>(bq.owned_channels.size() + other_channels.size());
        QpProblem& qp = bq.problem;
        qp.w = Eigen::VectorXd::Ones(nv);
        qp.w(0) = params.beta_a;
        qp.w(1) = params.beta_steer;
        qp.u_nom = Eigen::VectorXd::Zero(nv);
        qp.u_nom(0) = nominal.u_a;
        qp.u_nom(1) = nominal.u_w;
        qp.a = Eigen::MatrixXd::Zero(m, nv);
        qp.b = Eigen::VectorXd::Zero(m);
        int row = 0;
        for (size_t b = 0; b < bq.owned_channels.size(); ++b) {
          const int c = bq.owned_channels[b];
          qp.u_nom.segment(2 + 2 * b, 2) = pair_data[c].u_z_nominal;
          const double share = movable[s.channels[c].other] ? params.split : 1.0;
          const LinearConstraint lc =
              VehicleOwnerConstraint(vehicle_terms[c], share);
          qp.a.block(row, 0, 1, 2) = lc.a.head(2);
          qp.a.block(row, 2 + 2 * b, 1, 2) = lc.a.tail(2);
          qp.b(row) = lc.b;
          bq.row_channels.push_back(c);
          ++row;
        }
        for (const int c : other_channels) {
          const LinearConstraint lc = VehicleOtherConstraint(vehicle_terms[c]);
          qp.a.block(row, 0, 1, 2) = lc.a;
          qp.b(row) = lc.b;
          bq.row_channels.push_back(c);
          ++row;
        }
      } else {
        BodyVelocity nominal = BodyVelocity::Zero(d);
        if (specs[k].goal) {
          nominal = NominalPoseInput(s.bodies[k], *specs[k].goal, params.k_v,
                                     params.k_omega);
        }
        bq = AssembleBodyQp(k, s.bodies, movable, s.channels, pair_data,
                            nominal, params);
      }
      qp_solutions[k] = SolveQp(bq.problem);
      const auto stop = std::chrono::steady_clock::now();
      qp_ms[k] = std::chrono::duration<double, std::milli>(stop - start).count();
      if (qp_solutions[k].status != QpStatus::kOptimal) {
        const QpSolution& sol = qp_solutions[k];
        std::string what = sol.status == QpStatus::kInfeasible
                               ? "infeasible"
                               : "iteration limit";
        if (sol.most_violated >= 0) {
          const PairChannel& ch = s.channels[bq.row_channels[sol.most_violated]];
          what += ", most violated constraint from pair " +
                  PairName(specs[ch.owner], specs[ch.other]);
        }
        failures[k] = "QP failure for body " +
                      std::to_string(specs[k].body.id) + " at t=" +
                      std::to_string(rec.t) + ": " + what;
      }
    });
    for (const std::string& f : failures) {
      if (!f.empty() && !summary.aborted) {
        summary.aborted = true;
        summary.diagnostic = f;
      }
    }
    if (summary.aborted) break;

    // Applied inputs.
    std::vector<BodyVelocity> velocity(n, BodyVelocity::Zero(d));
    std::vector<VehicleInput> vehicle_input(n);
    std::vector<Vec> channel_input(num_channels, Vec::Zero(d));
    for (const int k : movable_index) {
      const Eigen::VectorXd& u = qp_solutions[k].u_star;
      if (vehicle_mode) {
        vehicle_input[k] = VehicleInput{u(0), u(1)};
        velocity[k] = VehicleBodyVelocity(VehicleOf(s, k), scenario.vehicle);
        for (size_t b = 0; b < qps[k].owned_channels.size(); ++b) {
          channel_input[qps[k].owned_channels[b]] = u.segment(2 + 2 * b, 2);
        }
      } else {
        velocity[k] = BodyInputFromSolution(u, d);
        for (size_t b = 0; b < qps[k].owned_channels.size(); ++b) {
          channel_input[qps[k].owned_channels[b]] =
              ChannelInputFromSolution(u, d, static_cast<int>(b));
        }
      }
      QpStats st;
      st.time_ms = qp_ms[k];
      st.active = static_cast<int>(qp_solutions[k].active_set.size());
      st.iterations = qp_solutions[k].iterations;
      st.kkt_residual = qp_solutions[k].kkt_residual;
      rec.qp.push_back(st);
      qp_times.push_back(qp_ms[k]);
    }

    // Record.
    rec.bodies.resize(n);
    for (int k = 0; k < n; ++k) {
      rec.bodies[k].pose = s.bodies[k].pose;
      rec.bodies[k].velocity = velocity[k];
      rec.bodies[k].speed = s.speed[k];
      rec.bodies[k].steering = s.steering[k];
    }
    const bool audit =
        scenario.oracle_every > 0 && step % scenario.oracle_every == 0;
    rec.pairs.resize(num_channels);
    ParallelFor(num_channels, threads, [&](int c) {
      const PairChannel& ch = s.channels[c];
      PairRecord& pr = rec.pairs[c];
      pr.z = ch.z;
      pr.h = pair_data[c].h;
      if (vehicle_mode) {
        const VehiclePairTerms& t = vehicle_terms[c];
        pr.hdot = t.hdot;
        const VehicleInput& ui = vehicle_input[ch.owner];
        const VehicleInput& uj = vehicle_input[ch.other];
        const double hddot = t.drift + t.owner_input(0) * ui.u_a +
                             t.owner_input(1) * ui.u_w +
                             t.mu_proj.dot(channel_input[c]) +
                             t.other_input(0) * uj.u_a +
                             t.other_input(1) * uj.u_w;
        pr.margin = hddot + 2.0 * t.hdot + t.h;
      } else {
        pr.hdot = HDot(pair_data[c].coeffs, s.bodies[ch.owner],
                       s.bodies[ch.other], ch.z, velocity[ch.owner],
                       velocity[ch.other], channel_input[c]);
        pr.margin = pr.hdot + params.gamma * pr.h;
      }
      if (audit) {
        pr.w_star = MinDistance(s.bodies[ch.owner], s.bodies[ch.other]).distance;
        pr.audited = true;
      }
    });
    for (const PairRecord& pr : rec.pairs) {
      summary.min_h = std::min(summary.min_h, pr.h);
      summary.min_margin = std::min(summary.min_margin, pr.margin);
      if (pr.h < -kSafetySlack) summary.safety_violated = true;
      if (pr.audited) {
        const double diff = pr.h - pr.w_star;
        summary.max_h_minus_wstar =
            std::max(summary.max_h_minus_wstar.value_or(-HUGE_VAL), diff);
        summary.max_abs_h_minus_wstar =
            std::max(summary.max_abs_h_minus_wstar, std::abs(diff));
      }
    }
    log.steps.push_back(std::move(rec));
    if (step == steps) break;

    // Integrate all states with the inputs computed from the snapshot.
    try {
      for (const int k : movable_index) {
        double drift = 0.0;
        if (vehicle_mode) {
          const VehicleState next =
              VehicleStep(VehicleOf(s, k), scenario.vehicle,
                          vehicle_input[k].u_a, vehicle_input[k].u_w,
                          scenario.dt, &drift);
          s.bodies[k].pose = next.pose;
          s.speed[k] = next.speed;
          s.steering[k] = next.steering;
        } else {
          s.bodies[k].pose =
              RbmStep(s.bodies[k].pose, velocity[k], scenario.dt, &drift);
        }
        summary.max_rotation_drift = std::max(summary.max_rotation_drift, drift);
      }
    } catch (const InvalidState& e) {
      summary.aborted = true;
      summary.diagnostic = std::string("invalid vehicle state: ") + e.what();
      break;
    }
    for (int c = 0; c < num_channels; ++c) {
      PairChannel& ch = s.channels[c];
      if (vehicle_mode) {
        const SecondOrderHyperplane next =
            ZrStep({ch.z, ch.r}, channel_input[c], scenario.dt,
                   params.z_rate_limit);
        ch.z = next.z;
        ch.r = next.r;
      } else {
        ch.z = ZStep(ch.z, channel_input[c], scenario.dt);
      }
      summary.max_z_norm_error =
          std::max(summary.max_z_norm_error, std::abs(ch.z.norm() - 1.0));
    }
  }

  if (num_channels == 0) {
    summary.min_h = std::numeric_limits<double>::infinity();
    summary.min_margin = std::numeric_limits<double>::infinity();
  }
  summary.qp_time_median_ms = Median(qp_times);
  for (int k = 0; k < n; ++k) {
    double err = 0.0;
    if (vehicle_mode) {
      if (specs[k].path) err = std::abs(LateralError(s.bodies[k].pose, *specs[k].path));
    } else if (specs[k].goal) {
      err = (s.bodies[k].pose.p - specs[k].goal->p).norm();
    }
    summary.goal_errors.push_back(err);
  }
  return log;
}

}  // namespace eshield
