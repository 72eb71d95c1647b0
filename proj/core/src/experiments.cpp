#include "magsurf/experiments.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "magsurf/index_form.hpp"

namespace magsurf {

using nlohmann::json;

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

class Csv {
 public:
  Csv(const std::string& path, const std::string& header) : out_(path) {
    if (!out_) throw std::runtime_error("cannot open '" + path + "' for writing");
    out_ << header << "\n";
  }
  void row(const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i)
      out_ << (i ? "," : "") << cells[i];
    out_ << "\n";
  }

 private:
  std::ofstream out_;
};

void write_sidecar(const std::string& path, const RunConfig& cfg,
                   const json& summary) {
  json side;
  side["schema_version"] = cfg.schema_version;
  side["experiment"] = to_string(cfg.experiment);
  side["config_hash"] = config_hash_hex(cfg);
  side["summary"] = summary;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << side.dump(2) << "\n";
}

MagneticSystem stripped_baseline(const MagneticSystem& sys) {
  MagneticSystem base = sys;
  base.chart.clear_bump();
  base.field.clear_bump();
  return base;
}

}  // namespace

RunResult run_experiment(const RunConfig& cfg, const std::string& out_dir,
                         int threads) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const std::string stem =
      (fs::path(out_dir) / to_string(cfg.experiment)).string();
  RunResult res;
  res.csv_path = stem + ".csv";
  res.sidecar_path = stem + ".json";
  json summary;
  std::ostringstream line;

  const MagneticSystem& sys = cfg.sys;
  std::optional<Domain> dom;
  if (cfg.domain) dom.emplace(sys.chart, *cfg.domain);

  switch (cfg.experiment) {
    case ExperimentType::trace: {
      Trajectory traj = integrate(sys, cfg.start, cfg.duration, cfg.ctrl);
      Csv csv(res.csv_path, "t,x,y,vx,vy");
      for (size_t i = 0; i < traj.times().size(); ++i) {
        const auto& p = traj.samples()[i];
        csv.row({fmt(traj.times()[i]), fmt(p.pos.x), fmt(p.pos.y),
                 fmt(p.vel.x), fmt(p.vel.y)});
      }
      summary["duration"] = traj.duration();
      summary["steps"] = traj.times().size() - 1;
      summary["max_step_drift"] = traj.max_step_drift();
      line << "trace: " << traj.times().size() - 1 << " steps, drift "
           << traj.max_step_drift();
      break;
    }
    case ExperimentType::exit_event_: {
      ExitResult ex = exit_event(sys, *dom, cfg.start, cfg.tmax, cfg.ctrl);
      Csv csv(res.csv_path, "l,status,x,y,vx,vy");
      csv.row({fmt(ex.l), to_string(ex.status), fmt(ex.exit.pos.x),
               fmt(ex.exit.pos.y), fmt(ex.exit.vel.x), fmt(ex.exit.vel.y)});
      summary["l"] = ex.l;
      summary["status"] = to_string(ex.status);
      line << "exit: " << to_string(ex.status) << ", l = " << ex.l;
      break;
    }
    case ExperimentType::scatter: {
      auto table = scattering_table(sys, *dom, cfg.grid_boundary,
                                    cfg.grid_angle, cfg.tmax, cfg.ctrl, threads);
      Csv csv(res.csv_path,
              "arclen_in,angle_in,arclen_out,angle_out,l,status");
      int exited = 0;
      for (const auto& r : table) {
        if (r.status == ExitStatus::exited) ++exited;
        csv.row({fmt(r.s_in), fmt(r.theta_in), fmt(r.s_out), fmt(r.theta_out),
                 fmt(r.l), to_string(r.status)});
      }
      summary["records"] = table.size();
      summary["exited"] = exited;
      summary["exit_ratio_sup"] = exit_ratio_sup(table);
      line << "scatter: " << exited << "/" << table.size()
           << " exited, ratio sup " << exit_ratio_sup(table);
      break;
    }
    case ExperimentType::jacobi: {
      Trajectory traj = integrate(sys, cfg.start, cfg.duration, cfg.ctrl);
      JacobiState J = propagate_jacobi(sys, traj, cfg.jacobi_J0, cfg.jacobi_J0p);
      Csv csv(res.csv_path, "t,f1,f2,g1,g2,jp_dot_gamma");
      double worst = 0.0;
      for (size_t i = 0; i < J.times().size(); ++i) {
        const double t = J.times()[i];
        const auto& s = J.samples()[i];
        const double c = J.jprime_dot_gamma(t);
        worst = std::max(worst, std::abs(c));
        csv.row({fmt(t), fmt(s.f[0]), fmt(s.f[1]), fmt(s.f[2]), fmt(s.f[3]),
                 fmt(c)});
      }
      summary["conserved_drift"] = worst;
      line << "jacobi: <J',gamma'> drift " << worst;
      break;
    }
    case ExperimentType::conjugates: {
      auto cp = first_conjugate(sys, cfg.start.pos, cfg.start.vel, cfg.tmax,
                                cfg.ctrl);
      Csv csv(res.csv_path, "t,multiplicity,marginal");
      if (cp)
        csv.row({fmt(cp->t), std::to_string(cp->multiplicity),
                 cp->marginal ? "1" : "0"});
      summary["found"] = bool(cp);
      if (cp) summary["t"] = cp->t;
      if (cp) line << "conjugates: first at t = " << cp->t;
      else line << "conjugates: none in (0, " << cfg.tmax << "]";
      break;
    }
    case ExperimentType::index: {
      Trajectory traj = integrate(sys, cfg.start, cfg.duration, cfg.ctrl);
      GramSummary g = index_gram(sys, traj, cfg.segments, cfg.gauss_pts);
      Csv csv(res.csv_path, "segments,lambda_min,lambda_max,negatives");
      csv.row({std::to_string(g.segments), fmt(g.smallest_eigenvalue),
               fmt(g.largest_eigenvalue), std::to_string(g.negative_count)});
      summary["lambda_min"] = g.smallest_eigenvalue;
      summary["negatives"] = g.negative_count;
      line << "index: lambda_min " << g.smallest_eigenvalue << " ("
           << g.negative_count << " negative)";
      break;
    }
    case ExperimentType::convexity: {
      ConvexityMargin m = convexity_margin(sys, *dom, cfg.convexity_samples);
      Csv csv(res.csv_path, "margin,arclen,x,y,direction");
      csv.row({fmt(m.margin), fmt(m.arclen), fmt(m.point.x), fmt(m.point.y),
               std::to_string(m.direction)});
      summary["margin"] = m.margin;
      line << "convexity: margin " << m.margin;
      break;
    }
    case ExperimentType::simplicity: {
      Verdict vd = simplicity_verdict(sys, *dom, cfg.grid_boundary,
                                      cfg.grid_angle, cfg.ctrl, threads);
      Csv csv(res.csv_path, "verdict,margin,witness");
      csv.row({to_string(vd.kind), fmt(vd.margin), vd.witness});
      summary["verdict"] = to_string(vd.kind);
      summary["margin"] = vd.margin;
      summary["witness"] = vd.witness;
      line << to_string(vd.kind);
      if (!vd.witness.empty()) line << " (" << vd.witness << ")";
      break;
    }
    case ExperimentType::closure: {
      MagneticSystem base = stripped_baseline(sys);
      const bool has_bump = sys.chart.bump() || sys.field.bump();
      CensusReport rep = closure_census(
          sys, *dom, cfg.grid_boundary, cfg.grid_angle, cfg.tmax,
          cfg.strip_bumps_baseline && has_bump ? &base : nullptr, cfg.ctrl,
          threads);
      Csv csv(res.csv_path, "x,y,vx,vy,period,gap,m,status");
      for (const auto& r : rep.records)
        csv.row({fmt(r.initial.pos.x), fmt(r.initial.pos.y),
                 fmt(r.initial.vel.x), fmt(r.initial.vel.y), fmt(r.period),
                 fmt(r.closure_gap), std::to_string(r.pass_count),
                 to_string(r.status)});
      summary["fraction_closed"] = rep.fraction_closed;
      summary["worst_gap"] = rep.worst_gap;
      json hist = json::object();
      for (const auto& [m, n] : rep.m_histogram) hist[std::to_string(m)] = n;
      summary["m_histogram"] = hist;
      if (rep.scatter_sups) {
        summary["scatter_sup_position"] = rep.scatter_sups->position;
        summary["scatter_sup_angle"] = rep.scatter_sups->angle;
        summary["scatter_sup_time"] = rep.scatter_sups->time;
      }
      line << "closure: " << 100.0 * rep.fraction_closed
           << "% closed, worst gap " << rep.worst_gap;
      break;
    }
    case ExperimentType::compare_scatter: {
      MagneticSystem base = stripped_baseline(sys);
      auto ta = scattering_table(sys, *dom, cfg.grid_boundary, cfg.grid_angle,
                                 cfg.tmax, cfg.ctrl, threads);
      auto tb = scattering_table(base, *dom, cfg.grid_boundary, cfg.grid_angle,
                                 cfg.tmax, cfg.ctrl, threads);
      ScatterSups sup = compare_scattering(ta, tb, dom->length());
      Csv csv(res.csv_path, "sup_position,sup_angle,sup_time,status_mismatches");
      csv.row({fmt(sup.position), fmt(sup.angle), fmt(sup.time),
               std::to_string(sup.status_mismatches)});
      summary["sup_position"] = sup.position;
      summary["sup_angle"] = sup.angle;
      summary["sup_time"] = sup.time;
      summary["status_mismatches"] = sup.status_mismatches;
      line << "compare-scatter: sups " << sup.position << " / " << sup.angle
           << " / " << sup.time << ", " << sup.status_mismatches
           << " status mismatches";
      break;
    }
  }

  write_sidecar(res.sidecar_path, cfg, summary);
  res.summary = line.str();
  return res;
}

}  // namespace magsurf
