#include <CLI11.hpp>

#include <atomic>
#include <cmath>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "phasetori/continuation.hpp"
#include "phasetori/fold.hpp"
#include "phasetori/io.hpp"

namespace pt = phasetori;

namespace {

struct CommonOpts {
  std::string config;
  std::string pattern;
  std::optional<double> omega, alpha2, alpha4, k_minus, k_plus, r0;
  std::optional<double> alpha, beta, r, delta;
  std::optional<int> ntst, ncol;

  pt::Config cfg;
  void load() {
    if (!config.empty()) cfg = pt::parse_config(config);
  }
  double pick(const std::optional<double>& flag, const char* key, double fb) const {
    return flag ? *flag : pt::cfg_double(cfg, key, fb);
  }
  pt::NetworkParams net() const {
    pt::NetworkParams p;
    p.omega = pick(omega, "omega", p.omega);
    p.alpha2 = pick(alpha2, "alpha2", p.alpha2);
    p.alpha4 = pick(alpha4, "alpha4", p.alpha4);
    p.k_minus = pick(k_minus, "k_minus", p.k_minus);
    p.k_plus = pick(k_plus, "k_plus", p.k_plus);
    p.r0 = pick(r0, "r0", p.r0);
    p.validate();
    return p;
  }
  pt::PerturbParams pert() const {
    pt::PerturbParams q;
    q.alpha = pick(alpha, "alpha", q.alpha);
    q.beta = pick(beta, "beta", q.beta);
    q.r = pick(r, "r", q.r);
    q.delta = pick(delta, "delta", q.delta);
    q.validate();
    return q;
  }
  std::string pattern_word() const {
    return pattern.empty() ? pt::cfg_str(cfg, "pattern", "SDD") : pattern;
  }
  pt::CollocationScheme scheme(int dim) const {
    const int nt = ntst ? *ntst : pt::cfg_int(cfg, "ntst", 50);
    const int nc = ncol ? *ncol : pt::cfg_int(cfg, "ncol", 4);
    return pt::CollocationScheme::make(nt, nc, dim);
  }
  pt::ContinuationSettings cont_settings() const {
    pt::ContinuationSettings s;
    s.ds0 = pt::cfg_double(cfg, "ds0", s.ds0);
    s.dsmin = pt::cfg_double(cfg, "dsmin", s.dsmin);
    s.dsmax = pt::cfg_double(cfg, "dsmax", s.dsmax);
    s.max_steps = pt::cfg_int(cfg, "max_steps", s.max_steps);
    s.lambda_min = pt::cfg_double(cfg, "lambda_min", s.lambda_min);
    s.lambda_max = pt::cfg_double(cfg, "lambda_max", s.lambda_max);
    s.T_max = pt::cfg_double(cfg, "T_max", s.T_max);
    s.newton_tol = pt::cfg_double(cfg, "newton_tol", s.newton_tol);
    s.localization_tol = pt::cfg_double(cfg, "localization_tol", s.localization_tol);
    s.eps_switch = pt::cfg_double(cfg, "eps_switch", s.eps_switch);
    s.initial_direction = pt::cfg_int(cfg, "initial_direction", s.initial_direction);
    s.detect_events = pt::cfg_int(cfg, "detect_events", 1) != 0;
    return s;
  }
};

void add_common(CLI::App* sub, CommonOpts& c) {
  sub->add_option("--config", c.config, "key = value config file; flags override");
  sub->add_option("--pattern", c.pattern, "synchrony pattern word, e.g. SDD or SSD");
  sub->add_option("--omega", c.omega);
  sub->add_option("--alpha2", c.alpha2);
  sub->add_option("--alpha4", c.alpha4);
  sub->add_option("--k-minus", c.k_minus);
  sub->add_option("--k-plus", c.k_plus);
  sub->add_option("--r0", c.r0);
  sub->add_option("--alpha", c.alpha);
  sub->add_option("--beta", c.beta);
  sub->add_option("--r", c.r);
  sub->add_option("--delta", c.delta);
  sub->add_option("--ntst", c.ntst);
  sub->add_option("--ncol", c.ncol);
}

std::vector<pt::ReducedFixedPoint> fixed_points_for(const std::string& word,
                                                    const pt::PerturbParams& q) {
  if (word == "SDD") return pt::sdd_fixed_points(q);
  if (word == "SSD") return pt::ssd_fixed_points(q);
  throw std::invalid_argument("seeding is implemented for SDD and SSD patterns, got " + word);
}

pt::ReducedFixedPoint nearest_fp(const std::vector<pt::ReducedFixedPoint>& fps, double angle) {
  if (fps.empty()) throw std::invalid_argument("no reduced fixed points for this pattern");
  const auto dist = [&](double a) {
    double d = std::fmod(std::abs(a - angle), 2 * pt::pi);
    return std::min(d, 2 * pt::pi - d);
  };
  const pt::ReducedFixedPoint* best = &fps[0];
  for (const auto& fp : fps)
    if (dist(fp.angle) < dist(best->angle)) best = &fp;
  return *best;
}

double coeff_discrepancy(const pt::FourierMap& a, const pt::FourierMap& b) {
  double worst = 0.0;
  for (const auto& [l, v] : a.coeffs()) worst = std::max(worst, (v - b.coeff(l)).norm());
  for (const auto& [l, v] : b.coeffs()) worst = std::max(worst, (v - a.coeff(l)).norm());
  return worst;
}

pt::OrbitSegment corrected_seed(const pt::CollocationScheme& scheme, const pt::ReducedSystem& sys,
                                const pt::FirstOrderSolution& sol, const pt::ReducedFixedPoint& fp,
                                double delta, double r) {
  const auto seed = pt::build_seed_orbit(sol, fp, delta, scheme.nnode());
  pt::OrbitSegment s0 = pt::seed_segment(scheme, seed, delta, r);
  return pt::newton_correct(scheme, sys, s0, s0.u);
}

int cmd_frame(const CommonOpts& c, const std::string& json_out) {
  const auto p = c.net();
  const auto pat = pt::PatternSpec::from_word(c.pattern_word(), p);
  const auto fr = pt::build_frame(pat, p);
  const Eigen::IOFormat fmt(10, 0, ", ", "\n  ", "[", "]");
  std::cout << "pattern " << pat.word << "\nbase point  " << pat.base_point.transpose() << '\n'
            << "Omega       " << fr.Omega.transpose() << '\n'
            << "L =\n  " << fr.L.format(fmt) << '\n'
            << "R " << fr.R.rows() << "x" << fr.R.cols() << ", N " << fr.N.rows() << "x"
            << fr.N.cols() << '\n';
  const Eigen::VectorXcd ev = Eigen::EigenSolver<pt::Mat>(fr.L).eigenvalues();
  double maxre = -1e300;
  for (int i = 0; i < ev.size(); ++i) maxre = std::max(maxre, std::abs(ev[i].real()));
  std::cout << "normally hyperbolic: yes (min |Re eig L| = "
            << ev.real().cwiseAbs().minCoeff() << ")\n";
  if (!json_out.empty()) {
    nlohmann::json j;
    j["pattern"] = pat.word;
    j["base_point"] = std::vector<double>(pat.base_point.data(),
                                          pat.base_point.data() + pat.base_point.size());
    j["Omega"] = std::vector<double>(fr.Omega.data(), fr.Omega.data() + fr.Omega.size());
    for (int i = 0; i < fr.L.rows(); ++i)
      j["L"].push_back(std::vector<double>(fr.L.row(i).begin(), fr.L.row(i).end()));
    pt::write_text_atomic(json_out, j.dump(2) + "\n");
  }
  return 0;
}

int cmd_normalform(const CommonOpts& c, const std::string& outdir) {
  const auto p = c.net();
  auto q = c.pert();
  const auto pat = pt::PatternSpec::from_word(c.pattern_word(), p);
  const auto sol = pt::solve_first_order(pat, p, q);
  std::cout << "f1 modes " << sol.f1.coeffs().size() << ", X1 modes " << sol.X1.coeffs().size()
            << ", Y1 modes " << sol.Y1.coeffs().size() << '\n';
  if (pat.word == "SDD" || pat.word == "SSD") {
    const auto cf = pt::closed_form_solution(pat, p, q);
    std::cout << "closed-form discrepancy: f1 " << coeff_discrepancy(sol.f1, cf.f1) << ", X1 "
              << coeff_discrepancy(sol.X1, cf.X1) << ", Y1 " << coeff_discrepancy(sol.Y1, cf.Y1)
              << '\n';
  }
  pt::write_text_atomic(outdir + "/f1.json", sol.f1.to_json().dump(2) + "\n");
  nlohmann::json e1 = {{"X1", sol.X1.to_json()}, {"Y1", sol.Y1.to_json()}};
  pt::write_text_atomic(outdir + "/e1.json", e1.dump(2) + "\n");

  std::ostringstream csv;
  csv << "delta,max_residual\n";
  std::vector<double> phis;
  double prev = 0.0, prev_d = 0.0;
  for (double d : {0.0025, 0.005, 0.01, 0.02, 0.04, 0.08}) {
    double worst = 0.0;
    for (int a = 0; a < 5; ++a)
      for (int b = 0; b < 5; ++b)
        for (int cc = 0; cc < 5; ++cc) {
          pt::Vec phi(3);
          phi << 2 * pt::pi * a / 5.0, 2 * pt::pi * b / 5.0, 2 * pt::pi * cc / 5.0;
          worst = std::max(worst, sol.conjugacy_residual(phi, d));
        }
    csv << pt::format_g17(d) << ',' << pt::format_g17(worst) << '\n';
    if (prev > 0)
      std::cout << "residual ratio " << prev_d << " -> " << d << ": " << worst / prev << '\n';
    prev = worst;
    prev_d = d;
  }
  pt::write_text_atomic(outdir + "/residual_scan.csv", csv.str());
  return 0;
}

int cmd_continue(const CommonOpts& c, std::vector<double> angles, const std::string& free_name,
                 const std::string& out_prefix, std::optional<int> direction, int orbit_stride,
                 int jobs) {
  const auto p = c.net();
  auto q = c.pert();
  const auto pat = pt::PatternSpec::from_word(c.pattern_word(), p);
  const auto sol = pt::solve_first_order(pat, p, q);
  const pt::ReducedSystem sys{p, q};
  const auto scheme = c.scheme(sys.dim());
  const pt::FreeParam free = free_name == "r" ? pt::FreeParam::r : pt::FreeParam::delta;
  auto settings = c.cont_settings();
  if (direction) settings.initial_direction = *direction;
  pt::MeasureSpec ms;
  if (pat.word == "SSD") ms = {1, -1};

  if (angles.empty()) {
    for (const auto& fp : fixed_points_for(pat.word, q))
      if (fp.stability != pt::Stability::neutral) angles.push_back(fp.angle);
  }
  const auto fps = fixed_points_for(pat.word, q);

  std::mutex mtx;
  std::atomic<int> next{0};
  std::vector<std::string> status(angles.size());
  std::vector<std::string> terminations(angles.size());
  auto worker = [&] {
    for (int i; (i = next.fetch_add(1)) < int(angles.size());) {
      try {
        const auto fp = nearest_fp(fps, angles[i]);
        const auto start = corrected_seed(scheme, sys, sol, fp, q.delta, q.r);
        const auto branch = pt::continue_branch(scheme, sys, start, free, ms, settings);
        const std::string stem = out_prefix + "_branch" + std::to_string(i);
        pt::write_branch_csv(stem + ".csv", branch);
        pt::write_events_json(stem + "_events.json", branch);
        pt::write_orbits_json(stem + "_orbits.json", branch, orbit_stride);
        std::lock_guard<std::mutex> lk(mtx);
        terminations[i] = branch.termination;
        std::ostringstream os;
        os << "branch " << i << " (angle " << angles[i] << "): " << branch.points.size()
           << " points, " << branch.events.size() << " events, termination "
           << branch.termination << (branch.closed_loop ? " (closed loop)" : "");
        status[i] = os.str();
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lk(mtx);
        terminations[i] = "error";
        status[i] = "branch " + std::to_string(i) + ": FAILED: " + e.what();
      }
    }
  };
  const int nthread = std::max(1, std::min<int>(jobs, int(angles.size())));
  std::vector<std::thread> pool;
  for (int t = 0; t < nthread; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  int rc = 0;
  for (std::size_t i = 0; i < angles.size(); ++i) {
    std::cout << status[i] << '\n';
    const auto& t = terminations[i];
    if (t != "range" && t != "closed" && t != "homoclinic") rc = 3;
  }
  return rc;
}

int cmd_fold_continue(const CommonOpts& c, const std::string& events_path, int event_index,
                      const std::string& out_path, double delta_min, double delta_max) {
  const auto p = c.net();
  auto q = c.pert();
  const pt::ReducedSystem sys{p, q};
  const auto scheme = c.scheme(sys.dim());
  const auto sn = pt::read_event_orbit(events_path, "SN", event_index);
  std::cout << "seed fold at delta " << sn.delta << ", r " << sn.r << '\n';
  pt::FoldSettings fs;
  fs.delta_min = delta_min;
  fs.delta_max = delta_max;
  const auto curve = pt::continue_fold(scheme, sys, sn, fs);
  pt::write_fold_csv(out_path, curve);
  std::cout << "fold curve: " << curve.points.size() << " points, termination "
            << curve.termination << ", cusps " << curve.cusp_indices.size() << '\n';
  std::vector<double> ld, lr;
  for (const auto& pt_ : curve.points)
    if (pt_.delta > 0 && pt_.r != 0) {  // |r|: the two sheets mirror each other
      ld.push_back(std::log(pt_.delta));
      lr.push_back(std::log(std::abs(pt_.r)));
    }
  if (ld.size() >= 3) {
    const double n = double(ld.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < ld.size(); ++i) {
      sx += ld[i];
      sy += lr[i];
      sxx += ld[i] * ld[i];
      sxy += ld[i] * lr[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    std::cout << "exponent fit (log r vs log delta): " << slope << '\n';
  }
  return curve.termination == "range" ? 0 : 3;
}

int cmd_orbit_dump(const CommonOpts& c, const std::string& orbits_path, int id, bool raw_seed,
                   const std::string& out_path) {
  const auto p = c.net();
  auto q = c.pert();
  const pt::ReducedSystem sys{p, q};
  const auto scheme = c.scheme(sys.dim());
  pt::OrbitSegment orbit;
  if (raw_seed) {
    const auto pat = pt::PatternSpec::from_word(c.pattern_word(), p);
    const auto sol = pt::solve_first_order(pat, p, q);
    const auto fps = fixed_points_for(pat.word, q);
    const auto fp = nearest_fp(fps, pt::cfg_double(c.cfg, "seed_angle", fps.front().angle));
    const auto seed = pt::build_seed_orbit(sol, fp, 0.0, scheme.nnode());
    orbit = pt::seed_segment(scheme, seed, 0.0, q.r);
  } else {
    orbit = pt::read_orbit_json(orbits_path, id);
  }
  std::ostringstream out;
  out << "t";
  const int nfull = sys.dim() + 1;
  for (int i = 0; i < nfull; ++i) out << ",theta" << i + 1;
  for (int i = 0; i < nfull; ++i) out << ",dev" << i + 1;
  out << '\n';
  for (int i = 0; i < scheme.nnode(); ++i) {
    const pt::Vec th = sys.lift(orbit.u.segment(i * sys.dim(), sys.dim()));
    out << pt::format_g17(scheme.tnodes[i]);
    for (int j = 0; j < nfull; ++j) out << ',' << pt::format_g17(th[j]);
    for (int j = 0; j < nfull; ++j) {
      double w = std::fmod(th[j], 2 * pt::pi);
      if (w < 0) w += 2 * pt::pi;
      out << ',' << pt::format_g17(std::abs(w - pt::pi));
    }
    out << '\n';
  }
  pt::write_text_atomic(out_path, out.str());
  std::cout << "orbit: period " << orbit.period << ", delta " << orbit.delta << ", r " << orbit.r
            << ", windings " << orbit.windings.transpose() << '\n';
  return 0;
}

int cmd_residual_scan(const CommonOpts& c, double dmin, double dmax, int count,
                      const std::string& out_path) {
  const auto p = c.net();
  auto q = c.pert();
  const auto pat = pt::PatternSpec::from_word(c.pattern_word(), p);
  const auto sol = pt::solve_first_order(pat, p, q);
  std::ostringstream csv;
  csv << "delta,max_residual\n";
  std::vector<double> ld, lr;
  for (int s = 0; s < count; ++s) {
    const double d = dmin * std::pow(dmax / dmin, count == 1 ? 0.0 : double(s) / (count - 1));
    double worst = 0.0;
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 6; ++b)
        for (int cc = 0; cc < 6; ++cc) {
          pt::Vec phi(3);
          phi << 2 * pt::pi * a / 6.0, 2 * pt::pi * b / 6.0, 2 * pt::pi * cc / 6.0;
          worst = std::max(worst, sol.conjugacy_residual(phi, d));
        }
    csv << pt::format_g17(d) << ',' << pt::format_g17(worst) << '\n';
    ld.push_back(std::log(d));
    lr.push_back(std::log(worst));
  }
  if (!out_path.empty()) pt::write_text_atomic(out_path, csv.str());
  else std::cout << csv.str();
  if (count >= 2) {
    const double n = double(count);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < count; ++i) {
      sx += ld[i];
      sy += lr[i];
      sxx += ld[i] * ld[i];
      sxy += ld[i] * lr[i];
    }
    std::cout << "residual scaling exponent: " << (n * sxy - sx * sy) / (n * sxx - sx * sx)
              << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"perturbed-torus parametrization and periodic-orbit continuation"};
  app.require_subcommand(1);

  CommonOpts c_frame, c_nf, c_cont, c_fold, c_dump, c_scan;

  auto* s_frame = app.add_subcommand("frame", "symmetry frame of a pattern");
  add_common(s_frame, c_frame);
  std::string frame_json;
  s_frame->add_option("--json", frame_json, "write frame.json here");

  auto* s_nf = app.add_subcommand("normalform", "first-order torus data and residual scan");
  add_common(s_nf, c_nf);
  std::string nf_outdir = ".";
  s_nf->add_option("--outdir", nf_outdir);

  auto* s_cont = app.add_subcommand("continue", "pseudo-arclength branch continuation");
  add_common(s_cont, c_cont);
  std::vector<double> angles;
  std::string free_name = "delta", out_prefix = "run";
  std::optional<int> direction;
  int orbit_stride = 10, jobs = int(std::thread::hardware_concurrency());
  s_cont->add_option("--angle", angles, "seed fixed-point angles (default: all hyperbolic)");
  s_cont->add_option("--free", free_name)->check(CLI::IsMember({"delta", "r"}));
  s_cont->add_option("--out", out_prefix);
  s_cont->add_option("--direction", direction)->check(CLI::IsMember({-1, 1}));
  s_cont->add_option("--orbit-stride", orbit_stride);
  s_cont->add_option("--jobs", jobs);

  auto* s_fold = app.add_subcommand("fold-continue", "two-parameter saddle-node curve");
  add_common(s_fold, c_fold);
  std::string events_path, fold_out = "fold.csv";
  int event_index = 0;
  double fold_dmin = 0.002, fold_dmax = 0.08;
  s_fold->add_option("--events", events_path, "events JSON with a localized SN")->required();
  s_fold->add_option("--event-index", event_index);
  s_fold->add_option("--out", fold_out);
  s_fold->add_option("--delta-min", fold_dmin);
  s_fold->add_option("--delta-max", fold_dmax);

  auto* s_dump = app.add_subcommand("orbit-dump", "per-oscillator time series of a stored orbit");
  add_common(s_dump, c_dump);
  std::string orbits_path, dump_out = "orbit.csv";
  int orbit_id = 0;
  bool raw_seed = false;
  s_dump->add_option("--orbits", orbits_path, "orbits JSON from a continue run");
  s_dump->add_option("--id", orbit_id);
  s_dump->add_flag("--seed", raw_seed, "dump the unperturbed seed loop instead");
  s_dump->add_option("--out", dump_out);

  auto* s_scan = app.add_subcommand("residual-scan", "conjugacy residual vs delta");
  add_common(s_scan, c_scan);
  double scan_dmin = 0.0025, scan_dmax = 0.08;
  int scan_count = 6;
  std::string scan_out;
  s_scan->add_option("--delta-min", scan_dmin);
  s_scan->add_option("--delta-max", scan_dmax);
  s_scan->add_option("--count", scan_count);
  s_scan->add_option("--out", scan_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*s_frame) {
      c_frame.load();
      return cmd_frame(c_frame, frame_json);
    }
    if (*s_nf) {
      c_nf.load();
      return cmd_normalform(c_nf, nf_outdir);
    }
    if (*s_cont) {
      c_cont.load();
      return cmd_continue(c_cont, angles, free_name, out_prefix, direction, orbit_stride, jobs);
    }
    if (*s_fold) {
      c_fold.load();
      return cmd_fold_continue(c_fold, events_path, event_index, fold_out, fold_dmin, fold_dmax);
    }
    if (*s_dump) {
      c_dump.load();
      if (!raw_seed && orbits_path.empty()) {
        std::cerr << "orbit-dump: need --orbits or --seed\n";
        return 2;
      }
      return cmd_orbit_dump(c_dump, orbits_path, orbit_id, raw_seed, dump_out);
    }
    if (*s_scan) {
      c_scan.load();
      return cmd_residual_scan(c_scan, scan_dmin, scan_dmax, scan_count, scan_out);
    }
  } catch (const pt::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 4;
  }
  return 2;
}
