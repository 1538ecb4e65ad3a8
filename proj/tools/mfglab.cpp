// mfglab: command-line front end over the C API.
//
// Exit codes: 0 success, 2 input/validation error, 3 non-convergence,
// 4 condition failure (e.g. a study requires contraction that does not hold).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "mfglab.h"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CLI::ValidationError("input", "cannot open file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& dir, const std::string& name, const char* text) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const fs::path p = fs::path(dir) / name;
  std::ofstream out(p, std::ios::binary);
  if (!out) throw CLI::ValidationError("output", "cannot write file: " + p.string());
  out << text;
  std::cerr << "wrote " << p.string() << "\n";
}

// Releases a C-API string on scope exit.
struct CStr {
  char* s = nullptr;
  ~CStr() { mfg_string_free(s); }
};

struct InstanceHandle {
  mfg_instance* h = nullptr;
  ~InstanceHandle() { mfg_instance_free(h); }
};

struct ProfileHandle {
  mfg_profile* h = nullptr;
  ~ProfileHandle() { mfg_profile_free(h); }
};

[[noreturn]] void fail(int status) {
  std::cerr << "error: " << mfg_last_error() << "\n";
  std::exit(status == MFG_ERR_INTERNAL ? MFG_ERR_CONDITION : status);
}

void check(int status) {
  if (status != MFG_OK) fail(status);
}

void load_instance(const std::string& path, InstanceHandle& out) {
  check(mfg_instance_from_json(read_file(path).c_str(), &out.h));
}

void load_profile_or_instance(const std::string& profile_path, const std::string& instance_path,
                              ProfileHandle& out) {
  if (!profile_path.empty()) {
    check(mfg_profile_from_json(read_file(profile_path).c_str(), &out.h));
    return;
  }
  InstanceHandle inst;
  load_instance(instance_path, inst);
  check(mfg_profile_from_instance(inst.h, &out.h));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"regularized mean-field-game solver and contraction analyzer"};
  app.require_subcommand(1);

  std::string profile_path, instance_path, instance_b_path, out_dir = ".";
  int T = 10, t_min = 5, t_max = 100, t_step = 5, t_ref = 0, t_probe = 1, max_iter = 100000;
  double tol = 1e-9, lambda = 0.0;
  std::string norm = "max-tv";

  auto add_out = [&](CLI::App* cmd) {
    cmd->add_option("--out", out_dir, "output directory")->capture_default_str();
  };

  CLI::App* analyze = app.add_subcommand(
      "analyze", "contraction report (radii, bounds, condition checks) over a horizon range");
  analyze->add_option("--profile", profile_path, "Lipschitz-profile JSON");
  analyze->add_option("--instance", instance_path, "game-instance JSON");
  analyze->add_option("--tmin", t_min)->capture_default_str();
  analyze->add_option("--tmax", t_max)->capture_default_str();
  analyze->add_option("--step", t_step)->capture_default_str();
  add_out(analyze);

  CLI::App* spectrum =
      app.add_subcommand("spectrum", "rho(A_T) sweep with closed-form bounds alongside");
  spectrum->add_option("--profile", profile_path, "Lipschitz-profile JSON");
  spectrum->add_option("--instance", instance_path, "game-instance JSON");
  spectrum->add_option("--tmin", t_min)->capture_default_str();
  spectrum->add_option("--tmax", t_max)->capture_default_str();
  spectrum->add_option("--step", t_step)->capture_default_str();
  add_out(spectrum);

  CLI::App* solve_fin = app.add_subcommand("solve-finite", "finite-horizon equilibrium");
  solve_fin->add_option("--instance", instance_path)->required();
  solve_fin->add_option("--T", T)->capture_default_str();
  solve_fin->add_option("--tol", tol)->capture_default_str();
  solve_fin->add_option("--max-iter", max_iter)->capture_default_str();
  solve_fin->add_option("--lambda", lambda, "averaging weight in [0,1)")->capture_default_str();
  solve_fin->add_option("--norm", norm, "max-tv | perron-weighted")->capture_default_str();
  add_out(solve_fin);

  CLI::App* solve_stat = app.add_subcommand("solve-stationary", "stationary equilibrium");
  solve_stat->add_option("--instance", instance_path)->required();
  solve_stat->add_option("--tol", tol)->capture_default_str();
  solve_stat->add_option("--max-iter", max_iter)->capture_default_str();
  add_out(solve_stat);

  CLI::App* hstudy =
      app.add_subcommand("horizon-study", "truncation error decay at a fixed probe time");
  hstudy->add_option("--instance", instance_path)->required();
  hstudy->add_option("--t-probe", t_probe)->capture_default_str();
  hstudy->add_option("--tmin", t_min)->capture_default_str();
  hstudy->add_option("--tmax", t_max)->capture_default_str();
  hstudy->add_option("--step", t_step)->capture_default_str();
  hstudy->add_option("--T-ref", t_ref, "reference horizon (default 1.5*tmax + 20)");
  hstudy->add_option("--tol", tol)->capture_default_str();
  add_out(hstudy);

  CLI::App* sstudy =
      app.add_subcommand("stationary-study", "stationary vs long-horizon truncation gaps");
  sstudy->add_option("--instance", instance_path)->required();
  sstudy->add_option("--T-ref", t_ref, "reference horizon")->required();
  sstudy->add_option("--tol", tol)->capture_default_str();
  add_out(sstudy);

  CLI::App* pstudy =
      app.add_subcommand("perturb-study", "equilibrium sensitivity to a model perturbation");
  pstudy->add_option("--instance", instance_path, "baseline instance")->required();
  pstudy->add_option("--instance-b", instance_b_path, "perturbed instance")->required();
  pstudy->add_option("--T", T)->capture_default_str();
  pstudy->add_option("--tol", tol)->capture_default_str();
  add_out(pstudy);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : MFG_ERR_INPUT;
  }

  try {
    if (*analyze || *spectrum) {
      if (profile_path.empty() && instance_path.empty()) {
        std::cerr << "error: need --profile or --instance\n";
        return MFG_ERR_INPUT;
      }
      ProfileHandle prof;
      load_profile_or_instance(profile_path, instance_path, prof);
      CStr json, csv;
      if (*analyze) {
        std::vector<int> ts;
        for (int h = t_min; h <= t_max; h += t_step) ts.push_back(h);
        check(mfg_contraction_report(prof.h, ts.data(), static_cast<int>(ts.size()), &json.s,
                                     &csv.s));
        write_file(out_dir, "report.json", json.s);
        write_file(out_dir, "report.csv", csv.s);
      } else {
        check(mfg_spectrum_sweep(prof.h, t_min, t_max, t_step, &json.s, &csv.s));
        write_file(out_dir, "spectrum.json", json.s);
        write_file(out_dir, "spectrum.csv", csv.s);
      }
      return 0;
    }

    if (*solve_fin) {
      if (norm != "max-tv" && norm != "perron-weighted") {
        std::cerr << "error: --norm must be max-tv or perron-weighted\n";
        return MFG_ERR_INPUT;
      }
      InstanceHandle inst;
      load_instance(instance_path, inst);
      CStr json;
      check(mfg_solve_finite(inst.h, T, tol, max_iter, lambda, norm == "max-tv" ? 0 : 1,
                             &json.s));
      write_file(out_dir, "solution.json", json.s);
      return 0;
    }

    if (*solve_stat) {
      InstanceHandle inst;
      load_instance(instance_path, inst);
      CStr json;
      check(mfg_solve_stationary(inst.h, tol, max_iter, &json.s));
      write_file(out_dir, "solution.json", json.s);
      return 0;
    }

    if (*hstudy) {
      InstanceHandle inst;
      load_instance(instance_path, inst);
      if (t_ref <= 0) t_ref = (3 * t_max) / 2 + 20;
      CStr json, csv;
      check(mfg_horizon_study(inst.h, t_probe, t_min, t_max, t_step, t_ref, tol, &json.s,
                              &csv.s));
      write_file(out_dir, "horizon_study.json", json.s);
      write_file(out_dir, "horizon_study.csv", csv.s);
      return 0;
    }

    if (*sstudy) {
      InstanceHandle inst;
      load_instance(instance_path, inst);
      CStr json, csv;
      check(mfg_stationary_study(inst.h, t_ref, tol, &json.s, &csv.s));
      write_file(out_dir, "stationary_study.json", json.s);
      write_file(out_dir, "stationary_study.csv", csv.s);
      return 0;
    }

    if (*pstudy) {
      InstanceHandle a, b;
      load_instance(instance_path, a);
      load_instance(instance_b_path, b);
      CStr json, csv;
      check(mfg_perturb_study(a.h, b.h, T, tol, &json.s, &csv.s));
      write_file(out_dir, "perturb_study.json", json.s);
      write_file(out_dir, "perturb_study.csv", csv.s);
      return 0;
    }
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return MFG_ERR_INPUT;
  }
  return MFG_ERR_INPUT;
}
