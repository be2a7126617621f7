// CLI dispatcher: JSON in, JSON report out.  Exit status 0 on pass, 1 when a
// verification item fails, 2 on malformed input.
#pragma once

#include <cstdlib>
#include <iostream>
#include <map>

#include "livsic/examples.hpp"
#include "livsic/json_io.hpp"

namespace livsic::cli {

using io::Json;

struct JobConfig {
  std::string command;
  std::map<std::string, std::string> paths;  // named input files
  double tol = kGoldenTol;
  bool tol_set = false;
  std::vector<Complex> grid;       // empty -> default_grid()
  std::string output_path;
  std::string example;             // for reproduce
  int k_steps = 10;                // for cyclic
  Complex w_point{0.0, 1.0};       // for cyclic
};

namespace detail_cli {

inline double effective_tol(const JobConfig& cfg) {
  if (cfg.tol_set) return cfg.tol;
  if (const char* env = std::getenv("LIVSIC_TOL")) {
    try {
      double t = std::stod(env);
      if (t > 0) return t;
    } catch (...) {
      throw Error("LIVSIC_TOL is not a number: " + std::string(env));
    }
  }
  return cfg.tol;
}

inline const std::string& path_of(const JobConfig& cfg, const std::string& key) {
  auto it = cfg.paths.find(key);
  if (it == cfg.paths.end()) throw Error("missing required input --" + key);
  return it->second;
}

inline std::vector<Complex> grid_of(const JobConfig& cfg) {
  return cfg.grid.empty() ? default_grid() : cfg.grid;
}

inline ExtensionData load_extension(const JobConfig& cfg) {
  Matrix u = io::matrix_from_json(io::load_json(path_of(cfg, "U")));
  Matrix v = io::matrix_from_json(io::load_json(path_of(cfg, "V")));
  PartialIsometrySystem sys = deficiency_data(v, 1e-8);
  return make_extension(u, sys);
}

inline Json item(const std::string& name, bool pass) {
  Json j;
  j["name"] = name;
  j["pass"] = pass;
  return j;
}

inline Json inner_result_json(const InnerResult& f) {
  if (std::holds_alternative<ScalarInner>(f))
    return io::inner_to_json(std::get<ScalarInner>(f));
  Json j;
  j["kind"] = "matrix-valued";
  j["dim"] = std::get<MatrixContractive>(f).dim;
  return j;
}

}  // namespace detail_cli

inline int run(const JobConfig& cfg, std::ostream& out, std::ostream& diag) {
  using namespace detail_cli;
  Json report;
  report["command"] = cfg.command;
  Json items = Json::array();
  bool pass = true;

  try {
    const double tol = effective_tol(cfg);

    if (cfg.command == "livsic") {
      Matrix v = io::matrix_from_json(io::load_json(path_of(cfg, "V")));
      PartialIsometrySystem sys = deficiency_data(v, 1e-8);
      InnerResult theta = livsic_char(sys);
      report["characteristic_function"] = inner_result_json(theta);
      items.push_back(item("livsic characteristic function computed", true));

    } else if (cfg.command == "clark") {
      ExtensionData ext = load_extension(cfg);
      report["clark_measure"] = io::measure_to_json(clark_measure(ext));
      items.push_back(item("clark measure computed", true));

    } else if (cfg.command == "transform-measure") {
      AtomicMatrixMeasure sigma =
          io::measure_from_json(io::load_json(path_of(cfg, "measure")));
      if (sigma.domain == MeasureDomain::circle) {
        HerglotzData hd = measure_transform(sigma);
        report["P"] = io::matrix_to_json(hd.p);
        report["measure"] = io::measure_to_json(hd.measure);
      } else {
        HerglotzData hd;
        hd.p = Matrix::Zero(sigma.dim, sigma.dim);
        hd.measure = sigma;
        report["measure"] = io::measure_to_json(measure_transform_inverse(hd));
      }
      items.push_back(item("measure transformed", true));

    } else if (cfg.command == "ext-char") {
      ExtensionData ext = load_extension(cfg);
      report["characteristic_function"] = inner_result_json(ext_char(ext));
      items.push_back(item("extension characteristic function computed", true));

    } else if (cfg.command == "divides") {
      ScalarInner theta = io::inner_from_json(io::load_json(path_of(cfg, "theta")));
      ScalarInner phi = io::inner_from_json(io::load_json(path_of(cfg, "phi")));
      bool result = divides(theta, phi, tol);
      report["divides"] = result;
      items.push_back(item("divisibility query answered", true));

    } else if (cfg.command == "frostman") {
      ScalarInner theta = io::inner_from_json(io::load_json(path_of(cfg, "theta")));
      MatrixContractive shifted = frostman_shift(as_matrix(theta));
      ScalarInner recovered = recover_scalar_inner(
          [&shifted](Complex z) { return shifted.eval(z)(0, 0); },
          int(theta.zeros.size()));
      report["shifted"] = io::inner_to_json(recovered);
      bool vanishes = std::abs(shifted.eval(kI)(0, 0)) <= 1e-10;
      items.push_back(item("shifted function vanishes at i", vanishes));
      pass = pass && vanishes;

    } else if (cfg.command == "ac-check") {
      Matrix v = io::matrix_from_json(io::load_json(path_of(cfg, "V")));
      Matrix uparam = io::matrix_from_json(io::load_json(path_of(cfg, "uparam")));
      PartialIsometrySystem sys = deficiency_data(v, 1e-8);
      bool ok = ac_check(sys, default_frame(sys), uparam, grid_of(cfg),
                         cfg.tol_set ? tol : kGridTol);
      report["ac_check"] = ok;
      items.push_back(item("Phi of canonical extension coincides with rotated "
                           "Livsic function", ok));
      pass = pass && ok;

    } else if (cfg.command == "kernels") {
      ExtensionData ext = load_extension(cfg);
      std::vector<Complex> pts = grid_of(cfg);
      if (cfg.paths.count("points"))
        pts = io::grid_from_json(io::load_json(path_of(cfg, "points")));
      std::vector<Vector> dirs;
      std::vector<Complex> used;
      for (Complex z : pts) {
        if (std::abs(z.imag()) < 1e-9) continue;
        used.push_back(z);
        Vector e = Vector::Zero(ext.index());
        e(Eigen::Index(used.size()) % ext.index()) = 1.0;
        dirs.push_back(e);
      }
      auto check = [&](const std::string& name, auto kernel) {
        KernelGram gram = kernel_gram(kernel, used, dirs);
        auto psd = psd_check(Matrix((gram.gram + gram.gram.adjoint()) / 2.0), 1e-9);
        Json j = item(name + " Gram is PSD", psd.psd);
        j["min_eigenvalue"] = psd.min_eigenvalue;
        items.push_back(j);
        pass = pass && psd.psd;
      };
      check("small kernel", [&](Complex w, Complex z) { return small_kernel(ext, w, z); });
      check("big kernel", [&](Complex w, Complex z) { return big_kernel(ext, w, z); });
      check("difference kernel", [&](Complex w, Complex z) {
        return Matrix(big_kernel(ext, w, z) - small_kernel(ext, w, z));
      });

    } else if (cfg.command == "cyclic") {
      ExtensionData ext = load_extension(cfg);
      Matrix h_mat = io::matrix_from_json(io::load_json(path_of(cfg, "h-vec")));
      Vector h = h_mat.cols() == 1 ? Vector(h_mat.col(0))
                                   : Vector(h_mat.transpose().col(0));
      CyclicExpansion exp = cyclic_expansion(ext, h, cfg.w_point, cfg.k_steps);
      Json residuals = Json::array(), tails = Json::array();
      double worst = 0.0;
      for (double r : exp.identity_residuals) {
        residuals.push_back(r);
        worst = std::max(worst, r);
      }
      for (double t : exp.tail_norms) tails.push_back(t);
      report["identity_residuals"] = residuals;
      report["tail_norms"] = tails;
      bool ok = worst <= std::max(tol, 1e-10);
      Json j = item("expansion identity holds at every k", ok);
      j["max_residual"] = worst;
      items.push_back(j);
      pass = pass && ok;

    } else if (cfg.command == "synthesize") {
      ScalarInner theta = io::inner_from_json(io::load_json(path_of(cfg, "theta")));
      ScalarInner phi = io::inner_from_json(io::load_json(path_of(cfg, "phi")));
      SynthesisResult syn = synthesize_extension(theta, phi);
      report["U"] = io::matrix_to_json(syn.extension.u);
      report["V"] = io::matrix_to_json(syn.extension.base.v);
      report["embedding"] = io::matrix_to_json(syn.model_embedding);
      ScalarInner phi_back = std::get<ScalarInner>(ext_char(syn.extension));
      bool ok = coincide(phi_back, phi, std::max(tol, 1e-7));
      Json j = item("ext_char of synthesized extension coincides with phi", ok);
      j["recovered"] = io::inner_to_json(phi_back);
      items.push_back(j);
      pass = pass && ok;

    } else if (cfg.command == "order-check") {
      Json w = io::load_json(path_of(cfg, "witness"));
      OrderWitness witness;
      witness.theta_small = io::inner_from_json(w.at("theta"));
      witness.phi = io::inner_from_json(w.at("phi"));
      witness.sigma_small = io::measure_from_json(w.at("sigmaSmall"));
      witness.sigma_big = io::measure_from_json(w.at("sigmaBig"));
      for (const auto& d : w.at("D"))
        witness.d_at_atoms.push_back(io::matrix_from_json(d));
      for (const auto& f : w.at("f")) {
        Matrix fm = io::matrix_from_json(f);
        witness.domain_image.push_back(fm.col(0));
      }
      PocharReport rep = pochar_verify(witness, cfg.tol_set ? tol : 1e-8);
      items.push_back(item("condition 1: theta divides phi", rep.cond1));
      Json c2 = item("condition 2: SigmaTilde = D* Sigma D on supp(Sigma)",
                     rep.cond2);
      c2["max_weight_mismatch"] = rep.max_weight_mismatch;
      items.push_back(c2);
      Json c3 = item("condition 3: moment sums vanish", rep.cond3);
      c3["max_moment_norm"] = rep.max_moment_norm;
      items.push_back(c3);
      pass = pass && rep.all();

    } else if (cfg.command == "reproduce") {
      examples::ReproduceReport rep =
          examples::reproduce(cfg.example, cfg.tol_set ? tol : 0.0);
      report["example"] = rep.example;
      report["runtime_seconds"] = rep.runtime_seconds;
      for (const auto& it : rep.items) {
        Json j = item(it.name, it.pass);
        j["deviation"] = it.deviation;
        j["tol"] = it.tol;
        items.push_back(j);
      }
      pass = pass && rep.pass;

    } else {
      throw Error("unknown command: " + cfg.command);
    }
  } catch (const Error& e) {
    diag << "error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    diag << "error: malformed JSON input: " << e.what() << "\n";
    return 2;
  }

  report["items"] = items;
  report["pass"] = pass;
  if (!cfg.output_path.empty()) {
    std::ofstream f(cfg.output_path);
    if (!f) {
      diag << "error: cannot write " << cfg.output_path << "\n";
      return 2;
    }
    f << report.dump(2) << "\n";
  } else {
    out << report.dump(2) << "\n";
  }
  return pass ? 0 : 1;
}

}  // namespace livsic::cli
