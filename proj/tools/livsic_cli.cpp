// livsic command line front end; see README for the JSON schemas.
#include <CLI11.hpp>

#include "livsic/cli.hpp"

using livsic::cli::JobConfig;

int main(int argc, char** argv) {
  CLI::App app{"Livsic characteristic functions, Clark measures and extension "
               "characteristic functions of finite partial isometries"};
  app.require_subcommand(1);

  JobConfig cfg;
  std::string grid_path, w_text;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--tol", cfg.tol, "tolerance override")
        ->each([&](const std::string&) { cfg.tol_set = true; });
    sub->add_option("--grid", grid_path, "JSON list of complex grid points");
    sub->add_option("--out", cfg.output_path, "write the JSON report here");
  };
  auto add_path = [&](CLI::App* sub, const std::string& key,
                      const std::string& help, bool required = true) {
    auto* opt = sub->add_option_function<std::string>(
        "--" + key, [&cfg, key](const std::string& p) { cfg.paths[key] = p; },
        help);
    if (required) opt->required();
  };

  auto* livsic_cmd = app.add_subcommand("livsic", "Livsic characteristic function of V");
  add_path(livsic_cmd, "V", "partial isometry matrix (JSON)");
  add_common(livsic_cmd);

  auto* clark = app.add_subcommand("clark", "Clark measure of an extension");
  add_path(clark, "U", "unitary extension matrix (JSON)");
  add_path(clark, "V", "partial isometry matrix (JSON)");
  add_common(clark);

  auto* transform = app.add_subcommand("transform-measure",
                                       "circle <-> half-plane Herglotz dictionary");
  add_path(transform, "measure", "atomic matrix measure (JSON)");
  add_common(transform);

  auto* extchar = app.add_subcommand("ext-char",
                                     "characteristic function of an extension");
  add_path(extchar, "U", "unitary extension matrix (JSON)");
  add_path(extchar, "V", "partial isometry matrix (JSON)");
  add_common(extchar);

  auto* div = app.add_subcommand("divides", "inner-function divisibility");
  add_path(div, "theta", "inner function (JSON)");
  add_path(div, "phi", "inner function (JSON)");
  add_common(div);

  auto* frostman = app.add_subcommand("frostman", "Frostman shift vanishing at i");
  add_path(frostman, "theta", "inner function (JSON)");
  add_common(frostman);

  auto* ac = app.add_subcommand("ac-check",
                                "Alexandrov-Clark identity for a canonical extension");
  add_path(ac, "V", "partial isometry matrix (JSON)");
  add_path(ac, "uparam", "unitary parameter matrix (JSON)");
  add_common(ac);

  auto* kernels = app.add_subcommand("kernels", "model kernel Gram positivity");
  add_path(kernels, "U", "unitary extension matrix (JSON)");
  add_path(kernels, "V", "partial isometry matrix (JSON)");
  add_path(kernels, "points", "JSON list of evaluation points", false);
  add_common(kernels);

  auto* cyclic = app.add_subcommand("cyclic", "cyclicity expansion partial sums");
  add_path(cyclic, "U", "unitary extension matrix (JSON)");
  add_path(cyclic, "V", "partial isometry matrix (JSON)");
  add_path(cyclic, "h-vec", "vector in H (JSON column matrix)");
  cyclic->add_option("--w", w_text, "expansion point, JSON complex [re,im]");
  cyclic->add_option("--k", cfg.k_steps, "number of expansion terms");
  add_common(cyclic);

  auto* synth = app.add_subcommand("synthesize",
                                   "extension with prescribed characteristic function");
  add_path(synth, "theta", "inner function of the base (JSON)");
  add_path(synth, "phi", "target characteristic function (JSON)");
  add_common(synth);

  auto* order = app.add_subcommand("order-check", "partial-order witness verification");
  add_path(order, "witness", "witness file (JSON)");
  add_common(order);

  auto* repro = app.add_subcommand("reproduce", "re-run a worked example");
  repro->add_option("example", cfg.example, "fdeg or fdeg2")->required();
  add_common(repro);

  CLI11_PARSE(app, argc, argv);

  try {
    if (!grid_path.empty())
      cfg.grid = livsic::io::grid_from_json(livsic::io::load_json(grid_path));
    if (!w_text.empty())
      cfg.w_point = livsic::io::complex_from_json(
          livsic::io::Json::parse(w_text));
  } catch (const livsic::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: malformed JSON argument: " << e.what() << "\n";
    return 2;
  }

  cfg.command = app.get_subcommands().front()->get_name();
  return livsic::cli::run(cfg, std::cout, std::cerr);
}
