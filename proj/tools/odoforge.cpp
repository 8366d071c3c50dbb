#include "odoforge/dispatch.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"odoforge: odometers, Toeplitz arrays and invariant measures over free groups"};
  std::string verb, config, out = ".";
  std::optional<int> depth, radius;
  app.add_option("verb", verb, "validate | toeplitz | periods | factor | eigen | measure | all")->required();
  app.add_option("--config", config, "run configuration")->required()->check(CLI::ExistingFile);
  app.add_option("--depth", depth, "override run.depth");
  app.add_option("--radius", radius, "override run.radius");
  app.add_option("--out", out, "artifact directory");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 3;
  }

  odoforge::RunConfig cfg;
  try {
    if (!odoforge::is_verb(verb)) throw odoforge::Error(odoforge::ErrorKind::SemanticError, "unknown verb '" + verb + "'");
    cfg = odoforge::load_config(config);
    if (depth) {
      if (*depth < 1 || *depth > static_cast<int>(cfg.levels.size()))
        throw odoforge::Error(odoforge::ErrorKind::SemanticError, "--depth must lie in 1.." + std::to_string(cfg.levels.size()));
      cfg.depth = *depth;
    }
    if (radius) {
      if (*radius < 1) throw odoforge::Error(odoforge::ErrorKind::SemanticError, "--radius must be positive");
      cfg.radius = *radius;
    }
  } catch (const odoforge::Error& e) {
    std::cerr << "config: " << e.what() << '\n';
    return 3;
  }

  const auto rep = odoforge::dispatch(cfg, verb, out);
  for (const auto& c : rep.checks()) {
    std::cout << to_string(c.status) << ' ' << c.name << ": " << c.detail;
    if (c.witness) std::cout << " [witness " << *c.witness << ']';
    std::cout << '\n';
  }
  if (rep.has_error()) std::cerr << "error: " << rep.body()["error"].dump() << '\n';
  return rep.exit_code();
}
