#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "conecert/pipeline.hpp"

namespace cc = conecert;

namespace {

struct CommonOpts {
  std::uint64_t seed = 0;
  size_t points = 4000;
  std::string strategy = "default";
  std::string json_out;
  int max_k = 40;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--seed", opts.seed, "PRNG seed for point searches");
  cmd->add_option("--points", opts.points, "point budget for refutation searches");
  cmd->add_option("--strategy", opts.strategy,
                  "refutation point strategy: default|search|signed-units|grid|random");
  cmd->add_option("--json-out", opts.json_out, "directory for certificate files");
  cmd->add_option("--max-k", opts.max_k, "largest admissible basis index bound");
}

cc::RunConfig run_config(const CommonOpts& opts) {
  cc::RunConfig config;
  config.seed = opts.seed;
  if (const char* env = std::getenv("CONE_CERT_SEED")) config.seed = std::strtoull(env, nullptr, 10);
  config.point_budget = opts.points;
  config.json_out = opts.json_out;
  config.max_k = opts.max_k;
  return config;
}

cc::Form resolve_form(const std::string& catalog_name, const std::string& form_text,
                      const std::string& form_file) {
  if (!catalog_name.empty()) return cc::catalog::get(catalog_name).form;
  if (!form_text.empty()) return cc::parse_form(form_text);
  if (!form_file.empty()) return cc::parse_form(cc::read_file(form_file));
  throw CLI::ValidationError("provide --catalog, --form or --form-file");
}

std::vector<std::vector<cc::Rat>> strategy_points(const cc::Form& f, int level,
                                                  const CommonOpts& opts, std::uint64_t seed) {
  const cc::Dims dims(f.nvars() - 1, f.degree() / 2);
  const cc::ChartMap ch = cc::chart(dims, level);
  if (opts.strategy == "signed-units")
    return cc::sample_chart_points(ch, cc::SignedUnitsStrategy{opts.points}, seed);
  if (opts.strategy == "grid")
    return cc::sample_chart_points(ch, cc::GridStrategy{1, 1, opts.points}, seed);
  if (opts.strategy == "random")
    return cc::sample_chart_points(ch, cc::RandomRationalStrategy{opts.points, 2, 4}, seed);
  return {};
}

int write_and_report(const std::string& json, const std::string& kind, int level,
                     const std::string& json_out) {
  if (json_out.empty()) {
    std::cout << json << "\n";
    return 0;
  }
  std::filesystem::create_directories(json_out);
  char stem[64];
  std::snprintf(stem, sizeof(stem), "level%02d_%s.json", level, kind.c_str());
  const std::string path = (std::filesystem::path(json_out) / stem).string();
  cc::write_file(path, json);
  std::cout << kind << " certificate written to " << path << "\n";
  return 0;
}

int cmd_inspect(int n, int d) {
  const cc::Dims dims(n, d);
  const int k = dims.k();
  std::cout << "n=" << n << " d=" << d << " k=" << k << "\n";
  std::cout << "monomial basis (descending lex):\n";
  const auto basis = cc::exponent_list(n, d);
  for (size_t i = 0; i < basis.size(); ++i) {
    std::cout << "  m" << i << " = ";
    cc::Form mono(n + 1, d);
    mono.add_term(basis[i], cc::Rat(1));
    std::cout << mono.to_string() << "\n";
  }
  std::cout << "filtration relations:\n";
  for (int i = 1; i <= k - n; ++i) {
    const auto rel = cc::relation_at_level(dims, i);
    std::cout << "  " << i << ": Z0*Z" << (n + i) << " - Z" << rel.s << "*Z" << rel.t << "\n";
  }
  std::cout << "kernel dimension of the Gram map: " << cc::kernel_basis(dims).size() << "\n";
  if (d == 2 || d == 3) {
    // strict-separation count formula: (k - n) - (n + 1); the machine-checked
    // chains for small cases disagree for quartics, so both numbers print
    const long mu = (k - n) - (n + 1);
    std::cout << "separating-cone count formula mu(n," << d << ") = " << mu << "\n";
    try {
      const auto chain = cc::expected_chain(n + 1, 2 * d);
      long strict = 0;
      for (const auto& step : chain)
        if (step.link == cc::ChainLink::StrictExpected) ++strict;
      std::cout << "strict inclusions in the certified chain: " << strict;
      if (strict != mu) std::cout << "  [differs from the formula above]";
      std::cout << "\n";
    } catch (const std::invalid_argument&) {
      std::cout << "certified chain: unsupported case\n";
    }
  }
  return 0;
}

int cmd_classify(const cc::Form& f, const cc::RunConfig& config) {
  const cc::Dims dims(f.nvars() - 1, f.degree() / 2);
  const auto outcome = cc::classify_form(f, config.search());
  if (outcome.refuted_at_top) {
    std::cout << "not PSD: refuted at every level including " << (dims.k() - dims.n) << "\n";
    return 0;
  }
  const std::string hi = outcome.hi < 0 ? "?" : std::to_string(outcome.hi);
  std::cout << "{" << outcome.lo << ".." << hi << "}";
  if (outcome.budget_exhausted) std::cout << "  (budget exhausted; interval may be loose)";
  std::cout << "\n";
  if (outcome.membership && !config.json_out.empty())
    write_and_report(cc::membership_to_json(*outcome.membership), "membership",
                     outcome.membership->level, config.json_out);
  if (outcome.refutation && !config.json_out.empty())
    write_and_report(cc::refutation_to_json(*outcome.refutation), "refutation",
                     outcome.refutation->level, config.json_out);
  return 0;
}

int cmd_certify(const cc::Form& f, int level, const std::string& gram_file,
                const std::string& catalog_name, const cc::RunConfig& config) {
  std::optional<cc::MembershipCertificate> cert;
  if (!gram_file.empty()) {
    // the matrix file carries the JSON layout of a membership payload gram
    throw CLI::ValidationError("--gram files are not supported yet; use catalog matrices");
  }
  if (!catalog_name.empty()) {
    const auto& entry = cc::catalog::get(catalog_name);
    if (entry.gram && entry.gram_level == level) {
      cert = cc::verify_membership(f, level, *entry.gram, cc::IdentityHint{entry.form, {}});
    }
  }
  if (!cert && level == 0) cert = cc::sos_search(f, config.search());
  if (!cert) {
    std::cout << "no membership certificate found at level " << level << "\n";
    return 2;
  }
  return write_and_report(cc::membership_to_json(*cert), "membership", level, config.json_out);
}

int cmd_refute(const cc::Form& f, int level, const CommonOpts& opts,
               const cc::RunConfig& config) {
  std::vector<std::vector<cc::Rat>> hints;
  if (opts.strategy == "default") {
    if (const auto* entry = cc::catalog::match(f)) {
      auto it = entry->points.find(level);
      if (it != entry->points.end()) hints = it->second;
    }
  } else if (opts.strategy != "search") {
    hints = strategy_points(f, level, opts, config.seed);
  }
  const auto outcome = cc::refute_search(f, level, config.search(), hints);
  if (const auto* cert = std::get_if<cc::RefutationCertificate>(&outcome)) {
    std::cout << "refuted at level " << level << " with " << cert->points.size() << " points\n";
    return write_and_report(cc::refutation_to_json(*cert), "refutation", level, config.json_out);
  }
  std::cout << "inconclusive: a Gram matrix satisfies every tested point at level " << level
            << "\n";
  return 2;
}

int cmd_reproduce(const std::string& case_text, const cc::RunConfig& config) {
  const auto comma = case_text.find(',');
  if (comma == std::string::npos)
    throw CLI::ValidationError("case must be '<vars>,<degree>', e.g. 4,4");
  const int num_vars = std::stoi(case_text.substr(0, comma));
  const int degree = std::stoi(case_text.substr(comma + 1));

  cc::RunConfig local = config;
  if (local.json_out.empty())
    local.json_out = "certs-" + std::to_string(num_vars) + "-" + std::to_string(degree);
  const auto report = cc::reproduce_case(num_vars, degree, local);

  for (int level : report.equal_levels)
    std::cout << "C_" << level << " = C_" << (level + 1)
              << "  (collapse known from minimal-degree theory; not machine-checked)\n";
  for (const auto& pair : report.pairs) {
    std::cout << "C_" << pair.level << " < C_" << (pair.level + 1) << "  ";
    if (pair.verified) {
      std::cout << "strict: " << pair.form_name << "  [membership+refutation verified]";
      if (!pair.membership_path.empty())
        std::cout << "\n    " << pair.membership_path << "\n    " << pair.refutation_path;
    } else if (pair.inconclusive) {
      std::cout << "INCONCLUSIVE: " << pair.detail;
    } else {
      std::cout << "FAILED: " << pair.detail;
    }
    std::cout << "\n";
  }
  std::cout << (report.exit_code == 0 ? "all expected separations certified"
                                      : "reproduction incomplete")
            << "\n";
  return report.exit_code;
}

int cmd_embed(const std::string& catalog_name, bool raise, const std::string& extend,
              const cc::RunConfig& config) {
  cc::SeparationBundle bundle = cc::catalog_bundle(catalog_name, config.search());
  cc::SeparationBundle moved = bundle;
  if (raise) {
    moved = cc::transfer_degree_raise(bundle);
  } else if (!extend.empty()) {
    std::vector<int> injection;
    std::stringstream ss(extend);
    std::string part;
    int big_n = 0;
    while (std::getline(ss, part, ',')) {
      injection.push_back(std::stoi(part));
      big_n = std::max(big_n, injection.back());
    }
    // target levels follow from where the injected dependents land
    const cc::Dims small = bundle.dims;
    const cc::Dims big(big_n, small.d);
    const auto images = cc::index_set_for_substitution(small, big, injection);
    int member_level = std::max(0, images[bundle.member_level + small.n] - big_n);
    for (const auto& [i, j, v] : bundle.membership.gram.upper_nonzeros())
      member_level = std::max(member_level, images[j] - big_n);
    int refute_level = member_level - 1;
    moved = cc::transfer_var_extend(bundle, injection, big_n, member_level, refute_level);
  } else {
    throw CLI::ValidationError("choose --raise or --extend i0,i1,...");
  }
  std::cout << "transferred: " << moved.form.to_string() << "\n";
  std::cout << "  membership at level " << moved.member_level << ", refutation at level "
            << moved.refute_level << " in n=" << moved.dims.n << ", 2d=" << 2 * moved.dims.d
            << "\n";
  if (!config.json_out.empty()) {
    write_and_report(cc::membership_to_json(moved.membership), "membership", moved.member_level,
                     config.json_out);
    write_and_report(cc::refutation_to_json(moved.refutation), "refutation", moved.refute_level,
                     config.json_out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact certificates for the cone filtration between sums of squares and "
               "positive semidefinite forms"};
  app.require_subcommand(1);

  // inspect
  int inspect_n = 0, inspect_d = 0;
  auto* inspect = app.add_subcommand("inspect", "basis, filtration relations, kernel dimension");
  inspect->add_option("n", inspect_n, "number of variables minus one")->required();
  inspect->add_option("d", inspect_d, "half degree")->required();

  // shared form selection options
  struct FormArgs {
    std::string catalog, form, form_file;
  };
  auto add_form_opts = [](CLI::App* cmd, FormArgs& args) {
    cmd->add_option("--catalog", args.catalog, "built-in form name");
    cmd->add_option("--form", args.form, "form text, e.g. 'x0^4 + x1^4'");
    cmd->add_option("--form-file", args.form_file, "file containing form text");
  };

  FormArgs classify_args;
  CommonOpts classify_opts;
  auto* classify = app.add_subcommand("classify", "locate a form inside the cone filtration");
  classify->add_option("text", classify_args.form, "form text (positional)");
  add_form_opts(classify, classify_args);
  add_common(classify, classify_opts);

  FormArgs certify_args;
  CommonOpts certify_opts;
  int certify_level = 0;
  std::string certify_gram;
  auto* certify = app.add_subcommand("certify", "membership certificate at a level");
  add_form_opts(certify, certify_args);
  certify->add_option("--level", certify_level, "filtration level")->required();
  certify->add_option("--gram", certify_gram, "matrix file");
  add_common(certify, certify_opts);

  FormArgs refute_args;
  CommonOpts refute_opts;
  int refute_level = 0;
  auto* refute = app.add_subcommand("refute", "refutation certificate at a level");
  add_form_opts(refute, refute_args);
  refute->add_option("--level", refute_level, "filtration level")->required();
  add_common(refute, refute_opts);

  std::string reproduce_cases;
  CommonOpts reproduce_opts;
  auto* reproduce = app.add_subcommand("reproduce", "certify the expected chain of a case");
  reproduce->add_option("case", reproduce_cases, "case as '<vars>,<degree>', e.g. 4,4")
      ->required();
  add_common(reproduce, reproduce_opts);

  std::string embed_catalog, embed_extend;
  bool embed_raise = false;
  CommonOpts embed_opts;
  auto* embed = app.add_subcommand("embed", "transfer a separation to more variables or degree");
  embed->add_option("--catalog", embed_catalog, "source form")->required();
  embed->add_flag("--raise", embed_raise, "raise the degree by two");
  embed->add_option("--extend", embed_extend, "variable injection i0,i1,...");
  add_common(embed, embed_opts);

  std::string verify_path;
  auto* verify = app.add_subcommand("verify-cert", "re-verify a certificate file exactly");
  verify->add_option("file", verify_path, "certificate JSON")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (inspect->parsed()) return cmd_inspect(inspect_n, inspect_d);
    if (classify->parsed())
      return cmd_classify(
          resolve_form(classify_args.catalog, classify_args.form, classify_args.form_file),
          run_config(classify_opts));
    if (certify->parsed())
      return cmd_certify(
          resolve_form(certify_args.catalog, certify_args.form, certify_args.form_file),
          certify_level, certify_gram, certify_args.catalog, run_config(certify_opts));
    if (refute->parsed())
      return cmd_refute(resolve_form(refute_args.catalog, refute_args.form, refute_args.form_file),
                        refute_level, refute_opts, run_config(refute_opts));
    if (reproduce->parsed()) return cmd_reproduce(reproduce_cases, run_config(reproduce_opts));
    if (embed->parsed())
      return cmd_embed(embed_catalog, embed_raise, embed_extend, run_config(embed_opts));
    if (verify->parsed()) {
      const auto result = cc::verify_certificate_file(verify_path);
      if (result.ok) {
        std::cout << "OK " << result.kind << "\n";
        return 0;
      }
      std::cout << "FAIL " << (result.kind.empty() ? "certificate" : result.kind) << ": "
                << result.detail << "\n";
      return 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
