#include "conecert/pipeline.hpp"

#include <algorithm>
#include <filesystem>

namespace conecert {

namespace {

std::vector<std::vector<Rat>> catalog_points(const CatalogEntry& entry, int level) {
  auto it = entry.points.find(level);
  if (it == entry.points.end()) return {};
  return it->second;
}

}  // namespace

SeparationBundle catalog_bundle(const std::string& name, const SearchConfig& config) {
  const CatalogEntry& entry = catalog::get(name);
  if (!entry.gram) throw std::invalid_argument("catalog form has no stored Gram matrix: " + name);
  const Dims dims(entry.form.nvars() - 1, entry.form.degree() / 2);
  const int member_level = entry.gram_level;
  const int refute_level = member_level - 1;

  MembershipCertificate membership =
      verify_membership(entry.form, member_level, *entry.gram, IdentityHint{entry.form, {}});

  RefutationOutcome outcome =
      refute_search(entry.form, refute_level, config, catalog_points(entry, refute_level));
  auto* refutation = std::get_if<RefutationCertificate>(&outcome);
  if (!refutation)
    throw std::runtime_error("catalog bundle: no refutation found for " + name + " at level " +
                             std::to_string(refute_level));
  return SeparationBundle{entry.form, dims,         member_level,
                          refute_level, std::move(membership), std::move(*refutation)};
}

namespace {

struct TransferCandidate {
  std::string source_name;
  std::vector<int> injection;  // empty = degree raise / direct
};

// images of the small basis indices inside the big basis along an injection
std::vector<int> injected_images(const Dims& small, const Dims& big,
                                 const std::vector<int>& injection) {
  return index_set_for_substitution(small, big, injection);
}

int support_max_index(const SymMatrix& m) {
  int mx = 0;
  for (const auto& [i, j, v] : m.upper_nonzeros()) mx = std::max(mx, j);
  return mx;
}

// enumerate strictly increasing injections (0, a_1 < ... < a_s) into {1..n}
std::vector<std::vector<int>> injections_into(int small_n, int big_n) {
  std::vector<std::vector<int>> out;
  std::vector<int> pick(static_cast<size_t>(small_n));
  auto recurse = [&](auto&& self, int pos, int next) -> void {
    if (pos == small_n) {
      std::vector<int> inj{0};
      inj.insert(inj.end(), pick.begin(), pick.end());
      out.push_back(std::move(inj));
      return;
    }
    for (int v = next; v <= big_n; ++v) {
      pick[pos] = v;
      self(self, pos + 1, v + 1);
    }
  };
  recurse(recurse, 0, 1);
  return out;
}

struct SourcePool {
  std::vector<SeparationBundle> bundles;
};

PairReport try_candidates(int big_n, int degree_d, int level,
                          const std::vector<const SeparationBundle*>& sources,
                          const SearchConfig& config) {
  const Dims big(big_n, degree_d);
  PairReport report;
  report.level = level;

  for (const SeparationBundle* source : sources) {
    // direct use when the source already lives in the target ring
    if (source->dims == big && source->refute_level == level &&
        source->member_level == level + 1) {
      report.form_name = source->form.to_string();
      report.bundle = *source;
      report.verified = true;
      return report;
    }
    if (source->dims.n > big_n || source->dims.d != degree_d) continue;
    if (source->dims.n == big_n) continue;
    for (const auto& injection : injections_into(source->dims.n, big_n)) {
      const auto images = injected_images(source->dims, big, injection);
      // refutation transfers exactly when the dependent prefix visible at the
      // target level matches the source refutation level
      int visible = 0;
      for (int dep = source->dims.n + 1; dep <= source->dims.k(); ++dep)
        if (images[dep] <= big_n + level) ++visible;
      if (visible != source->refute_level) continue;
      // the expanded Gram matrix must sit inside the level-(i+1) dependents
      if (images[support_max_index(source->membership.gram)] > big_n + level + 1) continue;
      try {
        SeparationBundle moved =
            transfer_var_extend(*source, injection, big_n, level + 1, level);
        report.form_name = moved.form.to_string();
        report.bundle = std::move(moved);
        report.verified = true;
        return report;
      } catch (const std::exception& e) {
        report.detail = e.what();  // keep trying other candidates
      }
    }
  }
  report.inconclusive = true;
  if (report.detail.empty()) report.detail = "no transfer candidate covers this level";
  return report;
}

}  // namespace

std::vector<PairReport> plan_quartics(int n, const SearchConfig& config) {
  if (n < 3) throw std::invalid_argument("plan_quartics: needs n >= 3");
  std::vector<SeparationBundle> base;
  for (const char* name :
       {"choi_lam_quartic_sigma", "choi_lam_quartic_tau", "choi_lam_quartic"})
    base.push_back(catalog_bundle(name, config));

  std::vector<PairReport> out;
  const Dims dims(n, 2);
  const int top = dims.k() - n;
  for (int level = n; level < top; ++level) {
    std::vector<const SeparationBundle*> sources;
    for (const auto& b : base) sources.push_back(&b);
    out.push_back(try_candidates(n, 2, level, sources, config));
  }
  return out;
}

std::vector<PairReport> plan_sextics(int n, const SearchConfig& config) {
  if (n < 2) throw std::invalid_argument("plan_sextics: needs n >= 2");
  std::vector<SeparationBundle> ternary;
  for (const char* name : {"motzkin_sigma", "choi_lam_sextic", "choi_lam_sextic_tau", "motzkin"})
    ternary.push_back(catalog_bundle(name, config));

  std::vector<PairReport> out;
  const Dims dims(n, 3);
  const int top = dims.k() - n;
  if (n == 2) {
    for (int level = n; level < top; ++level) {
      PairReport report;
      report.level = level;
      for (const auto& b : ternary)
        if (b.refute_level == level && b.member_level == level + 1) {
          report.form_name = b.form.to_string();
          report.bundle = b;
          report.verified = true;
          break;
        }
      if (!report.verified) {
        report.inconclusive = true;
        report.detail = "no ternary witness at this level";
      }
      out.push_back(std::move(report));
    }
    return out;
  }

  // quartic separations in the same variable count, raised one degree
  std::vector<SeparationBundle> raised;
  {
    std::vector<SeparationBundle> quartics;
    if (n == 3) {
      for (const char* name :
           {"choi_lam_quartic_sigma", "choi_lam_quartic_tau", "choi_lam_quartic"})
        quartics.push_back(catalog_bundle(name, config));
    } else {
      for (PairReport& r : plan_quartics(n, config))
        if (r.verified && r.bundle) quartics.push_back(std::move(*r.bundle));
    }
    for (const auto& q : quartics) raised.push_back(transfer_degree_raise(q));
  }

  // the quaternary-sextic witness reaches levels none of the above see
  std::vector<SeparationBundle> quaternary;
  quaternary.push_back(catalog_bundle("x1sq_choi_lam_tau", config));

  for (int level = n; level < top; ++level) {
    std::vector<const SeparationBundle*> sources;
    for (const auto& b : raised) sources.push_back(&b);
    for (const auto& b : ternary) sources.push_back(&b);
    for (const auto& b : quaternary) sources.push_back(&b);
    out.push_back(try_candidates(n, 3, level, sources, config));
  }
  return out;
}

ReproduceReport reproduce_case(int num_vars, int degree, const RunConfig& config) {
  ReproduceReport report;
  report.num_vars = num_vars;
  report.degree = degree;
  const int n = num_vars - 1;
  const int d = degree / 2;
  if (degree % 2 != 0 || n < 1) throw std::invalid_argument("reproduce: bad case");
  if (dim_k(n, d) > config.max_k)
    throw std::invalid_argument("reproduce: basis larger than the configured cap");

  const auto chain = expected_chain(num_vars, degree);
  for (const ChainStep& step : chain)
    if (step.link == ChainLink::Equal) report.equal_levels.push_back(step.level);

  std::vector<PairReport> pairs;
  if (degree == 4)
    pairs = plan_quartics(n, config.search());
  else
    pairs = plan_sextics(n, config.search());

  // write certificates and re-verify them from their serialized bytes
  bool any_fail = false, any_inconclusive = false;
  std::filesystem::path dir;
  if (!config.json_out.empty()) {
    dir = config.json_out;
    std::filesystem::create_directories(dir);
  }
  for (PairReport& pair : pairs) {
    if (!pair.verified || !pair.bundle) {
      any_inconclusive = true;
      continue;
    }
    const std::string mem_json = membership_to_json(pair.bundle->membership);
    const std::string ref_json = refutation_to_json(pair.bundle->refutation);
    if (!verify_certificate_text(mem_json).ok || !verify_certificate_text(ref_json).ok) {
      pair.verified = false;
      pair.detail = "serialized certificate failed re-verification";
      any_fail = true;
      continue;
    }
    if (!config.json_out.empty()) {
      char stem[64];
      std::snprintf(stem, sizeof(stem), "level%02d", pair.level);
      pair.membership_path = (dir / (std::string(stem) + "_membership.json")).string();
      pair.refutation_path = (dir / (std::string(stem) + "_refutation.json")).string();
      write_file(pair.membership_path, mem_json);
      write_file(pair.refutation_path, ref_json);
      if (!verify_certificate_file(pair.membership_path).ok ||
          !verify_certificate_file(pair.refutation_path).ok) {
        pair.verified = false;
        pair.detail = "certificate file failed re-verification";
        any_fail = true;
      }
    }
  }
  report.pairs = std::move(pairs);
  report.exit_code = any_fail ? 1 : (any_inconclusive ? 2 : 0);
  return report;
}

ClassifyOutcome classify_form(const Form& f, const SearchConfig& config) {
  ClassifyOutcome out;
  const Dims dims(f.nvars() - 1, f.degree() / 2);

  if (const CatalogEntry* entry = catalog::match(f)) {
    const int member_level = entry->gram_level;
    // replay the refutation at every level below the certified one
    auto hint = catalog_points(*entry, member_level - 1);
    std::vector<std::vector<Rat>> points = hint;
    if (points.empty()) {
      RefutationOutcome found = refute_search(f, member_level - 1, config);
      if (auto* cert = std::get_if<RefutationCertificate>(&found)) points = cert->points;
    }
    if (!points.empty()) {
      bool replayed = true;
      for (int level = member_level - 1; level >= 0; --level) {
        RefutationOutcome outcome = refute_membership(f, level, points);
        auto* cert = std::get_if<RefutationCertificate>(&outcome);
        if (!cert) {
          replayed = false;
          break;
        }
        if (level == member_level - 1) out.refutation = std::move(*cert);
      }
      if (replayed) out.lo = member_level;
    }
    out.membership =
        verify_membership(f, member_level, *entry->gram, IdentityHint{entry->form, {}});
    out.hi = member_level;
    out.budget_exhausted = (out.lo != out.hi);
    return out;
  }

  ClassifyResult generic = classify_level(f, config);
  out.lo = generic.lo;
  out.hi = generic.hi;
  out.refuted_at_top = generic.refuted_at_top;
  out.budget_exhausted = generic.budget_exhausted;
  out.membership = std::move(generic.membership);
  out.refutation = std::move(generic.refutation);
  return out;
}

}  // namespace conecert
