#include "cli.h"

#include <algorithm>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "lingrank/corpus.h"
#include "lingrank/embstore.h"
#include "lingrank/error.h"
#include "lingrank/ranking.h"
#include "lingrank/report.h"
#include "lingrank/simcore.h"
#include "lingrank/subspace.h"
#include "lingrank/synth.h"

namespace lingrank::cli {
namespace {

namespace fs = std::filesystem;

// Bad flag values detected after CLI11 has parsed the command line.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return in;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << text;
  out.close();
  if (!out) throw Error("write failed: " + path);
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    write_text(path, text);
  }
}

std::vector<std::uint32_t> parse_layer_list(const std::string& text) {
  std::vector<std::uint32_t> layers;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(item, &used);
    } catch (const std::exception&) {
      throw UsageError("invalid layer \"" + item + "\" in --subset");
    }
    if (used != item.size() || v > 0xffffffffUL) {
      throw UsageError("invalid layer \"" + item + "\" in --subset");
    }
    layers.push_back(static_cast<std::uint32_t>(v));
  }
  if (layers.empty()) throw UsageError("--subset needs at least one layer");
  return layers;
}

std::vector<report::SimilarityRow> load_profiles(const std::string& path) {
  auto in = open_input(path);
  return report::parse_similarity_table(in);
}

const std::vector<std::string> kSides = {"source", "target"};
const std::vector<std::string> kKeys = {"target", "pair"};
const std::vector<std::string> kMethods = {"pearson", "spearman"};
const std::vector<std::string> kFormats = {"jsonl", "tsv"};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"lingrank: rank languages by the similarity of a model's internal representations",
               "lingrank"};
  app.require_subcommand(1);
  std::function<void()> action;

  // synth
  auto* synth = app.add_subcommand("synth", "Write a synthetic LRE1 store from a JSON spec");
  std::string synth_spec, synth_out;
  synth->add_option("spec", synth_spec, "JSON spec file")->required()->check(CLI::ExistingFile);
  synth->add_option("-o,--output", synth_out, "Output store")->required();
  synth->callback([&] {
    action = [&] {
      auto in = open_input(synth_spec);
      nlohmann::json spec;
      try {
        spec = nlohmann::json::parse(in);
      } catch (const nlohmann::json::parse_error& e) {
        throw Error("invalid spec JSON: " + std::string(e.what()));
      }
      const auto store = synth::store_from_spec(spec);
      embstore::write_store(store, fs::path(synth_out));
      out << "wrote " << synth_out << " (" << store.blocks.size() << " pairs, "
          << store.header.layers.size() << " layers, dim " << store.header.dim << ")\n";
    };
  });

  // sim
  auto* sim = app.add_subcommand("sim", "Per-layer and aggregate similarity for every pair");
  std::string sim_store, sim_subset, sim_out, sim_curves, sim_markdown;
  sim->add_option("store", sim_store, "LRE1 store")->required()->check(CLI::ExistingFile);
  sim->add_option("--subset", sim_subset, "Comma-separated layers to average (default 5,10,15,20,25)");
  sim->add_option("-o,--output", sim_out, "Similarity table CSV")->required();
  sim->add_option("--curves", sim_curves, "Per-layer curves CSV");
  sim->add_option("--markdown", sim_markdown, "Similarity table as Markdown");
  sim->callback([&] {
    action = [&] {
      std::optional<std::vector<std::uint32_t>> requested;
      if (!sim_subset.empty()) requested = parse_layer_list(sim_subset);
      const auto store = embstore::read_store(fs::path(sim_store));
      const auto subset = simcore::resolve_subset(store.header.layers, requested);
      const auto profiles = simcore::similarity_curves(store, subset);
      const auto table = report::emit_similarity_table(profiles);
      write_text(sim_out, table.csv);
      if (!sim_markdown.empty()) write_text(sim_markdown, table.markdown);
      if (!sim_curves.empty()) write_text(sim_curves, report::emit_layer_curves(profiles));
      for (const auto& p : profiles) {
        for (const auto& l : p.per_layer) {
          if (l.n_skipped) {
            err << "warning: pair " << p.pair_id << " layer " << l.layer << ": skipped "
                << l.n_skipped << " zero-norm samples\n";
          }
        }
      }
    };
  });

  // rank
  auto* rank = app.add_subcommand("rank", "Rank languages by aggregate similarity");
  std::string rank_in, rank_out, rank_by = "target";
  rank->add_option("profiles", rank_in, "Similarity table CSV")->required()->check(CLI::ExistingFile);
  rank->add_option("-o,--output", rank_out, "Ranking CSV")->required();
  rank->add_option("--by", rank_by, "Rank target languages or pair ids")
      ->check(CLI::IsMember(kKeys))
      ->capture_default_str();
  rank->callback([&] {
    action = [&] {
      const auto rows = load_profiles(rank_in);
      const auto scores = report::aggregate_scores(rows, report::parse_score_key(rank_by));
      write_text(rank_out, report::emit_ranking(ranking::rank_languages(scores)));
    };
  });

  // corr
  auto* corr = app.add_subcommand("corr", "Common-order ratio matrix between rankings");
  std::vector<std::string> corr_in, corr_names;
  std::string corr_out;
  corr->add_option("rankings", corr_in, "Ranking CSVs (two or more)")
      ->required()
      ->expected(2, -1)
      ->check(CLI::ExistingFile);
  corr->add_option("--names", corr_names, "Model names, in file order")->delimiter(',');
  corr->add_option("-o,--output", corr_out, "Matrix CSV (default stdout)");
  corr->callback([&] {
    action = [&] {
      if (!corr_names.empty() && corr_names.size() != corr_in.size()) {
        throw UsageError("--names lists " + std::to_string(corr_names.size()) + " names for " +
                         std::to_string(corr_in.size()) + " rankings");
      }
      std::vector<ranking::NamedRanking> rankings;
      for (std::size_t i = 0; i < corr_in.size(); ++i) {
        auto in = open_input(corr_in[i]);
        const auto name = corr_names.empty() ? fs::path(corr_in[i]).stem().string() : corr_names[i];
        rankings.push_back({name, report::parse_ranking(in)});
      }
      emit(corr_out, report::emit_correlation_matrix(ranking::correlation_matrix(rankings)), out);
    };
  });

  // subspace
  auto* sub = app.add_subcommand("subspace", "Eigen spectrum and double variance per language");
  std::string sub_store, sub_side = "target", sub_out, sub_proj, sub_sim;
  std::optional<std::uint32_t> sub_layer;
  std::optional<std::size_t> sub_k;
  bool sub_raw = false;
  sub->add_option("store", sub_store, "LRE1 store")->required()->check(CLI::ExistingFile);
  sub->add_option("--layer", sub_layer, "Layer to analyze (default: deepest default-subset layer)");
  sub->add_option("--side", sub_side, "Which side of each pair")
      ->check(CLI::IsMember(kSides))
      ->capture_default_str();
  sub->add_option("--k", sub_k, "Number of leading eigenvalues (default min(10, dim))");
  sub->add_flag("--raw", sub_raw, "Do not normalize the spectrum");
  sub->add_option("-o,--output", sub_out, "Statistics CSV")->required();
  sub->add_option("--proj", sub_proj, "2D projection CSV");
  sub->add_option("--sim", sub_sim, "Similarity table CSV; rows are then sorted by similarity")
      ->check(CLI::ExistingFile);
  sub->callback([&] {
    action = [&] {
      const auto store = embstore::read_store(fs::path(sub_store));
      const auto side = subspace::parse_side(sub_side);
      const auto layer = sub_layer.value_or(subspace::default_layer(store.header));
      const auto stats = subspace::subspace_report(store, side, layer, sub_k, !sub_raw);
      std::optional<std::map<std::string, double>> sims;
      if (!sub_sim.empty()) {
        sims = report::aggregate_scores(load_profiles(sub_sim), report::ScoreKey::target_lang);
      }
      write_text(sub_out, report::emit_subspace_table(stats, layer, side, sims ? &*sims : nullptr));
      if (!sub_proj.empty()) {
        std::vector<std::pair<std::string, subspace::Projection2D>> projections;
        for (const auto& [lang, m] : subspace::language_matrices(store, side, layer)) {
          try {
            projections.emplace_back(lang, subspace::project_2d(m));
          } catch (const Error& e) {
            throw Error("language " + lang + ": " + e.what());
          }
        }
        write_text(sub_proj, report::emit_projection_csv(projections, layer));
      }
    };
  });

  // join
  auto* join = app.add_subcommand("join", "Correlate similarity with external per-language values");
  std::string join_profiles, join_ext, join_method = "spearman", join_out, join_by = "target";
  join->add_option("profiles", join_profiles, "Similarity table CSV")
      ->required()
      ->check(CLI::ExistingFile);
  join->add_option("external", join_ext, "CSV with header lang,<name>")
      ->required()
      ->check(CLI::ExistingFile);
  join->add_option("--method", join_method, "Correlation method")
      ->check(CLI::IsMember(kMethods))
      ->capture_default_str();
  join->add_option("--by", join_by, "Join on target language or pair id")
      ->check(CLI::IsMember(kKeys))
      ->capture_default_str();
  join->add_option("-o,--output", join_out, "Report CSV (default stdout)");
  join->callback([&] {
    action = [&] {
      const auto sims =
          report::aggregate_scores(load_profiles(join_profiles), report::parse_score_key(join_by));
      auto in = open_input(join_ext);
      const auto ext = report::parse_external_scalars(in);
      const auto rep = report::correlate_external(sims, ext, report::parse_method(join_method));
      emit(join_out, report::emit_correlation_report(rep, ext.name), out);
    };
  });

  // validate
  auto* validate = app.add_subcommand("validate", "Check an LRE1 store");
  std::string val_store;
  double val_zero = embstore::kDefaultMaxZeroFraction;
  validate->add_option("store", val_store, "LRE1 store")->required()->check(CLI::ExistingFile);
  validate->add_option("--max-zero-fraction", val_zero, "Allowed zero-norm fraction per slab")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  int validate_status = kExitOk;
  validate->callback([&] {
    action = [&] {
      const auto store = embstore::read_store(fs::path(val_store));
      const auto violations = embstore::validate_store(store, val_zero);
      if (violations.empty()) {
        out << "OK\n";
        return;
      }
      for (const auto& v : violations) err << v << '\n';
      validate_status = kExitData;
    };
  });

  // sample
  auto* sample = app.add_subcommand("sample", "Parse a parallel corpus and draw a seeded subset");
  std::string smp_in, smp_format = "jsonl", smp_src_lang, smp_tgt_lang, smp_src_key, smp_tgt_key,
                      smp_out;
  std::size_t smp_src_col = 0, smp_tgt_col = 1, smp_n = 0;
  std::uint64_t smp_seed = 0;
  bool smp_skip_header = false;
  sample->add_option("corpus", smp_in, "Corpus file")->required()->check(CLI::ExistingFile);
  sample->add_option("--format", smp_format, "Corpus format")
      ->check(CLI::IsMember(kFormats))
      ->capture_default_str();
  sample->add_option("--source-lang", smp_src_lang, "Baseline language code")->required();
  sample->add_option("--target-lang", smp_tgt_lang, "Target language code")->required();
  sample->add_option("--source-key", smp_src_key, "JSONL key of the baseline side (default: --source-lang)");
  sample->add_option("--target-key", smp_tgt_key, "JSONL key of the target side (default: --target-lang)");
  sample->add_option("--source-col", smp_src_col, "TSV column of the baseline side")
      ->capture_default_str();
  sample->add_option("--target-col", smp_tgt_col, "TSV column of the target side")
      ->capture_default_str();
  sample->add_flag("--skip-header", smp_skip_header, "TSV has a header row");
  sample->add_option("-n", smp_n, "Number of pairs")->required()->check(CLI::PositiveNumber);
  sample->add_option("--seed", smp_seed, "Sampling seed")->capture_default_str();
  sample->add_option("-o,--output", smp_out, "Output JSONL (default stdout)");
  sample->callback([&] {
    action = [&] {
      const corpus::LanguagePair langs{smp_src_lang, smp_tgt_lang};
      corpus::ParallelCorpus c;
      if (smp_format == "jsonl") {
        c = corpus::parse_jsonl_corpus(fs::path(smp_in),
                                       smp_src_key.empty() ? smp_src_lang : smp_src_key,
                                       smp_tgt_key.empty() ? smp_tgt_lang : smp_tgt_key, langs);
      } else {
        c = corpus::parse_tsv_corpus(fs::path(smp_in), {smp_src_col, smp_tgt_col, smp_skip_header},
                                     langs);
      }
      const auto picked = corpus::sample_corpus(c, smp_n, smp_seed);
      std::ostringstream text;
      corpus::write_jsonl_corpus(picked, text, smp_src_key.empty() ? smp_src_lang : smp_src_key,
                                 smp_tgt_key.empty() ? smp_tgt_lang : smp_tgt_key);
      emit(smp_out, text.str(), out);
    };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    const auto* failed = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << failed->help();
    return kExitUsage;
  }

  try {
    action();
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return validate_status;
}

}  // namespace lingrank::cli
