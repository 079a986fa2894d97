// adoptrace command-line front end. Each pipeline stage is a subcommand;
// `run` executes them all from a single config file.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "adoptrace/adoptrace.hpp"

namespace fs = std::filesystem;
using namespace adoptrace;

namespace {

struct Globals {
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string config;
};

std::string data_path(const std::string& rel) { return std::string(ADOPTRACE_DATA_DIR) + "/" + rel; }

nlohmann::json load_json(const std::string& path) {
  const auto j = nlohmann::json::parse(text::read_file(path), nullptr, false);
  if (j.is_discarded()) throw DataError("'" + path + "' is not valid JSON");
  return j;
}

// --config may be a run config (prep under "prep") or a bare prep config.
PrepConfig prep_from(const Globals& g) {
  if (g.config.empty()) return {};
  const auto j = load_json(g.config);
  if (j.contains("prep") && j.at("prep").is_object()) return PrepConfig::from_json(j.at("prep"));
  if (j.contains("prep") && j.at("prep").is_string()) {
    fs::path p = j.at("prep").get<std::string>();
    if (p.is_relative()) p = fs::path(g.config).parent_path() / p;
    return PrepConfig::from_json(load_json(p.string()));
  }
  return PrepConfig::from_json(j);
}

std::optional<Period> opt_period(const std::string& s, const char* flag) {
  if (s.empty()) return std::nullopt;
  const auto p = Period::parse(s);
  if (!p) throw DataError(std::string(flag) + " must be YYYY-MM or YYYY-MM-DD");
  return p;
}

Granularity granularity_of(const std::string& s) {
  if (s == "month") return Granularity::kMonth;
  if (s == "day") return Granularity::kDay;
  throw DataError("granularity must be 'month' or 'day'");
}

void emit(const std::string& out, const std::string& content) {
  if (out.empty() || out == "-")
    std::cout << content;
  else
    text::write_file(out, content);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adoptrace: technology-adoption sentiment pipeline"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Random seed for sampling and task order")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads per stage")
      ->check(CLI::Range(1u, 256u))
      ->capture_default_str();
  app.add_option("--config", g.config, "Run config (JSON); also supplies prep settings");

  std::function<void()> action;

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Validate, deduplicate and partition a corpus by month");
  std::string in_path, out_path;
  double malformed = 0.10;
  bool keep_all_lang = false;
  ingest->add_option("input", in_path, "Newline-delimited record file")->required();
  ingest->add_option("--out", out_path, "Partition directory")->required();
  ingest->add_option("--max-malformed", malformed, "Abort above this malformed-line fraction")
      ->capture_default_str();
  ingest->add_flag("--all-languages", keep_all_lang, "Keep records whose lang is not English");
  ingest->callback([&] {
    action = [&] {
      const auto prep = prep_from(g);
      const auto stats = pipeline::stage_ingest(
          in_path, out_path, {malformed, prep.english_only && !keep_all_lang, g.threads});
      std::cout << stats.to_json().dump(2) << "\n";
      for (const auto& e : stats.errors) std::cerr << "warning: " << e << "\n";
    };
  });

  // extract
  auto* extract_cmd = app.add_subcommand("extract", "Normalize records and extract aspect mentions");
  std::string terms_path = data_path("terms/technology.txt");
  extract_cmd->add_option("--terms", terms_path, "Term file, one phrase per line")->capture_default_str();
  extract_cmd->add_option("--in", in_path, "Partition directory")->required();
  extract_cmd->add_option("--out", out_path, "Mentions file (JSONL)")->required();
  extract_cmd->callback([&] {
    action = [&] {
      const auto stats = pipeline::stage_extract(in_path, terms_path, prep_from(g), out_path, g.threads);
      std::cout << stats.to_json().dump(2) << "\n";
    };
  });

  // score
  auto* score_cmd = app.add_subcommand("score", "Score mention records with the valence engine");
  std::string lexicon_path = data_path("lexicon/vader_lexicon.txt");
  std::string emoji_path = data_path("lexicon/emoji_utf8_lexicon.txt");
  std::string granularity = "month";
  bool no_emoji = false;
  score_cmd->add_option("--lexicon", lexicon_path, "Valence lexicon")->capture_default_str();
  score_cmd->add_option("--emoji", emoji_path, "Emoji description table")->capture_default_str();
  score_cmd->add_flag("--no-emoji", no_emoji, "Do not translate emoji");
  score_cmd->add_option("--granularity", granularity, "month or day")->capture_default_str();
  score_cmd->add_option("--in", in_path, "Mentions file")->required();
  score_cmd->add_option("--out", out_path, "Scored file (TSV)")->required();
  score_cmd->callback([&] {
    action = [&] {
      pipeline::ScoreOptions so;
      so.lexicon = lexicon_path;
      if (!no_emoji) so.emoji = emoji_path;
      so.granularity = granularity_of(granularity);
      so.threads = g.threads;
      std::cout << "scored_rows\t" << pipeline::stage_score(in_path, so, out_path) << "\n";
    };
  });

  // aggregate
  auto* agg_cmd = app.add_subcommand("aggregate", "Aggregate scored rows into aspect-period cells");
  agg_cmd->add_option("--in", in_path, "Scored file")->required();
  agg_cmd->add_option("--out", out_path, "Cells file (TSV)")->required();
  agg_cmd->callback([&] {
    action = [&] { std::cout << "cells\t" << pipeline::stage_aggregate(in_path, out_path, g.threads) << "\n"; };
  });

  // report
  auto* report_cmd = app.add_subcommand("report", "Render a polarity grid or term ranking");
  std::string cells_path, scored_path, mentions_path, aspects, from, to, format = "svg", sector,
      title = "Aspect polarity by period";
  std::size_t top_k = 0;
  report_cmd->add_option("--cells", cells_path, "Cells file");
  report_cmd->add_option("--aspects", aspects, "Comma-separated aspects, in display order");
  report_cmd->add_option("--from", from, "First period (YYYY-MM or YYYY-MM-DD)");
  report_cmd->add_option("--to", to, "Last period");
  report_cmd->add_option("--format", format, "svg or csv")
      ->check(CLI::IsMember({"svg", "csv"}))
      ->capture_default_str();
  report_cmd->add_option("--sector", sector, "Sector filter config; needs --scored and --mentions");
  report_cmd->add_option("--scored", scored_path, "Scored file (sector views)");
  report_cmd->add_option("--mentions", mentions_path, "Mentions file (sector views, --top)");
  report_cmd->add_option("--top", top_k, "Print the k most frequent terms instead of a grid");
  report_cmd->add_option("--title", title, "Chart title");
  report_cmd->add_option("--out", out_path, "Output file (default stdout)");
  report_cmd->callback([&] {
    action = [&] {
      if (top_k > 0) {
        if (mentions_path.empty()) throw DataError("--top needs --mentions");
        std::vector<AspectMention> flat;
        for (const auto& m : pipeline::parse_mentions(text::read_file(mentions_path)))
          flat.insert(flat.end(), m.mentions.begin(), m.mentions.end());
        return emit(out_path, pipeline::format_top_terms(top_terms(flat, top_k)));
      }
      CellMap cells;
      if (!sector.empty()) {
        if (scored_path.empty() || mentions_path.empty())
          throw DataError("--sector needs --scored and --mentions");
        const auto filter = load_sector(sector);
        std::set<std::string> ids;
        for (const auto& m : pipeline::parse_mentions(text::read_file(mentions_path)))
          if (filter.matches(m.matching_view)) ids.insert(m.id);
        std::vector<ScoredMention> rows;
        for (auto& s : parse_scored(text::read_file(scored_path)))
          if (ids.count(s.record_id)) rows.push_back(std::move(s));
        cells = aggregate_parallel(rows, g.threads);
        title += " (" + filter.name() + ")";
      } else {
        if (cells_path.empty()) throw DataError("report needs --cells (or --sector, or --top)");
        cells = parse_cells(text::read_file(cells_path));
      }
      pipeline::ReportOptions ro;
      if (!aspects.empty()) {
        ro.aspects.emplace();
        for (auto a : text::split(aspects, ',')) ro.aspects->emplace_back(text::trim(a));
      }
      ro.from = opt_period(from, "--from");
      ro.to = opt_period(to, "--to");
      const auto grid = build_grid(cells, ro.aspects, pipeline::range_of(ro, cells));
      for (const auto& w : grid.warnings) std::cerr << "warning: " << w << "\n";
      emit(out_path, format == "csv" ? grid_to_csv(grid.grid) : grid_to_svg(grid.grid, title));
    };
  });

  // eval
  auto* eval = app.add_subcommand("eval", "Agreement, gold standard, confusion and sampling");
  eval->require_subcommand(1);
  std::string annotations_path, resolutions_path, gold_path, automated_path;
  std::size_t per_class = 50;

  auto* alpha_cmd = eval->add_subcommand("alpha", "Krippendorff's alpha over an annotation file");
  alpha_cmd->add_option("annotations", annotations_path, "Annotation file (TSV)")->required();
  alpha_cmd->add_option("--out", out_path, "Report file (default stdout)");
  alpha_cmd->callback([&] {
    action = [&] {
      const auto r = krippendorff_alpha(parse_annotations(text::read_file(annotations_path)));
      emit(out_path, format_agreement(r));
    };
  });

  auto* gold_cmd = eval->add_subcommand("gold", "Majority gold labels; ties go to a resolution queue");
  gold_cmd->add_option("annotations", annotations_path, "Annotation file (TSV)")->required();
  gold_cmd->add_option("--resolutions", resolutions_path, "sample_id<TAB>label escalations");
  gold_cmd->add_option("--out", out_path, "Gold file (default stdout)");
  gold_cmd->callback([&] {
    action = [&] {
      std::map<std::string, Polarity> res;
      if (!resolutions_path.empty()) res = parse_label_map(text::read_file(resolutions_path));
      const auto r = gold_standard(parse_annotations(text::read_file(annotations_path)), res);
      std::string body = "sample_id\tlabel\tmethod\n";
      for (const auto& gl : r.gold)
        body += text::tsv_field(gl.sample_id) + "\t" + std::string(to_string(gl.label)) + "\t" +
                std::string(to_string(gl.method)) + "\n";
      emit(out_path, body);
      for (const auto& id : r.tie_queue) std::cerr << "tie: " << id << " awaits resolution\n";
    };
  });

  auto* conf_cmd = eval->add_subcommand("confusion", "Automated labels against gold labels");
  conf_cmd->add_option("--gold", gold_path, "Gold file from `eval gold`")->required();
  conf_cmd->add_option("--automated", automated_path,
                       "Campaign file (.jsonl) or sample_id<TAB>label file")
      ->required();
  conf_cmd->add_option("--out", out_path, "Report file (default stdout)");
  conf_cmd->callback([&] {
    action = [&] {
      std::vector<GoldLabel> gold;
      for (const auto& [id, label] : parse_label_map(text::read_file(gold_path)))
        gold.push_back({id, label, GoldMethod::kMajority});
      std::map<std::string, Polarity> automated;
      if (automated_path.ends_with(".jsonl")) {
        for (const auto& s : annotate::load_campaign_samples(automated_path)) automated[s.id] = s.polarity;
      } else {
        automated = parse_label_map(text::read_file(automated_path));
      }
      emit(out_path, format_confusion(confusion(gold, automated)));
    };
  });

  auto* sample_cmd = eval->add_subcommand("sample", "Stratified sample for an annotation campaign");
  sample_cmd->add_option("--mentions", mentions_path, "Mentions file")->required();
  sample_cmd->add_option("--scored", scored_path, "Scored file")->required();
  sample_cmd->add_option("--per-class", per_class, "Records per polarity")->capture_default_str();
  sample_cmd->add_option("--out", out_path, "Campaign file (JSONL)")->required();
  sample_cmd->callback([&] {
    action = [&] {
      const auto n = pipeline::stage_sample(mentions_path, scored_path, per_class, g.seed, out_path);
      std::cout << "samples\t" << n << "\n";
    };
  });

  // serve
  auto* serve = app.add_subcommand("serve", "Run the annotation service");
  std::string campaign_path, log_path, static_dir, host = "127.0.0.1", campaign_id = "default";
  int port = 8080;
  std::size_t cap = 5;
  serve->add_option("--campaign", campaign_path, "Campaign file (JSONL)")->required();
  serve->add_option("--log", log_path, "Append-only annotation log")->required();
  serve->add_option("--port", port, "Port (0 picks a free one)")->capture_default_str();
  serve->add_option("--host", host, "Bind address")->capture_default_str();
  serve->add_option("--cap", cap, "Annotations per sample")->capture_default_str();
  serve->add_option("--id", campaign_id, "Campaign identifier")->capture_default_str();
  serve->add_option("--static", static_dir, "Directory with the UI bundle");
  serve->callback([&] {
    action = [&] {
      annotate::Campaign campaign(annotate::load_campaign_samples(campaign_path),
                                  {campaign_id, cap, g.seed}, fs::path(log_path));
      annotate::ServerOptions so;
      so.host = host;
      so.port = port;
      if (!static_dir.empty()) so.static_dir = static_dir;
      annotate::AnnotationServer server(campaign, so);
      std::cerr << "serving campaign '" << campaign_id << "' on " << host << ":" << port << "\n";
      server.run();
    };
  });

  // run
  auto* run = app.add_subcommand("run", "Run every stage from the --config file");
  std::string run_out;
  run->add_option("--out", run_out, "Output directory (overrides out_dir)");
  run->callback([&] {
    action = [&] {
      if (g.config.empty()) throw DataError("run needs --config <file>");
      auto cfg = pipeline::RunConfig::load(g.config);
      if (!run_out.empty()) cfg.out_dir = run_out;
      const auto* threads_opt = app.get_option("--threads");
      const unsigned threads = threads_opt->count() ? g.threads : cfg.threads.value_or(g.threads);
      const auto r = pipeline::run_pipeline(cfg, threads);
      for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
      std::cout << "records\t" << r.ingest.kept << "\nrecords_with_terms\t"
                << r.extract.records_with_terms << "\nscored_rows\t" << r.scored_rows
                << "\ncells\t" << r.cells << "\nartifacts\t" << r.outputs.size() << "\nmanifest\t"
                << (cfg.out_dir / "manifest.json").string() << "\n";
    };
  });

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic corpus and its manifest");
  std::size_t records = 1000;
  std::string manifest_path;
  synth_cmd->add_option("--records", records, "Kept records")->capture_default_str();
  synth_cmd->add_option("--out", out_path, "Corpus file")->required();
  synth_cmd->add_option("--manifest", manifest_path, "Manifest file (JSON)");
  synth_cmd->callback([&] {
    action = [&] {
      synth::Options o;
      o.records = records;
      o.seed = g.seed;
      const auto out = synth::generate(o);
      text::write_file(out_path, out.jsonl);
      if (!manifest_path.empty()) text::write_file(manifest_path, out.manifest.to_json().dump(2) + "\n");
      std::cout << "lines\t" << out.manifest.lines << "\nkept\t" << out.manifest.kept << "\n";
    };
  });

  CLI11_PARSE(app, argc, argv);
  try {
    action();
  } catch (const pipeline::StageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
