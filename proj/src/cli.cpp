#include "folforge/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "folforge/augment.hpp"
#include "folforge/config.hpp"
#include "folforge/diagnostics.hpp"
#include "folforge/extraction.hpp"
#include "folforge/perturb.hpp"
#include "folforge/pipeline.hpp"
#include "folforge/reasoner.hpp"
#include "folforge/record.hpp"
#include "folforge/syntax.hpp"
#include "folforge/verify.hpp"

namespace folforge::cli {

namespace {

using json = nlohmann::ordered_json;

// Bad invocation: missing files, invalid config, contradictory flags.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> nonempty_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") != std::string::npos) out.push_back(line);
  }
  return out;
}

std::vector<Record> load_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  return read_records(in);
}

// Writes through a temporary sibling so readers never see partial output.
void write_atomic(const std::string& path, const std::string& content) {
  const auto tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw UsageError("cannot write " + path);
    out << content;
    if (!out.flush()) {
      std::remove(tmp.c_str());
      throw UsageError("cannot write " + path);
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::remove(tmp.c_str());
    throw UsageError("cannot write " + path + ": " + ec.message());
  }
}

std::string jsonl(const std::vector<json>& rows) {
  std::string out;
  for (const auto& r : rows) out += r.dump() + "\n";
  return out;
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Options shared by every subcommand; values land here for whichever one ran.
struct Common {
  std::string config_path;
  std::size_t workers = 0;
  std::uint64_t seed = 0;
};

void add_common(CLI::App* sub, Common& c, bool with_seed) {
  sub->add_option("--config", c.config_path, "Configuration file (TOML-style sections)")->check(CLI::ExistingFile);
  sub->add_option("--workers", c.workers, "Worker threads; output order does not depend on it")
      ->check(CLI::Range(std::size_t{1}, std::size_t{1024}));
  if (with_seed) sub->add_option("--seed", c.seed, "Random seed")->required();
}

bool given(const CLI::App* sub, const std::string& name) {
  const auto* opt = sub->get_option_no_throw(name);
  return opt && opt->count() > 0;
}

Config resolve(const CLI::App* sub, const Common& c) {
  Config cfg;
  try {
    if (!c.config_path.empty()) cfg = load_config(c.config_path);
    if (given(sub, "--workers")) cfg.workers = c.workers;
    if (given(sub, "--seed")) cfg.seed = c.seed;
    cfg.validate();
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  return cfg;
}

pipeline::Options pipeline_options(const Config& cfg) { return {cfg.budget, cfg.strict_lints, cfg.workers}; }

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"folforge: first-order logic translation toolkit", "folforge"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "folforge 1.0.0");
  Common common;

  // parse
  auto* parse_cmd = app.add_subcommand("parse", "Parse formulas and print their canonical form, one per line");
  std::string parse_text, parse_in, parse_style = "unicode";
  parse_cmd->add_option("formula", parse_text, "Formula text");
  parse_cmd->add_option("--in", parse_in, "File with one formula per line")->check(CLI::ExistingFile);
  parse_cmd->add_option("--style", parse_style, "Output style")->check(CLI::IsMember({"unicode", "ascii"}));
  add_common(parse_cmd, common, false);

  // lint
  auto* lint_cmd = app.add_subcommand("lint", "Report taxonomy diagnostics for a set of formulas");
  std::string lint_in, lint_preds, lint_format = "text";
  lint_cmd->add_option("--in", lint_in, "File with one formula per line")->required()->check(CLI::ExistingFile);
  lint_cmd->add_option("--predicates", lint_preds, "File with one predicate declaration per line")
      ->check(CLI::ExistingFile);
  lint_cmd->add_option("--format", lint_format, "Output format")->check(CLI::IsMember({"text", "json"}));
  add_common(lint_cmd, common, false);

  // prove
  auto* prove_cmd = app.add_subcommand("prove", "Decide whether the premises entail the conclusion");
  std::string prove_premises, prove_conclusion;
  bool prove_strict = false;
  prove_cmd->add_option("--premises", prove_premises, "File with one premise formula per line")
      ->required()
      ->check(CLI::ExistingFile);
  prove_cmd->add_option("--conclusion", prove_conclusion, "File holding the conclusion formula")
      ->required()
      ->check(CLI::ExistingFile);
  prove_cmd->add_flag("--strict", prove_strict, "Also report contradictory premises");
  add_common(prove_cmd, common, false);

  // extract
  auto* extract_cmd = app.add_subcommand("extract", "Recover a structured translation from raw generator output");
  std::string extract_in;
  std::size_t extract_n = 0;
  extract_cmd->add_option("--in", extract_in, "Raw generation text")->required()->check(CLI::ExistingFile);
  extract_cmd->add_option("--premises", extract_n, "Expected number of premises")->required();
  add_common(extract_cmd, common, false);

  // filter
  auto* filter_cmd = app.add_subcommand("filter", "Keep records whose translations prove their gold label");
  std::string filter_in, filter_out, filter_report;
  bool filter_strict = false;
  filter_cmd->add_option("--in", filter_in, "Input records (JSONL)")->required()->check(CLI::ExistingFile);
  filter_cmd->add_option("--out", filter_out, "Retained records (JSONL)")->required();
  filter_cmd->add_option("--report", filter_report, "Filter report (JSON)");
  auto* filter_strict_opt = filter_cmd->add_flag("--strict-lints", filter_strict, "Reject on lints as well");
  add_common(filter_cmd, common, false);

  // stats
  auto* stats_cmd = app.add_subcommand("stats", "Error-kind distribution over a record corpus");
  std::string stats_in, stats_out, stats_format = "csv";
  stats_cmd->add_option("--in", stats_in, "Input records (JSONL)")->required()->check(CLI::ExistingFile);
  stats_cmd->add_option("--out", stats_out, "Output file (default: standard output)");
  stats_cmd->add_option("--format", stats_format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  add_common(stats_cmd, common, false);

  // augment
  auto* augment_cmd = app.add_subcommand("augment", "Split records into incremental training examples");
  std::string augment_in, augment_out;
  augment_cmd->add_option("--in", augment_in, "Input records (JSONL)")->required()->check(CLI::ExistingFile);
  augment_cmd->add_option("--out", augment_out, "Training examples (JSONL)")->required();
  add_common(augment_cmd, common, false);

  // perturb
  auto* perturb_cmd = app.add_subcommand("perturb", "Build a verifier corpus from clean seed records");
  std::string perturb_in, perturb_out, perturb_report, perturb_kinds, perturb_style, perturb_harvest;
  double perturb_fraction = 0.0;
  perturb_cmd->add_option("--in", perturb_in, "Seed records (JSONL)")->required()->check(CLI::ExistingFile);
  perturb_cmd->add_option("--out", perturb_out, "Verifier instances (JSONL)")->required();
  perturb_cmd->add_option("--report", perturb_report, "Composition report (JSON)");
  auto* fraction_opt = perturb_cmd->add_option("--fraction", perturb_fraction, "Perturbed share, in (0.5, 1)");
  auto* kinds_opt = perturb_cmd->add_option("--kinds", perturb_kinds, "Comma-separated perturbation kinds");
  perturb_cmd->add_option("--style", perturb_style, "Restrict kinds to one dataset style")
      ->check(CLI::IsMember({"folio", "proofwriter"}));
  perturb_cmd->add_option("--harvest", perturb_harvest, "Predicted/gold pairs (JSONL of {\"predicted\",\"gold\"})")
      ->check(CLI::ExistingFile);
  add_common(perturb_cmd, common, true);
  perturb_cmd->footer([] {
    std::string text = "Predicate kinds:";
    for (auto k : perturb::kPredicateKinds) text += " " + std::string(perturb::to_string(k));
    text += "\nFOL kinds:";
    for (auto k : perturb::kFolKinds) text += " " + std::string(perturb::to_string(k));
    return text;
  }());

  // infer
  auto* infer_cmd = app.add_subcommand("infer", "Generate translations through a generator and optional verifiers");
  std::string infer_in, infer_out, infer_audit, infer_playback, infer_strategy = "incremental", infer_mode,
                                                                infer_corrector;
  infer_cmd->add_option("--in", infer_in, "Input records (JSONL)")->required()->check(CLI::ExistingFile);
  infer_cmd->add_option("--out", infer_out, "Translations (JSONL)")->required();
  infer_cmd->add_option("--audit", infer_audit, "Audit log (JSONL)");
  infer_cmd->add_option("--strategy", infer_strategy, "Generation strategy")
      ->check(CLI::IsMember({"vanilla", "incremental"}));
  infer_cmd->add_option("--mode", infer_mode, "Verifier mode")->check(CLI::IsMember({"none", "on-off", "on-on"}));
  infer_cmd->add_option("--corrector", infer_corrector, "Verifier implementation")
      ->check(CLI::IsMember({"rule", "endpoint"}));
  infer_cmd->add_option("--playback", infer_playback,
                        "Scripted outputs: JSON object mapping record id to an array of generations")
      ->check(CLI::ExistingFile);
  add_common(infer_cmd, common, false);
  infer_cmd->footer(
      "Without --playback, prompts go to the HTTP endpoint from [endpoint] url or FOLFORGE_GEN_URL\n"
      "(bearer token from [endpoint] token or FOLFORGE_GEN_TOKEN).");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    const auto& subs = app.get_subcommands();
    err << "error: " << e.what() << "\n\n" << (subs.empty() ? app.help() : subs.front()->help("folforge"));
    return 2;
  }

  try {
    const auto cfg = resolve(app.get_subcommands().front(), common);

    if (parse_cmd->parsed()) {
      if (parse_text.empty() == parse_in.empty()) throw UsageError("give exactly one of a formula or --in");
      const auto lines = parse_in.empty() ? std::vector<std::string>{parse_text} : nonempty_lines(read_file(parse_in));
      const auto style = parse_style == "ascii" ? PrintStyle::Ascii : PrintStyle::Unicode;
      int code = 0;
      for (std::size_t i = 0; i < lines.size(); ++i) {
        auto r = parse(lines[i]);
        if (r) {
          out << print(r.formula(), style) << '\n';
        } else {
          out << "formula " << i + 1 << ": " << format_diagnostic(r.diagnostic()) << '\n';
          code = 1;
        }
      }
      return code;
    }

    if (lint_cmd->parsed()) {
      const auto lines = nonempty_lines(read_file(lint_in));
      std::vector<PredicateDecl> decls;
      if (!lint_preds.empty()) {
        for (const auto& l : nonempty_lines(read_file(lint_preds))) {
          auto d = parse_predicate_decl(l);
          if (!d) throw UsageError("not a predicate declaration: " + l);
          decls.push_back(*d);
        }
      }
      std::vector<Diagnostic> diags;
      std::vector<Formula> formulas;
      for (std::size_t i = 0; i < lines.size(); ++i) {
        auto r = parse(lines[i]);
        if (!r) {
          auto d = r.diagnostic();
          d.source = i;
          diags.push_back(d);
          continue;
        }
        for (auto d : lint_formula(r.formula())) {
          d.source = i;
          diags.push_back(d);
        }
        formulas.push_back(r.formula());
      }
      // lint_corpus numbers sources over the parsed subset; map them back.
      std::vector<std::size_t> parsed_index;
      for (std::size_t i = 0; i < lines.size(); ++i) {
        if (parse(lines[i])) parsed_index.push_back(i);
      }
      for (auto d : lint_corpus(formulas, decls)) {
        if (d.source < parsed_index.size()) d.source = parsed_index[d.source];
        diags.push_back(d);
      }
      std::stable_sort(diags.begin(), diags.end(),
                       [](const Diagnostic& a, const Diagnostic& b) { return a.source < b.source; });
      if (lint_format == "json") {
        json arr = json::array();
        for (const auto& d : diags) arr.push_back(to_json(d));
        out << arr.dump(2) << '\n';
      } else {
        for (const auto& d : diags) out << "formula " << d.source + 1 << ": " << format_diagnostic(d) << '\n';
        out << lines.size() << " formula(s), " << error_count(diags) << " error(s), " << diags.size() - error_count(diags)
            << " lint(s)\n";
      }
      return error_count(diags) ? 1 : 0;
    }

    if (prove_cmd->parsed()) {
      std::vector<Formula> premises;
      const auto premise_lines = nonempty_lines(read_file(prove_premises));
      for (std::size_t i = 0; i < premise_lines.size(); ++i) {
        auto r = parse(premise_lines[i]);
        if (!r) {
          out << reasoner::Outcome::error(r.diagnostic()).to_string() << '\n';
          err << "premise " << i + 1 << ": " << format_diagnostic(r.diagnostic()) << '\n';
          return 1;
        }
        premises.push_back(r.formula());
      }
      const auto conclusion_lines = nonempty_lines(read_file(prove_conclusion));
      if (conclusion_lines.size() != 1) throw UsageError("conclusion file must hold exactly one formula");
      auto c = parse(conclusion_lines[0]);
      if (!c) {
        out << reasoner::Outcome::error(c.diagnostic()).to_string() << '\n';
        err << "conclusion: " << format_diagnostic(c.diagnostic()) << '\n';
        return 1;
      }
      auto r = reasoner::prove_checked(premises, c.formula(), cfg.budget, prove_strict || cfg.strict_premises);
      out << r.outcome.to_string() << '\n';
      if (r.contradictory_premises) err << "warning: premises are contradictory\n";
      if (r.outcome.diagnostic()) err << format_diagnostic(*r.outcome.diagnostic()) << '\n';
      return r.outcome.value() == reasoner::Outcome::Value::Error ? 1 : 0;
    }

    if (extract_cmd->parsed()) {
      auto r = extract(read_file(extract_in), extract_n);
      if (!r) {
        for (const auto& d : r.diagnostics()) out << format_diagnostic(d) << '\n';
        return 1;
      }
      out << to_json(r.translation()).dump(2) << '\n';
      return 0;
    }

    if (filter_cmd->parsed()) {
      auto opts = pipeline_options(cfg);
      if (filter_strict_opt->count()) opts.strict_lints = filter_strict;
      const auto records = load_records(filter_in);
      std::ostringstream kept;
      auto report = pipeline::build_dataset(records, kept, opts);
      write_atomic(filter_out, kept.str());
      auto j = report.to_json();
      if (!filter_report.empty()) write_atomic(filter_report, j.dump(2) + "\n");
      out << "retained " << report.retained << " of " << report.total() << " (" << report.retention()
          << "); rejected format " << report.rejected_format << ", syntax " << report.rejected_syntax << ", semantic "
          << report.rejected_semantic << '\n';
      return 0;
    }

    if (stats_cmd->parsed()) {
      const auto h = pipeline::error_distribution(load_records(stats_in), pipeline_options(cfg));
      const auto text = stats_format == "csv" ? histogram_csv(h) : histogram_json(h) + "\n";
      if (stats_out.empty()) {
        out << text;
      } else {
        write_atomic(stats_out, text);
      }
      return 0;
    }

    if (augment_cmd->parsed()) {
      augment::Summary summary;
      augment::Options opts{cfg.instructions.predicate, cfg.instructions.fol};
      std::vector<json> rows;
      for (const auto& e : augment::augment_corpus(load_records(augment_in), &summary, opts)) rows.push_back(to_json(e));
      write_atomic(augment_out, jsonl(rows));
      char growth[32];
      std::snprintf(growth, sizeof growth, "%.2f", summary.growth());
      out << summary.examples << " example(s) from " << summary.records_in - summary.records_dropped << " record(s); "
          << summary.records_dropped << " dropped; growth " << growth << "x\n";
      return 0;
    }

    if (perturb_cmd->parsed()) {
      perturb::Config pc;
      pc.seed = *cfg.seed;
      pc.workers = cfg.workers;
      pc.perturbed_fraction = fraction_opt->count() ? perturb_fraction : cfg.perturbed_fraction;
      pc.kinds = cfg.kinds;
      if (kinds_opt->count()) {
        pc.kinds.clear();
        for (const auto& name : split_commas(perturb_kinds)) {
          auto k = perturb::kind_from_string(name);
          if (!k) throw UsageError("unknown perturbation kind '" + name + "'");
          pc.kinds.push_back(*k);
        }
      }
      if (!perturb_style.empty()) {
        const auto style = perturb_style == "folio" ? perturb::Style::Folio : perturb::Style::ProofWriter;
        std::vector<perturb::PerturbKind> allowed = perturb::kinds_for(style, perturb::Task::Predicate);
        for (auto k : perturb::kinds_for(style, perturb::Task::FOL)) allowed.push_back(k);
        if (pc.kinds.empty()) {
          pc.kinds = allowed;
        } else {
          std::vector<perturb::PerturbKind> both;
          for (auto k : pc.kinds) {
            if (std::find(allowed.begin(), allowed.end(), k) != allowed.end()) both.push_back(k);
          }
          pc.kinds = both;
          if (pc.kinds.empty()) throw UsageError("no requested kind belongs to style " + perturb_style);
        }
      }
      std::vector<perturb::VerifierInstance> harvested;
      if (!perturb_harvest.empty()) {
        std::vector<perturb::HarvestPair> pairs;
        std::size_t line_no = 0;
        for (const auto& line : nonempty_lines(read_file(perturb_harvest))) {
          ++line_no;
          try {
            auto j = json::parse(line);
            pairs.push_back({translation_from_json(j.at("predicted")), record_from_json(j.at("gold"))});
          } catch (const std::exception& e) {
            throw RecordError(perturb_harvest + ": line " + std::to_string(line_no) + ": " + e.what());
          }
        }
        harvested = perturb::harvest_errors(pairs);
      }
      perturb::DatasetReport report;
      std::vector<perturb::VerifierInstance> instances;
      try {
        instances = perturb::build_verifier_dataset(load_records(perturb_in), pc, harvested, &report);
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      std::vector<json> rows;
      for (const auto& v : instances) rows.push_back(to_json(v));
      write_atomic(perturb_out, jsonl(rows));
      if (!perturb_report.empty()) write_atomic(perturb_report, report.to_json().dump(2) + "\n");
      out << instances.size() << " instance(s) from " << report.records_used << " seed record(s); "
          << report.records_skipped << " skipped\n";
      return 0;
    }

    if (infer_cmd->parsed()) {
      verify::InferOptions opts;
      opts.strategy = infer_strategy == "vanilla" ? verify::Strategy::Vanilla : verify::Strategy::Incremental;
      opts.mode = infer_mode.empty() ? cfg.mode : *verify::mode_from_string(infer_mode);
      opts.policy = cfg.tokens;
      opts.instructions = cfg.instructions;
      opts.workers = cfg.workers;
      const auto corrector_kind = infer_corrector.empty() ? cfg.corrector : infer_corrector;

      verify::GeneratorFactory factory;
      if (!infer_playback.empty()) {
        auto book = json::parse(read_file(infer_playback), nullptr, false);
        if (book.is_discarded() || !book.is_object()) throw UsageError("playback file must hold a JSON object");
        auto scripts = std::make_shared<std::map<std::string, std::vector<std::string>>>();
        for (auto it = book.begin(); it != book.end(); ++it) {
          if (!it.value().is_array()) throw UsageError("playback entry '" + it.key() + "' is not an array");
          auto& script = (*scripts)[it.key()];
          for (const auto& s : it.value()) {
            if (!s.is_string()) throw UsageError("playback entry '" + it.key() + "' holds a non-string");
            script.push_back(s.get<std::string>());
          }
        }
        factory = [scripts](const Record& rec) {
          auto it = scripts->find(rec.id);
          return std::make_shared<verify::MockPlayback>(it == scripts->end() ? std::vector<std::string>{}
                                                                             : it->second);
        };
      } else {
        if (cfg.endpoint.url.empty()) throw UsageError("no generator: give --playback or set FOLFORGE_GEN_URL");
        std::shared_ptr<verify::Generator> endpoint;
        try {
          endpoint = std::make_shared<verify::ExternalEndpoint>(cfg.endpoint);
        } catch (const std::invalid_argument& e) {
          throw UsageError(e.what());
        }
        factory = [endpoint](const Record&) { return endpoint; };
      }

      std::unique_ptr<verify::Corrector> corrector;
      if (opts.mode != verify::Mode::None) {
        if (corrector_kind == "endpoint") {
          auto ec = cfg.endpoint;
          if (!cfg.corrector_url.empty()) ec.url = cfg.corrector_url;
          try {
            corrector = std::make_unique<verify::ExternalCorrector>(ec);
          } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
          }
        } else {
          corrector = std::make_unique<verify::RuleCorrector>();
        }
      }

      const auto items = verify::infer_all(load_records(infer_in), factory, corrector.get(), corrector.get(), opts);
      std::vector<json> rows, audit_rows;
      std::size_t failed = 0;
      for (const auto& item : items) {
        json row;
        row["id"] = item.id;
        row["translation"] = item.translation ? to_json(*item.translation) : json(nullptr);
        json diags = json::array();
        for (const auto& d : item.diagnostics) diags.push_back(to_json(d));
        row["diagnostics"] = diags;
        row["error"] = item.error.empty() ? json(nullptr) : json(item.error);
        if (!item.translation) ++failed;
        rows.push_back(row);
        for (const auto& e : item.audit) {
          json a;
          a["id"] = item.id;
          a.update(to_json(e));
          audit_rows.push_back(a);
        }
      }
      write_atomic(infer_out, jsonl(rows));
      if (!infer_audit.empty()) write_atomic(infer_audit, jsonl(audit_rows));
      out << items.size() - failed << " of " << items.size() << " record(s) translated\n";
      return failed ? 1 : 0;
    }
  } catch (const UsageError& e) {
    const auto& subs = app.get_subcommands();
    err << "error: " << e.what() << "\n\n" << (subs.empty() ? app.help() : subs.front()->help("folforge"));
    return 2;
  } catch (const RecordError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace folforge::cli
