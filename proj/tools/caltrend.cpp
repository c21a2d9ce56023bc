// Batch pipeline driver and server launcher.
//
// Artifact tree under --out:
//   ingest/   events.log (deidentified), report.json, redaction.tsv
//   label/    events.log (labels filled), stats.json
//   features/ features.tsv (raw), standardized.tsv
//   project/  projection.tsv, metadata.json
//   topics/   topics.json
//   heatmap/  heatmap.json

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "caltrend/caltrend.hpp"
#include "caltrend/server.hpp"

namespace fs = std::filesystem;
using namespace caltrend;

namespace {

struct StageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

fs::path stage_dir(const std::string& root, const char* stage) {
  fs::path dir = fs::path(root) / stage;
  fs::create_directories(dir);
  return dir;
}

fs::path upstream(const std::string& root, const char* stage, const char* file) {
  fs::path p = fs::path(root) / stage / file;
  if (!fs::exists(p)) throw StageError(std::string("run ") + stage + " first (missing " + p.string() + ")");
  return p;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + p.string());
  return out;
}

void write_json(const fs::path& p, const nlohmann::json& j) {
  auto out = open_out(p);
  out << j.dump(2) << '\n';
}

EventStore load_store(const fs::path& events) {
  return build_store(parse_log_file(events.string()).events);
}

struct Flags {
  std::string input;
  std::string out = "caltrend-out";
  std::string names;
  std::string work_lexicon;
  std::string home_lexicon;
  std::string weights = "all";
  double perplexity = 30.0;
  int iterations = 1000;
  std::uint64_t seed = 0;
  std::uint64_t synth_seed = 7;
  std::size_t topics_k = 5;
  int port = 8080;
  std::string personas = "default";
  int users_per_persona = 100;
  int pii = 0;
  std::string users;
  std::string mode = "all";
  std::string diff;
  std::string salt = "caltrend";
};

void run_synth(const Flags& f) {
  std::vector<PersonaGroup> groups;
  if (f.personas == "default") {
    groups = default_personas(f.users_per_persona);
  } else if (f.personas == "full") {
    groups = full_scale_personas();
  } else {
    throw Error(ErrorCode::kInvalidArgument, "--personas must be default|full");
  }
  SynthOptions opts;
  opts.seed = f.synth_seed;
  opts.pii_plants = f.pii;
  const auto corpus = generate(groups, opts);
  fs::create_directories(f.out);
  {
    auto out = open_out(fs::path(f.out) / "events.log");
    write_log(out, corpus.events);
  }
  {
    auto out = open_out(fs::path(f.out) / "truth.txt");
    write_truth(out, corpus);
  }
  {
    auto out = open_out(fs::path(f.out) / "names.txt");
    write_names(out, corpus);
  }
  std::cout << "synth: " << corpus.events.size() << " events, " << corpus.truth.size() << " users\n";
}

void run_ingest(const Flags& f) {
  if (f.input.empty()) throw Error(ErrorCode::kInvalidArgument, "--input required");
  auto parsed = parse_log_file(f.input);
  NameLexicon names;
  if (!f.names.empty()) names = read_word_list_file(f.names);
  Deidentifier run(std::move(names), f.salt);
  std::vector<ScheduleEvent> clean;
  clean.reserve(parsed.events.size());
  for (const auto& e : parsed.events) clean.push_back(run.deidentify(e).first);
  const EventStore store = build_store(std::move(clean));

  const fs::path dir = stage_dir(f.out, "ingest");
  {
    auto out = open_out(dir / "events.log");
    write_log(out, store);
  }
  {
    auto out = open_out(dir / "redaction.tsv");
    for (const auto& [hash, ph] : run.map().entries) out << hash << '\t' << ph << '\n';
  }
  nlohmann::json report = to_json(parsed.report);
  report["users"] = store.size();
  write_json(dir / "report.json", report);
  std::cout << report.dump() << '\n';
}

void run_label(const Flags& f) {
  const auto events = upstream(f.out, "ingest", "events.log");
  ConceptLexicon lex = ConceptLexicon::defaults();
  if (!f.work_lexicon.empty() || !f.home_lexicon.empty()) {
    if (f.work_lexicon.empty() || f.home_lexicon.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "--work-lexicon and --home-lexicon go together");
    }
    lex = ConceptLexicon::from_files(f.work_lexicon, f.home_lexicon);
  }
  const EventStore store = label_store(load_store(events), lex);
  const fs::path dir = stage_dir(f.out, "label");
  {
    auto out = open_out(dir / "events.log");
    write_log(out, store);
  }
  const auto stats = to_json(corpus_stats(store));
  write_json(dir / "stats.json", stats);
  std::cout << stats.dump() << '\n';
}

void run_features(const Flags& f) {
  const EventStore store = load_store(upstream(f.out, "label", "events.log"));
  const FeatureMatrix raw = build_feature_matrix(store);
  const FeatureMatrix z = standardize(raw);
  const fs::path dir = stage_dir(f.out, "features");
  {
    auto out = open_out(dir / "features.tsv");
    write_feature_table(out, raw);
  }
  {
    auto out = open_out(dir / "standardized.tsv");
    write_feature_table(out, z);
  }
  std::cout << "features: " << raw.size() << " users\n";
}

WeightVector parse_weights(const std::string& text) {
  if (text.find(',') != std::string::npos) return WeightVector::parse(text);
  return weight_preset(text);
}

void run_project(const Flags& f) {
  std::ifstream in(upstream(f.out, "features", "standardized.tsv"));
  const FeatureMatrix z = read_feature_table(in);
  TsneParams params;
  params.perplexity = f.perplexity;
  params.iterations = f.iterations;
  params.seed = f.seed;
  if (params.exaggeration_iterations > params.iterations) params.exaggeration_iterations = params.iterations;
  if (params.momentum_switch_iteration > params.iterations) params.momentum_switch_iteration = params.iterations;
  const auto result = project(z, parse_weights(f.weights), params);
  const fs::path dir = stage_dir(f.out, "project");
  {
    auto out = open_out(dir / "projection.tsv");
    write_projection_table(out, z.user_ids, result);
  }
  write_json(dir / "metadata.json", run_metadata(result));
  for (const auto& w : result.warnings) std::cerr << "project: warning: " << w << '\n';
  std::cout << "project: " << result.coordinates.size() << " points, final KL " << result.final_kl() << '\n';
}

std::shared_ptr<const Dataset> labeled_dataset(const Flags& f, bool need_topics) {
  DatasetOptions opts;
  opts.topics.seed = f.seed;
  opts.topics.topics = f.topics_k;
  opts.fit_topics = need_topics;
  return Dataset::build(load_store(upstream(f.out, "label", "events.log")), opts);
}

bool parse_bool(const std::string& s) {
  if (s.empty() || s == "false" || s == "0") return false;
  if (s == "true" || s == "1") return true;
  throw Error(ErrorCode::kInvalidArgument, "--diff must be true|false");
}

void run_topics(const Flags& f) {
  const auto d = labeled_dataset(f, true);
  const auto ids = api::parse_user_set(f.users);
  const auto body = api::topics(*d, ids, parse_bool(f.diff));
  write_json(stage_dir(f.out, "topics") / "topics.json", body);
  std::cout << body.dump() << '\n';
}

void run_heatmap(const Flags& f) {
  const auto d = labeled_dataset(f, false);
  const auto ids = api::parse_user_set(f.users);
  const auto mode = parse_heatmap_mode(f.mode);
  if (!mode) throw Error(ErrorCode::kInvalidArgument, "--mode must be all|work|home");
  std::optional<HeatmapMode> diff;
  if (!f.diff.empty()) {
    diff = parse_heatmap_mode(f.diff);
    if (!diff) throw Error(ErrorCode::kInvalidArgument, "--diff must be all|work|home");
  }
  const auto body = api::weekly_heatmap(*d, ids, *mode, diff);
  write_json(stage_dir(f.out, "heatmap") / "heatmap.json", body);
  std::cout << body[diff ? "diff_counts" : "counts"].dump() << '\n';
}

void run_serve(const Flags& f) {
  std::string source = f.input;
  if (source.empty()) {
    if (const char* env = std::getenv("CALTREND_DATA")) source = env;
  }
  if (source.empty()) throw Error(ErrorCode::kInvalidArgument, "set CALTREND_DATA or --input");
  fs::path events = source;
  if (fs::is_directory(events)) events = upstream(source, "label", "events.log");
  DatasetOptions opts;
  opts.topics.seed = f.seed;
  opts.topics.topics = f.topics_k;
  opts.dataset_id = events.string();
  auto data = Dataset::build(load_store(events), opts);
  Server server(data);
  server.bind("0.0.0.0", f.port);
  std::cerr << "serve: " << data->user_ids().size() << " users on port " << f.port << '\n';
  server.listen();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Calendar analytics pipeline"};
  app.require_subcommand(1);
  Flags f;

  auto* synth = app.add_subcommand("synth", "generate a synthetic persona corpus");
  synth->add_option("--personas", f.personas, "default|full");
  synth->add_option("--users", f.users_per_persona, "users per persona (default personas)");
  synth->add_option("--pii", f.pii, "summaries with planted PII");
  synth->add_option("--seed", f.synth_seed);
  synth->add_option("--out", f.out);

  auto* ingest = app.add_subcommand("ingest", "parse and deidentify an event log");
  ingest->add_option("--input", f.input)->required();
  ingest->add_option("--names", f.names, "name lexicon");
  ingest->add_option("--salt", f.salt);
  ingest->add_option("--out", f.out);

  auto* label = app.add_subcommand("label", "apply life-mode labels");
  label->add_option("--work-lexicon", f.work_lexicon);
  label->add_option("--home-lexicon", f.home_lexicon);
  label->add_option("--out", f.out);

  auto* features = app.add_subcommand("features", "extract and standardize user features");
  features->add_option("--out", f.out);

  auto* project = app.add_subcommand("project", "weighted t-SNE projection");
  project->add_option("--weights", f.weights, "11 comma-separated weights or a preset (all|temporal|text|volume)");
  project->add_option("--perplexity", f.perplexity);
  project->add_option("--iterations", f.iterations);
  project->add_option("--seed", f.seed);
  project->add_option("--out", f.out);

  auto* topics = app.add_subcommand("topics", "word-cloud payloads for a selection");
  topics->add_option("--users", f.users, "comma-separated user ids (default all)");
  topics->add_option("--topics-k", f.topics_k);
  topics->add_option("--diff", f.diff, "true|false");
  topics->add_option("--seed", f.seed);
  topics->add_option("--out", f.out);

  auto* heatmap = app.add_subcommand("heatmap", "weekly heatmap for a selection");
  heatmap->add_option("--users", f.users, "comma-separated user ids (default all)");
  heatmap->add_option("--mode", f.mode, "all|work|home");
  heatmap->add_option("--diff", f.diff, "subtrahend mode");
  heatmap->add_option("--out", f.out);

  auto* serve = app.add_subcommand("serve", "run the HTTP API");
  serve->add_option("--input", f.input, "labeled events.log or artifact directory (default $CALTREND_DATA)");
  serve->add_option("--port", f.port);
  serve->add_option("--topics-k", f.topics_k);
  serve->add_option("--seed", f.seed);

  CLI11_PARSE(app, argc, argv);

  const std::string stage = app.get_subcommands().front()->get_name();
  try {
    if (stage == "synth") run_synth(f);
    if (stage == "ingest") run_ingest(f);
    if (stage == "label") run_label(f);
    if (stage == "features") run_features(f);
    if (stage == "project") run_project(f);
    if (stage == "topics") run_topics(f);
    if (stage == "heatmap") run_heatmap(f);
    if (stage == "serve") run_serve(f);
  } catch (const std::exception& e) {
    std::cerr << stage << ": error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
