#include "kgfuse/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <nlohmann/json.hpp>
#include <sstream>
#include <thread>

#include "kgfuse/error.hpp"
#include "kgfuse/realign.hpp"
#include "kgfuse/stemmer.hpp"
#include "kgfuse/text.hpp"

namespace kgfuse {

namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

template <typename T>
void read(const Json& obj, const char* key, T& dst) {
  if (obj.contains(key)) dst = obj.at(key).get<T>();
}

void read_path(const Json& obj, const char* key, fs::path& dst) {
  if (obj.contains(key)) dst = obj.at(key).get<std::string>();
}

// Rejects keys absent from the default layout.
void check_keys(const Json& given, const Json& reference, const std::string& prefix) {
  if (!given.is_object()) throw ConfigError("config: '" + prefix + "' must be an object");
  for (const auto& [key, value] : given.items()) {
    const std::string name = prefix.empty() ? key : prefix + "." + key;
    if (!reference.contains(key)) throw ConfigError("config: unknown key '" + name + "'");
    if (reference.at(key).is_object()) check_keys(value, reference.at(key), name);
  }
}

void flatten(const Json& j, const std::string& prefix, std::map<std::string, std::string>& out) {
  for (const auto& [key, value] : j.items()) {
    const std::string name = prefix.empty() ? key : prefix + "." + key;
    if (value.is_object()) {
      flatten(value, name, out);
    } else {
      out[name] = value.dump();
    }
  }
}

void require_file(const fs::path& path, const std::string& what) {
  if (path.empty()) throw ConfigError(what + " path is not set");
  if (!fs::exists(path)) throw ConfigError(what + " path does not exist: " + path.string());
}

// Validates everything a command needs before any work starts.
void check_kb_paths(const RunConfig& c) {
  if (c.fusion.kb_enabled[0]) require_file(c.paths.conceptnet, "ConceptNet");
  if (c.fusion.kb_enabled[1]) require_file(c.paths.webchild, "WebChild");
  if (c.fusion.kb_enabled[2]) require_file(c.paths.atomic, "ATOMIC");
}

std::vector<Prompt> load_split(const fs::path& path, const std::string& what) {
  require_file(path, what);
  return load_dataset(path);
}

std::vector<KnowledgeTriple> load_triples(const RunConfig& c, std::ostream& log) {
  std::vector<KnowledgeTriple> all;
  auto append = [&](std::vector<KnowledgeTriple> part, const ParseStats& stats, const char* name) {
    log << name << ": " << part.size() << " triples";
    if (stats.skipped_empty > 0) log << " (" << stats.skipped_empty << " rows with empty fields skipped)";
    log << "\n";
    all.insert(all.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  };
  if (c.fusion.kb_enabled[0]) {
    ParseStats s;
    append(parse_conceptnet(c.paths.conceptnet, &s), s, "conceptnet");
  }
  if (c.fusion.kb_enabled[1]) {
    ParseStats s;
    append(parse_webchild(c.paths.webchild, &s), s, "webchild");
  }
  if (c.fusion.kb_enabled[2]) {
    ParseStats s;
    append(parse_atomic(c.paths.atomic, &s), s, "atomic");
  }
  return all;
}

SubwordVocab vocab_for(const RunConfig& c, std::span<const Prompt> train) {
  if (!c.paths.vocab.empty()) return SubwordVocab::load(c.paths.vocab);
  return SubwordVocab::build_from_corpus(train, c.vocab_top_words);
}

VocabIndex index_for(const RunConfig& c, std::span<const Prompt> prompts, std::ostream& log) {
  const fs::path path = c.index_path();
  if (fs::exists(path)) return VocabIndex::load(path);
  return build_vocab_index(load_triples(c, log), prompts);
}

ModelConfig model_config(const RunConfig& c, const SubwordVocab& vocab) {
  ModelConfig m{c.encoder, c.fusion};
  m.encoder.vocab_size = static_cast<int>(vocab.size());
  return m;
}

std::string stage_error(const std::string& stage, const Error& e) { return "stage " + stage + ": " + e.what(); }

template <typename F>
auto run_stage(const std::string& stage, F&& f) {
  try {
    return f();
  } catch (const ConfigError& e) {
    throw ConfigError(stage_error(stage, e));
  } catch (const DataError& e) {
    throw DataError(stage_error(stage, e));
  } catch (const TrainingDiverged& e) {
    throw TrainingDiverged(stage_error(stage, e), e.step());
  }
}

struct TrainedModel {
  SubwordVocab vocab;
  VocabIndex index;
  Model model;
  TrainResult result;
};

TrainedModel train_model(const RunConfig& c, std::vector<MetricsRow>* partial, std::ostream* log) {
  const auto train_set = load_split(c.paths.train, "training set");
  std::vector<Prompt> dev_set;
  if (!c.paths.dev.empty()) dev_set = load_split(c.paths.dev, "dev set");
  auto vocab = vocab_for(c, train_set);
  std::vector<Prompt> all = train_set;
  all.insert(all.end(), dev_set.begin(), dev_set.end());
  std::ostringstream quiet;
  auto index = index_for(c, all, log ? *log : quiet);

  const auto max_len = static_cast<std::size_t>(c.encoder.max_len);
  const auto prepared = prepare_prompts(train_set, vocab, &index, max_len);
  const auto dev = prepare_prompts(dev_set, vocab, &index, max_len);

  TrainConfig tc = c.train;
  tc.seed = c.seed;
  Model model(model_config(c, vocab), index.relations(), derive_seed(c.seed, 0));
  TrainData data{train_set, prepared, dev, &vocab};
  auto progress = [&](const MetricsRow& row) {
    if (partial) {
      if (!partial->empty() && partial->back().step == row.step) {
        partial->back() = row;
      } else {
        partial->push_back(row);
      }
    }
    if (log && row.dev_accuracy) *log << "step " << row.step << " dev_accuracy " << fmt(*row.dev_accuracy) << "\n";
  };
  auto result = train(model, data, tc, progress);
  return {std::move(vocab), std::move(index), std::move(model), std::move(result)};
}

}  // namespace

std::size_t GridSpec::size() const {
  auto n = [](std::size_t k) { return k == 0 ? std::size_t{1} : k; };
  return n(batch_size.size()) * n(learning_rate.size()) * n(warmup.size()) * n(epochs.size());
}

std::string RunConfig::to_json() const {
  Json j;
  j["seed"] = seed;
  j["out"] = out.string();
  j["paths"] = {{"train", paths.train.string()},           {"dev", paths.dev.string()},
                {"conceptnet", paths.conceptnet.string()}, {"webchild", paths.webchild.string()},
                {"atomic", paths.atomic.string()},         {"vocab", paths.vocab.string()},
                {"index", paths.index.string()},           {"checkpoint", paths.checkpoint.string()}};
  j["vocab"] = {{"top_words", vocab_top_words}};
  j["encoder"] = {{"layers", encoder.layers},
                  {"width", encoder.width},
                  {"heads", encoder.heads},
                  {"ff_width", encoder.ff_width},
                  {"max_len", encoder.max_len}};
  j["kb"] = {{"conceptnet", fusion.kb_enabled[0]}, {"webchild", fusion.kb_enabled[1]}, {"atomic", fusion.kb_enabled[2]}};
  j["model"] = {{"reattention", fusion.reattention},
                {"reattention_width", fusion.reattention_width},
                {"reattention_heads", fusion.reattention_heads}};
  j["train"] = {{"batch_size", train.batch_size},
                {"learning_rate", train.learning_rate},
                {"epochs", train.epochs},
                {"lm_epochs", train.lm_epochs},
                {"warmup", train.warmup},
                {"weight_decay", train.weight_decay},
                {"beta1", train.beta1},
                {"beta2", train.beta2},
                {"adam_eps", train.adam_eps},
                {"max_grad_norm", train.max_grad_norm},
                {"mask_prob", train.mask_prob},
                {"mode", std::string(to_string(train.mode))},
                {"lm_order", std::string(to_string(train.lm_order))}};
  j["tune"] = {{"batch_size", grid.batch_size}, {"learning_rate", grid.learning_rate}, {"warmup", grid.warmup},
               {"epochs", grid.epochs},         {"budget", grid.budget},               {"jobs", grid.jobs}};
  j["synthetic"] = {{"n_train", synthetic.n_train},
                    {"n_dev", synthetic.n_dev},
                    {"noise_triples", synthetic.noise_triples},
                    {"seed", synthetic.seed}};
  return j.dump(2) + "\n";
}

RunConfig RunConfig::from_json(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  RunConfig c;
  check_keys(j, Json::parse(c.to_json()), "");
  try {
    read(j, "seed", c.seed);
    read_path(j, "out", c.out);
    if (j.contains("paths")) {
      const auto& p = j["paths"];
      read_path(p, "train", c.paths.train);
      read_path(p, "dev", c.paths.dev);
      read_path(p, "conceptnet", c.paths.conceptnet);
      read_path(p, "webchild", c.paths.webchild);
      read_path(p, "atomic", c.paths.atomic);
      read_path(p, "vocab", c.paths.vocab);
      read_path(p, "index", c.paths.index);
      read_path(p, "checkpoint", c.paths.checkpoint);
    }
    if (j.contains("vocab")) read(j["vocab"], "top_words", c.vocab_top_words);
    if (j.contains("encoder")) {
      const auto& e = j["encoder"];
      read(e, "layers", c.encoder.layers);
      read(e, "width", c.encoder.width);
      read(e, "heads", c.encoder.heads);
      read(e, "ff_width", c.encoder.ff_width);
      read(e, "max_len", c.encoder.max_len);
    }
    if (j.contains("kb")) {
      const auto& k = j["kb"];
      read(k, "conceptnet", c.fusion.kb_enabled[0]);
      read(k, "webchild", c.fusion.kb_enabled[1]);
      read(k, "atomic", c.fusion.kb_enabled[2]);
    }
    if (j.contains("model")) {
      const auto& m = j["model"];
      read(m, "reattention", c.fusion.reattention);
      read(m, "reattention_width", c.fusion.reattention_width);
      read(m, "reattention_heads", c.fusion.reattention_heads);
    }
    if (j.contains("train")) {
      const auto& t = j["train"];
      read(t, "batch_size", c.train.batch_size);
      read(t, "learning_rate", c.train.learning_rate);
      read(t, "epochs", c.train.epochs);
      read(t, "lm_epochs", c.train.lm_epochs);
      read(t, "warmup", c.train.warmup);
      read(t, "weight_decay", c.train.weight_decay);
      read(t, "beta1", c.train.beta1);
      read(t, "beta2", c.train.beta2);
      read(t, "adam_eps", c.train.adam_eps);
      read(t, "max_grad_norm", c.train.max_grad_norm);
      read(t, "mask_prob", c.train.mask_prob);
      if (t.contains("mode")) c.train.mode = train_mode_from_string(t["mode"].get<std::string>());
      if (t.contains("lm_order")) c.train.lm_order = lm_order_from_string(t["lm_order"].get<std::string>());
    }
    if (j.contains("tune")) {
      const auto& g = j["tune"];
      read(g, "batch_size", c.grid.batch_size);
      read(g, "learning_rate", c.grid.learning_rate);
      read(g, "warmup", c.grid.warmup);
      read(g, "epochs", c.grid.epochs);
      read(g, "budget", c.grid.budget);
      read(g, "jobs", c.grid.jobs);
    }
    if (j.contains("synthetic")) {
      const auto& s = j["synthetic"];
      read(s, "n_train", c.synthetic.n_train);
      read(s, "n_dev", c.synthetic.n_dev);
      read(s, "noise_triples", c.synthetic.noise_triples);
      read(s, "seed", c.synthetic.seed);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

RunConfig RunConfig::load(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return from_json(s.str());
}

fs::path RunConfig::index_path() const { return paths.index.empty() ? out / "index.json" : paths.index; }

fs::path RunConfig::checkpoint_path() const {
  return paths.checkpoint.empty() ? out / "model.ckpt.json" : paths.checkpoint;
}

RunConfig full_scale_profile() {
  RunConfig c;
  c.train.batch_size = 32;
  c.train.learning_rate = 1e-5;
  c.train.epochs = 4;
  c.train.warmup = 0.2;
  c.encoder.max_len = static_cast<int>(kDefaultMaxSequenceLength);
  return c;
}

std::map<std::string, std::string> config_flag_defaults() {
  std::map<std::string, std::string> out;
  flatten(Json::parse(RunConfig{}.to_json()), "", out);
  return out;
}

void apply_override(RunConfig& config, const std::string& key, const std::string& value) {
  Json j = Json::parse(config.to_json());
  const auto ptr = Json::json_pointer("/" + [&] {
    std::string p = key;
    std::replace(p.begin(), p.end(), '.', '/');
    return p;
  }());
  if (!j.contains(ptr) || j.at(ptr).is_object()) throw ConfigError("unknown option '" + key + "'");
  Json& slot = j.at(ptr);
  Json parsed;
  if (slot.is_string()) {
    parsed = value;
  } else {
    try {
      parsed = Json::parse(value);
    } catch (const nlohmann::json::parse_error&) {
      throw ConfigError("option '" + key + "': cannot parse '" + value + "'");
    }
    const bool ok = (slot.is_boolean() && parsed.is_boolean()) ||
                    (slot.is_number_integer() && parsed.is_number_integer()) ||
                    (slot.is_number_float() && parsed.is_number()) || (slot.is_array() && parsed.is_array());
    if (!ok) throw ConfigError("option '" + key + "': '" + value + "' has the wrong type");
    if (slot.is_number_unsigned() && parsed.is_number_integer() && parsed.get<long long>() < 0) {
      throw ConfigError("option '" + key + "' must be non-negative");
    }
  }
  slot = std::move(parsed);
  config = RunConfig::from_json(j.dump());
}

void write_artifact(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path partial = path;
  partial += ".partial";
  {
    std::ofstream out(partial, std::ios::binary);
    if (!out) throw DataError("cannot write " + partial.string());
    out << content;
    if (!out) throw DataError("write failed: " + partial.string());
  }
  fs::rename(partial, path);
}

VocabIndex cmd_build_index(const RunConfig& config, std::ostream& log) {
  check_kb_paths(config);
  auto prompts = load_split(config.paths.train, "training set");
  if (!config.paths.dev.empty()) {
    auto dev = load_split(config.paths.dev, "dev set");
    prompts.insert(prompts.end(), dev.begin(), dev.end());
  }
  const auto triples = load_triples(config, log);
  auto index = build_vocab_index(triples, prompts);
  log << "index: " << index.triples().size() << " of " << triples.size() << " triples retained\n";
  write_artifact(config.index_path(), index.to_json());
  return index;
}

void cmd_preprocess(const RunConfig& config, std::ostream& log, std::optional<int> epoch) {
  config.train.validate();
  if (epoch && *epoch < 0) throw ConfigError("epoch must be non-negative");
  const auto prompts = load_split(config.paths.train, "training set");
  const auto vocab = vocab_for(config, prompts);
  LmPrepOptions opts;
  opts.max_len = static_cast<std::size_t>(config.encoder.max_len);
  opts.mask_prob = config.train.mask_prob;
  opts.order = config.train.lm_order;
  // Same stream the trainer uses, so the files mirror what training sees.
  const std::uint64_t lm_seed = derive_seed(config.seed, 1);
  auto epoch_lines = [&](int e) {
    std::string lines;
    for (const auto& ex : regenerate_epoch(prompts, vocab, static_cast<std::uint64_t>(e), lm_seed, opts)) {
      lines += masked_example_to_json(ex, vocab);
      lines += '\n';
    }
    return lines;
  };
  if (epoch) {
    write_artifact(config.out, epoch_lines(*epoch));
    log << "preprocess: epoch " << *epoch << " written to " << config.out.string() << "\n";
    return;
  }
  std::ostringstream vocab_text;
  for (const auto& t : vocab.tokens()) vocab_text << t << "\n";
  write_artifact(config.out / "vocab.txt", vocab_text.str());
  const int epochs = std::max(1, config.train.lm_epochs);
  for (int e = 0; e < epochs; ++e) {
    write_artifact(config.out / "lm" / ("epoch_" + std::to_string(e) + ".jsonl"), epoch_lines(e));
  }
  log << "preprocess: vocab " << vocab.size() << ", " << epochs << " LM epoch file(s)\n";
}

TrainResult cmd_train(const RunConfig& config, std::ostream& log) {
  config.encoder.validate_shape();
  config.train.validate();
  if (!fs::exists(config.index_path())) check_kb_paths(config);
  std::vector<MetricsRow> partial;
  try {
    auto trained = train_model(config, &partial, &log);
    trained.model.save(config.checkpoint_path(), Json::parse(config.to_json())["train"].dump(), trained.vocab.tokens(),
                       trained.result.rng, trained.result.steps);
    write_artifact(config.out / "metrics.csv", metrics_csv(trained.result.history));
    log << "train: " << trained.result.steps << " steps\n";
    return std::move(trained.result);
  } catch (const TrainingDiverged&) {
    fs::create_directories(config.out);
    std::ofstream(config.out / "metrics.csv.partial", std::ios::binary) << metrics_csv(partial);
    throw;
  }
}

EvalReport cmd_eval(const RunConfig& config, std::ostream& log) {
  require_file(config.checkpoint_path(), "checkpoint");
  require_file(config.index_path(), "index");
  const auto dev_set = load_split(config.paths.dev, "dev set");
  const auto index = VocabIndex::load(config.index_path());
  auto loaded = Model::load(config.checkpoint_path(), index.relations());
  const auto vocab = SubwordVocab::from_tokens(loaded.vocab);
  const auto prepared =
      prepare_prompts(dev_set, vocab, &index, static_cast<std::size_t>(loaded.model.config().encoder.max_len));
  const auto report = evaluate(loaded.model, prepared, derive_seed(config.seed, 4));
  write_artifact(config.out / "report.json", report.to_json());
  write_artifact(config.out / "report.csv", report.to_csv());
  log << "eval: accuracy " << fmt(report.overall) << " on " << report.n << " prompts\n";
  return report;
}

EvalReport cmd_pipeline(const RunConfig& config, std::ostream& log) {
  config.encoder.validate_shape();
  config.train.validate();
  check_kb_paths(config);
  require_file(config.paths.train, "training set");
  require_file(config.paths.dev, "dev set");
  fs::create_directories(config.out);
  RunConfig c = config;
  // A stale index from an earlier run must not leak into this one.
  if (c.paths.index.empty()) fs::remove(c.index_path());
  run_stage("build-index", [&] { return cmd_build_index(c, log); });
  run_stage("preprocess", [&] {
    cmd_preprocess(c, log);
    return 0;
  });
  if (c.paths.vocab.empty()) c.paths.vocab = c.out / "vocab.txt";
  run_stage("train", [&] { return cmd_train(c, log); });
  return run_stage("eval", [&] { return cmd_eval(c, log); });
}

std::string cmd_tune(const RunConfig& config, std::ostream& log) {
  const GridSpec& g = config.grid;
  if (g.size() > g.budget) {
    throw ConfigError("grid has " + std::to_string(g.size()) + " points, budget is " + std::to_string(g.budget));
  }
  if (g.jobs < 1) throw ConfigError("tune.jobs must be positive");
  config.encoder.validate_shape();
  config.train.validate();
  if (!fs::exists(config.index_path())) check_kb_paths(config);
  require_file(config.paths.train, "training set");
  require_file(config.paths.dev, "dev set");

  auto or_base = [](const auto& list, auto base) {
    using T = decltype(base);
    return list.empty() ? std::vector<T>{base} : std::vector<T>(list.begin(), list.end());
  };
  struct Point {
    int batch_size;
    double learning_rate;
    double warmup;
    int epochs;
  };
  std::vector<Point> points;
  for (int b : or_base(g.batch_size, config.train.batch_size)) {
    for (double lr : or_base(g.learning_rate, config.train.learning_rate)) {
      for (double w : or_base(g.warmup, config.train.warmup)) {
        for (int e : or_base(g.epochs, config.train.epochs)) points.push_back({b, lr, w, e});
      }
    }
  }
  for (const auto& p : points) {
    TrainConfig t = config.train;
    t.batch_size = p.batch_size;
    t.learning_rate = p.learning_rate;
    t.warmup = p.warmup;
    t.epochs = p.epochs;
    t.validate();
  }

  std::vector<std::optional<EvalReport>> reports(points.size());
  std::vector<std::uint64_t> seeds(points.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  std::exception_ptr failure;
  auto worker = [&] {
    for (std::size_t k = next++; k < points.size(); k = next++) {
      try {
        RunConfig c = config;
        c.train.batch_size = points[k].batch_size;
        c.train.learning_rate = points[k].learning_rate;
        c.train.warmup = points[k].warmup;
        c.train.epochs = points[k].epochs;
        c.seed = seeds[k] = derive_seed(config.seed, k);
        c.out = config.out / "tune" / ("point_" + std::to_string(k));
        auto trained = train_model(c, nullptr, nullptr);
        write_artifact(c.out / "metrics.csv", metrics_csv(trained.result.history));
        const auto dev_set = load_dataset(c.paths.dev);
        const auto prepared =
            prepare_prompts(dev_set, trained.vocab, &trained.index, static_cast<std::size_t>(c.encoder.max_len));
        reports[k] = evaluate(trained.model, prepared, derive_seed(c.seed, 4));
        std::lock_guard lock(log_mutex);
        log << "tune: point " << k << " accuracy " << fmt(reports[k]->overall) << "\n";
      } catch (...) {
        std::lock_guard lock(log_mutex);
        if (!failure) failure = std::current_exception();
        next = points.size();
      }
    }
  };
  if (g.jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (int t = 0; t < g.jobs; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<std::size_t> order(points.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return reports[a]->overall > reports[b]->overall; });

  std::ostringstream csv;
  csv << "point,batch_size,learning_rate,warmup,epochs,seed,overall,n";
  for (auto t : kAllQuestionTypes) csv << ',' << to_string(t) << "_accuracy," << to_string(t) << "_n";
  csv << '\n';
  for (std::size_t k : order) {
    const auto& p = points[k];
    const auto& r = *reports[k];
    csv << k << ',' << p.batch_size << ',' << fmt(p.learning_rate) << ',' << fmt(p.warmup) << ',' << p.epochs << ','
        << seeds[k] << ',' << fmt(r.overall) << ',' << r.n;
    for (auto t : kAllQuestionTypes) {
      const auto it = r.per_type.find(t);
      const std::size_t n = it == r.per_type.end() ? 0 : it->second.n;
      csv << ',' << fmt(r.type_accuracy(t)) << ',' << n;
    }
    csv << '\n';
  }
  write_artifact(config.out / "tune.csv", csv.str());
  return csv.str();
}

SyntheticSet cmd_gen_synthetic(const RunConfig& config, std::ostream& log) {
  SyntheticSpec spec = config.synthetic;
  auto set = generate_synthetic(spec);
  write_synthetic(set, config.out);
  log << "gen-synthetic: " << set.planted_train.size() << " train / " << set.planted_dev.size()
      << " dev prompts per dataset, " << set.kb.triples().size() << " triples\n";
  return set;
}

void cmd_stem(std::istream& in, std::ostream& out) {
  std::string word;
  while (in >> word) {
    for (const auto& part : word_tokenize(word)) {
      if (!is_alpha_word(part)) throw DataError("cannot stem '" + part + "': not alphabetic");
      out << stem(part) << "\n";
    }
  }
}

void cmd_align(const fs::path& coarse_path, const fs::path& fine_path, std::ostream& out) {
  auto tokens = [](const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::vector<std::string> t;
    std::string tok;
    while (in >> tok) t.push_back(tok);
    return t;
  };
  const auto coarse = tokens(coarse_path);
  const auto fine = tokens(fine_path);
  const auto alignment = token_realignment(coarse, fine);
  Json map = Json::object();
  for (const auto& [c, f] : alignment.map) map[std::to_string(c)] = f;
  Json doc;
  doc["alignment"] = std::move(map);
  doc["partial"] = alignment.partial();
  doc["coarse_consumed"] = alignment.coarse_consumed;
  doc["fine_consumed"] = alignment.fine_consumed;
  out << doc.dump(2) << "\n";
}

}  // namespace kgfuse
