#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "ontorel/backend.hpp"
#include "ontorel/errors.hpp"
#include "ontorel/gold.hpp"
#include "ontorel/hash.hpp"
#include "ontorel/metrics.hpp"
#include "ontorel/parser.hpp"
#include "ontorel/prompt.hpp"
#include "ontorel/runner.hpp"
#include "ontorel/strategy.hpp"
#include "ontorel/thesaurus.hpp"

namespace ontorel {

namespace fs = std::filesystem;

/// Writes via a sibling temp file and an atomic rename, so interrupting a
/// command never leaves a half-written artifact behind.
inline void atomic_write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw IoError("short write to " + tmp.string());
    }
    fs::rename(tmp, path);
}

inline GoldDataset load_gold_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open gold dataset: " + path);
    return load_gold_csv(in);
}

// ---------------------------------------------------------------------------
// build-gold

struct BuildGoldOptions {
    std::string thesaurus_path;
    std::size_t per_class = 250;
    std::uint64_t seed = 0;
    std::string out_path;
    bool exclude_transitive = false;
};

inline int cmd_build_gold(const BuildGoldOptions& opt, std::ostream& out, std::ostream& err) {
    std::ifstream in(opt.thesaurus_path, std::ios::binary);
    if (!in) throw IoError("cannot open thesaurus file: " + opt.thesaurus_path);
    ParsedThesaurus parsed = parse_thesaurus(in);
    for (const auto& w : parsed.warnings) err << "warning: " << w << '\n';
    ExtractionResult extracted = extract_relations(parsed.entries);
    for (const auto& w : extracted.warnings) err << "warning: " << w << '\n';

    GoldDataset gold = build_gold(extracted.triples, parsed.terms(), opt.per_class, opt.seed,
                                  opt.exclude_transitive);

    std::ostringstream csv;
    write_gold_csv(csv, gold);
    atomic_write_file(opt.out_path, csv.str());

    nlohmann::ordered_json manifest;
    manifest["per_class"] = opt.per_class;
    manifest["seed"] = opt.seed;
    manifest["exclude_transitive"] = opt.exclude_transitive;
    manifest["input_sha256"] = sha256_file(opt.thesaurus_path);
    manifest["records"] = gold.records.size();
    for (RelationLabel l : kAllLabels)
        manifest["class_counts"][std::string(label_token(l))] = gold.class_count(l);
    atomic_write_file(opt.out_path + ".manifest.json", manifest.dump(2) + "\n");

    err << "wrote " << gold.records.size() << " records to " << opt.out_path << '\n';
    out << opt.out_path << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// run

struct RunOptions {
    std::string gold_path;
    std::string out_dir;
    StrategyKind strategy;
    BackendConfig backend;
    ParsePolicy policy;
    std::string templates_dir = "templates";
    std::uint64_t seed = 0;                       // feeds scripted noise
    std::optional<double> scripted_noise_rate;    // scripted provider only
    bool force = false;
    unsigned workers = 0;
    bool quiet = false;
};

inline nlohmann::ordered_json run_manifest_json(const RunOptions& opt, const PromptSet& prompts,
                                                const std::string& gold_sha) {
    nlohmann::ordered_json j;
    j["strategy"] = strategy_token(opt.strategy);
    j["provider_id"] = opt.backend.provider_id;
    j["model_id"] = opt.backend.model_id;
    j["endpoint_url"] = opt.backend.endpoint_url;
    j["temperature"] = opt.backend.temperature;
    j["max_output_tokens"] = opt.backend.max_output_tokens;
    j["cot_phase1_max_output_tokens"] = opt.backend.cot_phase1_max_output_tokens;
    j["request_timeout_ms"] = opt.backend.request_timeout.count();
    j["max_in_flight"] = opt.backend.max_in_flight;
    j["retry_limit"] = opt.backend.retry_limit;
    j["retry_backoff_ms"] = opt.backend.retry_backoff.count();
    j["parse_policy"] = policy_token(opt.policy);
    j["gold_path"] = fs::absolute(opt.gold_path).string();
    j["gold_sha256"] = gold_sha;
    j["templates_dir"] = fs::absolute(opt.templates_dir).string();
    j["template_checksums"] = {{"standard.txt", prompts.standard.checksum()},
                               {"cot_phase1.txt", prompts.cot_phase1.checksum()},
                               {"cot_phase2.txt", prompts.cot_phase2.checksum()}};
    j["seed"] = opt.seed;
    if (opt.scripted_noise_rate) j["scripted_noise_rate"] = *opt.scripted_noise_rate;
    else j["scripted_noise_rate"] = nullptr;
    return j;
}

inline std::shared_ptr<Completer> make_transport(const RunOptions& opt, const GoldDataset& gold) {
    if (opt.backend.provider_id == "scripted") {
        std::optional<NoiseSpec> noise;
        if (opt.scripted_noise_rate) noise = NoiseSpec{*opt.scripted_noise_rate, opt.seed};
        return ScriptedCompleter::from_gold(gold, noise);
    }
    if (opt.backend.endpoint_url.empty())
        throw UsageError("--endpoint is required for provider '" + opt.backend.provider_id + "'");
    return std::make_shared<HttpCompleter>(opt.backend);
}

inline int cmd_run(const RunOptions& opt, std::ostream&, std::ostream& err) {
    GoldDataset gold = load_gold_file(opt.gold_path);
    PromptSet prompts = load_prompt_set(opt.templates_dir);
    fs::create_directories(opt.out_dir);

    fs::path manifest_path = fs::path(opt.out_dir) / "run_manifest.json";
    nlohmann::ordered_json manifest =
        run_manifest_json(opt, prompts, sha256_file(opt.gold_path));
    if (fs::exists(manifest_path)) {
        nlohmann::json existing = nlohmann::json::parse(read_file_bytes(manifest_path.string()));
        if (existing != nlohmann::json(manifest) && !opt.force)
            throw UsageError(
                "run directory " + opt.out_dir +
                " holds a run with a different configuration; pass --force to overwrite");
    }
    atomic_write_file(manifest_path, manifest.dump(2) + "\n");

    auto store =
        std::make_shared<ExchangeStore>((fs::path(opt.out_dir) / "exchanges.jsonl").string());
    Backend backend(opt.backend, make_transport(opt, gold), store);

    auto progress = [&](const RunProgress& p) {
        if (opt.quiet) return;
        if (p.done % 25 == 0 || p.done == p.total)
            err << "[run] " << p.done << "/" << p.total << " pairs, " << p.invalid
                << " invalid\n";
    };
    RunResult result =
        run_pairs(gold, opt.strategy, backend, prompts, opt.policy, opt.workers, progress);

    std::ostringstream csv;
    write_predictions_csv(csv, result.completed, result.completed_gold);
    atomic_write_file(fs::path(opt.out_dir) / "predictions.csv", csv.str());

    if (result.error) {
        err << "run aborted after " << result.completed.size() << "/" << gold.records.size()
            << " pairs; partial predictions preserved\n";
        result.rethrow_if_failed();
    }
    err << "predictions written to " << (fs::path(opt.out_dir) / "predictions.csv").string()
        << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// evaluate

/// Pulls model/policy metadata for the report header from the run manifest
/// sitting next to the predictions file, when there is one.
struct ReportMeta {
    std::string model_id = "unknown";
    std::string parse_policy = "unknown";
};

inline ReportMeta report_meta_for(const fs::path& predictions_path) {
    ReportMeta meta;
    fs::path manifest = predictions_path.parent_path() / "run_manifest.json";
    if (!fs::exists(manifest)) return meta;
    nlohmann::json j = nlohmann::json::parse(read_file_bytes(manifest.string()));
    meta.model_id = j.value("model_id", "unknown");
    meta.parse_policy = j.value("parse_policy", "unknown");
    return meta;
}

inline EvalReport evaluate_files(const std::string& predictions_path,
                                 const std::string& gold_path) {
    GoldDataset gold = load_gold_file(gold_path);
    std::ifstream in(predictions_path, std::ios::binary);
    if (!in) throw IoError("cannot open predictions: " + predictions_path);
    std::vector<LoadedPrediction> predictions = load_predictions_csv(in);
    if (predictions.empty()) throw UsageError("predictions file has no rows");

    StrategyKind strategy = predictions[0].strategy;
    std::map<std::pair<std::string, std::string>, RelationLabel> gold_by_pair;
    for (const auto& r : gold.records)
        gold_by_pair.emplace(std::make_pair(r.pair.topic_a, r.pair.topic_b), r.label);
    for (const auto& p : predictions) {
        if (!(p.strategy == strategy))
            throw UsageError("predictions file mixes strategies");
        auto it = gold_by_pair.find(std::make_pair(p.pair.topic_a, p.pair.topic_b));
        if (it != gold_by_pair.end() && it->second != p.gold)
            throw UsageError("prediction row for ('" + p.pair.topic_a + "', '" + p.pair.topic_b +
                             "') disagrees with the gold file about the gold label");
    }

    ReportMeta meta = report_meta_for(predictions_path);
    return score(to_score_input(predictions), gold, strategy, meta.model_id, meta.parse_policy);
}

inline void write_report_files(const fs::path& out_dir, const EvalReport& report) {
    std::ostringstream scores, matrix, text;
    write_scores_csv(scores, report);
    write_matrix_csv(matrix, report.matrix);
    write_report_text(text, report);
    atomic_write_file(out_dir / "scores.csv", scores.str());
    atomic_write_file(out_dir / "matrix.csv", matrix.str());
    atomic_write_file(out_dir / "report.txt", text.str());
    atomic_write_file(out_dir / "report.json", report_to_json(report).dump(2) + "\n");
}

inline int cmd_evaluate(const std::string& predictions_path, const std::string& gold_path,
                        const std::string& out_dir, std::ostream& out, std::ostream& err) {
    EvalReport report = evaluate_files(predictions_path, gold_path);
    write_report_files(out_dir, report);
    err << "report written to " << out_dir << '\n';
    out << "macro-f1 " << format_metric(report.macro_f1) << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// diff

inline EvalReport load_report_file(const std::string& path) {
    if (!fs::exists(path)) throw IoError("cannot open report: " + path);
    return report_from_json(nlohmann::json::parse(read_file_bytes(path)));
}

inline int cmd_diff(const std::string& report_a_path, const std::string& report_b_path,
                    std::ostream& out, std::ostream&) {
    EvalReport a = load_report_file(report_a_path);
    EvalReport b = load_report_file(report_b_path);
    ReportDiff diff = diff_reports(a, b);

    char line[128];
    std::snprintf(line, sizeof(line), "%-10s %9s %9s %9s\n", "METRIC", "A", "B", "DELTA");
    out << line;
    for (std::size_t i = 0; i < 4; ++i) {
        std::snprintf(line, sizeof(line), "%-10s %9s %9s %9s\n",
                      std::string(label_token(kAllLabels[i])).c_str(),
                      format_metric(a.per_class[i].f1).c_str(),
                      format_metric(b.per_class[i].f1).c_str(),
                      format_metric(diff.per_class_f1_delta[i]).c_str());
        out << line;
    }
    std::snprintf(line, sizeof(line), "%-10s %9s %9s %9s\n", "macro-f1",
                  format_metric(a.macro_f1).c_str(), format_metric(b.macro_f1).c_str(),
                  format_metric(diff.macro_f1_delta).c_str());
    out << line;
    return 0;
}

// ---------------------------------------------------------------------------
// replay

namespace detail {

inline bool files_identical(const fs::path& a, const fs::path& b) {
    return read_file_bytes(a.string()) == read_file_bytes(b.string());
}

} // namespace detail

/// Re-derives predictions and report purely from the exchange log, writing
/// them under <run_dir>/replay/, and verifies byte-identity against the
/// original artifacts where those exist. Never performs network activity.
inline int cmd_replay(const std::string& run_dir, std::ostream& out, std::ostream& err) {
    fs::path dir(run_dir);
    fs::path manifest_path = dir / "run_manifest.json";
    if (!fs::exists(manifest_path))
        throw IoError("no run manifest found at " + manifest_path.string());
    nlohmann::json m = nlohmann::json::parse(read_file_bytes(manifest_path.string()));

    auto strategy = strategy_from_token(m.at("strategy").get<std::string>());
    auto policy = policy_from_token(m.at("parse_policy").get<std::string>());
    if (!strategy || !policy) throw ParseError("run manifest has unknown strategy or policy");

    BackendConfig config;
    config.provider_id = m.at("provider_id").get<std::string>();
    config.model_id = m.at("model_id").get<std::string>();
    config.endpoint_url = m.at("endpoint_url").get<std::string>();
    config.temperature = m.at("temperature").get<double>();
    config.max_output_tokens = m.at("max_output_tokens").get<int>();
    config.cot_phase1_max_output_tokens = m.at("cot_phase1_max_output_tokens").get<int>();
    config.max_in_flight = m.at("max_in_flight").get<int>();

    std::string templates_dir = m.at("templates_dir").get<std::string>();
    PromptSet prompts = load_prompt_set(templates_dir);
    const auto& sums = m.at("template_checksums");
    if (prompts.standard.checksum() != sums.at("standard.txt").get<std::string>() ||
        prompts.cot_phase1.checksum() != sums.at("cot_phase1.txt").get<std::string>() ||
        prompts.cot_phase2.checksum() != sums.at("cot_phase2.txt").get<std::string>())
        throw Error("template files changed since the run was recorded");

    std::string gold_path = m.at("gold_path").get<std::string>();
    if (sha256_file(gold_path) != m.at("gold_sha256").get<std::string>())
        throw Error("gold dataset file changed since the run was recorded");
    GoldDataset gold = load_gold_file(gold_path);

    auto store = std::make_shared<ExchangeStore>((dir / "exchanges.jsonl").string());
    Backend backend = Backend::replay_only(config, store);

    RunResult result = run_pairs(gold, *strategy, backend, prompts, *policy, 4);
    result.rethrow_if_failed();

    std::ostringstream csv;
    write_predictions_csv(csv, result.completed, result.completed_gold);
    fs::path replay_predictions = dir / "replay" / "predictions.csv";
    atomic_write_file(replay_predictions, csv.str());

    ReportMeta meta{config.model_id, policy_token(*policy)};
    EvalReport report = score(to_score_input(result.completed), gold, *strategy, meta.model_id,
                              meta.parse_policy);
    write_report_files(dir / "replay" / "report", report);

    bool ok = true;
    if (fs::exists(dir / "predictions.csv")) {
        bool same = detail::files_identical(dir / "predictions.csv", replay_predictions);
        err << "replay predictions " << (same ? "identical" : "DIFFER") << '\n';
        ok = ok && same;
    }
    if (fs::exists(dir / "report")) {
        for (const char* name : {"scores.csv", "matrix.csv", "report.txt", "report.json"}) {
            if (!fs::exists(dir / "report" / name)) continue;
            bool same = detail::files_identical(dir / "report" / name,
                                                dir / "replay" / "report" / name);
            err << "replay report/" << name << ' ' << (same ? "identical" : "DIFFER") << '\n';
            ok = ok && same;
        }
    }
    out << "macro-f1 " << format_metric(report.macro_f1) << '\n';
    if (!ok) {
        err << "replay outputs differ from the recorded run\n";
        return 1;
    }
    return 0;
}

/// Maps harness errors onto the CLI exit-code contract: 2 for usage/input
/// problems, 1 for runtime failures.
template <typename Fn>
int run_command(std::ostream& err, Fn&& fn) {
    try {
        return fn();
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const CapacityError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const CoverageError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const ComparisonError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace ontorel
