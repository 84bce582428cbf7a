// ontorel — command-line harness for classifying semantic relationships
// between research-topic pairs with chat-completion LLMs.
//
// Subcommands: build-gold, run, evaluate, diff, replay. Progress and logs go
// to stderr, data artifacts to files, and a one-line summary to stdout.

#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "ontorel/ontorel.hpp"

#ifndef ONTOREL_DEFAULT_TEMPLATE_DIR
#define ONTOREL_DEFAULT_TEMPLATE_DIR "templates"
#endif

namespace {

std::string default_templates_dir() {
    if (const char* env = std::getenv("ONTOREL_TEMPLATES_DIR")) return env;
    return ONTOREL_DEFAULT_TEMPLATE_DIR;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"zero-shot topic-relationship classification harness"};
    app.require_subcommand(1);

    // build-gold ------------------------------------------------------------
    ontorel::BuildGoldOptions build_opt;
    auto* build = app.add_subcommand(
        "build-gold", "construct a balanced gold dataset from a thesaurus text file");
    build->add_option("thesaurus", build_opt.thesaurus_path, "normalized thesaurus text file")
        ->required();
    build->add_option("--per-class", build_opt.per_class, "records per relation class")
        ->default_val(250);
    build->add_option("--seed", build_opt.seed, "sampling seed")->default_val(0);
    build->add_option("--out", build_opt.out_path, "output CSV path")->required();
    build->add_flag("--exclude-transitive", build_opt.exclude_transitive,
                    "also reject negative pairs connected through any relation chain");

    // run ---------------------------------------------------------------
    ontorel::RunOptions run_opt;
    std::string strategy_token = "std-1w";
    std::string policy_mode = "lenient";
    std::string on_conflict = "invalid";
    double timeout_s = 60.0;
    auto* run = app.add_subcommand("run", "run one strategy over a gold dataset");
    run->add_option("--strategy", strategy_token, "std-1w | std-2w | cot-1w | cot-2w")
        ->required();
    run->add_option("--gold", run_opt.gold_path, "gold dataset CSV")->required();
    run->add_option("--out", run_opt.out_dir, "run directory")->required();
    run->add_option("--provider", run_opt.backend.provider_id,
                    "provider id; 'scripted' answers offline from the gold labels")
        ->default_val("openai");
    run->add_option("--model", run_opt.backend.model_id, "model id sent to the provider");
    run->add_option("--endpoint", run_opt.backend.endpoint_url,
                    "chat-completion endpoint, e.g. https://api.openai.com");
    run->add_option("--temperature", run_opt.backend.temperature)->default_val(0.0);
    run->add_option("--max-output-tokens", run_opt.backend.max_output_tokens)->default_val(512);
    run->add_option("--max-in-flight", run_opt.backend.max_in_flight,
                    "concurrent requests against the provider")
        ->default_val(1);
    run->add_option("--retries", run_opt.backend.retry_limit)->default_val(3);
    run->add_option("--timeout", timeout_s, "request timeout in seconds")->default_val(60.0);
    run->add_option("--parse-policy", policy_mode, "strict | lenient")->default_val("lenient");
    run->add_option("--on-conflict", on_conflict, "first-match | invalid")
        ->default_val("invalid");
    run->add_option("--templates", run_opt.templates_dir, "prompt template directory")
        ->default_val(default_templates_dir());
    run->add_option("--seed", run_opt.seed, "seed for scripted noise")->default_val(0);
    double noise_rate = -1.0;
    run->add_option("--scripted-noise", noise_rate,
                    "corrupt this fraction of scripted answers (scripted provider only)");
    run->add_flag("--force", run_opt.force, "overwrite a run directory with a different config");

    // evaluate ------------------------------------------------------------
    std::string predictions_path, eval_gold_path, eval_out_dir;
    auto* evaluate = app.add_subcommand("evaluate", "score predictions against gold");
    evaluate->add_option("--predictions", predictions_path, "predictions CSV")->required();
    evaluate->add_option("--gold", eval_gold_path, "gold dataset CSV")->required();
    evaluate->add_option("--out", eval_out_dir, "report output directory")->required();

    // diff ------------------------------------------------------------
    std::string report_a, report_b;
    auto* diff = app.add_subcommand("diff", "compare two report.json files (B minus A)");
    diff->add_option("report_a", report_a)->required();
    diff->add_option("report_b", report_b)->required();

    // replay ------------------------------------------------------------
    std::string run_dir;
    auto* replay = app.add_subcommand(
        "replay", "re-derive predictions and report from a run's exchange log");
    replay->add_option("run_dir", run_dir)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    return ontorel::run_command(std::cerr, [&]() -> int {
        if (*build) return ontorel::cmd_build_gold(build_opt, std::cout, std::cerr);
        if (*run) {
            auto strategy = ontorel::strategy_from_token(strategy_token);
            if (!strategy)
                throw ontorel::UsageError("unknown strategy '" + strategy_token +
                                          "' (expected std-1w, std-2w, cot-1w or cot-2w)");
            auto policy = ontorel::policy_from_token(policy_mode + "/" + on_conflict);
            if (!policy)
                throw ontorel::UsageError("unknown parse policy '" + policy_mode + "/" +
                                          on_conflict + "'");
            run_opt.strategy = *strategy;
            run_opt.policy = *policy;
            run_opt.backend.request_timeout =
                std::chrono::milliseconds(static_cast<long>(timeout_s * 1000));
            if (noise_rate >= 0.0) run_opt.scripted_noise_rate = noise_rate;
            return ontorel::cmd_run(run_opt, std::cout, std::cerr);
        }
        if (*evaluate)
            return ontorel::cmd_evaluate(predictions_path, eval_gold_path, eval_out_dir,
                                         std::cout, std::cerr);
        if (*diff) return ontorel::cmd_diff(report_a, report_b, std::cout, std::cerr);
        if (*replay) return ontorel::cmd_replay(run_dir, std::cout, std::cerr);
        throw ontorel::UsageError("no subcommand given");
    });
}
