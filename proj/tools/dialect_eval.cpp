#include <algorithm>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "dialect_eval/common/error.hpp"
#include "dialect_eval/pipeline/config.hpp"
#include "dialect_eval/pipeline/review.hpp"
#include "dialect_eval/pipeline/run.hpp"
#include "dialect_eval/pipeline/scoring.hpp"

namespace {

using json = nlohmann::json;
namespace pl = de::pipeline;

de::pipeline::ReviewServer* g_server = nullptr;

void on_signal(int) {
    if (g_server != nullptr) g_server->stop();
}

void print_summary(const pl::StageSummary& s) {
    std::cout << s.stage << ": " << s.total << " items, " << s.skipped << " already done, " << s.written
              << " written, " << s.failed << " failed\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dialect bias evaluation workbench"};
    app.require_subcommand(1);

    std::string config_path;
    std::string resume;
    std::string workdir;
    bool verbose = false;
    app.add_option("--config", config_path, "Run configuration (JSON)")->check(CLI::ExistingFile);
    app.add_option("--resume", resume, "Continue an existing run id");
    app.add_option("--workdir", workdir, "Override the configured run directory root");
    app.add_flag("-v,--verbose", verbose, "Debug logging");

    auto* index = app.add_subcommand("index", "Embed the corpus and build retrieval indexes");
    auto* translate = app.add_subcommand("translate", "Translate questions into the configured dialects");
    auto* respond = app.add_subcommand("respond", "Collect model answers for standard and dialect questions");
    auto* judge = app.add_subcommand("judge", "Judge response pairs and rebuild the fallback queue");
    auto* agree = app.add_subcommand("agree", "Agreement between the primary and secondary judges");
    auto* report = app.add_subcommand("report", "Bias table with human overrides merged");

    auto* serve = app.add_subcommand("serve", "Review API for the fallback queue");
    std::string host = "127.0.0.1";
    int port = 8080;
    serve->add_option("--host", host);
    serve->add_option("--port", port);

    auto* score = app.add_subcommand("score", "Batch metric scoring of hypothesis/reference pairs");
    std::string score_in;
    std::string score_out;
    std::string judge_model;
    score->add_option("--input", score_in, "JSONL with id, hypothesis, reference[, human]")
        ->required()
        ->check(CLI::ExistingFile);
    score->add_option("--output", score_out, "Per-item JSONL (stdout when omitted)");
    score->add_option("--judge-model", judge_model, "Run the translation judge with this model");

    CLI11_PARSE(app, argc, argv);
    spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);

    try {
        if (config_path.empty()) throw de::Error(de::Errc::InvalidConfig, "--config is required");
        auto config = pl::load_config(config_path);
        if (!workdir.empty()) config.workdir = workdir;
        auto transport = pl::make_transport(config);

        if (score->parsed()) {
            de::judging::AttemptLog attempts;
            de::retrieval::HashEmbedder local;
            de::judging::GatewayEmbedder remote(*transport, attempts, config.embedding_model);
            pl::ScoreOptions opts;
            opts.embedder = config.gateway.kind == "mock" ? static_cast<de::retrieval::Embedder*>(&local) : &remote;
            if (!judge_model.empty()) {
                opts.transport = transport.get();
                opts.attempts = &attempts;
                opts.judge_model = judge_model;
                opts.max_attempts = config.gateway.max_attempts;
            }
            const auto items = pl::load_score_items(score_in);
            const auto rows = pl::score_items(items, opts);
            std::ofstream file;
            if (!score_out.empty()) file.open(score_out, std::ios::binary | std::ios::trunc);
            std::ostream& out = score_out.empty() ? std::cout : file;
            for (const auto& r : rows) out << r.dump() << '\n';
            const bool all_human =
                !items.empty() && std::all_of(items.begin(), items.end(), [](const auto& i) { return i.human.has_value(); });
            if (all_human && items.size() >= 2) std::cerr << pl::metric_correlations(rows, items).dump(2) << '\n';
            return 0;
        }

        std::optional<std::string> resume_id;
        if (!resume.empty()) resume_id = resume;
        pl::Run run(config, *transport, resume_id);
        std::cerr << "run " << run.run_id() << " (" << run.paths().dir.string() << ")\n";

        if (index->parsed()) print_summary(run.index());
        if (translate->parsed()) print_summary(run.translate());
        if (respond->parsed()) print_summary(run.respond());
        if (judge->parsed()) print_summary(run.judge());
        if (agree->parsed()) {
            run.agree();
            std::ifstream in(run.paths().agreement_txt());
            std::cout << in.rdbuf();
        }
        if (report->parsed()) {
            run.report();
            std::ifstream in(run.paths().report_txt());
            std::cout << in.rdbuf();
        }
        if (serve->parsed()) {
            pl::ReviewService service(run.paths().fallback(), config.weights);
            pl::ServeOptions opts;
            opts.host = host;
            opts.port = port;
            if (const char* token = std::getenv("DE_REVIEW_TOKEN")) opts.token = token;
            pl::ReviewServer server(service, opts);
            server.bind();
            g_server = &server;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            server.listen();
            g_server = nullptr;
        }
    } catch (const de::Error& e) {
        spdlog::error("{}: {}", de::errc_name(e.code()), e.what());
        return 2;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return 1;
    }
    return 0;
}
