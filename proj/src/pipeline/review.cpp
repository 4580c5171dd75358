#include "dialect_eval/pipeline/review.hpp"

#include <algorithm>
#include <mutex>

#include "dialect_eval/common/error.hpp"

namespace de::pipeline {

using json = nlohmann::json;

namespace {

ReviewResponse error_response(int status, const std::string& msg) { return {status, {{"error", msg}}}; }

json verdict_view(const judging::BiasVerdict& v) {
    return {{"reasoning", v.reasoning},   {"likert", v.likert},         {"script_valid", v.script_valid},
            {"refusal", v.refusal},       {"confidence", v.confidence}, {"final_score", v.final_score}};
}

}  // namespace

ReviewService::ReviewService(std::filesystem::path queue_path, judging::RubricWeights weights)
    : path_(std::move(queue_path)), weights_(weights) {
    if (!std::filesystem::exists(path_)) throw Error(Errc::Io, "fallback queue not found: " + path_.string());
    items_ = load_fallback_queue(path_);
}

ReviewResponse ReviewService::queue(const std::string& status) const {
    if (!status.empty() && status != "pending" && status != "resolved") {
        return error_response(400, "status must be pending or resolved");
    }
    std::shared_lock lock(mu_);
    json out = json::array();
    for (const auto& item : items_) {
        if (status.empty() || to_string(item.status()) == status) out.push_back(to_json(item));
    }
    return {200, {{"items", out}}};
}

ReviewResponse ReviewService::item(const std::string& verdict_ref) const {
    std::shared_lock lock(mu_);
    for (const auto& item : items_) {
        if (item.verdict_ref == verdict_ref) return {200, to_json(item)};
    }
    return error_response(404, "unknown verdict_ref " + verdict_ref);
}

ReviewResponse ReviewService::submit(const std::string& body) {
    json j;
    try {
        j = json::parse(body);
    } catch (const json::exception&) {
        return error_response(400, "body is not valid JSON");
    }
    if (!j.is_object()) return error_response(400, "body must be a JSON object");
    if (!j.contains("verdict_ref") || !j["verdict_ref"].is_string()) {
        return error_response(422, "verdict_ref must be a string");
    }
    if (!j.contains("likert") || !j["likert"].is_array() || j["likert"].size() != judging::kRubricItems) {
        return error_response(422, "likert must be an array of five integers");
    }
    judging::Likert likert{};
    for (std::size_t i = 0; i < judging::kRubricItems; ++i) {
        const auto& v = j["likert"][i];
        if (!v.is_number_integer() || v.get<long long>() < 0 || v.get<long long>() > judging::kLikertMax) {
            return error_response(422, "likert values must be integers 0-5");
        }
        likert[i] = v.get<int>();
    }
    if (j.contains("script_valid") && !j["script_valid"].is_boolean()) {
        return error_response(422, "script_valid must be a boolean");
    }
    if (j.contains("note") && !j["note"].is_string()) return error_response(422, "note must be a string");
    const std::string ref = j["verdict_ref"].get<std::string>();
    const bool script_valid = j.value("script_valid", true);
    const std::string note = j.value("note", "");

    std::unique_lock lock(mu_);
    auto it = std::find_if(items_.begin(), items_.end(), [&](const FallbackItem& i) { return i.verdict_ref == ref; });
    if (it == items_.end()) return error_response(404, "unknown verdict_ref " + ref);
    auto updated = items_;
    auto& target = updated[static_cast<std::size_t>(it - items_.begin())];
    target.human_override = make_human_verdict(likert, script_valid, note, weights_);
    target.note = note;
    try {
        save_fallback_queue(path_, updated);
    } catch (const std::exception& e) {
        return error_response(500, std::string("could not persist override: ") + e.what());
    }
    items_ = std::move(updated);
    return {200,
            {{"verdict_ref", ref},
             {"status", "resolved"},
             {"human_override", verdict_view(*target.human_override)}}};
}

ReviewResponse ReviewService::progress() const {
    std::shared_lock lock(mu_);
    std::size_t resolved = 0;
    for (const auto& item : items_) resolved += item.status() == FallbackStatus::Resolved;
    return {200, {{"total", items_.size()}, {"pending", items_.size() - resolved}, {"resolved", resolved}}};
}

ReviewResponse ReviewService::weights() const {
    json w = json::object();
    for (auto item : judging::kRubricOrder) w[std::string(judging::to_string(item))] = weights_[item];
    json order = json::array();
    for (auto item : judging::kRubricOrder) order.push_back(judging::to_string(item));
    return {200, {{"weights", w}, {"order", order}, {"likert_max", judging::kLikertMax}, {"scale_max", weights_.sum()}}};
}

}  // namespace de::pipeline
