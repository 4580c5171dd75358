#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <nlohmann/json.hpp>

#include "dialect_eval/agreement/agreement.hpp"
#include "dialect_eval/common/error.hpp"
#include "dialect_eval/corpus/io.hpp"
#include "dialect_eval/corpus/text.hpp"
#include "dialect_eval/judging/bias_judge.hpp"
#include "dialect_eval/judging/rubric.hpp"
#include "dialect_eval/judging/translation_judge.hpp"
#include "dialect_eval/metrics/textmetrics.hpp"
#include "dialect_eval/pipeline/config.hpp"
#include "dialect_eval/pipeline/run.hpp"
#include "dialect_eval/retrieval/embedder.hpp"
#include "dialect_eval/retrieval/hybrid.hpp"
#include "dialect_eval/retrieval/prompt.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

/// JSON documents cross the boundary as Python objects via the json module.
py::object to_py(const json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

de::Matrix to_matrix(const std::vector<std::vector<double>>& rows) { return de::Matrix::from_rows(rows); }

de::metrics::MetricKind metric_kind(const std::string& name) {
    for (auto k : {de::metrics::MetricKind::BLEU, de::metrics::MetricKind::ChrF, de::metrics::MetricKind::WER,
                   de::metrics::MetricKind::CosineSim, de::metrics::MetricKind::BertF1}) {
        if (de::metrics::to_string(k) == name) return k;
    }
    throw de::Error(de::Errc::InvalidArgument, "unknown metric '" + name + "'");
}

de::judging::RubricWeights weights_from(const std::optional<std::array<double, 5>>& w) {
    de::judging::RubricWeights out;
    if (w) out.values = *w;
    return out;
}

py::dict verdict_dict(const de::judging::BiasVerdict& v) {
    py::dict d;
    d["reasoning"] = v.reasoning;
    d["likert"] = v.likert;
    d["script_valid"] = v.script_valid;
    d["refusal"] = v.refusal;
    d["confidence"] = v.confidence;
    d["final_score"] = v.final_score;
    return d;
}

py::dict report_dict(const de::agreement::AgreementReport& r) {
    py::dict d;
    d["ccc"] = r.ccc;
    d["cbs"] = r.cbs;
    d["pearson"] = r.pearson;
    d["spearman"] = r.spearman;
    d["mae"] = r.mae;
    d["n_items"] = r.n_items;
    d["n_critical"] = r.n_critical;
    d["passes_ccc"] = r.passes_ccc;
    d["passes_cbs"] = r.passes_cbs;
    return d;
}

de::agreement::ScoreSeries series(std::vector<double> a, std::vector<double> b, double scale_max) {
    return de::agreement::ScoreSeries::of(std::move(a), std::move(b), scale_max);
}

/// Hybrid retriever over a corpus file with hash-embedder vectors.
class Retriever {
public:
    Retriever(const std::filesystem::path& corpus, std::size_t dim) : embedder_(dim) {
        auto pairs = de::corpus::load_pairs(corpus);
        std::unordered_map<std::string, std::vector<double>> vectors;
        for (const auto& p : pairs) vectors.emplace(p.id, embedder_.embed_one(p.standard));
        auto [dense, sparse] = de::retrieval::build_indexes(pairs, vectors);
        retriever_ = std::make_unique<de::retrieval::HybridRetriever>(std::move(pairs), std::move(dense),
                                                                      std::move(sparse));
    }

    py::dict retrieve(const std::string& query, const std::string& district, std::size_t k) const {
        const auto q = de::corpus::tag_query(query);
        const auto d = de::corpus::parse_dialect(district);
        const auto res = retriever_->retrieve(q, embedder_.embed_one(q.original), d, k);
        py::list cands;
        for (const auto& c : res.candidates) {
            py::dict row;
            row["pair_id"] = c.pair_id;
            row["standard"] = c.standard_text;
            row["dialect"] = c.dialect_text;
            row["blended"] = c.blended;
            row["dense_sim"] = c.dense_sim;
            row["sparse_scaled"] = c.sparse_scaled;
            row["district_match"] = c.district_match;
            row["from_deep_search"] = c.from_deep_search;
            cands.append(row);
        }
        py::dict out;
        out["candidates"] = cands;
        out["short_profile"] = res.short_profile;
        out["pool_k"] = res.pool_k;
        out["deep_search_used"] = res.deep_search_used;
        out["prompt"] = res.candidates.empty() ? std::string() : de::retrieval::build_fewshot_prompt(res.candidates, q, d);
        return out;
    }

    std::size_t size() const { return retriever_->pairs().size(); }

private:
    de::retrieval::HashEmbedder embedder_;
    std::unique_ptr<de::retrieval::HybridRetriever> retriever_;
};

/// A run plus the transport it talks to.
class Pipeline {
public:
    Pipeline(const std::filesystem::path& config_path, std::optional<std::filesystem::path> workdir,
             std::optional<std::string> resume) {
        auto config = de::pipeline::load_config(config_path);
        if (workdir) config.workdir = *workdir;
        transport_ = de::pipeline::make_transport(config);
        run_ = std::make_unique<de::pipeline::Run>(std::move(config), *transport_, std::move(resume));
    }

    py::dict stage(const std::string& name) {
        de::pipeline::StageSummary s;
        {
            py::gil_scoped_release release;
            if (name == "index") {
                s = run_->index();
            } else if (name == "translate") {
                s = run_->translate();
            } else if (name == "respond") {
                s = run_->respond();
            } else if (name == "judge") {
                s = run_->judge();
            } else {
                throw de::Error(de::Errc::InvalidArgument, "unknown stage '" + name + "'");
            }
        }
        py::dict d;
        d["stage"] = s.stage;
        d["total"] = s.total;
        d["skipped"] = s.skipped;
        d["written"] = s.written;
        d["failed"] = s.failed;
        return d;
    }

    py::object agree() { return to_py(run_->agree()); }
    py::object report() { return to_py(run_->report()); }
    std::string run_id() const { return run_->run_id(); }
    std::filesystem::path directory() const { return run_->paths().dir; }

private:
    std::unique_ptr<de::judging::Transport> transport_;
    std::unique_ptr<de::pipeline::Run> run_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Dialect bias evaluation workbench";

    py::register_exception<de::Error>(m, "DialectEvalError", PyExc_RuntimeError);
    // Re-raise with the error code attached as `.code`.
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const de::Error& e) {
            py::object exc = py::module_::import("dialect_eval._core").attr("DialectEvalError")(e.what());
            exc.attr("code") = std::string(de::errc_name(e.code()));
            PyErr_SetObject(exc.get_type().ptr(), exc.ptr());
        }
    });

    // corpus
    m.def("normalize_text", [](const std::string& raw) {
        const auto n = de::corpus::normalize_text(raw);
        return py::make_tuple(n.display, n.key);
    }, "(display, matching key) of a raw string");
    m.def("tokenize", [](const std::string& s) { return de::corpus::tokenize(s); });
    m.def("tag_query", [](const std::string& raw) {
        const auto q = de::corpus::tag_query(raw);
        py::dict d;
        d["normalized"] = q.normalized;
        d["tokens"] = q.tokens;
        d["is_short"] = q.is_short;
        d["tagged"] = q.tagged_text();
        return d;
    });

    // metrics
    m.def("bleu", &de::metrics::bleu, py::arg("hypothesis"), py::arg("reference"), py::arg("max_n") = 4);
    m.def("chrf", &de::metrics::chrf, py::arg("hypothesis"), py::arg("reference"), py::arg("n") = 6,
          py::arg("beta") = 2.0);
    m.def("wer", &de::metrics::wer, py::arg("hypothesis"), py::arg("reference"));
    m.def("cosine_similarity", [](const std::vector<double>& a, const std::vector<double>& b) {
        return de::metrics::cosine_similarity(a, b);
    });
    m.def("bertscore_f1", [](const std::vector<std::vector<double>>& hyp, const std::vector<std::vector<double>>& ref) {
        return de::metrics::bertscore_f1(to_matrix(hyp), to_matrix(ref));
    });
    m.def("normalize_metric", [](double value, const std::string& kind) {
        return de::metrics::normalize_metric(value, metric_kind(kind));
    }, py::arg("value"), py::arg("kind"));

    // agreement
    m.def("ccc", [](std::vector<double> a, std::vector<double> b, double scale_max) {
        return de::agreement::ccc(series(std::move(a), std::move(b), scale_max));
    }, py::arg("a"), py::arg("b"), py::arg("scale_max") = 10.0);
    m.def("pearson", [](std::vector<double> a, std::vector<double> b, double scale_max) {
        return de::agreement::pearson(series(std::move(a), std::move(b), scale_max));
    }, py::arg("a"), py::arg("b"), py::arg("scale_max") = 10.0);
    m.def("spearman", [](std::vector<double> a, std::vector<double> b, double scale_max) {
        return de::agreement::spearman(series(std::move(a), std::move(b), scale_max));
    }, py::arg("a"), py::arg("b"), py::arg("scale_max") = 10.0);
    m.def("mae", [](std::vector<double> a, std::vector<double> b, double scale_max) {
        return de::agreement::mae(series(std::move(a), std::move(b), scale_max));
    }, py::arg("a"), py::arg("b"), py::arg("scale_max") = 10.0);
    m.def("cbs", [](std::vector<double> a, std::vector<double> b, double threshold, double scale_max) {
        return de::agreement::cbs(series(std::move(a), std::move(b), scale_max), {threshold, scale_max});
    }, py::arg("a"), py::arg("b"), py::arg("threshold") = 4.0, py::arg("scale_max") = 10.0,
       "None when a has no score below the threshold");
    m.def("agreement_report", [](std::vector<double> a, std::vector<double> b, double threshold, double scale_max) {
        return report_dict(de::agreement::agreement_report(series(std::move(a), std::move(b), scale_max),
                                                           {threshold, scale_max}));
    }, py::arg("a"), py::arg("b"), py::arg("threshold") = 4.0, py::arg("scale_max") = 10.0);

    // judging
    m.def("compute_final_score", [](const de::judging::Likert& likert, std::optional<std::array<double, 5>> w) {
        return de::judging::compute_final_score(likert, weights_from(w));
    }, py::arg("likert"), py::arg("weights") = py::none());
    m.def("parse_bias_verdict", [](const std::string& raw, bool strict, std::optional<std::array<double, 5>> w) {
        return verdict_dict(de::judging::apply_script_gate(de::judging::parse_bias_verdict(raw, strict), weights_from(w)));
    }, py::arg("raw"), py::arg("strict") = false, py::arg("weights") = py::none(),
       "Parsed verdict with the script gate applied and the final score filled in");
    m.def("build_bias_judge_prompt", [](const std::string& std_q, const std::string& dia_q, const std::string& std_r,
                                        const std::string& dia_r, const std::string& dialect) {
        return de::judging::build_bias_judge_prompt(std_q, dia_q, std_r, dia_r, de::corpus::parse_dialect(dialect));
    });
    m.def("rubric_statements", [] { return de::judging::default_rubric_statements(); });
    m.def("check_rubric_ceilings", [](const std::string& raw) {
        py::list out;
        for (const auto& v : de::judging::check_rubric_ceilings(de::judging::parse_translation_verdict(raw))) {
            out.append(py::make_tuple(v.ceiling, v.rule));
        }
        return out;
    }, py::arg("raw"), "(ceiling, rule) pairs violated by a translation verdict");

    py::class_<Retriever>(m, "Retriever")
        .def(py::init<const std::filesystem::path&, std::size_t>(), py::arg("corpus"), py::arg("dim") = 64)
        .def("retrieve", &Retriever::retrieve, py::arg("query"), py::arg("district"), py::arg("k") = 5)
        .def("__len__", &Retriever::size);

    py::class_<Pipeline>(m, "Pipeline")
        .def(py::init<const std::filesystem::path&, std::optional<std::filesystem::path>, std::optional<std::string>>(),
             py::arg("config"), py::arg("workdir") = py::none(), py::arg("resume") = py::none())
        .def("stage", &Pipeline::stage, py::arg("name"))
        .def("agree", &Pipeline::agree)
        .def("report", &Pipeline::report)
        .def_property_readonly("run_id", &Pipeline::run_id)
        .def_property_readonly("directory", &Pipeline::directory);
}
