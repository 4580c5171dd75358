#include "dialect_eval/retrieval/prompt.hpp"

#include "dialect_eval/common/error.hpp"
#include "dialect_eval/common/template.hpp"

namespace de::retrieval {

FewShotTemplate FewShotTemplate::defaults() {
    return {
        "Translate the Standard Bengali sentence into the {{dialect}} dialect of Bengali.\n"
        "Use the example pairs below as guidance for vocabulary and spelling.\n\n",
        "Standard: {{standard}}\n{{dialect}}: {{dialect_text}}\n\n",
        "Standard: {{query}}\n{{dialect}}:",
    };
}

std::string build_fewshot_prompt(std::span<const Candidate> cands, const corpus::TaggedQuery& q,
                                 corpus::Dialect district, const FewShotTemplate& tmpl) {
    if (cands.empty()) throw Error(Errc::NoCandidates, "few-shot prompt needs at least one example");
    const std::string dialect(corpus::to_string(district));
    std::string out = render_template(tmpl.header, {{"dialect", dialect}});
    for (const auto& c : cands) {
        out += render_template(tmpl.example,
                               {{"dialect", dialect}, {"standard", c.standard_text}, {"dialect_text", c.dialect_text}});
    }
    out += render_template(tmpl.footer, {{"dialect", dialect}, {"query", corpus::normalize_text(q.original).display}});
    return out;
}

}  // namespace de::retrieval
