"""Dialect bias evaluation workbench: metrics, agreement, judging, retrieval and the run pipeline."""

from ._core import (
    DialectEvalError,
    Pipeline,
    Retriever,
    agreement_report,
    bertscore_f1,
    bleu,
    build_bias_judge_prompt,
    cbs,
    ccc,
    check_rubric_ceilings,
    chrf,
    compute_final_score,
    cosine_similarity,
    mae,
    normalize_metric,
    normalize_text,
    parse_bias_verdict,
    pearson,
    rubric_statements,
    spearman,
    tag_query,
    tokenize,
    wer,
)

STAGES = ("index", "translate", "respond", "judge")


def run_all(config, workdir=None):
    """Runs every stage of a config and returns (pipeline, report)."""
    pipeline = Pipeline(config, workdir=workdir)
    for stage in STAGES:
        pipeline.stage(stage)
    pipeline.agree()
    return pipeline, pipeline.report()


__all__ = [name for name in dir() if not name.startswith("_")]
