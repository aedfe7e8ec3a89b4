"""End-to-end run: load corpora, pick cutnodes, extract rules, score them.

The pipeline is a thin sequencing layer over the other modules.  All
outputs are deterministic functions of the inputs and the config, so a
rerun into the same directory rewrites byte-identical files.
"""

import os
from dataclasses import dataclass, field

from treecut.andor import AndOrTree, dump, index_treebank
from treecut.coverage import (
    CoverageReport,
    ReductionStats,
    evaluate_coverage,
    reduction_stats,
    render_stats,
)
from treecut.cutnodes import (
    CutnodeSet,
    SelectionConfig,
    render_cut_classes,
    select_by_threshold,
    select_iterative,
)
from treecut.entropy import PhraseEntropyTable, build_phrase_table, render_entropy_table
from treecut.extraction import (
    ANDOR_ENUM,
    DEFAULT_MAX_CHUNKS,
    TRAINING_CUT,
    RuleSet,
    extract_andor,
    extract_training,
    render_rule_file,
)
from treecut.grammar import (
    GrammarFormatError,
    Treebank,
    TreebankFormatError,
    parse_rule_inventory,
    parse_treebank,
)
from treecut.sexpr import SexprError
from treecut.node_entropy import (
    EntropyScheme,
    NodeEntropyMap,
    compute_node_entropies,
    render_node_entropies,
)
from treecut.threshold import (
    BisectionConfig,
    ThresholdProbe,
    ThresholdResult,
    bisect,
    search_unimodal,
)


@dataclass
class PipelineConfig:
    grammar_path: str
    train_path: str
    test_path: str | None = None
    top: str = "s"
    scheme: EntropyScheme = EntropyScheme.MIXED
    neighbor_restrictions: bool = False
    decimals: int | None = 2
    threshold: float | None = None
    coverage_target: float | None = None
    mode: str = TRAINING_CUT
    max_chunks: int = DEFAULT_MAX_CHUNKS
    delta_s: float = 0.01
    max_iterations: int = 50
    weighted_stats: bool = False
    out_dir: str | None = None


@dataclass
class PipelineResult:
    treebank: Treebank
    table: PhraseEntropyTable
    aot: AndOrTree
    scores: NodeEntropyMap
    threshold: float
    search: ThresholdResult | None
    cutnodes: CutnodeSet
    rules: RuleSet
    coverage: CoverageReport | None
    stats: ReductionStats
    attainable: bool
    written: list[str] = field(default_factory=list)


def config_line(cfg: PipelineConfig) -> str:
    parts = [
        f"grammar={cfg.grammar_path}",
        f"train={cfg.train_path}",
        f"test={cfg.test_path or '-'}",
        f"top={cfg.top}",
        f"scheme={cfg.scheme.value}",
        f"restrictions={'on' if cfg.neighbor_restrictions else 'off'}",
        f"decimals={cfg.decimals if cfg.decimals is not None else 'exact'}",
        f"mode={cfg.mode}",
    ]
    if cfg.threshold is not None:
        parts.append(f"threshold={cfg.threshold:g}")
    if cfg.coverage_target is not None:
        parts.append(f"coverage_target={cfg.coverage_target:g}")
    return "# config: " + " ".join(parts)


class InputError(Exception):
    """A file could not be read or parsed; the message names it."""


def _load(path: str, parse):
    try:
        with open(path, encoding="utf-8") as handle:
            return parse(handle.read())
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from exc
    except (SexprError, GrammarFormatError, TreebankFormatError) as exc:
        raise InputError(f"{path}: {exc}") from exc


def load_treebank(cfg: PipelineConfig) -> Treebank:
    """Read and validate the grammar and tree files.

    Raises InputError, with the offending path and line in the message,
    for unreadable or malformed files.
    """
    inv = _load(cfg.grammar_path, lambda t: parse_rule_inventory(t, cfg.top))
    training = _load(
        cfg.train_path, lambda t: parse_treebank(t, inv, require_top=True)
    )
    test = []
    if cfg.test_path is not None:
        test = _load(
            cfg.test_path, lambda t: parse_treebank(t, inv, require_top=True)
        )
    return Treebank(inv, training, test)


def selection_config(cfg: PipelineConfig) -> SelectionConfig:
    return SelectionConfig(
        scheme=cfg.scheme,
        neighbor_restrictions=cfg.neighbor_restrictions,
        max_iterations=cfg.max_iterations,
        decimals=cfg.decimals,
    )


def select_cutnodes(
    threshold: float,
    aot: AndOrTree,
    table: PhraseEntropyTable,
    cfg: PipelineConfig,
) -> CutnodeSet:
    sel = selection_config(cfg)
    if cfg.scheme is EntropyScheme.ARC_FREQUENCY:
        return select_iterative(threshold, aot, sel, table=table)
    return select_by_threshold(threshold, aot, table, sel)


def extract_rules(
    treebank: Treebank, aot: AndOrTree, cutnodes: CutnodeSet, cfg: PipelineConfig
) -> RuleSet:
    if cfg.mode == ANDOR_ENUM:
        return extract_andor(aot, cutnodes, max_chunks=cfg.max_chunks)
    return extract_training(treebank.training, aot, cutnodes)


def make_evaluator(treebank: Treebank, aot, table, cfg: PipelineConfig):
    """Threshold probe for the coverage search: select, extract, score."""

    def evaluate(threshold: float) -> ThresholdProbe:
        cutnodes = select_cutnodes(threshold, aot, table, cfg)
        rules = extract_rules(treebank, aot, cutnodes, cfg)
        report = evaluate_coverage(rules, treebank.test)
        return ThresholdProbe(cutnodes, report.fraction, rules)

    return evaluate


def run_pipeline(cfg: PipelineConfig) -> PipelineResult:
    treebank = load_treebank(cfg)
    table = build_phrase_table(treebank.training, treebank.inventory)
    aot = index_treebank(treebank.training, treebank.inventory)
    scores = compute_node_entropies(aot, table, cfg.scheme, decimals=cfg.decimals)

    search = None
    attainable = True
    if cfg.coverage_target is not None:
        bis = BisectionConfig(
            s_high_init=scores.max_value() + 1.0,
            delta_s=cfg.delta_s,
        )
        evaluate = make_evaluator(treebank, aot, table, cfg)
        if cfg.neighbor_restrictions:
            search = search_unimodal(cfg.coverage_target, evaluate, bis)
        else:
            search = bisect(cfg.coverage_target, evaluate, bis)
        attainable = search.attainable
        threshold = search.threshold
        cutnodes = search.cutnodes
        rules = search.rules
    else:
        threshold = cfg.threshold if cfg.threshold is not None else 0.0
        cutnodes = select_cutnodes(threshold, aot, table, cfg)
        rules = extract_rules(treebank, aot, cutnodes, cfg)

    report = None
    if treebank.test or cfg.test_path is not None:
        report = evaluate_coverage(rules, treebank.test)
    stat_trees = treebank.test if cfg.weighted_stats else None
    stats = reduction_stats(rules, trees=stat_trees, weighted=cfg.weighted_stats)

    result = PipelineResult(
        treebank, table, aot, scores, threshold, search, cutnodes, rules,
        report, stats, attainable,
    )
    if cfg.out_dir is not None:
        result.written = write_reports(result, cfg)
    return result


def _threshold_report(result: PipelineResult, cfg: PipelineConfig) -> str:
    lines = []
    if result.search is None:
        lines.append("mode\tfixed")
        lines.append(f"threshold\t{result.threshold:.6f}")
    else:
        s = result.search
        lines.append("mode\tsearch")
        lines.append(f"target\t{cfg.coverage_target:.6f}")
        lines.append(f"attainable\t{'yes' if s.attainable else 'no'}")
        lines.append(f"threshold\t{s.threshold:.6f}")
        lines.append(f"coverage\t{s.achieved_coverage:.6f}")
        if s.bracket_high is not None:
            lines.append(f"bracket_high\t{s.bracket_high:.6f}")
            lines.append(f"coverage_at_bracket_high\t{s.coverage_at_high:.6f}")
        lines.append(f"probes\t{s.steps}")
    lines.append(f"cut_classes\t{len(result.cutnodes.cut_classes())}")
    lines.append(f"cut_nodes\t{len(result.cutnodes.cut_node_ids())}")
    return "\n".join(lines) + "\n"


def _coverage_report(report: CoverageReport) -> str:
    lines = ["tree\tcovered\tapplications"]
    for i, verdict in enumerate(report.verdicts):
        apps = len(report.tilings[i].applications()) if verdict else 0
        lines.append(f"{i}\t{'yes' if verdict else 'no'}\t{apps}")
    lines.append(f"fraction\t{report.fraction:.6f}\t")
    return "\n".join(lines) + "\n"


def write_reports(result: PipelineResult, cfg: PipelineConfig) -> list[str]:
    """Write every report file; returns the paths in write order."""
    os.makedirs(cfg.out_dir, exist_ok=True)
    header = config_line(cfg)
    files = {
        "entropy_table.tsv": render_entropy_table(result.table),
        "node_entropy.tsv": render_node_entropies(result.aot, result.scores),
        "andor_index.txt": dump(result.aot),
        "threshold.txt": _threshold_report(result, cfg),
        "cutnodes.txt": render_cut_classes(result.cutnodes, result.scores),
        "rules.txt": render_rule_file(result.rules),
        "reduction_stats.tsv": render_stats(
            result.stats, "weighted" if cfg.weighted_stats else "unweighted"
        ),
    }
    if result.coverage is not None:
        files["coverage.tsv"] = _coverage_report(result.coverage)
    written = []
    for name in sorted(files):
        path = os.path.join(cfg.out_dir, name)
        body = files[name]
        if not body.endswith("\n"):
            body += "\n"
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(header + "\n" + body)
        written.append(path)
    return written
