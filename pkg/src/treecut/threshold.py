"""Search for an entropy threshold meeting a coverage target.

Coverage falls as the threshold rises (higher thresholds cut less, so
chunks are bigger and more specific), which makes plain interval
bisection sound.  With neighbor restrictions the profile is no longer
monotone, only peaked, so a coarse grid locates the peak first and
bisection then sharpens the decreasing flank.

Both searches probe a single callable from threshold to (cutnodes,
coverage, rules), so they are independent of how probes are produced.
"""

from dataclasses import dataclass
from typing import Callable

from treecut.cutnodes import CutnodeSet


@dataclass
class ThresholdProbe:
    """Outcome of evaluating one threshold."""

    cutnodes: CutnodeSet
    coverage: float
    rules: object = None


Evaluator = Callable[[float], ThresholdProbe]


@dataclass
class BisectionConfig:
    s_high_init: float
    delta_s: float = 0.01
    max_steps: int = 200


@dataclass
class ThresholdResult:
    threshold: float
    cutnodes: CutnodeSet
    achieved_coverage: float
    attainable: bool
    rules: object = None
    bracket_high: float | None = None
    coverage_at_high: float | None = None
    steps: int = 0


def bisect(c0: float, evaluate: Evaluator, cfg: BisectionConfig) -> ThresholdResult:
    """Highest threshold with coverage >= c0, to within delta_s.

    Assumes coverage is non-increasing in the threshold.  When even
    threshold 0 misses the target the result carries attainable = False
    and the threshold-0 outcome.
    """
    low = evaluate(0.0)
    if low.coverage < c0:
        return ThresholdResult(0.0, low.cutnodes, low.coverage, False, low.rules)
    s_low, s_high = 0.0, cfg.s_high_init
    high = evaluate(s_high)
    if high.coverage >= c0:
        return ThresholdResult(
            s_high, high.cutnodes, high.coverage, True, high.rules, s_high,
            high.coverage, steps=2,
        )
    best = low
    cov_high = high.coverage
    steps = 2
    while s_high - s_low >= cfg.delta_s and steps < cfg.max_steps:
        mid = (s_low + s_high) / 2
        probe = evaluate(mid)
        steps += 1
        if probe.coverage < c0:
            s_high = mid
            cov_high = probe.coverage
        else:
            s_low = mid
            best = probe
    return ThresholdResult(
        s_low, best.cutnodes, best.coverage, True, best.rules, s_high,
        cov_high, steps,
    )


def search_unimodal(
    c0: float, evaluate: Evaluator, cfg: BisectionConfig
) -> ThresholdResult:
    """Grid scan for the coverage peak, then bisect its falling flank.

    The grid step is 16 * delta_s over [0, s_high_init].  When the peak
    itself misses the target the result is the peak, unattainable.
    """
    step = cfg.delta_s * 16
    grid = [0.0]
    while grid[-1] + step < cfg.s_high_init:
        grid.append(grid[-1] + step)
    if grid[-1] < cfg.s_high_init:
        grid.append(cfg.s_high_init)
    probes = [evaluate(t) for t in grid]
    steps = len(grid)
    peak = max(range(len(grid)), key=lambda i: (probes[i].coverage, -i))
    if probes[peak].coverage < c0:
        p = probes[peak]
        return ThresholdResult(
            grid[peak], p.cutnodes, p.coverage, False, p.rules, steps=steps
        )
    last_ok = peak
    while last_ok + 1 < len(grid) and probes[last_ok + 1].coverage >= c0:
        last_ok += 1
    if last_ok == len(grid) - 1:
        p = probes[last_ok]
        return ThresholdResult(
            grid[last_ok], p.cutnodes, p.coverage, True, p.rules,
            grid[last_ok], p.coverage, steps,
        )
    s_low, s_high = grid[last_ok], grid[last_ok + 1]
    best = probes[last_ok]
    cov_high = probes[last_ok + 1].coverage
    while s_high - s_low >= cfg.delta_s and steps < cfg.max_steps:
        mid = (s_low + s_high) / 2
        probe = evaluate(mid)
        steps += 1
        if probe.coverage < c0:
            s_high = mid
            cov_high = probe.coverage
        else:
            s_low = mid
            best = probe
    return ThresholdResult(
        s_low, best.cutnodes, best.coverage, True, best.rules, s_high,
        cov_high, steps,
    )
