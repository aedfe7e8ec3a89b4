"""Selection of cutnodes: where specialized rules get sliced apart.

A cutnode assignment partitions the or-nodes into equivalence classes
and marks some classes as cut.  The closure keeps assignments coherent:
cut nodes of the same category are interchangeable, so they are equated,
and equated nodes must agree structurally, so their children along
identical arcs are equated too (congruence); a class containing one
cutnode is cut as a whole.  Classes without a single lexical yield are
never cut, because rules spanning no words are useless tilings.

Two selectors produce assignments: a threshold filter over per-node
entropy scores (rhs-local or mixed), and an iterated filter for the
arc-frequency scheme, whose scores depend on the previous assignment.
Optional neighbor restrictions remove classes that would cut both a
rule's own attachment and its tightest (lowest-entropy) RHS slot, which
would otherwise reintroduce the original rule as a degenerate chunk.
"""

from dataclasses import dataclass, field, replace

from treecut.andor import AndOrTree, OrNode
from treecut.entropy import LHS_POSITION, PhraseEntropyTable, Slot
from treecut.grammar import LEX
from treecut.node_entropy import (
    EntropyScheme,
    NodeEntropyMap,
    compute_node_entropies,
)


class IterationLimitError(Exception):
    """Iterated selection failed to settle; carries the last two iterates."""

    def __init__(self, previous: frozenset, last: frozenset):
        super().__init__(
            f"no fixpoint or near-cycle after limit; last sizes "
            f"{len(previous)} and {len(last)}"
        )
        self.previous = previous
        self.last = last


@dataclass
class SelectionConfig:
    scheme: EntropyScheme = EntropyScheme.MIXED
    neighbor_restrictions: bool = False
    max_iterations: int = 50
    cycle_rho_delta_fraction: float = 0.10
    decimals: int | None = 2


@dataclass(frozen=True)
class EquivalenceClass:
    """Or-nodes treated as one position; members sorted by index order."""

    members: tuple[OrNode, ...]
    cut: bool

    @property
    def representative(self) -> OrNode:
        return self.members[0]

    @property
    def category(self) -> str:
        return self.representative.category

    def member_ids(self) -> frozenset[str]:
        return frozenset(m.node_id for m in self.members)

    def has_lexical_yield(self) -> bool:
        return any(m.has_lexical_yield for m in self.members)


@dataclass
class CutnodeSet:
    """A full partition of the or-nodes with some classes marked cut."""

    classes: tuple[EquivalenceClass, ...]
    node_to_class: dict[str, EquivalenceClass] = field(default_factory=dict)

    def __post_init__(self):
        if not self.node_to_class:
            self.node_to_class = {
                m.node_id: cls for cls in self.classes for m in cls.members
            }

    def cut_classes(self) -> list[EquivalenceClass]:
        return [c for c in self.classes if c.cut]

    def cut_node_ids(self) -> frozenset[str]:
        return frozenset(
            m.node_id for c in self.classes if c.cut for m in c.members
        )

    def is_cut(self, node_id: str) -> bool:
        cls = self.node_to_class.get(node_id)
        return cls is not None and cls.cut

    def class_of(self, node_id: str) -> EquivalenceClass:
        return self.node_to_class[node_id]

    def grouping(self) -> dict[str, list[OrNode]]:
        return {
            m.node_id: list(cls.members)
            for cls in self.classes
            for m in cls.members
        }


def singleton_cutnodes(cut_ids: frozenset[str], aot: AndOrTree) -> CutnodeSet:
    """Every node its own class; no closure applied."""
    classes = tuple(
        EquivalenceClass((node,), node.node_id in cut_ids)
        for node in sorted(aot.nodes(), key=lambda n: n.seq)
    )
    return CutnodeSet(classes)


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if rb < ra:
            ra, rb = rb, ra
        self.parent[rb] = ra
        return True


def closure(cut_ids, aot: AndOrTree) -> CutnodeSet:
    """Least coherent assignment containing the given cutnodes.

    Idempotent and monotone in the cut set.  Classes whose members all
    lack lexical yield are demoted to uncut at the end.
    """
    nodes = sorted(aot.nodes(), key=lambda n: n.seq)
    uf = _UnionFind(len(nodes))
    cut_seqs = {aot[node_id].seq for node_id in cut_ids}

    changed = True
    while changed:
        changed = False
        groups: dict[int, list[OrNode]] = {}
        for node in nodes:
            groups.setdefault(uf.find(node.seq), []).append(node)
        # same-category cutnodes are equated
        by_cat: dict[str, list[int]] = {}
        for root, members in groups.items():
            if any(m.seq in cut_seqs for m in members):
                by_cat.setdefault(members[0].category, []).append(root)
        for roots in by_cat.values():
            for other in roots[1:]:
                changed |= uf.union(roots[0], other)
        # congruence: children of equated nodes along the same arc align
        for members in groups.values():
            if len(members) < 2:
                continue
            arcs: dict[str, list[OrNode]] = {}
            for m in members:
                for rule, and_node in m.arcs.items():
                    if rule == LEX:
                        continue
                    first = arcs.get(rule)
                    if first is None:
                        arcs[rule] = and_node.children
                    else:
                        for a, b in zip(first, and_node.children):
                            changed |= uf.union(a.seq, b.seq)
        # a class with one cutnode is cut as a whole
        for members in groups.values():
            seqs = {m.seq for m in members}
            if seqs & cut_seqs and not seqs <= cut_seqs:
                cut_seqs |= seqs
                changed = True

    groups = {}
    for node in nodes:
        groups.setdefault(uf.find(node.seq), []).append(node)
    classes = []
    for root in sorted(groups):
        members = tuple(sorted(groups[root], key=lambda n: n.seq))
        is_cut = any(m.seq in cut_seqs for m in members)
        if is_cut and not any(m.has_lexical_yield for m in members):
            is_cut = False
        classes.append(EquivalenceClass(members, is_cut))
    return CutnodeSet(tuple(classes))


def near_cycle(prev: frozenset, nxt: frozenset, fraction: float) -> bool:
    """True when the symmetric difference is small relative to the sizes."""
    return len(prev ^ nxt) < fraction * (len(prev) + len(nxt))


def _iterate(step, initial: frozenset, cfg: SelectionConfig) -> frozenset:
    """Run *step* until exact repetition or a near-cycle.

    Returns the earlier member of the detected pair, keeping the result
    close to the initial assignment.
    """
    history = [initial]
    for i in range(cfg.max_iterations):
        nxt = step(history[-1], i)
        for prev in history:
            if nxt == prev:
                return prev
        for prev in history:
            if near_cycle(prev, nxt, cfg.cycle_rho_delta_fraction):
                return prev
        history.append(nxt)
    raise IterationLimitError(history[-2] if len(history) > 1 else initial, history[-1])


def _threshold_seeds(scores: NodeEntropyMap, s_min: float, aot: AndOrTree) -> frozenset[str]:
    return frozenset(
        node.node_id
        for node in aot.nodes()
        if node.has_lexical_yield and scores[node.node_id] > s_min
    )


def neighbor_conflicts(
    cutset: CutnodeSet,
    aot: AndOrTree,
    table: PhraseEntropyTable,
    scores: NodeEntropyMap,
    decimals: int | None = 2,
) -> list[EquivalenceClass]:
    """Classes to remove so no rule has both neighboring boundaries cut.

    For each rule r, k* is its lowest-entropy RHS slot (ties: lowest
    index).  Cutting both an attachment of r (a node with an r arc) and
    an occupant of Slot(r, k*) conflicts; the class with the lower
    entropy loses, where a class scores the maximum of its members.
    Conflicts are processed in rule-id order, then representative order.
    """

    def class_entropy(cls: EquivalenceClass) -> float:
        return max(scores[m.node_id] for m in cls.members)

    cut = sorted(cutset.cut_classes(), key=lambda c: c.representative.seq)
    if not cut:
        return []
    lhs_of: dict[str, list[EquivalenceClass]] = {}
    occupant_of: dict[Slot, list[EquivalenceClass]] = {}
    for cls in cut:
        seen_rules = set()
        seen_slots = set()
        for m in cls.members:
            for rule in m.arcs:
                if rule != LEX and rule not in seen_rules:
                    seen_rules.add(rule)
                    lhs_of.setdefault(rule, []).append(cls)
            if m.parent_slot is not None and m.parent_slot not in seen_slots:
                seen_slots.add(m.parent_slot)
                occupant_of.setdefault(m.parent_slot, []).append(cls)

    removed: dict[int, EquivalenceClass] = {}
    for rule in sorted(set(lhs_of)):
        grammar_rule = aot.inventory[rule]
        if grammar_rule.arity == 0:
            continue
        k_star = min(
            range(1, grammar_rule.arity + 1),
            key=lambda k: (table.published_value(Slot(rule, k), decimals), k),
        )
        slot = Slot(rule, k_star)
        for lhs_cls in lhs_of.get(rule, []):
            for occ_cls in occupant_of.get(slot, []):
                if lhs_cls.representative.seq in removed:
                    continue
                if occ_cls.representative.seq in removed:
                    continue
                if lhs_cls is occ_cls:
                    removed[lhs_cls.representative.seq] = lhs_cls
                    continue
                loser = min(
                    (lhs_cls, occ_cls),
                    key=lambda c: (class_entropy(c), c.representative.seq),
                )
                removed[loser.representative.seq] = loser
    return [removed[seq] for seq in sorted(removed)]


def _restricted_fixpoint(
    seeds: frozenset[str],
    aot: AndOrTree,
    table: PhraseEntropyTable,
    scores: NodeEntropyMap,
    cfg: SelectionConfig,
) -> CutnodeSet:
    """Alternate conflict removal and closure until both settle.

    The first conflict round sees the seeds as singleton classes, before
    any equating; later rounds see closed assignments.
    """

    def step(cut_ids: frozenset, i: int) -> frozenset:
        current = (
            singleton_cutnodes(cut_ids, aot) if i == 0 else closure(cut_ids, aot)
        )
        conflicts = neighbor_conflicts(current, aot, table, scores, cfg.decimals)
        dropped = frozenset(
            m.node_id for cls in conflicts for m in cls.members
        )
        return closure(current.cut_node_ids() - dropped, aot).cut_node_ids()

    return closure(_iterate(step, seeds, cfg), aot)


def select_by_threshold(
    s_min: float,
    aot: AndOrTree,
    table: PhraseEntropyTable,
    cfg: SelectionConfig,
) -> CutnodeSet:
    """Cut every node scoring strictly above *s_min*, then close.

    Nodes without lexical yield never seed a cut.  Valid for the
    rhs-local and mixed schemes; arc-frequency needs select_iterative.
    """
    if cfg.scheme is EntropyScheme.ARC_FREQUENCY:
        raise ValueError("arc-frequency scores shift with the assignment; "
                         "use select_iterative")
    scores = compute_node_entropies(aot, table, cfg.scheme, cfg.decimals)
    seeds = _threshold_seeds(scores, s_min, aot)
    if not cfg.neighbor_restrictions:
        return closure(seeds, aot)
    return _restricted_fixpoint(seeds, aot, table, scores, cfg)


def select_iterative(
    s_min: float,
    aot: AndOrTree,
    cfg: SelectionConfig,
    table: PhraseEntropyTable | None = None,
) -> CutnodeSet:
    """Iterate arc-frequency selection until the assignment settles.

    Each round rescoring pools arc counts over the previous round's
    classes.  Stops on a fixpoint, an exact revisit, or a near-cycle
    (symmetric difference under the configured fraction of the sizes),
    returning the earlier member of the detected pair.  Neighbor
    restrictions, when enabled, need the phrase table for slot ranking.
    """
    if cfg.neighbor_restrictions and table is None:
        raise ValueError("neighbor restrictions need the phrase entropy table")

    def step(cut_ids: frozenset, i: int) -> frozenset:
        current = closure(cut_ids, aot)
        scores = compute_node_entropies(
            aot, None, EntropyScheme.ARC_FREQUENCY, grouping=current.grouping()
        )
        seeds = _threshold_seeds(scores, s_min, aot)
        if not cfg.neighbor_restrictions:
            return closure(seeds, aot).cut_node_ids()
        return _restricted_fixpoint(seeds, aot, table, scores, cfg).cut_node_ids()

    return closure(_iterate(step, frozenset(), cfg), aot)


def render_cut_classes(cutset: CutnodeSet, scores: NodeEntropyMap | None = None) -> str:
    """One line per cut class: representative, category, members, scores."""
    lines = []
    for cls in sorted(cutset.cut_classes(), key=lambda c: c.representative.seq):
        members = " ".join(m.node_id for m in cls.members)
        line = f"{cls.representative.node_id}\t{cls.category}\t{{{members}}}"
        if scores is not None:
            peak = max(scores[m.node_id] for m in cls.members)
            line += f"\t{peak:.4f}"
        lines.append(line)
    if not lines:
        return "(no cut classes)\n"
    return "\n".join(lines) + "\n"
