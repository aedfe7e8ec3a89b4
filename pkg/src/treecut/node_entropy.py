"""Entropy scores for or-nodes of the and-or tree.

Three schemes:

* ``rhs-local``: the phrase entropy of the slot the node occupies.
* ``mixed``: the slot entropy plus the expected LHS entropy of the
  node's arc rules, weighted by arc relative frequency.  Lexical arcs
  contribute nothing.
* ``arc-frequency``: the entropy of the node's own arc-count
  distribution, with counts pooled over the node's equivalence class
  under a given cutnode assignment.

The first two read table entries at the table's reporting precision and
round the result the same way, so scores match the printed table
arithmetic digit for digit; pass ``decimals=None`` for exact values.
The root (and any unseen slot) scores 0 under rhs-local and mixed.
"""

import math
from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal
from enum import Enum

from treecut.andor import AndOrTree, OrNode
from treecut.entropy import LHS_POSITION, PhraseEntropyTable, Slot, entropy
from treecut.grammar import LEX


class RootHasNoParentError(Exception):
    """Per-node scoring was asked for the root's (absent) parent slot."""


class CategoryMismatchError(Exception):
    """Unified scoring combined a slot with a rule of another category."""


class EntropyScheme(str, Enum):
    RHS_LOCAL = "rhs-local"
    MIXED = "mixed"
    ARC_FREQUENCY = "arc-frequency"


def _published_decimal(table: PhraseEntropyTable, slot: Slot, decimals: int) -> Decimal:
    unit = Decimal(1).scaleb(-decimals)
    return Decimal(table.value(slot)).quantize(unit, ROUND_HALF_EVEN)


def node_entropy_rhs_local(
    node: OrNode, table: PhraseEntropyTable, decimals: int | None = 2
) -> float:
    if node.parent_slot is None:
        raise RootHasNoParentError(node.node_id)
    return table.published_value(node.parent_slot, decimals)


def node_entropy_mixed(
    node: OrNode, table: PhraseEntropyTable, decimals: int | None = 2
) -> float:
    if node.parent_slot is None:
        raise RootHasNoParentError(node.node_id)
    total = node.visit_count
    if decimals is None:
        acc = table.value(node.parent_slot)
        for rule, count in node.arc_counts.items():
            if rule != LEX and total:
                acc += (count / total) * table.value(Slot(rule, LHS_POSITION))
        return acc
    unit = Decimal(1).scaleb(-decimals)
    acc = _published_decimal(table, node.parent_slot, decimals)
    for rule, count in node.arc_counts.items():
        if rule != LEX and total:
            weight = Decimal(count) / Decimal(total)
            acc += weight * _published_decimal(table, Slot(rule, LHS_POSITION), decimals)
    return float(acc.quantize(unit, ROUND_HALF_EVEN))


def node_entropy_arc_frequency(
    node: OrNode, members: list[OrNode] | None = None
) -> float:
    """Arc-count entropy pooled over *members* (default: the node alone)."""
    pooled: dict[str, int] = {}
    for member in members or [node]:
        for rule, count in member.arc_counts.items():
            pooled[rule] = pooled.get(rule, 0) + count
    return entropy(pooled)


def unified_node_entropy(
    parent_slot: Slot,
    child_rule: str,
    table: PhraseEntropyTable,
    decimals: int | None = 2,
) -> float:
    """Sum of a slot's entropy and a child rule's LHS entropy.

    A diagnostic combination: it upper-bounds how much uncertainty a cut
    at the slot boundary removes.  The child rule's category must match
    the slot's.
    """
    inv = table.inventory
    slot_rule = inv[parent_slot.rule]
    if parent_slot.position == LHS_POSITION or parent_slot.position > slot_rule.arity:
        raise CategoryMismatchError(f"{parent_slot} is not an RHS slot")
    slot_cat = slot_rule.rhs[parent_slot.position - 1]
    child_cat = inv[child_rule].lhs
    if slot_cat != child_cat:
        raise CategoryMismatchError(
            f"slot category '{slot_cat}' vs rule category '{child_cat}'"
        )
    lhs_slot = Slot(child_rule, LHS_POSITION)
    if decimals is None:
        return table.value(parent_slot) + table.value(lhs_slot)
    unit = Decimal(1).scaleb(-decimals)
    acc = _published_decimal(table, parent_slot, decimals) + _published_decimal(
        table, lhs_slot, decimals
    )
    return float(acc.quantize(unit, ROUND_HALF_EVEN))


def local_perplexity(node_entropy: float) -> float:
    """e**s, the effective branching factor at entropy s."""
    return math.exp(node_entropy)


@dataclass
class NodeEntropyMap:
    """Per-node scores for one scheme over one and-or tree."""

    scheme: EntropyScheme
    values: dict[str, float]

    def __getitem__(self, node_id: str) -> float:
        return self.values[node_id]

    def max_value(self) -> float:
        return max(self.values.values(), default=0.0)


def compute_node_entropies(
    aot: AndOrTree,
    table: PhraseEntropyTable | None,
    scheme: EntropyScheme,
    decimals: int | None = 2,
    grouping: dict[str, list[OrNode]] | None = None,
) -> NodeEntropyMap:
    """Score every or-node.

    ``grouping`` maps node ids to equivalence-class member lists and is
    only consulted by the arc-frequency scheme; omitted, every node is
    its own class.  The other schemes require *table*.
    """
    values: dict[str, float] = {}
    for node in aot.nodes():
        if scheme is EntropyScheme.ARC_FREQUENCY:
            members = grouping.get(node.node_id) if grouping else None
            values[node.node_id] = node_entropy_arc_frequency(node, members)
        elif node.parent_slot is None:
            values[node.node_id] = 0.0
        elif scheme is EntropyScheme.RHS_LOCAL:
            values[node.node_id] = node_entropy_rhs_local(node, table, decimals)
        else:
            values[node.node_id] = node_entropy_mixed(node, table, decimals)
    return NodeEntropyMap(scheme=scheme, values=values)


def render_node_entropies(aot: AndOrTree, scores: NodeEntropyMap, decimals: int = 4) -> str:
    """TSV of id, category, score in index (DFS) order."""
    lines = ["node\tcategory\tentropy"]
    for node in sorted(aot.nodes(), key=lambda n: n.seq):
        lines.append(f"{node.node_id}\t{node.category}\t{scores[node.node_id]:.{decimals}f}")
    return "\n".join(lines) + "\n"
