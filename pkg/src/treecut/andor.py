"""And-or tree index over a treebank.

The index merges every training tree into one alternating structure:
an or-node collects the alternative expansions observed at one tree
position (arcs labeled by rule id, ``lex`` included), and each arc leads
to an and-node whose children are the or-nodes for that rule's RHS
slots.  Arc traversal counts are kept so downstream scoring can weight
alternatives by relative frequency.

Node ids are assigned after construction by a DFS that orders arcs by
rule id, so any permutation of the training set produces the same ids:
the root is ``root``, or-nodes with at least one non-lex arc are
numbered ``n1``, ``n2``, ... in visit order, and or-nodes whose only
arcs are lexical are numbered ``t1``, ``t2``, ...
"""

from dataclasses import dataclass, field

from treecut.entropy import Slot
from treecut.grammar import LEX, Internal, LexLeaf, RuleInventory, yield_length


class PathNotInIndexError(Exception):
    """A tree position has no matching or-node arc in the index."""


@dataclass
class AndNode:
    rule: str
    children: list

    def __iter__(self):
        return iter(self.children)


@dataclass
class OrNode:
    category: str
    parent_slot: Slot | None
    arcs: dict[str, AndNode] = field(default_factory=dict)
    arc_counts: dict[str, int] = field(default_factory=dict)
    has_lexical_yield: bool = False
    node_id: str = ""
    seq: int = -1

    @property
    def visit_count(self) -> int:
        return sum(self.arc_counts.values())

    def sorted_arcs(self) -> list[tuple[str, AndNode]]:
        return sorted(self.arcs.items())

    def __hash__(self):
        return id(self)

    def __eq__(self, other):
        return self is other


@dataclass
class AndOrTree:
    root: OrNode
    node_index: dict[str, OrNode]
    inventory: RuleInventory

    def __getitem__(self, node_id: str) -> OrNode:
        return self.node_index[node_id]

    def nodes(self) -> list[OrNode]:
        return list(self.node_index.values())


def _insert(node: OrNode, tree, inv: RuleInventory) -> None:
    if yield_length(tree) > 0:
        node.has_lexical_yield = True
    if isinstance(tree, LexLeaf):
        node.arcs.setdefault(LEX, AndNode(LEX, []))
        node.arc_counts[LEX] = node.arc_counts.get(LEX, 0) + 1
        return
    rule = inv[tree.rule]
    if tree.rule not in node.arcs:
        children = [
            OrNode(category=cat, parent_slot=Slot(tree.rule, k))
            for k, cat in enumerate(rule.rhs, start=1)
        ]
        node.arcs[tree.rule] = AndNode(tree.rule, children)
    node.arc_counts[tree.rule] = node.arc_counts.get(tree.rule, 0) + 1
    and_node = node.arcs[tree.rule]
    for child_or, child_tree in zip(and_node.children, tree.children):
        _insert(child_or, child_tree, inv)


def _assign_ids(root: OrNode) -> dict[str, OrNode]:
    index: dict[str, OrNode] = {}
    counters = {"n": 0, "t": 0}

    def visit(node: OrNode) -> None:
        if node is root:
            node.node_id = "root"
        else:
            kind = "n" if any(r != LEX for r in node.arcs) else "t"
            counters[kind] += 1
            node.node_id = f"{kind}{counters[kind]}"
        node.seq = len(index)
        index[node.node_id] = node
        for _, and_node in node.sorted_arcs():
            for child in and_node.children:
                visit(child)

    visit(root)
    return index


def index_treebank(training: list, inv: RuleInventory) -> AndOrTree:
    """Merge the training trees into one and-or tree."""
    root = OrNode(category=inv.top, parent_slot=None)
    for tree in training:
        _insert(root, tree, inv)
    return AndOrTree(root=root, node_index=_assign_ids(root), inventory=inv)


def match_path(aot: AndOrTree, tree, path: tuple[int, ...] = ()) -> OrNode | None:
    """Or-node reached by replaying *tree*'s rules along *path*.

    *path* is a sequence of 0-based child indices from the tree root.
    Returns None when the walked rule sequence is absent from the index.
    """
    node = aot.root
    current = tree
    for k in path:
        if isinstance(current, LexLeaf):
            return None
        and_node = node.arcs.get(current.rule)
        if and_node is None or k >= len(and_node.children):
            return None
        node = and_node.children[k]
        current = current.children[k]
    return node


def dump(aot: AndOrTree) -> str:
    """Readable indented rendering: ids, categories, arcs and counts."""
    lines: list[str] = []

    def visit(node: OrNode, depth: int) -> None:
        pad = "  " * depth
        flag = "" if node.has_lexical_yield else "  [no lexical yield]"
        lines.append(
            f"{pad}{node.node_id} ({node.category}) visits={node.visit_count}{flag}"
        )
        for rule, and_node in node.sorted_arcs():
            lines.append(f"{pad}  -{rule} x{node.arc_counts[rule]}")
            for child in and_node.children:
                visit(child, depth + 2)

    visit(aot.root, 0)
    return "\n".join(lines) + "\n"
