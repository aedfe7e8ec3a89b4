"""Extraction of specialized rules from cut parse trees.

A specialized rule is a chunk: a connected piece of tree structure whose
leaves are lexical slots (``(lex cat)``, filled by lexicon lookup) and
frontiers (bare category symbols, filled by another rule or by a direct
lexicon lookup).  Cutting happens at child positions whose or-node class
is cut.  A cut child that is itself a lexical lookup becomes a frontier
with no subrule of its own, so no degenerate one-word rules are emitted;
a cut child spanning no words at all stays inline, since a chunk
boundary there could never be re-filled.

Two modes: ``training`` cuts exactly the observed trees, ``andor``
enumerates every arc combination the index supports.  Training chunks
are always a subset of the enumerated ones.
"""

import hashlib
from dataclasses import dataclass

from treecut.andor import AndOrTree, OrNode, PathNotInIndexError
from treecut.cutnodes import CutnodeSet
from treecut.grammar import LEX, Internal, LexLeaf, RuleInventory, yield_length
from treecut.sexpr import Symbol, read_all

TRAINING_CUT = "training"
ANDOR_ENUM = "andor"

DEFAULT_MAX_CHUNKS = 100000


class ChunkExplosionError(Exception):
    """Enumeration exceeded the chunk cap or hit recursive classes."""


class RuleFileError(Exception):
    pass


@dataclass(frozen=True)
class LexSlot:
    """A lexical lookup kept inside the chunk; category of the slot."""

    category: str


@dataclass(frozen=True)
class Frontier:
    """An open position to be filled by a rule of this category."""

    category: str


@dataclass(frozen=True)
class Apply:
    """An inlined application of a grammar rule."""

    rule: str
    children: tuple


ChunkTree = Apply | LexSlot | Frontier


def render_chunk(chunk: ChunkTree) -> str:
    """Canonical S-expression: identity, hashing and file format."""
    if isinstance(chunk, LexSlot):
        return f"(lex {chunk.category})"
    if isinstance(chunk, Frontier):
        return chunk.category
    inner = " ".join(render_chunk(c) for c in chunk.children)
    return f"({chunk.rule} {inner})" if inner else f"({chunk.rule})"


def flat_rhs(chunk: ChunkTree) -> tuple[str, ...]:
    """Left-to-right leaf categories: the flattened rule body."""
    if isinstance(chunk, (LexSlot, Frontier)):
        return (chunk.category,)
    out: list[str] = []
    for child in chunk.children:
        out.extend(flat_rhs(child))
    return tuple(out)


def rule_name(lhs: str, chunk: ChunkTree) -> str:
    digest = hashlib.sha1(render_chunk(chunk).encode()).hexdigest()[:8]
    return f"{lhs}_{digest}"


@dataclass
class SpecializedRule:
    name: str
    lhs: str
    chunk: Apply
    rhs: tuple[str, ...]
    support: int = 0

    @property
    def reduction_length(self) -> int:
        return len(self.rhs)

    def flat_form(self) -> str:
        return f"{self.lhs} => {' '.join(self.rhs)}"


@dataclass
class RuleSet:
    rules: list[SpecializedRule]

    def __iter__(self):
        return iter(self.rules)

    def __len__(self):
        return len(self.rules)

    def flat_forms(self) -> set[str]:
        return {r.flat_form() for r in self.rules}

    def chunk_keys(self) -> frozenset[str]:
        return frozenset(render_chunk(r.chunk) for r in self.rules)

    def by_root_rule(self) -> dict[str, list[SpecializedRule]]:
        index: dict[str, list[SpecializedRule]] = {}
        for rule in self.rules:
            index.setdefault(rule.chunk.rule, []).append(rule)
        # longest reduction first, then name: the matcher's preference
        for group in index.values():
            group.sort(key=lambda r: (-r.reduction_length, r.name))
        return index


class _Collector:
    def __init__(self, inv: RuleInventory):
        self.inv = inv
        self.chunks: dict[str, SpecializedRule] = {}

    def add(self, chunk: Apply, occurrences: int) -> None:
        if not flat_rhs_nonempty(chunk):
            return
        key = render_chunk(chunk)
        rule = self.chunks.get(key)
        if rule is None:
            lhs = self.inv[chunk.rule].lhs
            rule = SpecializedRule(
                name=rule_name(lhs, chunk),
                lhs=lhs,
                chunk=chunk,
                rhs=flat_rhs(chunk),
            )
            self.chunks[key] = rule
        rule.support += occurrences

    def result(self) -> RuleSet:
        return RuleSet(sorted(self.chunks.values(), key=lambda r: (r.lhs, r.name)))


def flat_rhs_nonempty(chunk: ChunkTree) -> bool:
    if isinstance(chunk, (LexSlot, Frontier)):
        return True
    return any(flat_rhs_nonempty(c) for c in chunk.children)


def cut_tree(tree: Internal, aot: AndOrTree, cutset: CutnodeSet) -> list[Apply]:
    """Chunks of one training tree under the cutnode assignment.

    The first chunk is rooted at the tree root; one more per frontier
    whose subtree spans at least one word.
    """
    pending: list[tuple[Internal, OrNode]] = [(tree, aot.root)]
    chunks: list[Apply] = []

    def build(node: Internal, or_node: OrNode) -> Apply:
        and_node = or_node.arcs.get(node.rule)
        if and_node is None:
            raise PathNotInIndexError(
                f"rule '{node.rule}' unseen at {or_node.node_id}"
            )
        parts: list[ChunkTree] = []
        for child, child_or in zip(node.children, and_node.children):
            if isinstance(child, LexLeaf):
                if cutset.is_cut(child_or.node_id):
                    parts.append(Frontier(child_or.category))
                else:
                    parts.append(LexSlot(child_or.category))
            elif cutset.is_cut(child_or.node_id) and yield_length(child) > 0:
                parts.append(Frontier(child_or.category))
                pending.append((child, child_or))
            else:
                parts.append(build(child, child_or))
        return Apply(node.rule, tuple(parts))

    while pending:
        chunks.append(build(*pending.pop(0)))
    return chunks


def extract_training(
    training: list, aot: AndOrTree, cutset: CutnodeSet
) -> RuleSet:
    """Union of per-tree chunks, deduplicated, with occurrence support."""
    collector = _Collector(aot.inventory)
    for tree in training:
        for chunk in cut_tree(tree, aot, cutset):
            collector.add(chunk, 1)
    return collector.result()


def extract_andor(
    aot: AndOrTree,
    cutset: CutnodeSet,
    max_chunks: int = DEFAULT_MAX_CHUNKS,
) -> RuleSet:
    """Every chunk shape the index supports for the cut classes.

    Chunk roots are the root's class and every cut class; lexical arcs
    never root a chunk.  Bodies are enumerated once per class and
    reused.  Raises ChunkExplosionError past *max_chunks* or when class
    merging has produced a self-recursive structure.
    """
    budget = {"left": max_chunks}
    memo: dict[int, list[Apply]] = {}

    def class_of(node: OrNode):
        return cutset.class_of(node.node_id)

    def spend(n: int = 1) -> None:
        budget["left"] -= n
        if budget["left"] < 0:
            raise ChunkExplosionError(f"more than {max_chunks} chunks")

    wordless_memo: dict[int, list[Apply]] = {}

    def wordless_pieces(node: OrNode) -> list[Apply]:
        """Expansions at this index position spanning no words.

        Walks the index itself, not the class graph: index nodes form a
        finite tree, so this terminates even when class merging is
        cyclic.
        """
        if node.seq in wordless_memo:
            return wordless_memo[node.seq]
        out: list[Apply] = []
        for rule, and_node in node.sorted_arcs():
            if rule == LEX:
                continue
            combos: list[tuple] = [()]
            for child in and_node.children:
                alternatives = wordless_pieces(child)
                combos = [
                    prefix + (alt,) for prefix in combos for alt in alternatives
                ]
                if combos:
                    spend(len(combos))
            out.extend(Apply(rule, combo) for combo in combos)
        wordless_memo[node.seq] = out
        return out

    def position_alternatives(node: OrNode, stack: frozenset) -> list[ChunkTree]:
        cls = class_of(node)
        if cls.cut:
            # a boundary at a wordless expansion could never be
            # re-filled, so those shapes stay available inline
            alts: list[ChunkTree] = [Frontier(node.category)]
            seen: set[Apply] = set()
            for member in cls.members:
                for piece in wordless_pieces(member):
                    if piece not in seen:
                        seen.add(piece)
                        alts.append(piece)
            return alts
        alts = []
        if any(LEX == rule for m in cls.members for rule in m.arcs):
            alts.append(LexSlot(node.category))
        alts.extend(expansions(cls, stack))
        return alts

    def expansions(cls, stack: frozenset) -> list[Apply]:
        key = cls.representative.seq
        if key in memo:
            return memo[key]
        if key in stack:
            raise ChunkExplosionError(
                f"recursive class structure at {cls.representative.node_id}"
            )
        stack = stack | {key}
        out: list[Apply] = []
        seen_shapes: set[tuple] = set()
        for member in cls.members:
            for rule, and_node in member.sorted_arcs():
                if rule == LEX:
                    continue
                shape = (rule,) + tuple(
                    class_of(c).representative.seq for c in and_node.children
                )
                if shape in seen_shapes:
                    continue
                seen_shapes.add(shape)
                slots = [
                    position_alternatives(c, stack) for c in and_node.children
                ]
                combos: list[tuple] = [()]
                for alternatives in slots:
                    combos = [
                        prefix + (alt,) for prefix in combos for alt in alternatives
                    ]
                    spend(len(combos))
                for combo in combos:
                    out.append(Apply(rule, combo))
        memo[key] = out
        return out

    collector = _Collector(aot.inventory)
    roots = [class_of(aot.root)]
    for cls in sorted(cutset.cut_classes(), key=lambda c: c.representative.seq):
        if cls is not roots[0]:
            roots.append(cls)
    for cls in roots:
        for chunk in expansions(cls, frozenset()):
            collector.add(chunk, 0)
    return collector.result()


def validate_rules(rules: RuleSet, inv: RuleInventory) -> None:
    """Check every chunk against the inventory's arities and categories."""

    def check(chunk: ChunkTree, expected_cat: str | None) -> None:
        if isinstance(chunk, (LexSlot, Frontier)):
            if expected_cat is not None and chunk.category != expected_cat:
                raise ValueError(
                    f"leaf category '{chunk.category}', slot wants '{expected_cat}'"
                )
            return
        rule = inv[chunk.rule]
        if expected_cat is not None and rule.lhs != expected_cat:
            raise ValueError(
                f"'{chunk.rule}' has category '{rule.lhs}', slot wants "
                f"'{expected_cat}'"
            )
        if len(chunk.children) != rule.arity:
            raise ValueError(f"'{chunk.rule}' arity {rule.arity} violated")
        for cat, child in zip(rule.rhs, chunk.children):
            check(child, cat)

    for rule in rules:
        if rule.reduction_length == 0:
            raise ValueError(f"rule '{rule.name}' has an empty body")
        if inv[rule.chunk.rule].lhs != rule.lhs:
            raise ValueError(f"rule '{rule.name}' lhs mismatch")
        check(rule.chunk, None)


def render_rule_file(rules: RuleSet, header: list[str] | None = None) -> str:
    """One record per rule: flat line, indented chunk, support line."""
    lines = [f"# {h}" for h in header or []]
    for rule in rules:
        if lines:
            lines.append("")
        lines.append(f"{rule.name}: {rule.flat_form()}")
        lines.append(f"  {render_chunk(rule.chunk)}")
        lines.append(f"  support: {rule.support}")
    return "\n".join(lines) + "\n"


def _chunk_from_sexpr(expr) -> ChunkTree:
    if isinstance(expr, Symbol):
        return Frontier(expr.text)
    if not expr or not isinstance(expr[0], Symbol):
        raise RuleFileError("malformed chunk expression")
    head = expr[0].text
    if head == "lex":
        if len(expr) != 2 or not isinstance(expr[1], Symbol):
            raise RuleFileError("lex slot takes exactly one category")
        return LexSlot(expr[1].text)
    return Apply(head, tuple(_chunk_from_sexpr(e) for e in expr[1:]))


def parse_rule_file(text: str) -> RuleSet:
    """Inverse of render_rule_file; flat lines are cross-checked."""
    rules: list[SpecializedRule] = []
    record: list[str] = []

    def finish(lines: list[str]) -> None:
        head = lines[0]
        if ":" not in head or "=>" not in head:
            raise RuleFileError(f"malformed rule header: {head!r}")
        name, flat = head.split(":", 1)
        lhs, symbols = flat.split("=>", 1)
        support = 0
        body: list[str] = []
        for line in lines[1:]:
            stripped = line.strip()
            if stripped.startswith("support:"):
                support = int(stripped.split(":", 1)[1])
            else:
                body.append(line)
        exprs = read_all("\n".join(body))
        if len(exprs) != 1:
            raise RuleFileError(f"rule {name.strip()!r} needs exactly one chunk")
        chunk = _chunk_from_sexpr(exprs[0])
        if not isinstance(chunk, Apply):
            raise RuleFileError(f"rule {name.strip()!r} chunk must be an application")
        rule = SpecializedRule(
            name=name.strip(),
            lhs=lhs.strip(),
            chunk=chunk,
            rhs=flat_rhs(chunk),
            support=support,
        )
        declared = tuple(symbols.split())
        if declared != rule.rhs:
            raise RuleFileError(
                f"rule {rule.name!r}: flat line {declared} does not match "
                f"chunk {rule.rhs}"
            )
        rules.append(rule)

    for raw in text.splitlines():
        if raw.strip().startswith("#"):
            continue
        if not raw.strip():
            if record:
                finish(record)
                record = []
        else:
            record.append(raw)
    if record:
        finish(record)
    return RuleSet(rules)
