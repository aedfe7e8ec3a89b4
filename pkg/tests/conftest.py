import pathlib

import pytest

from treecut.andor import index_treebank
from treecut.entropy import build_phrase_table
from treecut.grammar import Treebank, parse_rule_inventory, parse_treebank
from treecut.node_entropy import EntropyScheme, compute_node_entropies

ROOT = pathlib.Path(__file__).resolve().parent.parent
TOY = ROOT / "corpora" / "toy"


@pytest.fixture(scope="session")
def toy_dir():
    return TOY


@pytest.fixture(scope="session")
def inventory():
    return parse_rule_inventory((TOY / "grammar.txt").read_text(), "s")


@pytest.fixture(scope="session")
def treebank(inventory):
    training = parse_treebank((TOY / "train.txt").read_text(), inventory)
    test = parse_treebank((TOY / "test.txt").read_text(), inventory)
    return Treebank(inventory, training, test)


@pytest.fixture(scope="session")
def table(treebank):
    return build_phrase_table(treebank.training, treebank.inventory)


@pytest.fixture(scope="session")
def aot(treebank):
    return index_treebank(treebank.training, treebank.inventory)


@pytest.fixture(scope="session")
def mixed_scores(aot, table):
    return compute_node_entropies(aot, table, EntropyScheme.MIXED)
