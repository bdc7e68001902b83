import pathlib

import pytest

from ttc import Rule, StateId, Transducer, parse_workspace
from ttc.trees import RankedAlphabet, Tree

DATA = pathlib.Path(__file__).parent / "data"

FIXTURE_TEXT = (DATA / "fixtures.ttc").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def workspace():
    return parse_workspace(FIXTURE_TEXT)


@pytest.fixture(scope="session")
def quadratic(workspace):
    return workspace.machines["quadratic"]


@pytest.fixture(scope="session")
def copy_pair(workspace):
    return workspace.machines["copy_t1"], workspace.machines["copy_t2"]


@pytest.fixture(scope="session")
def del_pair(workspace):
    return workspace.machines["del_t1"], workspace.machines["del_t2"]


@pytest.fixture(scope="session")
def worked_pair(workspace):
    return workspace.machines["ex4_t1"], workspace.machines["ex4_t2"]


@pytest.fixture(scope="session")
def copy_chain(workspace):
    return workspace.chains["copying"]


@pytest.fixture(scope="session")
def del_chain(workspace):
    return workspace.chains["deleting"]


@pytest.fixture(scope="session")
def worked_chain(workspace):
    return workspace.chains["worked"]


@pytest.fixture(scope="session")
def copy_t2_extra(copy_pair):
    """The copying second component with one more e3 rule (used by the
    three-stage decision fixture)."""
    _, t2 = copy_pair
    out = RankedAlphabet(dict(t2.output_alphabet.items()) | {"e''": 0})
    q2pp = StateId.base("q2''")
    rules = list(t2.rules) + [Rule(q2pp, "e3", 0, Tree("e''"))]
    return Transducer("copy_t2_extra", t2.input_alphabet, out, rules, t2.initial, states=t2.states)


def t(text):
    from ttc.trees import parse_tree

    return parse_tree(text)
