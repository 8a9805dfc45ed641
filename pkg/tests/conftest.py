import os
import shutil
from os import environ
from tempfile import mkdtemp, mkstemp

import pytest

from consensus_lab.config import config
from consensus_lab.families import GraphFamily, generate
from consensus_lab.graph import Graph
from consensus_lab.stability import Gains


def pytest_addoption(parser):
    parser.addoption(
        "--skip-slow", action="store_true", default=False, help="skip any slow tests"
    )


def pytest_collection_modifyitems(config, items):
    if config.getoption("--skip-slow"):
        # --skip-slow given in cli: skipping slow tests
        skip_slow = pytest.mark.skip(reason="--skip-slow option was provided")
        for item in items:
            if "slow" in item.keywords:
                item.add_marker(skip_slow)


@pytest.fixture
def temp_file():
    temp_file = mkstemp()[1]
    yield temp_file
    print("deleting {}".format(temp_file))
    os.remove(temp_file)


@pytest.fixture
def temp_dir():
    temp_dir = mkdtemp()
    yield temp_dir
    print("deleting {}".format(temp_dir))
    shutil.rmtree(temp_dir)


@pytest.fixture
def ring_gains():
    return Gains((0.5, 1.0, 1.0))


@pytest.fixture
def path_sweep_gains():
    return Gains((0.1, 0.8, 1.0, 1.0, 1.0))


@pytest.fixture
def cycle_8():
    return generate(GraphFamily("cycle"), 8)


@pytest.fixture
def cycle_9():
    return generate(GraphFamily("cycle"), 9)


@pytest.fixture
def directed_triangle():
    # 0 listens to 1, 1 listens to 2, 2 listens to 0 with unequal weights
    return Graph(3, [(0, 1, 1.0), (1, 2, 2.0), (2, 0, 0.5)])


@pytest.fixture
def directed_chain():
    # not normal, spanning tree rooted at node 2
    return Graph(3, [(0, 1, 1.0), (1, 2, 1.0)])


_UNSET = object()


def temp_set_var(store):
    """
    Build a setter and a restore callback for a dict-like ``store``

    ``None`` as a value removes the key. Restoring puts back every key touched
    through the setter as it was before the first change.
    """
    originals = {}

    def set_var(name, value):
        originals.setdefault(name, store.get(name, _UNSET))
        if value is None:
            store.pop(name, None)
        else:
            store[name] = value

    def restore():
        for name, original in originals.items():
            if original is _UNSET:
                store.pop(name, None)
            else:
                store[name] = original

    return set_var, restore


@pytest.fixture
def env_override():
    set_var, restore = temp_set_var(environ)
    yield set_var
    restore()


@pytest.fixture
def config_override():
    set_var, restore = temp_set_var(config.overrides)
    yield set_var
    restore()
