import time
from contextlib import contextmanager
from pathlib import Path

import pytest

from dmcat.idtypes import trivial_id
from dmcat.instances import InstanceBundle
from dmcat.instances.groupoids import gen_groupoid_site
from dmcat.instances.heyting import gen_heyting
from dmcat.instances.lattices import b2, boolean, chain, m3, n5
from dmcat.instances.search import inflated_preorder
from dmcat.instances.walking import SHAPES, gen_walking
from dmcat.lifting import MorClass

SAMPLES = Path(__file__).resolve().parents[1] / "samples"

# criterion number -> (status, seconds, detail); filled by test_acceptance
ACCEPTANCE = {}


def _heyting(name, lattice):
    return gen_heyting(*lattice, name=name)


def _inflated():
    els, leq = chain(2)
    cat = inflated_preorder(els, leq, {"0": 2, "1": 1}, "inflated-2")
    D = MorClass.all(cat)
    fida = trivial_id(cat, D)
    return InstanceBundle(cat, D, fida.base, fida, None, {"family": "preorder"})


@pytest.fixture(scope="session")
def verified_bundles():
    """Bundles whose Id-structure verifies."""
    return [
        _heyting("poset2", chain(2)),
        _heyting("chain3", chain(3)),
        _heyting("b2", b2()),
        _heyting("m3", m3()),
        _heyting("n5", n5()),
        _heyting("boolean3", boolean(3)),
        _inflated(),
    ]


@pytest.fixture(scope="session")
def groupoid_sites():
    return {
        "z2": gen_groupoid_site(["Z2"], close="none", name="z2"),
        "two-points-z2": gen_groupoid_site(["2 x 1", "Z2"], close="none", name="two-points-z2"),
        "discrete": gen_groupoid_site(["1 + 1"], close="none", name="discrete"),
    }


@pytest.fixture(scope="session")
def z2_paths():
    return gen_groupoid_site(["Z2"], close="once", name="z2-paths")


@pytest.fixture(scope="session")
def all_categories(verified_bundles, groupoid_sites):
    cats = [gen_walking(s) for s in SHAPES]
    cats += [b.cat for b in verified_bundles]
    cats += [s.bundle.cat for s in groupoid_sites.values()]
    return cats


@contextmanager
def criterion(n, budget):
    """Time a block and record PASS, FAIL or SKIP for acceptance criterion ``n``."""
    t0 = time.perf_counter()
    status, detail = "PASS", ""
    try:
        yield
    except pytest.skip.Exception as exc:
        status, detail = "SKIP", str(exc)
        raise
    except BaseException as exc:
        status, detail = "FAIL", str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        raise
    finally:
        dt = time.perf_counter() - t0
        if status == "PASS" and dt > budget:
            status, detail = "FAIL", f"over budget: {dt:.2f}s > {budget}s"
        ACCEPTANCE[n] = (status, dt, detail)
    if dt > budget:
        pytest.fail(f"criterion {n} took {dt:.2f}s, budget {budget}s")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        status, dt, detail = ACCEPTANCE[n]
        line = f"criterion {n}: {status} ({dt:.2f}s)"
        if detail:
            line += f"  {detail}"
        terminalreporter.write_line(line)
