import itertools

import pytest

from dmcat.dmc import (check_dmc, check_llp_pullback_stable, check_pi, check_sigma, find_pi,
                       pi_comparison_iso, universal_element_table)
from dmcat.errors import PreconditionError
from dmcat.fincat import is_iso, isos, terminal
from dmcat.instances.heyting import poset_category
from dmcat.instances.lattices import b2, chain, m3
from dmcat.instances.walking import gen_walking
from dmcat.lifting import MorClass


def _poset(lattice, name):
    return poset_category(*lattice, name=name)


def test_check_dmc_all_maps_of_b2():
    cat = _poset(b2(), "b2")
    assert check_dmc(cat, range(cat.n_mor)).ok


def test_check_dmc_isos_only_fails_terminal_clause():
    cat = _poset(b2(), "b2")
    rep = check_dmc(cat, isos(cat))
    assert {r.check for r in rep.failures} == {"dmc.terminal"}


def test_check_dmc_pullback_stability_failure():
    # maps into top plus isos: pulling a<=top back along b<=top gives bot<=b
    cat = _poset(b2(), "b2")
    top = terminal(cat)
    D = set(isos(cat)) | {int(f) for f in cat.into(top)}
    rep = check_dmc(cat, D)
    bad = {r.target for r in rep.failures if r.check == "dmc.pullback-stable"}
    assert "a<=top along b<=top" in bad


def test_check_dmc_needs_terminal():
    cat = gen_walking("idempotent")
    with pytest.raises(PreconditionError):
        check_dmc(cat, range(cat.n_mor))


def test_check_sigma_composition_failure():
    cat = _poset(chain(3), "c3")
    D = MorClass(isos(cat)) | MorClass([cat.mor("0<=1"), cat.mor("1<=2")])
    rep = check_sigma(cat, D)
    assert [r.target for r in rep.failures] == ["1<=2.0<=1"]
    assert check_sigma(cat, range(cat.n_mor)).ok


def _residual_b2(cat):
    """Boolean implication on subsets of {a, b}, relativised to y."""
    sets = {"bot": frozenset(), "a": frozenset("a"), "b": frozenset("b"), "top": frozenset("ab")}
    back = {v: k for k, v in sets.items()}
    full = sets["top"]
    out = {}
    for f in range(cat.n_mor):
        x, y = cat.objects[cat.src[f]], cat.objects[cat.dst[f]]
        for g in cat.into(cat.src[f]):
            w = cat.objects[cat.src[g]]
            z = ((full - sets[x]) | sets[w]) & sets[y]
            out[(f, int(g))] = cat.mor(f"{back[z]}<={y}")
    return out


def test_find_pi_b2_is_boolean_implication():
    cat = _poset(b2(), "b2")
    D = range(cat.n_mor)
    want = _residual_b2(cat)
    for (f, g), p in want.items():
        got = find_pi(cat, D, f, g)
        assert got is not None and got.pi == p


def test_find_pi_chain2():
    cat = _poset(chain(2), "c2")
    D = range(cat.n_mor)
    # Pi(0<=1, 0<=0) = 0 => 0 = top: the map 1<=1
    res = find_pi(cat, D, cat.mor("0<=1"), cat.mor("0<=0"))
    assert res.pi == cat.mor("1<=1")


def test_m3_lacks_some_pi():
    cat = _poset(m3(), "m3")
    rep = check_pi(cat, range(cat.n_mor))
    assert not rep.ok
    assert "Pi(a<=top, bot<=a)" in {r.target for r in rep.failures}


def test_find_pi_preconditions():
    cat = _poset(chain(2), "c2")
    with pytest.raises(PreconditionError):
        find_pi(cat, range(cat.n_mor), cat.mor("0<=1"), cat.mor("0<=1"))
    with pytest.raises(PreconditionError):
        find_pi(cat, isos(cat), cat.mor("0<=1"), cat.mor("0<=0"))


def test_universal_element_table_is_bijective():
    cat = _poset(b2(), "b2")
    D = range(cat.n_mor)
    res = find_pi(cat, D, cat.mor("a<=top"), cat.mor("bot<=a"))
    table = universal_element_table(cat, res.f, res.g, res.pi, res.ev)
    assert table is not None
    for y, pairs in table.items():
        ms = [m for m, _ in pairs]
        assert len(set(ms)) == len(ms)
        for m, w in pairs:
            assert res.transpose(y, m) == w and res.untranspose(y, w) == m


def test_pi_comparison_with_itself_is_identity():
    cat = _poset(b2(), "b2")
    res = find_pi(cat, range(cat.n_mor), cat.mor("a<=top"), cat.mor("bot<=a"))
    phi = pi_comparison_iso(cat, res, res)
    assert phi == cat.id(cat.src[res.pi]) and is_iso(cat, phi) is not None


def test_check_pi_records_table():
    cat = _poset(chain(2), "c2")
    rep = check_pi(cat, range(cat.n_mor))
    assert rep.ok
    pairs = list(itertools.product(range(cat.n_mor), repeat=2))
    composable = [(f, g) for f, g in pairs if cat.dst[g] == cat.src[f]]
    assert set(rep.data["pi"]) == set(composable)


def test_llp_pullback_stable_in_posets():
    cat = _poset(b2(), "b2")
    ok, witness = check_llp_pullback_stable(cat, range(cat.n_mor))
    assert ok and witness is None
