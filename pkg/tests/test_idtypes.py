import pytest

from dmcat.errors import PreconditionError
from dmcat.fincat import is_iso, isos
from dmcat.idtypes import (IdAssignment, FunctorialIdAssignment, check_id_factorization,
                           crosscheck_id_variants, diagonal, fibre_product_map, fibre_square,
                           make_entry, ml_pulled_back_r, param_ml_instance, pulled_back_r,
                           search_functorial_id, search_id, slice_triangles, trivial_id,
                           verify_functorial_id, verify_id, verify_ml_id, verify_param_ml_id)
from dmcat.instances.heyting import gen_heyting, poset_category
from dmcat.instances.lattices import b2, chain
from dmcat.lifting import MorClass


@pytest.fixture
def b2b():
    return gen_heyting(*b2(), name="b2")


def test_trivial_id_on_posets_is_identity(b2b):
    cat = b2b.cat
    for f, e in b2b.ida.entries.items():
        assert e.idobj == cat.src[f]
        assert e.r == cat.id(cat.src[f]) and e.eps == e.diag
        assert diagonal(cat, f) == e.diag


def test_verify_id_passes_on_verified_bundles(verified_bundles):
    for b in verified_bundles:
        rep = verify_id(b.cat, b.D, b.ida)
        assert rep.ok, b.name
        assert sum(r.check == "id.paulin-mohring" for r in rep.records) == len(b.D)


def test_verify_id_reports_missing_entry(b2b):
    cat = b2b.cat
    partial = IdAssignment({f: e for f, e in b2b.ida.entries.items() if cat.mname(f) != "a<=top"})
    rep = verify_id(cat, b2b.D, partial)
    assert [(r.check, r.target) for r in rep.failures] == [("id.coverage", "a<=top")]


def test_verify_id_precondition(b2b):
    cat = b2b.cat
    with pytest.raises(PreconditionError):
        verify_id(cat, isos(cat), b2b.ida)


def test_check_id_factorization_detects_bad_eps():
    cat = poset_category(*chain(3), name="c3")
    f = cat.mor("0<=2")
    e = make_entry(cat, f, cat.obj("0"), cat.mor("0<=0"), cat.mor("0<=0"))
    assert check_id_factorization(cat, range(cat.n_mor), f, e).ok
    bad = make_entry(cat, f, cat.obj("0"), cat.mor("0<=0"), cat.mor("0<=0"), iota=cat.mor("0<=1"))
    rep = check_id_factorization(cat, range(cat.n_mor), f, bad)
    assert [r.check for r in rep.failures] == ["id.iota"]
    rep = check_id_factorization(cat, [f], f, e)
    assert [r.check for r in rep.failures] == ["id.eps-display"]


def test_fibre_square_and_product_map(b2b):
    cat = b2b.cat
    f = cat.mor("a<=top")
    pair = fibre_square(cat, f)
    assert cat.objects[pair.apex] == "a"
    m = cat.mor("bot<=a")
    d2 = cat.mor("bot<=top")
    mm = fibre_product_map(cat, d2, f, m)
    assert cat.src[mm] == cat.obj("bot") and cat.dst[mm] == cat.obj("a")


def test_pulled_back_r_is_iso_in_posets(b2b):
    cat = b2b.cat
    f = cat.mor("a<=top")
    for alpha in cat.into(cat.src[f]):
        for i in (0, 1):
            _, ar = pulled_back_r(cat, f, b2b.ida[f], int(alpha), i)
            assert is_iso(cat, ar) is not None


def test_search_id_finds_trivial_structure(verified_bundles):
    for b in verified_bundles:
        ida = search_id(b.cat, b.D)
        assert ida is not None
        assert verify_id(b.cat, b.D, ida).ok


def test_search_id_absent_when_eps_cannot_be_display():
    # with D = {0<=1} the only candidate eps is 0<=0, which is not in D
    cat = poset_category(*chain(2), name="c2")
    log = []
    ida = search_id(cat, [cat.mor("0<=1")], log=log, check_pre=False)
    assert ida is None
    assert log == ["0<=1: no factorization of the diagonal qualifies"]
    with pytest.raises(PreconditionError):
        search_id(cat, [cat.mor("0<=1")])


def test_search_functorial_id_matches_trivial(verified_bundles):
    for b in verified_bundles:
        fida = search_functorial_id(b.cat, b.D, b.ida)
        assert fida is not None
        assert verify_functorial_id(b.cat, b.D, fida).ok


def test_functorial_id_rejects_bad_action(b2b):
    cat = b2b.cat
    tri = slice_triangles(cat, b2b.D)
    key = next(t for t in tri if cat.mname(t[2]) == "bot<=a")
    action = dict(b2b.fida.action)
    action[key] = cat.id(cat.dst[b2b.ida[key[1]].r])
    rep = verify_functorial_id(cat, b2b.D, FunctorialIdAssignment(b2b.ida, action))
    assert not rep.ok


def test_trivial_id_action_is_identity_on_ids(b2b):
    cat = b2b.cat
    for (d, d2, m), k in b2b.fida.action.items():
        if d == d2 and cat.is_identity(m):
            assert cat.is_identity(k)


def test_ml_variants_pass_on_posets(verified_bundles):
    for b in verified_bundles:
        assert verify_ml_id(b.cat, b.D, b.ida).ok
        assert verify_param_ml_id(b.cat, b.D, b.ida).ok


def test_crosscheck_reports_no_refutation(verified_bundles):
    for b in verified_bundles:
        rep = crosscheck_id_variants(b.cat, b.D, b.ida)
        assert rep.ok and not rep.refuted
        obs = rep.records[0]
        assert obs.check == "variants.observed"
        assert "paulin-mohring=True" in obs.detail


def test_ml_pulled_back_r_and_param_instance(b2b):
    cat = b2b.cat
    d = cat.mor("a<=top")
    sigma = cat.mor("b<=top")
    pb_i, pb_a, k = ml_pulled_back_r(cat, d, b2b.ida[d], sigma)
    assert cat.objects[pb_a.apex] == "bot"
    assert is_iso(cat, k) is not None
    theta = cat.id(pb_i.apex)
    assert is_iso(cat, param_ml_instance(cat, b2b.D, b2b.ida, d, sigma, theta)) is not None
    with pytest.raises(PreconditionError):
        param_ml_instance(cat, isos(cat) + [d], b2b.ida, d, sigma, cat.mor("bot<=a"))


def test_trivial_id_structure_counts():
    cat = poset_category(*chain(3), name="c3")
    D = MorClass.all(cat)
    fida = trivial_id(cat, D)
    assert len(fida.base) == cat.n_mor
    assert len(fida.action) == len(slice_triangles(cat, D))
