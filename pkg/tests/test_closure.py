import pytest

from dmcat.closure import (check_reflection, closure_id, closure_pi, closure_pullback,
                           closure_retract, verify_main_theorem)
from dmcat.dmc import check_pi, find_pi
from dmcat.errors import CertifiedRefutation, PreconditionError
from dmcat.fincat import is_iso, isos, iter_composable, terminal
from dmcat.idtypes import verify_functorial_id, verify_id
from dmcat.instances.heyting import gen_heyting
from dmcat.instances.lattices import b2, chain
from dmcat.instances.walking import gen_walking
from dmcat.lifting import MorClass, dbar
from dmcat.wfs import factorize


@pytest.fixture
def b2b():
    return gen_heyting(*b2(), name="b2")


def test_certificate_poset2():
    b = gen_heyting(*chain(2), name="poset2")
    cert = verify_main_theorem(b.cat, b.D, b.fida)
    assert cert.valid
    assert cert.dbar == b.D
    assert cert.pi_report is None


def test_certificate_b2_with_pi(b2b):
    cert = verify_main_theorem(b2b.cat, b2b.D, b2b.fida, with_pi=True)
    assert cert.valid
    built = cert.provenance["closure_pi"]
    assert len(built) == len(list(iter_composable(b2b.cat, cert.dbar)))


def test_certificate_records_failed_preconditions():
    b = gen_heyting(*chain(2), name="poset2")
    cat = b.cat
    cert = verify_main_theorem(cat, isos(cat), b.fida)
    assert not cert.valid
    assert cert.dbar is None
    assert "dmc.terminal" in {r.check for r in cert.pre_report.failures}


def test_certificate_needs_cauchy_completeness():
    cat = gen_walking("idempotent")
    # no terminal object: the DMC check itself refuses
    with pytest.raises(PreconditionError):
        verify_main_theorem(cat, range(cat.n_mor), None)


def test_closure_id_verifies_against_dbar(verified_bundles):
    for b in verified_bundles:
        Dbar = dbar(b.cat, b.D)
        cid = closure_id(b.cat, b.D, b.fida, Dbar)
        assert cid.checks.ok
        assert verify_id(b.cat, Dbar, cid.ida, check_pre=False).ok
        assert verify_functorial_id(b.cat, Dbar, cid.fida, check_pre=False).ok


def test_closure_retract_of_member_is_trivial(b2b):
    cat = b2b.cat
    f = cat.mor("a<=top")
    ret = closure_retract(cat, b2b.D, b2b.ida, f)
    assert ret.d == f and ret.incl == ret.retr == cat.id(cat.src[f])


def test_closure_pullback_in_b2(b2b):
    cat = b2b.cat
    e, alpha = cat.mor("a<=top"), cat.mor("b<=top")
    res = closure_pullback(cat, b2b.D, b2b.ida, e, alpha)
    assert cat.objects[res.result.apex] == "bot"
    assert is_iso(cat, res.comparison) is not None


def test_closure_pi_matches_brute_force(b2b):
    cat = b2b.cat
    pis = check_pi(cat, b2b.D).data["pi"]
    for f, g in ((cat.mor("a<=top"), cat.mor("bot<=a")), (cat.mor("top<=top"), cat.mor("b<=top"))):
        res = closure_pi(cat, b2b.D, b2b.ida, pis, f, g)
        brute = find_pi(cat, b2b.D, f, g)
        assert res.brute is not None
        assert is_iso(cat, res.comparison) is not None
        assert cat.comp[brute.pi, res.comparison] == res.result.pi


def test_closure_pi_rejects_non_composable(b2b):
    cat = b2b.cat
    with pytest.raises(PreconditionError):
        closure_pi(cat, b2b.D, b2b.ida, {}, cat.mor("a<=top"), cat.mor("b<=top"))


def test_reflection(b2b):
    cat = b2b.cat
    for R in (MorClass(isos(cat)), MorClass.all(cat)):
        assert check_reflection(cat, b2b.D, R)
    with pytest.raises(PreconditionError):
        check_reflection(cat, b2b.D, [cat.mor("a<=top")])


def test_closure_grows_only_for_unstable_classes():
    # isos plus maps into the top are not pullback stable in a chain; their
    # closure picks up 0<=1, and the factorization contract then fails
    b = gen_heyting(*chain(3), name="c3")
    cat = b.cat
    small = MorClass(set(isos(cat)) | {int(f) for f in cat.into(terminal(cat))})
    bar = dbar(cat, small)
    assert (bar - small).names(cat) == ["0<=1"]
    with pytest.raises(CertifiedRefutation):
        factorize(cat, small, b.ida, cat.mor("0<=1"))
