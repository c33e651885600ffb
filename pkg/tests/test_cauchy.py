import pytest

from dmcat.cauchy import (Splitting, coequalizers, idempotents, is_cauchy_complete, is_coequalizer,
                          is_splitting, karoubi_envelope, split_idempotent, split_square,
                          splitting_comparison_iso, splitting_from_coequalizer, splittings,
                          verify_splitting_coequalizer)
from dmcat.errors import PreconditionError
from dmcat.fincat import is_iso, slice_category, validate_category
from dmcat.instances.walking import SHAPES, gen_walking

from _oracles import monoid_category


def test_walking_idempotent_does_not_split():
    cat = gen_walking("idempotent")
    e = cat.mor("e")
    assert idempotents(cat) == [cat.mor("id_*"), e]
    assert split_idempotent(cat, e) is None
    assert is_cauchy_complete(cat) == (False, e)
    assert coequalizers(cat, e) == []


def test_walking_retract_splits():
    cat = gen_walking("retract")
    e = cat.mor("e")
    s = split_idempotent(cat, e)
    assert s == Splitting(cat.obj("R"), cat.mor("i"), cat.mor("r"))
    assert is_splitting(cat, e, s)
    assert verify_splitting_coequalizer(cat, e, s)
    assert is_cauchy_complete(cat) == (True, None)


def test_coequalizer_to_splitting_round_trip():
    cat = gen_walking("retract")
    e = cat.mor("e")
    for q in coequalizers(cat, e):
        s = splitting_from_coequalizer(cat, e, q)
        assert is_splitting(cat, e, s)
    with pytest.raises(PreconditionError):
        splitting_from_coequalizer(cat, e, cat.mor("id_C"))


def test_splittings_requires_idempotent():
    cat = gen_walking("arrow")
    with pytest.raises(PreconditionError):
        list(splittings(cat, cat.mor("a")))


def test_karoubi_envelope_of_walking_idempotent():
    env, emb = karoubi_envelope(gen_walking("idempotent"))
    assert (env.n_obj, env.n_mor) == (2, 5)
    assert validate_category(env).ok
    assert is_cauchy_complete(env)[0]
    assert len(emb.obj) == 1 and len(emb.mor) == 2


def test_karoubi_of_cauchy_complete_adds_only_iso_copies():
    env, _ = karoubi_envelope(gen_walking("idempotent"))
    env2, emb = karoubi_envelope(env)
    assert env2.n_obj > env.n_obj
    for o in range(env2.n_obj):
        assert any(is_iso(env2, int(m)) is not None
                   for x in emb.obj for m in env2.hom(o, x)), env2.objects[o]


def test_karoubi_of_monoids_is_cauchy_complete():
    for gens in ([(0, 0, 1)], [(1, 2, 2), (0, 0, 0)]):
        cat = monoid_category(gens, 3)
        env, emb = karoubi_envelope(cat)
        assert validate_category(env).ok
        assert is_cauchy_complete(env)[0]
        # the embedding is a functor
        for f in range(cat.n_mor):
            for g in range(cat.n_mor):
                h = cat.comp[g, f]
                if h >= 0:
                    assert env.comp[emb.mor[g], emb.mor[f]] == emb.mor[h]


def test_split_square_identity_and_iso():
    cat = gen_walking("retract")
    e = cat.mor("e")
    s = split_idempotent(cat, e)
    u = split_square(cat, e, e, e, s, s)
    assert u == cat.mor("id_R")
    with pytest.raises(PreconditionError):
        split_square(cat, e, e, cat.mor("i"), s, s)


def test_comparison_iso_between_splittings():
    env, _ = karoubi_envelope(karoubi_envelope(gen_walking("idempotent"))[0])
    for e in idempotents(env):
        found = list(splittings(env, e))
        for s1 in found:
            for s2 in found:
                phi = splitting_comparison_iso(env, e, s1, s2)
                assert is_iso(env, phi) is not None


def test_slices_of_cauchy_complete_are_cauchy_complete():
    for shape in SHAPES:
        cat = gen_walking(shape)
        if not is_cauchy_complete(cat)[0]:
            continue
        for y in range(cat.n_obj):
            assert is_cauchy_complete(slice_category(cat, y).cat)[0]


def test_is_coequalizer_negative():
    cat = gen_walking("retract")
    assert not is_coequalizer(cat, cat.mor("e"), cat.mor("e"))
