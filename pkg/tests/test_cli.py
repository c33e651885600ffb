import io
import os
import subprocess
import sys

import pytest

from dmcat.cli import run
from dmcat.instances import parse_fincat, structurally_equal

from conftest import SAMPLES


def dmcat(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def sample(name):
    return str(SAMPLES / f"{name}.fincat")


def records(text):
    return [ln.split("\t") for ln in text.splitlines() if ln]


@pytest.mark.parametrize("argv, code", [
    (["validate", sample("poset2")], 0),
    (["check-dmc", sample("b2")], 0),
    (["check-sigma", sample("m3")], 0),
    (["check-id", sample("b2")], 0),
    (["check-id-variants", sample("m3")], 0),
    (["check-pi", sample("b2")], 0),
    (["check-pi", sample("m3")], 1),
    (["factorize", sample("poset2")], 0),
    (["wfs", sample("b2")], 0),
    (["closure", sample("b2")], 0),
    (["split", sample("retract")], 0),
    (["verify-theorem", sample("b2"), "--with-pi"], 0),
    (["reflect", sample("m3")], 0),
    (["check-id", sample("broken")], 1),
    (["check-dmc", sample("z2-paths")], 1),
    (["check-pi", sample("z2-paths")], 1),
    (["validate", sample("nonsense")], 2),
    (["validate", sample("does-not-exist")], 2),
])
def test_exit_codes(argv, code):
    assert dmcat(*argv)[0] == code


def test_broken_sample_names_missing_entry():
    code, out, _ = dmcat("check-id", sample("broken"), "--machine")
    assert code == 1
    failed = [r for r in records(out) if r[2] == "FAIL"]
    assert [(r[0], r[1]) for r in failed] == [("id.coverage", "a<=top")]


def test_parse_error_message_has_position():
    code, _, err = dmcat("validate", sample("nonsense"))
    assert code == 2
    assert "unknown object 'B'" in err
    assert ":" in err.split("unknown")[0]


def test_missing_section_is_input_error(tmp_path):
    path = tmp_path / "bare.fincat"
    path.write_text("category bare\nobject A\nmor i : A -> A\nid A = i\ncomp i . i = i\n")
    code, _, err = dmcat("check-dmc", str(path))
    assert code == 2 and "display" in err


def test_factorize_unknown_morphism_is_input_error():
    assert dmcat("factorize", sample("poset2"), "--mor", "nope")[0] == 2


def test_factorize_named_morphism():
    code, out, _ = dmcat("factorize", sample("b2"), "--mor", "bot<=top", "--machine")
    assert code == 0
    (rec,) = records(out)
    assert rec[:3] == ["factorize", "bot<=top", "PASS"]


def test_machine_format_is_five_tab_fields():
    code, out, _ = dmcat("verify-theorem", sample("b2"), "--with-pi", "--machine")
    assert code == 0
    recs = records(out)
    assert recs and all(len(r) == 5 for r in recs)
    assert all(r[2] in ("PASS", "FAIL", "SKIP") for r in recs)
    assert recs[-1][:3] == ["theorem.certificate", "b2", "PASS"]


def test_human_format_lines():
    _, out, _ = dmcat("check-dmc", sample("poset2"))
    assert all(ln.startswith(("PASS", "FAIL", "SKIP")) for ln in out.splitlines())


def test_reflect_rejects_unclosed_class():
    code, out, _ = dmcat("reflect", sample("b2"), "--right", "a<=top", "--machine")
    assert code == 1
    assert records(out)[0][:3] == ["reflect.closed", "given", "FAIL"]


def test_split_reports_unsplit_idempotent(tmp_path):
    path = tmp_path / "idem.fincat"
    assert dmcat("gen", "walking", "idempotent", "--out", str(path))[0] == 0
    code, out, _ = dmcat("split", str(path), "--machine")
    assert code == 1
    assert ["split.exists", "e", "FAIL"] in [r[:3] for r in records(out)]


@pytest.mark.parametrize("verb", ["check-id", "check-pi", "wfs", "verify-theorem", "closure"])
@pytest.mark.parametrize("name", ["b2", "m3", "z2-paths"])
def test_jobs_do_not_change_output(verb, name):
    one = dmcat(verb, sample(name), "--machine", "--jobs", "1")
    many = dmcat(verb, sample(name), "--machine", "--jobs", "8")
    assert one == many


def test_gen_heyting_round_trips_through_file():
    code, out, _ = dmcat("gen", "heyting", "b2", "--name", "b2")
    assert code == 0
    assert structurally_equal(parse_fincat(out), parse_fincat((SAMPLES / "b2.fincat").read_text()))


def test_gen_groupoid_small_site():
    code, out, _ = dmcat("gen", "groupoid", "1 + 1", "--close", "none")
    assert code == 0
    b = parse_fincat(out)
    assert (b.cat.n_obj, b.cat.n_mor) == (2, 8)


def test_gen_groupoid_budget_is_a_check_failure():
    code, out, err = dmcat("gen", "groupoid", "Z2")
    assert code == 1 and out == ""
    assert "gen.budget" in err


def test_gen_input_errors():
    assert dmcat("gen", "heyting", "pentagon")[0] == 2
    assert dmcat("gen", "walking", "triangle")[0] == 2
    assert dmcat("gen", "groupoid", "Q8", "--close", "none")[0] == 2


def test_search_instance_small_bounds_skips():
    code, out, _ = dmcat("search-instance", "--seed-bounds", "3,8", "--machine")
    assert code == 0
    (rec,) = records(out)
    assert rec[:3] == ["search.witness", "objects<=3 morphisms<=8", "SKIP"]


def test_bad_seed_bounds():
    with pytest.raises(SystemExit):
        dmcat("search-instance", "--seed-bounds", "six")


def test_output_identical_across_processes():
    argv = [sys.executable, "-m", "dmcat.cli", "verify-theorem", sample("m3"), "--machine"]
    runs = []
    for seed, jobs in (("1", "1"), ("12345", "4")):
        env = dict(os.environ, PYTHONHASHSEED=seed)
        proc = subprocess.run(argv + ["--jobs", jobs], capture_output=True, text=True, env=env,
                              check=False)
        runs.append((proc.returncode, proc.stdout))
    assert runs[0] == runs[1]
    assert runs[0][0] == 0
