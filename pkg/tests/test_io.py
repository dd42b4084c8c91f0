import json

import pytest

from cdga_blowup.cohomology import cohomology
from cdga_blowup.errors import InputError, PresentationError
from cdga_blowup.io import (algebra_from_dict, algebra_to_dict, corpus_names, load_model, load_presentation,
                            parse_presentation, save_model)

from oracle import exterior_betti


def test_corpus_files_load():
    assert {"kodaira-thurston.cdga", "cp.cdga", "cp1.cdga", "heisenberg.cdga"} <= set(corpus_names())
    kt = load_presentation("kodaira-thurston").build()
    assert cohomology(kt).betti == exterior_betti(4, {2: {(0, 1): 1}})
    cp5 = load_presentation("cp").build()
    assert cohomology(cp5).betti == [1, 0] * 5 + [1]
    h3 = load_presentation("heisenberg").build()
    assert cohomology(h3).betti == exterior_betti(3, {2: {(0, 1): 1}}) == [1, 2, 2, 1]


def test_round_trip():
    for name in corpus_names():
        pf = load_presentation(name)
        again = parse_presentation(pf.dumps(), name)
        assert again.to_dict() == pf.to_dict()
        assert again.build().basis == pf.build().basis


BAD = {
    "degree": ("generators:\n  - {name: u, degree: one}\n", "bad.cdga:2: field 'generators'"),
    "negative": ("generators:\n  - {name: u, degree: 0}\n", "degree of u"),
    "key": ("generators:\n  - {name: u, degree: 1}\nextras: 3\n", "extras"),
    "yaml": ("generators: [\n", "not a valid"),
    "diff": ("generators:\n  - {name: u, degree: 1}\n  - {name: v, degree: 1}\ndifferential:\n  v: u\n",
             "bad.cdga:5: field 'differential'"),
    "distinguished": ("generators:\n  - {name: u, degree: 1}\ndistinguished:\n  colour: u\n", "allowed keys"),
}


@pytest.mark.parametrize("case", sorted(BAD))
def test_parse_errors_carry_context(case):
    text, needle = BAD[case]
    with pytest.raises(InputError) as info:
        parse_presentation(text, "bad.cdga").build()
    assert "bad.cdga" in str(info.value)
    assert needle in str(info.value)


def test_infinite_algebra_needs_truncation():
    with pytest.raises(PresentationError, match="truncate_above"):
        parse_presentation("generators:\n  - {name: x, degree: 2}\n", "x.cdga")
    pf = parse_presentation("generators:\n  - {name: x, degree: 2}\ntruncate_above: 6\n", "x.cdga")
    assert pf.build().truncated


def test_missing_file():
    with pytest.raises(InputError):
        load_presentation("/nonexistent/thing.cdga")


def test_model_persistence(tmp_path, mcduff_model):
    B = mcduff_model.algebra
    path = tmp_path / "m.json"
    save_model(B, path, meta={"n": 12})
    A, meta = load_model(path)
    assert meta["n"] == 12
    assert A.basis == B.basis and dict(A.mult_items()) == dict(B.mult_items())
    assert A._diff == B._diff
    assert A.element("u*x") == A.element("x*u")
    with pytest.raises(InputError):
        A.element("u*y")
    data = json.loads(path.read_text())
    data["version"] = 99
    with pytest.raises(InputError):
        algebra_from_dict(data)
    assert algebra_to_dict(A, meta)["format"] == data["format"]


def test_corrupted_model_rejected(tmp_path):
    path = tmp_path / "junk.json"
    path.write_text("{not json")
    with pytest.raises(InputError):
        load_model(path)
