import hashlib
import json
import random

import pytest

from nonarch.suites import SUITES, Case, Report, case_rng, run_suite


def test_rng_contract():
    # documented stream: first 8 bytes of sha256("seed:suite:i"), big endian, into random.Random
    h = hashlib.sha256(b"42:cov-3.24:7").digest()
    want = random.Random(int.from_bytes(h[:8], "big")).random()
    assert case_rng(42, "cov-3.24", 7).random() == want


def test_report_round_trip_and_totals():
    rep = run_suite("kakutani", seed=5)
    js = rep.to_json()
    assert js["totals"]["pass"] + js["totals"]["fail"] == js["totals"]["count"] == len(rep.cases)
    back = Report.from_json(json.loads(json.dumps(js)))
    assert back.suite == rep.suite and back.passed == rep.passed
    assert [c.id for c in back.cases] == [c.id for c in rep.cases]


@pytest.mark.parametrize("name", ["haar-character", "scde", "kakutani"])
def test_same_seed_same_report(name):
    a = run_suite(name, seed=11).to_json()
    b = run_suite(name, seed=11).to_json()
    a.pop("wall_time"), b.pop("wall_time")
    assert a == b


def test_different_seeds_differ():
    a = run_suite("haar-character", seed=1).to_json()["cases"]
    b = run_suite("haar-character", seed=2).to_json()["cases"]
    assert [c["inputs"] for c in a] != [c["inputs"] for c in b]


def test_unknown_suite():
    with pytest.raises(KeyError):
        run_suite("nope")


def test_empty_report_is_not_ok():
    assert not Report("x", 0, []).ok
    assert Report("x", 0, [Case("a", {}, 1, 1, True)]).ok
