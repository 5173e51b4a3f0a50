import json

from shuffle_bethe.report import Check, Report, all_passed
from shuffle_bethe.suites import SUITES, RunConfig, build_tasks, run_tasks, task_rng


def test_probes_do_not_decide_the_verdict():
    ok = Check("a", "anchor-a", {})
    probe = Check("b", "anchor-b", {}, role="probe").fail(reason="printed form differs")
    r = Report(["x"], {})
    r.extend([ok, probe])
    s = r.summary()
    assert r.passed and all_passed([ok, probe])
    assert s["total"] == 1 and s["probes"] == 1 and s["discrepancies"] == ["b"]
    bad = Check("c", "anchor-c", {}).fail(k=[1, 0])
    r.add(bad)
    assert not r.passed and r.summary()["failed_names"] == ["c"]
    d = json.loads(r.to_json())
    assert d["checks"][1]["role"] == "probe" and "role" not in d["checks"][0]
    assert d["checks"][2]["witness"] == {"k": [1, 0]}


def test_first_witness_is_kept():
    c = Check("a", "x", {}).fail(t=1)
    c.fail(t=2)
    assert c.witness == {"t": 1}


def test_task_rng_is_keyed():
    assert task_rng(1, "a").random() == task_rng(1, "a").random()
    assert task_rng(1, "a").random() != task_rng(1, "b").random()


def test_every_suite_builds():
    cfg = RunConfig()
    for s in SUITES:
        assert build_tasks(s, cfg)
    keys = [t.key for t in build_tasks("all", cfg)]
    assert len(keys) == len(set(keys))


def test_signature_filter_and_order():
    cfg = RunConfig(m=2, n=0, max_N=1, max_r=1, trials=1)
    tasks = build_tasks("commutativity", cfg)
    assert all(":2,0:" in t.key for t in tasks)
    a = [c.to_dict() for c in run_tasks(tasks, cfg)]
    b = [c.to_dict() for c in run_tasks(list(tasks), cfg)]
    assert a == b
