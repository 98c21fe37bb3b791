import json
import time

import pytest
from conftest import CORPUS, NEGATIVE, POSITIVE

from xmodrep.cli import STAGES, Options, emit_report, main, run_pipeline
from xmodrep.fixtures import FixtureError, bundled_names, load_bundled, parse_fixture, parse_fixture_text
from xmodrep.report import SKIP, VerificationReport

GOOD = """
[meta]
name = "inline"
[L]
trivial = true
[M]
cyclic = 2
[N]
perm = ["(1 2 3)", "(1 2)"]
degree = 3
[d1]
kind = "trivial"
"""


def test_corpus_is_complete():
    names = bundled_names()
    assert len(names) == len(CORPUS) >= 14
    assert {"trivial", "z2-triv", "s3-z3", "z2-id-badlift", "s3-trivial-action"} <= set(names)


def test_inline_fixture_and_perm_expansion():
    spec = parse_fixture_text(GOOD)
    assert spec.name == "inline" and spec.module.orders() == (1, 2, 6)
    assert spec.l_trivial and spec.expect_pass and spec.field == "rational"


def test_syntax_error_has_location():
    with pytest.raises(FixtureError) as e:
        parse_fixture_text("[L]\ntrivial = \n", "bad.toml")
    assert e.value.line == 2 and e.value.path == "bad.toml"


def test_bad_row_length_points_at_table():
    text = "[L]\ntrivial = true\n[M]\n\ntable = [[0, 1], [1]]\n[N]\ntrivial = true\n"
    with pytest.raises(FixtureError, match="row 1 has length 1, expected 2") as e:
        parse_fixture_text(text, "rows.toml")
    assert (e.value.line, e.value.column) == (5, 1)


def test_unknown_element_and_missing_group():
    text = GOOD.replace('kind = "trivial"', 'images = { "1" = "(1 4)" }')
    with pytest.raises(FixtureError, match="d1"):
        parse_fixture_text(text)
    with pytest.raises(FixtureError, match=r"missing group table \[N\]"):
        parse_fixture_text("[L]\ntrivial = true\n[M]\ntrivial = true\n")
    with pytest.raises(FixtureError, match="no bundled fixture"):
        load_bundled("nope")


def test_fixture_file_round_trip(tmp_path):
    p = tmp_path / "mine.toml"
    p.write_text(GOOD.replace('name = "inline"', ""), encoding="utf-8")
    assert parse_fixture(p).name == "mine"
    with pytest.raises(FixtureError, match="cannot read"):
        parse_fixture(tmp_path / "absent.toml")


def test_stored_failures_match_declared(built):
    from xmodrep.xmod2 import truncation_checks, verify_2xm
    for name in NEGATIVE:
        spec = built.spec(name)
        checks = verify_2xm(spec.module) + truncation_checks(spec.module)
        bad = [c.id for c in checks if not c.ok]
        assert set(spec.expected_failures) <= set(bad), name


def test_trivial_runs_fast():
    t0 = time.perf_counter()
    rep = run_pipeline(load_bundled("trivial"))
    assert rep.ok and time.perf_counter() - t0 < 1.0
    assert [s.name for s in rep.sections] == list(STAGES)


@pytest.mark.parametrize("name", NEGATIVE)
def test_negative_fixtures_stop_after_axioms(name):
    rep = run_pipeline(load_bundled(name))
    assert not rep.ok
    ax = rep.sections[0]
    assert ax.name == "axioms" and ax.status == "run" and not ax.ok
    assert all(s.status == SKIP for s in rep.sections[1:])
    assert rep.first_failure().startswith("axioms.")


def test_stage_limit_and_budget():
    rep = run_pipeline(load_bundled("z2-triv"), Options(stage="gray"))
    assert rep.ok and [s.status for s in rep.sections] == ["run", "run", SKIP, SKIP]
    with pytest.raises(ValueError):
        run_pipeline(load_bundled("z2-triv"), Options(stage="nowhere"))


def test_json_round_trip(built):
    rep = run_pipeline(load_bundled("z2-lift"))
    back = VerificationReport.from_json(emit_report(rep, "json"))
    assert back.ok == rep.ok and back.to_dict() == json.loads(rep.to_json())
    assert back.dims["dim K̄3"] == built.bundle("z2-lift").Q3.dim


def test_report_is_deterministic_under_fixed_seed():
    spec = load_bundled("s3-s3-z2")
    opts = Options(seed=42, budget=8000)
    a, b = run_pipeline(spec, opts), run_pipeline(spec, opts)
    strip = lambda r: {k: v for k, v in r.to_dict().items() if k != "meta"}
    assert strip(a) == strip(b)
    sampled = [c for c in a.sections[1].checks if c.mode.startswith("sampled")]
    assert sampled


def test_text_report_lists_every_section():
    out = emit_report(run_pipeline(load_bundled("zn-id-2")), "text")
    assert out.startswith("fixture zn-id-2: PASS")
    for s in STAGES:
        assert f"[{s}]" in out


def test_exit_codes(tmp_path, capsys):
    assert main(["run", "trivial", "--report", "json"]) == 0
    json.loads(capsys.readouterr().out)
    assert main(["run", "z2-id-badlift"]) == 1
    assert "first failing check: axioms." in capsys.readouterr().err
    bad = tmp_path / "broken.toml"
    bad.write_text("[L\n", encoding="utf-8")
    assert main(["run", str(bad)]) == 2
    assert "broken.toml:1:" in capsys.readouterr().err
    assert main(["run", "z2-triv", "--field", "prime:2"]) == 2          # 2 divides the orders
    assert main(["run", "z2-triv", "--field", "prime:2", "--allow-modular"]) == 0
    assert main(["run", "s3-z3", "--budget", "10"]) == 3
    assert main(["run", "trivial", "--seed", "-1"]) == 2
    capsys.readouterr()
    assert main(["list"]) == 0
    assert "z2-triv" in capsys.readouterr().out.split()


@pytest.mark.parametrize("name", POSITIVE)
def test_positive_fixture_passes_end_to_end(name):
    rep = run_pipeline(load_bundled(name))
    assert rep.ok, rep.first_failure()
