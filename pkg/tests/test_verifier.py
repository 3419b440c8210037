import csv
import io
import json

import jsonschema
import pytest

from qsum import verifier
from qsum.errors import SchemaError
from qsum.identities import IdentityCase as Case
from qsum.schemas import SCHEMAS
from qsum.verifier import GridSpec


def test_verify_case_pass(ctx):
    rec = verifier.verify_case(Case("jacobi", {"a": "0.5", "q": "0.1"}), ctx)
    assert rec.passed and rec.counted and rec.status == "Converged"


def test_verify_case_jacobi_zero(ctx):
    rec = verifier.verify_case(Case("jacobi", {"a": "0.1", "q": "0.1"}), ctx)
    assert rec.passed


def test_verify_case_divergent_is_flagged(ctx):
    rec = verifier.verify_case(
        Case("thm2", {"q": "0.25", "a": "0.6", "b": "1.3", "s": "0.5", "t": "0.5"}), ctx)
    assert rec.status == "Diverging"
    assert not rec.in_domain and not rec.counted and not rec.passed


def test_verify_case_pole_never_raises(ctx):
    rec = verifier.verify_case(Case("quintuple", {"x": "0.2", "q": "0.2"}), ctx)
    assert rec.status == "Pole" and not rec.passed


def test_sweep_deterministic(ctx):
    g = GridSpec("cor42", 8, seed=3)
    a = verifier.reports_json(verifier.sweep(g, ctx))
    b = verifier.reports_json(verifier.sweep(g, ctx))
    assert a == b


def test_seeds_differ(ctx):
    a, _ = verifier.sample_points(GridSpec("thm1", 3, seed=1), ctx)
    b, _ = verifier.sample_points(GridSpec("thm1", 3, seed=2), ctx)
    assert a != b


def test_samples_respect_rules(ctx):
    pts, _ = verifier.sample_points(GridSpec("thm1", 40, seed=5, profile="complex"), ctx)
    assert len(pts) == 40
    for p in pts:
        with ctx.work():
            s, t = verifier.to_complex(p["s"]), verifier.to_complex(p["t"])
            assert abs(s * t) >= 1.2
            assert 0 < abs(verifier.to_complex(p["q"])) < 1


def test_empty_grid(ctx):
    rep = verifier.sweep(GridSpec("thm1", 0), ctx)
    assert rep.passed and rep.empty and rep.max_residual is None


def test_sweep_complex_profile(ctx):
    rep = verifier.sweep(GridSpec("phi65limit", 6, seed=2, profile="complex"), ctx)
    assert rep.passed and len(rep.cases) == 6
    jsonschema.validate(rep.to_dict(), SCHEMAS["verify"])


def test_workers_match_sequential(ctx):
    g = GridSpec("jacobi", 4, seed=9)
    seq = verifier.reports_json(verifier.sweep(g, ctx))
    par = verifier.reports_json(verifier.sweep(g, ctx, workers=2))
    assert seq == par


def test_json_and_csv(ctx):
    reps = [verifier.sweep(GridSpec(i, 3), ctx) for i in ("jacobi", "quintuple")]
    doc = json.loads(verifier.reports_json(reps))
    jsonschema.validate(doc, SCHEMAS["verify-all"])
    assert doc["pass"] and "wall_time" not in doc["reports"][0]
    rows = list(csv.DictReader(io.StringIO(verifier.reports_csv(reps))))
    assert len(rows) == 6 and rows[0]["id"] == "jacobi"


@pytest.mark.parametrize("edge", list(verifier.LIMIT_EDGES))
def test_limit_edges(ctx, edge):
    tr = verifier.limit_study(edge, ctx)
    assert tr.passed
    jsonschema.validate(tr.to_dict(), SCHEMAS["limits"])


def test_limit_not_decreasing(ctx):
    tr = verifier.limit_study("thm2:prop41", ctx, schedule=["1e6", "1e2"])
    assert not tr.decreasing and not tr.passed


def test_unknown_edge(ctx):
    with pytest.raises(SchemaError):
        verifier.limit_study("thm1:jacobi", ctx)
