"""One test per acceptance criterion.

Each test prints a single ``criterion N ... PASS|FAIL`` line (also collected
into the terminal summary) before asserting.  Thresholds live inside the
battery reports; the runtime limits are asserted here.
"""
import io
import json
import time

import pytest

from conftest import ACCEPTANCE_LINES
from koehler import battery
from koehler.cli import run
from koehler.report import CheckReport

SEED = 0


def _record(number, title, rep, elapsed, limit=None, extra=""):
    ok = rep.passed and (limit is None or elapsed < limit)
    worst = ", ".join(f"{k} {v:.1e}<={rep.thresholds[k]:.0e}"
                      for k, v in sorted(rep.residuals.items()))
    timing = f"{elapsed:.1f} s" + (f" (limit {limit} s)" if limit else "")
    line = f"criterion {number} {title}: {'PASS' if ok else 'FAIL'} [{timing}] {extra}"
    if worst:
        line += f" | {worst}"
    if rep.failures:
        line += " | failures: " + "; ".join(rep.failures[:5])
    print(line)
    ACCEPTANCE_LINES.append(line)
    return ok


def _timed(fn, *args):
    t0 = time.perf_counter()
    rep = fn(*args)
    return rep, time.perf_counter() - t0


def test_criterion_1_idempotent_cross_oracle():
    rep, dt = _timed(battery.criterion_idempotent_cross_oracle, SEED)
    assert rep.certificates["fixtures"] == 50
    assert _record(1, "idempotent cross-oracle", rep, dt, limit=30), rep.violations()


def test_criterion_2_decomposition_suite():
    rep, dt = _timed(battery.criterion_decomposition, SEED)
    extra = f"rev dims {sorted(set(rep.certificates['rev_dims']))}"
    assert _record(2, "decomposition suite", rep, dt, extra=extra), rep.violations()


def test_criterion_3_positive_suite():
    rep, dt = _timed(battery.criterion_positive, SEED)
    assert rep.certificates["fixtures"] == 50
    assert _record(3, "positive suite", rep, dt), rep.violations()


def test_criterion_4_cyclicity_suite():
    rep, dt = _timed(battery.criterion_cyclicity, SEED)
    assert rep.certificates["fixtures"] == 500
    extra = f"basic periods {rep.certificates['basic_periods']}"
    assert _record(4, "cyclicity suite", rep, dt, limit=120, extra=extra), rep.violations()


def test_criterion_5_composition_operators():
    rep, dt = _timed(battery.criterion_composition, SEED)
    # 1 + 4 + 27 exhaustive maps on up to 3 points, 200 sampled on 4 points
    assert rep.certificates["maps"] == 32 + 200
    assert _record(5, "composition operators", rep, dt, extra="232 maps"), rep.violations()


def test_criterion_6_finite_semigroup():
    rep, dt = _timed(battery.criterion_semigroup)
    assert rep.certificates["T3_size"] == 27 and rep.certificates["T3_idempotents"] == 10
    assert _record(6, "finite semigroup", rep, dt, extra="T3: 27 elements, 10 idempotents"), \
        rep.violations()


def test_criterion_7_ip_suite():
    rep, dt = _timed(battery.criterion_ip, SEED)
    assert rep.certificates["round_trips"] == 100
    extra = f"{rep.certificates['rotation_fixtures']} rational-angle fixtures"
    assert _record(7, "finite-sums suite", rep, dt, extra=extra), rep.violations()


def _battery_text(seed):
    out, err = io.StringIO(), io.StringIO()
    code = run(["battery", "--seed", str(seed)], out, err)
    report = json.loads(out.getvalue())
    wall = report.pop("wall_time")
    return code, json.dumps(report, sort_keys=True), wall


def test_criterion_8_determinism():
    t0 = time.perf_counter()
    code1, text1, _ = _battery_text(7)
    code2, text2, _ = _battery_text(7)
    dt = time.perf_counter() - t0
    rep = CheckReport("c8_determinism")
    if text1 != text2:
        rep.fail("two runs of battery --seed 7 differ outside wall_time")
    if code1 != 0 or code2 != 0:
        rep.fail(f"battery exit codes {code1}, {code2}")
    assert _record(8, "determinism", rep, dt, extra=f"{len(text1)} bytes identical"), rep.failures
