import pytest

from frodoproc import report, targets
from frodoproc.programs import simulate


def test_target_lookup():
    assert targets.target_cycles(640, "keygen", True) == 178561
    assert targets.target_cycles(640, "keygen", False) == 295300
    assert targets.target_cycles(1344, "decaps", True) == 667300


def test_latency_table_arithmetic():
    for (n, ph) in targets.LATENCY:
        checks = targets.compare_latency(n, ph, targets.LATENCY[(n, ph)][0])
        assert all(c.passed for c in checks), [c for c in checks if not c.passed]


def test_compare_helpers():
    assert targets.compare_total(640, "keygen", True, 178561).passed
    assert not targets.compare_total(640, "keygen", True, 200000).passed
    assert targets.compare_ratio(640, "keygen", 60.4).passed
    assert not targets.compare_ratio(640, "keygen", 56.9).passed
    ok = targets.compare_opcodes(640, "keygen", {"MUL": 107520, "MBR": 1280, "MBW": 1280})
    assert all(c.passed for c in ok)
    assert targets.compare_opcodes(976, "keygen", {}) == []


def test_write_report_and_figures(tmp_path):
    reps = [simulate(640, "decaps", ov, seed=b"r", keep_machine=True) for ov in (True, False)]
    checks = [targets.compare_total(640, "decaps", r.overlap, r.total) for r, _ in reps]
    out = tmp_path / "rep.tsv"
    files = report.write(out, [r for r, _ in reps], checks, trace=reps[0][1].trace,
                         totals={(640, "decaps"): (reps[0][0].total, reps[1][0].total)},
                         targets=targets.OVERLAP_TOTALS)
    assert [f.name for f in files] == ["rep.tsv", "rep_opcodes.png", "rep_timeline.png", "rep_totals.png"]
    for f in files[1:]:
        assert f.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
    parts = out.read_text().split("---\n")
    assert len(parts) == 3
    assert "\tPASS" in parts[2]
