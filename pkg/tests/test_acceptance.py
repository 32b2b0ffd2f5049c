"""One test per acceptance criterion; each prints a PASS/FAIL line."""

import pytest

from colormodels.acceptance import CRITERIA, run_one


@pytest.mark.parametrize("cid", [c[0] for c in CRITERIA], ids=[f"criterion_{c[0]:02d}" for c in CRITERIA])
def test_criterion(cid, capsys):
    r = run_one(cid)
    with capsys.disabled():
        print(f"\n[{'PASS' if r.passed else 'FAIL'}] criterion {r.id}: {r.name}: {r.detail} ({r.seconds:.1f}s)")
    assert r.passed, r.detail
