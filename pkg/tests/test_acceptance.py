"""All acceptance criteria at full corpus size; one pass/fail line per criterion."""

import pytest

from kreinpair.acceptance import TITLES, run_criteria


@pytest.fixture(scope="module")
def results(request):
    out = {r.number: r for r in run_criteria(seed=0)}
    capman = request.config.pluginmanager.getplugin("capturemanager")
    with capman.global_and_fixture_disabled():
        print()
        for k in sorted(out):
            print(out[k].line())
    return out


@pytest.mark.parametrize("number", sorted(TITLES), ids=[f"criterion_{k:02d}" for k in sorted(TITLES)])
def test_criterion(results, number):
    r = results[number]
    print(r.line())
    assert r.passed, "\n".join([r.line(), *map(str, r.failures[:5])])
