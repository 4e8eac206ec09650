import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from uitrace.issues import (
    DEFAULT_AD_ACTIVITY,
    AppProfile,
    IssueFinding,
    coverage_check,
    detect_logout,
    detect_unresponsive,
    load_profile,
)
from uitrace.params import DetectorParams
from uitrace.regions import Region, make_region
from uitrace.trace import ParseError

from conftest import MINUTE, screen, trace_of

AD = DEFAULT_AD_ACTIVITY
PROFILE = AppProfile("app", frozenset({"LoginActivity"}), AD)


def by_activity(acts, period_ms=1000):
    cache = {}
    hs = [cache.setdefault(a, screen(hash(a) % 1000, activity=a)) for a in acts]
    return trace_of(hs, period_ms=period_ms)


def region(trace, l, r, kind="tarpit"):
    return make_region(trace, l, r, kind, 0.0)


# --- logout -----------------------------------------------------------------------


def test_no_login_activity():
    assert detect_logout(by_activity(["Main"] * 50), PROFILE, MINUTE) is None


def test_auto_login_residue_ignored():
    acts = ["LoginActivity"] * 30 + ["Main"] * 2000
    assert detect_logout(by_activity(acts), PROFILE, 10 * MINUTE) is None


def test_logout_span_first_to_last():
    acts = ["Main"] * 100 + ["LoginActivity", "Main"] * 400
    f = detect_logout(by_activity(acts), PROFILE, 10 * MINUTE)
    assert f == IssueFinding("app_logout", 101, 899, 798_000)


def test_empty_profile_finds_nothing():
    t = by_activity(["LoginActivity"] * 1000)
    assert detect_logout(t, AppProfile("app"), MINUTE) is None


def test_logout_threshold_inclusive():
    acts = ["LoginActivity"] + ["Main"] * 59 + ["LoginActivity"]
    assert detect_logout(by_activity(acts), PROFILE, MINUTE).span_ms == MINUTE
    assert detect_logout(by_activity(acts), PROFILE, MINUTE + 1) is None


# --- unresponsive -----------------------------------------------------------------


def test_fifteen_minute_ad_run():
    acts = ["Main"] * 300 + [AD] * 901 + ["Main"] * 300
    fs = detect_unresponsive(by_activity(acts), PROFILE, 10 * MINUTE)
    assert fs == [IssueFinding("unresponsive_ui", 301, 1201, 15 * MINUTE)]


def test_interrupted_run_splits():
    acts = [AD] * 400 + ["Main"] + [AD] * 400
    t = by_activity(acts)
    assert detect_unresponsive(t, PROFILE, 10 * MINUTE) == []
    assert len(detect_unresponsive(t, PROFILE, 5 * MINUTE)) == 2


def test_no_ad_activity():
    assert detect_unresponsive(by_activity(["Main"] * 1000), PROFILE, MINUTE) == []


def test_run_reaching_trace_end():
    acts = ["Main"] * 10 + [AD] * 100
    assert detect_unresponsive(by_activity(acts), PROFILE, 10_000) == [IssueFinding("unresponsive_ui", 11, 110, 99_000)]


def oracle_runs(acts, ad):
    runs, i = [], 0
    while i < len(acts):
        if acts[i] == ad:
            j = i
            while j + 1 < len(acts) and acts[j + 1] == ad:
                j += 1
            runs.append((i + 1, j + 1))
            i = j + 1
        else:
            i += 1
    return runs


@given(st.lists(st.sampled_from(["Main", AD]), min_size=1, max_size=80), st.integers(0, 30))
def test_runs_are_maximal_and_disjoint(acts, t_min_s):
    t = by_activity(acts)
    got = [(f.start, f.end) for f in detect_unresponsive(t, PROFILE, t_min_s * 1000)]
    want = [(a, b) for a, b in oracle_runs(acts, AD) if (b - a) * 1000 >= t_min_s * 1000]
    assert got == want


# --- coverage ---------------------------------------------------------------------


def test_identical_region_covers():
    t = trace_of(list(range(200)))
    f = IssueFinding("unresponsive_ui", 50, 150, 100_000)
    assert coverage_check(t, [f], [region(t, 50, 150)]) == [(f, True)]


def test_forty_nine_percent_is_not_enough():
    # finding spans 100 s; region overlaps 49 s then 50 s
    t = trace_of(list(range(300)))
    f = IssueFinding("app_logout", 101, 201, 100_000)
    assert coverage_check(t, [f], [region(t, 152, 260)]) == [(f, False)]
    assert coverage_check(t, [f], [region(t, 151, 260)]) == [(f, True)]


def test_single_region_vs_union():
    t = trace_of(list(range(300)))
    f = IssueFinding("app_logout", 101, 201, 100_000)
    halves = [region(t, 101, 130), region(t, 170, 201)]
    assert coverage_check(t, [f], halves) == [(f, False)]
    assert coverage_check(t, [f], halves, union=True) == [(f, True)]


def test_no_regions():
    t = trace_of(list(range(20)))
    f = IssueFinding("app_logout", 2, 10, 8000)
    assert coverage_check(t, [f], []) == [(f, False)]
    assert coverage_check(t, [f], [], union=True) == [(f, False)]


def test_partition_region_counts():
    t = trace_of(list(range(100)))
    f = IssueFinding("app_logout", 40, 100, 60_000)
    assert coverage_check(t, [f], [region(t, 30, 100, "partition")])[0][1]


@given(st.integers(1, 99), st.integers(1, 99), st.integers(1, 99), st.integers(0, 50))
def test_extending_a_region_never_uncovers(a, b, c, grow):
    t = trace_of(list(range(150)))
    lo, hi = sorted((a, b))
    f = IssueFinding("app_logout", lo, hi, (hi - lo) * 1000)
    start = c
    end = min(150, c + 20)
    small = Region(start, end, "tarpit", 0.0, (end - start) * 1000, None, "t")
    big_start, big_end = max(1, start - grow), min(150, end + grow)
    big = Region(big_start, big_end, "tarpit", 0.0, (big_end - big_start) * 1000, None, "t")
    for union in (False, True):
        if coverage_check(t, [f], [small], union)[0][1]:
            assert coverage_check(t, [f], [big], union)[0][1]


@pytest.mark.parametrize("seed", range(3))
def test_simulated_issues_are_covered(run_cache, seed):
    for scenario in ("logout", "ad_freeze"):
        run = run_cache(scenario, seed)
        assert run.analysis.issues
        assert all(covered for _, covered in run.analysis.issues)


# --- profile files ----------------------------------------------------------------


def test_profile_round_trip(tmp_path):
    p = tmp_path / "p.json"
    p.write_text(json.dumps(PROFILE.to_json()))
    assert load_profile(p) == PROFILE


def test_profile_defaults(tmp_path):
    p = tmp_path / "p.json"
    p.write_text(json.dumps({"app": "x"}))
    assert load_profile(p) == AppProfile("x", frozenset(), AD)


@pytest.mark.parametrize("raw", ["{", "[]", '{"app": 1}', '{"app": "x", "login_activities": "Login"}',
                                 '{"app": "x", "ad_activity_id": 3}'])
def test_bad_profiles(tmp_path, raw):
    p = tmp_path / "p.json"
    p.write_text(raw)
    with pytest.raises(ParseError):
        load_profile(p)


def test_params_reject_nonpositive():
    with pytest.raises(ValueError):
        DetectorParams(t_min_ms=0)
    with pytest.raises(ValueError):
        DetectorParams(d_max=-1)
