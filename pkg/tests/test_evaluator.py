import pytest
from hypothesis import given, settings, strategies as st

from satedge.config import default_config
from satedge.evaluator import (ActionMatrix, InfeasibleActionError, PriceVector,
                               completion_time, feasible_actions, hit_flags,
                               reward, subtask_time, validate_action)
from satedge.oracle import solve_optimal
from satedge.scenario import episode_stream, prices_from

from conftest import compute, download, make_cache, make_state, upload

# Worked by hand from the per-category pipelines at 1.6 / 2.4 Mb/s,
# d_vs = 0.03 s, d_sg = 0.27 s:
UPLOAD_400KB = 3.6333333333333333  # 2.0 + 0.03 + 4/3 + 0.27
DOWNLOAD_HIT_160KB = 0.83  # 0.8 + 0.03
COMPUTE_LOCAL_WORK = 0.1  # 1e9 cycles at 1e10 cycles/s


def rel_err(a, b):
    return abs(a - b) / abs(b)


def test_upload_golden():
    state = make_state([upload(400e3)])
    t = subtask_time(state.task[0], 1, False, state)
    assert rel_err(t, UPLOAD_400KB) < 1e-6
    assert t == UPLOAD_400KB  # exact under these round rates


def test_download_hit_golden():
    state = make_state([download(160e3)])
    t = subtask_time(state.task[0], 0, True, state)
    assert rel_err(t, DOWNLOAD_HIT_160KB) < 1e-6


def test_download_miss_adds_backhaul_leg():
    state = make_state([download(160e3)])
    miss = subtask_time(state.task[0], 0, False, state)
    # miss prepends d_out/r_bh + d_sg to the hit path
    assert rel_err(miss - DOWNLOAD_HIT_160KB,
                   160e3 * 8 / 2.4e6 + 0.27) < 1e-9


def test_compute_local_work_golden():
    st_ = compute(d_in=100e3, d_out=100e3, rho=1e4)
    state = make_state([st_])
    local = subtask_time(st_, 0, False, state)
    hit = subtask_time(st_, 0, True, state)
    # the hit path skips exactly the local processing term
    assert rel_err(local - hit, COMPUTE_LOCAL_WORK) < 1e-6
    ingest = 100e3 * 8 / 1.6e6 + 0.03
    back = 100e3 * 8 / 1.6e6 + 0.03
    assert rel_err(local, ingest + COMPUTE_LOCAL_WORK + back) < 1e-6


def test_compute_offloaded_uses_backhaul():
    st_ = compute(d_in=240e3, d_out=100e3, rho=1e4)
    state = make_state([st_])
    off = subtask_time(st_, 1, False, state)
    loc = subtask_time(st_, 0, False, state)
    d_off = 240e3 * 8 / 2.4e6  # 0.8 s
    assert rel_err(off - loc, (d_off + 0.27) - 240e3 * 1e4 / 1e10) < 1e-9


def test_feasible_sets_per_category():
    state = make_state([upload(), download(), compute()], t_c=300.0)
    assert feasible_actions(state.task[0], state) == ((1, 0), (1, 1))
    assert feasible_actions(state.task[1], state) == ((0, 0), (0, 1))
    assert feasible_actions(state.task[2], state) == ((0, 0), (0, 1), (1, 0), (1, 1))


def test_coverage_expiry_forces_caching():
    # return leg of 160KB output is 0.8 + 0.03 = 0.83 s > t_c
    state = make_state([download(160e3), compute(d_out=160e3)], t_c=0.5)
    assert feasible_actions(state.task[0], state) == ((0, 1),)
    assert feasible_actions(state.task[1], state) == ((0, 1), (1, 1))


def test_hit_flags_use_starting_placement():
    cache = make_cache(placed=(4,))
    state = make_state([download(rank=4), download(rank=5)], cache=cache)
    assert hit_flags(state) == (True, False)


def test_completion_time_sums_in_chain_order():
    one = make_state([upload(250e3)])
    two = make_state([upload(250e3), upload(250e3)])
    t1 = completion_time(one, ActionMatrix(offload=(1,), cache=(0,)))
    t2 = completion_time(two, ActionMatrix(offload=(1, 1), cache=(0, 0)))
    assert t2 == 2.0 * t1


def test_reward_zero_prices():
    state = make_state([upload(), compute()])
    action = ActionMatrix(offload=(1, 0), cache=(0, 0))
    assert reward(state, action, PriceVector(0.0, 0.0, 0.0, 0.0)) == 0.0


def test_reward_time_only_prices_bitwise():
    cfg = default_config()
    unit_time = PriceVector(0.0, 0.0, 0.0, 1.0)
    prices = prices_from(cfg.scenario)
    for _, state in episode_stream(cfg.scenario, 99, 40):
        action, _ = solve_optimal(state, prices)
        assert reward(state, action, unit_time) == completion_time(state, action)


def test_hit_consumes_no_compute_or_comm_budget():
    cache = make_cache(placed=(2,))
    st_ = compute(rank=2)
    state = make_state([st_], cache=cache)
    only_usage = PriceVector(1e-10, 1e-6, 0.0, 0.0)
    for of in (0, 1):
        act = ActionMatrix(offload=(of,), cache=(0,))
        assert reward(state, act, only_usage) == 0.0
    # a miss on the same action pays for the work
    miss_state = make_state([st_], cache=make_cache())
    act = ActionMatrix(offload=(0,), cache=(0,))
    assert reward(miss_state, act, only_usage) == pytest.approx(1e-10 * st_.zeta)


def test_cache_bit_charges_output_bytes():
    state = make_state([download(200e3)])
    cache_price = PriceVector(0.0, 0.0, 1e-6, 0.0)
    kept = ActionMatrix(offload=(0,), cache=(1,))
    dropped = ActionMatrix(offload=(0,), cache=(0,))
    assert reward(state, kept, cache_price) == pytest.approx(0.2)
    assert reward(state, dropped, cache_price) == 0.0


def test_all_hits_never_slower_than_all_misses():
    cache_all = make_cache(placed=tuple(range(1, 31)))
    task = [download(rank=3), compute(rank=8)]
    hit_state = make_state(task, cache=cache_all)
    miss_state = make_state(task, cache=make_cache())
    act = ActionMatrix(offload=(0, 0), cache=(0, 0))
    assert completion_time(hit_state, act) <= completion_time(miss_state, act)


def test_validate_action_names_the_offender():
    state = make_state([upload(), download()])
    bad = ActionMatrix(offload=(0, 0), cache=(0, 0))
    with pytest.raises(InfeasibleActionError) as err:
        validate_action(state, bad)
    assert "0" in str(err.value) and "upload" in str(err.value).lower()
    with pytest.raises(InfeasibleActionError):
        completion_time(state, bad)
    with pytest.raises(InfeasibleActionError):
        reward(state, bad, PriceVector(0, 0, 0, 1.0))


def test_action_matrix_validates_bits():
    with pytest.raises(ValueError):
        ActionMatrix(offload=(1, 0), cache=(0,))
    with pytest.raises(ValueError):
        ActionMatrix(offload=(2,), cache=(0,))
    bits = ActionMatrix(offload=(1, 0), cache=(0, 1)).bits()
    assert bits == (1, 0, 0, 1)
    assert ActionMatrix.from_bits(bits) == ActionMatrix(offload=(1, 0), cache=(0, 1))


@settings(max_examples=40, deadline=None)
@given(st.floats(min_value=1e3, max_value=12e3),
       st.floats(min_value=100e3, max_value=500e3))
def test_local_compute_reward_monotone_in_zeta(rho, d_in):
    prices = PriceVector(1e-10, 1e-6, 1e-6, 0.2)
    act = ActionMatrix(offload=(0,), cache=(0,))
    lo = make_state([compute(d_in=d_in, rho=rho)])
    hi = make_state([compute(d_in=d_in, rho=rho * 1.5)])
    assert reward(lo, act, prices) <= reward(hi, act, prices)
