from satedge.config import default_config
from satedge.evaluator import (ActionMatrix, feasible_actions, hit_flags,
                               subtask_cost, validate_action)
from satedge.oracle import solve_optimal
from satedge.policies import (BASELINE_PAIRS, baseline_cache, baseline_name,
                              baseline_offload, baseline_policy,
                              project_feasible)
from satedge.scenario import episode_stream

from conftest import compute, download, make_cache, make_state, upload


def test_baseline_names():
    assert baseline_name("to", "mrc") == "to-mrc"
    assert [baseline_name(a, b) for a, b in BASELINE_PAIRS] == [
        "to-mrc", "le-mrc", "to-mpc", "le-mpc", "go-mrc", "go-mpc"]


def test_le_and_to_proposals(prices):
    state = make_state([compute(rank=r + 1) for r in range(4)], t_c=300.0)
    assert baseline_offload("le", state, prices) == (0, 0, 0, 0)
    assert baseline_offload("to", state, prices) == (1, 1, 1, 1)


def test_le_upload_projected_to_offload(prices):
    state = make_state([upload()])
    action = baseline_policy("le", "mrc", state, prices)
    assert action.offload == (1,)
    validate_action(state, action)


def test_projection_examples():
    state = make_state([upload(), download()], t_c=300.0)
    projected = project_feasible(((0, 0), (1, 1)), state)
    assert projected.pair(0) == (1, 0)  # Hamming-1, lexicographic among ties
    assert projected.pair(1) == (0, 1)  # only the offload bit must flip


def test_projection_keeps_feasible_proposals(prices):
    cfg = default_config()
    for _, state in episode_stream(cfg.scenario, 31, 30):
        action, _ = solve_optimal(state, prices)
        pairs = tuple(action.pair(v) for v in range(len(state.task)))
        assert project_feasible(pairs, state) == action


def test_go_matches_oracle_offload_bits(prices):
    # the reward decomposes per sub-task, so greedy minimization recovers
    # the oracle's offload choices exactly
    cfg = default_config()
    for _, state in episode_stream(cfg.scenario, 17, 60):
        opt, _ = solve_optimal(state, prices)
        assert baseline_offload("go", state, prices) == opt.offload


def test_go_never_worse_per_subtask(prices):
    # GO minimizes each sub-task's immediate contribution, so its cost can
    # never exceed what the projected LE or TO proposal pays there
    cfg = default_config()
    for _, state in episode_stream(cfg.scenario, 13, 40):
        hits = hit_flags(state)
        go_bits = baseline_offload("go", state, prices)
        for v, sub in enumerate(state.task):
            feas = feasible_actions(sub, state)
            go_cost = min(
                subtask_cost(sub, of, ch, hits[v], state, prices)
                for of, ch in feas if of == go_bits[v])
            for proposal in ((0, 0), (1, 1)):  # LE-ish and TO-ish pairs
                rival = min(feas, key=lambda f: (
                    (f[0] != proposal[0]) + (f[1] != proposal[1]), f))
                rival_cost = subtask_cost(sub, *rival, hits[v], state, prices)
                assert go_cost <= rival_cost + 1e-12


def test_cache_bits_zero_without_outputs(prices):
    state = make_state([upload(), upload()])
    assert baseline_cache("mrc", state, (1, 1)) == (0, 0)


def test_forced_caching_pinned(prices):
    state = make_state([download(160e3)], t_c=0.5)  # return leg 0.83 > t_c
    for kind in ("mrc", "mpc"):
        assert baseline_cache(kind, state, (0,)) == (1,)


def test_mpc_retention_ignores_unpopular_outputs(prices):
    # cache full of ranks 1 and 2; outputs ranked 29 and 30 never survive
    sizes = tuple(1.0 for _ in range(30))
    cache = make_cache(placed=(1, 2), capacity=2.0, sizes=sizes)
    task = [download(d_out=1.0, rank=29), download(d_out=1.0, rank=30)]
    state = make_state(task, cache=cache)
    assert baseline_cache("mpc", state, (0, 0)) == (0, 0)


def test_mrc_retention_keeps_recent_outputs(prices):
    sizes = tuple(1.0 for _ in range(30))
    cache = make_cache(placed=(1, 2), capacity=2.0, sizes=sizes)
    task = [download(d_out=1.0, rank=29), download(d_out=1.0, rank=30)]
    state = make_state(task, cache=cache)
    # both outputs stream through a two-slot cache; both fit at the end
    assert baseline_cache("mrc", state, (0, 0)) == (1, 1)


def test_all_baselines_feasible_everywhere(prices):
    cfg = default_config()
    for _, state in episode_stream(cfg.scenario, 23, 120):
        for of_kind, ch_kind in BASELINE_PAIRS:
            validate_action(state, baseline_policy(of_kind, ch_kind, state, prices))


def test_unknown_kinds_rejected(prices):
    state = make_state([upload()])
    for bad in ("lru", "", "docs"):
        try:
            baseline_policy(bad, "mrc", state, prices)
        except ValueError:
            pass
        else:
            raise AssertionError("unknown offload kind accepted")
