import pytest

from satedge.caching import CacheState
from satedge.channel import LinkState
from satedge.config import default_config
from satedge.evaluator import EpisodeState
from satedge.scenario import prices_from
from satedge.workload import SubTask, Category


@pytest.fixture
def cfg():
    return default_config()


@pytest.fixture
def prices(cfg):
    return prices_from(cfg.scenario)


# Hand-built episode pieces used by the formula golden tests. Rates are the
# 1.6 / 2.4 Mb/s pair every worked example in the module docs is stated at.
GOLDEN_LINK = LinkState(rate_fh=1.6e6, rate_bh=2.4e6, prop_vs=0.03, prop_sg=0.27)


def make_cache(num_ranks=30, capacity=1e9, placed=(), delta=1.0, sizes=None):
    if sizes is None:
        sizes = tuple(200e3 for _ in range(num_ranks))
    placement = tuple(1 if r + 1 in placed else 0 for r in range(num_ranks))
    recency = tuple(1 if r + 1 in placed else 0 for r in range(num_ranks))
    return CacheState(sizes=sizes, placement=placement, capacity_bytes=capacity,
                      delta=delta, recency=recency, clock=2)


def make_state(task, t_c=300.0, link=GOLDEN_LINK, cpu_rate=1e10, cache=None):
    if cache is None:
        cache = make_cache()
    return EpisodeState(task=tuple(task), t_c=t_c, link=link,
                        cpu_rate=cpu_rate, cache=cache)


def upload(d_in=400e3):
    return SubTask(category=Category.UPLOAD, d_in=d_in, d_out=0.0, rho=0.0,
                   out_rank=0)


def download(d_out=160e3, rank=1):
    return SubTask(category=Category.DOWNLOAD, d_in=0.0, d_out=d_out, rho=0.0,
                   out_rank=rank)


def compute(d_in=100e3, d_out=100e3, rho=1e4, rank=2):
    return SubTask(category=Category.COMPUTE, d_in=d_in, d_out=d_out, rho=rho,
                   out_rank=rank)
