from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from conftest import binary_networks, observations
from src import coeffring as cr
from src import config
from src.bayesnet import instantiate
from src.errors import AllTrialsTruncated, InputError
from src.expectation import TRUE, Atom
from src.pgcl import Assign, Diverge, DistExpr, If, Skip, While, seq
from src.services.engine import est
from src.sim import sample_posterior, shard_plan, simulate, thresholds
from src.translate import translate

COIN = DistExpr.uniform((0, 1))


def test_thresholds():
    assert thresholds(COIN.outcomes) == [2**63, 2**64]
    third = thresholds(DistExpr.uniform((0, 1, 2)).outcomes)
    assert third[0] == -(-(2**64) // 3)
    assert third[-1] == 2**64


def test_shard_plan():
    assert shard_plan(10, 4) == [4, 4, 2]
    assert shard_plan(8, 4) == [4, 4]


def test_skip_costs_exactly_one():
    result = simulate(Skip(), seed=1, trials=50)
    assert result.trials == 50
    assert result.mean == 1
    assert result.variance == 0
    assert result.half_width == 0
    assert result.agrees_with(Fraction(1))
    assert result.summary_line() == "trials=50 mean=1.000000 var=0.000000 ci99=0.000000 truncated=0"


def test_same_seed_same_result():
    loop = While(Atom("x", 0), Assign("x", COIN))
    first = simulate(loop, seed=11, trials=2000, init={"x": 0})
    second = simulate(loop, seed=11, trials=2000, init={"x": 0})
    assert (first.mean, first.variance) == (second.mean, second.variance)


def test_parallel_shards_match_inline(monkeypatch, mood):
    monkeypatch.setattr(config, "SIM_SHARD_SIZE", 500)
    program = translate(mood, {"P": 1})
    inline = simulate(program, seed=5, trials=1500, n_jobs=1)
    pooled = simulate(program, seed=5, trials=1500, n_jobs=2)
    assert (inline.mean, inline.variance) == (pooled.mean, pooled.variance)


def test_geometric_loop_agrees():
    loop = While(Atom("x", 0), Assign("x", COIN))
    result = simulate(loop, seed=3, trials=20000, init={"x": 0})
    assert result.agrees_with(Fraction(5))
    assert not result.agrees_with(Fraction(6))


def test_dice_agrees(dice):
    program, _ = dice
    result = simulate(program, seed=2, trials=20000, cost="body")
    assert result.agrees_with(Fraction(69, 20))


@pytest.mark.slow
def test_dice_agrees_over_a_million_trials(dice):
    program, _ = dice
    result = simulate(program, seed=config.DEFAULT_SEED, trials=10**6, cost="body")
    assert result.agrees_with(Fraction(69, 20))


def test_mood_agrees(mood):
    program = translate(mood, {"P": 1}, "rows")
    result = simulate(program, seed=4, trials=20000, cost="body")
    assert result.agrees_with(Fraction(352, 15))


@pytest.mark.slow
def test_mood_agrees_over_a_million_trials(mood):
    program = translate(mood, {"P": 1}, "rows")
    result = simulate(program, seed=config.DEFAULT_SEED, trials=10**6, cost="body")
    assert result.agrees_with(Fraction(352, 15))


def test_posterior_frequencies(mood):
    program = translate(mood, {"P": 1})
    counts = sample_posterior(program, ["D", "G", "M"], seed=9, trials=20000)
    assert sum(counts.values()) == 20000
    assert abs(Fraction(counts[(0, 0, 0)], 20000) - Fraction(27, 100)) < Fraction(2, 100)


def test_truncation():
    with pytest.raises(AllTrialsTruncated):
        simulate(Diverge(), seed=1, trials=10)
    with pytest.raises(AllTrialsTruncated):
        simulate(While(TRUE, Skip()), seed=1, trials=5, max_steps=100)
    # half of the trials diverge; the rest cost one assignment, one guard and one skip
    sometimes = seq(Assign("x", COIN), If(Atom("x", 0), Diverge(), Skip()))
    result = simulate(sometimes, seed=1, trials=400)
    assert result.truncated > 0
    assert result.trials + result.truncated == 400
    assert result.mean == 3


def test_rejects_bad_input(sprinkler):
    with pytest.raises(InputError):
        simulate(Skip(), trials=0)
    with pytest.raises(InputError):
        simulate(translate(sprinkler, {"G": 0}), trials=10)


def test_instantiated_network_agrees(sprinkler):
    program = translate(instantiate(sprinkler, {"a": Fraction(1, 2)}), {"G": 0})
    result = simulate(program, seed=6, trials=20000, cost="guards")
    assert result.agrees_with(Fraction(1760, 133))


@pytest.mark.slow
@pytest.mark.property_based
@given(st.data())
@settings(max_examples=10, deadline=None, derandomize=True)
def test_random_observed_networks_agree(data):
    net = data.draw(binary_networks(max_nodes=5))
    obs = data.draw(observations(net))
    exact = est(net, obs).est
    assume(exact is not cr.INF and exact <= 200)
    result = simulate(translate(net, obs), seed=data.draw(st.integers(0, 2**32 - 1)), trials=10**6)
    assert result.agrees_with(exact), (exact, result.summary_line())
