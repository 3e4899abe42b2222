"""Shared corpus: small hand-built automata with known behaviour, plus
seeded random generators used by the property suites."""

import numpy as np
import pytest

from prostochastic import ProbabilisticAutomaton, StochasticMatrix


def absorbing_automaton():
    """Two states; the letter leaks half the remaining mass into an
    absorbing final state, so acceptance of a^k is 1 - 2^-k."""
    return ProbabilisticAutomaton(
        states=("s0", "s1"),
        alphabet=("a",),
        transitions={"a": [[0.5, 0.5], [0.0, 1.0]]},
        initial=(1.0, 0.0),
        final=(False, True),
    )


def coin_automaton(x):
    """Three states; one letter resolves a single biased coin flip, so every
    non-empty word is accepted with probability exactly x."""
    return ProbabilisticAutomaton(
        states=("q0", "heads", "tails"),
        alphabet=("a",),
        transitions={"a": [[0.0, x, 1.0 - x], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]},
        initial=(1.0, 0.0, 0.0),
        final=(False, True, False),
    )


def funnel_automaton():
    """Three states; b funnels the start into a coin-flipping state and a
    then drains it into the final sink, so b a^k is accepted with
    probability 1 - 2^-k."""
    return ProbabilisticAutomaton(
        states=("s0", "s1", "s2"),
        alphabet=("a", "b"),
        transitions={
            "a": [[1.0, 0.0, 0.0], [0.0, 0.5, 0.5], [0.0, 0.0, 1.0]],
            "b": [[0.0, 1.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        },
        initial=(1.0, 0.0, 0.0),
        final=(False, False, True),
    )


def permutation_automaton():
    """One swap letter; words of even length are accepted with probability 1."""
    return ProbabilisticAutomaton(
        states=("s0", "s1"),
        alphabet=("a",),
        transitions={"a": [[0.0, 1.0], [1.0, 0.0]]},
        initial=(1.0, 0.0),
        final=(True, False),
    )


def single_state_automaton(accepting=True):
    return ProbabilisticAutomaton(
        states=("s",),
        alphabet=("a",),
        transitions={"a": [[1.0]]},
        initial=(1.0,),
        final=(accepting,),
    )


def random_quarter_automaton(rng, n_states, letters=("a", "b")):
    """Random automaton whose transition entries are multiples of 1/4, with a
    unit initial vector and random final set."""
    transitions = {}
    for letter in letters:
        counts = rng.multinomial(4, np.full(n_states, 1.0 / n_states), size=n_states)
        transitions[letter] = counts / 4.0
    initial = np.zeros(n_states)
    initial[rng.integers(n_states)] = 1.0
    final = [bool(v) for v in rng.random(n_states) < 0.5]
    return ProbabilisticAutomaton(
        [f"s{i}" for i in range(n_states)], letters, transitions, initial, final)


def random_stochastic(rng, dim, density=0.6):
    """Random stochastic matrix with a random support pattern."""
    while True:
        mask = rng.random((dim, dim)) < density
        raw = rng.random((dim, dim)) * mask
        sums = raw.sum(axis=1)
        if np.all(sums > 0.0):
            return StochasticMatrix(raw / sums[:, None])


def brute_force_word_closure(automaton):
    """Independent oracle for the transition monoid: extend words letter by
    letter until no new support appears."""
    from prostochastic import boolean_product, boolean_projection

    generators = [boolean_projection(automaton.transition(a)) for a in automaton.alphabet]
    matrices = set(generators)
    frontier = set(generators)
    while frontier:
        fresh = set()
        for matrix in frontier:
            for generator in generators:
                extended = boolean_product(matrix, generator)
                if extended not in matrices:
                    matrices.add(extended)
                    fresh.add(extended)
        frontier = fresh
    return matrices


def direct_round_sum(p_win, p_lose, rounds):
    """Term-by-term evaluation of the round acceptance probability."""
    return sum((1.0 - (p_win + p_lose)) ** (i - 1) * p_win for i in range(1, rounds))


@pytest.fixture
def absorbing():
    return absorbing_automaton()


@pytest.fixture
def funnel():
    return funnel_automaton()


@pytest.fixture
def permutation():
    return permutation_automaton()


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
