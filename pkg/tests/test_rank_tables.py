import itertools

import pytest

from trank.errors import Uncovered
from trank.rank_tables import (EXACT, UPPER_BOUND_ONLY, TypicalRankResult, hurwitz_decompose, rho,
                               typical_ranks)

WORKED = [
    ((2, 3, 4), (4,), EXACT),
    ((2, 4, 4), (4, 5), EXACT),
    ((3, 4, 9), (9,), EXACT),
    ((3, 4, 8), (8, 9), EXACT),
    ((3, 3, 6), (6,), EXACT),
    ((3, 4, 7), (7, 8), EXACT),
    ((3, 3, 5), (5, 6), EXACT),
    ((4, 5, 14), (14, 15), UPPER_BOUND_ONLY),
    ((1, 5, 3), (3,), EXACT),
]


def brute_rho(n):
    found = [(a, b, c) for a in range(n) for b in range(4) for c in range(n.bit_length())
             if (2 * a + 1) * 2 ** (b + 4 * c) == n]
    assert len(found) == 1
    _, b, c = found[0]
    return 2 ** b + 8 * c


def test_hurwitz_examples():
    assert hurwitz_decompose(1).to_dict() == {"n": 1, "a": 0, "b": 0, "c": 0, "rho": 1}
    assert (hurwitz_decompose(16).a, hurwitz_decompose(16).b, hurwitz_decompose(16).c) == (0, 0, 1)
    assert rho(16) == 9
    d = hurwitz_decompose(12)
    assert (d.a, d.b, d.c, d.rho) == (1, 2, 0, 4)
    with pytest.raises(ValueError):
        hurwitz_decompose(0)


def test_rho_against_search():
    for n in range(1, 129):
        assert rho(n) == brute_rho(n)


@pytest.mark.parametrize("dims,ranks,exactness", WORKED)
def test_worked_examples(dims, ranks, exactness):
    r = typical_ranks(*dims)
    assert r.ranks == ranks and r.exactness == exactness
    assert r.citation and r.regime


def test_uncovered():
    with pytest.raises(Uncovered) as e:
        typical_ranks(5, 7, 20)
    assert e.value.dims == (5, 7, 20)


def test_permutation_invariance_and_structure():
    for dims in itertools.product(range(1, 9), repeat=3):
        try:
            base = typical_ranks(*dims)
        except Uncovered:
            for perm in itertools.permutations(dims):
                with pytest.raises(Uncovered):
                    typical_ranks(*perm)
            continue
        assert list(base.ranks) == list(range(base.ranks[0], base.ranks[-1] + 1))
        assert len(base.ranks) in (1, 2)
        for perm in itertools.permutations(dims):
            assert typical_ranks(*perm).ranks == base.ranks


def test_two_ranks_iff_m_le_rho():
    for n in range(3, 17):
        for m in range(3, n + 1):
            r = typical_ranks(m, n, (m - 1) * n)
            assert (len(r.ranks) == 2) == (m <= rho(n))


def test_upper_bound_only_placement():
    for n in range(3, 13):
        for m in range(3, n + 1):
            for p in range((m - 1) * n - 1, m * n + 2):
                r = typical_ranks(m, n, p)
                if r.exactness == UPPER_BOUND_ONLY:
                    assert p == (m - 1) * n - 1 and m > rho(n)
                    assert not (m % 4 == 3 and n % 4 == 3)


def test_roundtrip():
    r = typical_ranks(4, 3, 7)
    assert TypicalRankResult.from_dict(r.to_dict()) == r
    assert r.sorted_dims == (3, 4, 7) and r.dims == (4, 3, 7)
