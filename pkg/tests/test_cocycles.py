import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from butson.algebra import UnityMatrix, is_butson, kronecker
from butson.cocycles import (
    Cocycle,
    carry_matrix,
    coboundary,
    cocycle_from_text,
    cocycle_to_text,
    compute_cocycle_space,
    develop,
    fourier_cocycle,
    group_developed_function,
    has_orthogonal_cocycle,
    inflation_cocycles,
    inflation_representatives,
    is_orthogonal,
    kronecker_cocycle,
    orthogonal_cocycles,
    shift,
    shift_orbit,
    shift_orbits,
    zero_cocycle,
)
from butson.exceptions import ParameterError, ParseError, ResourceLimit, ValidationError
from butson.groups import abelian_invariants, cyclic, groups_of_order, parse_group


def abelian_dims(invariants, p):
    """(dim Z, dim B, dim H) for an abelian group via the universal coefficient theorem."""
    n = int(np.prod(invariants))
    d = sum(1 for m in invariants if m % p == 0)
    dim_h = d + d * (d - 1) // 2
    dim_b = n - 1 - d
    return dim_b + dim_h, dim_b, dim_h


@pytest.mark.parametrize("spec", ["C3", "C9", "C3^2", "C12", "C2^2xC3", "C3^3", "C3xC9", "C6"])
def test_space_dimensions_abelian(spec):
    G = parse_group(spec)
    space = compute_cocycle_space(G, 3)
    assert (space.dim_z, space.dim_b, space.dim_h) == abelian_dims(abelian_invariants(G), 3)


@pytest.mark.parametrize("spec,dim_h", [("A4", 1), ("C3:C4", 0), ("D6", 0), ("S3", 0)])
def test_space_dimensions_nonabelian(spec, dim_h):
    space = compute_cocycle_space(parse_group(spec), 3)
    assert space.dim_h == dim_h


def test_brute_force_cocycles_of_c3():
    G = cyclic(3)
    found = []
    for vals in itertools.product(range(3), repeat=4):
        t = np.zeros((3, 3), dtype=int)
        t[1:, 1:] = np.array(vals).reshape(2, 2)
        try:
            found.append(Cocycle(G, 3, t))
        except ValidationError:
            pass
    space = compute_cocycle_space(G, 3)
    assert len(found) == 3 ** space.dim_z
    assert all(space.contains(c.table) for c in found)
    ortho = sorted(c.key() for c in found if is_butson(develop(c)))
    assert ortho == [c.key() for c in orthogonal_cocycles(G, 3)]


def test_coboundary_and_classes():
    G = parse_group("C3^2")
    space = compute_cocycle_space(G, 3)
    rng = np.random.default_rng(1)
    for _ in range(10):
        phi = rng.integers(0, 3, 9)
        phi[0] = 0
        psi = coboundary(G, 3, phi)
        assert space.is_coboundary(psi)
    reps = space.cohomology_reps
    assert len(reps) == 27
    assert len({space.class_of(r) for r in reps}) == 27


def test_fourier_cocycle():
    psi = fourier_cocycle(3)
    assert develop(psi).rows() == [(0, 0, 0), (0, 1, 2), (0, 2, 1)]
    assert is_orthogonal(psi)
    assert compute_cocycle_space(psi.group, 3).is_coboundary(psi)


def test_is_orthogonal_needs_divisibility():
    with pytest.raises(ParameterError):
        is_orthogonal(zero_cocycle(cyclic(4), 3))


@pytest.mark.parametrize("spec", ["C9", "C3^2", "C3:C4", "A4"])
def test_orthogonal_means_butson(spec):
    G = parse_group(spec)
    found = orthogonal_cocycles(G, 3, mode="shift_orbit")
    assert found
    for psi in found[:20]:
        assert is_orthogonal(psi) and is_butson(develop(psi))


@pytest.mark.parametrize("spec", ["C9", "C3^2", "C12", "C3:C4", "A4", "D6", "C2^2xC3", "S3", "C6"])
def test_modes_agree(spec):
    G = parse_group(spec)
    a = [c.key() for c in orthogonal_cocycles(G, 3, mode="exhaustive")]
    b = [c.key() for c in orthogonal_cocycles(G, 3, mode="shift_orbit")]
    assert a == b


def test_exhaustive_budget():
    with pytest.raises(ResourceLimit):
        orthogonal_cocycles(parse_group("C3^3"), 3, mode="exhaustive", budget=10)


def test_unknown_mode():
    with pytest.raises(ParameterError):
        orthogonal_cocycles(cyclic(3), 3, mode="fast")


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(["C9", "C3^2", "A4", "C3:C4"]))
def test_shift_is_a_right_action_within_the_class(seed, spec):
    G = parse_group(spec)
    space = compute_cocycle_space(G, 3)
    rng = np.random.default_rng(seed)
    psi = space.combination(rng.integers(0, 3, space.dim_z))
    g, h = (int(x) for x in rng.integers(0, G.order, 2))
    assert shift(psi, 0) == psi
    assert shift(shift(psi, g), h) == shift(psi, G.mul[g][h])
    assert space.class_of(shift(psi, g)) == space.class_of(psi)
    assert is_orthogonal(shift(psi, g)) == is_orthogonal(psi)


def test_orthogonal_sets_are_shift_closed():
    G = parse_group("C3:C4")
    found = orthogonal_cocycles(G, 3, mode="shift_orbit")
    orbits = shift_orbits(found)
    assert sum(len(o) for o in orbits) == len(found)
    assert all(len(shift_orbit(o[0])) == len(o) for o in orbits)
    with pytest.raises(ValidationError):
        shift_orbits(found[:1] + [zero_cocycle(G, 3)])


def test_kronecker_cocycle_develops_to_kronecker():
    a = fourier_cocycle(3)
    b = Cocycle(cyclic(3), 3, carry_matrix(3))
    k = kronecker_cocycle(a, b)
    assert develop(k) == kronecker(develop(a), develop(b))


def test_kronecker_coboundary_iff_both():
    cob = fourier_cocycle(3)
    carry = Cocycle(cyclic(3), 3, carry_matrix(3))
    for x, y, expect in [(cob, cob, True), (cob, carry, False), (carry, cob, False), (carry, carry, False)]:
        k = kronecker_cocycle(x, y)
        assert compute_cocycle_space(k.group, 3).is_coboundary(k) == expect


def test_inflation_cocycles():
    carry = carry_matrix(3)
    assert carry[0].tolist() == [0, 0, 0]
    assert carry.tolist() == [[0, 0, 0], [0, 0, 1], [0, 1, 1]]
    for spec, count in [("C9", 1), ("C3^2", 2), ("A4", 1), ("D6", 0)]:
        G = parse_group(spec)
        infl = inflation_cocycles(G, 3)
        assert len(infl) == count
        space = compute_cocycle_space(G, 3)
        assert all(not space.is_coboundary(c) for c in infl)
        assert len(inflation_representatives(G, 3)) == count


@pytest.mark.parametrize("spec", ["C3:C4", "A4", "C2^2xC3", "C9", "C3"])
def test_group_developed_function(spec):
    G = parse_group(spec)
    h = group_developed_function(G, 3)
    assert is_butson(UnityMatrix(3, h[G.table]))


def test_group_developed_function_absent():
    assert group_developed_function(parse_group("D6"), 3) is None
    assert not has_orthogonal_cocycle(parse_group("C12"), 3)
    assert has_orthogonal_cocycle(parse_group("C9"), 3)


def test_text_round_trip():
    G = parse_group("C3:C4")
    psi = orthogonal_cocycles(G, 3, mode="shift_orbit")[5]
    back = cocycle_from_text(cocycle_to_text(psi, "C3:C4"))
    assert np.array_equal(back.table, psi.table)


def test_text_errors():
    with pytest.raises(ParseError) as exc:
        cocycle_from_text("grp C3\n3 3\n0 0 0\n0 0 0\n0 0 0\n")
    assert exc.value.lineno == 1
    with pytest.raises(ParseError) as exc:
        cocycle_from_text("group C3\n3 3\n0 0 0\n0 1 0\n0 0 0\n")
    assert exc.value.lineno == 2
    with pytest.raises(ParseError):
        cocycle_from_text("group C9\n3 3\n0 0 0\n0 0 0\n0 0 0\n")


@pytest.mark.parametrize("n", [6, 15])
def test_no_orthogonal_cocycles_small(n):
    for G in groups_of_order(n):
        assert orthogonal_cocycles(G, 3, mode="shift_orbit") == []
