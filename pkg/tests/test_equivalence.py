import itertools
from collections import deque

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from butson.algebra import (
    Monomial,
    UnityMatrix,
    apply_monomials,
    circulant,
    fourier,
    hermitian,
    is_butson,
    kronecker,
    random_scramble,
    transpose,
)
from butson.equivalence import (
    Prepared,
    are_equivalent,
    associated_design,
    automorphism_group_order,
    canonical_certificate,
    classify_up_to_equivalence,
    commutes_with_shift,
    design_graph,
    expanded_design,
    find_centrally_regular_subgroups,
    graph_automorphisms,
    indexing_groups,
    shift_permutation,
    theta_inverse,
    theta_pair,
)
from butson.exceptions import ParameterError, ResourceLimit, ValidationError
from butson.permgroup import mul


# -- brute-force oracle -----------------------------------------------------------------


def all_butson(n, k):
    out = []
    for flat in itertools.product(range(k), repeat=n * n):
        H = UnityMatrix(k, np.array(flat).reshape(n, n))
        if is_butson(H):
            out.append(H)
    return out


def monomial_generators(n, k):
    gens = []
    ident = Monomial.identity(n, k)
    for i in range(n - 1):
        perm = list(range(n))
        perm[i], perm[i + 1] = perm[i + 1], perm[i]
        gens.append(Monomial(tuple(perm), (0,) * n, k))
    gens.append(Monomial(tuple(range(n)), (1,) + (0,) * (n - 1), k))
    return [(g, ident) for g in gens] + [(ident, g) for g in gens]


def brute_classes(mats, n, k):
    """Orbits of the monomial pair group, by breadth-first search."""
    gens = monomial_generators(n, k)
    index = {H: i for i, H in enumerate(mats)}
    label = [-1] * len(mats)
    sizes = []
    for start in range(len(mats)):
        if label[start] >= 0:
            continue
        c = len(sizes)
        label[start] = c
        queue = deque([mats[start]])
        size = 1
        while queue:
            H = queue.popleft()
            for M, N in gens:
                K = apply_monomials(H, M, N)
                j = index[K]
                if label[j] < 0:
                    label[j] = c
                    size += 1
                    queue.append(K)
        sizes.append(size)
    return label, sizes


def monomial_group_order(n, k):
    f = 1
    for i in range(2, n + 1):
        f *= i
    return f * k ** n


@pytest.mark.parametrize("n,k", [(2, 2), (3, 3), (4, 2), (2, 4), (2, 6)])
def test_brute_force_classification(n, k):
    mats = all_butson(n, k)
    label, sizes = brute_classes(mats, n, k)
    classes = classify_up_to_equivalence(mats)
    assert len(classes) == len(sizes)
    ours = [0] * len(mats)
    for c, cl in enumerate(classes):
        for i in cl.members:
            ours[i] = c
    # same partition
    pairs = {(a, b) for a, b in zip(label, ours)}
    assert len(pairs) == len(sizes)
    # orbit-stabilizer gives the automorphism group order independently
    for cl in classes:
        orbit = sizes[label[cl.representative]]
        assert cl.aut_order * orbit == monomial_group_order(n, k) ** 2


def test_known_automorphism_orders(f3, h2, f3f3):
    assert automorphism_group_order(f3) == 54
    assert automorphism_group_order(h2) == 2916
    assert automorphism_group_order(hermitian(h2)) == 2916
    assert automorphism_group_order(f3f3) == 11664


def test_order_two_hadamard_automorphisms():
    # |Mon(2,2)|^2 / |orbit| with all 16 BH(2,2) forming one orbit
    assert automorphism_group_order(fourier(2)) == 8


def test_bh9_three_classes(f3f3, h2):
    mats = [f3f3, h2, hermitian(h2)]
    classes = classify_up_to_equivalence(mats)
    assert len(classes) == 3
    assert not are_equivalent(h2, hermitian(h2))
    assert not are_equivalent(h2, f3f3)


def test_all_circulant_bh33_equivalent_to_fourier(f3):
    for row in itertools.product(range(3), repeat=3):
        C = circulant(row, 3)
        if is_butson(C):
            res = are_equivalent(C, f3)
            assert res and res.witness.apply(f3) == C


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(["f3", "h2", "h3", "f3f3"]))
def test_scrambles_are_equivalent(seed, which):
    base = {"f3": fourier(3), "h2": circulant((0, 0, 0, 0, 1, 2, 0, 2, 1), 3)}
    base["h3"] = hermitian(base["h2"])
    base["f3f3"] = kronecker(base["f3"], base["f3"])
    H = base[which]
    rng = np.random.default_rng(seed)
    S, _, _ = random_scramble(H, rng)
    T, _, _ = random_scramble(H, rng)
    res = are_equivalent(S, T)
    assert res.equivalent
    assert res.witness.apply(T) == S
    assert canonical_certificate(S) == canonical_certificate(T)


def test_mismatched_sizes():
    with pytest.raises(ParameterError):
        are_equivalent(fourier(3), fourier(2))


def test_expanded_and_associated_design(f3):
    E = expanded_design(f3)
    assert E.grid.shape == (9, 9)
    A = associated_design(f3)
    # every row and column of the associated design has n ones
    assert (A.incidence.sum(axis=0) == 3).all() and (A.incidence.sum(axis=1) == 3).all()
    g = design_graph(f3)
    assert g.n == 18


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_theta_is_a_homomorphism(seed):
    rng = np.random.default_rng(seed)
    n, k = 4, 3
    M1, N1, M2, N2 = (Monomial.random(n, k, rng) for _ in range(4))
    a = theta_pair(M1 @ M2, N1 @ N2)
    b = mul(theta_pair(M1, N1), theta_pair(M2, N2))
    assert a == b
    assert commutes_with_shift(a, n, k)
    assert theta_inverse(a, n, k) == (M1 @ M2, N1 @ N2)


def test_shift_is_scalar_pair():
    n, k = 3, 3
    w = shift_permutation(n, k)
    s = Monomial.scalar(n, k, 1)
    assert theta_pair(s, s) == w


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_theta_carries_design_onto_scrambled_design(seed, ):
    rng = np.random.default_rng(seed)
    H = circulant((0, 0, 0, 0, 1, 2, 0, 2, 1), 3)
    M, N = Monomial.random(9, 3, rng), Monomial.random(9, 3, rng)
    K = apply_monomials(H, M, N)
    g = theta_pair(M, N)
    A, B = associated_design(H).incidence, associated_design(K).incidence
    m = 27
    for x in range(m):
        for y in range(m):
            assert A[x, y] == B[g[x], g[m + y] - m]


def test_theta_inverse_rejects():
    g = list(range(18))
    g[0], g[1] = g[1], g[0]
    g[3], g[4] = g[4], g[3]
    with pytest.raises(ValidationError):
        theta_inverse(tuple(g), 3, 3)


def test_monomial_group_commutes_with_shift(h2):
    pr = Prepared(h2)
    U = pr.monomial_group
    for g in U.generators:
        assert commutes_with_shift(g, 9, 3)
        M, N = theta_inverse(g, 9, 3)
        assert apply_monomials(h2, M, N) == h2
    assert graph_automorphisms(h2).order % U.order == 0


def _some_bh63():
    rows = [r for r in itertools.product(range(3), repeat=6)
            if r[0] == 0 and all(r.count(v) == 2 for v in range(3))]

    def orth(a, b):
        d = [(x - y) % 3 for x, y in zip(a, b)]
        return all(d.count(v) == 2 for v in range(3))

    def rec(chosen):
        if len(chosen) == 6:
            return chosen
        for r in rows:
            if (not chosen[1:] or r > chosen[-1]) and all(orth(r, c) for c in chosen):
                out = rec(chosen + [r])
                if out:
                    return out
        return None

    return UnityMatrix(3, np.array(rec([(0,) * 6])))


def test_non_cocyclic_bh63_has_no_regular_subgroup():
    H = _some_bh63()
    assert is_butson(H)
    assert find_centrally_regular_subgroups(H) == []


def test_indexing_groups(f3, h2):
    assert indexing_groups(f3) == ["C3"]
    assert indexing_groups(h2) == ["C9"]
    assert indexing_groups(hermitian(h2)) == ["C9"]
    assert indexing_groups(transpose(h2)) == ["C9"]


@pytest.mark.slow
def test_indexing_groups_kronecker(f3f3):
    assert indexing_groups(f3f3) == ["C3^2"]


def test_regular_subgroups_are_regular(h2):
    for elems, name, Q in find_centrally_regular_subgroups(h2):
        assert len(elems) == 27
        images = {g[0] for g in elems}
        assert len(images) == 27
        assert Q.order == 9


def test_regular_subgroup_bound(f3f3):
    with pytest.raises(ResourceLimit):
        find_centrally_regular_subgroups(kronecker(f3f3, fourier(3)))
