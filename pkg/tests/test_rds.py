import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from butson.algebra import UnityMatrix, is_butson, scalar_power_map
from butson.cocycles import compute_cocycle_space, group_developed_function, is_orthogonal, orthogonal_cocycles
from butson.equivalence import are_equivalent
from butson.exceptions import ParameterError, ValidationError
from butson.groups import (
    abelianization_map,
    build_extension,
    central_subgroups_of_order_p,
    extension_from_subgroup,
    group_isomorphic,
    groups_of_order,
    parse_group,
)
from butson.rds import (
    RelativeDifferenceSet,
    canonical_translate,
    canonical_transversal,
    class_orbit_reps,
    extension_candidates,
    rds_search,
    rds_to_matrix,
    section_of,
    set_orbit_representatives,
    translate,
    verify_rds,
)


def brute_rds(ext):
    """All transversals through the identity with balanced quotients, by enumeration."""
    E = ext.total
    n, p = ext.base.order, ext.p
    cosets = [[x for x in range(E.order) if ext.projection[x] == g] for g in range(n)]
    cosets[ext.projection[0]] = [0]
    forbidden = set(ext.iota)
    out = []
    for pick in itertools.product(*cosets):
        counts = [0] * E.order
        for a in pick:
            for b in pick:
                if a != b:
                    counts[E.mul[a][E.inv[b]]] += 1
        if all(counts[x] == (0 if x in forbidden else n // p) for x in range(E.order)):
            out.append(tuple(sorted(pick)))
    return sorted(out)


def order27_extensions():
    for E in groups_of_order(27):
        for sub in central_subgroups_of_order_p(E, 3):
            yield E.name, extension_from_subgroup(E, sub)


@pytest.mark.parametrize("spec", ["C3^2", "C9"])
def test_search_matches_brute_force_order9(spec):
    E = parse_group(spec)
    for sub in central_subgroups_of_order_p(E, 3):
        ext = extension_from_subgroup(E, sub)
        found = [R.elements for R in rds_search(ext)]
        assert found == brute_rds(ext)


def test_search_matches_brute_force_order27():
    for name, ext in order27_extensions():
        found = [R.elements for R in rds_search(ext)]
        assert found == brute_rds(ext), name


def test_elementary_abelian_count():
    E = parse_group("C3^3")
    sub = central_subgroups_of_order_p(E, 3)[0]
    sets = rds_search(E, 3, sub)
    assert len(sets) == 162
    assert all(verify_rds(R) for R in sets)
    assert len(rds_search(E, 3, sub, mode="find_one")) == 1


def test_parameter_checks():
    E = parse_group("C3^3")
    with pytest.raises(ParameterError):
        rds_search(E)
    with pytest.raises(ParameterError):
        rds_search(E, 5, central_subgroups_of_order_p(E, 3)[0])
    with pytest.raises(ParameterError):
        rds_search(E, 3, central_subgroups_of_order_p(E, 3)[0], mode="any")


def test_verify_rejects():
    E = parse_group("C3^3")
    ext = extension_from_subgroup(E, central_subgroups_of_order_p(E, 3)[0])
    R = rds_search(ext, mode="find_one")[0]
    bad = RelativeDifferenceSet(ext, R.elements[:-1] + (ext.iota[1],))
    assert not verify_rds(bad)
    with pytest.raises(ValidationError):
        rds_to_matrix(bad)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_translates_are_rds(seed):
    E = parse_group("C3^3")
    ext = extension_from_subgroup(E, central_subgroups_of_order_p(E, 3)[0])
    sets = rds_search(ext)
    rng = np.random.default_rng(seed)
    R = sets[int(rng.integers(len(sets)))]
    T = translate(R, int(rng.integers(E.order)))
    assert verify_rds(T)
    assert T.elements in {S.elements for S in sets}


def test_canonical_transversal_iff_orthogonal():
    G = parse_group("C3^2")
    for psi in orthogonal_cocycles(G, 3)[:10]:
        assert verify_rds(canonical_transversal(build_extension(G, 3, psi.table)))
    zero = np.zeros((9, 9), dtype=int)
    assert not verify_rds(canonical_transversal(build_extension(G, 3, zero)))


@pytest.mark.parametrize("spec", ["C9", "C3^2"])
def test_round_trip_order9(spec):
    G = parse_group(spec)
    found = orthogonal_cocycles(G, 3)
    assert found
    for psi in found:
        ext = build_extension(G, 3, psi.table)
        R = canonical_transversal(ext)
        assert verify_rds(R)
        H, back = rds_to_matrix(R)
        assert np.array_equal(back.table, psi.table)
        assert is_butson(H)


def test_rds_matrices_are_butson():
    for G, coords, ext in extension_candidates(9, 3):
        for R in rds_search(ext):
            H, psi = rds_to_matrix(R)
            assert is_butson(H) and is_orthogonal(psi)
            tau = section_of(R)
            assert tau[0] == 0 and np.array_equal(ext.cocycle_of_section(tau), psi.table)


def test_extension_candidates_cover_all_classes():
    names = sorted({G.name for G, _, _ in extension_candidates(9, 3)})
    assert names == ["C3^2", "C9"]
    full = list(extension_candidates(9, 3, scalar_reduce=False))
    reduced = list(extension_candidates(9, 3))
    # C9 has a 1-dim and C3^2 a 3-dim second cohomology group over C3
    assert len(full) == 3 + 27
    assert len(reduced) == 2 + 14


def test_checkpoint_resume(tmp_path):
    E = parse_group("C3^3")
    ext = extension_from_subgroup(E, central_subgroups_of_order_p(E, 3)[0])
    plain = [R.elements for R in rds_search(ext)]
    ck = tmp_path / "ck.json"
    first = [R.elements for R in rds_search(ext, checkpoint=ck)]
    assert first == plain
    data = json.loads(ck.read_text())
    keys = sorted(data["done"])
    # drop half of the finished subtrees, as if the run had been interrupted
    data["done"] = {k: data["done"][k] for k in keys[: len(keys) // 2]}
    ck.write_text(json.dumps(data))
    resumed = [R.elements for R in rds_search(ext, checkpoint=ck)]
    assert resumed == plain
    assert len(json.loads(ck.read_text())["done"]) == len(keys)


def test_parallel_matches_serial():
    E = parse_group("C3^3")
    ext = extension_from_subgroup(E, central_subgroups_of_order_p(E, 3)[0])
    assert [R.elements for R in rds_search(ext, jobs=2)] == [R.elements for R in rds_search(ext)]


# the nonabelian group of order 21 as pairs y^a x^b, index 3a + b, with x y x^-1 = y^2
BH21_ROW = (0, 0, 0, 0, 0, 2, 0, 2, 1, 0, 1, 2, 1, 0, 1, 1, 1, 2, 0, 2, 0)


def _frobenius21_mul(u, v):
    a, b = divmod(u, 3)
    c, d = divmod(v, 3)
    return 3 * ((a + c * 2 ** b) % 7) + (b + d) % 3


def test_group_developed_bh21_exists():
    table = np.array([[_frobenius21_mul(u, v) for v in range(21)] for u in range(21)])
    assert all(table[table[u, v], w] == table[u, table[v, w]]
               for u in range(21) for v in range(21) for w in range(21))
    H = UnityMatrix(3, np.array(BH21_ROW)[table])
    assert is_butson(H)
    Z = H.to_complex()
    assert np.allclose(Z @ Z.conj().T, 21 * np.eye(21), atol=1e-9)


def test_group_developed_bh21_found_by_search():
    G = {g.name: g for g in groups_of_order(21)}["C7:C3"]
    h = group_developed_function(G, 3)
    assert h is not None and is_butson(UnityMatrix(3, h[G.table]))
    # so the trivial extension carries an RDS(21,3,21,7)
    ext = build_extension(G, 3, np.zeros((21, 21), dtype=int))
    R = RelativeDifferenceSet(ext, tuple(sorted(x * 3 + int(-h[x]) % 3 for x in range(21))))
    assert verify_rds(R)


def test_translates_give_equivalent_matrices():
    E = parse_group("C3^3")
    ext = extension_from_subgroup(E, central_subgroups_of_order_p(E, 3)[0])
    rng = np.random.default_rng(5)
    sets = rds_search(ext)
    for R in (sets[int(i)] for i in rng.integers(0, len(sets), 4)):
        H = rds_to_matrix(R)[0]
        for d in rng.integers(0, E.order, 3):
            assert are_equivalent(rds_to_matrix(translate(R, int(d)))[0], H).equivalent
        C = canonical_translate(R)
        assert verify_rds(C) and 0 in C.elements


def test_aut_reduction_keeps_one_class_per_orbit():
    space = compute_cocycle_space(parse_group("C3^2"), 3)
    reps = class_orbit_reps(space)
    # 27 classes fall into 4 orbits under GL(2,3) and scalars
    assert len(reps) == 4 and reps[0] == (0, 0, 0)
    totals = [build_extension(space.group, 3, space.combination(c, space.complement).table).total for c in reps]
    # C3^3, C9xC3, the Heisenberg group and C9:C3, each once
    assert not any(group_isomorphic(a, b) for a, b in itertools.combinations(totals, 2))
    names = {G.name for G, _, _ in extension_candidates(9, 3, aut_reduce=True)}
    assert names == {"C9", "C3^2"}


def test_signature_pruning_keeps_every_set():
    for name, ext in order27_extensions():
        assert [R.elements for R in rds_search(ext, prune=False)] == [R.elements for R in rds_search(ext)], name


def test_pinning_keeps_every_cocycle():
    for name, ext in order27_extensions():
        sets = rds_search(ext)
        full = {rds_to_matrix(R)[1].key() for R in sets}
        pinned = rds_search(ext, pin=True)
        assert {rds_to_matrix(R)[1].key() for R in pinned} == full, name
        # the central automorphisms act freely, one orbit per cocycle
        rank = len(abelianization_map(ext.base, 3).generators)
        assert len(pinned) == len(full) and len(sets) == len(pinned) * 3 ** rank, name


def test_orbit_representatives_cover_every_set():
    for name, ext in order27_extensions():
        sets = rds_search(ext, pin=True)
        reps = set_orbit_representatives(sets)
        assert bool(reps) == bool(sets) and len(reps) <= len(sets)
        mats = [scalar_power_map(rds_to_matrix(R)[0], c) for R in reps for c in (1, 2)]
        for R in sets:
            H = rds_to_matrix(R)[0]
            assert any(are_equivalent(H, M).equivalent for M in mats), name
