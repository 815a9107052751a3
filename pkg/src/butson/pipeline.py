"""Classification pipeline, catalog files and class annotation.

A catalog is a JSON-lines file.  Matrix entries look like

    {"n": 9, "k": 3, "matrix": "<text format>", "provenance": {...},
     "certificate": "<sha256 of the canonical certificate>",
     "aut_order": 2916, "class_id": 1, "flags": {...}}

and any stage that could not finish leaves a line
``{"incomplete": true, "stage": ..., "reason": ...}``.
"""

from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from .algebra import (
    UnityMatrix,
    circulant,
    fourier,
    from_text,
    hermitian,
    is_butson,
    is_prime,
    kronecker,
    scalar_power_map,
    to_text,
    transpose,
)
from .cocycles import (
    compute_cocycle_space,
    develop,
    group_developed_function,
    orthogonal_cocycles,
)
from .equivalence import (
    REGULAR_BOUND,
    Prepared,
    _decide,
    classify_up_to_equivalence,
    indexing_groups,
)
from .exceptions import ParameterError, ParseError, ResourceLimit
from .groups import FiniteGroup, cyclic, direct_product, groups_of_order, parse_group
from .rds import extension_candidates, rds_search, rds_to_matrix, set_orbit_representatives
from .screens import (
    SearchResults,
    cocyclic_verdict,
    table_parameters,
)

COCYCLE_MAX_N = 12       # auto picks the cocycle method up to here
DEFAULT_MAX_NP = 54      # larger classification runs need --extended
SEARCH_MAX_NP = 81       # existence searches beyond this need --extended
CIRCULANT_MAX_N = 9


@dataclass
class Candidate:
    matrix: UnityMatrix
    provenance: dict


@dataclass
class Catalog:
    entries: list[dict] = field(default_factory=list)
    incomplete: list[dict] = field(default_factory=list)

    @property
    def class_ids(self) -> list[int]:
        return sorted({e["class_id"] for e in self.entries})

    def members(self, cid: int) -> list[dict]:
        return [e for e in self.entries if e["class_id"] == cid]

    def representative(self, cid: int) -> dict:
        return self.members(cid)[0]

    def write(self, path: str | Path):
        lines = [json.dumps(e, sort_keys=True) for e in self.entries]
        lines += [json.dumps(m, sort_keys=True) for m in self.incomplete]
        Path(path).write_text("".join(ln + "\n" for ln in lines))


def entry_matrix(entry: dict) -> UnityMatrix:
    return from_text(entry["matrix"])


def load_catalog(path: str | Path) -> Catalog:
    cat = Catalog()
    for lineno, ln in enumerate(Path(path).read_text().splitlines(), 1):
        if not ln.strip():
            continue
        try:
            obj = json.loads(ln)
        except json.JSONDecodeError as exc:
            raise ParseError(f"bad JSON: {exc.msg}", lineno) from None
        (cat.incomplete if obj.get("incomplete") else cat.entries).append(obj)
    return cat


def certificate_digest(cert: bytes) -> str:
    return hashlib.sha256(cert).hexdigest()


# -- candidate generation ------------------------------------------------------------


def cocycle_candidates(n: int, p: int, incomplete: list[dict]) -> Iterator[Candidate]:
    """Developments of every orthogonal cocycle over every group of order n."""
    for G in groups_of_order(n):
        try:
            found = orthogonal_cocycles(G, p, mode="shift_orbit")
        except ResourceLimit as exc:
            incomplete.append({"incomplete": True, "stage": f"cocycles over {G.name}", "reason": str(exc)})
            continue
        space = compute_cocycle_space(G, p)
        for i, psi in enumerate(found):
            yield Candidate(develop(psi), {
                "kind": "cocycle", "group": G.name, "cocycle_id": i,
                "coboundary": space.is_coboundary(psi)})


def rds_candidates(n: int, p: int, incomplete: list[dict], jobs: int = 1,
                   checkpoint_dir: str | Path | None = None) -> Iterator[Candidate]:
    """Matrices from every RDS in every central extension of order np.

    Extensions are taken up to automorphisms of the quotient, and sets up to
    translations and automorphisms of the extension fixing the forbidden
    subgroup.  These moves preserve the class up to a Galois conjugation.  Each set is read
    off with every generator of the forbidden subgroup, so Galois conjugates
    of the developments are included.
    """
    for G, coords, ext in extension_candidates(n, p, aut_reduce=True):
        ckpt = None
        if checkpoint_dir is not None:
            tag = "".join(map(str, coords)) or "0"
            safe = G.name.replace(":", "_").replace("#", "_").replace("^", "")
            ckpt = Path(checkpoint_dir) / f"rds_{n}_{p}_{safe}_{tag}.json"
        try:
            sets = rds_search(ext, mode="find_all", jobs=jobs, checkpoint=ckpt, pin=True)
        except ResourceLimit as exc:
            incomplete.append({"incomplete": True, "stage": f"rds over {G.name} {coords}", "reason": str(exc)})
            continue
        space = compute_cocycle_space(G, p)
        for i, R in enumerate(set_orbit_representatives(sets)):
            H, psi = rds_to_matrix(R)
            cob = space.is_coboundary(psi)
            for c in range(1, p):
                yield Candidate(scalar_power_map(H, c), {
                    "kind": "rds", "group": G.name, "extension_class": list(coords),
                    "set_id": i, "generator_power": c, "coboundary": cob})


def pick_method(n: int, method: str) -> str:
    if method == "auto":
        return "cocycle" if n <= COCYCLE_MAX_N else "rds"
    if method not in ("cocycle", "rds"):
        raise ParameterError(f"unknown method {method!r}")
    return method


def classify(n: int, p: int, method: str = "auto", extended: bool = False, jobs: int = 1,
             checkpoint_dir: str | Path | None = None) -> Catalog:
    if not is_prime(p) or p == 2:
        raise ParameterError("p must be an odd prime")
    if n % p:
        raise ParameterError(f"{p} does not divide {n}")
    method = pick_method(n, method)
    cat = Catalog()
    if method == "rds" and n * p > DEFAULT_MAX_NP and not extended:
        cat.incomplete.append({"incomplete": True, "stage": "rds",
                               "reason": f"extension order {n * p} > {DEFAULT_MAX_NP}; rerun with --extended"})
        return cat
    if method == "cocycle":
        cands = list(cocycle_candidates(n, p, cat.incomplete))
    else:
        cands = list(rds_candidates(n, p, cat.incomplete, jobs, checkpoint_dir))
    # identical matrices share one preparation
    uniq: dict[UnityMatrix, int] = {}
    order: list[UnityMatrix] = []
    for c in cands:
        if c.matrix not in uniq:
            uniq[c.matrix] = len(order)
            order.append(c.matrix)
    preps = [Prepared(H) for H in order]
    classes = classify_up_to_equivalence(order, preps)
    class_of = {idx: (cid, cl) for cid, cl in enumerate(classes, 1) for idx in cl.members}
    for c in cands:
        idx = uniq[c.matrix]
        cid, cl = class_of[idx]
        cat.entries.append({
            "n": n, "k": p, "matrix": to_text(c.matrix), "provenance": c.provenance,
            "certificate": certificate_digest(preps[idx].certificate),
            "aut_order": cl.aut_order, "class_id": cid, "flags": {}})
    return cat


# -- annotation ------------------------------------------------------------------------


def circulant_solutions(n: int, k: int) -> list[UnityMatrix]:
    """All circulant BH(n, k) whose first entry is 1."""
    out = []
    for tail in itertools.product(range(k), repeat=n - 1):
        C = circulant((0,) + tail, k)
        if is_butson(C):
            out.append(C)
    return out


def _locate(prep: Prepared, reps: dict[int, Prepared]) -> int | None:
    for cid, rp in reps.items():
        if rp.certificate == prep.certificate and _decide(rp, prep).equivalent:
            return cid
    return None


def annotate(cat: Catalog, regular_bound: int = REGULAR_BOUND, circulant_max_n: int = CIRCULANT_MAX_N) -> Catalog:
    if not cat.entries:
        return cat
    n, k = cat.entries[0]["n"], cat.entries[0]["k"]
    reps = {cid: Prepared(entry_matrix(cat.representative(cid))) for cid in cat.class_ids}
    circ_classes = None
    if n <= circulant_max_n:
        circ_classes = set()
        for C in circulant_solutions(n, k):
            cid = _locate(Prepared(C), reps)
            circ_classes.add(cid)
    flags_by_class = {}
    for cid, rp in reps.items():
        members = cat.members(cid)
        prov = [m["provenance"] for m in members]
        gd_over = sorted({q["group"] for q in prov if q.get("coboundary")})
        flags: dict = {
            "group_developed": bool(gd_over),
            "group_developed_over": gd_over,
            "transpose_class_id": _locate(Prepared(transpose(rp.H)), reps),
            "hermitian_pair_id": _locate(Prepared(hermitian(rp.H)), reps),
        }
        flags["self_transpose"] = flags["transpose_class_id"] == cid
        flags["self_hermitian"] = flags["hermitian_pair_id"] == cid
        if n * k <= regular_bound:
            flags["indexing_groups"] = indexing_groups(rp.H, regular_bound)
            flags["indexing_groups_source"] = "centrally regular subgroups"
        else:
            flags["indexing_groups"] = sorted({q["group"] for q in prov})
            flags["indexing_groups_source"] = "provenance"
        if circ_classes is not None:
            flags["circulant"] = cid in circ_classes
            flags["circulant_source"] = "exhaustive search"
        else:
            cyc = f"C{n}"
            flags["circulant"] = any(q["group"] == cyc and q.get("coboundary") for q in prov)
            flags["circulant_source"] = "provenance"
        flags_by_class[cid] = flags
    for e in cat.entries:
        e["flags"] = flags_by_class[e["class_id"]]
    return cat


# -- existence table ---------------------------------------------------------------------


def _kronecker_example(n: int, p: int) -> UnityMatrix | None:
    """A cocyclic BH(n, p) built as a Kronecker product of smaller ones."""
    for n1 in range(p, n // p + 1, p):
        if n % n1 or (n // n1) % p:
            continue
        H1, H2 = _small_example(n1, p), _small_example(n // n1, p)
        if H1 is not None and H2 is not None:
            return kronecker(H1, H2)
    return None


def _small_example(n: int, p: int) -> UnityMatrix | None:
    if n == p:
        return fourier(p)
    if n < 20:
        for G in groups_of_order(n):
            found = orthogonal_cocycles(G, p, mode="shift_orbit")
            if found:
                return develop(found[0])
        return None
    return _kronecker_example(n, p)


def run_searches(n: int, p: int, max_np: int | None = SEARCH_MAX_NP) -> SearchResults:
    """Searches behind the E, S1 and S2 letters.

    Kronecker products of smaller cocyclic matrices are tried first.  When
    p^2 divides n and n < 20 the orthogonal-cocycle search is run over every
    group; otherwise the RDS search runs over all extensions.  Extension orders above
    ``max_np`` are skipped (None lifts the limit), leaving the cell undecided.
    """
    res = SearchResults()
    H = _kronecker_example(n, p)
    if H is not None:
        res.matrix = H
        return res
    if n < 20 and n % (p * p) == 0:
        for G in groups_of_order(n):
            found = orthogonal_cocycles(G, p, mode="shift_orbit")
            if found:
                res.matrix = develop(found[0])
                return res
        res.cocycle_complete_none = True
        return res
    if max_np is not None and n * p > max_np:
        return res
    for G, coords, ext in extension_candidates(n, p, aut_reduce=True):
        sets = rds_search(ext, mode="find_one", pin=True)
        if sets:
            res.matrix = rds_to_matrix(sets[0])[0]
            return res
    res.rds_complete_none = True
    return res


def existence_table(max_np: int = 100, primes=(3, 5, 7), max_n: int | None = None,
                    search: bool = True, search_max_np: int | None = SEARCH_MAX_NP):
    out = {}
    for p, n in table_parameters(max_np, primes):
        if max_n is not None and n > max_n:
            continue
        v = cocyclic_verdict(n, p)
        if v.verdict == "UNKNOWN" and search:
            v = cocyclic_verdict(n, p, run_searches(n, p, search_max_np))
            if v.verdict == "UNKNOWN":
                v.justification.append(("search", "not attempted; rerun with --extended"))
        out[(n, p)] = v
    return out


# -- compositions --------------------------------------------------------------------------


def kronecker_family(a: int, b: int, base: str, p: int = 3) -> tuple[UnityMatrix, str]:
    """Group-developed BH(2^(2a) 3^b, 3) over base^a x C3^(b-a).

    ``base`` is one of C3:C4, A4 (= C2^2:C3) or C2^2xC3; each carries a
    group-developed BH(12, 3), and C3 carries one of order 3.
    """
    if a < 1 or b < a:
        raise ParameterError("need a >= 1 and b >= a")
    G = parse_group(base)
    if G.order != 12:
        raise ParameterError("base group must have order 12")
    h12 = group_developed_function(G, p)
    if h12 is None:
        raise ParameterError(f"no group-developed BH(12,{p}) over {G.name}")
    C = cyclic(p)
    h3 = group_developed_function(C, p)
    pieces = [(G, h12)] * a + [(C, h3)] * (b - a)
    grp, h = pieces[0]
    for Q, hq in pieces[1:]:
        grp = direct_product(grp, Q)
        h = (h[:, None] + hq[None, :]).ravel() % p
    H = UnityMatrix(p, h[grp.table])
    names = [G.name] * a + [C.name] * (b - a)
    return H, "x".join(f"({x})" if ":" in x or "x" in x else x for x in names)


def kronecker_all(matrices: Iterable[UnityMatrix]) -> UnityMatrix:
    it = iter(matrices)
    H = next(it)
    for M in it:
        H = kronecker(H, M)
    return H
