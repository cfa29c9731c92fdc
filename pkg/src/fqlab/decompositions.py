"""Constructive combinatorial engines: popularity pigeonholing, dyadic energy
slicing, popular-point extraction with an explicit tracked constant chain,
covering by translates (greedy plus exact branch-and-bound for small targets),
and the full shifted-product proof trace with case classification.

Everything here is pure and deterministic; ties always break toward the
smallest canonical encoding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import (
    DegenerateSlice,
    EmptySet,
    EmptySpectrum,
    SumBelowK,
    TraceDegenerate,
    ZeroInSet,
    ZeroShift,
)
from .set_algebra import (
    FqSet,
    RepSpectrum,
    dilate,
    quotient_set,
    representation_spectrum,
    set_op,
    shifted_product,
    translate,
)

EXACT_SEARCH_LIMIT = 12  # subset/cover searches go exhaustive at or below this size


# ---------------------------------------------------------------------------
# popularity pigeonhole
# ---------------------------------------------------------------------------


def _popularity(domain, f, K, M_cap=None):
    """Core of the popularity pigeonhole: keep x with f(x) >= K/(2|domain|).

    Returns (kept elements, threshold, kept mass).  The kept mass is always at
    least K/2, and when f <= M_cap the number of kept elements is at least
    K/(2*M_cap); both guarantees are exact rational facts, asserted here.
    """
    elems = sorted(int(x) for x in domain)
    if any(f[x] <= 0 for x in elems):
        raise ValueError("popularity requires f > 0 on the domain")
    total = sum(f[x] for x in elems)
    if total < K:
        raise SumBelowK(f"sum of f is {total} < K = {K}")
    threshold = Fraction(K, 2 * len(elems))
    kept = [x for x in elems if f[x] >= threshold]
    mass = sum(f[x] for x in kept)
    assert 2 * mass >= K
    if M_cap is not None:
        assert all(f[x] <= M_cap for x in elems)
        assert 2 * M_cap * len(kept) >= K
    return kept, threshold, mass


def popularity_subset(domain: FqSet, f: dict[int, int], K: int,
                      M_cap: int | None = None) -> FqSet:
    """Subset of elements whose f-value reaches K/(2|domain|); keeps at least
    half the total mass.  Threshold comparison is exact rational."""
    kept, _, _ = _popularity(domain, f, K, M_cap)
    return FqSet.from_iterable(domain.spec, kept)


# ---------------------------------------------------------------------------
# dyadic energy slice
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DyadicSlice:
    """Dominant dyadic level of the ratio spectrum between X and Y.

    D holds the popular slopes, every one carrying between N and 2N-1 point
    pairs; P is the set of pairs supported on those slopes.  The certificates
    r(xi) in [N, 2N), multiplicative energy <= (floor(log2 |X|)+1)*4*L*N^2 and
    L*N < |X||Y| hold whenever |X||Y| >= 2 and Y contains a nonzero element:
    the two excluded shapes (a 1x1 instance, and Y = {0} whose pairs all sit
    on the slope-zero line) concentrate the whole first moment on a single
    slope, where nothing can be dropped below it.
    """

    X: FqSet
    Y: FqSet
    D: FqSet
    N: int
    L: int
    M: int
    pairs: np.ndarray  # (k, 2) int64 rows (x, y), lexicographically sorted
    spectrum: RepSpectrum

    @property
    def energy(self) -> int:
        return self.spectrum.energy


def dyadic_energy_slice(X: FqSet, Y: FqSet) -> DyadicSlice:
    """Bucket the ratio counts by powers of two and keep the level with the
    largest squared mass (smallest level on ties).

    A perfectly flat spectrum at a power of two would make L*N equal |X||Y|
    exactly; in that case the largest-encoded slope is dropped, which keeps
    every certificate valid with room to spare.
    """
    if len(Y) > len(X):
        raise ValueError("need |Y| <= |X|")
    spectrum = representation_spectrum(X, Y)
    if not spectrum.counts:
        raise EmptySpectrum("no ratio pairs between X and Y")
    levels: dict[int, int] = {}
    for count in spectrum.counts.values():
        j = count.bit_length() - 1
        levels[j] = levels.get(j, 0) + count * count
    best_j = min(j for j, s in levels.items() if s == max(levels.values()))
    N = 1 << best_j
    slopes = sorted(xi for xi, c in spectrum.counts.items() if N <= c < 2 * N)
    if len(slopes) * N == len(X) * len(Y) and len(slopes) >= 2:
        slopes = slopes[:-1]
    D = FqSet.from_iterable(X.spec, slopes)
    ratio_grid = X.spec.div_arr(Y.members[None, :], X.members[:, None])
    xi_idx, yi_idx = np.nonzero(D.bitmask[ratio_grid])
    pairs = np.column_stack([X.members[xi_idx], Y.members[yi_idx]])
    pairs = pairs[np.lexsort((pairs[:, 1], pairs[:, 0]))]
    L = len(D)
    return DyadicSlice(X=X, Y=Y, D=D, N=N, L=L, M=L * N * N, pairs=pairs,
                       spectrum=spectrum)


def slice_certificates(sl: DyadicSlice) -> dict:
    """The three exact slice certificates, with the numbers behind them."""
    counts = [sl.spectrum.counts[int(xi)] for xi in sl.D.members]
    log_factor = len(sl.X).bit_length() - 1 + 1  # floor(log2 |X|) + 1
    return {
        "level_band": all(sl.N <= c < 2 * sl.N for c in counts),
        "energy": sl.energy,
        "energy_bound": log_factor * 4 * sl.L * sl.N**2,
        "energy_ok": sl.energy <= log_factor * 4 * sl.L * sl.N**2,
        "mass": sl.L * sl.N,
        "mass_bound": len(sl.X) * len(sl.Y),
        "mass_strict": sl.L * sl.N < len(sl.X) * len(sl.Y),
    }


# ---------------------------------------------------------------------------
# popular points
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PopularPoints:
    """Replay of the popular-point extraction over a dyadic slice.

    x0 is the popular abscissa, y0 the popular ordinate; A_x0 holds the
    ordinates over x0 and B_y0 the abscissas under y0.  For every z in A_tilde
    the stored S[z] equals the line of slope z/x0 intersected with B_y0, and
    the thresholds in `constants` reproduce the inequality chain exactly: each
    pigeonhole step keeps half the mass.
    """

    x0: int
    y0: int
    A_x0: FqSet
    B_y0: FqSet
    A_tilde: FqSet
    S: dict[int, FqSet]
    y_popular: FqSet  # popular ordinate rows
    x_popular: FqSet  # popular abscissa columns
    d_popular: FqSet  # popular slopes inside the restricted point set
    constants: dict


# proven composite constants of the pigeonhole chain (each factor is exact)
C_ROWS = Fraction(1, 2)       # |B_y0| >= (1/2) * L*N / |Y|
C_COLS = Fraction(1, 4)       # |A_x0| >= (1/4) * L*N / |X|
C_TILDE = Fraction(1, 16384)  # |A_tilde| >= c * L^2*N^2 / (|X|^2 |Y|)
C_SLICE_SETS = Fraction(1, 8192)  # |S_z| >= c * L^2*N^3 / (|X|^2 |Y|^2)


def popular_points(sl: DyadicSlice) -> PopularPoints:
    if sl.L == 0 or sl.pairs.size == 0:
        raise DegenerateSlice("slice has no popular slopes")
    spec = sl.X.spec
    pairs = [(int(x), int(y)) for x, y in sl.pairs]
    p_size = len(pairs)

    by_y: dict[int, set[int]] = {}
    by_x: dict[int, set[int]] = {}
    for x, y in pairs:
        by_y.setdefault(y, set()).add(x)
        by_x.setdefault(x, set()).add(y)

    # rows: keep ordinates whose line count reaches half the average
    ydom = FqSet.from_iterable(spec, by_y)
    f_rows = {y: len(xs) for y, xs in by_y.items()}
    rows_kept, t_rows, mass_rows = _popularity(ydom, f_rows, p_size)
    y_popular = FqSet.from_iterable(spec, rows_kept)

    # columns: restrict to the kept rows, then pigeonhole abscissas
    f_cols = {x: sum(1 for y in ys if y in y_popular) for x, ys in by_x.items()}
    f_cols = {x: c for x, c in f_cols.items() if c > 0}
    xdom = FqSet.from_iterable(spec, f_cols)
    cols_kept, t_cols, mass_cols = _popularity(xdom, f_cols, mass_rows)
    x_popular = FqSet.from_iterable(spec, cols_kept)

    # slopes: pigeonhole the doubly-restricted point set by its lines
    f_slopes: dict[int, int] = {}
    for x, y in pairs:
        if x in x_popular and y in y_popular:
            xi = spec.div(y, x)
            f_slopes[xi] = f_slopes.get(xi, 0) + 1
    ddom = FqSet.from_iterable(spec, f_slopes)
    mass_dd = sum(f_slopes.values())
    slope_cap = max(f_slopes.values())
    slopes_kept, t_slopes, _ = _popularity(ddom, f_slopes, mass_dd, M_cap=slope_cap)
    d_popular = FqSet.from_iterable(spec, slopes_kept)

    # line/column incidence counts: C[i, j] = |P_(xi_i) ∩ X_(y_j)|
    d_order = [int(xi) for xi in sl.D.members]
    d_index = {xi: i for i, xi in enumerate(d_order)}
    line_x: dict[int, list[int]] = {xi: [] for xi in d_order}
    for x, y in pairs:
        line_x[spec.div(y, x)].append(x)
    lines_mask = np.zeros((len(d_order), spec.q), dtype=bool)
    for xi, xs in line_x.items():
        lines_mask[d_index[xi], xs] = True
    y_order = [int(y) for y in y_popular.members]
    cols_mask = np.zeros((spec.q, len(y_order)), dtype=bool)
    for j, y in enumerate(y_order):
        cols_mask[list(by_y[y]), j] = True
    C = lines_mask.astype(np.int64) @ cols_mask.astype(np.int64)

    # the double sum and its exact maximizing cell, smallest (x0, y0) on ties
    sigma = 0
    best = (-1, None, None)
    for x in (int(v) for v in x_popular.members):
        idxs = [d_index[spec.div(z, x)] for z in sorted(by_x[x])]
        row = C[idxs, :].sum(axis=0)
        sigma += int(row.sum())
        j = int(np.argmax(row))
        if int(row[j]) > best[0]:
            best = (int(row[j]), x, y_order[j])
    inner_max, x0, y0 = best

    A_x0 = FqSet.from_iterable(spec, by_x[x0])
    B_y0 = FqSet.from_iterable(spec, by_y[y0])

    # final pigeonhole: ordinates over x0 whose slice set inside B_y0 is popular
    f_z = {}
    for z in sorted(by_x[x0]):
        size = sum(1 for x in line_x[spec.div(z, x0)] if x in B_y0)
        if size > 0:
            f_z[z] = size
    zdom = FqSet.from_iterable(spec, f_z)
    z_cap = max(f_z.values())
    z_kept, t_z, _ = _popularity(zdom, f_z, inner_max, M_cap=z_cap)
    A_tilde = FqSet.from_iterable(spec, z_kept)
    S = {
        z: FqSet.from_iterable(spec, (x for x in line_x[spec.div(z, x0)] if x in B_y0))
        for z in z_kept
    }

    constants = {
        "p_size": p_size,
        "row_threshold": t_rows,
        "row_domain": len(ydom),
        "row_mass": mass_rows,
        "col_threshold": t_cols,
        "col_domain": len(xdom),
        "col_mass": mass_cols,
        "slope_threshold": t_slopes,
        "slope_domain": len(ddom),
        "slope_cap": slope_cap,
        "slope_mass": mass_dd,
        "d_popular_size": len(d_popular),
        "sigma": sigma,
        "inner_max": inner_max,
        "tilde_threshold": t_z,
        "tilde_domain": len(zdom),
        "tilde_cap": z_cap,
        "pigeonhole_factor": Fraction(1, 2),
        "pigeonhole_steps": 4,
        "c_rows": C_ROWS,
        "c_cols": C_COLS,
        "c_tilde": C_TILDE,
        "c_slice_sets": C_SLICE_SETS,
    }
    return PopularPoints(x0=x0, y0=y0, A_x0=A_x0, B_y0=B_y0, A_tilde=A_tilde, S=S,
                         y_popular=y_popular, x_popular=x_popular, d_popular=d_popular,
                         constants=constants)


def points_certificates(sl: DyadicSlice, pts: PopularPoints) -> dict:
    """Exact inequality chain of the popular-point construction, evaluated with
    the tracked constants (never the constant-free asymptotic forms)."""
    L, N = sl.L, sl.N
    nx, ny = len(sl.X), len(sl.Y)
    c = pts.constants
    sigma_floor = (c["d_popular_size"] * c["slope_threshold"] ** 2 * c["col_threshold"])
    checks = {
        "p_mass": c["p_size"] >= L * N,
        "rows_kept_mass": 2 * c["row_mass"] >= c["p_size"],
        "cols_kept_mass": 2 * c["col_mass"] >= c["row_mass"],
        "b_y0_size": len(pts.B_y0) >= C_ROWS * Fraction(L * N, ny),
        "a_x0_size": len(pts.A_x0) >= C_COLS * Fraction(L * N, nx),
        "sigma_floor": Fraction(c["sigma"]) >= sigma_floor,
        "inner_max_avg": (Fraction(c["inner_max"])
                          >= Fraction(c["sigma"], len(pts.x_popular) * len(pts.y_popular))),
        "a_tilde_size": len(pts.A_tilde) >= C_TILDE * Fraction(L**2 * N**2, nx**2 * ny),
        "slice_sets_size": all(
            len(s) >= C_SLICE_SETS * Fraction(L**2 * N**3, nx**2 * ny**2)
            for s in pts.S.values()
        ),
        "slopes_in_band": all(int(z) in sl.D for z in
                              sl.X.spec.div_arr(pts.A_x0.members, np.int64(pts.x0))),
        "factor_product_ok": (c["pigeonhole_factor"] ** c["pigeonhole_steps"]
                              >= Fraction(1, 2) ** c["pigeonhole_steps"]),
    }
    checks["all"] = all(v for k, v in checks.items() if isinstance(v, bool))
    return checks


# ---------------------------------------------------------------------------
# covering by translates
# ---------------------------------------------------------------------------


def _greedy_cover(target: FqSet, shifted_tile: np.ndarray):
    spec = target.spec
    candidates = np.unique(spec.sub_arr(target.members[:, None], shifted_tile[None, :]).ravel())
    hits = spec.add_arr(candidates[:, None], shifted_tile[None, :])
    uncovered = target.bitmask.copy()
    shifts = []
    while uncovered.any():
        gains = uncovered[hits].sum(axis=1)
        best = int(np.argmax(gains))  # first maximum = smallest shift
        assert gains[best] > 0
        shifts.append(int(candidates[best]))
        uncovered[hits[best]] = False
    return len(shifts), shifts


def _exact_cover(target: FqSet, shifted_tile: np.ndarray):
    """Branch-and-bound minimum cover; only used for |target| <= EXACT_SEARCH_LIMIT."""
    spec = target.spec
    n = len(target)
    bit_of = {int(v): i for i, v in enumerate(target.members)}
    full = (1 << n) - 1
    candidates = np.unique(spec.sub_arr(target.members[:, None], shifted_tile[None, :]).ravel())
    hits = spec.add_arr(candidates[:, None], shifted_tile[None, :])
    mask_of: dict[int, int] = {}
    for t, row in zip(candidates, hits):
        mask = 0
        for v in row:
            i = bit_of.get(int(v))
            if i is not None:
                mask |= 1 << i
        if mask and mask not in mask_of:
            mask_of[mask] = int(t)  # first (= smallest) shift wins
    masks = sorted(mask_of)
    covers_elem = [[m for m in masks if (m >> i) & 1] for i in range(n)]

    best_count, best_shifts = _greedy_cover(target, shifted_tile)

    def dfs(covered: int, chosen: list[int]):
        nonlocal best_count, best_shifts
        if covered == full:
            if len(chosen) < best_count:
                best_count = len(chosen)
                best_shifts = [mask_of[m] for m in chosen]
            return
        if len(chosen) + 1 >= best_count:
            remaining = full & ~covered
            max_gain = max((bin(m & remaining).count("1") for m in masks), default=0)
            if max_gain == 0 or len(chosen) + math.ceil(
                    bin(remaining).count("1") / max_gain) >= best_count:
                return
        remaining = full & ~covered
        elem = min((i for i in range(n) if (remaining >> i) & 1),
                   key=lambda i: len(covers_elem[i]))
        options = sorted(covers_elem[elem],
                         key=lambda m: -bin(m & remaining).count("1"))
        for m in options:
            if len(chosen) + 1 >= best_count:
                break
            chosen.append(m)
            dfs(covered | m, chosen)
            chosen.pop()

    dfs(0, [])
    return best_count, best_shifts


def covering_number(target: FqSet, tile: FqSet, sign: int | str = +1,
                    mode: str = "auto"):
    """Fewest translates t + sign*tile covering target: greedy with the
    smallest-shift tie-break, or the exact minimum (branch and bound) when
    |target| <= 12.  Returns (count, shifts)."""
    if len(tile) == 0:
        raise EmptySet("covering tile must be nonempty")
    if isinstance(sign, str):
        sign = {"+": 1, "-": -1}[sign]
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if len(target) == 0:
        return 0, []
    spec = target.spec
    shifted_tile = tile.members if sign == 1 else np.sort(spec.neg_arr(tile.members))
    if mode == "greedy":
        return _greedy_cover(target, shifted_tile)
    if mode == "exact" or (mode == "auto" and len(target) <= EXACT_SEARCH_LIMIT):
        return _exact_cover(target, shifted_tile)
    return _greedy_cover(target, shifted_tile)


# ---------------------------------------------------------------------------
# proof trace
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TraceParams:
    epsilon: Fraction = Fraction(1, 4)  # proportion dropped by the refinement stage
    kappa: int = 1  # implied-constant slack for the structural comparisons
    measure_covers: bool = True


@dataclass(frozen=True)
class ProofTrace:
    """All intermediates of the shifted-product growth pipeline on one input.

    a_prime and a_dprime are the two refinement stages (kept distinct from the
    input; nothing is renamed back).  The slice and points are built over
    X = a_dprime + alpha and Y = a_dprime, and `case` is the branch of the
    growth argument the input lands in, with re-verifiable witnesses and the
    exact certificates checked along that branch.
    """

    field: str
    input_set: tuple[int, ...]
    alpha: int
    a_prime: tuple[int, ...]
    a_dprime: tuple[int, ...]
    removed_minus_alpha: bool
    diff_ratio: Fraction
    iterated_ratio: Fraction
    gamma: Fraction
    slice: DyadicSlice
    points: PopularPoints
    case: str
    witnesses: dict
    certificates: dict

    def to_json(self) -> dict:
        return {
            "field": self.field,
            "input": list(self.input_set),
            "alpha": self.alpha,
            "a_prime": list(self.a_prime),
            "a_dprime": list(self.a_dprime),
            "removed_minus_alpha": self.removed_minus_alpha,
            "diff_ratio": _frac(self.diff_ratio),
            "iterated_ratio": _frac(self.iterated_ratio),
            "gamma": _frac(self.gamma),
            "slice": {
                "D": [int(v) for v in self.slice.D.members],
                "N": self.slice.N,
                "L": self.slice.L,
                "M": self.slice.M,
                "pair_count": int(self.slice.pairs.shape[0]),
            },
            "points": {
                "x0": self.points.x0,
                "y0": self.points.y0,
                "A_x0": [int(v) for v in self.points.A_x0.members],
                "B_y0": [int(v) for v in self.points.B_y0.members],
                "A_tilde": [int(v) for v in self.points.A_tilde.members],
                "S": {str(z): [int(v) for v in s.members] for z, s in self.points.S.items()},
            },
            "case": self.case,
            "witnesses": _jsonable(self.witnesses),
            "certificates": _jsonable(self.certificates),
        }


def _frac(fr: Fraction) -> str:
    return f"{fr.numerator}/{fr.denominator}"


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return _frac(obj)
    if isinstance(obj, FqSet):
        return [int(v) for v in obj.members]
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def _first_ratio_quadruple(S: FqSet, r: int):
    """Lexicographically first (a, b, c, d) in S^4 with (a-b)/(c-d) = r (r != 0)."""
    spec = S.spec
    first_cd: dict[int, tuple[int, int]] = {}
    for c in S:
        for d in S:
            if c == d:
                continue
            delta = spec.sub(c, d)
            if delta not in first_cd:
                first_cd[delta] = (c, d)
    for a in S:
        for b in S:
            if a == b:
                continue
            need = spec.div(spec.sub(a, b), r)
            if need in first_cd:
                c, d = first_cd[need]
                return a, b, c, d
    return None


def run_proof_trace(A: FqSet, alpha: int, params: TraceParams = TraceParams()) -> ProofTrace:
    """Run the whole growth pipeline on (A, alpha) and classify the branch.

    Requires alpha != 0, 0 not in A and |A| >= 4; the derived popular sets must
    carry at least two elements each for the quotient-set machinery, otherwise
    the input is rejected as degenerate.  Structural comparisons in the case-4
    family are evaluated against the original input set.
    """
    from .lemma_oracles import basic_shift_subset, refined_plunnecke_subset

    spec = A.spec
    if alpha % spec.q == 0:
        raise ZeroShift("alpha must be nonzero")
    if 0 in A:
        raise ZeroInSet("translate or dilate the input away from 0 first")
    if len(A) < 4:
        raise TraceDegenerate("need |A| >= 4")

    shift_report = basic_shift_subset(A, alpha=alpha)
    A1 = FqSet.from_iterable(spec, shift_report.witness["subset"])
    neg_A1 = FqSet.from_iterable(spec, spec.neg_arr(A1.members))
    refine_report = refined_plunnecke_subset(A1, [neg_A1, neg_A1, neg_A1], params.epsilon)
    A2 = FqSet.from_iterable(spec, refine_report.witness["subset"])

    minus_alpha = spec.neg(alpha % spec.q)
    removed = minus_alpha in A2
    if removed:
        A2 = A2.without([minus_alpha])
    if len(A2) < 2:
        raise TraceDegenerate("refined subset too small after removing -alpha")

    shifted = shifted_product(A2, alpha)
    diff2 = set_op(A2, A2, "diff")
    diff4 = set_op(set_op(diff2, A2, "diff"), A2, "diff")  # A - A - A - A
    n2 = len(A2)
    diff_ratio = Fraction(len(diff2) * n2**7, len(shifted) ** 8)
    iterated_ratio = Fraction(len(diff4) * n2**23, len(shifted) ** 24)

    X = translate(A2, alpha)
    Y = A2
    sl = dyadic_energy_slice(X, Y)
    pts = popular_points(sl)
    gamma = Fraction(n2**2 * len(shifted) ** 4, sl.M**2)

    if len(pts.A_tilde) < 2 or len(pts.B_y0) < 2:
        raise TraceDegenerate("popular sets too small for quotient machinery")

    ratio_set = set_op(A2, A2, "ratio")
    certificates = {
        "slice": slice_certificates(sl),
        "points_chain": points_certificates(sl, pts),
        "ratio_to_shift": {
            "lhs": len(ratio_set) * n2,
            "rhs": len(shifted) ** 2,
            "ok": len(ratio_set) * n2 <= len(shifted) ** 2,
        },
        "shift_stage_ratio": shift_report.value,
        "refine_stage_ratio": refine_report.value,
    }

    case, witnesses, case_certs = _classify(A, A2, alpha, sl, pts, params)
    certificates.update(case_certs)

    if params.measure_covers:
        certificates["covers"] = _measure_covers(A2, alpha, sl, pts, gamma, case, witnesses)

    return ProofTrace(
        field=spec.descriptor,
        input_set=tuple(int(v) for v in A.members),
        alpha=int(alpha),
        a_prime=tuple(int(v) for v in A1.members),
        a_dprime=tuple(int(v) for v in A2.members),
        removed_minus_alpha=removed,
        diff_ratio=diff_ratio,
        iterated_ratio=iterated_ratio,
        gamma=gamma,
        slice=sl,
        points=pts,
        case=case,
        witnesses=witnesses,
        certificates=certificates,
    )


def _classify(A_input: FqSet, A2: FqSet, alpha: int, sl: DyadicSlice,
              pts: PopularPoints, params: TraceParams):
    from .finite_field import proper_subfields
    from .set_algebra import _coset_intersection_sizes

    spec = A_input.spec
    kappa = params.kappa
    At, B = pts.A_tilde, pts.B_y0
    R_A = quotient_set(At)
    R_B = quotient_set(B)

    # case 1: the two quotient sets differ
    extra_a = np.setdiff1d(R_A.members, R_B.members)
    extra_b = np.setdiff1d(R_B.members, R_A.members)
    if extra_a.size:
        r = int(extra_a[0])
        quad = _first_ratio_quadruple(At, r)
        eq = len(set_op(B, dilate(B, r), "diff")) == len(B) ** 2
        return "1.1", {"r": r, "quadruple": quad, "side": "A_tilde"}, {
            "rbcard_equality": {"set": "B_y0", "r": r, "ok": eq}}
    if extra_b.size:
        r = int(extra_b[0])
        quad = _first_ratio_quadruple(B, r)
        eq = len(set_op(At, dilate(At, r), "diff")) == len(At) ** 2
        return "1.2", {"r": r, "quadruple": quad, "side": "B_y0"}, {
            "rbcard_equality": {"set": "A_tilde", "r": r, "ok": eq}}

    # case 2: 1 + R not contained in R
    shifted_ratios = spec.add_arr(R_A.members, np.int64(1))
    bad = ~R_A.bitmask[shifted_ratios]
    if bad.any():
        rho = int(R_A.members[bad][0])
        r = spec.add(1, rho)
        quad = _first_ratio_quadruple(At, rho)
        a = quad[0]
        S_a = pts.S.get(a)
        cert = {"rho": rho, "r": r}
        if S_a is not None and len(S_a):
            cert["rbcard_equality"] = {
                "set": "B_y0 - r*S_a", "r": r,
                "ok": len(set_op(B, dilate(S_a, r), "diff")) == len(B) * len(S_a)}
        return "2", {"rho": rho, "r": r, "quadruple": quad}, {"case2": cert}

    # case 3: (A_tilde / x0) * R not contained in R
    scaled = spec.div_arr(At.members, np.int64(pts.x0))
    grid = spec.mul_arr(scaled[:, None], R_A.members[None, :])
    viol = ~R_A.bitmask[grid]
    if viol.any():
        i, j = map(int, np.argwhere(viol)[0])
        a = int(At.members[i])
        rho = int(R_A.members[j])
        r = spec.mul(spec.div(a, pts.x0), rho)
        quad = _first_ratio_quadruple(At, rho) if rho != 0 else None
        witness = {"a": a, "rho": rho, "r": r, "quadruple": quad}
        cert = {"case3": {"r": r, "not_in_quotient": r not in R_A}}
        return "3", witness, cert

    # case 4: R(A_tilde) is the subfield generated by A_tilde / x0
    if len(R_A) == spec.q:
        if len(At) ** 2 > spec.q:
            return "4.1", {"quotient": "full field", "a_tilde_size": len(At)}, {
                "case4": {"full_field": True, "above_sqrt_q": True}}
        return "4.2", {"quotient": "full field", "a_tilde_size": len(At)}, {
            "case4": {"full_field": True, "above_sqrt_q": False}}
    match = [G for G in proper_subfields(spec)
             if G.size == len(R_A) and R_A == G.elements]
    assert match, "closure held but the quotient set is not a subfield (bug)"
    G0 = match[0]
    reps, sizes = _coset_intersection_sizes(A_input, G0)
    max_size = int(sizes.max()) if len(sizes) else 0
    sqrt_ok = max_size**2 <= kappa**2 * G0.size
    if sqrt_ok:
        return "4.2", {"subfield_degree": G0.d, "max_coset_intersection": max_size}, {
            "case4": {"full_field": False, "sqrt_condition": True, "kappa": kappa}}
    inter = len(A_input.intersect(dilate(G0.elements, pts.x0)))
    cond = inter**26 <= kappa**26 * len(A_input) ** 25
    return "4.3", {"subfield_degree": G0.d, "x0_coset_intersection": inter}, {
        "case4": {"full_field": False, "sqrt_condition": False,
                  "exponent_condition": cond, "kappa": kappa}}


def _measure_covers(A2: FqSet, alpha: int, sl: DyadicSlice, pts: PopularPoints,
                    gamma: Fraction, case: str, witnesses: dict):
    """Measured covering counts for the translate families the active branch
    uses; the asymptotic covering bound carries an unknown constant, so counts
    and curves are reported side by side, never asserted."""
    spec = A2.spec
    shifted = shifted_product(A2, alpha)
    s4 = len(shifted) ** 4
    n2 = len(A2)
    L, N, M = sl.L, sl.N, sl.M
    tile_x = dilate(A2, pts.x0)
    tile_y = dilate(A2, pts.y0)
    out = []

    def measure(role, target, tile, sign, curve):
        if len(target) == 0:
            return
        count, _ = covering_number(target, tile, sign)
        out.append({"role": role, "target_size": len(target), "sign": sign,
                    "count": count, "curve": curve,
                    "ratio": float(count / curve) if curve else None})

    if case == "1.1":
        a, b, c, d = witnesses["quadruple"]
        curve = Fraction(s4, L * N**3)
        for w in (a, b, c):
            measure(f"w={w}*B_y0", dilate(pts.B_y0, w), tile_x, +1, curve)
        measure(f"w={d}*B_y0", dilate(pts.B_y0, d), tile_x, -1, curve)
    elif case in ("1.2", "4.1", "4.2"):
        sample = [int(v) for v in pts.B_y0.members[:4]]
        for i, w in enumerate(sample):
            sign = -1 if i == len(sample) - 1 else +1
            measure(f"w={w}*A_tilde", dilate(pts.A_tilde, w), tile_y, sign, gamma)
    elif case == "2":
        _, b, c, d = witnesses["quadruple"]
        a = witnesses["quadruple"][0]
        curve_b = Fraction(s4, L * N**3)
        measure(f"w={c}*B_y0", dilate(pts.B_y0, c), tile_x, +1, curve_b)
        measure(f"w={d}*B_y0", dilate(pts.B_y0, d), tile_x, +1, curve_b)
        S_a = pts.S.get(a)
        if S_a is not None and len(S_a):
            measure(f"w={b}*S_a", dilate(S_a, b), tile_x, -1,
                    Fraction(n2**3 * s4, L * M * N**3))
    elif case == "3":
        quad = witnesses.get("quadruple")
        if quad:
            b, c, d, e = quad
            S_d = pts.S.get(d)
            if S_d is not None and len(S_d):
                measure(f"w={e}*S_d", dilate(S_d, e), tile_x, +1,
                        Fraction(n2**3 * s4, L * M * N**3))
            line = FqSet.from_iterable(
                spec, (x for x, y in ((int(px), int(py)) for px, py in sl.pairs)
                       if spec.div(y, x) == spec.div(c, pts.x0)))
            if len(line):
                measure(f"w={b}*P_line", dilate(line, b), tile_x, -1,
                        Fraction(s4, n2 * N**3))
    return out
