"""Surface models and primitive geodesic length spectra.

Elementary models (cylinder, funnel, horn) carry closed-form data. Convex
co-compact models are Schottky groups given by hyperbolic generators that
satisfy a verified ping-pong condition on the boundary circle R u {inf}:
each generator g owns two closed intervals, around its repelling and
attracting fixed points, and maps the complement of the repelling interval
strictly inside the attracting one. The verified intervals also produce
the enumeration prune: for a cyclically reduced word w = g_1 ... g_n the
multiplier at the attracting fixed point factors as a product of
single-letter derivatives evaluated inside known intervals, so

    l(w) >= sum_j cost(g_j -> g_{j+1. cyclic}),
    cost(a -> b) = -log sup { |a'(x)| : x in I_att(b) },

with the sup evaluated in a chart where all intervals are bounded. The
per-transition costs are the completeness certificate for pruned
enumeration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import ConstructionFailed, IncompleteSpectrum, NonPositiveLength, Unsupported
from .hyperbolic import MobiusMap

LENGTH_GROUP_TOL = 1e-9


# ----------------------------------------------------------------------
# models


@dataclass(frozen=True)
class Cylinder:
    """Hyperbolic cylinder with a single primitive closed geodesic."""

    length: float

    def __post_init__(self):
        if not self.length > 0:
            raise NonPositiveLength(f"cylinder length must be positive, got {self.length}")

    chi = 0
    n_cusps = 0
    n_funnels = 2

    @property
    def funnel_lengths(self):
        return (self.length, self.length)


@dataclass(frozen=True)
class Funnel:
    """Model end: expanding half-cylinder with geodesic boundary of the
    given length. Not a complete surface on its own."""

    length: float

    def __post_init__(self):
        if not self.length > 0:
            raise NonPositiveLength(f"funnel length must be positive, got {self.length}")

    chi = 0
    n_cusps = 0
    n_funnels = 1

    @property
    def funnel_lengths(self):
        return (self.length,)


@dataclass(frozen=True)
class Horn:
    """Parabolic quotient: one cusp, one infinite-area end."""

    chi = 0
    n_cusps = 1
    n_funnels = 0
    funnel_lengths = ()


@dataclass(frozen=True)
class PingPongCertificate:
    cuts: tuple              # boundary cut points of the verified intervals
    margin: float            # smallest containment margin, atan metric
    cost_matrix: tuple       # (2g x 2g) transition costs, -inf = illegal
    c_min: float             # min mean cycle of the cost digraph; > 0 certifies pruning
    potentials: tuple = ()   # Johnson potentials: cost - c_min + h_i - h_j >= 0

    def word_length_cap(self, L_max):
        if self.c_min <= 0:
            return None
        return int(math.floor(L_max / self.c_min)) + 1

    def reduced_costs(self):
        n = len(self.potentials)
        h = self.potentials
        return tuple(tuple(self.cost_matrix[i][j] - self.c_min + h[i] - h[j]
                           if j != (i ^ 1) else -math.inf for j in range(n))
                     for i in range(n))


@dataclass(frozen=True)
class Schottky:
    """Free convex co-compact group with verified interval ping-pong.

    The standard non-interleaved interval arrangement is assumed, which
    gives a planar (g+1)-funnel surface with boundary words
    A_1, ..., A_g, A_1 A_2 ... A_g.
    """

    generators: tuple
    certificate: PingPongCertificate | None = None
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        gens = tuple(self.generators)
        if not gens:
            raise ConstructionFailed("need at least one generator")
        object.__setattr__(self, "generators", gens)

    @property
    def rank(self):
        return len(self.generators)

    @property
    def chi(self):
        return 1 - self.rank

    n_cusps = 0

    @property
    def n_funnels(self):
        return self.rank + 1

    @property
    def funnel_lengths(self):
        from .hyperbolic import translation_length
        lengths = [translation_length(g) for g in self.generators]
        prod = self.generators[0]
        for g in self.generators[1:]:
            prod = prod @ g
        lengths.append(translation_length(prod))
        return tuple(lengths)


@dataclass(frozen=True)
class PrimitiveClass:
    word: tuple        # signed generator indices: +k / -k for generator k / its inverse
    length: float
    trace: float


@dataclass(frozen=True)
class LengthSpectrum:
    entries: tuple            # sorted ((length, multiplicity), ...)
    L_max: float
    complete: bool
    oriented: bool = True
    certificate: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        ent = tuple((float(l), int(m)) for l, m in self.entries)
        for i in range(1, len(ent)):
            if not ent[i][0] > ent[i - 1][0]:
                raise ValueError("lengths must be strictly increasing")
        if any(m < 1 for _, m in ent):
            raise ValueError("multiplicities must be >= 1")
        object.__setattr__(self, "entries", ent)


def counting_function(spectrum: LengthSpectrum, L) -> int:
    """N_X(L): number of primitive classes of length < L."""
    if L > spectrum.L_max:
        raise IncompleteSpectrum(f"spectrum only certified up to L_max = {spectrum.L_max}")
    return sum(m for ell, m in spectrum.entries if ell < L)


# ----------------------------------------------------------------------
# circle arithmetic: R u {inf} parametrized by atan, period pi


def _theta(x):
    if math.isinf(x):
        return math.pi / 2
    return math.atan(x)


def _ccw(a, b):
    """ccw distance from a to b in the atan coordinate, in [0, pi)."""
    return (b - a) % math.pi


def _arc_contains_arc(outer, inner):
    """both arcs (start_theta, end_theta) traversed ccw; margin > 0 means
    inner lies strictly inside outer."""
    c, d = outer
    a, b = inner
    lead = _ccw(c, a)
    inner_len = _ccw(a, b)
    outer_len = _ccw(c, d)
    return min(lead, outer_len - (lead + inner_len))


def _mobius_boundary(mat, x):
    a, b, c, d = mat[0, 0], mat[0, 1], mat[1, 0], mat[1, 1]
    if math.isinf(x):
        return a / c if c != 0 else math.inf
    den = c * x + d
    if den == 0:
        return math.inf
    return (a * x + b) / den


def _check_pingpong(mats, intervals):
    """mats: list of 2g matrices (letters: g_1, g_1^-1, g_2, g_2^-1, ...).
    intervals: per letter, its ATTRACTING interval as an (x_start, x_end)
    ccw pair on the boundary. Returns the minimum containment margin (in
    the atan metric); negative means the ping-pong condition fails."""
    n = len(mats)
    th = [(_theta(a), _theta(b)) for a, b in intervals]
    margin = math.inf
    for i in range(n):
        inv_i = i ^ 1
        rep_start, rep_end = intervals[inv_i]
        # complement of the repelling interval, traversed ccw
        comp = (rep_end, rep_start)
        img = (_mobius_boundary(mats[i], comp[0]), _mobius_boundary(mats[i], comp[1]))
        m = _arc_contains_arc(th[i], (_theta(img[0]), _theta(img[1])))
        margin = min(margin, m)
    return margin


def _deriv_sup(mat, x_lo, x_hi):
    """sup of |g'(x)| = 1/(cx+d)^2 over the bounded interval [x_lo, x_hi];
    the pole -d/c must lie outside."""
    c, d = mat[1, 0], mat[1, 1]
    if c == 0:
        return abs(mat[0, 0] / d)  # affine map, constant derivative
    vals = []
    for x in (x_lo, x_hi):
        den = c * x + d
        if den == 0:
            return math.inf
        vals.append(1.0 / den ** 2)
    pole = -d / c
    if x_lo < pole < x_hi:
        return math.inf
    return max(vals)


def _min_mean_cycle(cost):
    """Karp's minimum mean cycle on the legality digraph (j != i^1).

    Every cyclically reduced word is a closed walk in this digraph, so its
    total transition cost is at least (word length) * (min mean cycle)."""
    n = len(cost)
    big = math.inf
    # d[k][v] = min cost of a k-edge walk ending at v (any start)
    d = [[0.0] * n] + [[big] * n for _ in range(n)]
    for k in range(1, n + 1):
        for v in range(n):
            best = big
            for u in range(n):
                if v == (u ^ 1) or d[k - 1][u] == big:
                    continue
                best = min(best, d[k - 1][u] + cost[u][v])
            d[k][v] = best
    mu = big
    for v in range(n):
        if d[n][v] == big:
            continue
        worst = -big
        for k in range(n):
            if d[k][v] == big:
                continue
            worst = max(worst, (d[n][v] - d[k][v]) / (n - k))
        mu = min(mu, worst)
    return mu


def _johnson_potentials(cost, mu):
    """h with cost(i->j) - mu + h_i - h_j >= 0 (Bellman-Ford on cost - mu)."""
    n = len(cost)
    h = [0.0] * n
    for _ in range(n + 1):
        changed = False
        for i in range(n):
            for j in range(n):
                if j == (i ^ 1):
                    continue
                cand = h[i] + cost[i][j] - mu
                if cand < h[j] - 1e-15:
                    h[j] = cand
                    changed = True
        if not changed:
            break
    # shift so reduced costs are >= 0 within rounding
    return tuple(h)


def _tighten_intervals(mats, intervals, iters=40):
    """Iterate I_g <- g(complement of I_{g^-1}) toward the minimal invariant
    family (sharper intervals give sharper derivative costs), then pad by a
    whisker of the gaps. Falls back to the input if the result fails the
    ping-pong check."""
    cur = [tuple(iv) for iv in intervals]
    for _ in range(iters):
        new = []
        for i, m in enumerate(mats):
            rs, re = cur[i ^ 1]
            new.append((_mobius_boundary(m, re), _mobius_boundary(m, rs)))
        cur = new
    # pad outward by a fraction of the neighbouring gaps
    th = [(_theta(a), _theta(b)) for a, b in cur]
    padded = []
    for i in range(len(cur)):
        s, e = th[i]
        gap_prev = min(_ccw(th[j][1], s) for j in range(len(cur)) if j != i)
        gap_next = min(_ccw(e, th[j][0]) for j in range(len(cur)) if j != i)
        s2 = s - 0.2 * gap_prev
        e2 = e + 0.2 * gap_next
        padded.append((_from_theta(s2), _from_theta(e2)))
    if _check_pingpong(mats, padded) > 0:
        return padded
    return [tuple(iv) for iv in intervals]


def _from_theta(t):
    t = (t + math.pi / 2) % math.pi - math.pi / 2
    if abs(t - math.pi / 2) < 1e-14 or abs(t + math.pi / 2) < 1e-14:
        return math.inf
    return math.tan(t)


def _cost_matrix(mats, intervals, gap_point):
    """Transition costs in the chart z -> -1/(z - gap_point), where every
    interval is bounded. cost[i][j] = -log sup_{I'_att(j)} |g'_i|."""
    T = np.array([[0.0, -1.0], [1.0, -gap_point]])
    Ti = np.array([[-gap_point, 1.0], [-1.0, 0.0]])
    mats_c = [T @ m @ Ti for m in mats]
    ivals_c = []
    for a, b in intervals:
        fa, fb = _mobius_boundary(T, a), _mobius_boundary(T, b)
        if math.isinf(fa) or math.isinf(fb):
            return None
        ivals_c.append((min(fa, fb), max(fa, fb)))
    n = len(mats)
    cost = [[-math.inf] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if j == (i ^ 1):
                continue  # illegal transition in a reduced word
            sup = _deriv_sup(mats_c[i], *ivals_c[j])
            if sup == math.inf or sup <= 0:
                return None
            cost[i][j] = -math.log(sup)
    return cost


# ----------------------------------------------------------------------
# pants construction


def _hyp_with_axis(u, v, ell):
    """Hyperbolic matrix with axis endpoints u < v and translation length
    |ell| (attracting v for ell > 0, u for ell < 0)."""
    lam = math.exp(ell / 2)
    N = np.array([[v, u], [1.0, 1.0]]) / math.sqrt(v - u)
    Ninv = np.array([[1.0, -u], [-1.0, v]]) / math.sqrt(v - u)
    return N @ np.diag([lam, 1 / lam]) @ Ninv


def pants_from_lengths(l1, l2, l3) -> Schottky:
    """Two-generator Schottky model of a hyperbolic pair of pants with
    boundary geodesic lengths (l1, l2, l3).

    Normal form: A = diag(e^{l1/2}, e^{-l1/2}) (axis 0 -- inf), B with axis
    (1/w, w) and translation length l2 oriented toward 1/w; the remaining
    parameter w is fixed by tr(AB) = -2 cosh(l3/2) (the standard negative
    sign for pants). Ping-pong intervals are then searched for and
    verified; failure raises ConstructionFailed.
    """
    for ell in (l1, l2, l3):
        if not ell > 0:
            raise NonPositiveLength(f"boundary lengths must be positive, got {ell}")
    A = np.diag([math.exp(l1 / 2), math.exp(-l1 / 2)])
    target = -2.0 * math.cosh(l3 / 2)

    def f(w):
        return np.trace(A @ _hyp_with_axis(1.0 / w, w, -l2)) - target

    try:
        w = brentq(f, 1.0 + 1e-9, 1e9, xtol=1e-15, rtol=8.9e-16)
    except ValueError as exc:
        raise ConstructionFailed(f"no axis position solves the trace condition: {exc}")
    B = _hyp_with_axis(1.0 / w, w, -l2)

    cert = _find_pants_intervals(A, B, w, l1)
    if cert is None:
        raise ConstructionFailed(
            f"ping-pong interval search failed for pants({l1}, {l2}, {l3})")
    gens = (MobiusMap.from_matrix(A), MobiusMap.from_matrix(B))
    return Schottky(gens, cert, {"model": f"pants:{l1:g},{l2:g},{l3:g}", "w": w})


def _theta_mid(x, y):
    """point whose atan coordinate is midway ccw between x and y."""
    tx, ty = _theta(x), _theta(y)
    tm = tx + _ccw(tx, ty) / 2.0
    tm = (tm + math.pi / 2) % math.pi - math.pi / 2
    return math.inf if abs(tm - math.pi / 2) < 1e-14 else math.tan(tm)


def _find_pants_intervals(A, B, w, l1):
    """Construct the four ping-pong intervals for the pants normal form.

    Letters [A, A^-1, B, B^-1] have attracting fixed points inf, 0, 1/w, w.
    On the positive axis the binding constraint couples the outer cuts:
    with I_att(A^-1) ending at q, I_att(B) starting at b1, I_att(B^-1)
    ending at b4 and I_att(A) starting at p, one needs

        q < b1,   B^-1(b1) <= b4,   b4 < p <= e^{l1} q,

    which is feasible iff B^-1(b1) < e^{l1} b1 for some b1 in (0, 1/w).
    The inner cut pair only needs b2 between B(b3) and b3. The negative
    axis is unconstrained and provides the chart gap for the cost matrix.
    Returns a verified certificate or None.
    """
    Binv = np.linalg.inv(B)
    lam2 = math.exp(l1)
    mats = [A, np.linalg.inv(A), B, Binv]

    # outer pair: maximize the feasibility ratio over b1
    best_ratio, b1 = 0.0, None
    t_lo, t_hi = 0.0, _theta(1.0 / w)
    for t in np.linspace(t_lo + 1e-6, t_hi - 1e-6, 400):
        cand = math.tan(t)
        img = _mobius_boundary(Binv, cand)
        if not img > w:
            continue
        ratio = lam2 * cand / img
        if ratio > best_ratio:
            best_ratio, b1 = ratio, cand
    if b1 is None or best_ratio <= 1.0 + 1e-9:
        return None
    # distribute the feasibility ratio as equal multiplicative slack over
    # the four binding inequalities B^-1(b1) <= b4 < p <= lam2 q, q < b1
    gamma = best_ratio ** 0.25 - 1.0
    b4 = _mobius_boundary(Binv, b1) * (1.0 + gamma)
    p = b4 * (1.0 + gamma)
    q = p * (1.0 + gamma) / lam2

    # inner pair: maximize the gap between B(b3) and b3
    best_gap, b3 = 0.0, None
    for t in np.linspace(_theta(1.0 / w) + 1e-6, _theta(w) - 1e-6, 200):
        cand = math.tan(t)
        if not cand < b4:
            continue
        gap = _ccw(_theta(_mobius_boundary(B, cand)), _theta(cand))
        if gap > best_gap and gap < math.pi / 2:
            best_gap, b3 = gap, cand
    if b3 is None:
        return None
    b2 = _theta_mid(_mobius_boundary(B, b3), b3)

    # negative side: generous room plus a genuine gap for the cost chart
    q_neg = -max(1.0, q)
    p_neg = q_neg * min(2.0, 0.5 + lam2 / 2.0)

    # attracting intervals per letter: A -> [p, p_neg] (through inf),
    # A^-1 -> [q_neg, q], B -> [b1, b2], B^-1 -> [b3, b4]
    intervals = [(p, p_neg), (q_neg, q), (b1, b2), (b3, b4)]
    margin = _check_pingpong(mats, intervals)
    if margin <= 1e-10:
        return None
    intervals = _tighten_intervals(mats, intervals)
    margin = _check_pingpong(mats, intervals)
    if margin <= 0:
        return None
    return _certificate_from_intervals(mats, intervals, margin)


def _certificate_from_intervals(mats, intervals, margin):
    # a chart point inside the widest gap keeps every interval bounded
    th = [(_theta(a), _theta(b)) for a, b in intervals]
    order = sorted(range(len(intervals)), key=lambda i: th[i][0] % math.pi)
    best_gap, gap_point = -1.0, None
    for k in range(len(order)):
        i, j = order[k], order[(k + 1) % len(order)]
        g = _ccw(th[i][1], th[j][0])
        if g > best_gap:
            best_gap = g
            gap_point = _from_theta(th[i][1] + g / 2.0)
    if gap_point is None or math.isinf(gap_point):
        return None
    cost = _cost_matrix(mats, intervals, gap_point)
    if cost is None:
        return None
    mu = _min_mean_cycle(cost)
    h = _johnson_potentials(cost, mu)
    return PingPongCertificate(
        cuts=tuple(x for iv in intervals for x in iv),
        margin=margin,
        cost_matrix=tuple(tuple(r) for r in cost),
        c_min=mu,
        potentials=h,
    )


# ----------------------------------------------------------------------
# enumeration


def _letters(model: Schottky):
    mats = []
    for g in model.generators:
        m = g.matrix()
        mats.append(m)
        mats.append(np.linalg.inv(m))
    return mats


def _min_rotation(word):
    return min(tuple(word[i:] + word[:i]) for i in range(len(word)))


def _is_primitive(word):
    n = len(word)
    for p in range(1, n):
        if n % p == 0 and tuple(word[p:] + word[:p]) == tuple(word):
            return False
    return True


def _signed(letter):
    """letter index 2k / 2k+1 -> signed generator index +(k+1) / -(k+1)."""
    k, inv = divmod(letter, 2)
    return -(k + 1) if inv else (k + 1)


def enumerate_primitive_classes(model, L_max, oriented=True, policy=None) -> LengthSpectrum:
    """Primitive geodesic classes with length <= L_max.

    Cylinder: the single primitive geodesic; both orientations counted
    under the oriented convention (the Euler product runs over conjugacy
    classes of primitive hyperbolic elements, and gamma, gamma^-1 are
    distinct classes). Funnel: its boundary geodesic only, flagged in the
    certificate. Schottky: cyclically reduced word enumeration with the
    derivative-cost prune; complete=True iff the certificate's c_min > 0.
    """
    if not L_max > 0:
        raise NonPositiveLength("L_max must be positive")
    if isinstance(model, Horn):
        raise Unsupported("the horn has no closed geodesics")
    if isinstance(model, Funnel):
        mult = 1
        entries = ((model.length, mult),) if model.length <= L_max else ()
        return LengthSpectrum(entries, L_max, True, oriented,
                              {"note": "funnel model end: boundary geodesic only"})
    if isinstance(model, Cylinder):
        mult = 2 if oriented else 1
        entries = ((model.length, mult),) if model.length <= L_max else ()
        return LengthSpectrum(entries, L_max, True, oriented,
                              {"note": "single primitive geodesic"})
    if not isinstance(model, Schottky):
        raise Unsupported(f"cannot enumerate {type(model).__name__}")
    return _enumerate_schottky(model, L_max, oriented)


def _enumerate_schottky(model, L_max, oriented, word_cap_override=None):
    cert = model.certificate
    if cert is not None and cert.c_min > 0:
        cap = cert.word_length_cap(L_max)
        rcost = cert.reduced_costs()
        mu = cert.c_min
        complete = True
    else:
        cap = word_cap_override or int(math.ceil(L_max / 0.05))
        rcost = None
        mu = 0.0
        complete = False
        if cap > 24:
            raise IncompleteSpectrum(
                "no pruning certificate; use enumerate_schottky_bruteforce "
                "with an explicit word-length cap")
    classes = _schottky_words(model, L_max, cap, rcost, mu)
    if not oriented:
        classes = _quotient_orientation(classes)
    return LengthSpectrum(_group_lengths(classes), L_max, complete, oriented,
                          {
                              "word_length_cap": cap,
                              "c_min": mu,
                              "pruned": rcost is not None,
                              "n_classes": len(classes),
                          })


def _schottky_words(model, L_max, cap, rcost, mu):
    """DFS over cyclically reduced words up to the cap; returns
    PrimitiveClass list.

    With reduced costs rc >= 0 and min mean cycle mu, every completion of
    a depth-j prefix satisfies l(w) >= j*mu + sum of prefix reduced costs
    (potentials telescope around the cycle), so a prefix is pruned as soon
    as that bound exceeds L_max."""
    mats = _letters(model)
    n_letters = len(mats)
    out = []
    word = []
    prods = [np.eye(2)]
    ricost = [0.0]

    def leaf():
        if word[0] == (word[-1] ^ 1):
            return
        tw = tuple(word)
        if _min_rotation(tw) != tw or not _is_primitive(tw):
            return
        M = prods[-1]
        tr = abs(M[0, 0] + M[1, 1])
        if tr <= 2.0:
            return
        ell = 2.0 * math.acosh(tr / 2.0)
        if ell <= L_max + 1e-12:
            out.append(PrimitiveClass(tuple(_signed(l) for l in tw), ell, tr))

    def dfs():
        depth = len(word)
        if depth >= 1:
            leaf()
        if depth == cap:
            return
        for l in range(n_letters):
            if depth and l == (word[-1] ^ 1):
                continue
            step = 0.0
            if rcost is not None and depth:
                step = rcost[word[-1]][l]
                if (depth + 1) * mu + ricost[-1] + step > L_max + 1e-9:
                    continue
            word.append(l)
            prods.append(prods[-1] @ mats[l])
            ricost.append(ricost[-1] + step)
            dfs()
            word.pop()
            prods.pop()
            ricost.pop()

    dfs()
    return out


def schottky_primitive_classes(model: Schottky, L_max):
    """Primitive classes (words, lengths, traces) with length <= L_max,
    using the model's pruning certificate."""
    cert = model.certificate
    if cert is None or cert.c_min <= 0:
        raise IncompleteSpectrum("model carries no usable pruning certificate")
    cap = cert.word_length_cap(L_max)
    return _schottky_words(model, L_max, cap, cert.cost_matrix, cert.c_min)


def enumerate_schottky_bruteforce(model, L_max, max_word_len) -> LengthSpectrum:
    """Unpruned enumeration of every cyclically reduced word up to the
    given word length; completeness is NOT certified. Reference path for
    validating the pruned enumeration."""
    classes = _schottky_words(model, L_max, max_word_len, None, 0.0)
    return LengthSpectrum(_group_lengths(classes), L_max, False, True,
                          {"word_length_cap": max_word_len, "pruned": False,
                           "n_classes": len(classes)})


def _quotient_orientation(classes):
    """Identify each class with its inverse class (unoriented convention)."""
    seen = {}
    for c in classes:
        inv_word = tuple(-l for l in reversed(c.word))
        k1 = _min_rotation(c.word)
        k2 = _min_rotation(inv_word)
        key = min(k1, k2)
        if key not in seen:
            seen[key] = c
    return list(seen.values())


def _group_lengths(classes):
    lengths = sorted(c.length for c in classes)
    entries = []
    for ell in lengths:
        if entries and ell - entries[-1][0] < LENGTH_GROUP_TOL:
            entries[-1][1] += 1
        else:
            entries.append([ell, 1])
    return tuple((l, m) for l, m in entries)
