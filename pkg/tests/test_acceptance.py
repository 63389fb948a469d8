"""Acceptance criteria, one test each.

Every test reports a single PASS/FAIL line through the ``criterion`` fixture;
the lines are printed together in the terminal summary.  Randomness is seeded.
"""

import itertools
import math
import random
from fractions import Fraction as Fr

from circorder.automorphisms import (
    PartialIso,
    extend_partial_iso,
    ping_pong_free_probe,
    ping_pong_pair,
    rotation,
    thompson_extend,
)
from circorder.core import Cycle, check_axioms, cut_at, from_linear, is_corder_preserving
from circorder.flow import (
    FinSuppMeasure,
    SplitPoint,
    act_on_split,
    compatible_linear_orders,
    distinguishing_pair,
    fiber,
    minimality_probe,
    occupied_cells,
    phi,
    push_measure,
    shrink_set,
)
from circorder.profinite import (
    CoherentFamily,
    act_on_limit,
    bonding,
    double_cosets,
    limit_triple,
    pattern_of,
    quotient,
)
from circorder.rational import QuadraticIrrational
from circorder.tower import (
    K_CIRCLE,
    CirclePointK,
    alpha,
    coerce,
    floor,
    is_finite,
    mod1,
    pl_extend_k,
    sign,
)

from oracles import (
    all_circular_orders,
    brute_axioms,
    brute_double_coset_types,
    configuration_type,
    grid,
    three_clause,
)

G24 = grid(24)


def random_cycle(rng, pts, m):
    chosen = sorted(rng.sample(pts, m))
    k = rng.randrange(m)
    return chosen[k:] + chosen[:k]


def random_element(rng, n=48, max_size=5):
    m = rng.randint(1, max_size)
    return extend_partial_iso(PartialIso(random_cycle(rng, grid(n), m), random_cycle(rng, grid(n), m)))


# -- 1 ----------------------------------------------------------------------------------


def mutate(rng, rel, n):
    rel = set(rel)
    for _ in range(rng.randint(1, 3)):
        t = tuple(rng.sample(range(n), 3))
        if rng.random() < 0.5 and rel:
            rel.discard(rng.choice(sorted(rel)))
        else:
            rel.add(t)
    return rel


def test_axioms_and_cut_round_trip(criterion):
    rng = random.Random(1)
    disagreements = orders = round_trips = bad_trips = 0
    for n in range(1, 8):
        for order, rel in all_circular_orders(list(range(n))):
            R = from_linear(order)
            orders += 1
            if not (check_axioms(R.ground, R.triples).ok and brute_axioms(R.ground, rel)):
                disagreements += 1
            for z in R.ground:
                round_trips += 1
                bad_trips += from_linear(cut_at(R, z).order) != R
    candidates = 10_000
    for i in range(candidates):
        n = rng.randint(3, 6)
        if i % 2:
            rel = {t for t in itertools.permutations(range(n), 3) if rng.random() < 0.3}
        else:
            order = list(range(n))
            rng.shuffle(order)
            rel = mutate(rng, three_clause(order), n) if i % 4 else three_clause(order)
        disagreements += check_axioms(range(n), rel).ok != brute_axioms(range(n), rel)
    ok = disagreements == 0 and bad_trips == 0
    criterion(
        1,
        "axioms and cut round trip",
        ok,
        f"{orders} orders (n<=7) + {candidates} random relations, {disagreements} disagreements; "
        f"{round_trips} cuts, {bad_trips} round-trip failures",
    )
    assert ok


# -- 2 ----------------------------------------------------------------------------------


def extension_ok(src, dst, probes, thompson=False):
    g = thompson_extend(list(zip(src, dst))) if thompson else extend_partial_iso(PartialIso(src, dst))
    if any(g(a) != b for a, b in zip(src, dst)):
        return False
    if thompson:
        powers = all(s.numerator & (s.numerator - 1) == 0 and s.denominator & (s.denominator - 1) == 0 for s in g.slopes())
        dyadic = all(x.denominator & (x.denominator - 1) == 0 for x in g.breakpoints())
        if not (powers and dyadic):
            return False
    return bool(is_corder_preserving(g, probes | set(g.breakpoints())))


def normalized_cycles(pts, m):
    """Cycles of length m starting at 0 (every cycle is a rotation of one)."""
    for rest in itertools.combinations(pts[1:], m - 1):
        yield (pts[0],) + rest


def test_ultrahomogeneity(criterion):
    rng = random.Random(2)
    probes = set(G24)
    checked = failures = 0
    # m = 1: every pair on the grid
    for a, b in itertools.product(G24, repeat=2):
        checked += 1
        failures += not extension_ok([a], [b], probes)
    # m = 2, 3: every pair with both cycles starting at 0
    for m in (2, 3):
        for src in normalized_cycles(G24, m):
            for dst in normalized_cycles(G24, m):
                checked += 1
                failures += not extension_ok(src, dst, probes)
    sampled = 0
    for m in (2, 3, 4, 5):
        for _ in range(800):
            sampled += 1
            failures += not extension_ok(random_cycle(rng, G24, m), random_cycle(rng, G24, m), probes)
    # the reduction to cycles at 0: the extension commutes with grid rotations
    equivariance_failures = 0
    for _ in range(300):
        m = rng.randint(1, 5)
        src, dst = random_cycle(rng, G24, m), random_cycle(rng, G24, m)
        g = extend_partial_iso(PartialIso(src, dst))
        g0 = extend_partial_iso(PartialIso([(x - src[0]) % 1 for x in src], [(y - dst[0]) % 1 for y in dst]))
        equivariance_failures += g != rotation(dst[0]) * g0 * rotation(-src[0])
    d16, d32 = grid(16), grid(32)
    thompson_checked = 0
    for m in (1, 2, 3):
        for src in normalized_cycles(d16, m):
            for dst in normalized_cycles(d16, m):
                thompson_checked += 1
                failures += not extension_ok(src, dst, set(d16), thompson=True)
    for m in (1, 2, 3, 4, 5):
        for _ in range(150):
            thompson_checked += 1
            failures += not extension_ok(random_cycle(rng, d32, m), random_cycle(rng, d32, m), set(d32), thompson=True)
    ok = failures == 0 and equivariance_failures == 0
    criterion(
        2,
        "ultrahomogeneity",
        ok,
        f"{checked} pairs exhaustive (all m=1, m=2,3 up to grid rotation), {sampled} sampled pairs m<=5, "
        f"{thompson_checked} Thompson pairs; {failures} failures, {equivariance_failures} rotation-equivariance failures",
    )
    assert ok


# -- 3 ----------------------------------------------------------------------------------


def test_quotient_laws(criterion):
    n = len(G24)
    # chains are taken up to grid rotation: every chain rotates to one whose F1 contains 0
    tops = [(0,) + rest for k in range(5) for rest in itertools.combinations(range(1, n), k)]
    info = {}
    size_errors = order_errors = 0
    for S in tops:
        q = quotient(Cycle([G24[i] for i in S]))
        proj = tuple(q.index(q.project(x)) for x in G24)
        info[S] = (q, proj)
        size_errors += len(q) != 2 * len(S)
        # starting from the point cell {0}, cell indices along the grid never decrease
        # and each point of F lands on its own point cell
        monotone = proj[0] == 0 and all(u <= v for u, v in zip(proj, proj[1:]))
        order_errors += not (monotone and all(proj[i] == 2 * j for j, i in enumerate(S)))
    rng = random.Random(3)
    library_checked = 0
    for S in rng.sample(tops, 300):
        q, _ = info[S]
        library_checked += 1
        order_errors += not is_corder_preserving(q.project, G24, codomain=q)

    tables = {}
    law_errors = 0
    for B in tops:
        qB, projB = info[B]
        for k in range(len(B)):
            for rest in itertools.combinations(B[1:], k):
                A = (0,) + rest
                qA, projA = info[A]
                f = bonding(qA.cycle, qB.cycle)
                t = tuple(qA.index(f(c)) for c in qB.cells)
                tables[A, B] = t
                law_errors += any(t[projB[x]] != projA[x] for x in range(n))
    chains = cocycle_errors = 0
    for C in tops:
        cells = range(2 * len(C))
        for B in (((0,) + r) for k in range(len(C)) for r in itertools.combinations(C[1:], k)):
            for A in (((0,) + r) for k in range(len(B)) for r in itertools.combinations(B[1:], k)):
                chains += 1
                ab, bc, ac = tables[A, B], tables[B, C], tables[A, C]
                cocycle_errors += any(ab[bc[i]] != ac[i] for i in cells)
    # spot check of the rotation reduction
    rotation_errors = 0
    for _ in range(200):
        S = rng.choice(tops)
        s = G24[rng.randrange(n)]
        F, Fs = Cycle([G24[i] for i in S]), Cycle([(G24[i] + s) % 1 for i in S])
        q, qs = quotient(F), quotient(Fs)
        rotation_errors += any(qs.index(qs.project((x + s) % 1)) != q.index(q.project(x)) for x in G24)
    violations = size_errors + order_errors + law_errors + cocycle_errors + rotation_errors
    ok = violations == 0
    criterion(
        3,
        "quotient laws",
        ok,
        f"{len(tops)} cycles, {len(tables)} bonding maps, {chains} chains F1<=F2<=F3 (|F3|<=5, up to rotation); "
        f"{violations} violations (size {size_errors}, order {order_errors}, compatibility {law_errors}, "
        f"cocycle {cocycle_errors}, rotation {rotation_errors})",
    )
    assert ok


# -- 4 ----------------------------------------------------------------------------------


def random_chain(rng, depth):
    top = rng.sample(G24, rng.randint(depth, 5))
    sizes = sorted(rng.sample(range(1, len(top) + 1), depth - 1)) + [len(top)]
    sizes = sorted(set(sizes))
    return [Cycle(sorted(top[:k])) for k in sizes]


def test_limit_circular_order(criterion):
    rng = random.Random(4)
    chains = axiom_failures = 0
    for _ in range(150):
        chain = random_chain(rng, rng.randint(1, 3))
        fams = [CoherentFamily(chain, CoherentFamily.from_top(chain, c).cells) for c in quotient(chain[-1]).cells]
        ids = range(len(fams))
        rel = {t for t in itertools.permutations(ids, 3) if limit_triple(*(fams[i] for i in t))}
        chains += 1
        axiom_failures += not brute_axioms(ids, rel)
    pairs = action_failures = 0
    for _ in range(1000):
        chain = random_chain(rng, rng.randint(1, 3))
        while len(chain[-1]) < 2:
            chain = random_chain(rng, rng.randint(1, 3))
        cells = rng.sample(quotient(chain[-1]).cells, 3)
        a, b, c = (CoherentFamily.from_top(chain, x) for x in cells)
        g = random_element(rng)
        ga, gb, gc = (act_on_limit(g, x) for x in (a, b, c))
        # the image families are coherent over the image chain
        CoherentFamily(ga.chain, ga.cells)
        pairs += 1
        action_failures += limit_triple(a, b, c) != limit_triple(ga, gb, gc)
    ok = axiom_failures == 0 and action_failures == 0
    criterion(
        4,
        "limit circular order",
        ok,
        f"{chains} chains of depth<=3 (all families), {axiom_failures} axiom failures; "
        f"{pairs} (g, triple) pairs, {action_failures} not preserved",
    )
    assert ok


# -- 5 ----------------------------------------------------------------------------------


def spread_cycle(rng, m=4, gap=3):
    """m grid points pairwise at least gap/24 apart around the circle."""
    while True:
        idx = sorted(rng.sample(range(24), m))
        if all((idx[(i + 1) % m] - idx[i]) % 24 >= gap for i in range(m)):
            return [G24[i] for i in idx]


def test_extreme_proximality(criterion):
    rng = random.Random(5)
    K = 6
    step_failures = occupancy_failures = 0
    traces = []
    for _ in range(50):
        while True:
            b, c = (Fr(rng.randint(0, 59), 60) for _ in range(2))
            if b != c:
                break
        z = (c + ((b - c) % 1) * Fr(rng.randint(0, 12), 12)) % 1
        F = spread_cycle(rng)
        steps = shrink_set(b, c, z, K)
        for k, s in enumerate(steps, start=1):
            r = Fr(1, 2**k)
            good = s.radius == r and s.lower == (z - r) % 1 and s.upper == (z + r) % 1
            good = good and s.contained() and s.element(z) == z
            step_failures += not good
        occupancy = [len(occupied_cells(F, s.image_c, s.image_b)) for s in steps]
        traces.append(occupancy[3])
        occupancy_failures += occupancy[3] > 3
    ok = step_failures == 0 and occupancy_failures == 0
    criterion(
        5,
        "extreme proximality",
        ok,
        f"50 instances x {K} steps, {step_failures} step failures; occupancy at k=4 over |F|=4: "
        f"max {max(traces)}, {occupancy_failures} above 3",
    )
    assert ok


# -- 6 ----------------------------------------------------------------------------------


def test_strong_proximality(criterion):
    rng = random.Random(6)
    K = 6
    measures = []
    for _ in range(400):
        k = rng.randint(1, 5)
        pts = rng.sample([Fr(i, 120) for i in range(120)], k)
        weights = [rng.randint(1, 9) for _ in pts]
        total = sum(weights)
        measures.append((FinSuppMeasure([(p, Fr(w, total)) for p, w in zip(pts, weights)]), Fr(rng.randint(0, 119), 120)))
    # edge cases: an atom at z, antipodal atoms, atoms hugging z
    measures.append((FinSuppMeasure([(0, Fr(1, 2)), (Fr(1, 2), Fr(1, 2))]), Fr(0)))
    measures.append((FinSuppMeasure([(Fr(1, 2), 1)]), Fr(0)))
    measures.append((FinSuppMeasure([(Fr(-1, 1000) % 1, Fr(1, 3)), (Fr(1, 1000), Fr(2, 3))]), Fr(0)))
    failures = 0
    for mu, z in measures:
        last = push_measure(mu, z, K)[-1]
        r = Fr(1, 2**K)
        near = all(min((p - z) % 1, (z - p) % 1) <= r for p in last.measure.support)
        failures += not (last.radius == r and last.concentrated == 1 and near)
    ok = failures == 0
    criterion(6, "strong proximality on atoms", ok, f"{len(measures)} measures (<=5 atoms), K={K}, {failures} failures")
    assert ok


# -- 7 ----------------------------------------------------------------------------------


SPLIT_SAMPLE = [
    SplitPoint.minus(Fr(0)),
    SplitPoint.plus(Fr(0)),
    SplitPoint.minus(Fr(1, 3)),
    SplitPoint.plus(Fr(1, 3)),
    SplitPoint.plus(Fr(1, 5)),
    SplitPoint.minus(Fr(7, 11)),
    SplitPoint(QuadraticIrrational(-1, 1, 1, 2)),
    SplitPoint(QuadraticIrrational(0, 1, 2, 2)),
    SplitPoint(QuadraticIrrational(1, 1, 4, 5)),
    SplitPoint(QuadraticIrrational(0, 1, 3, 3)),
]


def test_minimality(criterion):
    G12 = grid(12)
    cycles = [Cycle(S) for m in range(1, 5) for S in itertools.combinations(G12, m)]
    incomplete = []
    for x in SPLIT_SAMPLE:
        for F in cycles:
            report = minimality_probe(x, F)
            if not (report.complete and report.covered == 2 * len(F)):
                incomplete.append((str(x), F))
    ok = not incomplete
    criterion(
        7,
        "minimality",
        ok,
        f"{len(SPLIT_SAMPLE)} split points x {len(cycles)} cycles (all m<=4 on the 12-grid); "
        f"{len(incomplete)} incomplete",
    )
    assert ok


# -- 8 ----------------------------------------------------------------------------------


COSET_CYCLES = [
    [Fr(0)],
    [Fr(2, 3)],
    [Fr(0), Fr(1, 2)],
    [Fr(0), Fr(1, 3)],
    [Fr(1, 5), Fr(7, 8)],
    [Fr(0), Fr(1, 3), Fr(2, 3)],
    [Fr(0), Fr(1, 4), Fr(1, 2)],
    [Fr(1, 8), Fr(1, 2), Fr(5, 6)],
]


def oracle_grid_size(F):
    """Smallest grid containing F with len(F) grid points strictly inside every gap."""
    base = math.lcm(*(x.denominator for x in F))
    pts = sorted(F)
    gap = min((b - a) % 1 or 1 for a, b in zip(pts, pts[1:] + pts[:1]))
    k = 1
    while gap * base * k - 1 < len(F):
        k += 1
    return base * k


def test_roelcke_finiteness(criterion):
    rng = random.Random(8)
    counts, mismatches = [], 0
    listed = {}
    for F in COSET_CYCLES:
        found = double_cosets(F)
        counts.append(len(found))
        listed[tuple(F)] = {p for p, _ in found}
        expected = brute_double_coset_types(F, oracle_grid_size(F))
        types = {configuration_type(F, [g(t) for t in F]) for _, g in found}
        mismatches += len(found) != len(expected) or types != expected
        mismatches += any(pattern_of(F, g) != p for p, g in found)
    singles = [c for F, c in zip(COSET_CYCLES, counts) if len(F) == 1]
    unlisted = 0
    for _ in range(1000):
        F = rng.choice(COSET_CYCLES)
        unlisted += pattern_of(F, random_element(rng)) not in listed[tuple(F)]
    ok = mismatches == 0 and unlisted == 0 and set(singles) == {2}
    criterion(
        8,
        "Roelcke finiteness",
        ok,
        f"pattern counts {counts} for |F|<=3 ({mismatches} oracle mismatches); "
        f"1000 random elements, {unlisted} unlisted",
    )
    assert ok


# -- 9 ----------------------------------------------------------------------------------


def phi_oracle_key(x: SplitPoint):
    """Sort key for the linear order attached to x: points after x come first."""
    v = x.value
    if x.is_rational:
        after = (lambda t: t >= v) if x.side == "minus" else (lambda t: t > v)
    else:
        after = lambda t: t > v  # noqa: E731
    return lambda t: (0 if after(t) else 1, t)


def random_split_point(rng):
    if rng.random() < 0.5:
        return SplitPoint(Fr(rng.randint(0, 59), 60), rng.choice(["minus", "plus"]))
    return SplitPoint(QuadraticIrrational(rng.randint(-9, 9), rng.randint(1, 5), rng.randint(1, 9), rng.choice([2, 3, 5, 7])))


def test_split_model(criterion):
    rng = random.Random(9)
    probes = grid(12) + [Fr(1, 7), Fr(5, 13), Fr(59, 60)]
    injective_failures = equivariance_failures = 0
    for _ in range(1000):
        x, y = random_split_point(rng), random_split_point(rng)
        while y == x:
            y = random_split_point(rng)
        a, b = distinguishing_pair(x, y)
        injective_failures += phi(x).less(a, b) == phi(y).less(a, b)
        g = random_element(rng)
        gx = act_on_split(g, x)
        lhs = phi(gx).sort(probes)
        equivariance_failures += lhs != phi(x).transformed(g).sort(probes)
        equivariance_failures += phi(x).sort(probes) != sorted(probes, key=phi_oracle_key(x))
    order_failures = orders = 0
    for n in range(1, 7):
        for order, _ in all_circular_orders(list(range(n))):
            A = from_linear(order)
            brute = {p for p in itertools.permutations(range(n)) if from_linear(p) == A}
            found = compatible_linear_orders(A)
            orders += 1
            order_failures += len(found) != n or set(found) != brute
    fiber_failures = 0
    for i in range(1000):
        if i % 2:
            fiber_failures += len(fiber(Fr(rng.randint(0, 999), 1000))) != 2
        else:
            xi = QuadraticIrrational(rng.randint(-20, 20), rng.randint(1, 9), rng.randint(1, 12), rng.choice([2, 3, 5, 6, 7]))
            fiber_failures += len(fiber(xi)) != 1
    failures = injective_failures + equivariance_failures + order_failures + fiber_failures
    ok = failures == 0
    criterion(
        9,
        "split model",
        ok,
        f"1000 probes ({injective_failures} injectivity, {equivariance_failures} equivariance failures); "
        f"{orders} circular orders n<=6 ({order_failures} failures); 1000 fibers ({fiber_failures} failures)",
    )
    assert ok


# -- 10 ---------------------------------------------------------------------------------


def random_tower_element(rng):
    level = rng.randint(1, 3)
    gens = [alpha(i) for i in range(1, level + 1)]

    def poly():
        x = coerce(0)
        for _ in range(rng.randint(1, 3)):
            c = Fr(rng.randint(-5, 5), rng.randint(1, 4))
            k = rng.randint(0, level)
            x = x + (c if k == 0 else c * gens[k - 1] ** rng.randint(1, 2))
        return x

    while True:
        den = poly()
        if den:
            return poly() / den


def appendix_value(a, b, x):
    a, b = list(a) + [coerce(1)], list(b) + [coerce(1)]
    for i in range(len(a) - 1):
        if a[i] <= x < a[i + 1]:
            return b[i] + (b[i + 1] - b[i]) / (a[i + 1] - a[i]) * (x - a[i])
    raise ValueError(x)


def test_field_tower(criterion):
    rng = random.Random(10)
    field_failures = order_failures = 0
    for _ in range(1000):
        x, y, z = (random_tower_element(rng) for _ in range(3))
        field_failures += not (
            (x + y) + z == x + (y + z)
            and (x * y) * z == x * (y * z)
            and x * (y + z) == x * y + x * z
            and x + y == y + x
            and x * y == y * x
            and x + (-x) == 0
            and (not x or x * x.inverse() == 1)
        )
        trichotomy = [x < y, x == y, x > y].count(True) == 1
        transitive = not (x < y and y < z) or x < z
        additive = not x < y or x + z < y + z
        multiplicative = not (x < y and z > 0) or x * z < y * z
        order_failures += not (trichotomy and transitive and additive and multiplicative)
    infinitesimal_failures = 0
    for i in range(1000):
        q = Fr(rng.randint(1, 10**6), rng.randint(1, 10**6)) if i % 3 else Fr(1, 10 ** rng.randint(1, 60))
        n = 1 + i % 3
        infinitesimal_failures += sign(alpha(n) - q) != -1
        infinitesimal_failures += n > 1 and sign(alpha(n) - q * alpha(n - 1) ** rng.randint(1, 4)) != -1
    floor_failures = 0
    for _ in range(300):
        x = random_tower_element(rng)
        if not is_finite(x):
            continue
        m, r = floor(x), mod1(x).rep
        shift = rng.randint(-5, 5)
        floor_failures += not (m <= x < m + 1 and r == x - m and 0 <= r < 1 and mod1(x + shift).rep == r)
    a, a2 = alpha(1), alpha(2)
    pl_failures = 0
    f = pl_extend_k([0, Fr(1, 3)], [0, Fr(1, 2)])
    pl_failures += f(Fr(2, 3)) != Fr(3, 4)
    g = pl_extend_k([0, a], [0, Fr(1, 2)])
    pl_failures += g(a) != Fr(1, 2) or g.slopes()[0] != 1 / (2 * a)
    src, dst = [coerce(0), a, coerce(Fr(1, 2))], [coerce(0), coerce(Fr(1, 3)), Fr(1, 3) + a2]
    h = pl_extend_k(src, dst)
    probes = [coerce(0), a2, a, a + a2, 2 * a, coerce(Fr(1, 4)), Fr(1, 2) - a, coerce(Fr(1, 2)), Fr(1, 2) + a2, 1 - a, 1 - a2]
    pl_failures += any(h(x) != appendix_value(src, dst, x) for x in probes)
    pts = [CirclePointK(x) for x in probes]
    pl_failures += not is_corder_preserving(lambda p: CirclePointK(h(p)), pts, domain=K_CIRCLE, codomain=K_CIRCLE)
    failures = field_failures + order_failures + infinitesimal_failures + floor_failures + pl_failures
    ok = failures == 0
    criterion(
        10,
        "field tower",
        ok,
        f"1000 triples at depth<=3 ({field_failures} field, {order_failures} order failures); "
        f"1000 rationals q ({infinitesimal_failures} infinitesimality failures); "
        f"floor/mod1 {floor_failures} failures; worked PL examples {pl_failures} failures",
    )
    assert ok


# -- 11 ---------------------------------------------------------------------------------


def test_free_subgroup_probe(criterion):
    g, h = ping_pong_pair()
    probes = [Fr(2 * k + 1, 16) for k in range(8)]
    verdict = ping_pong_free_probe(g, h, 6, probes)
    ok = not verdict.relation_found
    criterion(11, "free-subgroup probe", ok, f"L=6 over 8 probes: {verdict}")
    assert ok
