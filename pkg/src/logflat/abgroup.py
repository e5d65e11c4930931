"""Structure of a finite abelian group given by a multiplication table.

Used for class groups and their quotients at desk scale (orders well under
a hundred), where brute force over the element list is the honest tool.
Elements are indices 0..h-1 into the caller's list; index 0 is the identity.
"""

from __future__ import annotations

import itertools
from .errors import ConsistencyError
from .rings import factor_int


def element_orders(table: list[list[int]]) -> list[int]:
    orders = []
    for x in range(len(table)):
        k, acc = 1, x
        while acc != 0:
            acc = table[acc][x]
            k += 1
        orders.append(k)
    return orders


def invariant_factors_from_orders(orders: list[int]) -> list[int]:
    """Ascending invariant factors d1 | d2 | ... from the multiset of orders.

    Uses the counting identity #{x : p^k x = 0} = p^(sum_i min(k, a_i)) to
    recover the p-part exponents one prime at a time.
    """
    h = len(orders)
    if h == 1:
        return []
    p_parts: dict[int, list[int]] = {}
    for p in sorted(factor_int(h)):
        logs = [0]
        k = 1
        while True:
            m = p**k
            count = sum(1 for o in orders if m % o == 0)
            e = 0
            while p**e < count:
                e += 1
            if p**e != count:
                raise ConsistencyError("kill count is not a power of p")
            logs.append(e)
            if e == logs[-2]:
                break
            k += 1
        ranks = [logs[k] - logs[k - 1] for k in range(1, len(logs))]
        # ranks[k-1] = #{i : a_i >= k}
        exps = []
        for i in range(ranks[0] if ranks else 0):
            exps.append(sum(1 for r in ranks if r > i))
        p_parts[p] = exps  # descending
    rank = max((len(v) for v in p_parts.values()), default=0)
    factors_desc = []
    for i in range(rank):
        f = 1
        for p, exps in p_parts.items():
            if i < len(exps):
                f *= p ** exps[i]
        factors_desc.append(f)
    factors = sorted(factors_desc)
    prod = 1
    for f in factors:
        prod *= f
    if prod != h:
        raise ConsistencyError("invariant factors do not multiply to the order")
    return factors


def structure_from_table(table: list[list[int]]):
    """(ascending invariant factors, generator indices, dlog dict).

    dlog maps coordinate tuples (e1, ..., et) with 0 <= ei < di to element
    indices.
    """
    h = len(table)
    orders = element_orders(table)
    factors = invariant_factors_from_orders(orders)
    if not factors:
        return [], [], {(): 0}

    def power(x, k):
        acc = 0
        for _ in range(k):
            acc = table[acc][x]
        return acc

    candidates = [[x for x in range(h) if orders[x] == f] for f in factors]
    for tup in itertools.product(*candidates):
        seen = {}
        ok = True
        for coords in itertools.product(*(range(f) for f in factors)):
            acc = 0
            for x, e in zip(tup, coords):
                acc = table[acc][power(x, e)]
            if acc in seen:
                ok = False
                break
            seen[acc] = coords
        if ok and len(seen) == h:
            dlog = {coords: elt for elt, coords in seen.items()}
            return factors, list(tup), dlog
    raise ConsistencyError("no generator tuple realizes the invariant factors")
