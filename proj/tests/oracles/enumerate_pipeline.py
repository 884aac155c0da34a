#!/usr/bin/env python3
"""Brute-force enumeration of the three-thread pipeline chains.

Written directly from the operational rules, without the parser or the
composer: each thread is Error_Free (E), Failed (F) or, in iteration 3 for
Compute3 only, CanRecover (R).

  1: every thread fails at rate lam and recovers at rate mu.
  2: entering F emits KO with probability p; KO fails the next thread if it is E.
  3: Compute3 no longer recovers from F; whenever Compute1 and Compute2 are
     both E and Compute3 is F, Compute3 moves to R at once. R recovers at rate mu.

Prints a JSON summary; with --check, asserts the expected counts.
"""

import argparse
import itertools
import json
import sys
from fractions import Fraction


def successors(state, it, lam, mu, p):
    """(rate, {target: probability}) for every timed move out of `state`."""
    moves = []
    for i in range(3):
        local = state[i]
        if local == "E":
            moves.append((lam, fail(state, i, it, p)))
        elif local == "F" and not (it >= 3 and i == 2):
            moves.append((mu, settle({recover(state, i): Fraction(1)}, it)))
        elif local == "R":
            moves.append((mu, settle({recover(state, i): Fraction(1)}, it)))
    return moves


def recover(state, i):
    s = list(state)
    s[i] = "E"
    return tuple(s)


def fail(state, i, it, p):
    dist = {}
    s = list(state)
    s[i] = "F"
    # Cascade down the pipe: thread j failing may fail thread j+1.
    frontier = [(tuple(s), Fraction(1), i)]
    while frontier:
        st, prob, j = frontier.pop()
        nxt = j + 1
        if it < 2 or nxt > 2:
            dist[st] = dist.get(st, 0) + prob
            continue
        # KO emitted with probability p on entering F.
        silent = prob * (1 - p)
        if silent:
            dist[st] = dist.get(st, 0) + silent
        loud = prob * p
        if loud:
            if st[nxt] == "E":
                t = list(st)
                t[nxt] = "F"
                frontier.append((tuple(t), loud, nxt))
            else:
                dist[st] = dist.get(st, 0) + loud
    return settle(dist, it)


def settle(dist, it):
    if it < 3:
        return dist
    out = {}
    for st, prob in dist.items():
        if st[0] == "E" and st[1] == "E" and st[2] == "F":
            st = ("E", "E", "R")
        out[st] = out.get(st, 0) + prob
    return out


def enumerate_chain(it, lam, mu, p):
    start = ("E", "E", "E")
    seen = {start}
    order = [start]
    rates = {}
    branching = {}
    k = 0
    while k < len(order):
        s = order[k]
        k += 1
        for rate, dist in successors(s, it, lam, mu, p):
            assert sum(dist.values()) == 1
            for target, prob in dist.items():
                if target not in seen:
                    seen.add(target)
                    order.append(target)
                if target != s and prob:
                    rates[(s, target)] = rates.get((s, target), 0) + rate * prob
    return order, rates


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--check", action="store_true")
    args = ap.parse_args()
    lam, mu, p = Fraction(1, 1000), Fraction(1, 10), Fraction(1, 2)
    summary = {}
    for it in (1, 2, 3):
        states, rates = enumerate_chain(it, lam, mu, p)
        summary[it] = {"states": len(states), "transitions": len(rates)}
    branches = fail(("E", "E", "E"), 0, 2, p)
    summary["cascade"] = {"".join(k): str(v) for k, v in sorted(branches.items())}
    all_combinations = list(itertools.product("EF", "EF", "EFR"))
    reached3 = set(enumerate_chain(3, lam, mu, p)[0])
    summary["unreached_at_3"] = ["".join(s) for s in all_combinations if s not in reached3]
    print(json.dumps(summary, indent=2))
    if args.check:
        assert summary[1] == {"states": 8, "transitions": 24}, summary[1]
        assert summary[2] == {"states": 8, "transitions": 29}, summary[2]
        assert summary["cascade"] == {"FEE": "1/2", "FFE": "1/4", "FFF": "1/4"}, summary["cascade"]
        assert summary[3] == {"states": 11, "transitions": 35}, summary[3]
        assert summary["unreached_at_3"] == ["EEF"], summary["unreached_at_3"]
    return 0


if __name__ == "__main__":
    sys.exit(main())
