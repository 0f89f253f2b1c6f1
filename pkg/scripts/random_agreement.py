"""Compare the deciders with the brute-force oracle on random problems of one fragment."""

import argparse
import collections
import random
import time

from relsyl.corpus import random_problem
from relsyl.deciders import YES, check_verdict, decide
from relsyl.semantics import Countermodel, oracle_consequence
from relsyl.syntax import print_sentence, print_theory


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("fragment", help="L1, L2, L2Plus, L3, L3Half, L4HalfPlus, ...")
    ap.add_argument("--count", type=int, default=500)
    ap.add_argument("--depth", type=int, default=2)
    ap.add_argument("--oracle-size", type=int, default=4)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    answers = collections.Counter()
    mismatches = 0
    worst = 0.0
    for _ in range(args.count):
        g, phi = random_problem(rng, args.fragment, depth=args.depth, max_sentences=3)
        t = time.perf_counter()
        v = decide(g, phi)
        worst = max(worst, time.perf_counter() - t)
        answers[v.answer] += 1
        rep = check_verdict(g, phi, v)
        if not rep.accepted:
            print("certificate rejected:", rep.reason)
            mismatches += 1
        if v.answer == YES:
            r = oracle_consequence(g, phi, args.oracle_size, backend="sat")
            if isinstance(r, Countermodel):
                mismatches += 1
                print("oracle refutes a yes:\n" + print_theory(g) + "goal " + print_sentence(phi))
    print(dict(answers), f"mismatches={mismatches}", f"slowest={worst:.2f}s")
    return 1 if mismatches else 0


if __name__ == "__main__":
    raise SystemExit(main())
