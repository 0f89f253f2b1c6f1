"""Check the one-in-three and 3-SAT encodings against brute force on all small instances."""

import time

from relsyl.corpus import (all_3sat, all_one_in_three, brute_sat, encode_3sat,
                           encode_one_in_three, one_in_three_check)
from relsyl.deciders import NO, decide_l3
from relsyl.semantics import Countermodel, oracle_consequence


def main():
    t = time.perf_counter()
    bad = 0
    for S in all_one_in_three():
        g, phi = encode_one_in_three(S)
        v = decide_l3(g, phi, probe=1)
        sat = one_in_three_check(S) is not None
        bad += (v.answer == NO) != sat
        print(f"one-in-three {S.clauses}: {v.answer} (satisfiable={sat})")
    cnfs = all_3sat()
    for F in cnfs:
        g, phi = encode_3sat(F)
        r = oracle_consequence(g, phi, 1, min_size=1, backend="sat")
        bad += isinstance(r, Countermodel) != (brute_sat(F) is not None)
    print(f"{len(cnfs)} 3-SAT instances checked; mismatches={bad}; {time.perf_counter() - t:.1f}s")
    return 1 if bad else 0


if __name__ == "__main__":
    raise SystemExit(main())
