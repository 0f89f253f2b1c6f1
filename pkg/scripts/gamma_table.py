"""Decide Gamma_n and every Delta_n,i; print proof sizes, countermodel sizes and timings."""

import argparse
import time

from relsyl.corpus import gen_delta_ni, gen_gamma_n
from relsyl.deciders import check_verdict, decide_l2plus
from relsyl.syntax import parse_sentence

GOAL = parse_sentence("some a a")


def row(label, theory):
    t = time.perf_counter()
    v = decide_l2plus(theory, GOAL)
    dt = time.perf_counter() - t
    ok = check_verdict(theory, GOAL, v).accepted
    size = v.certificate.size() if v.answer == "yes" else v.certificate.size
    what = "proof nodes" if v.answer == "yes" else "model size"
    print(f"{label:<14} {v.answer:<4} {what:<12} {size:>5}  checked={ok}  {dt * 1000:8.1f} ms")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-n", type=int, default=6)
    args = ap.parse_args()
    for n in range(1, args.max_n + 1):
        row(f"Gamma_{n}", gen_gamma_n(n))
        for i in range(1, n + 1):
            row(f"Delta_{n},{i}", gen_delta_ni(n, i))


if __name__ == "__main__":
    main()
