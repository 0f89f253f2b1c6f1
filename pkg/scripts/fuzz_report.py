"""Soundness fuzzing of every inference rule against random finite models."""

import argparse

from relsyl.audit import all_rule_names, fuzz_rule


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--max-domain", type=int, default=3)
    args = ap.parse_args()
    bad = 0
    for name in all_rule_names():
        rep = fuzz_rule(name, args.trials, seed=args.seed, max_domain=args.max_domain)
        bad += not rep.ok
        print(f"{name:<14} trials={rep.trials:<6} attempts={rep.attempts:<7} "
              f"violations={len(rep.violations)}")
    print("all sound" if not bad else f"{bad} rules with violations")
    return 1 if bad else 0


if __name__ == "__main__":
    raise SystemExit(main())
