"""Compare the bounded-universe fixpoint with the lattice classifier.

For random generator sets inside a universe of finite abelian groups, count
how often the literal closure (two-of-three over short exact sequences whose
terms all lie in the universe) agrees with ``member(generate(gens), .)``.
Disagreements are split into "missing" (classifier members the fixpoint never
reaches) and "unsound" (fixpoint members the classifier rejects).

    python3 scripts/oracle_agreement.py --max-length 3 4 --sets 100
"""

import argparse
import random
import time
from dataclasses import dataclass

from pidsubcat.oracle import brute_closure, enumerate_universe, ses_table
from pidsubcat.subcat import generate, member


@dataclass
class AgreementConfig:
    primes: tuple = (2, 3)
    max_length: int = 4
    n_sets: int = 100
    max_gens: int = 3
    seed: int = 20240601


def run(cfg: AgreementConfig) -> dict:
    start = time.perf_counter()
    u = enumerate_universe(list(cfg.primes), cfg.max_length)
    table = ses_table(u)
    built = time.perf_counter() - start
    rnd = random.Random(cfg.seed)
    nonzero = [M for M in u.modules if not M.is_zero]
    agree = missing_sets = unsound_sets = missing = 0
    for _ in range(cfg.n_sets):
        gens = rnd.sample(nonzero, rnd.randint(1, cfg.max_gens))
        closed = brute_closure(gens, u, table)
        members = {M for M in u.modules if member(generate(gens), M)}
        agree += closed == members
        missing_sets += bool(members - closed)
        unsound_sets += bool(closed - members)
        missing += len(members - closed)
    return {
        "classes": len(u.modules),
        "agree": agree,
        "missing_sets": missing_sets,
        "missing_members": missing,
        "unsound_sets": unsound_sets,
        "table_seconds": round(built, 2),
        "total_seconds": round(time.perf_counter() - start, 2),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--primes", default="2,3")
    ap.add_argument("--max-length", type=int, nargs="+", default=[3, 4])
    ap.add_argument("--sets", type=int, default=100)
    ap.add_argument("--seed", type=int, default=20240601)
    args = ap.parse_args()
    primes = tuple(int(p) for p in args.primes.split(","))
    print(f"{'len':>4} {'classes':>8} {'agree':>6} {'missing':>8} {'unsound':>8} {'secs':>6}")
    for L in args.max_length:
        r = run(AgreementConfig(primes, L, args.sets, seed=args.seed))
        print(f"{L:>4} {r['classes']:>8} {r['agree']:>3}/{args.sets:<2} "
              f"{r['missing_sets']:>8} {r['unsound_sets']:>8} {r['total_seconds']:>6}")


if __name__ == "__main__":
    main()
