"""Build, verify and tamper with a membership certificate.

    python3 scripts/certificate_demo.py
    python3 scripts/certificate_demo.py --json cert.json
"""

import argparse
import json

from pidsubcat.homcheck import ShortExactSeq
from pidsubcat.modstruct import FgModule
from pidsubcat.ring import ZZ
from pidsubcat.subcat import generate, member
from pidsubcat.witness import CertStep, Certificate, member_certificate, verify_certificate


def tamper(cert: Certificate, i: int) -> Certificate:
    """Zero the top-left entry of the first map in step ``i``."""
    seq = cert.steps[i].seq
    rows = [list(r) for r in seq.f.matrix]
    rows[0][0] = 0
    f = type(seq.f)(seq.f.domain, seq.f.codomain, tuple(map(tuple, rows)))
    steps = list(cert.steps)
    steps[i] = CertStep(ShortExactSeq(seq.left, seq.mid, seq.right, f, seq.g), steps[i].derived, steps[i].note)
    return Certificate(cert.ring, cert.generators, tuple(steps), cert.target)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--json", help="write the certificate here")
    args = ap.parse_args()

    gens = [FgModule(ZZ, 0, {2: [2], 3: [1]})]          # Z/4 + Z/3
    target = FgModule(ZZ, 0, {2: [1, 1, 1, 1], 3: [1, 1]})  # (Z/2)^4 + (Z/3)^2
    d = generate(gens)
    print("descriptor:", d.to_json())
    print("target is a member:", member(d, target))

    cert = member_certificate(gens, target)
    print(f"certificate with {len(cert.steps)} steps")
    for i, s in enumerate(cert.steps):
        print(f"  {i:>2} {s.derived:<5} {s.seq.left} -> {s.seq.mid} -> {s.seq.right}  ({s.note})")
    print("verify:", verify_certificate(cert).to_json())
    print("verify after tampering step 0:", verify_certificate(tamper(cert, 0)).to_json())
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(cert.to_json(), fh, indent=2)


if __name__ == "__main__":
    main()
